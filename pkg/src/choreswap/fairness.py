"""Exact checkers and factor computations for the fairness notions.

Envy quantification is over ordered pairs (i, h) with h != i; self-envy
is vacuous. Division-by-zero convention: a zero numerator over an empty
rival bundle is satisfied (ratio 0), a positive numerator over an empty
rival bundle is an Infinite factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from .errors import (
    AgentOutOfRange,
    BudgetExceeded,
    IncompleteAllocation,
    PriceLengthMismatch,
)
from .model import INFINITE, Allocation, Instance, bundle_disutility

DEFAULT_BUDGET = 1 << 22


def _require_complete(X: Allocation):
    if not X.complete:
        raise IncompleteAllocation("allocation has unassigned chores")


def _require_prices(inst: Instance, p: Sequence[Fraction]):
    if len(p) != inst.m:
        raise PriceLengthMismatch(f"expected {inst.m} prices, got {len(p)}")


def hat_d(inst: Instance, i: int, chores) -> Fraction:
    """d_i(S) minus the cheapest chore of S for agent i; 0 for |S| <= 1.

    Equals the worst single-removal residual max_{j in S} d_i(S \\ {j}).
    """
    inst.check_agent(i)
    chores = list(chores)
    if len(chores) <= 1:
        if chores:
            inst.check_chore(chores[0])
        return Fraction(0)
    row = inst.d[i]
    total = Fraction(0)
    lo = None
    for j in chores:
        inst.check_chore(j)
        total += row[j]
        if lo is None or row[j] < lo:
            lo = row[j]
    return total - lo


def efx_factor(inst: Instance, X: Allocation) -> Union[Fraction, object]:
    """Minimum lambda >= 0 such that X is lambda-EFX, or INFINITE."""
    _require_complete(X)
    bundles = X.bundles()
    worst = Fraction(0)
    for i in range(inst.n):
        num = hat_d(inst, i, bundles[i])
        if num == 0:
            continue
        for h in range(inst.n):
            if h == i:
                continue
            den = bundle_disutility(inst, i, bundles[h])
            if den == 0:
                return INFINITE
            ratio = num / den
            if ratio > worst:
                worst = ratio
    return worst


def is_alpha_efx(inst: Instance, X: Allocation, lam: Fraction) -> bool:
    """True iff d_i(X_i \\ {j}) <= lam * d_i(X_h) for all i, h != i, j in X_i."""
    _require_complete(X)
    bundles = X.bundles()
    for i in range(inst.n):
        num = hat_d(inst, i, bundles[i])
        if num == 0:
            continue
        for h in range(inst.n):
            if h != i and num > lam * bundle_disutility(inst, i, bundles[h]):
                return False
    return True


def is_alpha_efk(inst: Instance, X: Allocation, alpha: Fraction, k: int) -> bool:
    """True iff each agent, after dropping her k largest own chores, is
    within factor alpha of every rival bundle."""
    _require_complete(X)
    bundles = X.bundles()
    for i in range(inst.n):
        row = inst.d[i]
        vals = sorted((row[j] for j in bundles[i]), reverse=True)
        num = sum(vals[k:], Fraction(0))
        if num == 0:
            continue
        for h in range(inst.n):
            if h != i and num > alpha * bundle_disutility(inst, i, bundles[h]):
                return False
    return True


def _p_minus_k(p: Sequence[Fraction], bundle, k: int) -> Fraction:
    vals = sorted((p[j] for j in bundle), reverse=True)
    return sum(vals[k:], Fraction(0))


def _p_hat(p: Sequence[Fraction], bundle) -> Fraction:
    if len(bundle) <= 1:
        return Fraction(0)
    vals = [p[j] for j in bundle]
    return sum(vals, Fraction(0)) - min(vals)


def is_pefk(
    inst: Instance, X: Allocation, p: Sequence[Fraction], alpha: Fraction, k: int
) -> bool:
    """Price-EFk: p_{-k}(X_i) <= alpha * p(X_h) for all i, h != i."""
    _require_complete(X)
    _require_prices(inst, p)
    bundles = X.bundles()
    earnings = [sum((p[j] for j in b), Fraction(0)) for b in bundles]
    for i in range(inst.n):
        num = _p_minus_k(p, bundles[i], k)
        if num == 0:
            continue
        for h in range(inst.n):
            if h != i and num > alpha * earnings[h]:
                return False
    return True


def is_pefx(
    inst: Instance, X: Allocation, p: Sequence[Fraction], alpha: Fraction
) -> bool:
    """Price-EFX: earnings after excluding the least priced own chore."""
    _require_complete(X)
    _require_prices(inst, p)
    bundles = X.bundles()
    earnings = [sum((p[j] for j in b), Fraction(0)) for b in bundles]
    for i in range(inst.n):
        num = _p_hat(p, bundles[i])
        if num == 0:
            continue
        for h in range(inst.n):
            if h != i and num > alpha * earnings[h]:
                return False
    return True


@dataclass(frozen=True)
class PoResult:
    status: str  # "po", "dominated", "budget-exceeded"
    witness: Optional[Allocation] = None

    @property
    def is_po(self) -> bool:
        return self.status == "po"


def is_po_bruteforce(
    inst: Instance, X: Allocation, budget: int = DEFAULT_BUDGET
) -> PoResult:
    """Exhaustive Pareto check: first dominating allocation in owner-vector
    lexicographic order, or PO. Intended for n^m <= budget."""
    _require_complete(X)
    n, m = inst.n, inst.m
    if n**m > budget:
        return PoResult("budget-exceeded")
    rows = inst.integer_rows()
    targets = [0] * n
    for j, o in enumerate(X.owners):
        targets[o] += rows[o][j]

    owners = [0] * m
    sums = [0] * n

    def dfs(j: int):
        # Prune: domination needs every agent at or below her current total.
        if j == m:
            # Pruning already enforced sums[a] <= targets[a] everywhere;
            # domination additionally needs one strict improvement.
            if any(s < t for s, t in zip(sums, targets)):
                return tuple(owners)
            return None
        for a in range(n):
            w = rows[a][j]
            if sums[a] + w > targets[a]:
                continue
            owners[j] = a
            sums[a] += w
            hit = dfs(j + 1)
            sums[a] -= w
            if hit is not None:
                return hit
        return None

    hit = dfs(0)
    if hit is None:
        return PoResult("po")
    return PoResult("dominated", Allocation(n, hit))


@dataclass(frozen=True)
class EnvyRow:
    i: int  # 1-based in serialized form
    h: int
    notion: str
    numerator: Fraction
    denominator: Fraction

    @property
    def ratio(self):
        if self.numerator == 0:
            return Fraction(0)
        if self.denominator == 0:
            return INFINITE
        return self.numerator / self.denominator


@dataclass(frozen=True)
class EnvyReport:
    rows: tuple

    def to_csv(self) -> str:
        out = ["i,h,notion,numerator,denominator,ratio"]
        for r in self.rows:
            out.append(
                f"{r.i + 1},{r.h + 1},{r.notion},{r.numerator},"
                f"{r.denominator},{r.ratio}"
            )
        return "\n".join(out) + "\n"


def envy_report(inst: Instance, X: Allocation, k: Optional[int] = None) -> EnvyReport:
    """Pairwise envy quantities; EFX worst-removal numerators by default,
    EFk removal of the k largest chores when k is given."""
    _require_complete(X)
    bundles = X.bundles()
    notion = "efx" if k is None else f"ef{k}"
    rows = []
    for i in range(inst.n):
        if k is None:
            num = hat_d(inst, i, bundles[i])
        else:
            vals = sorted((inst.d[i][j] for j in bundles[i]), reverse=True)
            num = sum(vals[k:], Fraction(0))
        for h in range(inst.n):
            if h == i:
                continue
            den = bundle_disutility(inst, i, bundles[h])
            rows.append(EnvyRow(i, h, notion, num, den))
    return EnvyReport(tuple(rows))
