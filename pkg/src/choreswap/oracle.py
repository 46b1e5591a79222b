"""Independent brute-force ground truth at desk scale.

The envy inequalities here are re-implemented from scratch on purpose and
do not call the solver-side checkers, so the two can cross-validate each
other. Budgets are allocation-count caps (default 2^22), not wall time.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import (
    BudgetExceeded,
    GenerationBudgetExceeded,
    TraceMismatch,
)
from .framework import FriendlyCertificate, SwapTrace
from .market import mpb_price_feasibility  # noqa: F401 (re-exported oracle aid)
from .model import INFINITE, Allocation, Instance, allocation_from_bundles

DEFAULT_ORACLE_BUDGET = 1 << 22


class EnumerationCursor:
    """Owner vector as a base-n counter; yields every complete allocation
    of m chores to n agents exactly once, lexicographically."""

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        self.owners: Optional[List[int]] = None

    def __iter__(self):
        return self

    def __next__(self) -> tuple:
        if self.owners is None:
            self.owners = [0] * self.m
            return tuple(self.owners)
        pos = self.m - 1
        while pos >= 0 and self.owners[pos] == self.n - 1:
            self.owners[pos] = 0
            pos -= 1
        if pos < 0:
            raise StopIteration
        self.owners[pos] += 1
        return tuple(self.owners)


def enumerate_allocations(n: int, m: int):
    """All n^m complete allocations in owner-vector lexicographic order."""
    for owners in EnumerationCursor(n, m):
        yield Allocation(n, owners)


def best_efx_factor(inst: Instance, budget: int = DEFAULT_ORACLE_BUDGET):
    """Minimum efx factor over every complete allocation, exactly.

    Exhaustive depth-first enumeration with incremental pairwise bundle
    sums; ratios are compared by integer cross-multiplication.
    """
    n, m = inst.n, inst.m
    if n**m > budget:
        raise BudgetExceeded(f"{n}^{m} allocations exceed budget {budget}")
    rows = inst.integer_rows()
    # cross[i][h]: agent i's value of agent h's current bundle.
    cross = [[0] * n for _ in range(n)]
    minv = [0] * n  # own-row minimum within the own bundle
    cnt = [0] * n
    best: Optional[Fraction] = None

    def leaf():
        nonlocal best
        num_f: Optional[Fraction] = None  # max ratio for this allocation
        for i in range(n):
            if cnt[i] < 2:
                continue
            num = cross[i][i] - minv[i]
            if num == 0:
                continue
            row_cross = cross[i]
            for h in range(n):
                if h == i:
                    continue
                den = row_cross[h]
                if den == 0:
                    return  # infinite factor, never the minimum
                r = Fraction(num, den)
                if num_f is None or r > num_f:
                    num_f = r
                    if best is not None and num_f >= best:
                        return  # cannot beat the incumbent
        val = num_f if num_f is not None else Fraction(0)
        if best is None or val < best:
            best = val

    def dfs(j: int):
        if best == 0:
            return
        if j == m:
            leaf()
            return
        for a in range(n):
            w = rows[a][j]
            for i in range(n):
                cross[i][a] += rows[i][j]
            saved_min = minv[a]
            if cnt[a] == 0 or w < saved_min:
                minv[a] = w
            cnt[a] += 1
            dfs(j + 1)
            cnt[a] -= 1
            minv[a] = saved_min
            for i in range(n):
                cross[i][a] -= rows[i][j]

    dfs(0)
    if best is None:
        return INFINITE
    return best


def pef1_mpb_exists(inst: Instance, budget: int = DEFAULT_ORACLE_BUDGET) -> bool:
    """True iff some complete allocation admits prices under which it is
    an MPB allocation and pEF1 (same feasibility routine as the solver's
    search, exercised exhaustively)."""
    from .pipelines import search_pef1_mpb

    return search_pef1_mpb(inst, budget) is not None


@dataclass(frozen=True)
class CertificateBounds:
    """Size and value ranges for random certificate generation."""

    n_max: int = 4
    m_max: int = 8
    value_max: int = 20
    lams: tuple = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4))
    modes: tuple = (False, True)  # strict, weak


def generate_valid_certificate(
    seed: int, bounds: CertificateBounds = CertificateBounds()
) -> Tuple[Instance, Allocation, FriendlyCertificate]:
    """Random (instance, allocation, certificate) triple that is Valid by
    construction.

    Residual chores are cheap (at most value_max) while every chore
    outside an agent's own bundle, and every designated chore, costs a
    planted B large enough that each certificate inequality holds with
    room to spare: B >= m * value_max / min(1, lambda - 1). For
    lambda = 1 the residuals are forced empty (strict) or singleton
    (weak) instead.
    """
    if bounds.n_max < 1 or bounds.m_max < 1 or bounds.value_max < 1:
        raise GenerationBudgetExceeded(f"degenerate bounds: {bounds}")
    rng = random.Random(seed)
    n = rng.randint(1, min(bounds.n_max, bounds.m_max))
    lam = rng.choice(bounds.lams)
    weak = rng.choice(bounds.modes)
    nh = frozenset(i for i in range(n) if rng.random() < 0.5)
    n0 = frozenset(range(n)) - nh

    sizes = [1] * n
    cap = [bounds.m_max] * n
    if lam == 1:
        for i in nh:
            cap[i] = 2 if weak else 1
    for _ in range(bounds.m_max - n):
        grow = [i for i in range(n) if sizes[i] < cap[i]]
        if not grow:
            break
        if rng.random() < 0.5:
            sizes[rng.choice(grow)] += 1
    m = sum(sizes)

    chores = list(range(m))
    rng.shuffle(chores)
    bundles = []
    pos = 0
    for i in range(n):
        bundles.append(sorted(chores[pos : pos + sizes[i]]))
        pos += sizes[i]
    desig = {i: rng.choice(bundles[i]) for i in nh}

    V = bounds.value_max
    if lam > 1:
        big = max(m * V, math.ceil(Fraction(m * V) / (lam - 1)))
    else:
        big = m * V
    d = [[0] * m for _ in range(n)]
    for i in range(n):
        own = set(bundles[i])
        for j in range(m):
            if j in own:
                if i in nh and j == desig[i]:
                    d[i][j] = big
                else:
                    d[i][j] = rng.randint(1, V)
            else:
                d[i][j] = big
    # Residual chores of other NH agents are unconstrained by the
    # certificate inequalities; randomize them for fuzzing value, but keep
    # them at value_max or above so each row's global minimum stays inside
    # the own residual (the weak-mode bundle-min condition).
    for i in range(n):
        for h in nh:
            if h == i:
                continue
            for j in bundles[h]:
                if j != desig[h]:
                    d[i][j] = rng.randint(V, big)

    inst = Instance(tuple(tuple(Fraction(v) for v in row) for row in d))
    alloc = allocation_from_bundles(n, m, bundles)
    cert = FriendlyCertificate(lam, n0, nh, weak=weak)
    return inst, alloc, cert


def _bundle_sum(inst: Instance, i: int, chores) -> Fraction:
    total = Fraction(0)
    for j in chores:
        total += inst.d[i][j]
    return total


def _hat(inst: Instance, i: int, chores) -> Fraction:
    vals = [inst.d[i][j] for j in chores]
    if len(vals) <= 1:
        return Fraction(0)
    return sum(vals, Fraction(0)) - min(vals)


def _lam_efx_ok(inst: Instance, bundles, i: int, lam: Fraction) -> bool:
    num = _hat(inst, i, bundles[i])
    if num == 0:
        return True
    for h in range(inst.n):
        if h != i and num > lam * _bundle_sum(inst, i, bundles[h]):
            return False
    return True


def verify_trace(
    inst: Instance, Y: Allocation, cert: FriendlyCertificate, trace: SwapTrace
) -> bool:
    """Replay the framework independently and compare every recorded pick,
    swap and the final factor against the trace.

    Raises TraceMismatch when the trace diverges from the replay (forged,
    reordered or missing events). Returns False when the replay itself
    breaks an invariant, True when everything checks out.
    """
    n, m = inst.n, inst.m
    bundles = [set(b) for b in Y.bundles()]
    order = sorted(cert.nh)
    lam = cert.lam

    def argmax_chore(i, bundle):
        best = None
        for j in sorted(bundle):
            if best is None or inst.d[i][j] > inst.d[i][best]:
                best = j
        return best

    desig = {i: argmax_chore(i, bundles[i]) for i in order}
    pool = set(desig.values())
    for i in order:
        bundles[i].discard(desig[i])
    picks = []
    picked = {}
    for i in order:
        j = min(pool, key=lambda c: (inst.d[i][c], c))
        pool.remove(j)
        bundles[i].add(j)
        picked[i] = j
        picks.append((i, j))
    if picks != list(trace.picks):
        raise TraceMismatch(f"picks diverge: replay {picks}, trace {list(trace.picks)}")

    swaps = []
    ok = True
    swapped = set()
    for pos, i in enumerate(order):
        if any(h in swapped for h in order[pos:]):
            ok = False
        if not _lam_efx_ok(inst, bundles, i, lam):
            l = min(
                (h for h in range(n) if h != i),
                key=lambda h: (_bundle_sum(inst, i, bundles[h]), h),
            )
            j_i = picked[i]
            bundles[i] |= bundles[l]
            bundles[i].discard(j_i)
            bundles[l] = {j_i}
            swapped.add(i)
            swapped.add(l)
            swaps.append((i, l, j_i))
            if not _lam_efx_ok(inst, bundles, i, lam):
                ok = False
            if cert.weak:
                bound = _hat(inst, i, bundles[i])
            else:
                bound = _bundle_sum(inst, i, bundles[i])
            if bound > lam * inst.d[i][j_i]:
                ok = False
        done = set(cert.n0) | set(order[: pos + 1])
        if not all(_lam_efx_ok(inst, bundles, h, lam) for h in done):
            ok = False
    if swaps != list(trace.swaps):
        raise TraceMismatch(f"swaps diverge: replay {swaps}, trace {list(trace.swaps)}")

    factor = Fraction(0)
    unbounded = False
    for i in range(n):
        num = _hat(inst, i, bundles[i])
        if num == 0:
            continue
        for h in range(n):
            if h == i:
                continue
            den = _bundle_sum(inst, i, bundles[h])
            if den == 0:
                unbounded = True
            elif num / den > factor:
                factor = num / den
    final = INFINITE if unbounded else factor
    recorded = trace.final_factor
    same = (
        isinstance(recorded, Fraction) and not unbounded and recorded == factor
    ) or (unbounded and recorded is INFINITE)
    if not same:
        raise TraceMismatch(
            f"final factor diverges: replay {final}, trace {recorded}"
        )
    if unbounded or not factor <= lam:
        ok = False
    if len(swaps) > len(order):
        ok = False
    return ok


def oracle_csv_row(instance_id: str, metric: str, value) -> str:
    """One `instance-id,metric,value` line for oracle reports."""
    return f"{instance_id},{metric},{value}"
