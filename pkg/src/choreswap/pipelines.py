"""Application pipelines: each produces a starting allocation plus a valid
friendly certificate, then delegates to the swap framework.

- solve_2efx: pEF1+MPB search, strict certificate with lambda = 2
- solve_bivalued: {1,k} prices, weak certificate with lambda = 2 - 1/k, PO
- solve_small_m: two-phase round robin, weak certificate with lambda = 1
- solve_4efx: rounded earning-restricted input, strict certificate, lambda = 4
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .errors import (
    BudgetExceeded,
    CertificateInvalid,
    CouplingUnsatisfiable,
    InvariantViolation,
    NotBivalued,
    PostconditionViolated,
    RhoNotLessThanK,
    RoundedInputInvalid,
    TooManyChores,
)
from .fairness import (
    DEFAULT_BUDGET,
    efx_factor,
    is_alpha_efx,
    is_pefk,
)
from .framework import FriendlyCertificate, SwapTrace, run_framework
from .market import (
    InfeasibilityCycle,
    RatioConstraint,
    RatioConstraintSystem,
    is_mpb_allocation,
    mpb_price_feasibility,
    mpb_view,
    solve_ratio_system,
)
from .model import (
    Allocation,
    Instance,
    allocation_from_bundles,
    bundle_disutility,
)


@dataclass(frozen=True)
class Pef1Solution:
    """An integral MPB allocation that is price-EF1, with its prices and
    the least earner's income rho."""

    x: Allocation
    p: tuple
    rho: Fraction


@dataclass
class SolveResult:
    x: Allocation
    trace: SwapTrace
    method: str
    cert: Optional[FriendlyCertificate] = None
    prices: Optional[tuple] = None
    notes: List[str] = field(default_factory=list)


def _trivial_trace(inst: Instance, X: Allocation, lam: Fraction, mode: str) -> SwapTrace:
    t = SwapTrace(lam=lam, mode=mode)
    t.final_factor = efx_factor(inst, X)
    return t


class _Pef1Search:
    """Lexicographic DFS over owner vectors with sound pruning.

    Pruning never changes the first feasible allocation found: branches
    are cut only when no completion can be MPB-feasible (a two-cycle of
    ratio constraints already multiplies below 1) or when too few chores
    remain to fill every empty bundle (only enforced when m >= n).
    """

    def __init__(self, inst: Instance, budget: int):
        self.inst = inst
        self.n, self.m = inst.n, inst.m
        if self.n**self.m > budget:
            raise BudgetExceeded(f"{self.n}^{self.m} allocations exceed budget {budget}")
        self.rows = inst.integer_rows()
        n, m = self.n, self.m
        self.ratio = [
            [
                [Fraction(self.rows[i][j], self.rows[k][j]) for j in range(m)]
                for k in range(n)
            ]
            for i in range(n)
        ]
        self.owners = [None] * m
        self.cmin = [[None] * n for _ in range(n)]  # cmin[i][k]: min over X_k
        self.sums = [0] * n
        self.maxv = [0] * n
        self.counts = [0] * n

    def leaf_check(self):
        """Return prices (tuple of Fractions) if the current complete
        allocation admits MPB + pEF1 prices, else None."""
        n = self.n
        cons = []
        for k in range(n):
            if self.counts[k] == 0:
                continue
            for i in range(n):
                if i != k:
                    cons.append(RatioConstraint(k, i, self.cmin[i][k]))
        for i in range(n):
            a_i = self.sums[i] - self.maxv[i]
            if a_i <= 0:
                continue
            for h in range(n):
                if h == i:
                    continue
                if self.sums[h] == 0:
                    return None
                cons.append(RatioConstraint(i, h, Fraction(self.sums[h], a_i)))
        res = solve_ratio_system(RatioConstraintSystem(n, tuple(cons)))
        if isinstance(res, InfeasibilityCycle):
            return None
        prices = [None] * self.m
        for j, owner in enumerate(self.owners):
            prices[j] = self.rows[owner][j] * res[owner]
        return tuple(prices)

    def search(self):
        return next(self.iter_solutions(), None)

    def iter_solutions(self):
        """All feasible solutions in owner-vector lexicographic order."""
        for owners, prices in self._dfs(0):
            x = Allocation(self.n, owners)
            earnings = {}
            for j, o in enumerate(owners):
                earnings[o] = earnings.get(o, Fraction(0)) + prices[j]
            rho = min(earnings.values()) if earnings else Fraction(0)
            yield Pef1Solution(x, prices, rho)

    def _dfs(self, j: int):
        n, m = self.n, self.m
        if j == m:
            prices = self.leaf_check()
            if prices is not None:
                yield tuple(self.owners), prices
            return
        if m >= n:
            empties = sum(1 for c in self.counts if c == 0)
            if m - j < empties:
                return
        for a in range(n):
            saved = [self.cmin[i][a] for i in range(n)]
            ok = True
            for i in range(n):
                if i == a:
                    continue
                r = self.ratio[i][a][j]
                if saved[i] is None or r < saved[i]:
                    self.cmin[i][a] = r
                back = self.cmin[a][i]
                if back is not None and self.cmin[i][a] * back < 1:
                    ok = False
            if ok:
                self.owners[j] = a
                w = self.rows[a][j]
                self.sums[a] += w
                om = self.maxv[a]
                if w > om:
                    self.maxv[a] = w
                self.counts[a] += 1
                yield from self._dfs(j + 1)
                self.counts[a] -= 1
                self.maxv[a] = om
                self.sums[a] -= w
                self.owners[j] = None
            for i in range(n):
                self.cmin[i][a] = saved[i]


def search_pef1_mpb(inst: Instance, budget: int = DEFAULT_BUDGET) -> Optional[Pef1Solution]:
    """First complete allocation, in owner-vector lexicographic order, that
    admits prices making it an MPB allocation that is pEF1."""
    return _Pef1Search(inst, budget).search()


class _BivaluedSearch(_Pef1Search):
    """pEF1+MPB search with prices restricted to {1, k} on a {1,k}-valued
    instance. Generic MPB pruning stays sound: a {1,k}-priced solution is
    in particular an unrestricted one."""

    def __init__(self, inst: Instance, k: Fraction, budget: int):
        super().__init__(inst, budget)
        self.k = k

    def leaf_check(self):
        inst, n, m, k = self.inst, self.n, self.m, self.k
        one = Fraction(1)
        options = []  # per agent: list of candidate in-bundle price maps
        bundles = [[] for _ in range(n)]
        for j, o in enumerate(self.owners):
            bundles[o].append(j)
        for a in range(n):
            if not bundles[a]:
                options.append([{}])
                continue
            vals = {inst.d[a][j] for j in bundles[a]}
            if k == 1:
                options.append([{j: one for j in bundles[a]}])
            elif len(vals) == 2:
                options.append([{j: inst.d[a][j] for j in bundles[a]}])
            else:
                options.append(
                    [
                        {j: one for j in bundles[a]},
                        {j: k for j in bundles[a]},
                    ]
                )
        for combo in itertools.product(*options):
            prices = [None] * m
            for part in combo:
                for j, v in part.items():
                    prices[j] = v
            if not self._mpb_and_pef1(bundles, prices):
                continue
            return tuple(prices)
        return None

    def _mpb_and_pef1(self, bundles, prices) -> bool:
        inst, n = self.inst, self.n
        for a in range(n):
            row = inst.d[a]
            alpha = min(row[j] / prices[j] for j in range(inst.m))
            for j in bundles[a]:
                if row[j] / prices[j] != alpha:
                    return False
        earn = [sum((prices[j] for j in b), Fraction(0)) for b in bundles]
        top = [max((prices[j] for j in b), default=Fraction(0)) for b in bundles]
        for i in range(n):
            a_i = earn[i] - top[i]
            if a_i == 0:
                continue
            for h in range(n):
                if h != i and a_i > earn[h]:
                    return False
        return True


def certificate_from_pef1(
    inst: Instance, sol: Pef1Solution
) -> Tuple[Instance, FriendlyCertificate]:
    """Rescale disutilities to prices and split agents by whether their
    highest-priced chore exceeds the least earner's income. Yields a valid
    strict certificate with lambda = 2."""
    if not is_mpb_allocation(inst, sol.x, sol.p):
        raise InvariantViolation("solution is not an MPB allocation")
    if not is_pefk(inst, sol.x, sol.p, Fraction(1), 1):
        raise InvariantViolation("solution is not pEF1")
    view = mpb_view(inst, sol.p)
    scaled = inst.scale_rows([1 / a for a in view.alpha])
    bundles = sol.x.bundles()
    earnings = [sum((sol.p[j] for j in b), Fraction(0)) for b in bundles]
    rho = min(earnings)
    n0, nh = set(), set()
    for i, b in enumerate(bundles):
        j_i = min(b, key=lambda j: (-sol.p[j], j))
        if sol.p[j_i] <= rho:
            n0.add(i)
        else:
            nh.add(i)
    cert = FriendlyCertificate(Fraction(2), frozenset(n0), frozenset(nh), weak=False)
    return scaled, cert


def solve_2efx(inst: Instance, budget: int = DEFAULT_BUDGET) -> Optional[SolveResult]:
    """pEF1+MPB search, certificate construction, swap framework. The
    output is always verified 2-EFX; None only when the search finds no
    pEF1+MPB allocation (which would itself be a reportable finding)."""
    sol = search_pef1_mpb(inst, budget)
    if sol is None:
        return None
    if any(not b for b in sol.x.bundles()):
        # Only reachable when m < n: the pEF1 prices force singleton
        # bundles, which are exactly EFX already.
        trace = _trivial_trace(inst, sol.x, Fraction(2), "strict")
        return SolveResult(sol.x, trace, "pef1", prices=sol.p, notes=["m<n singleton"])
    scaled, cert = certificate_from_pef1(inst, sol)
    x, trace = run_framework(scaled, sol.x, cert)
    return SolveResult(x, trace, "pef1", cert=cert, prices=sol.p)


def _bivalued_candidate(
    norm: Instance, k: Fraction, lam: Fraction, sol: Pef1Solution, notes
) -> Optional[SolveResult]:
    """Run one pEF1+MPB candidate through the bivalued pipeline. Returns
    None when the run loses the MPB condition beyond repair (the caller
    then tries the next candidate)."""
    if is_alpha_efx(norm, sol.x, lam):
        trace = _trivial_trace(norm, sol.x, lam, "weak")
        return SolveResult(
            sol.x, trace, "bivalued", prices=sol.p, notes=notes + ["early-exit"]
        )
    view = mpb_view(norm, sol.p)
    scaled = norm.scale_rows([1 / a for a in view.alpha])
    bundles = sol.x.bundles()
    earnings = [sum((sol.p[j] for j in b), Fraction(0)) for b in bundles]
    rho = min(earnings)
    if not rho < k:
        raise RhoNotLessThanK(
            f"least earning {rho} >= k = {k} contradicts the bivalued derivation"
        )
    n0, nh = set(), set()
    for i, b in enumerate(bundles):
        j_i = min(b, key=lambda j: (-sol.p[j], j))
        (n0 if sol.p[j_i] < k else nh).add(i)
    cert = FriendlyCertificate(lam, frozenset(n0), frozenset(nh), weak=True)
    x, trace = run_framework(scaled, sol.x, cert)
    prices = sol.p
    steps = [trace.phase1] if trace.phase1 is not None else []
    steps.extend(trace.snapshots)
    if not all(is_mpb_allocation(norm, step, prices) for step in steps):
        # A Phase-1 pick or a swap can hand an agent a chore outside her
        # MPB set when the round-robin tie-break is unlucky; the output
        # is still PO if the final allocation admits fresh MPB prices.
        fresh = mpb_price_feasibility(norm, x)
        if isinstance(fresh, InfeasibilityCycle):
            return None
        prices = fresh
        notes = notes + ["repriced: reallocation broke the maintained MPB prices"]
    return SolveResult(x, trace, "bivalued", cert=cert, prices=prices, notes=notes)


def solve_bivalued(
    inst: Instance, budget: int = DEFAULT_BUDGET, candidate_cap: int = 5000
) -> SolveResult:
    """(2 - 1/k)-EFX + PO for {1,k}-valued instances, carrying an MPB price
    certificate for the final allocation.

    pEF1+MPB starting points are tried in lexicographic order until one
    survives the swap framework with Pareto optimality intact; any valid
    starting point gives the EFX factor, but the round-robin tie-breaks
    can lose the MPB property for some of them.
    """
    k = inst.bivalued_k()
    if k is None:
        raise NotBivalued("instance has more than two distinct disutility values")
    lo = min(v for row in inst.d for v in row) if inst.m else Fraction(1)
    norm = Instance(tuple(tuple(v / lo for v in row) for row in inst.d))
    lam = 2 - 1 / k
    notes: List[str] = []
    any_candidate = False
    tried = 0
    for sol in _BivaluedSearch(norm, k, budget).iter_solutions():
        any_candidate = True
        tried += 1
        if tried > candidate_cap:
            break
        res = _bivalued_candidate(norm, k, lam, sol, notes)
        if res is not None:
            return res
        notes = [f"skipped {tried} starting points that lost the MPB condition"]
    if not any_candidate:
        notes.append("no {1,k}-priced pEF1+MPB solution; unrestricted fallback")
        for sol in _Pef1Search(norm, budget).iter_solutions():
            any_candidate = True
            tried += 1
            if tried > candidate_cap:
                break
            res = _bivalued_candidate(norm, k, lam, sol, notes)
            if res is not None:
                return res
    raise PostconditionViolated(
        "no pEF1+MPB starting point yields a PO outcome within budget "
        f"(tried {tried}; existence finding)"
        if any_candidate
        else "no pEF1+MPB allocation found within budget (existence finding)"
    )


def _round_robin_two_phase(inst: Instance) -> Allocation:
    """Phase A: agents r..1 pick their cheapest chore; Phase B: agents 1..n
    pick again. Ties to the lowest chore index."""
    n, m = inst.n, inst.m
    r = m - n
    pool = set(range(m))
    bundles = [set() for _ in range(n)]

    def pick(i):
        j = min(pool, key=lambda c: (inst.d[i][c], c))
        pool.remove(j)
        bundles[i].add(j)

    for i in range(r - 1, -1, -1):
        pick(i)
    for i in range(n):
        pick(i)
    return allocation_from_bundles(n, m, bundles)


def solve_small_m(inst: Instance) -> SolveResult:
    """Exact EFX for m <= 2n chores."""
    n, m = inst.n, inst.m
    if m > 2 * n:
        raise TooManyChores(f"m = {m} exceeds 2n = {2 * n}")
    if m <= n:
        # Any assignment of at most one chore each is EFX; let agents pick
        # their cheapest remaining chore in index order.
        pool = set(range(m))
        bundles = [set() for _ in range(n)]
        for i in range(n):
            if not pool:
                break
            j = min(pool, key=lambda c: (inst.d[i][c], c))
            pool.remove(j)
            bundles[i].add(j)
        x = allocation_from_bundles(n, m, bundles)
        return SolveResult(x, _trivial_trace(inst, x, Fraction(1), "weak"), "small-m")
    y = _round_robin_two_phase(inst)
    cert = FriendlyCertificate(
        Fraction(1), frozenset(), frozenset(range(n)), weak=True
    )
    x, trace = run_framework(inst, y, cert)
    return SolveResult(x, trace, "small-m", cert=cert)


HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ErRoundedInput:
    """Validated integral rounding of an earning-restricted equilibrium
    with earning requirements 1 and a uniform half-unit earning cap."""

    x: Allocation
    p: tuple
    h_set: frozenset  # chores priced above 1/2


def validate_rounded_er(
    inst: Instance, X: Allocation, p: Sequence[Fraction]
) -> Tuple[Optional[ErRoundedInput], List[str]]:
    """Check the five rounding properties plus the MPB and price-scaling
    conventions. Violations are data, not errors."""
    violations: List[str] = []
    if not X.complete:
        violations.append("allocation incomplete")
        return None, violations
    if len(p) != inst.m:
        violations.append("price vector length mismatch")
        return None, violations
    h_set = frozenset(j for j in range(inst.m) if p[j] > HALF)
    bundles = X.bundles()
    for i, b in enumerate(bundles):
        high = [j for j in b if j in h_set]
        low_earn = sum((p[j] for j in b if j not in h_set), Fraction(0))
        total = low_earn + sum((p[j] for j in high), Fraction(0))
        if len(high) > 2:
            violations.append(f"(i) agent {i + 1} holds {len(high)} high chores")
        if len(high) == 2 and low_earn > HALF:
            violations.append(f"(ii) agent {i + 1}: low earning {low_earn} > 1/2")
        if len(high) == 1 and low_earn > 1:
            violations.append(f"(iii) agent {i + 1}: low earning {low_earn} > 1")
        if len(high) == 0 and low_earn > Fraction(3, 2):
            violations.append(f"(iv) agent {i + 1}: low earning {low_earn} > 3/2")
        if total < HALF:
            violations.append(f"(v) agent {i + 1}: earning {total} < 1/2")
        for j in b:
            if inst.d[i][j] != p[j]:
                violations.append(
                    f"scaling: d[{i + 1}][{j + 1}] = {inst.d[i][j]} != p_{j + 1} = {p[j]}"
                )
    if not is_mpb_allocation(inst, X, p):
        violations.append("not an MPB allocation")
    if violations:
        return None, violations
    return ErRoundedInput(X, tuple(p), h_set), violations


def solve_4efx(inst: Instance, rounded: ErRoundedInput) -> SolveResult:
    """4-EFX from a validated rounded earning-restricted equilibrium.

    Re-allocates the high-priced chores with the small-m construction,
    couples the resulting bundles to agents so every multi-chore receiver
    keeps low earnings at most 1, and runs the framework at lambda = 4.
    """
    n, m = inst.n, inst.m
    if m <= 2 * n:
        raise RoundedInputInvalid(
            [f"m = {m} <= 2n = {2 * n}: the small-m pipeline applies instead"]
        )
    h = sorted(rounded.h_set)
    if len(h) > 2 * n:
        raise RoundedInputInvalid(
            [f"|H| = {len(h)} > 2n = {2 * n} violates the earning restriction"]
        )
    notes = []
    sub = Instance(tuple(tuple(row[j] for j in h) for row in inst.d))
    z_res = solve_small_m(sub)
    z_bundles = [frozenset(h[j] for j in b) for b in z_res.x.bundles()]

    x_bundles = rounded.x.bundles()
    low_earn = [
        sum(
            (rounded.p[j] for j in b if j not in rounded.h_set),
            Fraction(0),
        )
        for b in x_bundles
    ]

    has_low = [
        any(j not in rounded.h_set for j in b) for b in x_bundles
    ]

    def coupling_ok(zb):
        return (
            all(low_earn[i] <= 1 for i in range(n) if len(zb[i]) >= 2)
            and all(zb[i] or has_low[i] for i in range(n))
            and (
                not any(len(b) == 0 for b in zb)
                or not any(len(b) >= 2 for b in zb)
            )
        )

    if not coupling_ok(z_bundles):
        found = None
        for perm in itertools.permutations(range(n)):
            cand = [z_bundles[perm[i]] for i in range(n)]
            if not coupling_ok(cand):
                continue
            cand_alloc = allocation_from_bundles(
                n, len(h), [[h.index(j) for j in b] for b in cand]
            )
            if efx_factor(sub, cand_alloc) <= 1:
                found = cand
                notes.append("re-coupled high-chore bundles")
                break
        if found is None:
            raise CouplingUnsatisfiable(
                "no assignment of high-chore bundles keeps every multi-chore "
                "receiver's low earnings at most 1"
            )
        z_bundles = found

    y_bundles = [
        (set(b) - rounded.h_set) | z_bundles[i]
        for i, b in enumerate(x_bundles)
    ]
    y = allocation_from_bundles(n, m, y_bundles)
    nh = frozenset(i for i in range(n) if len(z_bundles[i]) == 1)
    cert = FriendlyCertificate(
        Fraction(4), frozenset(range(n)) - nh, nh, weak=False
    )
    x, trace = run_framework(inst, y, cert)
    return SolveResult(x, trace, "er4", cert=cert, prices=rounded.p, notes=notes)
