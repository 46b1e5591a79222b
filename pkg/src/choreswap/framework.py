"""Chore-swap framework: friendly certificates, swaps, and the two-phase
algorithm that turns a friendly allocation into a lambda-EFX one.

All tie-breaks (designated chores, round-robin picks, most-envied agent)
go to the lowest index so runs are reproducible. Invariant monitoring is
always on; a failed invariant or final factor above lambda raises
PostconditionViolated carrying the full trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import (
    CertificateInvalid,
    ChoreNotHeld,
    EmptyBundle,
    PostconditionViolated,
    SelfSwap,
)
from .fairness import hat_d
from .model import Allocation, Instance, allocation_from_bundles, bundle_disutility


@dataclass(frozen=True)
class FriendlyCertificate:
    """Partition N0/NH plus lambda; weak selects the hat-d variant."""

    lam: Fraction
    n0: frozenset
    nh: frozenset
    weak: bool = False

    @property
    def mode(self) -> str:
        return "weak" if self.weak else "strict"


def designated_chore(inst: Instance, i: int, bundle) -> int:
    """argmax_{j in bundle} d_ij, ties to the lowest chore index."""
    best = None
    for j in sorted(bundle):
        if best is None or inst.d[i][j] > inst.d[i][best]:
            best = j
    return best


@dataclass(frozen=True)
class Violation:
    condition: str  # "partition", "empty-bundle", "i".."iv", "bundle-min"
    agent: int
    other: Optional[int]
    lhs: object = None
    rhs: object = None

    def __str__(self):
        pair = f"i={self.agent + 1}"
        if self.other is not None:
            pair += f", k={self.other + 1}"
        return f"condition ({self.condition}) fails for {pair}: {self.lhs} <= {self.rhs} is false"


def validate_certificate(
    inst: Instance,
    X: Allocation,
    cert: FriendlyCertificate,
    global_minimum: bool = False,
) -> List[Violation]:
    """Check every certificate inequality exactly; empty list means Valid.

    Strict mode checks the four friendly conditions with d_i on the left;
    weak mode uses hat-d on the left and additionally requires, for each
    agent in NH with a non-singleton bundle, that her cheapest bundle
    chore lies in the residual S_i (with global_minimum, that it is also
    a globally cheapest chore).
    """
    violations: List[Violation] = []
    agents = frozenset(range(inst.n))
    if cert.n0 | cert.nh != agents or cert.n0 & cert.nh:
        raise CertificateInvalid(
            [Violation("partition", -1, None, sorted(cert.n0), sorted(cert.nh))]
        )
    bundles = X.bundles()
    for i, b in enumerate(bundles):
        if not b:
            raise EmptyBundle(i)
    desig = [designated_chore(inst, i, bundles[i]) for i in range(inst.n)]
    residual = [
        [j for j in bundles[i] if j != desig[i]] for i in range(inst.n)
    ]

    def lhs_bundle(i):
        if cert.weak:
            return hat_d(inst, i, bundles[i])
        return bundle_disutility(inst, i, bundles[i])

    def lhs_residual(i):
        if cert.weak:
            return hat_d(inst, i, residual[i])
        return bundle_disutility(inst, i, residual[i])

    for i in sorted(cert.n0):
        lhs = lhs_bundle(i)
        for k in sorted(cert.n0):
            rhs = cert.lam * bundle_disutility(inst, i, bundles[k])
            if lhs > rhs:
                violations.append(Violation("i", i, k, lhs, rhs))
        for h in sorted(cert.nh):
            rhs = cert.lam * inst.d[i][desig[h]]
            if lhs > rhs:
                violations.append(Violation("ii", i, h, lhs, rhs))
    for i in sorted(cert.nh):
        lhs = lhs_residual(i)
        for k in sorted(cert.n0):
            rhs = (cert.lam - 1) * bundle_disutility(inst, i, bundles[k])
            if lhs > rhs:
                violations.append(Violation("iii", i, k, lhs, rhs))
        for h in sorted(cert.nh):
            rhs = (cert.lam - 1) * inst.d[i][desig[h]]
            if lhs > rhs:
                violations.append(Violation("iv", i, h, lhs, rhs))
        if cert.weak and residual[i]:
            bundle_min = min(inst.d[i][j] for j in bundles[i])
            res_min = min(inst.d[i][j] for j in residual[i])
            if res_min > bundle_min:
                violations.append(Violation("bundle-min", i, None, res_min, bundle_min))
            elif global_minimum:
                glob = min(inst.d[i])
                if res_min > glob:
                    violations.append(
                        Violation("bundle-min", i, None, res_min, glob)
                    )
    return violations


def chore_swap(X: Allocation, i: int, l: int, j_i: int) -> Allocation:
    """(i, l) swap: i takes l's whole bundle and hands over chore j_i."""
    if i == l:
        raise SelfSwap(f"agent {i + 1} cannot swap with itself")
    if X.owners[j_i] != i:
        raise ChoreNotHeld(f"chore {j_i + 1} is not held by agent {i + 1}")
    owners = list(X.owners)
    for j, o in enumerate(owners):
        if o == l:
            owners[j] = i
    owners[j_i] = l
    return Allocation(X.n, tuple(owners))


@dataclass
class SwapTrace:
    """Ordered record of Phase-1 picks and Phase-2 swaps with per-iteration
    invariant results. All indices 0-based in memory, 1-based on the wire."""

    lam: Fraction = Fraction(1)
    mode: str = "strict"
    picks: List[Tuple[int, int]] = field(default_factory=list)
    swaps: List[Tuple[int, int, int]] = field(default_factory=list)
    invariants: List[Tuple[int, str, bool]] = field(default_factory=list)
    phase1: Optional[Allocation] = None
    snapshots: List[Allocation] = field(default_factory=list)
    final_factor: object = None
    flags: List[str] = field(default_factory=list)

    @property
    def swap_count(self) -> int:
        return len(self.swaps)

    def to_log(self) -> str:
        lines = []
        for agent, chore in self.picks:
            lines.append(f"PICK {agent + 1} {chore + 1}")
        for agent, l, j in self.swaps:
            lines.append(f"SWAP {agent + 1} {l + 1} {j + 1}")
        for agent, name, ok in self.invariants:
            lines.append(f"INV {agent + 1} {name} {'PASS' if ok else 'FAIL'}")
        lines.append(f"FACTOR {self.final_factor}")
        return "\n".join(lines) + "\n"


def _is_lam_efx_agent(inst, bundles, i, lam) -> bool:
    num = hat_d(inst, i, bundles[i])
    if num == 0:
        return True
    for h in range(inst.n):
        if h != i and num > lam * bundle_disutility(inst, i, bundles[h]):
            return False
    return True


def run_framework(
    inst: Instance, Y: Allocation, cert: FriendlyCertificate
) -> Tuple[Allocation, SwapTrace]:
    """Algorithm: re-allocate the designated high chores round-robin, then
    perform at most one chore swap per NH agent, in pick order.

    Requires a valid certificate. The returned allocation always satisfies
    efx_factor <= lambda; that postcondition and the three per-iteration
    invariants are re-verified and escalate on failure.
    """
    from .fairness import efx_factor  # local to avoid cycles at import time

    violations = validate_certificate(inst, Y, cert)
    if violations:
        raise CertificateInvalid(violations)
    lam = cert.lam
    trace = SwapTrace(lam=lam, mode=cert.mode)
    bundles = [set(b) for b in Y.bundles()]
    order = sorted(cert.nh)  # NH re-indexed as [r] in ascending agent order
    desig = {i: designated_chore(inst, i, bundles[i]) for i in order}

    # Phase 1: pull out the designated chores and re-allocate round-robin.
    pool = set(desig.values())
    for i in order:
        bundles[i].discard(desig[i])
    picked = {}
    for i in order:
        j = min(pool, key=lambda c: (inst.d[i][c], c))
        pool.remove(j)
        bundles[i].add(j)
        picked[i] = j
        trace.picks.append((i, j))
    trace.phase1 = allocation_from_bundles(inst.n, inst.m, bundles)

    # Pick-order dominance: each agent weakly prefers her own pick to
    # every later agent's pick.
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            i, h = order[a], order[b]
            if inst.d[i][picked[i]] > inst.d[i][picked[h]]:
                trace.flags.append(f"pick-dominance i={i + 1} h={h + 1}")

    # Phase 2: chore swaps in pick order.
    swapped = set()
    for pos, i in enumerate(order):
        # Invariant (i): agents at or after this position have not swapped.
        inv1 = all(h not in swapped for h in order[pos:])
        trace.invariants.append((i, "i", inv1))
        if not _is_lam_efx_agent(inst, bundles, i, lam):
            l = min(
                (h for h in range(inst.n) if h != i),
                key=lambda h: (bundle_disutility(inst, i, bundles[h]), h),
            )
            j_i = picked[i]
            bundles[i] |= bundles[l]
            bundles[i].discard(j_i)
            bundles[l] = {j_i}
            swapped.add(i)
            swapped.add(l)
            trace.swaps.append((i, l, j_i))
            if l not in cert.n0 and l not in order[:pos]:
                trace.flags.append(f"swap-target l={l + 1} outside N0+[i-1]")
            # Invariant (ii): i is lambda-EFX and bounded by her designated
            # chore right after the swap (hat-d bound in weak mode).
            if cert.weak:
                bound_lhs = hat_d(inst, i, bundles[i])
            else:
                bound_lhs = bundle_disutility(inst, i, bundles[i])
            inv2 = _is_lam_efx_agent(inst, bundles, i, lam) and bound_lhs <= lam * inst.d[i][j_i]
            trace.invariants.append((i, "ii", inv2))
        # Invariant (iii): N0 and the first pos+1 NH agents are lambda-EFX.
        done = set(cert.n0) | set(order[: pos + 1])
        inv3 = all(_is_lam_efx_agent(inst, bundles, h, lam) for h in sorted(done))
        trace.invariants.append((i, "iii", inv3))
        trace.snapshots.append(
            allocation_from_bundles(inst.n, inst.m, bundles)
        )

    X = allocation_from_bundles(inst.n, inst.m, bundles)
    factor = efx_factor(inst, X)
    trace.final_factor = factor
    failed = [rec for rec in trace.invariants if not rec[2]]
    if failed or trace.flags or not factor <= lam:
        raise PostconditionViolated(
            f"framework postcondition failed: factor={factor}, lambda={lam}, "
            f"failed invariants={failed}, flags={trace.flags}",
            trace,
        )
    return X, trace
