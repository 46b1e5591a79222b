"""Exact data model: instances, allocations, prices, random generation.

All numeric quantities are `fractions.Fraction`; no floating point enters
any fairness computation. Instances, allocations and price vectors are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    AgentOutOfRange,
    BadRational,
    ChoreOutOfRange,
    InvalidDistribution,
    MalformedHeader,
    NonPositiveDisutility,
    ParseError,
    RowCountMismatch,
)


class _Infinite:
    """Sentinel for an unbounded envy ratio (positive numerator over an
    empty rival bundle). Compares greater than every Fraction."""

    __slots__ = ()

    def __le__(self, other):
        return isinstance(other, _Infinite)

    def __lt__(self, other):
        return False

    def __ge__(self, other):
        return True

    def __gt__(self, other):
        return not isinstance(other, _Infinite)

    def __repr__(self):
        return "Infinite"


INFINITE = _Infinite()

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def parse_rational(token: str, line: int = None, col: int = None) -> Fraction:
    """Parse "a" or "a/b" into an exact Fraction."""
    m = _RATIONAL_RE.match(token)
    if m is None:
        raise BadRational(f"not a rational: {token!r}", line, col)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise BadRational(f"zero denominator: {token!r}", line, col)
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class Instance:
    """A chore division instance: n agents, m chores, strictly positive
    disutility matrix d (n rows, m columns)."""

    d: tuple

    def __post_init__(self):
        if len(self.d) < 1:
            raise MalformedHeader("instance needs at least one agent")
        m = len(self.d[0])
        for i, row in enumerate(self.d):
            if len(row) != m:
                raise RowCountMismatch(f"row {i + 1} has {len(row)} entries, expected {m}")
            for j, v in enumerate(row):
                if v <= 0:
                    raise NonPositiveDisutility(
                        f"d[{i + 1}][{j + 1}] = {v} is not positive"
                    )

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def m(self) -> int:
        return len(self.d[0])

    def check_agent(self, i: int):
        if not 0 <= i < self.n:
            raise AgentOutOfRange(f"agent index {i} out of range [0, {self.n})")

    def check_chore(self, j: int):
        if not 0 <= j < self.m:
            raise ChoreOutOfRange(f"chore index {j} out of range [0, {self.m})")

    def scale_rows(self, factors: Sequence[Fraction]) -> "Instance":
        """Return a copy with row i multiplied by factors[i] (> 0 each)."""
        return Instance(
            tuple(
                tuple(v * f for v in row) for row, f in zip(self.d, factors)
            )
        )

    def integer_rows(self) -> list:
        """Per-row integer rescalings of d (row-scale invariant uses only)."""
        out = []
        for row in self.d:
            scale = math.lcm(*(v.denominator for v in row)) if row else 1
            out.append([int(v * scale) for v in row])
        return out

    def bivalued_k(self) -> Optional[Fraction]:
        """If all entries take at most two values {a, b}, return
        k = max(a,b)/min(a,b); otherwise None."""
        values = {v for row in self.d for v in row}
        if len(values) > 2:
            return None
        if not values or len(values) == 1:
            return Fraction(1)
        lo, hi = min(values), max(values)
        return hi / lo


def bundle_disutility(inst: Instance, i: int, chores: Iterable[int]) -> Fraction:
    """Exact additive disutility of agent i for a set of chores."""
    inst.check_agent(i)
    total = Fraction(0)
    row = inst.d[i]
    for j in chores:
        inst.check_chore(j)
        total += row[j]
    return total


def parse_instance(text: str) -> Instance:
    """Parse the plain-text instance format.

    Comment lines start with '#'. The first data line is "n m"; then n
    lines each with m positive rationals ("a" or "a/b").
    """
    lines = text.splitlines()
    data = [
        (idx + 1, ln.strip())
        for idx, ln in enumerate(lines)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not data:
        raise MalformedHeader("empty instance file")
    hline, header = data[0]
    parts = header.split()
    if len(parts) != 2:
        raise MalformedHeader(f"expected 'n m', got {header!r}", hline)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise MalformedHeader(f"expected integers in header, got {header!r}", hline)
    if n < 1 or m < 0:
        raise MalformedHeader(f"need n >= 1 and m >= 0, got n={n} m={m}", hline)
    rows_in = data[1:]
    if m == 0:
        if any(tok for _, tok in rows_in):
            raise RowCountMismatch("expected no matrix rows when m = 0")
        return Instance(tuple(() for _ in range(n)))
    if len(rows_in) != n:
        raise RowCountMismatch(f"expected {n} matrix rows, found {len(rows_in)}")
    rows = []
    for i, (lno, ln) in enumerate(rows_in):
        toks = ln.split()
        if len(toks) != m:
            raise RowCountMismatch(
                f"row {i + 1} has {len(toks)} entries, expected {m}", lno
            )
        row = []
        for col, tok in enumerate(toks):
            v = parse_rational(tok, lno, col + 1)
            if v <= 0:
                raise NonPositiveDisutility(
                    f"disutility must be positive, got {tok}", lno, col + 1
                )
            row.append(v)
        rows.append(tuple(row))
    return Instance(tuple(rows))


def serialize_instance(inst: Instance) -> str:
    out = [f"{inst.n} {inst.m}"]
    for row in inst.d:
        out.append(" ".join(format_rational(v) for v in row))
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Allocation:
    """Owner vector: owners[j] is the 0-based agent holding chore j, or
    None when unassigned. Complete allocations have no None entries."""

    n: int
    owners: tuple

    def __post_init__(self):
        for j, o in enumerate(self.owners):
            if o is not None and not 0 <= o < self.n:
                raise AgentOutOfRange(f"owner of chore {j + 1} out of range: {o}")

    @property
    def m(self) -> int:
        return len(self.owners)

    @property
    def complete(self) -> bool:
        return all(o is not None for o in self.owners)

    def bundles(self) -> list:
        """Per-agent bundles as sorted chore-index lists."""
        out = [[] for _ in range(self.n)]
        for j, o in enumerate(self.owners):
            if o is not None:
                out[o].append(j)
        return out

    def assign(self, chore: int, agent: int) -> "Allocation":
        owners = list(self.owners)
        owners[chore] = agent
        return Allocation(self.n, tuple(owners))


def allocation_from_bundles(n: int, m: int, bundles) -> Allocation:
    owners = [None] * m
    for i, bundle in enumerate(bundles):
        for j in bundle:
            owners[j] = i
    return Allocation(n, tuple(owners))


def parse_allocation(text: str, n: int, m: int) -> Allocation:
    """One line of m entries: agent index 1..n, or 0 for unassigned."""
    toks = []
    for lno, ln in enumerate(text.splitlines()):
        ln = ln.strip()
        if ln and not ln.startswith("#"):
            toks.extend(ln.split())
    if len(toks) != m:
        raise RowCountMismatch(f"expected {m} owner entries, found {len(toks)}")
    owners = []
    for col, tok in enumerate(toks):
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(f"not an agent index: {tok!r}", col=col + 1)
        if v == 0:
            owners.append(None)
        elif 1 <= v <= n:
            owners.append(v - 1)
        else:
            raise AgentOutOfRange(f"agent index {v} out of range 1..{n}")
    return Allocation(n, tuple(owners))


def serialize_allocation(alloc: Allocation) -> str:
    return " ".join("0" if o is None else str(o + 1) for o in alloc.owners) + "\n"


def parse_prices(text: str, m: int) -> tuple:
    """One line of m positive rationals."""
    toks = []
    for ln in text.splitlines():
        ln = ln.strip()
        if ln and not ln.startswith("#"):
            toks.extend(ln.split())
    if len(toks) != m:
        raise RowCountMismatch(f"expected {m} prices, found {len(toks)}")
    prices = []
    for col, tok in enumerate(toks):
        v = parse_rational(tok, col=col + 1)
        if v <= 0:
            raise ParseError(f"price must be positive, got {tok}", col=col + 1)
        prices.append(v)
    return tuple(prices)


def serialize_prices(p: Sequence[Fraction]) -> str:
    return " ".join(format_rational(v) for v in p) + "\n"


@dataclass(frozen=True)
class UniformInt:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 1 or self.hi < self.lo:
            raise InvalidDistribution(f"need 1 <= LO <= HI, got {self.lo}..{self.hi}")

    def __str__(self):
        return f"uniform-int:{self.lo}..{self.hi}"


@dataclass(frozen=True)
class Bivalued:
    k: Fraction

    def __post_init__(self):
        if self.k < 1:
            raise InvalidDistribution(f"need k >= 1, got {self.k}")

    def __str__(self):
        return f"bivalued:{self.k}"


Distribution = Union[UniformInt, Bivalued]

_DIST_RE = re.compile(r"^uniform-int:(\d+)\.\.(\d+)$|^bivalued:([0-9/]+)$")


def parse_distribution(spec: str) -> Distribution:
    m = _DIST_RE.match(spec)
    if m is None:
        raise InvalidDistribution(f"bad distribution spec: {spec!r}")
    if m.group(1) is not None:
        return UniformInt(int(m.group(1)), int(m.group(2)))
    return Bivalued(parse_rational(m.group(3)))


def generate_random(seed: int, n: int, m: int, dist: Distribution) -> Instance:
    """Deterministic random instance for a fixed (seed, n, m, dist)."""
    rng = random.Random(seed)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(m):
            if isinstance(dist, UniformInt):
                row.append(Fraction(rng.randint(dist.lo, dist.hi)))
            else:
                row.append(Fraction(1) if rng.randint(0, 1) == 0 else dist.k)
        rows.append(tuple(row))
    return Instance(tuple(rows))
