import random
from fractions import Fraction

import pytest

from choreswap import (
    Allocation,
    InfeasibilityCycle,
    RatioConstraint,
    RatioConstraintSystem,
    generate_random,
    is_mpb_allocation,
    is_po_bruteforce,
    mpb_price_feasibility,
    mpb_view,
    solve_ratio_system,
)
from choreswap.errors import EmptyBundle, PriceLengthMismatch
from choreswap.model import UniformInt

from conftest import inst_i1, make_instance


def test_mpb_view_examples():
    inst = make_instance([[1, 2], [2, 1]])
    view = mpb_view(inst, (Fraction(1), Fraction(1)))
    assert view.alpha == (Fraction(1), Fraction(1))
    assert view.mpb_sets == (frozenset({0}), frozenset({1}))

    solo = make_instance([[3, 5, 7]])
    view = mpb_view(solo, (Fraction(3), Fraction(5), Fraction(7)))
    assert view.alpha == (Fraction(1),)
    assert view.mpb_sets == (frozenset({0, 1, 2}),)

    view = mpb_view(inst_i1(), (Fraction(1), Fraction(1), Fraction(10)))
    assert view.alpha == (Fraction(1), Fraction(1))
    assert view.mpb_sets == (frozenset({0, 1, 2}), frozenset({0, 1, 2}))


def test_mpb_view_length_check():
    with pytest.raises(PriceLengthMismatch):
        mpb_view(inst_i1(), (Fraction(1),))


def test_is_mpb_allocation_examples():
    inst = make_instance([[1, 2], [2, 1]])
    p = (Fraction(1), Fraction(1))
    assert is_mpb_allocation(inst, Allocation(2, (0, 1)), p)
    assert not is_mpb_allocation(inst, Allocation(2, (1, 0)), p)
    solo = make_instance([[3, 5]])
    assert is_mpb_allocation(solo, Allocation(1, (0, 0)), (Fraction(3), Fraction(5)))
    # partial allocations only constrain assigned chores
    assert is_mpb_allocation(inst, Allocation(2, (0, None)), p)


def test_mpb_price_feasibility_examples():
    inst = make_instance([[1, 2], [2, 1]])
    p = mpb_price_feasibility(inst, Allocation(2, (0, 1)))
    assert not isinstance(p, InfeasibilityCycle)
    assert is_mpb_allocation(inst, Allocation(2, (0, 1)), p)

    bad = mpb_price_feasibility(inst, Allocation(2, (1, 0)))
    assert isinstance(bad, InfeasibilityCycle)
    assert bad.product == Fraction(1, 4)

    solo = make_instance([[3, 5]])
    p = mpb_price_feasibility(solo, Allocation(1, (0, 0)))
    assert p[0] / p[1] == Fraction(3, 5)


def test_mpb_price_feasibility_empty_bundle():
    with pytest.raises(EmptyBundle):
        mpb_price_feasibility(inst_i1(), Allocation(2, (0, 0, 0)))


def test_solve_ratio_system_examples():
    half = Fraction(1, 2)
    sys_ok = RatioConstraintSystem(
        2, (RatioConstraint(0, 1, Fraction(2)), RatioConstraint(1, 0, Fraction(2)))
    )
    labels = solve_ratio_system(sys_ok)
    assert labels[0] <= 2 * labels[1] and labels[1] <= 2 * labels[0]

    sys_bad = RatioConstraintSystem(
        2, (RatioConstraint(0, 1, half), RatioConstraint(1, 0, half))
    )
    cyc = solve_ratio_system(sys_bad)
    assert isinstance(cyc, InfeasibilityCycle)
    assert cyc.product == Fraction(1, 4)

    empty = RatioConstraintSystem(3, ())
    assert solve_ratio_system(empty) == [Fraction(1)] * 3


def test_round_trip_certification_fuzz():
    rng = random.Random(61)
    feasible = infeasible = 0
    for trial in range(120):
        n = rng.randint(2, 3)
        m = rng.randint(n, 6)
        inst = generate_random(600 + trial, n, m, UniformInt(1, 12))
        owners = list(range(n)) + [rng.randrange(n) for _ in range(m - n)]
        rng.shuffle(owners)
        x = Allocation(n, tuple(owners))
        res = mpb_price_feasibility(inst, x)
        if isinstance(res, InfeasibilityCycle):
            infeasible += 1
            assert res.product < 1
        else:
            feasible += 1
            assert all(v > 0 for v in res)
            assert is_mpb_allocation(inst, x, res)
            # fPO implies PO
            assert is_po_bruteforce(inst, x).is_po
            # price scale freedom
            assert is_mpb_allocation(inst, x, tuple(3 * v for v in res))
    assert feasible and infeasible


def test_deterministic_prices():
    inst = inst_i1()
    x = Allocation(2, (0, 0, 1))
    assert mpb_price_feasibility(inst, x) == mpb_price_feasibility(inst, x)
