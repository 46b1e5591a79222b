import random
from dataclasses import replace
from fractions import Fraction

import pytest

from choreswap import (
    EnumerationCursor,
    best_efx_factor,
    enumerate_allocations,
    generate_random,
    generate_valid_certificate,
    pef1_mpb_exists,
    run_framework,
    solve_2efx,
    validate_certificate,
    verify_trace,
)
from choreswap.errors import BudgetExceeded, GenerationBudgetExceeded, TraceMismatch
from choreswap.model import UniformInt
from choreswap.oracle import CertificateBounds, oracle_csv_row

from conftest import inst_i1, make_instance


def test_enumeration_completeness():
    seen = list(EnumerationCursor(3, 4))
    assert len(seen) == 3**4
    assert len(set(seen)) == 3**4
    assert seen == sorted(seen)
    assert seen[0] == (0, 0, 0, 0) and seen[-1] == (2, 2, 2, 2)


def test_enumerate_allocations_yields_allocations():
    allocs = list(enumerate_allocations(2, 2))
    assert [a.owners for a in allocs] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_best_efx_factor_examples():
    assert best_efx_factor(make_instance([[4], [9]])) == 0
    ones = make_instance([[1, 1, 1], [1, 1, 1]])
    assert best_efx_factor(ones) == 1
    assert best_efx_factor(inst_i1()) == Fraction(1, 10)


def test_best_efx_factor_budget():
    with pytest.raises(BudgetExceeded):
        best_efx_factor(inst_i1(), budget=4)


def test_pef1_mpb_exists_examples():
    assert pef1_mpb_exists(make_instance([[5, 6]]))
    assert pef1_mpb_exists(inst_i1())


def test_generate_valid_certificate_contract():
    nh_empty_seen = False
    weak_seen = strict_seen = False
    for seed in range(120):
        inst, alloc, cert = generate_valid_certificate(seed)
        assert validate_certificate(inst, alloc, cert) == []
        assert validate_certificate(inst, alloc, cert, global_minimum=True) == []
        nh_empty_seen = nh_empty_seen or not cert.nh
        weak_seen = weak_seen or cert.weak
        strict_seen = strict_seen or not cert.weak
    assert nh_empty_seen and weak_seen and strict_seen


def test_generate_valid_certificate_bounds():
    with pytest.raises(GenerationBudgetExceeded):
        generate_valid_certificate(0, CertificateBounds(n_max=0))
    inst, _, cert = generate_valid_certificate(
        3, CertificateBounds(n_max=3, lams=(Fraction(2),))
    )
    assert inst.n <= 3 and cert.lam == 2


def test_verify_trace_round_trip():
    for seed in range(40):
        inst, y, cert = generate_valid_certificate(seed)
        x, trace = run_framework(inst, y, cert)
        assert verify_trace(inst, y, cert, trace)


def test_verify_trace_rejects_forged_swap():
    for seed in range(50):
        inst, y, cert = generate_valid_certificate(seed)
        if cert.nh and inst.n > 1:
            break
    x, trace = run_framework(inst, y, cert)
    forged = replace(trace)
    i = sorted(cert.nh)[0]
    other = next(h for h in range(inst.n) if h != i)
    forged.swaps = list(trace.swaps) + [(i, other, y.bundles()[i][0])]
    with pytest.raises(TraceMismatch):
        verify_trace(inst, y, cert, forged)


def test_verify_trace_rejects_forged_factor():
    inst, y, cert = generate_valid_certificate(1)
    x, trace = run_framework(inst, y, cert)
    forged = replace(trace)
    forged.final_factor = (trace.final_factor or Fraction(1)) + 1
    with pytest.raises(TraceMismatch):
        verify_trace(inst, y, cert, forged)


def test_verify_trace_empty_nh():
    inst = make_instance([[1, 2], [2, 1]])
    y = enumerate_allocations(2, 2)
    from choreswap import Allocation, FriendlyCertificate

    alloc = Allocation(2, (0, 1))
    cert = FriendlyCertificate(Fraction(2), frozenset({0, 1}), frozenset(), False)
    x, trace = run_framework(inst, alloc, cert)
    assert verify_trace(inst, alloc, cert, trace)


def test_oracle_solver_agreement_sample():
    rng = random.Random(71)
    for trial in range(25):
        n = rng.choice([2, 3])
        m = rng.randint(n, 6)
        inst = generate_random(900 + trial, n, m, UniformInt(1, 20))
        best = best_efx_factor(inst)
        res = solve_2efx(inst)
        assert res is not None
        assert best <= 2
        assert best <= res.trace.final_factor


def test_oracle_csv_row():
    assert oracle_csv_row("i1.txt", "best_efx_factor", Fraction(1, 10)) == (
        "i1.txt,best_efx_factor,1/10"
    )
