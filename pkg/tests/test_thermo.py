import math

import numpy as np
import pytest

from conftest import build, random_lengths, rel
from homocycle.errors import CalibrationError
from homocycle.expansion import rose_constants
from homocycle.reference import figure_one, rose, two_loop
from homocycle.thermo import (
    beta_derivatives,
    beta_expansion,
    beta_taylor_fd,
    pressure_derivatives,
    solve_beta,
    solve_entropy,
    thermo_profile,
)


def test_entropy_rose2(rose2):
    assert abs(solve_entropy(rose2.system) - math.log(4)) < 1e-12
    assert abs(rose2.system.pressure(solve_entropy(rose2.system))) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_entropy_rose_unit(k):
    assert abs(solve_entropy(build(rose([1] * k)).system) - math.log(2 * k)) < 1e-12


def test_entropy_two_loop(twoloop):
    assert abs(solve_entropy(twoloop.system) - math.log(1 + math.sqrt(5))) < 1e-10


def test_beta_rose_closed_form(rose2):
    for u1 in (0.1, 0.5, 1.0):
        beta = solve_beta(rose2.system, [u1, 0])
        assert abs(2 * math.exp(-beta) * (math.cosh(u1) + 1) - 1) < 1e-12


def test_beta_rose_general_lengths():
    rng = np.random.default_rng(2)
    L = random_lengths(rng, 3)
    b = build(rose(L))
    l = np.array([float(x) for x in L])
    for _ in range(10):
        u = rng.uniform(-1, 1, 3) / math.sqrt(3)
        beta = solve_beta(b.system, u)
        # the 1-D closed form, solved independently by bisection
        f = lambda s: 2 * np.sum(np.exp(-s * l) * np.cosh(u)) - 1
        lo, hi = 0.0, 10.0
        for _ in range(200):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if f(mid) > 0 else (lo, mid)
        assert abs(beta - lo) < 1e-10


def test_beta_even_and_minimal(fig1):
    h = solve_entropy(fig1.system)
    rng = np.random.default_rng(4)
    for _ in range(10):
        u = rng.normal(size=2)
        b1, b2 = solve_beta(fig1.system, u, h), solve_beta(fig1.system, -u, h)
        assert abs(b1 - b2) < 1e-10
        assert b1 > h


def test_pressure_derivative_examples():
    rng = np.random.default_rng(8)
    L = random_lengths(rng, 3)
    b = build(rose(L))
    h = solve_entropy(b.system)
    pd = pressure_derivatives(b.system, h)
    l = np.array([float(x) for x in L])
    assert np.abs(pd.P_u).max() < 1e-14
    assert rel(pd.P_uu, np.diag(2 * np.exp(-h * l))) < 1e-8
    assert np.abs(pd.P_uuu).max() < 1e-8
    assert abs(pd.P_s + 2 * np.sum(l * np.exp(-h * l))) < 1e-12
    assert pd.calibration_error <= 1e-7


def test_calibration_failure_reported(rose2):
    h = solve_entropy(rose2.system)
    with pytest.raises(CalibrationError) as exc:
        pressure_derivatives(rose2.system, h, s_step=3.0, u_step=3.0, scales=(1.0,))
    assert exc.value.achieved > 1e-7


@pytest.mark.parametrize("k", [2, 3])
def test_tensors_match_closed_forms(k):
    rng = np.random.default_rng(100 + k)
    for _ in range(3):
        L = random_lengths(rng, k)
        tp = thermo_profile(build(rose(L)).system)
        rc = rose_constants([float(x) for x in L], tp.h)
        assert rel(tp.hess, rc.hess(L)) < 1e-7
        assert rel(tp.fourth, rc.fourth(L)) < 1e-7
        assert np.abs(tp.third).max() <= 1e-8


def test_tensors_match_fd_of_beta():
    for g in (figure_one([1, "1.3", "0.8", "1.7"]), two_loop([1, "1.4", "0.9"])):
        b = build(g)
        tp = thermo_profile(b.system)
        fd = beta_taylor_fd(b.system, tp.h)
        assert rel(tp.hess, fd[2]) < 1e-6
        assert np.abs(fd[3]).max() < 1e-6
        assert rel(tp.fourth, fd[4]) < 1e-6


def test_profile_invariants(fig1):
    tp = thermo_profile(fig1.system)
    assert np.abs(tp.grad).max() <= 1e-10
    assert np.linalg.eigvalsh(tp.hess).min() > 0
    assert np.abs(tp.third).max() <= 1e-8
    for T in (tp.hess, tp.third, tp.fourth):
        for perm in [(1, 0, 2, 3)[: T.ndim], tuple(reversed(range(T.ndim)))]:
            assert np.array_equal(T, np.transpose(T, perm)) or np.allclose(T, np.transpose(T, perm), atol=0, rtol=1e-15)


def test_taylor_remainder_order(rose2):
    tp = thermo_profile(rose2.system)
    d = np.array([0.8, 0.6])
    errs = []
    for eps in (0.1, 0.05, 0.025):
        u = eps * d
        errs.append(abs(solve_beta(rose2.system, u, tp.h) - beta_expansion(tp, u)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 5.9, orders


def test_beta_derivatives_from_pressure_partials(fig1):
    h = solve_entropy(fig1.system)
    pd = pressure_derivatives(fig1.system, h)
    tp = beta_derivatives(pd)
    assert abs(tp.rbar + pd.P_s) == 0
    assert rel(tp.hess * tp.rbar, pd.exact_hessian[1:, 1:]) < 1e-7
