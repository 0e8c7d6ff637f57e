"""Pressure routes, equilibrium states, entropy and Lyapunov exponents."""

import math

import numpy as np
import pytest

from circthermo import (Discretization, constant, discretize, doubling,
                        equilibrium_state, leading_triple, linear_map,
                        log_derivative_weight, manneville_pomeau,
                        pressure, pressure_oracle_periodic,
                        pressure_oracle_tree, trig_polynomial, zero_potential)

from conftest import builtin_maps


def test_pressure_doubling_is_log2():
    assert pressure(doubling(), zero_potential(), Discretization(n=256)) == \
        pytest.approx(math.log(2), abs=1e-12)


def test_pressure_degree3_is_log3():
    assert pressure(linear_map(3), zero_potential(), Discretization(n=256)) == \
        pytest.approx(math.log(3), abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.9])
def test_pressure_geometric_family_closed_form(t):
    p = pressure(doubling(), constant(-t * math.log(2)), Discretization(n=256))
    assert p == pytest.approx((1 - t) * math.log(2), abs=1e-10)


def test_pressure_shifts_by_constant():
    disc = Discretization(n=128)
    pot = trig_polynomial(cos_coeffs=[0.01])
    base = pressure(doubling(), pot, disc)
    shifted = pressure(doubling(), pot + 0.37, disc)
    assert shifted - base == pytest.approx(0.37, abs=1e-12)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def test_tree_oracle_exact_for_maximal_entropy():
    for x0 in (0.1, 0.5, 0.92):
        assert pressure_oracle_tree(doubling(), zero_potential(), x0, 20) == \
            pytest.approx(math.log(2), abs=1e-12)


def test_tree_oracle_constant_potential_exact():
    # (1/n) log(d^n e^{nc}) = log d + c for every depth
    val = pressure_oracle_tree(linear_map(3), constant(0.4), 0.2, 6)
    assert val == pytest.approx(math.log(3) + 0.4, abs=1e-12)


def test_tree_oracle_depth_stability_and_spectral_match():
    pot = trig_polynomial(cos_coeffs=[0.1])
    p18 = pressure_oracle_tree(doubling(), pot, 0.3, 18)
    p20 = pressure_oracle_tree(doubling(), pot, 0.3, 20)
    assert abs(p18 - p20) < 0.01
    ps = pressure(doubling(), pot, Discretization(n=1024))
    assert abs(p18 - ps) < 0.02 and abs(p20 - ps) < 0.02


def test_periodic_oracle_doubling_count():
    # #Fix(f^10) = 2^10 - 1 periodic points, unit weights
    val, skipped = pressure_oracle_periodic(doubling(), zero_potential(), 10)
    assert val == pytest.approx(math.log(2 ** 10 - 1) / 10, abs=1e-12)
    assert skipped == 0


def test_periodic_oracle_constant_closed_form():
    val, _ = pressure_oracle_periodic(linear_map(3), constant(0.25), 8)
    expect = math.log(3) + 0.25 + math.log(1 - 3.0 ** -8) / 8
    assert val == pytest.approx(expect, abs=1e-12)


def test_periodic_oracle_matches_spectral():
    pot = trig_polynomial(cos_coeffs=[0.1])
    val, skipped = pressure_oracle_periodic(doubling(), pot, 16)
    ps = pressure(doubling(), pot, Discretization(n=1024))
    assert abs(val - ps) < 0.02
    assert skipped <= 1          # the seam orbit may oscillate across 0 ~ 1


def test_three_pressure_routes_agree_on_builtin_families():
    # small oscillation so the smallness conditions hold on every family
    for bmap in builtin_maps():
        pot = trig_polynomial(cos_coeffs=[0.003])
        n_tree = min(18, int(24 * math.log(2) / math.log(bmap.degree)) - 4)
        n_per = max(8, n_tree - 2)
        ps = pressure(bmap, pot, Discretization(n=512))
        pt = pressure_oracle_tree(bmap, pot, 0.37, n_tree)
        pp, _ = pressure_oracle_periodic(bmap, pot, n_per)
        assert abs(ps - pt) < 0.02, bmap.family_tag
        assert abs(ps - pp) < 0.02, bmap.family_tag
        assert abs(pt - pp) < 0.02, bmap.family_tag


# ---------------------------------------------------------------------------
# Equilibrium states
# ---------------------------------------------------------------------------

def test_equilibrium_doubling_maximal_entropy():
    rep = equilibrium_state(doubling(), zero_potential(), Discretization(n=256))
    assert np.max(np.abs(rep.equilibrium - 1.0 / 256)) < 1e-12
    assert rep.entropy == pytest.approx(math.log(2), abs=1e-12)
    assert rep.lyapunov == pytest.approx(math.log(2), abs=1e-12)
    assert rep.dimension == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("t", [0.2, 0.7])
def test_equilibrium_uniform_for_geometric_doubling(t):
    rep = equilibrium_state(doubling(), constant(-t * math.log(2)),
                            Discretization(n=128))
    assert np.max(np.abs(rep.equilibrium - 1.0 / 128)) < 1e-12


def test_dimension_present_for_geometric_potential():
    mp = manneville_pomeau(0.5)
    rep = equilibrium_state(mp, log_derivative_weight(-0.1, mp),
                            Discretization(n=256))
    assert rep.dimension == pytest.approx(rep.entropy / rep.lyapunov, rel=1e-12)


def test_dimension_absent_for_generic_potential():
    rep = equilibrium_state(doubling(), trig_polynomial(cos_coeffs=[0.01]),
                            Discretization(n=128))
    assert rep.dimension is None


def test_psi_expectation_matches_pressure_derivative():
    # int psi d mu == d/dt P(phi + t psi) by central differences
    disc = Discretization(n=128, interpolation="fourier")
    phi = trig_polynomial(cos_coeffs=[0.02])
    psi = trig_polynomial(sin_coeffs=[0.5])
    rep = equilibrium_state(doubling(), phi, disc)
    nodes = np.arange(128) / 128
    expect = float(psi(nodes) @ rep.equilibrium)
    eps = 1e-4
    fd = (pressure(doubling(), phi + eps * psi, disc)
          - pressure(doubling(), phi + (-eps) * psi, disc)) / (2 * eps)
    assert abs(expect - fd) < 1e-5


def test_equilibrium_invariance_on_builtin_families():
    rng = np.random.Generator(np.random.Philox(key=5))
    ks = np.arange(1, 9)
    g = trig_polynomial(cos_coeffs=rng.standard_normal(8) * 0.1 / ks ** 2)
    nodes = np.arange(1024) / 1024
    for bmap in builtin_maps():
        pot = trig_polynomial(cos_coeffs=[0.003])
        rep = equilibrium_state(bmap, pot, Discretization(n=1024))
        err = abs(float(g(bmap(nodes)) @ rep.equilibrium)
                  - float(g(nodes) @ rep.equilibrium))
        assert err < 1e-6, bmap.family_tag


def test_conformality_of_left_weights():
    mp = manneville_pomeau(1.0)
    pot = trig_polynomial(cos_coeffs=[0.004])
    tr = leading_triple(discretize(mp, pot, Discretization(n=256)))
    rng = np.random.Generator(np.random.Philox(key=9))
    g = rng.standard_normal(256)
    lhs = float(tr.nu @ tr.op.apply(g))
    rhs = float(tr.lam) * float(tr.nu @ g)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_entropy_positive_and_bounded():
    for bmap in builtin_maps():
        pot = trig_polynomial(cos_coeffs=[0.003])
        rep = equilibrium_state(bmap, pot, Discretization(n=512))
        assert 0.0 < rep.entropy <= math.log(bmap.degree) + 1e-12, bmap.family_tag
