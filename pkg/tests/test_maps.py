"""Map families, branch inverses, potentials, and the hypothesis checker."""

import numpy as np
import pytest

from circthermo import (BranchMap, ConfigError, HypothesisAux, check_hypotheses,
                        circle_distance, constant, doubling, grid_potential,
                        linear_map, log_derivative_weight, manneville_pomeau,
                        trig_polynomial, zero_potential)
from circthermo.maps import smallness_values

from conftest import builtin_maps


def test_preimages_doubling_quarter():
    ys = doubling().preimages(0.25)
    assert np.allclose(ys, [0.125, 0.625], atol=1e-14)


def test_preimages_mp_alpha1_half():
    # branch-0 preimage solves 2 y^2 + y - 0.5 = 0; take the root in [0, 1/2]
    roots = np.roots([2.0, 1.0, -0.5])
    root = float(roots[(roots >= 0) & (roots <= 0.5)][0])
    mp = manneville_pomeau(1.0)
    ys = mp.preimages(0.5)
    assert abs(ys[0] - root) < 1e-12
    assert abs(ys[1] - 0.75) < 1e-12
    # forward evaluation confirms both
    assert np.max(circle_distance(mp(ys), 0.5)) < 1e-12


def test_preimages_degree3_endpoint_tie():
    ys = linear_map(3).preimages(0.0)
    assert np.allclose(ys, [0.0, 1.0 / 3.0, 2.0 / 3.0], atol=1e-14)
    assert len(ys) == 3


@pytest.mark.parametrize("bmap", builtin_maps(), ids=lambda m: m.family_tag)
def test_preimage_forward_identity(bmap):
    rng = np.random.Generator(np.random.Philox(key=1))
    xs = rng.random(1000)
    ys = bmap.preimages(xs)
    assert ys.shape == (bmap.degree, 1000)
    assert float(np.max(circle_distance(bmap(ys), xs[None, :]))) < 1e-12


@pytest.mark.parametrize("bmap", builtin_maps(), ids=lambda m: m.family_tag)
def test_preimages_monotone_per_branch(bmap):
    xs = np.linspace(0.01, 0.99, 200)
    ys = bmap.preimages(xs)
    # monotone along each branch wherever the branch inverse does not wrap
    jumps = np.diff(ys, axis=1)
    wraps = np.count_nonzero(jumps <= 0, axis=1)
    assert np.all(wraps <= 1)   # at most the single seam crossing per branch


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_mp_indifferent_fixed_point(alpha):
    mp = manneville_pomeau(alpha)
    assert abs(mp.lift(np.array([0.5]))[0] - 1.0) < 1e-14
    assert abs(mp.dlift(np.array([0.0]))[0] - 1.0) == 0.0


def test_non_monotone_branch_rejected():
    with pytest.raises(ConfigError, match="non-monotone"):
        BranchMap(2,
                  lambda x: 2 * np.asarray(x) - 0.5 * np.sin(2 * np.pi * np.asarray(x)) ** 1,
                  lambda x: 2 - np.pi * np.cos(2 * np.pi * np.asarray(x)),
                  family_tag="bad")


def test_bad_lift_increment_rejected():
    with pytest.raises(ConfigError, match="increase by degree"):
        BranchMap(3, lambda x: 2.0 * np.asarray(x),
                  lambda x: np.full_like(np.asarray(x, dtype=float), 2.0))


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------

def test_potential_algebra_and_derivative():
    phi = trig_polynomial(cos_coeffs=[0.3], sin_coeffs=[0.1, 0.2])
    psi = constant(0.5)
    x = np.linspace(0, 1, 33, endpoint=False)
    combo = phi + 2.0 * psi
    assert np.allclose(combo(x), phi(x) + 1.0)
    dphi = phi.derivative(x)
    expect = (-0.3 * 2 * np.pi * np.sin(2 * np.pi * x)
              + 0.1 * 2 * np.pi * np.cos(2 * np.pi * x)
              + 0.2 * 4 * np.pi * np.cos(4 * np.pi * x))
    assert np.allclose(dphi, expect, atol=1e-13)


def test_zero_scaled_term_is_bitwise_noop():
    phi = trig_polynomial(cos_coeffs=[0.1])
    psi = trig_polynomial(sin_coeffs=[0.7])
    x = np.linspace(0, 1, 100, endpoint=False)
    assert np.array_equal((phi + 0.0 * psi)(x), phi(x))


def test_log_derivative_potential():
    mp = manneville_pomeau(1.0)
    pot = log_derivative_weight(-0.5, mp)
    x = np.array([0.2, 0.7])
    assert np.allclose(pot(x), -0.5 * np.log(mp.dlift(x)))
    assert pot.holder_exponent == 1.0
    # derivative matches -0.5 F''/F'
    assert np.allclose(pot.derivative(x), -0.5 * mp.d2lift(x) / mp.dlift(x))


def test_grid_potential_seam_continuity():
    rng = np.random.Generator(np.random.Philox(key=3))
    vals = rng.standard_normal(32)
    pot = grid_potential(vals, "linear")
    left = pot(np.array([1.0 - 1e-12]))[0]
    right = pot(np.array([0.0]))[0]
    assert abs(left - right) < 1e-9
    assert abs(right - vals[0]) < 1e-14


def test_potential_oscillation():
    assert constant(3.5).oscillation() == 0.0
    assert abs(trig_polynomial(cos_coeffs=[0.1]).oscillation() - 0.2) < 1e-6


# ---------------------------------------------------------------------------
# Hypothesis checker
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_hypotheses_doubling_zero_potential(alpha):
    rep = check_hypotheses(doubling(), constant(0.0, holder_exponent=alpha))
    assert abs(rep.sigma - 2.0) < 1e-6
    assert rep.q == 0
    assert rep.eps_phi == 0.0
    assert abs(rep.vep_value - 2.0 ** (-alpha)) < 1e-6
    assert rep.verdicts["H1"] and rep.verdicts["H2"] and rep.verdicts["P"]


def test_hypotheses_constant_shift_matches_zero():
    rep0 = check_hypotheses(doubling(), zero_potential())
    repc = check_hypotheses(doubling(), constant(1.7))
    assert rep0.verdicts == repc.verdicts
    assert rep0.vep_value == repc.vep_value


def test_hypotheses_manneville_pomeau_declared_region():
    mp = manneville_pomeau(1.0)
    aux = HypothesisAux(region_a=[(0.0, 0.05)], q=1)
    rep = check_hypotheses(mp, zero_potential(), aux)
    assert abs(rep.big_l - 1.0) < 1e-3      # L = 1/f'(0) = 1 on A
    assert rep.q == 1
    assert rep.verdicts["H1"] and rep.verdicts["H2"] and rep.verdicts["P"]
    assert 1.0 < rep.sigma < 2.0            # expansion certified outside A only


def test_hypotheses_fail_for_large_oscillation():
    rep = check_hypotheses(doubling(), trig_polynomial(cos_coeffs=[0.1]))
    assert rep.verdicts["P"] is False       # eps = 0.2 breaks the m-weighted term
    assert rep.vep_value > 1.0


def test_smallness_values_monotone_in_eps():
    values = [smallness_values(2, 0, 2.0, 1.0, 1.0, eps, 10)
              for eps in (0.0, 0.01, 0.05, 0.2)]
    veps = [v[0] for v in values]
    vepps = [v[1] for v in values]
    assert all(a < b for a, b in zip(veps, veps[1:]))
    assert all(a < b for a, b in zip(vepps, vepps[1:]))


def test_hypothesis_report_roundtrips_to_dict():
    rep = check_hypotheses(doubling(), zero_potential())
    d = rep.as_dict()
    assert d["verdicts"]["P"] is True
    assert isinstance(d["region_a"], list)
