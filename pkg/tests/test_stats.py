"""Correlations, CLT parameters, free energy, rate functions, Monte-Carlo LDP."""

import numpy as np
import pytest

from circthermo import (ConfigError, Discretization, HypothesisError,
                        HypothesisAux, clt_parameters, constant,
                        constant_family, correlation, d_correlation_d_dynamics,
                        doubling, free_energy, ldp_monte_carlo, leading_triple,
                        discretize, log_derivative_weight, manneville_pomeau,
                        perturbed_doubling_family, rate_continuity_scan,
                        rate_function, translated_doubling_family,
                        trig_polynomial, zero_potential)
from circthermo.spectral import gap_estimate

from conftest import cos1

DISC_F = Discretization(n=128, scheme="collocation", interpolation="fourier")
PSI_COS = trig_polynomial(cos_coeffs=[1.0])


def test_correlation_constant_observable_vanishes():
    series = correlation(doubling(), zero_potential(), cos1,
                         lambda x: np.full_like(np.asarray(x, float), 2.0),
                         10, DISC_F)
    assert np.max(np.abs(series.values)) < 1e-13


def test_correlation_doubling_cos_orthogonality():
    series = correlation(doubling(), zero_potential(), cos1, cos1, 20, DISC_F)
    assert series.values[0] == pytest.approx(0.5, abs=1e-12)
    assert np.max(np.abs(series.values[1:])) < 1e-12
    assert series.note is not None          # nothing to fit above the floor


def test_correlation_decay_rate_bounded_by_gap():
    mp = manneville_pomeau(0.5)
    pot = log_derivative_weight(-0.1, mp)
    tr = leading_triple(discretize(mp, pot, Discretization(n=512)))
    tau = gap_estimate(tr.op, tr)
    series = correlation(mp, pot, cos1,
                         lambda x: np.sin(2 * np.pi * x) + 0.3 * np.cos(4 * np.pi * x),
                         30, Discretization(n=512), triple=tr)
    assert series.tau_fit is not None
    assert series.tau_fit <= tau + 0.05


def test_d_correlation_translated_family_is_zero():
    fam = translated_doubling_family()
    for n in (1, 3, 5):
        rep = d_correlation_d_dynamics(fam, cos1, cos1, n, 0.2,
                                       Discretization(n=64, interpolation="fourier"))
        assert abs(rep.fd_value) < 1e-9


def test_d_correlation_decays_for_perturbed_family():
    fam = perturbed_doubling_family()
    disc = Discretization(n=128, interpolation="fourier")
    rep_small = d_correlation_d_dynamics(fam, cos1, cos1, 2, 0.1, disc)
    rep_large = d_correlation_d_dynamics(fam, cos1, cos1, 30, 0.1, disc)
    assert abs(rep_large.fd_value) < 1e-6
    assert abs(rep_large.fd_value) <= abs(rep_small.fd_value) + 1e-12


def test_d_correlation_constant_observable():
    fam = perturbed_doubling_family()
    rep = d_correlation_d_dynamics(fam, cos1,
                                   lambda x: np.ones_like(np.asarray(x, float)),
                                   4, 0.1, Discretization(n=64, interpolation="fourier"))
    assert abs(rep.fd_value) < 1e-12


def test_clt_doubling_cosine():
    clt = clt_parameters(doubling(), zero_potential(), cos1, DISC_F)
    assert clt.mean == pytest.approx(0.0, abs=1e-13)
    assert clt.variance == pytest.approx(0.5, abs=1e-10)
    assert not clt.coboundary


def test_clt_coboundary_degenerates():
    cob = lambda x: np.cos(4 * np.pi * x) - np.cos(2 * np.pi * x)
    clt = clt_parameters(doubling(), zero_potential(), cob, DISC_F)
    assert clt.variance == 0.0
    assert clt.coboundary


def test_clt_variance_matches_free_energy_curvature():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, disc=DISC_F)
    clt = clt_parameters(doubling(), zero_potential(), cos1, DISC_F)
    e2 = float(curve.spline.derivative(2)(0.0))
    assert abs(clt.variance - e2) < 1e-4


def test_clt_variance_nonnegative_random_observables():
    rng = np.random.Generator(np.random.Philox(key=23))
    for _ in range(5):
        psi = trig_polynomial(cos_coeffs=rng.standard_normal(3) * 0.5,
                              sin_coeffs=rng.standard_normal(3) * 0.5)
        clt = clt_parameters(doubling(), zero_potential(), psi, DISC_F)
        assert clt.variance >= 0.0


# ---------------------------------------------------------------------------
# Free energy and rate function
# ---------------------------------------------------------------------------

def test_free_energy_auto_radius_doubling_cos():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, disc=DISC_F)
    # largest 0.4^k whose endpoints pass the smallness checks
    assert curve.t0 == pytest.approx(0.4 ** 5, rel=1e-12)
    assert curve.values[len(curve.values) // 2] == 0.0
    assert curve.convex


def test_free_energy_no_admissible_radius():
    # declaring q = deg breaks (H2) and the smallness inequalities outright
    with pytest.raises(HypothesisError, match="vep"):
        free_energy(doubling(), zero_potential(), PSI_COS,
                    hyp_aux=HypothesisAux(q=2), disc=DISC_F)


def test_free_energy_affine_for_constant_observable():
    curve = free_energy(doubling(), zero_potential(), constant(0.7), t0=0.3,
                        disc=DISC_F)
    assert np.max(np.abs(curve.values - 0.7 * curve.t_grid)) < 1e-12
    rate = rate_function(curve)
    assert rate.s_grid.shape == (1,)
    assert rate.s_grid[0] == pytest.approx(0.7, abs=1e-9)
    assert rate.values[0] == 0.0


def test_free_energy_bounds_and_strict_convexity():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, t0=0.2, disc=DISC_F)
    tpos = curve.t_grid[curve.t_grid > 0]
    assert np.all(curve.values[curve.t_grid > 0] <= tpos * 1.0 + 1e-12)
    assert np.all(curve.values[curve.t_grid > 0] >= tpos * (-1.0) - 1e-12)
    tneg = curve.t_grid[curve.t_grid < 0]
    assert np.all(curve.values[curve.t_grid < 0] <= tneg * (-1.0) + 1e-12)
    assert np.all(curve.values[curve.t_grid < 0] >= tneg * 1.0 - 1e-12)
    assert np.all(curve.e_second > 0.0)     # strictly convex: not a coboundary


def test_free_energy_slope_at_zero_matches_mean():
    # E'(0) = int psi d mu, the pressure-derivative consistency
    from circthermo import equilibrium_state
    psi = trig_polynomial(cos_coeffs=[0.6], sin_coeffs=[0.3])
    curve = free_energy(doubling(), zero_potential(), psi, t0=0.05, disc=DISC_F)
    rep = equilibrium_state(doubling(), zero_potential(), DISC_F)
    nodes = np.arange(DISC_F.n) / DISC_F.n
    mean = float(np.asarray(psi(nodes)) @ rep.equilibrium)
    assert abs(float(curve.eprime(0.0)) - mean) < 1e-6


def test_rate_function_properties():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, t0=0.2, disc=DISC_F)
    rate = rate_function(curve)
    assert np.all(rate.values >= 0.0)
    assert np.all(np.diff(rate.values, 2) >= -1e-10)
    assert float(rate(np.array([rate.argmin]))[0]) <= 1e-10
    assert abs(rate.argmin) < 1e-8          # mean of cos under Lebesgue


def test_rate_function_duality_identity():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, t0=0.2, disc=DISC_F)
    rate = rate_function(curve)
    for t_star in curve.t_grid[3:-3:6]:
        s_star = float(curve.eprime(t_star))
        lhs = float(rate(np.array([s_star]))[0])
        rhs = t_star * s_star - float(curve.spline(t_star))
        assert abs(lhs - rhs) < 1e-8


def test_legendre_involution_recovers_free_energy():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, t0=0.2, disc=DISC_F)
    rate = rate_function(curve, n_s=81)
    from scipy.interpolate import CubicSpline
    ispline = CubicSpline(rate.s_grid, rate.values)
    for t in curve.t_grid[8:-8:5]:
        ss = np.linspace(rate.s_grid[0], rate.s_grid[-1], 600)
        back = float(np.max(t * ss - ispline(ss)))
        assert abs(back - float(curve.spline(t))) < 1e-6


def test_rate_function_rejects_nonconvex():
    curve = free_energy(doubling(), zero_potential(), PSI_COS, t0=0.05, disc=DISC_F)
    curve.convex = False
    with pytest.raises(ConfigError, match="convex"):
        rate_function(curve)


# ---------------------------------------------------------------------------
# Monte-Carlo deviations
# ---------------------------------------------------------------------------

def _doubling_rate_setup(t0=1.2, n=512):
    disc = Discretization(n=n)
    curve = free_energy(doubling(), zero_potential(), PSI_COS, t0=t0, disc=disc)
    return rate_function(curve), disc


def test_ldp_typical_interval_rate_goes_to_zero():
    rate, disc = _doubling_rate_setup()
    exp = ldp_monte_carlo(doubling(), zero_potential(), cos1, (-0.2, 0.2),
                          [5, 10, 20], 100000, 7, rate, disc=disc)
    assert exp.predicted == 0.0
    assert exp.rates[20] > exp.rates[5]
    assert abs(exp.rates[20]) < 0.05


def test_ldp_deviation_interval_bracket_and_reproducibility():
    rate, disc = _doubling_rate_setup()
    exp1 = ldp_monte_carlo(doubling(), zero_potential(), cos1, (0.25, 0.45),
                           [10, 20, 30], 200000, 20250808, rate, disc=disc)
    exp2 = ldp_monte_carlo(doubling(), zero_potential(), cos1, (0.25, 0.45),
                           [10, 20, 30], 200000, 20250808, rate, disc=disc)
    assert exp1.rates == exp2.rates          # seeded, counter-based RNG
    # LDP upper-bound bracket at the largest n
    assert exp1.rates[30] <= exp1.predicted + exp1.ci95[30]


def test_ldp_zero_hits_reported_as_minus_infinity():
    rate, disc = _doubling_rate_setup()
    exp = ldp_monte_carlo(doubling(), zero_potential(), cos1, (0.8, 0.86),
                          [30], 10000, 11, rate, disc=disc)
    assert exp.rates[30] == -np.inf
    assert any("0 hits" in note for note in exp.notes)


def test_ldp_ci_scales_with_sample_count():
    rate, disc = _doubling_rate_setup(n=256)
    cis = []
    for n_samples in (50000, 200000):
        exp = ldp_monte_carlo(doubling(), zero_potential(), cos1, (0.25, 0.45),
                              [10], n_samples, 3, rate, disc=disc)
        cis.append(exp.ci95[10])
    # quadrupling the samples roughly halves the batch CI
    assert abs(cis[1] / cis[0] - 0.5) < 0.2


def test_ldp_interval_outside_domain_rejected():
    rate, disc = _doubling_rate_setup(t0=0.01024, n=128)
    with pytest.raises(ConfigError, match="domain"):
        ldp_monte_carlo(doubling(), zero_potential(), cos1, (0.25, 0.45),
                        [10], 1000, 1, rate, disc=disc)


# ---------------------------------------------------------------------------
# Rate-function continuity scans
# ---------------------------------------------------------------------------

def test_rate_scan_constant_family_identical_rows():
    fam = constant_family(doubling())
    scan = rate_continuity_scan(fam, zero_potential(), PSI_COS,
                                np.linspace(-0.003, 0.003, 5), [0.0, 0.5, 1.0],
                                disc=DISC_F)
    assert scan.modulus < 1e-13


def test_rate_scan_translated_family_rows_coincide():
    # conjugation by rotation: at small radius the curves agree to high order
    fam = translated_doubling_family()
    scan = rate_continuity_scan(fam, zero_potential(), PSI_COS,
                                np.linspace(-0.0008, 0.0008, 7),
                                [0.0, 0.25, 0.5],
                                disc=Discretization(n=256, interpolation="fourier"),
                                t0=0.002)
    assert scan.modulus < 1e-8


def test_rate_scan_refinement_shrinks_modulus():
    fam = perturbed_doubling_family()
    disc = Discretization(n=256)
    s_grid = np.linspace(-0.12, 0.12, 7)
    coarse = rate_continuity_scan(fam, zero_potential(), PSI_COS, s_grid,
                                  [0.0, 0.1, 0.2], disc=disc, t0=0.4, n_t=21)
    fine = rate_continuity_scan(fam, zero_potential(), PSI_COS, s_grid,
                                [0.0, 0.05, 0.1, 0.15, 0.2], disc=disc,
                                t0=0.4, n_t=21)
    assert coarse.modulus / fine.modulus >= 1.5


def test_rate_scan_empty_common_interval_rejected():
    fam = perturbed_doubling_family()
    with pytest.raises(ConfigError, match="common"):
        rate_continuity_scan(fam, zero_potential(), PSI_COS,
                             np.linspace(-0.9, 0.9, 5), [0.0, 0.1],
                             disc=Discretization(n=128), t0=0.4)
