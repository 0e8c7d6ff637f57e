"""Statistical laws of equilibrium states: correlation decay, central limit
parameters, free-energy curves, Legendre rate functions, and a seeded
Monte-Carlo local large-deviations experiment.

Correlations are computed through the normalized operator (no orbit
simulation); Monte-Carlo orbits use exact map evaluation so the deviation
experiment stays independent of the discretization behind the rate
function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, HypothesisError
from .maps import BranchMap, HypothesisAux, ParamFamily, Potential, check_hypotheses
from .operator import Discretization, discretize
from .response import FD_DEFAULT_STEP, ResponseReport, central_difference
from .spectral import SpectralTriple, gap_estimate, leading_triple
from .thermo import pressure

COBOUNDARY_TOL = 1e-8


def _triple_at(branch_map, pot, disc, tol=1e-12):
    return leading_triple(discretize(branch_map, pot, disc), tol=tol)


# ---------------------------------------------------------------------------
# Correlations and the CLT
# ---------------------------------------------------------------------------

@dataclass
class CorrelationSeries:
    values: np.ndarray           # C(0), ..., C(n_max)
    tau_fit: Optional[float]
    fit_residual: Optional[float]
    note: Optional[str] = None

    def __getitem__(self, n):
        return self.values[n]


def correlation(branch_map: BranchMap, pot: Potential, obs_a, obs_b,
                n_max: int, disc: Discretization = Discretization(),
                triple: Optional[SpectralTriple] = None) -> CorrelationSeries:
    """Time-n correlations of (obs_a, obs_b) under the equilibrium state.

    C(n) = int obs_a . Ltil^n(P0(obs_b h)) d nu; the decay rate is fitted
    by least squares on log |C(n)| over the terms above the noise floor.
    """
    if triple is None:
        triple = _triple_at(branch_map, pot, disc)
    x = triple.op.grid.nodes
    av = np.asarray(obs_a(x), dtype=float)
    bv = np.asarray(obs_b(x), dtype=float)
    z = triple.project_zero_mean(bv * triple.h.values)
    vals = np.empty(n_max + 1)
    for n in range(n_max + 1):
        vals[n] = float(triple.integrate_nu(av * z))
        z = triple.project_zero_mean(triple.normalized_apply(z))
    mask = np.abs(vals[1:]) > 1e-13
    note = None
    tau_fit = resid = None
    if np.count_nonzero(mask) >= 2:
        ns = np.arange(1, n_max + 1)[mask]
        logs = np.log(np.abs(vals[1:][mask]))
        coef, residuals, *_ = np.polyfit(ns, logs, 1, full=True)
        tau_fit = float(np.exp(coef[0]))
        resid = float(residuals[0]) if len(residuals) else 0.0
    else:
        note = "correlations below noise floor; no decay rate fitted"
    return CorrelationSeries(values=vals, tau_fit=tau_fit, fit_residual=resid,
                             note=note)


@dataclass
class CltParameters:
    mean: float
    variance: float
    series_terms: int
    tail_bound: float
    coboundary: bool
    note: Optional[str] = None


def clt_parameters(branch_map: BranchMap, pot: Potential, psi,
                   disc: Discretization = Discretization(),
                   triple: Optional[SpectralTriple] = None,
                   tol: float = 1e-13) -> CltParameters:
    """Mean and Green-Kubo variance of Birkhoff sums of psi.

    variance = C(0) + 2 sum_{n>=1} C(n), truncated once the iterated
    zero-mean field falls below the gap-based floor; a variance within
    the coboundary tolerance of zero is clamped to exactly zero.
    """
    if triple is None:
        triple = _triple_at(branch_map, pot, disc)
    if triple.tau is None:
        gap_estimate(triple.op, triple)
    tau = triple.tau
    x = triple.op.grid.nodes
    pv = np.asarray(psi(x), dtype=float)
    mean = float(triple.integrate_mu(pv))
    z = triple.project_zero_mean(pv * triple.h.values)
    pnorm = float(np.max(np.abs(pv))) or 1.0

    note = None
    if tau >= 1.0 - 1e-6:
        note = "tail bound unavailable: gap estimate too close to 1; partial sum"
        n_cap = 200
    else:
        n_cap = max(50, int(12 * math.log(max(tol, 1e-30)) / math.log(max(tau, 1e-12))))
    var = float(triple.integrate_nu(pv * z))          # C(0)
    terms = 1
    floor = tol * max(1.0, float(np.max(np.abs(z))))
    z = triple.project_zero_mean(triple.normalized_apply(z))
    while terms <= n_cap:
        c_n = float(triple.integrate_nu(pv * z))
        var += 2.0 * c_n
        terms += 1
        if float(np.max(np.abs(z))) < floor:
            break
        z = triple.project_zero_mean(triple.normalized_apply(z))
    tail = float(np.max(np.abs(z))) * pnorm * (2.0 / (1.0 - tau) if tau < 1 else np.inf)

    coboundary = False
    if abs(var) < COBOUNDARY_TOL:
        var = 0.0
        coboundary = True
    elif var < 0.0:
        var = 0.0
        coboundary = True
        note = (note + "; " if note else "") + \
            "negative truncated variance clamped to zero"
    return CltParameters(mean=mean, variance=var, series_terms=terms,
                         tail_bound=tail, coboundary=coboundary, note=note)


def d_correlation_d_dynamics(family: ParamFamily, obs_a, obs_b, n: int,
                             s0: float,
                             disc: Discretization = Discretization(),
                             fd_step: float = FD_DEFAULT_STEP) -> ResponseReport:
    """FD derivative of s -> C(n) at the maximal entropy measure (phi = 0).

    The asymptotic statement is that this derivative converges to zero in
    n, so the report's analytic_value is the limiting target 0 and
    fd_value the measured derivative at this n.
    """
    from .maps import zero_potential
    pot0 = zero_potential()

    def c_n(s):
        series = correlation(family.at(s), pot0, obs_a, obs_b, n, disc)
        return float(series.values[n])

    fd = central_difference(lambda e: c_n(s0 + e), fd_step)
    return ResponseReport(analytic_value=0.0, fd_value=fd, fd_step=fd_step)


# ---------------------------------------------------------------------------
# Free energy and rate functions
# ---------------------------------------------------------------------------

@dataclass
class FreeEnergyCurve:
    t_grid: np.ndarray
    values: np.ndarray
    t0: float
    e_prime: np.ndarray
    e_second: np.ndarray
    convex: bool
    spline: CubicSpline = field(repr=False)

    def e(self, t):
        return self.spline(t)

    def eprime(self, t):
        return self.spline.derivative()(t)

    @property
    def domain(self):
        d1 = self.spline.derivative()
        return float(d1(-self.t0)), float(d1(self.t0))


def _auto_t0(branch_map, phi, psi, aux):
    tried = []
    for k in range(0, 15):
        t = 0.4 ** k
        rep_p = check_hypotheses(branch_map, phi + t * psi, aux)
        rep_m = check_hypotheses(branch_map, phi + (-t) * psi, aux)
        ok = all(((r.verdicts.get("P") or r.verdicts.get("P'")) and
                  r.verdicts["H1"] and r.verdicts["H2"]) for r in (rep_p, rep_m))
        if ok:
            return t
        tried.append((t, rep_p.vep_value, rep_p.vepp_value))
    t, vep, vepp = tried[-1]
    raise HypothesisError(
        f"no admissible t0 found down to t={t:.3g}: smallness inequalities "
        f"give vep={vep:.4f}, vepp={vepp:.4f} (need both < 1)")


def free_energy(branch_map: BranchMap, phi: Potential, psi: Potential,
                t0: Optional[float] = None, n_t: int = 41,
                disc: Discretization = Discretization(),
                hyp_aux: Optional[HypothesisAux] = None,
                tol: float = 1e-12) -> FreeEnergyCurve:
    """Pressure-difference free energy t -> P(phi + t psi) - P(phi).

    Without an explicit t0, the largest radius on the geometric trial grid
    0.4^k whose endpoints pass the smallness checks is used.  An explicit
    t0 is a caller override and is not re-certified.
    """
    if n_t < 5 or n_t % 2 == 0:
        raise ConfigError(f"n_t must be odd and >= 5, got {n_t}")
    if t0 is None:
        t0 = _auto_t0(branch_map, phi, psi, hyp_aux or HypothesisAux())
    t_grid = np.linspace(-t0, t0, n_t)
    t_grid[n_t // 2] = 0.0
    pressures = np.array([
        pressure(branch_map, phi + float(t) * psi, disc) for t in t_grid])
    values = pressures - pressures[n_t // 2]
    spline = CubicSpline(t_grid, values)
    e_prime = spline.derivative()(t_grid)
    e_second = spline.derivative(2)(t_grid)
    second_diffs = np.diff(values, 2)
    convex = bool(np.all(second_diffs >= -1e-10))
    return FreeEnergyCurve(t_grid=t_grid, values=values, t0=float(t0),
                           e_prime=e_prime, e_second=e_second, convex=convex,
                           spline=spline)


@dataclass
class RateFunction:
    s_grid: np.ndarray
    values: np.ndarray
    argmin: float
    t0: float
    curve: FreeEnergyCurve = field(repr=False)

    def __call__(self, s):
        return np.asarray([legendre_sup(self.curve, float(si))[0]
                           for si in np.atleast_1d(s)]).reshape(np.shape(s))

    def infimum(self, a, b):
        """inf over [a, b] (clipped to the domain); uses convexity."""
        lo, hi = self.s_grid[0], self.s_grid[-1]
        a_, b_ = max(a, lo), min(b, hi)
        if a_ > b_:
            raise ConfigError(f"interval [{a}, {b}] outside rate domain [{lo}, {hi}]")
        if a_ <= self.argmin <= b_:
            return 0.0
        s = a_ if self.argmin < a_ else b_
        return float(legendre_sup(self.curve, s)[0])


def legendre_sup(curve: FreeEnergyCurve, s: float, iters: int = 200):
    """sup_t { s t - E(t) } over [-t0, t0] by ternary search (concave)."""
    lo, hi = -curve.t0, curve.t0
    for _ in range(iters):
        if hi - lo < 1e-14 * max(1.0, curve.t0):
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if s * m1 - curve.spline(m1) < s * m2 - curve.spline(m2):
            lo = m1
        else:
            hi = m2
    t_star = 0.5 * (lo + hi)
    val = float(s * t_star - curve.spline(t_star))
    if val < -1e-10:
        raise ConfigError(f"negative rate value {val:.3e}; curve not convex?")
    return max(val, 0.0), t_star


def rate_function(curve: FreeEnergyCurve, n_s: Optional[int] = None) -> RateFunction:
    """Legendre transform of the free-energy curve on [E'(-t0), E'(t0)]."""
    if not curve.convex:
        raise ConfigError("free-energy curve is not convex; no rate function")
    s_lo, s_hi = curve.domain
    m = float(curve.eprime(0.0))
    if s_hi - s_lo < 1e-12:
        # affine curve: the transform degenerates to a single point
        return RateFunction(s_grid=np.array([m]), values=np.array([0.0]),
                            argmin=m, t0=curve.t0, curve=curve)
    n_s = n_s or len(curve.t_grid)
    s_grid = np.linspace(s_lo, s_hi, n_s)
    values = np.array([legendre_sup(curve, float(s))[0] for s in s_grid])
    return RateFunction(s_grid=s_grid, values=values, argmin=m, t0=curve.t0,
                        curve=curve)


# ---------------------------------------------------------------------------
# Monte-Carlo local large deviations
# ---------------------------------------------------------------------------

@dataclass
class DeviationExperiment:
    interval: tuple
    n_list: tuple
    n_samples: int
    seed: int
    hits: dict                    # n -> hit count
    rates: dict                   # n -> (1/n) log(hit fraction), -inf on zero hits
    ci95: dict                    # n -> batch-mean half width (nan if undefined)
    predicted: float              # -inf_{[a,b]} I
    n_batches: int
    notes: tuple = ()


def ldp_monte_carlo(branch_map: BranchMap, pot: Potential, psi,
                    interval, n_list: Sequence[int], n_samples: int, seed: int,
                    rate: RateFunction,
                    disc: Discretization = Discretization(),
                    triple: Optional[SpectralTriple] = None,
                    n_batches: int = 20) -> DeviationExperiment:
    """Empirical deviation rates of Birkhoff averages against -inf I.

    Initial points are drawn from the discretized equilibrium density by
    inverse CDF; orbits are iterated with exact map evaluation.  The RNG
    is counter-based (Philox) keyed by the recorded seed.
    """
    a, b = float(interval[0]), float(interval[1])
    if a >= b:
        raise ConfigError(f"empty interval [{a}, {b}]")
    lo, hi = rate.s_grid[0], rate.s_grid[-1]
    if a < lo - 1e-12 or b > hi + 1e-12:
        raise ConfigError(
            f"interval [{a}, {b}] not inside the rate domain [{lo:.6f}, {hi:.6f}]")
    predicted = -rate.infimum(a, b)

    if triple is None:
        triple = _triple_at(branch_map, pot, disc)
    mu = triple.mu_weights
    n_cells = triple.op.grid.n_cells

    # inverse-CDF draw from the piecewise-constant equilibrium density
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random(n_samples)
    cum = np.concatenate(([0.0], np.cumsum(mu)))
    cum[-1] = 1.0
    cells = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, n_cells - 1)
    frac = (u - cum[cells]) / np.maximum(mu[cells], 1e-300)
    x = (cells + np.clip(frac, 0.0, 1.0)) / n_cells

    n_sorted = sorted(set(int(n) for n in n_list))
    if n_sorted[0] < 1:
        raise ConfigError("n_list entries must be >= 1")
    batch = n_samples // n_batches
    if batch < 1:
        raise ConfigError("fewer samples than batches")

    s = np.zeros(n_samples)
    step = 0
    hits, rates, ci95 = {}, {}, {}
    notes = []
    for n in n_sorted:
        while step < n:
            s += psi(x)
            x = branch_map(x)
            step += 1
        mask = ((s / n) >= a) & ((s / n) <= b)
        total = int(np.count_nonzero(mask))
        hits[n] = total
        if total == 0:
            rates[n] = -np.inf
            ci95[n] = np.nan
            notes.append(f"n={n}: -inf (0 hits / {n_samples})")
            continue
        rates[n] = math.log(total / n_samples) / n
        counts = np.array([
            np.count_nonzero(mask[i * batch:(i + 1) * batch])
            for i in range(n_batches)])
        good = counts > 0
        if np.count_nonzero(good) >= 2:
            r_b = np.log(counts[good] / batch) / n
            ci95[n] = float(1.96 * np.std(r_b, ddof=1)
                            / math.sqrt(np.count_nonzero(good)))
            if not np.all(good):
                notes.append(f"n={n}: {np.count_nonzero(~good)} empty batches "
                             "excluded from the CI")
        else:
            ci95[n] = np.nan
            notes.append(f"n={n}: too few nonempty batches for a CI")
    return DeviationExperiment(interval=(a, b), n_list=tuple(n_sorted),
                               n_samples=n_samples, seed=seed, hits=hits,
                               rates=rates, ci95=ci95, predicted=predicted,
                               n_batches=n_batches, notes=tuple(notes))


# ---------------------------------------------------------------------------
# Rate-function continuity scan
# ---------------------------------------------------------------------------

@dataclass
class RateScan:
    v_grid: np.ndarray
    s_grid: np.ndarray
    table: np.ndarray             # I[f_v](s), shape (len(v), len(s))
    modulus: float                # max over adjacent rows of sup_s |delta I|


def rate_continuity_scan(family: ParamFamily, phi: Potential, psi: Potential,
                         s_grid, v_grid,
                         disc: Discretization = Discretization(),
                         t0: Optional[float] = None, n_t: int = 21,
                         hyp_aux: Optional[HypothesisAux] = None) -> RateScan:
    """Table of rate functions I_{f_v}(s) over a map family.

    Every f_v must admit the requested s values inside its own rate
    domain; the common interval is intersected and an empty intersection
    is an error.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    v_grid = np.asarray(v_grid, dtype=float)
    curves = []
    j_lo, j_hi = -np.inf, np.inf
    for v in v_grid:
        curve = free_energy(family.at(float(v)), phi, psi, t0=t0, n_t=n_t,
                            disc=disc, hyp_aux=hyp_aux)
        lo, hi = curve.domain
        j_lo, j_hi = max(j_lo, lo), min(j_hi, hi)
        curves.append(curve)
    if j_lo > j_hi:
        raise ConfigError("empty common rate-domain interval across the family")
    if np.min(s_grid) < j_lo - 1e-12 or np.max(s_grid) > j_hi + 1e-12:
        raise ConfigError(
            f"s_grid not inside the common interval [{j_lo:.6f}, {j_hi:.6f}]")
    table = np.array([[legendre_sup(c, float(s))[0] for s in s_grid]
                      for c in curves])
    modulus = float(np.max(np.abs(np.diff(table, axis=0)))) if len(curves) > 1 else 0.0
    return RateScan(v_grid=v_grid, s_grid=s_grid, table=table, modulus=modulus)
