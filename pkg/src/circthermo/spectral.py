"""Leading spectral data of a discretized transfer operator.

The triple (lambda, h, nu) is obtained by two-sided power iteration seeded
at the constant function and the uniform weight vector, mirroring the limit
h = lim lambda^{-n} L^n 1.  Normalization order: nu to total mass one first,
then h so that its nu-integral is one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, SchemeQualityError, SolverError
from .operator import DiscretizedOperator, GridFunction

NEGATIVE_MASS_LIMIT = 1e-8


@dataclass
class SpectralTriple:
    """Leading eigenvalue, right eigenfunction, and conformal weights."""
    lam: float
    h: GridFunction
    nu: np.ndarray
    op: DiscretizedOperator
    iterations: int
    residual_right: float
    residual_left: float
    tau: Optional[float] = None
    tau_is_upper_bound: bool = False
    clipped_nu_mass: float = 0.0

    @property
    def eigenvalue(self):
        return self.lam

    def integrate_nu(self, values):
        """nu-integral of nodal values (node-weight quadrature)."""
        return np.asarray(values) @ self.nu

    @property
    def mu_weights(self):
        """Equilibrium weights h_i nu_i, renormalized to total mass one."""
        w = self.h.values * self.nu
        return w / w.sum()

    def integrate_mu(self, values):
        return np.asarray(values) @ self.mu_weights

    def project_zero_mean(self, values):
        """Spectral projection onto E_0: g - (integral of g d nu) h."""
        values = np.asarray(values)
        return values - self.integrate_nu(values) * self.h.values

    def normalized_apply(self, values):
        return self.op.apply(values) / self.lam


def leading_triple(op: DiscretizedOperator, tol: float = 1e-12,
                   max_iter: int = 100000) -> SpectralTriple:
    """Two-sided power iteration for the dominant eigentriple.

    Convergence is declared when successive Rayleigh quotients differ by
    less than tol; failure to converge raises with the last residual.
    """
    if tol < 1e-14 and op.matrix.dtype == np.float64:
        raise ConfigError(f"tol={tol} below float64 attainable accuracy")
    mat = op.matrix
    n = mat.shape[0]
    dtype = mat.dtype
    v = np.ones(n, dtype=dtype)
    w = np.full(n, 1.0 / n, dtype=dtype)
    resid_floor = 50.0 * n * float(np.finfo(dtype).eps)
    rtol = max(tol, resid_floor)
    lam_prev = None
    lam = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        mv = mat @ v
        wm = w @ mat
        lam = (w @ mv) / (w @ v)          # scalar in the working dtype
        # eigenvector residuals of the *previous* iterates come for free
        rr = float(np.max(np.abs(mv - lam * v)) / abs(lam))
        rl = float(np.sum(np.abs(wm - lam * w)) / (abs(lam) * np.sum(np.abs(w))))
        v = mv / lam
        wsum = wm.sum()
        if wsum == 0:
            raise SolverError("left power iteration collapsed to zero")
        w = wm / wsum
        if (lam_prev is not None
                and abs(float(lam) - lam_prev) < tol * max(1.0, abs(float(lam)))
                and rr < rtol and rl < rtol):
            break
        lam_prev = float(lam)
    else:
        resid = float(np.max(np.abs(mat @ v - lam * v)) / abs(lam))
        raise SolverError(
            f"no eigenvalue convergence in {max_iter} iterations; "
            f"last residual {resid:.3e} (gapless or mis-assembled operator?)")

    nu = np.asarray(w, dtype=dtype).copy()
    if nu.sum() < 0:
        nu = -nu
    neg = nu < 0
    clipped = float(-nu[neg].sum()) if np.any(neg) else 0.0
    if clipped > NEGATIVE_MASS_LIMIT:
        raise SchemeQualityError(
            f"conformal weights carry negative mass {clipped:.3e} > "
            f"{NEGATIVE_MASS_LIMIT}; discretization untrustworthy")
    if clipped > 0.0:
        nu = np.where(neg, 0.0, nu)
    nu = nu / nu.sum()

    hv = np.asarray(v, dtype=dtype)
    if hv @ nu < 0:
        hv = -hv
    hv = hv / (hv @ nu)
    if np.any(hv <= 0):
        raise SchemeQualityError(
            "eigenfunction is not positive at all nodes; "
            "refine the grid or switch scheme")

    h = op.grid_function(hv)
    resid_right = float(np.max(np.abs(mat @ hv - lam * hv)) / abs(lam))
    resid_left = float(np.sum(np.abs(nu @ mat - lam * nu)) / abs(lam))
    return SpectralTriple(lam=lam, h=h, nu=nu, op=op, iterations=iterations,
                          residual_right=resid_right, residual_left=resid_left,
                          clipped_nu_mass=clipped)


def gap_estimate(op: DiscretizedOperator, triple: SpectralTriple,
                 n_iter: int = 400, seed: int = 20250408) -> float:
    """Estimate tau = |lambda_2| / lambda_1 by deflated power iteration.

    The leading pair is removed by the rank-one deflation
    B = M - lambda h nu^T; the modulus of the next eigenvalue is read off
    the geometric growth rate of ||B^k v|| (robust to complex pairs).
    Stores the estimate on the triple and returns it.
    """
    mat = np.asarray(op.matrix, dtype=float)
    hv = np.asarray(triple.h.values, dtype=float)
    nu = np.asarray(triple.nu, dtype=float)
    lam = float(triple.lam)
    deflated = mat - lam * np.outer(hv, nu / (hv @ nu))
    rng = np.random.Generator(np.random.Philox(key=seed))
    v = rng.standard_normal(mat.shape[0])
    v = v - (nu @ v) * hv
    norm = np.linalg.norm(v)
    if norm == 0:
        v = rng.standard_normal(mat.shape[0])
        norm = np.linalg.norm(v)
    v /= norm
    logs = []
    floor = 1e-14 * abs(lam)
    collapsed = None
    for _ in range(n_iter):
        v = deflated @ v
        v = v - (nu @ v) * hv        # keep roundoff out of the leading direction
        r = np.linalg.norm(v)
        if r < floor:
            collapsed = r
            break
        logs.append(np.log(r))
        v /= r
    if collapsed is not None and not logs:
        tau = collapsed / abs(lam)
    elif collapsed is not None:
        tau = min(np.exp(logs[-1]), collapsed) / abs(lam)
    else:
        half = len(logs) // 2
        tau = float(np.exp(np.mean(logs[half:]))) / abs(lam)
    if not np.isfinite(tau) or tau >= 1.0:
        triple.tau = 1.0
        triple.tau_is_upper_bound = True
        return 1.0
    tau = max(tau, 0.0)
    triple.tau = tau
    triple.tau_is_upper_bound = False
    return tau


def resolvent_solve(triple: SpectralTriple, v, method: str = "auto",
                    tol: float = 1e-12):
    """Solve (I - Ltilde) u = v on the zero-mean subspace, with zero-mean u.

    `neumann` sums Ltilde^k v until the sup norm of the term drops below
    tol * (1 - tau); `direct` solves the dense system with the leading
    direction pinned.  Both return nodal values in the dtype of v.
    """
    vin = v.values if isinstance(v, GridFunction) else np.asarray(v)
    mean = float(triple.integrate_nu(vin))
    if abs(mean) > 1e-10 * max(1.0, float(np.max(np.abs(vin)))):
        raise ConfigError(f"resolvent input has nonzero nu-mean {mean:.3e}")
    tau = triple.tau
    if tau is None:
        tau = gap_estimate(triple.op, triple)
    if tau >= 1.0 - 1e-6:
        raise SolverError(
            f"spectral gap estimate tau={tau:.6f} too close to 1; "
            "resolvent series not summable")

    dtype = triple.op.matrix.dtype
    rhs = triple.project_zero_mean(np.asarray(vin, dtype=dtype))
    if method == "auto":
        method = "direct" if dtype == np.float64 else "neumann"
    if method == "direct":
        mat = triple.op.matrix
        hv = triple.h.values
        aug = np.eye(len(rhs)) - mat / triple.lam + np.outer(hv, triple.nu)
        u = np.linalg.solve(aug, rhs)
    elif method == "neumann":
        lam_t = np.asarray(triple.lam, dtype=dtype)
        term = rhs.copy()
        u = np.zeros_like(rhs)
        limit = tol * (1.0 - tau) * max(1.0, float(np.max(np.abs(rhs))))
        max_terms = 200 + (int(8 * np.log(max(tol, 1e-30)) / np.log(tau)) if tau > 0 else 0)
        for _ in range(max(max_terms, 50)):
            u += term
            if float(np.max(np.abs(term))) < limit:
                break
            term = triple.project_zero_mean(triple.op.apply(term) / lam_t)
        else:
            raise SolverError("Neumann resolvent series did not reach tolerance")
    else:
        raise ConfigError(f"unknown resolvent method {method!r}")
    u = u - triple.integrate_nu(u) * triple.h.values
    if isinstance(v, GridFunction):
        return v.copy_with(u)
    return u
