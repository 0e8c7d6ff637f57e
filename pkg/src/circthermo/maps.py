"""Circle map families, potentials on the circle, and standing-hypothesis checks.

The circle is modelled as R/Z with fundamental domain [0, 1).  A degree-d
covering map is stored through its monotone lift F: [0, 1] -> R with
F(1) = F(0) + d; branch k is the restriction of F to [b_k, b_{k+1}] where
F(b_k) = F(0) + k, so every circle point has exactly one preimage per branch
and the branches are indexed in circle order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, SmoothnessError, SolverError

CIRCLE_DIAMETER = 0.5

# Root-finder budget: bisection to this bracket width, then Newton to the
# residual target, with a global iteration cap.
_BISECT_WIDTH = 1e-6
_NEWTON_RESIDUAL = 1e-12
_MAX_ITER = 100


def wrap(x):
    """Reduce to the fundamental domain [0, 1)."""
    return np.mod(x, 1.0)


def circle_distance(x, y):
    """d(x, y) = min(|x - y|, 1 - |x - y|) on R/Z."""
    d = np.abs(wrap(x) - wrap(y))
    return np.minimum(d, 1.0 - d)


class BranchMap:
    """A degree-d circle covering map given by a monotone smooth lift.

    Parameters
    ----------
    degree:
        Number of monotone branches d >= 2.
    lift, dlift, d2lift:
        Vectorized callables for F, F' and F'' on [0, 1].
    family_tag, family_params:
        Identification of the builtin family, echoed into reports.
    default_region, default_q:
        Suggested non-expanding region A (list of (start, end) arcs) and
        covering count q for the hypothesis checker.
    """

    def __init__(self, degree, lift, dlift, d2lift=None, *, family_tag="custom",
                 family_params=None, default_region=(), default_q=0,
                 holder_exponent=1.0, param_derivative=None):
        if degree < 2 or int(degree) != degree:
            raise ConfigError(f"degree must be an integer >= 2, got {degree}")
        self.degree = int(degree)
        self.lift = lift
        self.dlift = dlift
        self.d2lift = d2lift
        self.family_tag = family_tag
        self.family_params = dict(family_params or {})
        self.default_region = tuple(tuple(a) for a in default_region)
        self.default_q = int(default_q)
        self.holder_exponent = float(holder_exponent)
        self.param_derivative = param_derivative

        self._lift0 = float(np.asarray(lift(np.array([0.0])))[0])
        lift1 = float(np.asarray(lift(np.array([1.0])))[0])
        if abs(lift1 - self._lift0 - self.degree) > 1e-9:
            raise ConfigError(
                f"lift must increase by degree over [0, 1]: "
                f"F(1)-F(0) = {lift1 - self._lift0}, degree = {self.degree}")
        probe = np.linspace(0.0, 1.0, 4097)
        dp = np.asarray(dlift(probe), dtype=float)
        if not np.all(dp > 0.0):
            k = int(np.argmin(dp))
            raise ConfigError(
                f"non-monotone branch detected: F'({probe[k]:.6f}) = {dp[k]:.3e}")
        self.branch_bounds = self._compute_branch_bounds()

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        return wrap(self.lift(np.asarray(x)))

    def derivative(self, x):
        return self.dlift(np.asarray(x))

    def second_derivative(self, x):
        if self.d2lift is None:
            raise SmoothnessError(f"map {self.family_tag!r} has no second derivative")
        return self.d2lift(np.asarray(x))

    # -- inverse branches ---------------------------------------------------

    def _invert_lift(self, targets):
        """Solve F(y) = u for each u in `targets`, u in [F(0), F(0)+d].

        Bracketed bisection to width 1e-6, then Newton polished to residual
        1e-12; monotonicity of the lift makes the bracket safe.
        """
        u = np.asarray(targets, dtype=float)
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        n_bisect = max(1, int(math.ceil(math.log2(1.0 / _BISECT_WIDTH))))
        iters = 0
        for _ in range(n_bisect):
            mid = 0.5 * (lo + hi)
            high = np.asarray(self.lift(mid)) > u
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
            iters += 1
        y = 0.5 * (lo + hi)
        resid = np.asarray(self.lift(y)) - u
        while np.max(np.abs(resid)) > _NEWTON_RESIDUAL:
            if iters >= _MAX_ITER:
                k = int(np.argmax(np.abs(resid)))
                branch = int(np.floor(u.ravel()[k] - self._lift0)) if u.ndim else 0
                raise SolverError(
                    f"inverse-branch root find failed on branch {branch}: "
                    f"residual {np.max(np.abs(resid)):.3e} after {iters} iterations")
            step = resid / np.asarray(self.dlift(y))
            y = np.clip(y - step, lo, hi)
            resid = np.asarray(self.lift(y)) - u
            iters += 1
        return y

    def _compute_branch_bounds(self):
        ks = np.arange(1, self.degree)
        interior = self._invert_lift(self._lift0 + ks.astype(float))
        return np.concatenate(([0.0], interior, [1.0]))

    def preimages(self, x):
        """All d preimages of x, sorted by branch index.

        Returns an array of shape (d, *shape(x)); row k lies in branch k's
        domain [b_k, b_{k+1}).  Endpoint ties go to the lower-indexed branch
        because each branch solves a distinct lift equation.
        """
        x = wrap(np.asarray(x, dtype=float))
        shift = np.ceil(self._lift0 - x)
        j = np.arange(self.degree, dtype=float).reshape((self.degree,) + (1,) * x.ndim)
        targets = x + shift + j
        return self._invert_lift(targets)

    def inverse_derivative(self, y):
        """Derivative of the inverse branch through y, i.e. 1 / F'(y)."""
        return 1.0 / np.asarray(self.dlift(np.asarray(y)))


def preimages(branch_map: BranchMap, x):
    """Functional alias for :meth:`BranchMap.preimages`."""
    return branch_map.preimages(x)


# ---------------------------------------------------------------------------
# Builtin families
# ---------------------------------------------------------------------------

def linear_map(degree: int) -> BranchMap:
    """x -> degree * x (mod 1)."""
    d = float(degree)
    return BranchMap(
        degree,
        lambda x: d * np.asarray(x, dtype=float),
        lambda x: np.full_like(np.asarray(x, dtype=float), d),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        family_tag=f"linear-{degree}",
        family_params={"degree": degree},
    )


def doubling() -> BranchMap:
    """The doubling map x -> 2x (mod 1)."""
    m = linear_map(2)
    m.family_tag = "doubling"
    return m


def manneville_pomeau(alpha: float) -> BranchMap:
    """Intermittent map with indifferent fixed point at 0.

    Lift: x (1 + 2^alpha x^alpha) on [0, 1/2], 2x on (1/2, 1]; continuous,
    degree 2, F'(0) = 1.  For alpha < 1 the second derivative blows up at 0.
    """
    if alpha <= 0:
        raise ConfigError(f"manneville-pomeau alpha must be > 0, got {alpha}")
    a = float(alpha)
    c = 2.0 ** a

    def lift(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0.5, x * (1.0 + c * np.power(x, a)), 2.0 * x)

    def dlift(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0.5, 1.0 + c * (1.0 + a) * np.power(x, a), 2.0)

    def d2lift(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            left = c * (1.0 + a) * a * np.power(x, a - 1.0)
        return np.where(x <= 0.5, left, 0.0)

    return BranchMap(
        2, lift, dlift, d2lift,
        family_tag="manneville-pomeau",
        family_params={"alpha": alpha},
        default_region=((0.0, 0.05),),
        default_q=1,
        holder_exponent=min(1.0, a),
    )


def _pitchfork_bump(x):
    # sin^4 localized in the branch domain [0, 1/2]; C^2 across both endpoints.
    x = np.asarray(x, dtype=float)
    s = np.sin(2.0 * np.pi * x)
    return np.where(x <= 0.5, 0.25 * s ** 4, 0.0)


def _pitchfork_bump_d1(x):
    x = np.asarray(x, dtype=float)
    s = np.sin(2.0 * np.pi * x)
    c = np.cos(2.0 * np.pi * x)
    return np.where(x <= 0.5, 2.0 * np.pi * s ** 3 * c, 0.0)


def _pitchfork_bump_d2(x):
    x = np.asarray(x, dtype=float)
    s = np.sin(2.0 * np.pi * x)
    c = np.cos(2.0 * np.pi * x)
    return np.where(x <= 0.5, 4.0 * np.pi ** 2 * s ** 2 * (3.0 * c ** 2 - s ** 2), 0.0)


def perturbed_doubling(t: float) -> BranchMap:
    """Doubling map with a pitchfork-style C^2 bump in one injectivity domain.

    f_t(x) = 2x + t sin^4(2 pi x)/4 on [0, 1/2] and 2x on (1/2, 1]; the
    perturbation weakens expansion near the interior of the first branch
    while keeping the branch structure of the doubling map.
    """
    t = float(t)

    def lift(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x + t * _pitchfork_bump(x)

    def dlift(x):
        x = np.asarray(x, dtype=float)
        return 2.0 + t * _pitchfork_bump_d1(x)

    def d2lift(x):
        return t * _pitchfork_bump_d2(x)

    return BranchMap(
        2, lift, dlift, d2lift,
        family_tag="perturbed-doubling",
        family_params={"t": t},
    )


def translated_doubling(s: float) -> BranchMap:
    """f_s(x) = 2 (x + s) mod 1, a rotated conjugate of the doubling map."""
    s = float(s)
    return BranchMap(
        2,
        lambda x: 2.0 * (np.asarray(x, dtype=float) + s),
        lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        family_tag="translated-doubling",
        family_params={"s": s},
    )


@dataclass
class ParamFamily:
    """One-parameter family s -> f_s with a closed-form parameter derivative.

    `at(s)` builds the map; `direction(s)` returns the vector field
    H = d/ds f_s as a function on the circle (closed form, never numerical).
    """
    name: str
    at: Callable[[float], BranchMap]
    direction: Callable[[float], Callable]


def perturbed_doubling_family() -> ParamFamily:
    return ParamFamily(
        name="perturbed-doubling",
        at=perturbed_doubling,
        direction=lambda s0: _pitchfork_bump,
    )


def translated_doubling_family() -> ParamFamily:
    return ParamFamily(
        name="translated-doubling",
        at=translated_doubling,
        direction=lambda s0: (lambda x: np.full_like(np.asarray(x, dtype=float), 2.0)),
    )


def constant_family(branch_map: BranchMap) -> ParamFamily:
    """Family that ignores its parameter; direction field is zero."""
    return ParamFamily(
        name=f"constant({branch_map.family_tag})",
        at=lambda s: branch_map,
        direction=lambda s0: (lambda x: np.zeros_like(np.asarray(x, dtype=float))),
    )


BUILTIN_FAMILY_TAGS = (
    "doubling", "linear-d", "manneville-pomeau(alpha)",
    "perturbed-doubling(t)", "translated-doubling(s)",
)


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------

class Potential:
    """Real observable on the circle, closed under addition and scaling.

    A potential is a sum of closed-form terms (constant, trigonometric
    polynomial, c*log F' of a map, grid samples) with Holder/smoothness
    metadata taken as the minimum over its terms.
    """

    def __init__(self, terms, holder_exponent=1.0, smoothness_order=99):
        self.terms = list(terms)
        self.holder_exponent = float(holder_exponent)
        self.smoothness_order = smoothness_order

    # term encodings:
    #  ("const", c)
    #  ("trig", c0, cos_coeffs, sin_coeffs)    coefficients for k = 1..K
    #  ("logderiv", c, branch_map)
    #  ("grid", values, interpolation)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for term in self.terms:
            kind = term[0]
            if kind == "const":
                out = out + term[1]
            elif kind == "trig":
                _, c0, ac, bc = term
                out = out + c0
                for k, a in enumerate(ac, start=1):
                    if a != 0.0:
                        out = out + a * np.cos(2.0 * np.pi * k * x)
                for k, b in enumerate(bc, start=1):
                    if b != 0.0:
                        out = out + b * np.sin(2.0 * np.pi * k * x)
            elif kind == "logderiv":
                _, c, bmap = term
                out = out + c * np.log(bmap.dlift(wrap(x)))
            elif kind == "grid":
                _, values, interpolation = term
                out = out + _interp_circle(values, wrap(x), interpolation)
            else:
                raise ConfigError(f"unknown potential term {kind!r}")
        return out

    def derivative(self, x):
        if self.smoothness_order < 1:
            raise SmoothnessError(
                "potential has smoothness order "
                f"{self.smoothness_order}; derivative not available")
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for term in self.terms:
            kind = term[0]
            if kind == "const":
                continue
            if kind == "trig":
                _, c0, ac, bc = term
                for k, a in enumerate(ac, start=1):
                    if a != 0.0:
                        out = out - a * 2.0 * np.pi * k * np.sin(2.0 * np.pi * k * x)
                for k, b in enumerate(bc, start=1):
                    if b != 0.0:
                        out = out + b * 2.0 * np.pi * k * np.cos(2.0 * np.pi * k * x)
            elif kind == "logderiv":
                _, c, bmap = term
                y = wrap(x)
                out = out + c * bmap.second_derivative(y) / bmap.dlift(y)
            elif kind == "grid":
                _, values, interpolation = term
                out = out + _interp_circle_derivative(values, wrap(x), interpolation)
        return out

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = constant(float(other))
        if not isinstance(other, Potential):
            return NotImplemented
        return Potential(
            self.terms + other.terms,
            holder_exponent=min(self.holder_exponent, other.holder_exponent),
            smoothness_order=min(self.smoothness_order, other.smoothness_order),
        )

    __radd__ = __add__

    def __mul__(self, scalar):
        s = float(scalar)
        scaled = []
        for term in self.terms:
            kind = term[0]
            if kind == "const":
                scaled.append(("const", s * term[1]))
            elif kind == "trig":
                _, c0, ac, bc = term
                scaled.append(("trig", s * c0, [s * a for a in ac], [s * b for b in bc]))
            elif kind == "logderiv":
                scaled.append(("logderiv", s * term[1], term[2]))
            elif kind == "grid":
                scaled.append(("grid", s * np.asarray(term[1]), term[2]))
        return Potential(scaled, holder_exponent=self.holder_exponent,
                         smoothness_order=self.smoothness_order)

    __rmul__ = __mul__

    def oscillation(self, n_grid=8192):
        xs = np.arange(n_grid) / n_grid
        v = self(xs)
        return float(np.max(v) - np.min(v))

    def is_constant(self):
        return all(t[0] == "const" for t in self.terms)

    def is_log_derivative(self):
        nontrivial = [t for t in self.terms if not (t[0] == "const")]
        return len(nontrivial) > 0 and all(t[0] == "logderiv" for t in nontrivial)

    def describe(self):
        parts = []
        for term in self.terms:
            kind = term[0]
            if kind == "const":
                parts.append(f"const({term[1]:g})")
            elif kind == "trig":
                parts.append("trig")
            elif kind == "logderiv":
                parts.append(f"{term[1]:g}*log|f'|")
            elif kind == "grid":
                parts.append(f"grid[{len(term[1])}]")
        return "+".join(parts) if parts else "const(0)"


def _interp_circle(values, x, interpolation):
    values = np.asarray(values, dtype=float)
    n = len(values)
    if interpolation == "linear":
        pos = x * n
        idx = np.floor(pos).astype(int) % n
        frac = pos - np.floor(pos)
        return values[idx] * (1.0 - frac) + values[(idx + 1) % n] * frac
    if interpolation == "fourier":
        from .operator import trig_interp_matrix
        flat = np.atleast_1d(x).ravel()
        out = trig_interp_matrix(flat, n) @ values
        return out.reshape(np.shape(x)) if np.shape(x) else float(out[0])
    raise ConfigError(f"unknown interpolation {interpolation!r}")


def _interp_circle_derivative(values, x, interpolation):
    values = np.asarray(values, dtype=float)
    n = len(values)
    if interpolation == "fourier":
        coeffs = np.fft.fft(values)
        k = np.fft.fftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            k[n // 2] = 0.0  # derivative of the Nyquist cosine mode at nodes
        dvals = np.real(np.fft.ifft(coeffs * 2j * np.pi * k))
        return _interp_circle(dvals, x, "fourier")
    raise SmoothnessError("grid potential with linear interpolation has no derivative")


def constant(c: float, *, holder_exponent=1.0) -> Potential:
    return Potential([("const", float(c))], holder_exponent=holder_exponent)


def zero_potential() -> Potential:
    return constant(0.0)


def trig_polynomial(cos_coeffs: Sequence[float] = (), sin_coeffs: Sequence[float] = (),
                    const_term: float = 0.0) -> Potential:
    """sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x) + c, coefficients from k=1."""
    return Potential([("trig", float(const_term), [float(a) for a in cos_coeffs],
                       [float(b) for b in sin_coeffs])])


def log_derivative_weight(c: float, branch_map: BranchMap) -> Potential:
    """The geometric potential c * log F' of the given map."""
    alpha = branch_map.holder_exponent
    if branch_map.family_tag == "manneville-pomeau":
        # F'' blows up at the neutral point when alpha < 1
        a = branch_map.family_params["alpha"]
        order = 0 if a < 1 else (2 if a >= 2 else 1)
    else:
        order = 99
    return Potential([("logderiv", float(c), branch_map)],
                     holder_exponent=alpha, smoothness_order=order)


def grid_potential(values, interpolation="linear") -> Potential:
    order = 1 if interpolation == "fourier" else 0
    return Potential([("grid", np.asarray(values, dtype=float), interpolation)],
                     holder_exponent=1.0, smoothness_order=order)


# ---------------------------------------------------------------------------
# Standing hypotheses
# ---------------------------------------------------------------------------

@dataclass
class HypothesisAux:
    """Caller-supplied constants for the hypothesis checker.

    The covering constants m and delta come from an external covering
    argument and are inputs here, with documented defaults; the
    non-expanding region A and its covering count q are declared rather
    than derived.
    """
    m: Optional[int] = None
    delta: float = 0.05
    region_a: Optional[Sequence] = None
    q: Optional[int] = None
    grid_n: int = 4096

    def resolved_m(self):
        return self.m if self.m is not None else int(math.ceil(1.0 / (2.0 * self.delta)))


@dataclass
class HypothesisReport:
    """Verdicts and the explicit constants entering the smallness inequalities."""
    sigma: float
    big_l: float
    region_a: tuple
    q: int
    eps_phi: float
    vep_value: float
    vepp_value: float
    verdicts: dict
    alpha: float
    m: int
    delta: float
    deriv_sup: Optional[float] = None
    notes: tuple = ()

    def passed(self):
        """(H1) and (H2), plus smallness through either (P) or (P')."""
        smallness = self.verdicts.get("P") or self.verdicts.get("P'")
        return bool(self.verdicts.get("H1") and self.verdicts.get("H2")
                    and smallness)

    def as_dict(self):
        return {
            "sigma": self.sigma,
            "big_l": self.big_l,
            "region_a": [list(a) for a in self.region_a],
            "q": self.q,
            "eps_phi": self.eps_phi,
            "vep_value": self.vep_value,
            "vepp_value": self.vepp_value,
            "verdicts": dict(self.verdicts),
            "alpha": self.alpha,
            "m": self.m,
            "delta": self.delta,
            "deriv_sup": self.deriv_sup,
            "notes": list(self.notes),
        }


def _in_region(x, region):
    x = np.asarray(x)
    mask = np.zeros(x.shape, dtype=bool)
    for a, b in region:
        a, b = wrap(a), b  # arcs given as (start, end) with end possibly > 1 for wrap
        if b > 1.0:
            mask |= (x >= a) | (x < wrap(b))
        else:
            mask |= (x >= a) & (x <= b)
    return mask


def smallness_values(deg, q, sigma, big_l, alpha, eps, m, diam=CIRCLE_DIAMETER):
    """Left-hand sides of the two explicit smallness inequalities."""
    core = ((deg - q) * sigma ** (-alpha)
            + q * big_l ** alpha * (1.0 + max(big_l - 1.0, 0.0) ** alpha)) / deg
    vep = math.exp(eps) * core + eps * 2.0 * m * big_l ** alpha * diam ** alpha
    vepp = (1.0 + eps) * math.exp(eps) * core
    return vep, vepp


def check_hypotheses(branch_map: BranchMap, pot: Potential,
                     aux: Optional[HypothesisAux] = None) -> HypothesisReport:
    """Check (H1), (H2) and the potential smallness conditions (P)/(P').

    Expansion constants are certified on a sampling grid per branch with
    interval corrections from the second derivative; the report is a
    grid-resolution certificate, not a rigorous global bound.
    """
    aux = aux or HypothesisAux()
    region = aux.region_a
    if region is None:
        region = branch_map.default_region
    region = tuple(tuple(map(float, arc)) for arc in region)
    notes = []

    bounds = branch_map.branch_bounds
    sigma_min = np.inf
    inv_lip_max = 0.0
    region_nonempty = len(region) > 0
    for k in range(branch_map.degree):
        xs = np.linspace(bounds[k], bounds[k + 1], aux.grid_n + 1)
        fp = np.asarray(branch_map.dlift(xs), dtype=float)
        # second-derivative samples, nudged off the left endpoint where the
        # intermittent families blow up
        xs_dd = xs.copy()
        xs_dd[0] = xs[0] + (xs[1] - xs[0]) * 1e-3
        if branch_map.d2lift is not None:
            fpp = np.abs(np.asarray(branch_map.d2lift(xs_dd), dtype=float))
            fpp[~np.isfinite(fpp)] = np.nanmax(fpp[np.isfinite(fpp)]) if np.any(np.isfinite(fpp)) else 0.0
        else:
            fpp = np.zeros_like(xs)
            notes.append(f"branch {k}: no second derivative; certificate is sample-only")
        h = xs[1] - xs[0]
        m2 = np.maximum(fpp[:-1], fpp[1:])
        interval_min = np.minimum(fp[:-1], fp[1:]) - m2 * h * h / 8.0
        in_a = _in_region(xs, region)
        pair_in_a = in_a[:-1] & in_a[1:]
        pair_touch_a = in_a[:-1] | in_a[1:]
        outside = ~pair_in_a
        if np.any(outside):
            sigma_min = min(sigma_min, float(np.min(interval_min[outside])))
        if region_nonempty and np.any(pair_touch_a):
            # L(x) = 1/F'(x); certify its max over A from the interval minima of F'
            inside_min = np.maximum(interval_min[pair_touch_a], 1e-300)
            inv_lip_max = max(inv_lip_max, float(np.max(1.0 / inside_min)))

    sigma = sigma_min * (1.0 - 1e-9)
    big_l = max(inv_lip_max, 1.0)

    if aux.q is not None:
        q = int(aux.q)
    else:
        q = 0
        for k in range(branch_map.degree):
            xs = np.linspace(bounds[k], bounds[k + 1], 1025)
            if region_nonempty and np.any(_in_region(xs, region)):
                q += 1

    eps = pot.oscillation()
    m = aux.resolved_m()
    alpha = min(pot.holder_exponent, 1.0)
    vep, vepp = smallness_values(branch_map.degree, q, sigma, big_l, alpha, eps, m)

    verdicts = {
        "H1": bool(sigma > 1.0),
        "H2": bool(q < branch_map.degree),
        "P": bool(vep < 1.0 and vepp < 1.0),
    }

    # (P') for smooth potentials: rerun the inequalities with the oscillation
    # replaced by the larger of oscillation and the derivative sup norm.
    deriv_sup = None
    if pot.smoothness_order >= 1:
        xs = np.arange(8192) / 8192.0
        try:
            deriv_sup = float(np.max(np.abs(pot.derivative(xs))))
            eps_smooth = max(eps, deriv_sup)
            vep_s, vepp_s = smallness_values(
                branch_map.degree, q, sigma, big_l, alpha, eps_smooth, m)
            verdicts["P'"] = bool(vep_s < 1.0 and vepp_s < 1.0)
        except SmoothnessError:
            verdicts["P'"] = None
    else:
        verdicts["P'"] = None

    return HypothesisReport(
        sigma=float(sigma), big_l=float(big_l), region_a=region, q=q,
        eps_phi=float(eps), vep_value=float(vep), vepp_value=float(vepp),
        verdicts=verdicts, alpha=alpha, m=m, delta=aux.delta,
        deriv_sup=deriv_sup, notes=tuple(notes))
