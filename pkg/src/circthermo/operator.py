"""Pointwise transfer-operator application and finite-rank discretizations.

The transfer operator weighted by a potential phi acts on observables as

    (L g)(x) = sum over preimages y of x of  e^{phi(y)} g(y).

Two discretizations are provided on a uniform circle grid: collocation
(evaluate at nodes through exact preimages and an interpolation stencil,
fast on smooth data) and a weighted Ulam scheme (cell-transfer Galerkin
projection, positivity preserving) used as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, ResourceLimitError
from .maps import BranchMap, Potential, wrap

TREE_LEAF_GUARD = 2 ** 24


@dataclass(frozen=True)
class Grid:
    """N equispaced nodes x_i = i/N with cells [x_i, x_{i+1})."""
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 2:
            raise ConfigError(f"grid needs at least 2 cells, got {self.n_cells}")

    @property
    def nodes(self):
        return np.arange(self.n_cells) / self.n_cells

    @property
    def cell_width(self):
        return 1.0 / self.n_cells


@dataclass(frozen=True)
class Discretization:
    """Settings bundle: grid size, scheme, and interpolation rule."""
    n: int = 512
    scheme: str = "collocation"
    interpolation: str = "linear"

    def __post_init__(self):
        if self.n < 8:
            raise ConfigError(f"discretization.N must be >= 8, got {self.n}")
        if self.scheme not in ("collocation", "ulam"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.interpolation not in ("linear", "fourier"):
            raise ConfigError(f"unknown interpolation {self.interpolation!r}")


def trig_interp_matrix(points, n, dtype=np.float64):
    """Rows of trigonometric cardinal functions on the n-point uniform grid.

    Row p evaluates the trigonometric interpolant (with the cosine
    convention for the Nyquist mode when n is even) of nodal data at
    points[p]; exact at the nodes.  Barycentric form, O(P*n).
    """
    pts = np.asarray(points, dtype=dtype).ravel()
    xk = np.arange(n, dtype=dtype) / np.asarray(n, dtype=dtype)
    w = np.where(np.arange(n) % 2 == 0, 1.0, -1.0).astype(dtype)
    d = np.pi * (pts[:, None] - xk[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = 1.0 / np.tan(d) if n % 2 == 0 else 1.0 / np.sin(d)
    num = kern * w
    denom = num.sum(axis=1)
    with np.errstate(invalid="ignore"):
        t = num / denom[:, None]
    bad = ~np.all(np.isfinite(t), axis=1)
    if np.any(bad):
        # point coincides with a node: exact one-hot row
        for p in np.nonzero(bad)[0]:
            t[p] = 0.0
            t[p, int(np.argmin(np.abs(d[p])))] = 1.0
    return t


class GridFunction:
    """Observable sampled at grid nodes with a named interpolation rule."""

    def __init__(self, grid: Grid, values, interpolation="linear"):
        values = np.asarray(values)
        if values.shape != (grid.n_cells,):
            raise ConfigError(
                f"values shape {values.shape} does not match grid of {grid.n_cells}")
        self.grid = grid
        self.values = values
        self.interpolation = interpolation

    @classmethod
    def from_callable(cls, grid, fn, interpolation="linear", dtype=float):
        return cls(grid, np.asarray(fn(grid.nodes), dtype=dtype), interpolation)

    def __call__(self, x):
        x = wrap(np.asarray(x, dtype=self.values.dtype))
        n = self.grid.n_cells
        if self.interpolation == "linear":
            pos = x * n
            idx = np.floor(pos).astype(int) % n
            frac = pos - np.floor(pos)
            return self.values[idx] * (1.0 - frac) + self.values[(idx + 1) % n] * frac
        flat = np.atleast_1d(x).ravel()
        out = trig_interp_matrix(flat, n, dtype=self.values.dtype) @ self.values
        return out.reshape(x.shape) if x.shape else out[0]

    def derivative(self):
        """Nodewise derivative: spectral for fourier, centered differences else."""
        n = self.grid.n_cells
        v = self.values
        if self.interpolation == "fourier":
            coeffs = np.fft.fft(np.asarray(v, dtype=float))
            k = np.fft.fftfreq(n, d=1.0 / n)
            if n % 2 == 0:
                k[n // 2] = 0.0  # cosine Nyquist mode has zero derivative at nodes
            dv = np.real(np.fft.ifft(coeffs * 2j * np.pi * k))
        else:
            dv = (np.roll(v, -1) - np.roll(v, 1)) * (n / 2.0)
        return GridFunction(self.grid, np.asarray(dv, dtype=v.dtype), self.interpolation)

    def copy_with(self, values):
        return GridFunction(self.grid, values, self.interpolation)


@dataclass
class DiscretizedOperator:
    """Dense matrix approximation of the transfer operator on a grid."""
    matrix: np.ndarray
    grid: Grid
    scheme: str
    interpolation: Optional[str]
    branch_map: BranchMap
    potential: Potential
    dropped_entries: int = 0
    preimage_table: Optional[np.ndarray] = None  # (d, N) node preimages (collocation)

    def apply(self, values):
        return self.matrix @ np.asarray(values)

    def grid_function(self, values):
        interp = self.interpolation or "linear"
        return GridFunction(self.grid, np.asarray(values), interp)

    def row_sums(self):
        return self.matrix.sum(axis=1)

    def export_csv(self, path):
        """Dense text dump with a header naming scheme, N, and the map tag."""
        n = self.grid.n_cells
        header = (f"# circthermo operator scheme={self.scheme} N={n} "
                  f"map={self.branch_map.family_tag} "
                  f"interpolation={self.interpolation or 'cell'} "
                  f"potential={self.potential.describe()}")
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for row in np.asarray(self.matrix, dtype=float):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


# ---------------------------------------------------------------------------
# Pointwise application
# ---------------------------------------------------------------------------

def apply_transfer_point(branch_map: BranchMap, pot: Potential, g, x):
    """(L g)(x) evaluated through exact preimages; g is any callable."""
    x = np.asarray(x, dtype=float)
    ys = branch_map.preimages(x)
    total = np.sum(np.exp(pot(ys)) * np.asarray(g(ys)), axis=0)
    return float(total) if total.ndim == 0 else total


def apply_transfer_tree(branch_map: BranchMap, pot: Potential, g, x, depth: int):
    """(L^n g)(x) summed over the full d^n-leaf preimage tree.

    No discretization is involved: Birkhoff weights accumulate along the
    tree and g is evaluated at the leaves.
    """
    if depth < 1:
        raise ConfigError(f"tree depth must be >= 1, got {depth}")
    leaves = branch_map.degree ** depth
    if leaves > TREE_LEAF_GUARD:
        raise ResourceLimitError(
            f"preimage tree would have {leaves} leaves (> {TREE_LEAF_GUARD})")
    ys = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.asarray(x).ndim == 0
    log_w = np.zeros_like(ys)
    for _ in range(depth):
        level = branch_map.preimages(ys)          # (d, m)
        log_w = (log_w[None, :] + pot(level)).ravel()
        ys = level.ravel()
    total = np.exp(log_w) * np.asarray(g(ys))
    if scalar:
        return float(np.sum(total))
    return np.sum(total.reshape(-1, len(np.atleast_1d(x))), axis=0)


# ---------------------------------------------------------------------------
# Discretizations
# ---------------------------------------------------------------------------

def build_operator(branch_map: BranchMap, pot: Potential, grid: Grid,
                   scheme: str = "collocation", interpolation: str = "linear",
                   dtype=np.float64) -> DiscretizedOperator:
    """Assemble the dense N x N transfer matrix for the requested scheme.

    Production grids come through Discretization (N >= 8); tiny grids are
    accepted here for hand-checkable assembly.
    """
    if scheme == "collocation":
        return _build_collocation(branch_map, pot, grid, interpolation, dtype)
    if scheme == "ulam":
        return _build_ulam(branch_map, pot, grid)
    raise ConfigError(f"unknown scheme {scheme!r}")


def discretize(branch_map, pot, disc: Discretization, dtype=np.float64):
    return build_operator(branch_map, pot, Grid(disc.n), disc.scheme,
                          disc.interpolation, dtype=dtype)


def _build_collocation(branch_map, pot, grid, interpolation, dtype):
    n = grid.n_cells
    d = branch_map.degree
    nodes = np.asarray(grid.nodes, dtype=dtype)
    ys = np.asarray(branch_map.preimages(nodes), dtype=dtype)   # (d, N)
    # polish preimages in the working dtype (Newton reaches its eps quickly)
    f0 = np.asarray(branch_map.lift(np.zeros(1, dtype=dtype)))[0]
    targets = nodes[None, :] + np.ceil(f0 - nodes)[None, :] + \
        np.arange(d, dtype=dtype)[:, None]
    for _ in range(3):
        resid = np.asarray(branch_map.lift(ys)) - targets
        ys = np.clip(ys - resid / np.asarray(branch_map.dlift(ys)), 0.0, 1.0)
    weights = np.exp(np.asarray(pot(ys), dtype=dtype))          # (d, N)

    mat = np.zeros((n, n), dtype=dtype)
    if interpolation == "linear":
        pos = ys * n
        idx = np.floor(pos).astype(int) % n
        frac = pos - np.floor(pos)
        rows = np.broadcast_to(np.arange(n), (d, n))
        np.add.at(mat, (rows, idx), weights * (1.0 - frac))
        np.add.at(mat, (rows, (idx + 1) % n), weights * frac)
    elif interpolation == "fourier":
        cards = trig_interp_matrix(ys.ravel(), n, dtype=dtype).reshape(d, n, n)
        mat = np.einsum("kn,knm->nm", weights, cards)
    else:
        raise ConfigError(f"unknown interpolation {interpolation!r}")
    return DiscretizedOperator(mat, grid, "collocation", interpolation,
                               branch_map, pot, preimage_table=ys)


def _build_ulam(branch_map, pot, grid):
    """Weighted cell-transfer (Galerkin) projection of the operator.

    Entry (i, j) integrates L applied to the indicator of cell j over
    cell i, evaluated by midpoint rule on each preimage arc:
    e^{phi(y*)} f'(y*) |arc| / |cell|.  All entries are nonnegative.
    """
    n = grid.n_cells
    d = branch_map.degree
    c0 = branch_map._lift0
    mat = np.zeros((n, n))
    dropped = 0
    x_left = grid.nodes
    x_right = np.append(x_left[1:], 1.0)
    m_base = np.ceil(c0 - x_right)
    for r in range(d + 1):
        m = m_base + r
        u_lo = np.clip(x_left + m, c0, c0 + d)
        u_hi = np.clip(x_right + m, c0, c0 + d)
        keep = u_hi - u_lo > 0.0
        if not np.any(keep):
            continue
        y_lo = branch_map._invert_lift(u_lo[keep])
        y_hi = branch_map._invert_lift(u_hi[keep])
        for i, p, q in zip(np.nonzero(keep)[0], y_lo, y_hi):
            j = int(math.floor(p * n))
            while j / n < q:
                lo = max(p, j / n)
                hi = min(q, (j + 1) / n)
                width = hi - lo
                if width >= 1e-14:
                    ystar = 0.5 * (lo + hi)
                    wgt = math.exp(float(pot(np.array([ystar]))[0]))
                    fp = float(branch_map.dlift(np.array([ystar]))[0])
                    mat[i, j % n] += wgt * fp * width * n
                elif width > 0.0:
                    dropped += 1
                j += 1
    return DiscretizedOperator(mat, grid, "ulam", None, branch_map, pot,
                               dropped_entries=dropped)
