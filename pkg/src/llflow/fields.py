"""Uniform-grid discrete calculus on a truncated plane.

Cell-centered grid on [-L, L]^2 with constant ghost values outside the
domain.  All reductions go through a fixed-order pairwise tree so results
are bit-identical across runs and worker counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve


@dataclass(frozen=True)
class Grid:
    """Cell-centered n x n grid on [-half_extent, half_extent]^2."""

    n: int
    half_extent: float

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"grid needs n >= 16, got {self.n}")
        if self.n % 2 != 0:
            raise ValueError(f"grid needs even n, got {self.n}")
        if self.half_extent <= 0:
            raise ValueError("half_extent must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.half_extent / self.n

    def axis_coords(self) -> np.ndarray:
        # site i sits at -L + (i + 1/2) h
        return -self.half_extent + (np.arange(self.n) + 0.5) * self.h

    def meshgrid(self):
        c = self.axis_coords()
        return np.meshgrid(c, c, indexing="ij")


class Field:
    """m-component real field on a Grid with a constant ghost value."""

    def __init__(self, grid: Grid, values: np.ndarray, boundary_value=None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 2:
            values = values[:, :, None]
        if values.shape[:2] != (grid.n, grid.n):
            raise ValueError(f"values shape {values.shape} does not match grid n={grid.n}")
        m = values.shape[2]
        if boundary_value is None:
            boundary_value = np.zeros(m)
        boundary_value = np.atleast_1d(np.asarray(boundary_value, dtype=float))
        if boundary_value.shape != (m,):
            raise ValueError("boundary_value must have one entry per component")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values
        self.boundary_value = boundary_value

    @property
    def m(self) -> int:
        return self.values.shape[2]

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.boundary_value.copy())

    def padded(self, width: int = 1, closure: str = "constant") -> np.ndarray:
        """Values extended by `width` rings of ghost sites.

        closure "constant": ghosts hold boundary_value (far-field constant).
        closure "extend": quadratic extrapolation from the nearest interior
        sites; avoids the O(1) kink that the constant ghost creates against
        slowly decaying map tails (exact on quadratics, so stencils keep
        their interior order at the edge).
        """
        n, m = self.grid.n, self.m
        if closure == "constant":
            out = np.empty((n + 2 * width, n + 2 * width, m))
            out[:] = self.boundary_value
            out[width:-width, width:-width, :] = self.values
            return out
        if closure != "extend":
            raise ValueError(f"unknown closure {closure!r}")
        if width != 1:
            raise ValueError("extend closure supports width 1")
        out = np.empty((n + 2, n + 2, m))
        out[1:-1, 1:-1, :] = self.values
        for axis in (0, 1):
            v = np.moveaxis(out, axis, 0)
            v[0] = 3 * v[1] - 3 * v[2] + v[3]
            v[-1] = 3 * v[-2] - 3 * v[-3] + v[-4]
        return out


def constant_field(grid: Grid, value) -> Field:
    value = np.atleast_1d(np.asarray(value, dtype=float))
    vals = np.broadcast_to(value, (grid.n, grid.n, value.shape[0])).copy()
    return Field(grid, vals, value)


def tree_sum(x: np.ndarray) -> float:
    """Fixed-order pairwise tree reduction (deterministic, order-independent
    of any worker decomposition)."""
    x = np.ascontiguousarray(x, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    size = 1 << (x.size - 1).bit_length()
    if size != x.size:
        x = np.concatenate([x, np.zeros(size - x.size)])
    while x.size > 1:
        x = x[0::2] + x[1::2]
    return float(x[0])


def laplacian(f: Field, closure: str = "constant") -> Field:
    """5-point stencil; ghost sites per the chosen closure."""
    p = f.padded(closure=closure)
    h2 = f.grid.h ** 2
    lap = (p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2]
           - 4.0 * p[1:-1, 1:-1]) / h2
    return Field(f.grid, lap, np.zeros(f.m))


def gradient(f: Field, closure: str = "constant") -> tuple[Field, Field]:
    """Central differences (d1 f, d2 f); ghost sites per the chosen closure."""
    p = f.padded(closure=closure)
    two_h = 2.0 * f.grid.h
    d1 = (p[2:, 1:-1] - p[:-2, 1:-1]) / two_h
    d2 = (p[1:-1, 2:] - p[1:-1, :-2]) / two_h
    z = np.zeros(f.m)
    return Field(f.grid, d1, z), Field(f.grid, d2, z)


def forward_gradient(f: Field) -> tuple[Field, Field]:
    """One-sided forward differences with constant-ghost closure."""
    p = f.padded()
    h = f.grid.h
    d1 = (p[2:, 1:-1] - p[1:-1, 1:-1]) / h
    d2 = (p[1:-1, 2:] - p[1:-1, 1:-1]) / h
    z = np.zeros(f.m)
    return Field(f.grid, d1, z), Field(f.grid, d2, z)


def dirichlet_form(f: Field, w: Field) -> float:
    """Edge sum h^2 * sum over lattice edges of D+f D+w (ghost edges
    included, constant-ghost closure).

    This is the bilinear form the 5-point laplacian sums by parts against
    exactly: h^2 sum_i f_i (lap w)_i = -dirichlet_form(f, w) whenever the
    test factor f has zero boundary constant.
    """
    if f.m != w.m:
        raise ValueError("fields must have matching components")
    pf = f.padded()
    pw = w.padded()
    total = 0.0
    for p, q in (((pf[1:, 1:-1] - pf[:-1, 1:-1]), (pw[1:, 1:-1] - pw[:-1, 1:-1])),
                 ((pf[1:-1, 1:] - pf[1:-1, :-1]), (pw[1:-1, 1:] - pw[1:-1, :-1]))):
        total += tree_sum(p * q)
    return total  # the two 1/h factors cancel the h^2 site weight


def integrate(f: Field) -> float:
    """Midpoint-rule integral of a scalar field."""
    if f.m != 1:
        raise ValueError("integrate expects a scalar field")
    return f.grid.h ** 2 * tree_sum(f.values)


def edge_energy(u: Field) -> float:
    """Dirichlet energy as half the edge sum of squared forward differences
    (constant-ghost closure).

    This is the quadratic form whose gradient is exactly the 5-point
    laplacian, so it is the Lyapunov function of the constant-closure flow
    and the energy whose dissipation ledger closes to time-integration
    accuracy.
    """
    return 0.5 * dirichlet_form(u, u)


def energy_density(u: Field, closure: str = "extend") -> Field:
    """Pointwise (1/2)|grad u|^2 with central differences.

    Defaults to the extension closure: energy is a statement about the map
    itself, and differencing against the far-field constant would charge the
    truncated tail of a slowly decaying map to the outermost site ring.
    """
    d1, d2 = gradient(u, closure=closure)
    dens = 0.5 * (np.sum(d1.values ** 2, axis=2) + np.sum(d2.values ** 2, axis=2))
    return Field(u.grid, dens, 0.0)


def energy(u: Field) -> float:
    """Dirichlet energy E(u) = (1/2) int |grad u|^2."""
    return integrate(energy_density(u))


def _ball_mask(grid: Grid, center, radius: float) -> np.ndarray:
    x, y = grid.meshgrid()
    cx, cy = float(center[0]), float(center[1])
    return (x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2


def local_energy(u: Field, center, radius: float) -> float:
    """Energy restricted to the ball of given radius around center."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    dens = energy_density(u)
    mask = _ball_mask(u.grid, center, radius)
    vals = np.where(mask, dens.values[:, :, 0], 0.0)
    return u.grid.h ** 2 * tree_sum(vals)


def sup_local_energy(u: Field, radius: float, stride: int = 1):
    """Max of local_energy over the stride-subsampled site lattice.

    Returns (value, (x, y)).  The disc sums are evaluated for all centers
    at once by convolving the energy density with the disc indicator; the
    reported value is the exact tree-reduced local energy at the argmax.
    Ties break to the lowest row-major site index.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    grid = u.grid
    dens = energy_density(u).values[:, :, 0] * grid.h ** 2
    r_sites = int(np.floor(radius / grid.h + 0.5))  # site-offset radius
    k = np.arange(-r_sites, r_sites + 1)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    kernel = ((kx * grid.h) ** 2 + (ky * grid.h) ** 2 <= radius ** 2).astype(float)
    conv = fftconvolve(dens, kernel, mode="same")
    sub = conv[::stride, ::stride]
    # row-major argmax with lowest-index tie-break (argmax takes first max)
    flat = np.argmax(sub)
    ix, iy = np.unravel_index(flat, sub.shape)
    ix, iy = int(ix) * stride, int(iy) * stride
    coords = grid.axis_coords()
    center = (float(coords[ix]), float(coords[iy]))
    return local_energy(u, center, radius), center


def kato_audit(u: Field, hessian_norm: Field, delta: float = 1e-6,
               slack_coeff: float = 1.0) -> dict:
    """Pointwise check of |grad |grad u|| <= |Hess u| + O(h) slack.

    `hessian_norm` is the covariant Hessian norm field (targets.hessian_norm).
    Sites with |grad u| <= delta are skipped (inequality only distributional
    at critical points).
    """
    d1, d2 = gradient(u, closure="extend")
    s = np.sqrt(np.sum(d1.values ** 2, axis=2) + np.sum(d2.values ** 2, axis=2))
    sf = Field(u.grid, s, 0.0)
    g1, g2 = gradient(sf, closure="extend")
    grad_s = np.sqrt(g1.values[:, :, 0] ** 2 + g2.values[:, :, 0] ** 2)
    hess = hessian_norm.values[:, :, 0]
    active = s > delta
    excess = np.where(active, grad_s - hess, 0.0)
    max_violation = float(max(0.0, excess.max()))
    slack = slack_coeff * u.grid.h * (1.0 + float(hess.max()))
    violation_count = int(np.count_nonzero(excess > slack))
    return {
        "violation_count": violation_count,
        "max_violation": max_violation,
        "slack": slack,
        "active_sites": int(np.count_nonzero(active)),
    }
