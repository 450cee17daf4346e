"""Fast sine-transform solvers for the zero-Dirichlet 5-point Laplacian.

The cell-centered grid with zero ghost values at offsets -1 and n is exactly
the n-point Dirichlet problem diagonalized by the type-I DST.
"""
from __future__ import annotations

import numpy as np
from scipy.fft import dst, idst

from .fields import Field, Grid


def _eigenvalues_1d(n: int, h: float) -> np.ndarray:
    theta = np.pi * (np.arange(n) + 1) / (n + 1)
    return (2.0 * np.cos(theta) - 2.0) / h ** 2


def _dst2(a: np.ndarray) -> np.ndarray:
    return dst(dst(a, type=1, norm="ortho", axis=0), type=1, norm="ortho", axis=1)


def _idst2(a: np.ndarray) -> np.ndarray:
    return idst(idst(a, type=1, norm="ortho", axis=0), type=1, norm="ortho", axis=1)


def _solve_diagonal(rhs: np.ndarray, grid: Grid, denom: np.ndarray) -> np.ndarray:
    coeff = _dst2(rhs) / denom
    return _idst2(coeff)


def laplace_eigen_grid(grid: Grid) -> np.ndarray:
    lam = _eigenvalues_1d(grid.n, grid.h)
    return lam[:, None] + lam[None, :]


def poisson_solve(rhs: np.ndarray, grid: Grid) -> np.ndarray:
    """Solve lap(a) = rhs with zero-Dirichlet ghosts; rhs real or complex."""
    denom = laplace_eigen_grid(grid)
    if np.iscomplexobj(rhs):
        return (_solve_diagonal(rhs.real, grid, denom)
                + 1j * _solve_diagonal(rhs.imag, grid, denom))
    return _solve_diagonal(rhs, grid, denom)


def _poisson_solve_raw(rhs: np.ndarray, h: float) -> np.ndarray:
    """Zero-Dirichlet 5-point Poisson solve on a bare (possibly non-square)
    lattice of spacing h."""
    lx = _eigenvalues_1d(rhs.shape[0], h)
    ly = _eigenvalues_1d(rhs.shape[1], h)
    denom = lx[:, None] + ly[None, :]
    return _idst2(_dst2(rhs) / denom)


def wide_poisson_solve(rhs: np.ndarray, grid: Grid) -> np.ndarray:
    """Solve div_c(grad_c a) = rhs, the central-difference Laplacian of
    stride 2h.  The operator decouples over the four parity sublattices,
    each a compact 5-point Dirichlet problem of spacing 2h.
    """
    out = np.empty_like(rhs)
    for px in (0, 1):
        for py in (0, 1):
            out[px::2, py::2] = _poisson_solve_raw(rhs[px::2, py::2], 2.0 * grid.h)
    return out


def helmholtz_solve(rhs: np.ndarray, grid: Grid, shift: float) -> np.ndarray:
    """Solve (I - shift*lap) w = rhs with zero-Dirichlet ghosts (shift >= 0)."""
    denom = 1.0 - shift * laplace_eigen_grid(grid)
    return _solve_diagonal(rhs, grid, denom)


def helmholtz_solve_field(rhs: Field, shift: float) -> Field:
    out = np.empty_like(rhs.values)
    for c in range(rhs.m):
        out[:, :, c] = helmholtz_solve(rhs.values[:, :, c], rhs.grid, shift)
    return Field(rhs.grid, out, np.zeros(rhs.m))
