import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from llflow.fields import Field, Grid, laplacian
from llflow.poisson import (helmholtz_solve, helmholtz_solve_field,
                            poisson_solve, wide_poisson_solve)


def apply_lap(arr, grid):
    return laplacian(Field(grid, arr)).values[:, :, 0]


def apply_wide_lap(arr, grid):
    """Central-divergence-of-central-gradient (stride 2h) with zero ghosts."""
    p = np.pad(arr, 2)
    return (p[4:, 2:-2] + p[:-4, 2:-2] + p[2:-2, 4:] + p[2:-2, :-4]
            - 4.0 * p[2:-2, 2:-2]) / (2.0 * grid.h) ** 2


class TestPoisson:
    def test_residual_machine_precision(self):
        g = Grid(64, 4.0)
        rng = np.random.default_rng(0)
        rhs = rng.normal(size=(g.n, g.n))
        sol = poisson_solve(rhs, g)
        assert np.abs(apply_lap(sol, g) - rhs).max() < 1e-10

    def test_complex_rhs(self):
        g = Grid(32, 2.0)
        rng = np.random.default_rng(1)
        rhs = rng.normal(size=(g.n, g.n)) + 1j * rng.normal(size=(g.n, g.n))
        sol = poisson_solve(rhs, g)
        res = apply_lap(sol.real, g) + 1j * apply_lap(sol.imag, g) - rhs
        assert np.abs(res).max() < 1e-10

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(deadline=None, max_examples=20)
    def test_random_rhs_property(self, seed):
        g = Grid(16, 1.0)
        rhs = np.random.default_rng(seed).normal(size=(g.n, g.n))
        sol = poisson_solve(rhs, g)
        scale = max(1.0, np.abs(rhs).max())
        assert np.abs(apply_lap(sol, g) - rhs).max() < 1e-8 * scale


class TestWidePoisson:
    def test_inverts_wide_stencil_exactly(self):
        g = Grid(64, 4.0)
        rng = np.random.default_rng(2)
        rhs = rng.normal(size=(g.n, g.n))
        sol = wide_poisson_solve(rhs, g)
        assert np.abs(apply_wide_lap(sol, g) - rhs).max() < 1e-10


class TestHelmholtz:
    def test_residual(self):
        g = Grid(48, 3.0)
        rng = np.random.default_rng(3)
        rhs = rng.normal(size=(g.n, g.n))
        shift = 0.01
        w = helmholtz_solve(rhs, g, shift)
        res = w - shift * apply_lap(w, g) - rhs
        assert np.abs(res).max() < 1e-10

    def test_field_wrapper_per_component(self):
        g = Grid(32, 2.0)
        rng = np.random.default_rng(4)
        rhs = Field(g, rng.normal(size=(g.n, g.n, 3)))
        out = helmholtz_solve_field(rhs, 0.05)
        for c in range(3):
            direct = helmholtz_solve(rhs.values[:, :, c], g, 0.05)
            assert np.array_equal(out.values[:, :, c], direct)

    def test_zero_shift_is_identity(self):
        g = Grid(32, 2.0)
        rng = np.random.default_rng(5)
        rhs = rng.normal(size=(g.n, g.n))
        assert np.abs(helmholtz_solve(rhs, g, 0.0) - rhs).max() < 1e-12
