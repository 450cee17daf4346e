import numpy as np
import pytest

from llflow import targets as tg
from llflow.dynamics import SimConfig, run
from llflow.fields import Field, Grid, constant_field, gradient
from llflow.gauge import (FrameError, build_frame, build_frame_auto,
                          coulomb_divergence, coulomb_fix,
                          curl_identity_residual, differential_fields,
                          energy_identity_residual, gauge_audit_report,
                          ginzburg_landau_residual, lemma21_audit,
                          poisson_connection, time_connection)


def smooth_data(n=64, half_extent=8.0, amplitude=1.0, lam=2.0):
    grid = Grid(n, half_extent)
    return tg.equivariant_data(grid, tg.gauss_profile(amplitude, lam))


def fixed_gauge(u, u_prev=None, dt=None):
    frame = coulomb_fix(build_frame(u), u)
    return differential_fields(frame, u, u_prev, dt)


class TestFrame:
    def test_orthonormal_tangent_frame(self):
        u = smooth_data()
        frame = build_frame(u)
        assert frame.valid_mask.all()
        e1, e2 = frame.e1, frame.e2
        assert np.abs(np.sum(e1 * e1, axis=2) - 1.0).max() < 1e-12
        assert np.abs(np.sum(e2 * e2, axis=2) - 1.0).max() < 1e-12
        assert np.abs(np.sum(e1 * e2, axis=2)).max() < 1e-12
        assert np.abs(np.sum(e1 * u.values, axis=2)).max() < 1e-12
        assert np.abs(np.sum(e2 * u.values, axis=2)).max() < 1e-12

    def test_degenerate_reference_rejected_and_auto_recovers(self):
        u = constant_field(Grid(32, 4.0), [1.0, 0.0, 0.0])
        with pytest.raises(FrameError):
            build_frame(u, (1.0, 0.0, 0.0))
        frame = build_frame_auto(u)
        assert frame.valid_mask.all()


class TestCoulomb:
    def test_fix_drives_divergence_down(self):
        u = smooth_data()
        raw = build_frame(u)
        fixed = coulomb_fix(raw, u)
        before = coulomb_divergence(raw)["div_rel"]
        after = coulomb_divergence(fixed)["div_rel"]
        assert after <= 1e-6
        assert after < before
        # the rotation must preserve orthonormality
        assert np.abs(np.sum(fixed.e1 * fixed.e1, axis=2) - 1.0).max() < 1e-10
        assert np.abs(np.sum(fixed.e1 * u.values, axis=2)).max() < 1e-10

    def test_energy_identity_exact_in_coulomb_gauge(self):
        u = smooth_data()
        gauge = fixed_gauge(u)
        assert energy_identity_residual(gauge, u) < 1e-10

    def test_poisson_connection_matches_frame_connection(self):
        u = smooth_data(n=128)
        gauge = fixed_gauge(u)
        a1, a2, div_rel = poisson_connection(gauge)
        # the reconstruction solves a zero-Dirichlet Poisson problem, so its
        # central divergence is only O(h^2) small, not exactly zero
        assert div_rel < 1e-3
        scale = max(np.abs(gauge.a1).max(), 1e-300)
        err = max(np.abs(a1 - gauge.a1).max(), np.abs(a2 - gauge.a2).max())
        assert err / scale < 0.05

    def test_time_connection_purely_imaginary(self):
        u = smooth_data()
        gauge = fixed_gauge(u)
        at = time_connection(gauge, 1.0, 0.5)
        assert np.abs(at.real).max() < 1e-14
        assert np.isfinite(at.imag).all()


class TestIdentities:
    def test_curl_identity_refines_at_second_order(self):
        res = []
        for n in (64, 128):
            gauge = fixed_gauge(smooth_data(n=n))
            res.append(curl_identity_residual(gauge)["residual_l2"])
        assert res[0] / res[1] > 3.0

    def test_lemma21_constants_bounded(self):
        gauge = fixed_gauge(smooth_data())
        for p in (3.0, 4.0):
            audit = lemma21_audit(gauge, p)
            assert 0.0 < audit["ratio"] < 1.0
        with pytest.raises(ValueError):
            lemma21_audit(gauge, 2.0)


class TestEvolutionResidual:
    def snapshots(self, gap, n=64):
        u0 = smooth_data(n=n)
        cfg = SimConfig(alpha=1.0, beta=0.5, scheme="heun", dt_safety=0.5,
                        t_end=gap, ledger_every=0)
        state = run(u0, tg.Sphere(), cfg)
        return u0, state.u, state.t

    def test_residual_first_order_in_dt(self):
        res = []
        for gap in (0.04, 0.02):
            u0, u1, t = self.snapshots(gap)
            g0 = fixed_gauge(u0)
            g1 = fixed_gauge(u1)
            res.append(ginzburg_landau_residual(g0, g1, t, 1.0, 0.5)
                       ["residual_l2"])
        assert res[0] / res[1] > 1.7

    def test_wrong_coefficients_do_not_converge(self):
        # negative control: evaluating the residual with the precession
        # sign flipped must leave an O(1) floor that dt-refinement cannot
        # remove
        res = []
        for gap in (0.04, 0.02):
            u0, u1, t = self.snapshots(gap)
            g0 = fixed_gauge(u0)
            g1 = fixed_gauge(u1)
            res.append(ginzburg_landau_residual(g0, g1, t, 1.0, -0.5)
                       ["residual_l2"])
        assert res[0] / res[1] < 1.3
        correct = ginzburg_landau_residual(
            *(fixed_gauge(u) for u in self.snapshots(0.02)[:2]),
            0.02, 1.0, 0.5)["residual_l2"]
        assert res[1] > 5 * correct

    def test_mismatched_frames_rejected(self):
        u0, u1, t = self.snapshots(0.02)
        g0 = fixed_gauge(u0)
        frame1 = coulomb_fix(build_frame(u1, (0.0, 1.0, 0.0)), u1)
        g1 = differential_fields(frame1, u1)
        with pytest.raises(FrameError):
            ginzburg_landau_residual(g0, g1, t, 1.0, 0.5)


class TestAuditReport:
    def test_report_shape_and_values(self):
        u0 = smooth_data()
        cfg = SimConfig(alpha=1.0, beta=0.5, scheme="heun", dt_safety=0.5,
                        t_end=0.02, ledger_every=0)
        u1 = run(u0, tg.Sphere(), cfg).u
        rep = gauge_audit_report(u1, u0, 0.02, 1.0, 0.5)
        assert rep["div_a_l2"] <= 1e-6
        assert rep["masked_fraction"] == 0.0
        assert rep["gl_residual_l2"] is not None
        assert rep["curl_residual_l2"] > 0.0
        assert len(rep["lemma21"]) == 2
        assert rep["grid"] == {"n": 64, "L": 8.0}

    def test_report_without_predecessor(self):
        rep = gauge_audit_report(smooth_data(n=32, half_extent=4.0))
        assert rep["gl_residual_l2"] is None
