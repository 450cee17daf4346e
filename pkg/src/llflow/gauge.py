"""Coulomb-gauge representation for sphere-valued fields: orthonormal
frames of the pulled-back tangent bundle, differential fields, connection
coefficients via Poisson solves, and audits of the gauge identities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Field, Grid, gradient, integrate, laplacian, tree_sum
from .poisson import poisson_solve, wide_poisson_solve

REFERENCE_CANDIDATES = (
    (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0),
    (-1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, -1.0),
)
DEGENERACY_CUTOFF = 1e-3
MAX_MASKED_FRACTION = 1e-2


class FrameError(RuntimeError):
    pass


@dataclass
class Frame:
    grid: Grid
    e1: np.ndarray  # (n, n, 3), unit tangent where valid
    e2: np.ndarray  # u x e1
    valid_mask: np.ndarray  # (n, n) bool
    reference: tuple
    boundary_e1: np.ndarray | None = None  # frame of the far-field constant
    boundary_e2: np.ndarray | None = None

    @property
    def masked_fraction(self) -> float:
        return 1.0 - float(np.count_nonzero(self.valid_mask)) / self.valid_mask.size


@dataclass
class GaugeData:
    grid: Grid
    phi1: np.ndarray  # complex (n, n)
    phi2: np.ndarray
    phit: np.ndarray | None
    a1: np.ndarray  # purely imaginary, from the frame connection
    a2: np.ndarray
    at: np.ndarray | None
    kappa: float
    valid_mask: np.ndarray
    reference: tuple


def build_frame(u: Field, reference=(1.0, 0.0, 0.0)) -> Frame:
    """e1 = normalized tangent projection of a constant reference vector,
    e2 = u x e1; sites where the projection degenerates are masked."""
    ref = np.asarray(reference, dtype=float)
    ref = ref / np.linalg.norm(ref)
    proj = ref - np.sum(ref * u.values, axis=2, keepdims=True) * u.values
    norm = np.linalg.norm(proj, axis=2)
    valid = norm >= DEGENERACY_CUTOFF
    safe = np.where(valid[:, :, None], norm[:, :, None], 1.0)
    e1 = np.where(valid[:, :, None], proj / safe, 0.0)
    e2 = np.cross(u.values, e1)
    q = u.boundary_value
    proj_q = ref - float(ref @ q) * q
    nq = np.linalg.norm(proj_q)
    b_e1 = proj_q / nq if nq >= DEGENERACY_CUTOFF else None
    b_e2 = np.cross(q, b_e1) if b_e1 is not None else None
    frame = Frame(u.grid, e1, e2, valid, tuple(ref), b_e1, b_e2)
    if frame.masked_fraction > MAX_MASKED_FRACTION:
        raise FrameError(
            f"{frame.masked_fraction:.1%} of sites degenerate for reference "
            f"{tuple(ref)}; try a different reference or the axis fallback")
    return frame


def build_frame_auto(u: Field) -> Frame:
    errors = []
    for ref in REFERENCE_CANDIDATES:
        try:
            return build_frame(u, ref)
        except FrameError as exc:
            errors.append(str(exc))
    raise FrameError("no axis reference yields an admissible frame:\n"
                     + "\n".join(errors))


def _pad_extend(arr: np.ndarray) -> np.ndarray:
    """One ghost ring by quadratic extrapolation (matches Field.padded)."""
    pad_width = ((1, 1), (1, 1)) + ((0, 0),) * (arr.ndim - 2)
    p = np.pad(arr, pad_width)
    for axis in (0, 1):
        v = np.moveaxis(p, axis, 0)
        v[0] = 3 * v[1] - 3 * v[2] + v[3]
        v[-1] = 3 * v[-2] - 3 * v[-3] + v[-4]
    return p


def _central_diffs(arr: np.ndarray, grid: Grid):
    """Central differences of an (n, n) or (n, n, c) array; ghost ring by
    quadratic extrapolation (frame vectors are O(1) at the boundary, so a
    constant ghost would produce an artificial kink there)."""
    p = _pad_extend(arr)
    two_h = 2.0 * grid.h
    d1 = (p[2:, 1:-1] - p[:-2, 1:-1]) / two_h
    d2 = (p[1:-1, 2:] - p[1:-1, :-2]) / two_h
    return d1, d2


def _frame_padded(frame: Frame, width: int = 1):
    """Frame vectors extended by ghost rings holding the far-field frame.

    The ghost frame is the frame of the boundary constant, which gauge
    rotations (zero-Dirichlet) leave fixed; this makes the rotation/
    divergence bookkeeping exact up to product-rule terms.
    """
    n = frame.grid.n
    out = []
    for e, bnd in ((frame.e1, frame.boundary_e1), (frame.e2, frame.boundary_e2)):
        p = np.empty((n + 2 * width, n + 2 * width, 3))
        if bnd is None:
            # reference degenerate at the far field: fall back to the edge
            # values (admissible only when the data is constant there)
            p = np.pad(e, ((width, width), (width, width), (0, 0)), mode="edge")
        else:
            p[:] = bnd
        p[width:-width, width:-width, :] = e
        out.append(p)
    return out


def frame_connection(frame: Frame, pad: int = 0):
    """a_j = i <d_j e1, e2> read directly from the frame (purely imaginary).

    With pad > 0 the coefficients are returned on the lattice extended by
    pad ghost rings (ghost frame = far-field frame).
    """
    e1p, e2p = _frame_padded(frame, pad + 1)
    two_h = 2.0 * frame.grid.h
    d1 = (e1p[2:, 1:-1] - e1p[:-2, 1:-1]) / two_h
    d2 = (e1p[1:-1, 2:] - e1p[1:-1, :-2]) / two_h
    core = e2p[1:-1, 1:-1]
    a1 = 1j * np.sum(d1 * core, axis=2)
    a2 = 1j * np.sum(d2 * core, axis=2)
    return a1, a2


def _rotate(frame: Frame, theta: np.ndarray) -> Frame:
    c, s = np.cos(theta)[:, :, None], np.sin(theta)[:, :, None]
    e1 = c * frame.e1 + s * frame.e2
    e2 = -s * frame.e1 + c * frame.e2
    return Frame(frame.grid, e1, e2, frame.valid_mask, frame.reference,
                 frame.boundary_e1, frame.boundary_e2)


def _central_diffs_zero(arr: np.ndarray, grid: Grid):
    """Central differences with zero ghosts, for fields that decay at the
    truncation boundary (connection coefficients and their sources); keeps
    the differencing consistent with the zero-Dirichlet solves."""
    pad_width = ((1, 1), (1, 1)) + ((0, 0),) * (arr.ndim - 2)
    p = np.pad(arr, pad_width)
    two_h = 2.0 * grid.h
    d1 = (p[2:, 1:-1] - p[:-2, 1:-1]) / two_h
    d2 = (p[1:-1, 2:] - p[1:-1, :-2]) / two_h
    return d1, d2


def _div_l2(a1: np.ndarray, a2: np.ndarray, grid: Grid):
    """Central divergence and L2 norms; accepts on-grid (zero-padded) or
    one-ring-extended coefficient arrays."""
    n = grid.n
    if a1.shape[0] == n:
        p1 = np.pad(a1.imag, 1)
        p2 = np.pad(a2.imag, 1)
    else:
        p1, p2 = a1.imag, a2.imag
    two_h = 2.0 * grid.h
    div = (p1[2:, 1:-1] - p1[:-2, 1:-1]) / two_h + (p2[1:-1, 2:] - p2[1:-1, :-2]) / two_h
    div_l2 = np.sqrt(grid.h ** 2 * tree_sum(div ** 2))
    a_l2 = np.sqrt(grid.h ** 2 * tree_sum(p1[1:-1, 1:-1] ** 2 + p2[1:-1, 1:-1] ** 2))
    return div, div_l2, a_l2


def coulomb_fix(frame: Frame, u: Field, rel_tol: float = 1e-6,
                abs_tol: float = 1e-12, max_iter: int = 30) -> Frame:
    """Rotate the frame so the connection is discretely divergence-free.

    Rotating by theta shifts the connection by the central difference of
    theta, so its central divergence changes by the stride-2h Laplacian;
    each pass inverts exactly that operator (per parity sublattice) and the
    remaining product-rule error shrinks with the increment, so a few
    passes reach the tolerance.
    """
    if not frame.valid_mask.all():
        raise FrameError("coulomb_fix needs a globally valid frame "
                         "(gauge fixing undefined across punctures)")
    current = frame
    for _ in range(max_iter):
        a1, a2 = frame_connection(current, pad=1)
        div, div_l2, a_l2 = _div_l2(a1, a2, current.grid)
        if div_l2 <= rel_tol * a_l2 + abs_tol:
            return current
        theta = wide_poisson_solve(-div, current.grid)
        current = _rotate(current, theta)
    raise FrameError(f"coulomb fix did not converge (div {div_l2:.3e} vs "
                     f"target {rel_tol * a_l2 + abs_tol:.3e})")


def coulomb_divergence(frame: Frame) -> dict:
    """Relative L2 divergence of the connection, measured with the same
    extended-lattice convention the Coulomb fix drives to zero."""
    a1, a2 = frame_connection(frame, pad=1)
    _, div_l2, a_l2 = _div_l2(a1, a2, frame.grid)
    return {"div_l2": div_l2, "a_l2": a_l2,
            "div_rel": div_l2 / a_l2 if a_l2 > 0 else 0.0}


def energy_identity_residual(gauge: GaugeData, u: Field) -> float:
    """Max relative deviation of |phi1|^2 + |phi2|^2 from the squared
    tangential gradient (the frame expansion captures exactly the part of
    the central difference tangent to the sphere at the site)."""
    du1, du2 = gradient(u, closure="extend")
    tansq = np.zeros(u.values.shape[:2])
    for d in (du1, du2):
        tang = d.values - np.sum(d.values * u.values, axis=2, keepdims=True) * u.values
        tansq += np.sum(tang ** 2, axis=2)
    phisq = np.abs(gauge.phi1) ** 2 + np.abs(gauge.phi2) ** 2
    scale = max(tansq.max(), 1e-300)
    diff = np.where(gauge.valid_mask, np.abs(phisq - tansq), 0.0)
    return float(diff.max() / scale)


def differential_fields(frame: Frame, u: Field, u_prev: Field | None = None,
                        dt: float | None = None, kappa: float = 1.0) -> GaugeData:
    """Complexified derivative components and the frame connection."""
    du1, du2 = gradient(u, closure="extend")
    phi1 = (np.sum(du1.values * frame.e1, axis=2)
            + 1j * np.sum(du1.values * frame.e2, axis=2))
    phi2 = (np.sum(du2.values * frame.e1, axis=2)
            + 1j * np.sum(du2.values * frame.e2, axis=2))
    phit = None
    if u_prev is not None:
        if dt is None or dt <= 0:
            raise ValueError("dt required with u_prev")
        dudt = (u.values - u_prev.values) / dt
        phit = (np.sum(dudt * frame.e1, axis=2)
                + 1j * np.sum(dudt * frame.e2, axis=2))
    a1, a2 = frame_connection(frame)
    return GaugeData(u.grid, phi1, phi2, phit, a1, a2, None, kappa,
                     frame.valid_mask, frame.reference)


def poisson_connection(gauge: GaugeData):
    """Connection coefficients from the Poisson system (zero-Dirichlet
    sine-transform solves); returns (a1, a2, div_check)."""
    grid = gauge.grid
    kappa = gauge.kappa
    phis = (gauge.phi1, gauge.phi2)
    sols = []
    for phi_j in phis:
        rhs = np.zeros_like(phi_j.real)
        for k, phi_k in enumerate(phis):
            cross = kappa * np.imag(phi_k * np.conj(phi_j))
            dk = _central_diffs_zero(cross, grid)[k]
            rhs = rhs + dk
        sols.append(1j * poisson_solve(rhs, grid))
    a1, a2 = sols
    _, div_l2, a_l2 = _div_l2(a1, a2, grid)
    div_rel = div_l2 / a_l2 if a_l2 > 0 else 0.0
    return a1, a2, div_rel


def time_connection(gauge: GaugeData, alpha: float, beta: float) -> np.ndarray:
    """a_t of the Coulomb lineage from its Poisson equation.

    The commutator of covariant time and space derivatives gives
    d_t a_j - d_j a_t = i kappa Im(phi_t conj(phi_j)); taking the spatial
    divergence and using d_j a_j = 0 for all times leaves a Poisson
    equation for a_t, with phi_t eliminated through the flow,
    phi_t = z (d_i + a_i) phi_i.
    """
    grid = gauge.grid
    z = alpha - 1j * beta
    phis = (gauge.phi1, gauge.phi2)
    a = (gauge.a1, gauge.a2)
    phi_t = np.zeros_like(gauge.phi1)
    for i, phi_i in enumerate(phis):
        phi_t = phi_t + z * (_central_diffs_zero(phi_i, grid)[i] + a[i] * phi_i)
    rhs = np.zeros_like(phi_t.real)
    for j, phi_j in enumerate(phis):
        cross = gauge.kappa * np.imag(phi_t * np.conj(phi_j))
        rhs = rhs + _central_diffs_zero(cross, grid)[j]
    return 1j * poisson_solve(-rhs, grid)


def _interior_valid(mask: np.ndarray) -> np.ndarray:
    """Sites whose full stencil neighborhood is valid and inside the grid."""
    ok = np.zeros_like(mask)
    inner = (mask[2:, 1:-1] & mask[:-2, 1:-1] & mask[1:-1, 2:]
             & mask[1:-1, :-2] & mask[1:-1, 1:-1])
    ok[1:-1, 1:-1] = inner
    return ok


def curl_identity_residual(gauge: GaugeData) -> dict:
    """L2 norm of (d1 + a1) phi2 - (d2 + a2) phi1 on valid interior sites."""
    grid = gauge.grid
    d1_phi2 = _central_diffs(gauge.phi2, grid)[0]
    d2_phi1 = _central_diffs(gauge.phi1, grid)[1]
    res = (d1_phi2 + gauge.a1 * gauge.phi2) - (d2_phi1 + gauge.a2 * gauge.phi1)
    ok = _interior_valid(gauge.valid_mask)
    sq = np.where(ok, np.abs(res) ** 2, 0.0)
    l2 = np.sqrt(grid.h ** 2 * tree_sum(sq))
    return {"residual_l2": l2,
            "site_fraction": float(np.count_nonzero(ok)) / ok.size}


def _lp_norm(arr: np.ndarray, grid: Grid, p: float) -> float:
    return float((grid.h ** 2 * tree_sum(np.abs(arr) ** p)) ** (1.0 / p))


def lemma21_audit(gauge: GaugeData, p: float) -> dict:
    """Empirical constant in ||a_j||_p <= C sum_k ||phi_k phi_j||_{p*},
    with 1/p* = 1/p + 1/2."""
    if not 2 < p < np.inf:
        raise ValueError("p must lie in (2, inf)")
    p_star = 1.0 / (1.0 / p + 0.5)
    a1, a2, _ = poisson_connection(gauge)
    phis = (gauge.phi1, gauge.phi2)
    lhs = 0.0
    rhs = 0.0
    for a_j, phi_j in zip((a1, a2), phis):
        lhs += _lp_norm(a_j, gauge.grid, p)
        for phi_k in phis:
            rhs += _lp_norm(phi_k * phi_j, gauge.grid, p_star)
    ratio = 0.0 if rhs == 0 else lhs / rhs
    return {"p": p, "lhs": lhs, "rhs": rhs, "ratio": ratio}


def ginzburg_landau_residual(gauge_k: GaugeData, gauge_k1: GaugeData,
                             dt: float, alpha: float, beta: float) -> dict:
    """L2 residual of the gauged evolution equation between two Coulomb
    snapshots separated by dt; the time derivative is a forward difference.
    """
    if gauge_k.valid_mask.shape != gauge_k1.valid_mask.shape or not (
            gauge_k.valid_mask == gauge_k1.valid_mask).all():
        raise FrameError("frames not continuously chosen (valid mask changed)")
    if gauge_k.reference != gauge_k1.reference:
        raise FrameError("frames not continuously chosen (reference changed)")
    grid = gauge_k.grid
    z = alpha - 1j * beta
    kappa = gauge_k.kappa
    at = time_connection(gauge_k, alpha, beta)
    a = (gauge_k.a1, gauge_k.a2)
    phis = (gauge_k.phi1, gauge_k.phi2)
    phis1 = (gauge_k1.phi1, gauge_k1.phi2)
    ok = _interior_valid(gauge_k.valid_mask)
    total_sq = 0.0
    for j, (phi_j, phi_j1) in enumerate(zip(phis, phis1)):
        dphi_dt = (phi_j1 - phi_j) / dt
        lap = _laplacian_complex(phi_j, grid)
        rhs = -at * phi_j
        for i, phi_i in enumerate(phis):
            di_phi_j = _central_diffs(phi_j, grid)[i]
            di_ai = _central_diffs(a[i], grid)[i]
            curvature = 1j * kappa * np.imag(phi_j * np.conj(phi_i)) * phi_i
            rhs = rhs + z * (2.0 * a[i] * di_phi_j + di_ai * phi_j
                             + a[i] * a[i] * phi_j + curvature)
        res = dphi_dt - z * lap - rhs
        total_sq += grid.h ** 2 * tree_sum(np.where(ok, np.abs(res) ** 2, 0.0))
    return {"residual_l2": float(np.sqrt(total_sq)), "dt": dt}


def _laplacian_complex(arr: np.ndarray, grid: Grid) -> np.ndarray:
    p = np.pad(arr, 1, constant_values=0.0)
    return (p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2]
            - 4.0 * p[1:-1, 1:-1]) / grid.h ** 2


def gauge_audit_report(u: Field, u_prev: Field | None = None,
                       dt: float | None = None, alpha: float = 1.0,
                       beta: float = 0.0,
                       lemma21_exponents=(3.0, 4.0)) -> dict:
    """Full JSON-ready audit of one snapshot (optionally with predecessor)."""
    frame = build_frame_auto(u)
    masked = frame.masked_fraction
    gl_residual = None
    if masked == 0.0:
        frame = coulomb_fix(frame, u)
    gauge = differential_fields(frame, u, u_prev, dt)
    div = coulomb_divergence(frame)
    curl = curl_identity_residual(gauge)
    lemma21 = [lemma21_audit(gauge, p) for p in lemma21_exponents]
    if u_prev is not None and masked == 0.0 and dt:
        frame_prev = coulomb_fix(build_frame(u_prev, frame.reference), u_prev)
        gauge_prev = differential_fields(frame_prev, u_prev)
        gl = ginzburg_landau_residual(gauge_prev, gauge, dt, alpha, beta)
        gl_residual = gl["residual_l2"]
    return {
        "div_a_l2": div["div_rel"],
        "curl_residual_l2": curl["residual_l2"],
        "lemma21": lemma21,
        "gl_residual_l2": gl_residual,
        "masked_fraction": masked,
        "grid": {"n": u.grid.n, "L": u.grid.half_extent},
    }
