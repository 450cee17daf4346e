"""Target-manifold geometry: the unit sphere in R^3 and the flat Clifford
torus in R^4, with nearest-point projection, tangent projection, complex
structure, tension/right-hand-side evaluation, harmonic bubbles and
initial-data generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import Field, Grid, constant_field, energy, gradient, integrate, laplacian

INV_SQRT2 = 1.0 / np.sqrt(2.0)


class TargetError(ValueError):
    pass


class TubularRadiusError(RuntimeError):
    """A site left the projection tubular neighborhood (time step too large)."""


@dataclass(frozen=True)
class MOperatorParams:
    """Damping/precession pair with the derived gamma coefficients."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive (dissipative regime only)")

    @property
    def gamma1(self) -> float:
        return self.alpha / (self.alpha ** 2 + self.beta ** 2)

    @property
    def gamma2(self) -> float:
        return self.beta / (self.alpha ** 2 + self.beta ** 2)


class Sphere:
    """Unit S^2 embedded in R^3.  Gauss curvature 1, curvature bound 1."""

    name = "s2"
    ambient_dim = 3
    curvature_bound = 1.0
    tubular_radius = 0.5

    def project(self, y: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(y, axis=-1, keepdims=True)
        return y / norm

    def distance(self, y: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(y, axis=-1) - 1.0)

    def tangent_project(self, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        return v - np.sum(v * y, axis=-1, keepdims=True) * y

    def complex_structure(self, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.cross(y, v)

    def gauss_curvature(self, y: np.ndarray) -> np.ndarray:
        return np.ones(y.shape[:-1])


class CliffordTorus:
    """Flat torus (1/sqrt(2))(cos a, sin a, cos b, sin b) in R^4."""

    name = "torus"
    ambient_dim = 4
    curvature_bound = 0.0
    tubular_radius = 0.3

    def project(self, y: np.ndarray) -> np.ndarray:
        out = np.empty_like(y)
        for k in (0, 2):
            pair = y[..., k:k + 2]
            norm = np.linalg.norm(pair, axis=-1, keepdims=True)
            out[..., k:k + 2] = pair / norm * INV_SQRT2
        return out

    def distance(self, y: np.ndarray) -> np.ndarray:
        d0 = np.linalg.norm(y[..., 0:2], axis=-1) - INV_SQRT2
        d1 = np.linalg.norm(y[..., 2:4], axis=-1) - INV_SQRT2
        return np.sqrt(d0 ** 2 + d1 ** 2)

    def _unit_tangents(self, y: np.ndarray):
        ta = np.zeros_like(y)
        tb = np.zeros_like(y)
        n0 = np.linalg.norm(y[..., 0:2], axis=-1, keepdims=True)
        n1 = np.linalg.norm(y[..., 2:4], axis=-1, keepdims=True)
        ta[..., 0] = -y[..., 1] / n0[..., 0]
        ta[..., 1] = y[..., 0] / n0[..., 0]
        tb[..., 2] = -y[..., 3] / n1[..., 0]
        tb[..., 3] = y[..., 2] / n1[..., 0]
        return ta, tb

    def tangent_project(self, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        ta, tb = self._unit_tangents(y)
        ca = np.sum(v * ta, axis=-1, keepdims=True)
        cb = np.sum(v * tb, axis=-1, keepdims=True)
        return ca * ta + cb * tb

    def complex_structure(self, y: np.ndarray, v: np.ndarray) -> np.ndarray:
        ta, tb = self._unit_tangents(y)
        ca = np.sum(v * ta, axis=-1, keepdims=True)
        cb = np.sum(v * tb, axis=-1, keepdims=True)
        return ca * tb - cb * ta

    def gauss_curvature(self, y: np.ndarray) -> np.ndarray:
        return np.zeros(y.shape[:-1])


TARGETS = {"s2": Sphere, "torus": CliffordTorus}


def make_target(kind: str):
    try:
        return TARGETS[kind]()
    except KeyError:
        raise TargetError(f"unknown target {kind!r}; choose from {sorted(TARGETS)}")


TOL_TARGET = 1e-12


def check_on_target(u: Field, target, tol: float = TOL_TARGET) -> float:
    dist = float(target.distance(u.values).max())
    if dist > tol:
        raise TargetError(f"field off target by {dist:.3e} (tol {tol:.1e})")
    return dist


def renormalize(u: Field, target) -> tuple[Field, float]:
    """Project every site back onto the target; returns (field, max drift)."""
    dist = target.distance(u.values)
    drift = float(dist.max())
    if drift > target.tubular_radius:
        idx = np.unravel_index(int(np.argmax(dist)), dist.shape)
        raise TubularRadiusError(
            f"site {idx} is {drift:.3e} from the target, outside the tubular "
            f"radius {target.tubular_radius}; the time step is too large")
    vals = target.project(u.values)
    bnd = target.project(u.boundary_value[None, :])[0]
    return Field(u.grid, vals, bnd), drift


def tension(u: Field, target, closure: str = "extend") -> Field:
    """Tangential part of the 5-point Laplacian (discrete tension field).

    Defaults to the extension closure: differencing a slowly decaying map
    against its far-field constant would put an O(1/h^2) spike on the
    boundary ring.  For data that genuinely reaches its far-field constant
    the "constant" closure pairs exactly with the edge-based energy.
    """
    lap = laplacian(u, closure=closure)
    tang = target.tangent_project(u.values, lap.values)
    return Field(u.grid, tang, np.zeros(u.m))


def ll_rhs(u: Field, alpha: float, beta: float, target,
           closure: str = "extend") -> Field:
    """alpha*tau(u) - beta*J(u)tau(u); rejects the Schroedinger regime."""
    if alpha <= 0:
        raise ValueError("alpha must be positive (alpha <= 0 is out of scope)")
    tau = tension(u, target, closure)
    rhs = alpha * tau.values - beta * target.complex_structure(u.values, tau.values)
    return Field(u.grid, rhs, np.zeros(u.m))


def _ambient_j_matrix(target, y: np.ndarray) -> np.ndarray:
    """Matrix of V -> J(y) P(y) V acting on ambient vectors at one point."""
    m = target.ambient_dim
    mat = np.empty((m, m))
    for k in range(m):
        e = np.zeros(m)
        e[k] = 1.0
        mat[:, k] = target.complex_structure(y, target.tangent_project(y, e))
    return mat


def m_apply(y: np.ndarray, v: np.ndarray, params: MOperatorParams, target) -> np.ndarray:
    """Apply the parabolic-form operator M(y) = (gamma1 + gamma2 * J P)^{-1}.

    The + sign realizes u_t = alpha*tau - beta*J tau (the skew part flips
    relative to the bare (gamma1 - gamma2 Phi)^{-1} composition; the spectral
    bounds are unaffected by the sign).
    """
    phi = _ambient_j_matrix(target, np.asarray(y, dtype=float))
    a = params.gamma1 * np.eye(target.ambient_dim) + params.gamma2 * phi
    return np.linalg.solve(a, np.asarray(v, dtype=float))


def spectral_bounds_audit(target, params: MOperatorParams, samples: int,
                          seed: int = 0, rel_slack: float = 1e-10) -> dict:
    """Check alpha|V|^2 <= V^T M V <= |V|^2/gamma1 on random point/vector pairs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    m = target.ambient_dim
    lower = params.alpha
    upper = 1.0 / params.gamma1
    quot_min, quot_max = np.inf, -np.inf
    witness = None
    for _ in range(samples):
        y = target.project(rng.normal(size=m))
        v = rng.normal(size=m)
        q = float(v @ m_apply(y, v, params, target)) / float(v @ v)
        quot_min = min(quot_min, q)
        quot_max = max(quot_max, q)
        if q < lower * (1 - rel_slack) or q > upper * (1 + rel_slack):
            witness = {"point": y.tolist(), "vector": v.tolist(), "quotient": q}
    return {
        "passed": witness is None,
        "rayleigh_min": quot_min,
        "rayleigh_max": quot_max,
        "lower_bound": lower,
        "upper_bound": upper,
        "witness": witness,
    }


def hessian_norm(u: Field, target) -> Field:
    """Covariant Hessian norm |P(u) d_i d_j u| summed over all four index
    pairs (mixed entries counted twice)."""
    p = u.padded(closure="extend")
    h2 = u.grid.h ** 2
    d11 = (p[2:, 1:-1] - 2 * p[1:-1, 1:-1] + p[:-2, 1:-1]) / h2
    d22 = (p[1:-1, 2:] - 2 * p[1:-1, 1:-1] + p[1:-1, :-2]) / h2
    d12 = (p[2:, 2:] - p[2:, :-2] - p[:-2, 2:] + p[:-2, :-2]) / (4 * h2)
    sq = np.zeros(u.values.shape[:2])
    for second, weight in ((d11, 1.0), (d22, 1.0), (d12, 2.0)):
        cov = target.tangent_project(u.values, second)
        sq += weight * np.sum(cov ** 2, axis=2)
    return Field(u.grid, np.sqrt(sq), 0.0)


def hessian_energy(u: Field, target) -> float:
    """Integral of the squared covariant Hessian norm."""
    hn = hessian_norm(u, target)
    return integrate(Field(u.grid, hn.values[:, :, 0] ** 2, 0.0))


NORTH = np.array([0.0, 0.0, 1.0])


def stereographic_bubble(grid: Grid, lam: float = 1.0, center=0.0 + 0.0j,
                         degree: int = 1) -> tuple[Field, bool]:
    """Degree-k harmonic bubble via w(z) = ((z - a)/lam)^k, inverse
    stereographic from the north pole.  Returns (field, under_resolved)."""
    if lam <= 0:
        raise ValueError("scale must be positive")
    if degree < 1:
        raise ValueError("degree must be >= 1")
    under_resolved = lam < 4 * grid.h
    x, y = grid.meshgrid()
    z = x + 1j * y
    w = ((z - complex(center)) / lam) ** degree
    denom = np.abs(w) ** 2 + 1.0
    vals = np.stack([2 * w.real / denom, 2 * w.imag / denom,
                     (np.abs(w) ** 2 - 1.0) / denom], axis=2)
    return Field(grid, vals, NORTH.copy()), under_resolved


def arctan_profile(lam: float):
    """g(r) = 2 arctan(lam / r): pi at the origin, 0 at infinity.  With
    winding 1 this is exactly the degree-1 bubble."""
    def g(r):
        r = np.asarray(r, dtype=float)
        return 2.0 * np.arctan2(lam, r)
    return g


def gauss_profile(amplitude: float, lam: float):
    """g(r) = A (r/lam) exp(-(r/lam)^2): pole-compatible, topologically
    trivial for A below pi; energy is monotone in A."""
    def g(r):
        r = np.asarray(r, dtype=float)
        s = r / lam
        return amplitude * s * np.exp(-s ** 2)
    return g


def equivariant_data(grid: Grid, profile, winding: int = 1) -> Field:
    """u = (cos(m theta) sin g, sin(m theta) sin g, cos g) on the grid."""
    g0 = float(np.asarray(profile(1e-9)))
    if min(abs(g0), abs(g0 - np.pi)) > 1e-6:
        raise TargetError(
            f"profile is not pole-compatible at r=0 (g(0+) = {g0:.6f}, "
            "needs 0 or pi)")
    r_far = grid.half_extent * np.sqrt(2.0)
    g_far = float(np.asarray(profile(r_far)))
    if abs(g_far) > 0.5:
        raise TargetError(
            f"profile far-field g({r_far:.1f}) = {g_far:.3f} does not match "
            "the north-pole boundary constant")
    x, y = grid.meshgrid()
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    g = profile(r)
    vals = np.stack([np.cos(winding * theta) * np.sin(g),
                     np.sin(winding * theta) * np.sin(g),
                     np.cos(g)], axis=2)
    u, _ = renormalize(Field(grid, vals, NORTH.copy()), Sphere())
    return u


def torus_wave_data(grid: Grid, amplitude: float = 1.0, lam: float = 2.0,
                    amplitude_b: float = 0.5) -> Field:
    """Localized angle excitation on the flat torus: a Gaussian lobe in the
    first angle and an odd lobe in the second, both decaying to the constant
    (1, 0, 1, 0)/sqrt(2) at the truncation boundary."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    x, y = grid.meshgrid()
    s2 = (x ** 2 + y ** 2) / lam ** 2
    ang_a = amplitude * np.exp(-s2)
    ang_b = amplitude_b * (y / lam) * np.exp(-s2)
    vals = np.stack([np.cos(ang_a), np.sin(ang_a),
                     np.cos(ang_b), np.sin(ang_b)], axis=2) * INV_SQRT2
    bnd = INV_SQRT2 * np.array([1.0, 0.0, 1.0, 0.0])
    return Field(grid, vals, bnd)


def energy_calibrate(family, e_target: float, bracket=(1e-6, np.pi),
                     rel_tol: float = 1e-6, max_steps: int = 200) -> Field:
    """Bisect the family parameter until |E - E_target| <= rel_tol * E_target.

    `family` maps a scalar parameter to a field; its energy must be
    continuous and monotone over the bracket.
    """
    lo, hi = bracket
    if e_target == 0.0:
        return family(lo)
    e_lo = energy(family(lo))
    e_hi = energy(family(hi))
    if not (min(e_lo, e_hi) <= e_target <= max(e_lo, e_hi)):
        raise ValueError(
            f"bracket energies [{e_lo:.4f}, {e_hi:.4f}] do not straddle "
            f"target {e_target:.4f}")
    increasing = e_hi >= e_lo
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        u = family(mid)
        e = energy(u)
        if abs(e - e_target) <= rel_tol * abs(e_target):
            return u
        if (e < e_target) == increasing:
            lo = mid
        else:
            hi = mid
    raise RuntimeError("energy calibration did not converge")
