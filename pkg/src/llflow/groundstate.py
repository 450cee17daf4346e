"""Townes ground state of lap(f) - f + f^3 = 0 by shooting, the sharp
Gagliardo-Nirenberg constant, and the critical-energy lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CROSSES_ZERO = "crosses_zero"
DIVERGES = "diverges"
DECAYS = "decays"

ASYMPTOTIC_CUTOFF = 1e-4  # below this, integrate the linearization f'' ~ f


@dataclass
class RadialProfile:
    r: np.ndarray
    f: np.ndarray
    df: np.ndarray
    f0: float

    def __post_init__(self):
        if self.f[-1] > 1e-6 * self.f0:
            raise ValueError("profile does not decay at r_max")


def _ode(r: float, f: float, df: float):
    # radial form f'' + f'/r - f + f^3 = 0; series handles the origin
    return df, -df / r + f - f ** 3


def _rk4_step(r, f, df, dr):
    k1 = _ode(r, f, df)
    k2 = _ode(r + dr / 2, f + dr / 2 * k1[0], df + dr / 2 * k1[1])
    k3 = _ode(r + dr / 2, f + dr / 2 * k2[0], df + dr / 2 * k2[1])
    k4 = _ode(r + dr, f + dr * k3[0], df + dr * k3[1])
    f_new = f + dr / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    df_new = df + dr / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return f_new, df_new


def shoot(f0: float, r_max: float = 20.0, dr: float = 1e-3,
          keep_profile: bool = False):
    """Integrate from the origin and classify the trajectory.

    Returns (classification, profile arrays or None).  The first grid point
    comes from the series f(r) ~ f0 + (f0 - f0^3) r^2 / 4.
    """
    if dr <= 0 or r_max <= 0:
        raise ValueError("dr and r_max must be positive")
    if f0 <= 0:
        raise ValueError("f0 must be positive")
    steps = int(round(r_max / dr))
    r = dr
    f = f0 + (f0 - f0 ** 3) * dr ** 2 / 4
    df = (f0 - f0 ** 3) * dr / 2
    rs, fs, dfs = [0.0, r], [f0, f], [0.0, df]
    linear_tail = False
    for _ in range(steps - 1):
        # When building the profile, freeze the stable exponential of
        # f'' + f'/r - f = 0 once f is tiny (the unstable mode would blow
        # up over the remaining range).  For bare classification the true
        # ODE is integrated instead: the unstable mode is exactly what
        # separates the branches near the ground-state amplitude.
        if keep_profile and not linear_tail and 0 < f < ASYMPTOTIC_CUTOFF:
            linear_tail = True
        if linear_tail:
            decay = np.exp(-dr) * np.sqrt(r / (r + dr))
            f, df = f * decay, -f * decay
        else:
            f, df = _rk4_step(r, f, df, dr)
        r += dr
        if keep_profile:
            rs.append(r)
            fs.append(f)
            dfs.append(df)
        if f < 0:
            return CROSSES_ZERO, None
        if f > 2 * f0 or (df > 0 and f < 0.5):
            # grew past any decaying envelope, or turned around low and is
            # heading back toward the f = 1 equilibrium
            return DIVERGES, None
    if f > 1e-3:
        return DIVERGES, None
    profile = None
    if keep_profile:
        profile = (np.array(rs), np.array(fs), np.array(dfs))
    return DECAYS, profile


def ground_state(tol: float = 1e-10, r_max: float = 20.0,
                 dr: float = 1e-3) -> RadialProfile:
    """Bisection on the shooting parameter between a crossing bracket end
    and a diverging one."""
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    scan = np.arange(0.5, 4.01, 0.25)
    kinds = [shoot(f0, r_max, dr)[0] for f0 in scan]
    bracket = None
    for i in range(len(scan) - 1):
        pair = {kinds[i], kinds[i + 1]} - {DECAYS}
        if kinds[i] != kinds[i + 1] and DECAYS not in (kinds[i], kinds[i + 1]):
            bracket = (scan[i], scan[i + 1], kinds[i])
            break
    if bracket is None:
        raise RuntimeError("could not bracket the ground state amplitude")
    lo, hi, lo_kind = bracket
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        kind = shoot(mid, r_max, dr)[0]
        if kind == DECAYS:
            # landed on the separatrix within resolution; nudge toward lo side
            kind = lo_kind
        if kind == lo_kind:
            lo = mid
        else:
            hi = mid
    f0 = 0.5 * (lo + hi)
    kind, prof = shoot(f0, r_max, dr, keep_profile=True)
    if prof is None:
        # midpoint fell off the separatrix numerically; take the best end
        for cand in (lo, hi):
            kind, prof = shoot(cand, r_max, dr, keep_profile=True)
            if prof is not None:
                f0 = cand
                break
    if prof is None:
        raise RuntimeError("shooting from the bisected amplitude failed")
    r, f, df = prof
    f = np.maximum(f, 0.0)
    return RadialProfile(r=r, f=f, df=df, f0=f0)


def _radial_integral(r: np.ndarray, integrand: np.ndarray) -> float:
    """2*pi int g(r) r dr by the trapezoid rule."""
    return float(2 * np.pi * np.trapezoid(integrand * r, r))


def mass(profile: RadialProfile) -> float:
    return _radial_integral(profile.r, profile.f ** 2)


def gn_constant(profile: RadialProfile) -> float:
    """C = ||W||_4 / (||W||_2^(1/2) ||grad W||_2^(1/2)) by radial quadrature."""
    l2 = _radial_integral(profile.r, profile.f ** 2)
    l4 = _radial_integral(profile.r, profile.f ** 4)
    grad = _radial_integral(profile.r, profile.df ** 2)
    return l4 ** 0.25 / (l2 ** 0.25 * grad ** 0.25)


def pohozaev_residual(profile: RadialProfile) -> float:
    """Relative residual of int |grad W|^2 + int W^2 = int W^4 (forced by
    multiplying the equation by W)."""
    l2 = _radial_integral(profile.r, profile.f ** 2)
    l4 = _radial_integral(profile.r, profile.f ** 4)
    grad = _radial_integral(profile.r, profile.df ** 2)
    return abs(grad + l2 - l4) / l4


@dataclass(frozen=True)
class ThresholdReport:
    c12: float
    curvature_bound: float
    e_star_lower: float  # +inf sentinel for non-positive curvature


def critical_energy_bound(c12: float, curvature_bound: float) -> ThresholdReport:
    """E_* >= 1 / (2 C^4 R_N); infinite when the curvature bound vanishes."""
    if c12 <= 0:
        raise ValueError("c12 must be positive")
    if curvature_bound < 0:
        raise ValueError("curvature bound must be >= 0")
    if curvature_bound == 0:
        bound = np.inf
    else:
        bound = 0.5 / (c12 ** 4 * curvature_bound)
    return ThresholdReport(c12=c12, curvature_bound=curvature_bound,
                           e_star_lower=bound)
