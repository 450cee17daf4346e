"""Trajectory-level audits: dissipation ledger, the Hessian/L4 inequality
checks, local-energy inequalities, and the concentration/bubbling detector.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.optimize import least_squares
from scipy.signal import fftconvolve

from .fields import (Field, Grid, energy, energy_density, gradient, integrate,
                     local_energy, sup_local_energy, tree_sum)
from . import targets as tg

EPS1_DEFAULT = np.pi / 2  # 4*pi / 8; the threshold constant is target-dependent


@dataclass
class LedgerRow:
    t: float
    energy: float
    diss_cum: float
    l4_cum: float
    unit_drift: float
    sup_local: tuple  # one value per configured radius
    argmax: tuple  # argmax center for the smallest radius


@dataclass
class EnergyLedger:
    """Cumulative dissipation / L4 / concentration bookkeeping for a run."""

    radii: tuple = ()
    rows: list = field(default_factory=list)

    def append(self, row: LedgerRow) -> None:
        if self.rows:
            last = self.rows[-1]
            if row.t <= last.t:
                raise ValueError("ledger times must be strictly increasing")
            if row.diss_cum < last.diss_cum - 1e-15:
                raise ValueError("cumulative dissipation must be non-decreasing")
        self.rows.append(row)

    def header(self) -> str:
        sup_cols = ",".join(f"sup_local_R={r:g}" for r in self.radii)
        cols = "t,E,diss_cum,l4_cum,unit_drift"
        if sup_cols:
            cols += "," + sup_cols
        return cols + ",argmax_x,argmax_y"

    def csv_lines(self):
        yield self.header()
        for row in self.rows:
            vals = [row.t, row.energy, row.diss_cum, row.l4_cum, row.unit_drift]
            vals.extend(row.sup_local)
            vals.extend(row.argmax)
            yield ",".join(f"{v:.17g}" for v in vals)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.csv_lines():
                fh.write(line + "\n")


def read_ledger_csv(path) -> EnergyLedger:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        radii = tuple(float(c.split("=", 1)[1]) for c in header
                      if c.startswith("sup_local_R="))
        ledger = EnergyLedger(radii=radii)
        nsup = len(radii)
        for line in fh:
            vals = [float(v) for v in line.strip().split(",")]
            ledger.append(LedgerRow(
                t=vals[0], energy=vals[1], diss_cum=vals[2], l4_cum=vals[3],
                unit_drift=vals[4], sup_local=tuple(vals[5:5 + nsup]),
                argmax=tuple(vals[5 + nsup:7 + nsup])))
    return ledger


def dissipation_residual(ledger: EnergyLedger) -> float:
    """Max over rows of |E(0) - E(t) - gamma1 * int |u_t|^2|, the energy
    balance of the damped flow (diss_cum carries the gamma1 weight)."""
    if not ledger.rows:
        raise ValueError("empty ledger")
    e0 = ledger.rows[0].energy
    return max(abs(e0 - row.energy - row.diss_cum) for row in ledger.rows)


def grad4_integral(u: Field) -> float:
    d1, d2 = gradient(u, closure="extend")
    gradsq = np.sum(d1.values ** 2, axis=2) + np.sum(d2.values ** 2, axis=2)
    return integrate(Field(u.grid, gradsq ** 2, 0.0))


def hessian_energy(u: Field, target) -> float:
    return tg.hessian_energy(u, target)


def mnbv_audit(u: Field, target) -> dict:
    """Hessian energy vs curvature * L4 + tension-L2 (integration-by-parts
    inequality for maps into the target)."""
    lhs = tg.hessian_energy(u, target)
    tau = tg.tension(u, target)
    tau_l2sq = integrate(Field(u.grid, np.sum(tau.values ** 2, axis=2), 0.0))
    rhs = target.curvature_bound * grad4_integral(u) + tau_l2sq
    return {"lhs": lhs, "rhs": rhs, "slack": rhs - lhs, "tension_l2_sq": tau_l2sq}


def ladyzhenskaya_audit(trajectory, radius: float, stride: int = 4) -> dict:
    """Spacetime L4 of grad u against sup-local-energy times Hessian/low
    frequency terms; reports the implied constant.

    `trajectory` is a list of (t, field) snapshots.
    """
    times = np.array([t for t, _ in trajectory])
    l4 = np.array([grad4_integral(u) for _, u in trajectory])
    hess = np.array([tg.hessian_energy(u, tg.Sphere()) if u.m == 3
                     else tg.hessian_energy(u, tg.CliffordTorus())
                     for _, u in trajectory])
    eps_r = max(sup_local_energy(u, radius, stride)[0] for _, u in trajectory)
    e0 = energy(trajectory[0][1])
    horizon = times[-1] - times[0]
    lhs = float(np.trapezoid(l4, times))
    hess_int = float(np.trapezoid(hess, times))
    rhs = eps_r * (hess_int + horizon / radius ** 2 * e0)
    ratio = 0.0 if rhs == 0 else lhs / rhs
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio, "eps_R": eps_r,
            "radius": radius, "horizon": horizon}


def _local_energy_map(u: Field, radius: float) -> np.ndarray:
    """Local energies for all site-centered balls (disc convolution)."""
    grid = u.grid
    dens = energy_density(u).values[:, :, 0] * grid.h ** 2
    r_sites = int(np.floor(radius / grid.h + 0.5))
    k = np.arange(-r_sites, r_sites + 1)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    kernel = ((kx * grid.h) ** 2 + (ky * grid.h) ** 2 <= radius ** 2).astype(float)
    return fftconvolve(dens, kernel, mode="same")


def local_energy_inequality_audit(trajectory, radius: float, stride: int = 8) -> dict:
    """Minimal constants making the forward/backward local-energy
    inequalities hold over all snapshot pairs and a strided center lattice,
    plus the outer-ball mass growth constant.
    """
    if len(trajectory) < 2:
        raise ValueError("need at least two snapshots")
    grid = trajectory[0][1].grid
    if radius < 4 * grid.h:
        raise ValueError("radius must be at least 4h")
    e0 = energy(trajectory[0][1])
    times = [t for t, _ in trajectory]
    e_tot = [energy(u) for _, u in trajectory]
    maps_r = [_local_energy_map(u, radius)[::stride, ::stride] for _, u in trajectory]
    maps_2r = [_local_energy_map(u, 2 * radius)[::stride, ::stride] for _, u in trajectory]
    c_fwd = 0.0
    c_bwd = 0.0
    for i in range(len(trajectory) - 1):
        for j in range(i + 1, len(trajectory)):
            dt = times[j] - times[i]
            scale = radius ** 2 / (dt * e0)
            c_fwd = max(c_fwd, float((maps_r[j] - maps_2r[i]).max()) * scale)
            drop = e_tot[i] - e_tot[j]
            c_bwd = max(c_bwd, float((maps_r[i] - drop - maps_2r[j]).max()) * scale)
    # outer-ball mass growth relative to the boundary constant
    u0 = trajectory[0][1]
    q = u0.boundary_value
    x, y = grid.meshgrid()
    outer = x ** 2 + y ** 2 >= radius ** 2
    def outer_mass(u):
        dev = np.sum((u.values - q) ** 2, axis=2)
        d1, d2 = gradient(u, closure="extend")
        gradsq = np.sum(d1.values ** 2, axis=2) + np.sum(d2.values ** 2, axis=2)
        return grid.h ** 2 * tree_sum(np.where(outer, dev + gradsq, 0.0))
    mass0 = outer_mass(u0)
    u0_l2 = integrate(Field(grid, np.sum((u0.values - q) ** 2, axis=2), 0.0))
    c_outer = 0.0
    for t, u in trajectory[1:]:
        growth = outer_mass(u) - mass0
        denom = (t - times[0]) / radius * (e0 + u0_l2)
        if denom > 0:
            c_outer = max(c_outer, growth / denom)
    return {"C3_fwd": max(0.0, c_fwd), "C3_bwd": max(0.0, c_bwd),
            "C_outer": max(0.0, c_outer), "radius": radius}


def concentration_scan(u: Field, radii, eps1: float = EPS1_DEFAULT,
                       stride: int | None = None,
                       flag_radius: float = 1.0) -> dict:
    """Sup-local-energy scan over descending radii; the concentration
    candidate is the smallest radius whose sup still exceeds eps1, and the
    field is flagged when that radius is <= flag_radius.
    """
    radii = list(radii)
    if any(r2 >= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly descending")
    if radii and radii[-1] < 2 * u.grid.h:
        raise ValueError("smallest radius must be >= 2h")
    if stride is None:
        stride = max(1, u.grid.n // 128)
    scan = []
    candidate = None
    for r in radii:
        val, center = sup_local_energy(u, r, stride)
        exceeded = val > eps1
        scan.append({"radius": r, "sup_local_energy": val,
                     "argmax": list(center), "exceeds_eps1": exceeded})
        if exceeded:
            candidate = {"radius": r, "center": list(center),
                         "sup_local_energy": val}
    flagged = candidate is not None and candidate["radius"] <= flag_radius
    return {"eps1": eps1, "flag_radius": flag_radius, "flagged": flagged,
            "candidate": candidate, "scan": scan}


def bubble_extract(u: Field, center, scale: float, reference_grid: Grid) -> Field:
    """Bilinear rescaling u(center + scale*x) onto the reference grid."""
    if scale < 2 * u.grid.h:
        raise ValueError(f"scale {scale} below source resolution 2h = {2 * u.grid.h}")
    span = scale * reference_grid.half_extent
    src_l = u.grid.half_extent
    if abs(center[0]) + span > src_l or abs(center[1]) + span > src_l:
        raise ValueError("requested window exceeds the source domain")
    coords = reference_grid.axis_coords()
    xs = center[0] + scale * coords
    ys = center[1] + scale * coords
    # fractional site indices of the source grid
    ix = (xs + src_l) / u.grid.h - 0.5
    iy = (ys + src_l) / u.grid.h - 0.5
    gx, gy = np.meshgrid(ix, iy, indexing="ij")
    out = np.empty((reference_grid.n, reference_grid.n, u.m))
    for c in range(u.m):
        out[:, :, c] = map_coordinates(u.values[:, :, c], [gx, gy],
                                       order=1, mode="nearest")
    return Field(reference_grid, out, u.boundary_value.copy())


def _bubble_values_and_grads(grid: Grid, lam: float, ax: float, ay: float):
    bub, _ = tg.stereographic_bubble(grid, lam=lam, center=complex(ax, ay))
    d1, d2 = gradient(bub, closure="extend")
    return bub.values, d1.values, d2.values


def bubble_fit(u: Field, max_iter: int = 100) -> dict:
    """Fit the degree-1 bubble family to a rescaled field by minimizing the
    H1 distance on the unit ball (Levenberg-Marquardt damped Gauss-Newton).
    """
    if u.m != 3:
        raise ValueError("bubble fitting is defined for the sphere target")
    grid = u.grid
    dens = energy_density(u).values[:, :, 0]
    flat = int(np.argmax(dens))
    ix, iy = np.unravel_index(flat, dens.shape)
    coords = grid.axis_coords()
    ax0, ay0 = float(coords[ix]), float(coords[iy])
    e_max = float(dens[ix, iy])
    lam0 = 2.0 / np.sqrt(e_max) if e_max > 0 else 1.0
    x, y = grid.meshgrid()
    mask = (x - ax0) ** 2 + (y - ay0) ** 2 <= 1.0
    w = grid.h  # sqrt of the site weight h^2
    du1, du2 = gradient(u, closure="extend")

    def residuals(p):
        lam, ax, ay = p
        vals, g1, g2 = _bubble_values_and_grads(grid, abs(lam), ax, ay)
        res = np.concatenate([
            (vals - u.values)[mask].ravel(),
            (g1 - du1.values)[mask].ravel(),
            (g2 - du2.values)[mask].ravel(),
        ])
        return w * res

    sol = least_squares(residuals, x0=[lam0, ax0, ay0], method="lm",
                        max_nfev=max_iter * 4, xtol=1e-14, ftol=1e-14)
    lam, ax, ay = float(abs(sol.x[0])), float(sol.x[1]), float(sol.x[2])
    h1_dist = float(np.sqrt(np.sum(sol.fun ** 2)))
    return {
        "lam": lam,
        "center": [ax, ay],
        "degree": 1,
        "h1_local_distance": h1_dist,
        "bubble_energy": 4 * np.pi,
        "converged": bool(sol.status > 0 and sol.nfev < max_iter * 4),
        "iterations": int(sol.nfev),
    }


def bubble_report(u: Field, radii, eps1: float = EPS1_DEFAULT,
                  reference_grid: Grid | None = None, t: float = 0.0) -> dict | None:
    """Full detector pipeline: scan, extract, fit.  None when nothing flags."""
    scan = concentration_scan(u, radii, eps1)
    if scan["candidate"] is None:
        return None
    cand = scan["candidate"]
    if reference_grid is None:
        reference_grid = Grid(128, 4.0)
    rescaled = bubble_extract(u, cand["center"], cand["radius"], reference_grid)
    fit = bubble_fit(rescaled)
    return {
        "t": t,
        "center": cand["center"],
        "scale": cand["radius"],
        "flagged": scan["flagged"],
        "fit": fit,
        "scan": scan,
        "rescaled": rescaled,
    }
