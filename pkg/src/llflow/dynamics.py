"""Time integration of the flow with energy-monotonicity guards and the
dissipation ledger.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .analytics import EnergyLedger, LedgerRow
from .fields import (Field, Grid, edge_energy, energy, gradient, integrate,
                     laplacian, sup_local_energy)
from .poisson import helmholtz_solve_field
from . import targets as tg


class StepRejectionError(RuntimeError):
    pass


class NumericalBlowupError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    alpha: float
    beta: float = 0.0
    scheme: str = "heun"
    dt_safety: float = 0.2
    t_end: float = 1.0
    snapshot_every: int = 0  # steps; 0 disables
    ledger_every: int = 10
    dt: float | None = None  # explicit override; default from cfl_dt
    imex_dt_factor: float = 10.0  # multiple of the explicit cfl step
    tol_mono_coeff: float = 1e-9  # per-step energy increase, relative to E(0)
    ledger_radii: tuple = (1.0,)
    sup_stride: int = 4
    seed: int = 0
    closure: str = "extend"  # ghost policy for the tension operator

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.scheme not in ("heun", "imex"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0 < self.dt_safety <= 1:
            raise ValueError("dt_safety must lie in (0, 1]")
        if self.imex_dt_factor > 25:
            raise ValueError("imex_dt_factor capped at 25")
        if self.closure not in ("constant", "extend"):
            raise ValueError(f"unknown closure {self.closure!r}")


@dataclass
class SimState:
    t: float
    u: Field
    target: object
    step_count: int = 0
    energy: float = 0.0
    e0: float = 0.0
    diss_cum: float = 0.0
    l4_cum: float = 0.0
    last_drift: float = 0.0
    max_energy_increase: float = 0.0
    max_target_distance: float = 0.0
    dt: float = 0.0
    ledger: EnergyLedger = field(default_factory=EnergyLedger)


def cfl_dt(grid: Grid, alpha: float, beta: float, dt_safety: float = 0.2) -> float:
    """Explicit parabolic stability step for the 5-point stencil."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return dt_safety * grid.h ** 2 / (8.0 * (alpha + abs(beta)))


def initial_state(u0: Field, target, cfg: SimConfig) -> SimState:
    tg.check_on_target(u0, target)
    e0 = energy(u0)
    dt = cfg.dt if cfg.dt is not None else _default_dt(u0.grid, cfg)
    state = SimState(t=0.0, u=u0, target=target, energy=e0, e0=e0, dt=dt,
                     ledger=EnergyLedger(radii=tuple(cfg.ledger_radii)))
    _record_ledger(state, cfg)
    return state


def _default_dt(grid: Grid, cfg: SimConfig) -> float:
    dt = cfl_dt(grid, cfg.alpha, cfg.beta, cfg.dt_safety)
    if cfg.scheme == "imex":
        dt *= cfg.imex_dt_factor
    return dt


def _grad4(u: Field) -> float:
    d1, d2 = gradient(u, closure="extend")
    gradsq = np.sum(d1.values ** 2, axis=2) + np.sum(d2.values ** 2, axis=2)
    return integrate(Field(u.grid, gradsq ** 2, 0.0))


def _finish_step(state: SimState, cfg: SimConfig, u_new: Field, drift: float,
                 dt: float) -> None:
    if not np.all(np.isfinite(u_new.values)):
        raise NumericalBlowupError(f"NaN/Inf at step {state.step_count}")
    increment = (u_new.values - state.u.values) / dt
    # u_t = alpha*tau - beta*J tau is orthogonal to J tau, so the energy
    # balance carries gamma1 = alpha/(alpha^2+beta^2), not alpha itself
    gamma1 = cfg.alpha / (cfg.alpha ** 2 + cfg.beta ** 2)
    diss_inc = gamma1 * dt * integrate(
        Field(state.u.grid, np.sum(increment ** 2, axis=2), 0.0))
    l4_inc = dt * _grad4(state.u)
    e_new = energy(u_new)
    state.max_energy_increase = max(state.max_energy_increase,
                                    e_new - state.energy)
    state.max_target_distance = max(
        state.max_target_distance, float(state.target.distance(u_new.values).max()))
    state.diss_cum += diss_inc
    state.l4_cum += l4_inc
    state.u = u_new
    state.energy = e_new
    state.t += dt
    state.step_count += 1
    state.last_drift = drift


def step_heun(state: SimState, cfg: SimConfig) -> SimState:
    """Explicit trapezoidal step followed by constraint projection."""
    dt = state.dt
    u = state.u
    k1 = tg.ll_rhs(u, cfg.alpha, cfg.beta, state.target, cfg.closure)
    pred = Field(u.grid, u.values + dt * k1.values, u.boundary_value)
    pred, _ = tg.renormalize(pred, state.target)
    k2 = tg.ll_rhs(pred, cfg.alpha, cfg.beta, state.target, cfg.closure)
    raw = Field(u.grid, u.values + 0.5 * dt * (k1.values + k2.values),
                u.boundary_value)
    u_new, drift = tg.renormalize(raw, state.target)
    _finish_step(state, cfg, u_new, drift, dt)
    return state


def _imex_candidate(state: SimState, cfg: SimConfig, dt: float) -> tuple[Field, float]:
    u = state.u
    q = u.boundary_value
    rhs_full = tg.ll_rhs(u, cfg.alpha, cfg.beta, state.target, cfg.closure)
    lap = laplacian(u)
    nonstiff = rhs_full.values - cfg.alpha * lap.values
    # lift the boundary constant so the zero-Dirichlet solve applies
    w = Field(u.grid, u.values - q + dt * nonstiff, np.zeros(u.m))
    w_star = helmholtz_solve_field(w, dt * cfg.alpha)
    raw = Field(u.grid, w_star.values + q, q)
    return tg.renormalize(raw, state.target)


def step_imex(state: SimState, cfg: SimConfig) -> SimState:
    """Semi-implicit step: stiff Laplacian solved by fast sine transform,
    guarded by the energy-monotonicity check with step halving."""
    dt = state.dt
    tol = cfg.tol_mono_coeff * state.e0
    for _ in range(6):
        u_new, drift = _imex_candidate(state, cfg, dt)
        if energy(u_new) <= state.energy + tol:
            _finish_step(state, cfg, u_new, drift, dt)
            return state
        dt *= 0.5
    raise StepRejectionError(
        f"step {state.step_count}: energy guard rejected 5 halvings "
        f"(dt down to {dt:.3e})")


_STEPPERS = {"heun": step_heun, "imex": step_imex}


def _record_ledger(state: SimState, cfg: SimConfig) -> None:
    sups = []
    argmax = (0.0, 0.0)
    for r in cfg.ledger_radii:
        val, center = sup_local_energy(state.u, r, cfg.sup_stride)
        sups.append(val)
        argmax = center  # smallest radius listed last wins
    state.ledger.append(LedgerRow(
        t=state.t if state.step_count else 0.0,
        energy=edge_energy(state.u),
        diss_cum=state.diss_cum, l4_cum=state.l4_cum,
        unit_drift=state.last_drift, sup_local=tuple(sups), argmax=argmax))


def run(initial: Field, target, cfg: SimConfig, hooks=()) -> SimState:
    """Step until t_end; ledger rows and hook callbacks on cadence.

    Hooks are called as hook(state) with a read-only view; exceptions
    propagate with step context.
    """
    state = initial_state(initial, target, cfg)
    stepper = _STEPPERS[cfg.scheme]
    for hook in hooks:
        hook(state)
    while state.t < cfg.t_end - 1e-15:
        if state.t + state.dt > cfg.t_end:
            state.dt = cfg.t_end - state.t
        try:
            stepper(state, cfg)
        except (StepRejectionError, NumericalBlowupError) as exc:
            raise type(exc)(f"t={state.t:.6g}: {exc}") from exc
        if cfg.ledger_every and state.step_count % cfg.ledger_every == 0:
            _record_ledger(state, cfg)
        if cfg.snapshot_every and state.step_count % cfg.snapshot_every == 0:
            for hook in hooks:
                hook(state)
    if not cfg.ledger_every or state.step_count % cfg.ledger_every:
        if state.step_count:
            _record_ledger(state, cfg)
    if cfg.snapshot_every and state.step_count % cfg.snapshot_every:
        for hook in hooks:
            hook(state)
    return state
