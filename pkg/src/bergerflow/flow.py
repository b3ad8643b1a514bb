"""Time integration of the gauge-fixed flow system on the fixed xi grid.

The evolved unknowns are (f, g, h, rho) with

    f_t = f_ss + (g_s/g + h_s/h) f_s - f (hat12 + hat31)
    g_t = g_ss + (f_s/f + h_s/h) g_s - g (hat12 + hat23)
    h_t = h_ss + (f_s/f + g_s/g) h_s - h (hat23 + hat31)
    (log rho)_t = f_ss/f + g_ss/g + h_ss/h,

all spatial derivatives in arclength through the evolving gauge.  Because xi
is fixed and rho carries the coordinate change, time and xi derivatives
commute and no gauge commutator is ever applied.  Stepping is classical RK4
with a curvature-scaled parabolic time step; the hot loop works on a stacked
(4, n) state array and shares its curvature algebra with the geometry module
so that the public select_dt/step agree bitwise with evolve.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import (ContractViolation, Profile, curvature_from_derivatives,
                       d_dxi, fiber_curvatures_from_arrays, profile_extrema)


class FlowError(RuntimeError):
    """A step produced nonpositive or non-finite fields."""


class NoSingularityError(RuntimeError):
    """The minimum warp radius is not decreasing; no singular-time fit exists."""


class StopReason(str, Enum):
    resolution_limit = "resolution_limit"
    curvature_cap = "curvature_cap"
    max_steps = "max_steps"
    steady = "steady"


@dataclass(frozen=True)
class FlowState:
    profile: Profile
    t: float
    step_index: int


@dataclass(frozen=True)
class SolverConfig:
    """Step control and stopping knobs.

    min_f_stop is the resolution multiplier: the run halts once
    min f < min_f_stop * (rho * dxi at the minimizer).
    """

    cfl_safety: float = 0.5
    min_f_stop: float = 2.0
    curvature_cap: float = 1e9
    max_steps: int = 500_000
    snapshot_stride: int = 20

    def __post_init__(self):
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ContractViolation("cfl_safety must lie in (0, 1]")
        if self.min_f_stop < 2.0:
            raise ContractViolation("min_f_stop must be >= 2")
        if self.max_steps < 0 or self.snapshot_stride < 1:
            raise ContractViolation("max_steps >= 0 and snapshot_stride >= 1 required")


@dataclass(frozen=True)
class SingularTimeFit:
    t_hat: float
    stderr: float
    slope: float


@dataclass(frozen=True)
class Trajectory:
    snapshots: list
    stop_reason: StopReason
    t_hat: float
    t_hat_stderr: float
    fit_slope: float
    steps_total: int


# ---------------------------------------------------------------------------
# stacked-array kernels (shared by the public ops and the evolve loop)
# ---------------------------------------------------------------------------

def _warp_derivs(y: np.ndarray, dxi: float):
    first = d_dxi(y[:3], dxi) / y[3]
    second = d_dxi(first, dxi) / y[3]
    return first, second


def _rates_from_derivs(y: np.ndarray, first, second):
    f, g, h, rho = y
    f_s, g_s, h_s = first
    hat12, hat23, hat31 = fiber_curvatures_from_arrays(f, g, h)
    out = np.empty_like(y)
    out[0] = second[0] + (g_s / g + h_s / h) * f_s - f * (hat12 + hat31)
    out[1] = second[1] + (f_s / f + h_s / h) * g_s - g * (hat12 + hat23)
    out[2] = second[2] + (f_s / f + g_s / g) * h_s - h * (hat23 + hat31)
    out[3] = rho * (second[0] / f + second[1] / g + second[2] / h)
    return out


def _rates(y: np.ndarray, dxi: float):
    """Field rates for the stacked state y = (f, g, h, rho)."""
    first, second = _warp_derivs(y, dxi)
    return _rates_from_derivs(y, first, second)


def _curvature_scale(y: np.ndarray, dxi: float) -> float:
    """max over the grid of the summed magnitudes of the six curvatures."""
    first, second = _warp_derivs(y, dxi)
    field = curvature_from_derivatives(y[0], y[1], y[2], first, second)
    return field.sectional_max_abs()


def _rk4_tail(y: np.ndarray, dxi: float, dt: float, k1: np.ndarray) -> np.ndarray:
    k2 = _rates(y + 0.5 * dt * k1, dxi)
    k3 = _rates(y + 0.5 * dt * k2, dxi)
    k4 = _rates(y + dt * k3, dxi)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4(y: np.ndarray, dxi: float, dt: float) -> np.ndarray:
    return _rk4_tail(y, dxi, dt, _rates(y, dxi))


def _stacked(profile: Profile) -> np.ndarray:
    return np.stack([profile.f, profile.g, profile.h, profile.rho])


def _unstack(y: np.ndarray, grid) -> Profile:
    return Profile(grid=grid, f=y[0], g=y[1], h=y[2], rho=y[3])


def rhs(state: FlowState):
    """Time derivatives (df, dg, dh, drho) of the full three-warp system."""
    k = _rates(_stacked(state.profile), state.profile.grid.dxi)
    return k[0], k[1], k[2], k[3]


def select_dt(state: FlowState, config: SolverConfig, curvature=None) -> float:
    """Parabolic step: cfl * (min rho*dxi)^2 / (2 + curvature scale).

    The curvature scale is the grid maximum of the summed magnitudes of the
    six sectional curvatures (the scalar-curvature scale), so the step tracks
    both the diffusion limit and the stiff reaction near the singularity.
    """
    p = state.profile
    if curvature is None:
        scale = _curvature_scale(_stacked(p), p.grid.dxi)
    else:
        scale = curvature.sectional_max_abs()
    ds_min = float(np.min(p.rho)) * p.grid.dxi
    return config.cfl_safety * ds_min ** 2 / (2.0 + scale)


def step(state: FlowState, dt: float) -> FlowState:
    """One classical RK4 step of all four fields simultaneously."""
    if dt == 0.0:
        return state
    p = state.profile
    y = _rk4(_stacked(p), p.grid.dxi, dt)
    if not np.all(np.isfinite(y)) or np.min(y) <= 0.0:
        raise FlowError("a field left the positive cone during a step")
    return FlowState(profile=_unstack(y, p.grid), t=state.t + dt,
                     step_index=state.step_index + 1)


def advance_to(state: FlowState, t_end: float, config: SolverConfig) -> FlowState:
    """March the flow to exactly t_end, clamping the final steps."""
    while state.t < t_end - 1e-15 * max(1.0, t_end):
        dt = min(select_dt(state, config), t_end - state.t)
        state = step(state, dt)
    return state


def fit_singular_time(ts, mchecks, fit_window: float = 0.25) -> SingularTimeFit:
    """Least-squares fit of mcheck^2 = slope*(t_hat - t) on the trailing window.

    fit_window is the fraction of trailing samples used (at least 8).  Raises
    NoSingularityError when the window is too short, mcheck is not strictly
    decreasing there, or the fitted slope is nonpositive.
    """
    ts = np.asarray(ts, dtype=float)
    mchecks = np.asarray(mchecks, dtype=float)
    if len(ts) < 8:
        raise NoSingularityError("need at least 8 snapshots to fit the singular time")
    w = max(8, int(np.ceil(fit_window * len(ts))))
    t_win = ts[-w:]
    m_win = mchecks[-w:]
    if np.any(np.diff(m_win) >= 0.0):
        raise NoSingularityError("min warp radius is not decreasing over the fit window")
    y = m_win ** 2
    design = np.column_stack([np.ones_like(t_win), t_win])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    c0, c1 = coef
    slope = -c1
    if slope <= 0.0:
        raise NoSingularityError("fitted slope of mcheck^2 is nonpositive")
    t_hat = c0 / slope
    resid = y - design @ coef
    dof = max(1, len(t_win) - 2)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    grad = np.array([-1.0 / c1, c0 / c1 ** 2])
    var = float(grad @ cov @ grad)
    return SingularTimeFit(t_hat=float(t_hat), stderr=float(np.sqrt(max(var, 0.0))),
                           slope=float(slope))


def estimate_T(trajectory: Trajectory, fit_window: float = 0.25) -> SingularTimeFit:
    """Singular-time fit from a trajectory's snapshots (see fit_singular_time)."""
    ts = [s.t for s in trajectory.snapshots]
    ms = [profile_extrema(s.profile)[1] for s in trajectory.snapshots]
    return fit_singular_time(ts, ms, fit_window)


def evolve(initial: FlowState, config: SolverConfig,
           fit_window: float = 0.25) -> Trajectory:
    """March the flow until a stop criterion fires and fit the singular time.

    Stops: under-resolved neck (min f below min_f_stop grid cells), curvature
    above curvature_cap, max_steps, or a steady state.  Snapshots are recorded
    every snapshot_stride steps plus the initial and final states.
    """
    grid = initial.profile.grid
    dxi = grid.dxi
    y = _stacked(initial.profile)
    t = initial.t
    step_index = initial.step_index
    snapshots = [initial]
    last_recorded = step_index
    steps_done = 0
    stop = None

    while True:
        if steps_done >= config.max_steps:
            stop = StopReason.max_steps
            break
        first, second = _warp_derivs(y, dxi)
        scale = curvature_from_derivatives(y[0], y[1], y[2], first,
                                           second).sectional_max_abs()
        if scale > config.curvature_cap:
            stop = StopReason.curvature_cap
            break
        i_min = int(np.argmin(y[0]))
        if y[0, i_min] < config.min_f_stop * y[3, i_min] * dxi:
            stop = StopReason.resolution_limit
            break
        ds_min = float(np.min(y[3])) * dxi
        dt = config.cfl_safety * ds_min ** 2 / (2.0 + scale)
        if dt < 1e-15 * max(t, 1.0):
            stop = StopReason.resolution_limit
            break
        y_new = _rk4_tail(y, dxi, dt, _rates_from_derivs(y, first, second))
        if not np.all(np.isfinite(y_new)) or np.min(y_new) <= 0.0:
            stop = StopReason.curvature_cap
            break
        if steps_done % 512 == 0:
            drift = float(np.max(np.abs(y_new[:3] - y[:3])))
            if drift < 1e-14 * float(np.max(y[1])):
                y, t, step_index = y_new, t + dt, step_index + 1
                steps_done += 1
                stop = StopReason.steady
                break
        y, t, step_index = y_new, t + dt, step_index + 1
        steps_done += 1
        if step_index - last_recorded >= config.snapshot_stride:
            snapshots.append(FlowState(profile=_unstack(y, grid), t=t,
                                       step_index=step_index))
            last_recorded = step_index

    if snapshots[-1].step_index != step_index:
        snapshots.append(FlowState(profile=_unstack(y, grid), t=t,
                                   step_index=step_index))

    try:
        fit = fit_singular_time([s.t for s in snapshots],
                                [profile_extrema(s.profile)[1] for s in snapshots],
                                fit_window)
        t_hat, stderr, slope = fit.t_hat, fit.stderr, fit.slope
    except NoSingularityError:
        t_hat = stderr = slope = float("nan")
    return Trajectory(snapshots=snapshots, stop_reason=stop, t_hat=t_hat,
                      t_hat_stderr=stderr, fit_slope=slope, steps_total=steps_done)
