"""Shared test utilities: independent oracles and small constructors.

The ODE oracle integrates the reduced two-warp system with its own
step-doubling RK4 controller; it shares no code with the flow module.
"""

import numpy as np

from bergerflow.flow import FlowState
from bergerflow.geometry import PeriodicGrid, Profile


def two_warp_ode_rates(f, g):
    """Reduced system for spatially constant data: df, dg."""
    return -2.0 * f ** 3 / g ** 4, 2.0 * (f ** 2 - 2.0 * g ** 2) / g ** 3


def _ode_rk4(f, g, dt):
    k1 = two_warp_ode_rates(f, g)
    k2 = two_warp_ode_rates(f + 0.5 * dt * k1[0], g + 0.5 * dt * k1[1])
    k3 = two_warp_ode_rates(f + 0.5 * dt * k2[0], g + 0.5 * dt * k2[1])
    k4 = two_warp_ode_rates(f + dt * k3[0], g + dt * k3[1])
    return (f + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            g + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def ode_oracle(f0, g0, t_end, tol=1e-12):
    """Step-doubling adaptive RK4 for the reduced system, to time t_end."""
    f, g, t = float(f0), float(g0), 0.0
    dt = min(1e-3, t_end / 8.0)
    while t < t_end - 1e-15:
        dt = min(dt, t_end - t)
        big = _ode_rk4(f, g, dt)
        half = _ode_rk4(*_ode_rk4(f, g, 0.5 * dt), 0.5 * dt)
        err = max(abs(big[0] - half[0]), abs(big[1] - half[1]))
        scale = max(abs(f), abs(g))
        if err <= tol * scale or dt < 1e-12:
            f, g = half
            t += dt
            if err < 0.1 * tol * scale:
                dt *= 2.0
        else:
            dt *= 0.5
    return f, g


def cosine_profile(n, base=(1.0, 1.1, 1.2), amps=(0.3, 0.2, 0.1),
                   waves=(1, 1, 2), rho_amp=0.1):
    """Smooth analytic profile with three distinct warps and varying gauge."""
    grid = PeriodicGrid.of_size(n)
    xi = grid.xi
    f = base[0] + amps[0] * np.cos(waves[0] * xi)
    g = base[1] + amps[1] * np.cos(waves[1] * xi)
    h = base[2] + amps[2] * np.cos(waves[2] * xi)
    rho = 1.0 + rho_amp * np.sin(xi) ** 2
    return Profile(grid=grid, f=f, g=g, h=h, rho=rho)


def flow_state(profile, t=0.0):
    return FlowState(profile=profile, t=t, step_index=0)
