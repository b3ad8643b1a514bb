"""Warped Berger metrics on a periodic grid and their curvatures.

A metric state is four positive fields sampled on a uniform grid of angles
xi in [-pi, pi):

    G = ds^2 + f^2 w1qw1 + g^2 w2qw2 + h^2 w3qw3,     ds = rho * dxi,

with (w1, w2, w3) dual to a Milnor frame on SU(2) whose structure constants
are [F_i, F_j] = 2 eps_ijk F_k.  All spatial derivatives are taken in
arclength s, implemented as rho^{-1} d/dxi with fourth-order central
differences; the second derivative is the composition rho^{-1} d/dxi of the
first, which keeps the gauge exact instead of differentiating a sampled
arclength map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Fourth-order central first-derivative stencil (uniform periodic grid).
STENCIL_ORDER = 4


class ContractViolation(ValueError):
    """An operation was called with data violating its preconditions."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic angular grid: xi_k = -pi + k*dxi, k = 0..n-1."""

    n_points: int
    xi: np.ndarray
    dxi: float

    def __post_init__(self):
        if self.n_points < 16 or self.n_points % 2 != 0:
            raise ContractViolation("grid needs n_points >= 16 and even")

    @classmethod
    def of_size(cls, n_points: int) -> "PeriodicGrid":
        dxi = 2.0 * np.pi / n_points
        # centered so that xi[n/2 + m] = -xi[n/2 - m] bitwise (exact parity)
        xi = dxi * (np.arange(n_points) - n_points // 2)
        return cls(n_points=int(n_points), xi=xi, dxi=dxi)


@dataclass(frozen=True)
class Profile:
    """One instant of the geometry: warp radii f, g, h and gauge density rho.

    f, g, h carry length units (fiber radii), rho is ds/dxi (length per
    angle).  All four must be strictly positive everywhere.
    """

    grid: PeriodicGrid
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        for name in ("f", "g", "h", "rho"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != (n,):
                raise ContractViolation(f"{name} must have length {n}")
            if not np.all(np.isfinite(arr)) or np.min(arr) <= 0.0:
                raise ContractViolation(f"{name} must be finite and strictly positive")

    def with_fields(self, f=None, g=None, h=None, rho=None) -> "Profile":
        return Profile(
            grid=self.grid,
            f=self.f if f is None else f,
            g=self.g if g is None else g,
            h=self.h if h is None else h,
            rho=self.rho if rho is None else rho,
        )


@dataclass(frozen=True)
class CurvatureField:
    """Sectional curvatures of the four-metric plus intrinsic fiber curvatures.

    kappa12/23/31 are vertical planes, kappa01/02/03 mixed planes, hat* the
    curvatures of the fiber metric alone; scalar_R is the sum of the six
    sectional curvatures.
    """

    kappa12: np.ndarray
    kappa23: np.ndarray
    kappa31: np.ndarray
    kappa01: np.ndarray
    kappa02: np.ndarray
    kappa03: np.ndarray
    hat12: np.ndarray
    hat23: np.ndarray
    hat31: np.ndarray
    scalar_R: np.ndarray

    def sectional_max_abs(self) -> float:
        """max over the grid of |k01|+|k02|+|k03|+|k12|+|k23|+|k31| (R-scale)."""
        total = (np.abs(self.kappa01) + np.abs(self.kappa02) + np.abs(self.kappa03)
                 + np.abs(self.kappa12) + np.abs(self.kappa23) + np.abs(self.kappa31))
        return float(np.max(total))


def d_dxi(field: np.ndarray, dxi: float) -> np.ndarray:
    """Fourth-order central d/dxi on the periodic grid (last axis).

    Grouped as differences of mirror pairs, so constants map to exact zeros.
    """
    fm2 = np.roll(field, 2, axis=-1)
    fm1 = np.roll(field, 1, axis=-1)
    fp1 = np.roll(field, -1, axis=-1)
    fp2 = np.roll(field, -2, axis=-1)
    return ((fm2 - fp2) + 8.0 * (fp1 - fm1)) / (12.0 * dxi)


def s_derivative(profile: Profile, field: np.ndarray, order: int = 1) -> np.ndarray:
    """Arclength derivative d/ds = rho^{-1} d/dxi of a sampled field.

    order=2 composes two first derivatives, rho^{-1} d/dxi (rho^{-1} d/dxi .),
    so the gauge enters exactly at both stages.
    """
    field = np.asarray(field, dtype=float)
    if field.shape != (profile.grid.n_points,):
        raise ContractViolation("field length does not match the grid")
    if order not in (1, 2):
        raise ContractViolation("order must be 1 or 2")
    first = d_dxi(field, profile.grid.dxi) / profile.rho
    if order == 1:
        return first
    return d_dxi(first, profile.grid.dxi) / profile.rho


def fiber_curvatures_from_arrays(f, g, h):
    """Intrinsic fiber curvatures from warp samples (no s-derivatives).

    For diag(f^2, g^2, h^2) in the Milnor frame:
        hat12 = (f^2-g^2)^2/(fgh)^2 - 3 h^2/(fg)^2 + 2/f^2 + 2/g^2
    and cyclic permutations.
    """
    f2, g2, h2 = f ** 2, g ** 2, h ** 2
    fgh2 = f2 * g2 * h2
    hat12 = (f2 - g2) ** 2 / fgh2 - 3.0 * h2 / (f2 * g2) + 2.0 / f2 + 2.0 / g2
    hat23 = (g2 - h2) ** 2 / fgh2 - 3.0 * f2 / (g2 * h2) + 2.0 / g2 + 2.0 / h2
    hat31 = (f2 - h2) ** 2 / fgh2 - 3.0 * g2 / (f2 * h2) + 2.0 / f2 + 2.0 / h2
    return hat12, hat23, hat31


def fiber_curvatures(profile: Profile):
    """Intrinsic sectional curvatures of the fiber metric of a profile."""
    return fiber_curvatures_from_arrays(profile.f, profile.g, profile.h)


def curvature_from_derivatives(f, g, h, first, second) -> CurvatureField:
    """Assemble all sectional curvatures from warps and their s-derivatives.

    first and second are (3, n) stacks of d/ds and d2/ds2 of (f, g, h).
    Vertical planes subtract the product of logarithmic derivatives from the
    fiber curvature (kappa12 = hat12 - f_s g_s/(fg), cyclic); mixed planes
    are -(second arclength derivative)/warp.
    """
    hat12, hat23, hat31 = fiber_curvatures_from_arrays(f, g, h)
    f_s, g_s, h_s = first
    kappa12 = hat12 - f_s * g_s / (f * g)
    kappa23 = hat23 - g_s * h_s / (g * h)
    kappa31 = hat31 - f_s * h_s / (f * h)
    kappa01 = -second[0] / f
    kappa02 = -second[1] / g
    kappa03 = -second[2] / h
    scalar_R = kappa01 + kappa02 + kappa03 + kappa12 + kappa23 + kappa31
    return CurvatureField(kappa12=kappa12, kappa23=kappa23, kappa31=kappa31,
                          kappa01=kappa01, kappa02=kappa02, kappa03=kappa03,
                          hat12=hat12, hat23=hat23, hat31=hat31, scalar_R=scalar_R)


def warp_derivatives(profile: Profile):
    """(3, n) stacks of first and second arclength derivatives of (f, g, h)."""
    stacked = np.stack([profile.f, profile.g, profile.h])
    first = d_dxi(stacked, profile.grid.dxi) / profile.rho
    second = d_dxi(first, profile.grid.dxi) / profile.rho
    return first, second


def sectional_curvatures(profile: Profile) -> CurvatureField:
    """All six sectional curvatures of the total space, plus scalar_R."""
    first, second = warp_derivatives(profile)
    return curvature_from_derivatives(profile.f, profile.g, profile.h,
                                      first, second)


def profile_extrema(profile: Profile):
    """Pointwise minimum warp M, its global minimum, max g, and neck indices.

    M = min{f, g, h} pointwise; neck candidates are grid indices where f is a
    (periodic) local minimum.
    """
    m_field = np.minimum(np.minimum(profile.f, profile.g), profile.h)
    m_check = float(np.min(m_field))
    g_max = float(np.max(profile.g))
    f = profile.f
    is_min = (f <= np.roll(f, 1)) & (f < np.roll(f, -1))
    necks = np.nonzero(is_min)[0]
    return m_field, m_check, g_max, necks


def _simpson_prefix(values: np.ndarray, step: float) -> np.ndarray:
    """Cumulative integral from index 0 to k for every k, composite Simpson.

    Even spans use pairwise Simpson; odd spans finish with a 3/8 rule over the
    last three intervals (plain trapezoid when only one interval is available).
    """
    n = len(values)
    out = np.zeros(n)
    pair_area = step / 3.0 * (values[:-2:2] + 4.0 * values[1:-1:2] + values[2::2])
    even_cum = np.concatenate(([0.0], np.cumsum(pair_area)))
    out[0::2] = even_cum[: len(out[0::2])]
    # odd k >= 3: Simpson over [0, k-3] plus 3/8 over the final three intervals
    ks = np.arange(3, n, 2)
    if len(ks) > 0:
        tail = 3.0 * step / 8.0 * (values[ks - 3] + 3.0 * values[ks - 2]
                                   + 3.0 * values[ks - 1] + values[ks])
        out[ks] = even_cum[(ks - 3) // 2] + tail
    if n > 1:
        out[1] = 0.5 * step * (values[0] + values[1])
    return out


def circumference(profile: Profile) -> float:
    """Total base-circle length, composite Simpson of rho over xi."""
    rho = profile.rho
    dxi = profile.grid.dxi
    closed = np.concatenate((rho, rho[:1]))
    pair_area = dxi / 3.0 * (closed[:-2:2] + 4.0 * closed[1:-1:2] + closed[2::2])
    return float(np.sum(pair_area))


def signed_arclength_from(profile: Profile, anchor: int) -> np.ndarray:
    """Signed shorter-arc distance S(xi_k) from the anchor grid index.

    Values lie in (-L/2, L/2] where L is the circumference; S[anchor] = 0.
    The Simpson prefix is averaged over the two traversal directions, which
    removes the pair-alignment bias of the composite rule and makes S exactly
    antisymmetric when rho is mirror symmetric about the anchor.
    """
    n = profile.grid.n_points
    rho = np.roll(profile.rho, -anchor)
    closed = np.concatenate((rho, rho[:1]))
    forward = _simpson_prefix(closed, profile.grid.dxi)[:-1]
    reversed_closed = np.concatenate((rho[:1], rho[:0:-1], rho[:1]))
    rev = _simpson_prefix(reversed_closed, profile.grid.dxi)[:-1]
    total = circumference(profile)
    backward = total - rev[(n - np.arange(n)) % n]
    arc = 0.5 * (forward + backward)
    arc[0] = 0.0
    s = np.where(arc <= 0.5 * total, arc, arc - total)
    return np.roll(s, anchor)


def base_distance(profile: Profile, xi_a: float, xi_b: float) -> float:
    """Arclength int rho dxi along the metrically shorter arc.

    The endpoints snap to the nearest grid nodes; this is a grid-resolution
    operation by construction.
    """
    n = profile.grid.n_points
    dxi = profile.grid.dxi
    ia = int(np.rint((xi_a + np.pi) / dxi)) % n
    ib = int(np.rint((xi_b + np.pi) / dxi)) % n
    if ia == ib:
        return 0.0
    s = signed_arclength_from(profile, ia)
    return float(abs(s[ib]))


def arclength_map(profile: Profile) -> np.ndarray:
    """Arclength s(xi) anchored at xi = 0, by the composite trapezoid rule.

    Reporting convenience only; the flow never consumes this map.
    """
    rho = profile.rho
    dxi = profile.grid.dxi
    closed = np.concatenate((rho, rho[:1]))
    steps = 0.5 * dxi * (closed[:-1] + closed[1:])
    s = np.concatenate(([0.0], np.cumsum(steps)))[:-1]
    anchor = int(np.argmin(np.abs(profile.grid.xi)))
    return s - s[anchor]
