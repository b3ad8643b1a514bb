"""Constructors for admissible initial metrics and their validation.

The main generator builds the neck-with-bumps profile: a parabolic-in-square
neck gamma(s) = sqrt(alpha + beta s^2) on |s| <= Lambda - delta, turned off
by a C1 quadratic patch of constant second derivative
-beta(Lambda-delta) / (2 delta sqrt(alpha + beta(Lambda-delta)^2)) on the
band Lambda-delta < |s| < Lambda+delta, constant past the band, and finally
blended with a compact-kernel mollification near the two curvature jumps so
the result is C-infinity.  The blend leaves the profile exactly equal to
gamma for |s| <= Lambda - 2 delta and exactly constant for
|s| >= Lambda + 2 delta, and keeps max |d/ds| <= 2 sqrt(beta).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PeriodicGrid, Profile, s_derivative, sectional_curvatures

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(80)


class ConstructionError(ValueError):
    """Initial-data construction cannot be carried out on the given grid."""


@dataclass(frozen=True)
class NeckBumpParams:
    """Parameters of the neck-bump family.

    alpha: neck scale (length^2); beta: slope^2 of the parabolic neck; eta:
    fiber squash in (0, 1] (f = eta * g); lambda_big: gauge constant rho and
    half-extent of the parabolic region; delta_smooth: half-width of each
    corner-smoothing interval.
    """

    alpha: float
    beta: float
    eta: float
    lambda_big: float
    delta_smooth: float

    def __post_init__(self):
        if min(self.alpha, self.beta, self.eta, self.lambda_big, self.delta_smooth) <= 0:
            raise ConstructionError("all neck-bump parameters must be positive")
        if self.eta > 1.0:
            raise ConstructionError("eta must lie in (0, 1]")
        if 2.0 * self.delta_smooth >= self.lambda_big:
            raise ConstructionError("need 2*delta_smooth < lambda_big")


@dataclass(frozen=True)
class ValidationReport:
    """Checkable admissibility conditions of a profile.

    scalar_condition_value = (min R)(max g^2), required > -3;
    epsilon_condition_value = 2(1-eps)^5 + 4(1-eps)^4 with
    eps = 1 - min(f/g), required > 4/3; grad_ok means max|f_s| <= 1.
    The finite-time-singularity clause is dynamical and cannot be checked
    statically; it is reported as determined by the flow.
    """

    ordering_ok: bool
    scalar_condition_value: float
    epsilon_condition_value: float
    grad_ok: bool
    reflection_ok: bool
    eps: float
    min_scalar: float
    max_g: float
    f_grad_max: float
    verdicts: dict = field(default_factory=dict)


def _exp_window(t):
    """exp(-1/t) for t > 0, zero otherwise (C-infinity at 0)."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 1e-12, t, 1.0)
    return np.where(t > 1e-12, np.exp(-1.0 / safe), 0.0)


def smoothstep(t):
    """C-infinity monotone ramp: 0 for t <= 0, 1 for t >= 1."""
    a = _exp_window(t)
    b = _exp_window(1.0 - t)
    return a / (a + b)


class _NeckBumpShape:
    """Pointwise evaluator for the smoothed profile, a fixed function of |s|."""

    def __init__(self, p: NeckBumpParams):
        self.p = p
        a, b, lam, dl = p.alpha, p.beta, p.lambda_big, p.delta_smooth
        self.s_in = lam - dl
        self.s_out = lam + dl
        self.g_in = np.sqrt(a + b * self.s_in ** 2)
        self.dg_in = b * self.s_in / self.g_in
        # constant second derivative of the C1 patch
        self.curv = -b * self.s_in / (2.0 * dl * np.sqrt(a + b * self.s_in ** 2))
        self.cap = self.g_in + dl * self.dg_in
        self.kernel_radius = 0.5 * dl
        # normalize the mollifier with the same quadrature used in convolution
        r = self.kernel_radius
        half = 0.5 * r * (_GL_NODES + 1.0)
        w = 0.5 * r * _GL_WEIGHTS
        self.kernel_mass = 2.0 * float(np.sum(w * self._kernel_raw(half)))

    def _kernel_raw(self, y):
        u = np.asarray(y, dtype=float) / self.kernel_radius
        return _exp_window(1.0 - u ** 2)

    def kernel(self, y):
        return self._kernel_raw(y) / self.kernel_mass

    def capped(self, abs_s):
        """The C1 profile: gamma inside, quadratic patch, constant cap."""
        abs_s = np.asarray(abs_s, dtype=float)
        t = abs_s - self.s_in
        quad = self.g_in + self.dg_in * t + 0.5 * self.curv * t ** 2
        gam = np.sqrt(self.p.alpha + self.p.beta * abs_s ** 2)
        return np.where(abs_s <= self.s_in, gam,
                        np.where(abs_s >= self.s_out, self.cap, quad))

    def blend(self, abs_s):
        """Mollification weight: 1 near the curvature jumps, 0 away from them.

        The ramps span 0.8 * delta on each side, the widest that keeps the
        blend supported inside the I_{2 delta} bands, which keeps the high
        derivatives of the blended profile small.
        """
        dl = self.p.delta_smooth
        d = np.abs(np.asarray(abs_s, dtype=float) - self.p.lambda_big)
        up = smoothstep((d - 0.1 * dl) / (0.8 * dl))
        down = smoothstep((1.9 * dl - d) / (0.8 * dl))
        return up * down

    def _mollified(self, s0: float) -> float:
        """Convolution (kernel * capped)(s0) by Gauss-Legendre on smooth pieces."""
        r = self.kernel_radius
        lo, hi = s0 - r, s0 + r
        cuts = [lo] + [b for b in (self.s_in, self.s_out) if lo < b < hi] + [hi]
        total = 0.0
        for xa, xb in zip(cuts[:-1], cuts[1:]):
            x = 0.5 * (xb - xa) * (_GL_NODES + 1.0) + xa
            w = 0.5 * (xb - xa) * _GL_WEIGHTS
            total += float(np.sum(w * self.kernel(s0 - x) * self.capped(x)))
        return total

    def __call__(self, s):
        """Smoothed profile value(s); even in s by construction."""
        abs_s = np.abs(np.asarray(s, dtype=float))
        scalar = abs_s.ndim == 0
        abs_s = np.atleast_1d(abs_s)
        out = self.capped(abs_s)
        chi = self.blend(abs_s)
        for i in np.nonzero(chi > 0.0)[0]:
            out[i] = (1.0 - chi[i]) * out[i] + chi[i] * self._mollified(abs_s[i])
        return float(out[0]) if scalar else out


def neck_bump(params: NeckBumpParams, grid: PeriodicGrid) -> Profile:
    """Neck-bump initial data: g = h = smoothed gamma, f = eta*g, rho = Lambda.

    The gauge is constant, so s = Lambda * xi in [-Lambda*pi, Lambda*pi].
    Raises ConstructionError when the smoothing intervals are not resolved by
    at least 8 grid points or the cap would not fit on the circle.
    """
    lam, dl = params.lambda_big, params.delta_smooth
    ds = lam * grid.dxi
    if 2.0 * dl < 8.0 * ds:
        raise ConstructionError(
            f"smoothing interval 2*delta = {2*dl:g} spans < 8 grid points (ds = {ds:g})")
    if lam + 2.0 * dl > lam * np.pi - 4.0 * ds:
        raise ConstructionError("smoothing band does not fit on the circle for this Lambda")
    shape = _NeckBumpShape(params)
    s = lam * grid.xi
    warp = shape(s)
    return Profile(grid=grid, f=params.eta * warp, g=warp, h=warp.copy(),
                   rho=np.full(grid.n_points, lam))


def product_data(f0: float, g0: float, h0: float, lambda_big: float,
                 grid: PeriodicGrid) -> Profile:
    """Spatially constant warped product with gauge rho = lambda_big."""
    if min(f0, g0, h0, lambda_big) <= 0:
        raise ConstructionError("product radii and lambda_big must be positive")
    n = grid.n_points
    return Profile(grid=grid, f=np.full(n, float(f0)), g=np.full(n, float(g0)),
                   h=np.full(n, float(h0)), rho=np.full(n, float(lambda_big)))


def perturb(profile: Profile, modes) -> Profile:
    """Add cosine modes amplitude*cos(wavenumber*xi) to chosen warp fields.

    modes: iterable of (wavenumber, amplitude, target) with target one of
    'f', 'g', 'h'.  Even in xi, so reflection symmetry about xi = 0 is kept.
    Raises ConstructionError if any field loses positivity.
    """
    fields = {"f": profile.f.copy(), "g": profile.g.copy(), "h": profile.h.copy()}
    for wavenumber, amplitude, target in modes:
        if target not in fields:
            raise ConstructionError(f"perturbation target must be f, g or h, got {target!r}")
        fields[target] = fields[target] + amplitude * np.cos(int(wavenumber) * profile.grid.xi)
    for name, arr in fields.items():
        if np.min(arr) <= 0.0:
            raise ConstructionError(f"perturbation drives {name} nonpositive")
    return profile.with_fields(f=fields["f"], g=fields["g"], h=fields["h"])


def noise_perturb(profile: Profile, amplitude: float, seed: int,
                  max_wavenumber: int = 6) -> Profile:
    """Seeded random even perturbation of g = h (cosine modes 1..max_wavenumber)."""
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(max_wavenumber)
    coeffs *= amplitude / max(1e-300, float(np.sum(np.abs(coeffs))))
    modes = [(k + 1, float(coeffs[k]), "g") for k in range(max_wavenumber)]
    modes += [(k + 1, float(coeffs[k]), "h") for k in range(max_wavenumber)]
    return perturb(profile, modes)


def reflection_center(profile: Profile, atol_scale: float = 1e-10):
    """Index-doubled reflection center 2c (mod 2n), or None.

    A profile is reflection symmetric about xi_c (c integer or half-integer in
    grid units) iff every field x satisfies x = roll(x[::-1], 2c+1 mod n).
    Returns the roll shift t = 2c+1 (mod n) when one exists for all fields.
    """
    f = profile.f
    tol = atol_scale * float(np.max(np.abs(f)))
    rev = f[::-1]
    candidates = [t for t in range(profile.grid.n_points)
                  if np.allclose(f, np.roll(rev, t), rtol=0.0, atol=tol)]
    for t in candidates:
        ok = True
        for arr in (profile.g, profile.h, profile.rho):
            a_tol = atol_scale * float(np.max(np.abs(arr)))
            if not np.allclose(arr, np.roll(arr[::-1], t), rtol=0.0, atol=a_tol):
                ok = False
                break
        if ok:
            return t
    return None


def validate_assumptions(profile: Profile) -> ValidationReport:
    """Evaluate every statically checkable admissibility condition.

    Verdicts: 'ordering' (f <= g <= h), 'scalar' ((min R)(max g^2) > -3),
    'epsilon' (2(1-eps)^5 + 4(1-eps)^4 > 4/3), 'gradient' (max|f_s| <= 1),
    'reflection', and the three cumulative assumption levels.
    """
    curved = sectional_curvatures(profile)
    min_r = float(np.min(curved.scalar_R))
    max_g = float(np.max(profile.g))
    scalar_value = min_r * max_g ** 2
    eps = 1.0 - float(np.min(profile.f / profile.g))
    eps_value = 2.0 * (1.0 - eps) ** 5 + 4.0 * (1.0 - eps) ** 4
    f_grad_max = float(np.max(np.abs(s_derivative(profile, profile.f, 1))))
    tol = 1e-12 * max_g
    ordering_ok = bool(np.all(profile.f <= profile.g + tol)
                       and np.all(profile.g <= profile.h + tol))
    grad_ok = f_grad_max <= 1.0 + 1e-12
    reflection_ok = reflection_center(profile) is not None
    verdicts = {
        "ordering": ordering_ok,
        "scalar": scalar_value > -3.0,
        "epsilon": eps_value > 4.0 / 3.0,
        "gradient": grad_ok,
        "reflection": reflection_ok,
        "finite_time_singularity": "determined by evolve",
    }
    verdicts["assumption1"] = verdicts["ordering"] and verdicts["scalar"]
    verdicts["assumption2"] = verdicts["assumption1"] and verdicts["epsilon"] and verdicts["gradient"]
    verdicts["assumption3"] = verdicts["assumption2"] and verdicts["reflection"]
    return ValidationReport(
        ordering_ok=ordering_ok,
        scalar_condition_value=scalar_value,
        epsilon_condition_value=eps_value,
        grad_ok=grad_ok,
        reflection_ok=reflection_ok,
        eps=eps,
        min_scalar=min_r,
        max_g=max_g,
        f_grad_max=f_grad_max,
        verdicts=verdicts,
    )
