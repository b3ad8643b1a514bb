"""Generic frame-based curvature oracle, independent of the closed forms.

The metric is assembled as G = diag(1, f^2, g^2, h^2) in the anholonomic
frame (F0, F1, F2, F3) with F0 = d/ds and (F1, F2, F3) the Milnor frame,
[F_i, F_j] = 2 eps_ijk F_k, [F0, F_i] = 0.  Connection coefficients come from
the frame Koszul formula, curvature from the generic bracket formula

    R(Fa, Fb)Fc = grad_a grad_b Fc - grad_b grad_a Fc - grad_[a,b] Fc,

with every s-derivative taken numerically by the module stencil.  Nothing
here reuses the closed-form curvature expressions, so agreement with
geometry.sectional_curvatures is a real check: the gap must shrink at the
stencil order under grid refinement.
"""

from __future__ import annotations

import numpy as np

from .geometry import CurvatureField, Profile, d_dxi

# Milnor structure constants c[i][j][k] with [F_i, F_j] = c^k_ij F_k (i,j,k in 1..3,
# stored 0-based over the full 4-frame; index 0 is the base direction).
_STRUCTURE = np.zeros((4, 4, 4))
for (_i, _j, _k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
    _STRUCTURE[_i, _j, _k] = 2.0
    _STRUCTURE[_j, _i, _k] = -2.0


def _connection(G_diag: np.ndarray, dG_diag: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Frame connection Gamma^d_{ab} from metric samples and their s-derivatives.

    2 <grad_a F_b, F_c> = d_a G_bc + d_b G_ac - d_c G_ab
                          + <[F_a,F_b],F_c> - <[F_b,F_c],F_a> + <[F_c,F_a],F_b>,
    where only d_0 acts (components depend on s alone) and the metric is diagonal.
    """
    dim, n = G_diag.shape
    gamma_low = np.zeros((dim, dim, dim, n))
    for a in range(dim):
        for b in range(dim):
            for cc in range(dim):
                term = np.zeros(n)
                if a == 0 and b == cc:
                    term = term + dG_diag[b]
                if b == 0 and a == cc:
                    term = term + dG_diag[a]
                if cc == 0 and a == b:
                    term = term - dG_diag[a]
                term = term + c[a, b, cc] * G_diag[cc]
                term = term - c[b, cc, a] * G_diag[a]
                term = term + c[cc, a, b] * G_diag[b]
                gamma_low[a, b, cc] = 0.5 * term
    return gamma_low / G_diag[np.newaxis, np.newaxis, :, :]


def _sectional(G_diag, gamma, dgamma, c, a, b):
    """<R(Fa,Fb)Fb, Fa> / (G_aa G_bb) from the generic curvature contraction."""
    dim = G_diag.shape[0]
    # component along F_a of R(Fa, Fb)Fb
    comp = np.zeros_like(G_diag[0])
    if a == 0:
        comp = comp + dgamma[b, b, a]
    if b == 0:
        comp = comp - dgamma[a, b, a]
    for m in range(dim):
        comp = comp + gamma[b, b, m] * gamma[a, m, a] - gamma[a, b, m] * gamma[b, m, a]
        comp = comp - c[a, b, m] * gamma[m, b, a]
    return comp * G_diag[a] / (G_diag[a] * G_diag[b])


def _fiber_oracle(profile: Profile):
    """Fiber sectional curvatures from structure constants alone (3D frame)."""
    n = profile.grid.n_points
    G_diag = np.stack([np.ones(n), profile.f ** 2, profile.g ** 2, profile.h ** 2])
    zero = np.zeros_like(G_diag)
    gamma = _connection(G_diag, zero, _STRUCTURE)
    # zero out every coefficient touching the base direction: fiber metric only
    gamma[0, :, :] = 0.0
    gamma[:, 0, :] = 0.0
    gamma[:, :, 0] = 0.0
    dgamma = np.zeros_like(gamma)
    hat12 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 1, 2)
    hat23 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 2, 3)
    hat31 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 3, 1)
    return hat12, hat23, hat31


def riemann_oracle(profile: Profile) -> CurvatureField:
    """Six sectional curvatures by generic tensor contraction in the frame.

    Metric components and connection coefficients are differentiated in s
    numerically (rho^{-1} d/dxi, module stencil); no closed-form curvature
    expression is consulted.
    """
    n = profile.grid.n_points
    dxi = profile.grid.dxi
    rho = profile.rho

    def ds(field):
        return d_dxi(field, dxi) / rho

    G_diag = np.stack([np.ones(n), profile.f ** 2, profile.g ** 2, profile.h ** 2])
    dG_diag = np.stack([np.zeros(n), ds(G_diag[1]), ds(G_diag[2]), ds(G_diag[3])])
    gamma = _connection(G_diag, dG_diag, _STRUCTURE)
    dgamma = np.empty_like(gamma)
    for a in range(4):
        for b in range(4):
            for c in range(4):
                dgamma[a, b, c] = ds(gamma[a, b, c])

    k01 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 0, 1)
    k02 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 0, 2)
    k03 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 0, 3)
    k12 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 1, 2)
    k23 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 2, 3)
    k31 = _sectional(G_diag, gamma, dgamma, _STRUCTURE, 3, 1)
    hat12, hat23, hat31 = _fiber_oracle(profile)
    scalar_R = k01 + k02 + k03 + k12 + k23 + k31
    return CurvatureField(kappa12=k12, kappa23=k23, kappa31=k31,
                          kappa01=k01, kappa02=k02, kappa03=k03,
                          hat12=hat12, hat23=hat23, hat31=hat31, scalar_R=scalar_R)


def curvature_gap(field_a: CurvatureField, field_b: CurvatureField) -> dict:
    """Max pointwise gaps between two curvature computations, per plane."""
    gaps = {}
    for name in ("kappa12", "kappa23", "kappa31", "kappa01", "kappa02", "kappa03"):
        gaps[name] = float(np.max(np.abs(getattr(field_a, name) - getattr(field_b, name))))
    gaps["max"] = max(gaps.values())
    return gaps
