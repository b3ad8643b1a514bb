from fractions import Fraction

import numpy as np
import pytest

from bergerflow.diagnostics import (AccuracyWarning,
                                    bump_beta, blowup_frame, cutoff_X,
                                    evolution_residual, fit_decay,
                                    gaussian_inner, gaussian_norm,
                                    gradient_sign_changes, hermite_basis,
                                    hermite_basis_exact, hermite_eval,
                                    hermite_norm_sq, hermite_project,
                                    monitor_snapshot, neck_region, nonlocal_I,
                                    oscillator_apply, resample_frame,
                                    synthetic_frame)
from bergerflow.flow import FlowState, SolverConfig, advance_to, evolve, select_dt
from bergerflow.geometry import ContractViolation, PeriodicGrid, Profile
from bergerflow.initial_data import NeckBumpParams, neck_bump, product_data

from helpers import flow_state

NECK = NeckBumpParams(alpha=0.01, beta=0.05, eta=0.9, lambda_big=4.0,
                      delta_smooth=0.2)


@pytest.fixture(scope="module")
def neck_run():
    p = neck_bump(NECK, PeriodicGrid.of_size(1024))
    traj = evolve(flow_state(p), SolverConfig(cfl_safety=0.5, snapshot_stride=20))
    return traj


class TestMonitorSnapshot:
    def test_equal_warps_zero_monitors(self):
        snap = monitor_snapshot(flow_state(product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64))),
                                t_hat=1.0, delta=0.1)
        assert snap.ecc_max == 0.0
        assert snap.q_max == 0.0
        assert snap.recip_gap_max == 0.0

    def test_exact_cylinder_scale_invariants(self):
        # f = g = 2 sqrt(t_hat - t), constant in s
        t_hat, t = 0.25, 0.21
        r = 2.0 * np.sqrt(t_hat - t)
        p = product_data(r, r, r, 1.0, PeriodicGrid.of_size(64))
        snap = monitor_snapshot(FlowState(profile=p, t=t, step_index=0),
                                t_hat=t_hat, delta=0.15)
        assert snap.big_f_min == 0.0
        assert snap.scale_inv["k12"] == pytest.approx(0.25, abs=1e-12)

    def test_unequal_warps_values(self):
        p = product_data(0.5, 1, 1, 1.0, PeriodicGrid.of_size(64))
        snap = monitor_snapshot(flow_state(p), t_hat=1.0, delta=0.1)
        assert snap.recip_gap_max == pytest.approx(1.0, abs=1e-13)
        assert snap.ecc_max == pytest.approx(0.5, abs=1e-13)

    def test_requires_future_t_hat(self):
        p = product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64))
        with pytest.raises(ContractViolation):
            monitor_snapshot(FlowState(profile=p, t=0.5, step_index=0), t_hat=0.25)


class TestNeckRegion:
    def test_gamma_neck_component(self):
        # gamma = sqrt(0.01 + 0.1 s^2), delta = 0.15: the neck component ends
        # where gamma = delta, at |s| = sqrt(0.125); the concave smoothing
        # bands of the capped profile form two further components
        params = NeckBumpParams(alpha=0.01, beta=0.1, eta=1.0, lambda_big=4.0,
                                delta_smooth=0.3)
        p = neck_bump(params, PeriodicGrid.of_size(2048))
        comps = neck_region(flow_state(p), delta=0.15)
        s = 4.0 * p.grid.xi
        neck = [c for c in comps if np.argmin(p.f) in c]
        assert len(neck) == 1
        edge = np.sqrt(0.125)
        assert np.max(np.abs(s[neck[0]])) == pytest.approx(edge, abs=3 * 4.0 * p.grid.dxi)
        for comp in comps:
            if comp is not neck[0]:
                assert np.all(np.abs(np.abs(s[comp]) - 4.0) <= 2 * 0.3 + 1e-9)

    def test_constant_above_delta_empty(self):
        p = product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64))
        assert neck_region(flow_state(p), delta=0.5) == []

    def test_whole_circle(self):
        # f = 1 + 0.3 cos(xi) with delta at the mean: f_ss and log(f/delta)
        # have opposite signs everywhere off the (non-grid) crossing points
        n = 18
        grid = PeriodicGrid.of_size(n)
        f = 1.0 + 0.3 * np.cos(grid.xi)
        p = Profile(grid=grid, f=f, g=f.copy(), h=f.copy(), rho=np.ones(n))
        comps = neck_region(flow_state(p), delta=1.0)
        assert len(comps) == 1
        assert len(comps[0]) == n


class TestBlowupFrame:
    def test_dilation_values(self):
        n = 512
        grid = PeriodicGrid.of_size(n)
        bump = 1.0 - np.cos(grid.xi)
        f = 0.40 + 0.001 * bump
        g = 0.41 + 0.001 * bump
        p = Profile(grid=grid, f=f, g=g, h=g.copy(), rho=np.ones(n))
        frame = blowup_frame(FlowState(profile=p, t=0.21, step_index=0),
                             t_hat=0.25, neck_index=n // 2)
        assert frame.tau == pytest.approx(-np.log(0.04), abs=1e-12)
        k = n // 2 + int(round(0.1 / grid.dxi))
        assert frame.sigma[k] == pytest.approx(grid.xi[k] / 0.2, rel=1e-9)
        assert frame.u[n // 2] == pytest.approx(1.0, abs=1e-12)
        assert frame.x[n // 2] == pytest.approx(-0.025, abs=1e-12)
        assert np.allclose(frame.x, frame.u - frame.v)
        assert frame.sigma[n // 2] == 0.0

    def test_neck_must_be_local_min(self):
        p = product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64))
        q = p.with_fields(f=1.0 + 0.1 * np.cos(p.grid.xi))
        with pytest.raises(ContractViolation):
            blowup_frame(flow_state(q), t_hat=1.0, neck_index=32)  # xi=0 is the max


class TestNonlocalTerm:
    def test_constant_frame_zero(self):
        sigma = np.linspace(-3, 3, 301)
        frame = synthetic_frame(sigma, np.ones_like(sigma), np.ones_like(sigma), tau=5.0)
        assert np.max(np.abs(nonlocal_I(frame))) <= 1e-12

    def test_quadratic_frame_matches_closed_form(self):
        tau = 5.0
        sigma = np.linspace(-0.5, 0.5, 2001)
        u = 1.0 + sigma ** 2 / tau
        frame = synthetic_frame(sigma, u, u.copy(), tau=tau)
        curly = nonlocal_I(frame)
        window = np.abs(sigma) <= 0.2
        approx = 6.0 * sigma / tau
        mask = window & (np.abs(sigma) > 0.05)
        rel = np.max(np.abs((curly[mask] - approx[mask]) / approx[mask]))
        assert rel <= 0.02

    def test_even_frame_gives_odd_term(self):
        sigma = np.linspace(-2, 2, 501)
        u = 1.0 + 0.1 * np.exp(-sigma ** 2)
        v = 1.0 + 0.05 * np.cos(sigma)
        frame = synthetic_frame(sigma, u, v, tau=4.0)
        curly = nonlocal_I(frame)
        assert np.max(np.abs(curly + curly[::-1])) <= 1e-6 * np.max(np.abs(curly))

    def test_native_frame_parity(self, neck_run):
        state = neck_run.snapshots[len(neck_run.snapshots) // 2]
        frame = blowup_frame(state, neck_run.t_hat, int(np.argmin(state.profile.f)))
        grid, fields = resample_frame(frame)
        x = fields["x"]
        curly = fields["nonlocal_I"]
        assert np.max(np.abs(x - x[::-1])) <= 1e-10 * np.max(np.abs(x))
        assert np.max(np.abs(curly + curly[::-1])) <= 1e-10 * np.max(np.abs(curly))


class TestCutoff:
    def test_plateau_and_support(self):
        tau, eps = 6.0, 0.5
        reach = np.exp(0.5 * eps * tau)
        sigma = np.linspace(-4, 4, 801)
        x = np.cos(sigma)
        frame = synthetic_frame(sigma, 1.0 + x * 0.01, np.ones_like(sigma), tau=tau)
        grid, X = cutoff_X(frame, eps, sigma_max=3.9, n_sigma=801)
        inner = np.abs(grid) <= min(reach, 3.9)
        # X equals the plain resample of x on the plateau of the bump
        _, fields = resample_frame(frame, sigma_max=3.9, n_sigma=801)
        assert np.allclose(X[inner], fields["x"][inner], atol=1e-12)

    def test_bump_shape_values(self):
        assert bump_beta(0.3) == 1.0
        assert bump_beta(1.0) == 1.0
        assert bump_beta(2.0) == 0.0
        assert bump_beta(2.7) == 0.0
        mid = float(bump_beta(1.5))
        assert 0.0 < mid < 1.0
        assert mid == pytest.approx(0.5, abs=1e-12)  # symmetric ramp midpoint

    def test_cutoff_vanishes_outside(self):
        tau, eps = 2.0, 0.5
        reach = np.exp(0.5 * eps * tau)  # ~2.72, cutoff support ends at 2*reach
        sigma = np.linspace(-8, 8, 1601)
        frame = synthetic_frame(sigma, 1.0 + 0.01 * np.cos(sigma),
                                np.ones_like(sigma), tau=tau)
        grid, X = cutoff_X(frame, eps, sigma_max=7.9, n_sigma=1601)
        outside = np.abs(grid) >= 2 * reach
        assert np.all(X[outside] == 0.0)
        inside = np.abs(grid) <= reach
        _, fields = resample_frame(frame, sigma_max=7.9, n_sigma=1601)
        assert np.allclose(X[inside], fields["x"][inside], atol=1e-14)


class TestGaussianNorms:
    def test_constant(self):
        sigma = np.linspace(-12, 12, 4097)
        norm = gaussian_norm(sigma, np.ones_like(sigma))
        assert norm ** 2 == pytest.approx(2.0 * np.sqrt(np.pi), abs=1e-8)

    def test_linear(self):
        sigma = np.linspace(-12, 12, 4097)
        norm = gaussian_norm(sigma, sigma)
        assert norm ** 2 == pytest.approx(4.0 * np.sqrt(np.pi), abs=1e-8)

    def test_zero(self):
        sigma = np.linspace(-12, 12, 257)
        assert gaussian_norm(sigma, np.zeros_like(sigma)) == 0.0

    def test_narrow_window_warns(self):
        sigma = np.linspace(-4, 4, 257)
        with pytest.warns(AccuracyWarning):
            gaussian_norm(sigma, np.ones_like(sigma))


class TestHermite:
    def test_low_orders(self):
        assert list(hermite_basis(0)) == [1.0]
        assert list(hermite_basis(1)) == [0.0, 1.0]
        assert list(hermite_basis(2)) == [-2.0, 0.0, 1.0]
        assert list(hermite_basis(3)) == [0.0, -6.0, 0.0, 1.0]

    @pytest.mark.parametrize("k", range(9))
    def test_eigenrelation_exact(self, k):
        coeffs = hermite_basis_exact(k)
        applied = oscillator_apply(coeffs)
        factor = 1 - Fraction(k, 2)
        assert applied == [factor * c for c in coeffs]

    def test_out_of_range(self):
        with pytest.raises(ContractViolation):
            hermite_basis(13)

    def test_orthogonality(self):
        sigma = np.linspace(-16, 16, 8193)
        for j in range(9):
            for k in range(j):
                inner = gaussian_inner(sigma, hermite_eval(j, sigma),
                                       hermite_eval(k, sigma))
                bound = 1e-8 * np.sqrt(hermite_norm_sq(j) * hermite_norm_sq(k))
                assert abs(inner) <= bound

    @pytest.mark.parametrize("k", [0, 1, 2, 5, 8])
    def test_norm_closed_form_matches_quadrature(self, k):
        sigma = np.linspace(-16, 16, 8193)
        quad = gaussian_inner(sigma, hermite_eval(k, sigma), hermite_eval(k, sigma))
        assert quad == pytest.approx(hermite_norm_sq(k), rel=1e-10)


class TestHermiteProjection:
    def test_pure_mode(self):
        sigma = np.linspace(-14, 14, 4097)
        spec = hermite_project(sigma, hermite_eval(2, sigma), k_max=6)
        assert spec.coefficients[2] == pytest.approx(1.0, abs=1e-8)
        others = np.delete(spec.coefficients, 2)
        assert np.max(np.abs(others)) <= 1e-8

    def test_odd_function_kills_even_modes(self):
        sigma = np.linspace(-14, 14, 4097)
        values = sigma ** 3 - 2.0 * sigma
        spec = hermite_project(sigma, values, k_max=8)
        assert np.max(np.abs(spec.coefficients[0::2])) <= 1e-10

    def test_linear_combination(self):
        sigma = np.linspace(-14, 14, 4097)
        values = 3.0 * hermite_eval(0, sigma) + 0.5 * hermite_eval(3, sigma)
        spec = hermite_project(sigma, values, k_max=5)
        assert spec.coefficients[0] == pytest.approx(3.0, abs=1e-8)
        assert spec.coefficients[3] == pytest.approx(0.5, abs=1e-8)

    def test_parseval_consistency(self):
        sigma = np.linspace(-14, 14, 4097)
        values = np.exp(-0.3 * sigma ** 2) * (1.0 + 0.5 * sigma)
        spec = hermite_project(sigma, values, k_max=8)
        total = sum(c ** 2 * hermite_norm_sq(k) for k, c in enumerate(spec.coefficients))
        assert total <= spec.norm_G ** 2 * (1.0 + 1e-6)

    def test_odd_coefficients_on_symmetric_run(self, neck_run):
        state = neck_run.snapshots[len(neck_run.snapshots) // 2]
        frame = blowup_frame(state, neck_run.t_hat, int(np.argmin(state.profile.f)))
        sigma, X = cutoff_X(frame, eps=0.5)
        spec = hermite_project(sigma, X, k_max=8)
        assert np.max(np.abs(spec.coefficients[1::2])) <= 1e-8 * spec.norm_G


class TestDecayFit:
    def test_exact_exponential(self):
        taus = np.linspace(2.0, 6.0, 20)
        fit = fit_decay(taus, np.exp(-1.3 * taus))
        assert fit.slope == pytest.approx(-1.3, abs=1e-12)

    def test_modulated_exponential(self):
        taus = np.linspace(2.0, 12.0, 60)
        fit = fit_decay(taus, np.exp(-taus) * (1.0 + 0.01 * np.sin(taus)))
        assert fit.slope == pytest.approx(-1.0, abs=0.01)

    def test_constant_series(self):
        taus = np.linspace(0.0, 5.0, 10)
        fit = fit_decay(taus, np.full(10, 2.5))
        assert fit.slope == pytest.approx(0.0, abs=1e-14)

    def test_nonpositive_rejected(self):
        taus = np.linspace(0.0, 5.0, 10)
        with pytest.raises(ValueError):
            fit_decay(taus, np.concatenate([np.ones(9), [0.0]]))
        with pytest.raises(ContractViolation):
            fit_decay(taus[:4], np.ones(4))


class TestEvolutionResidual:
    def test_round_homogeneous_zero(self):
        state = flow_state(product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64)))
        cfg = SolverConfig(cfl_safety=0.5)
        a = advance_to(state, 1e-4, cfg)
        b = advance_to(a, 2e-4, cfg)
        res = evolution_residual((state, a, b), "ecc_fg")
        assert res.max_norm <= 1e-12

    def test_homogeneous_berger_ecc_rate(self):
        # reaction value -4 (f/g^3)((f+g)/g)((f-g)/g) = 1.5 matches d/dt
        state = flow_state(product_data(0.5, 1, 1, 1.0, PeriodicGrid.of_size(64)))
        cfg = SolverConfig(cfl_safety=0.2)
        a = advance_to(state, 1e-4, cfg)
        b = advance_to(a, 2e-4, cfg)
        from bergerflow.diagnostics import _quantity_rhs, _two_warp_fields
        rhs_initial = _quantity_rhs("ecc_fg", _two_warp_fields(state.profile))
        assert rhs_initial[0] == pytest.approx(1.5, abs=1e-9)
        rhs_mid = _quantity_rhs("ecc_fg", _two_warp_fields(a.profile))
        ecc0 = (state.profile.f[0] - state.profile.g[0]) / state.profile.g[0]
        ecc2 = (b.profile.f[0] - b.profile.g[0]) / b.profile.g[0]
        centered = (ecc2 - ecc0) / (b.t - state.t)
        assert evolution_residual((state, a, b), "ecc_fg").max_norm <= 1e-6
        assert centered == pytest.approx(rhs_mid[0], abs=1e-5)

    def test_refinement_factor_spot_check(self):
        gentle = NeckBumpParams(alpha=0.04, beta=0.01, eta=0.9, lambda_big=4.0,
                                delta_smooth=1.2)
        cfg = SolverConfig(cfl_safety=0.5)
        coarse0 = flow_state(neck_bump(gentle, PeriodicGrid.of_size(1024)))
        dt0 = select_dt(coarse0, cfg)
        t_star, spacing = 64.0 * dt0, 8.0 * dt0

        def residual(n, spc):
            st = flow_state(neck_bump(gentle, PeriodicGrid.of_size(n)))
            a = advance_to(st, t_star - spc, cfg)
            b = advance_to(a, t_star, cfg)
            c = advance_to(b, t_star + spc, cfg)
            return evolution_residual((a, b, c), "f_s").max_norm

        assert residual(1024, spacing) / residual(2048, spacing / 4.0) >= 12.0

    def test_rejects_three_warp_data(self):
        state = flow_state(product_data(0.5, 0.8, 1.0, 1.0, PeriodicGrid.of_size(64)))
        with pytest.raises(ContractViolation):
            evolution_residual((state, state, state), "ecc_fg")

    def test_unknown_quantity(self):
        state = flow_state(product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64)))
        with pytest.raises(ContractViolation):
            evolution_residual((state, state, state), "bogus")


class TestSignChanges:
    def test_dead_band(self):
        clean = np.concatenate([np.ones(10), -np.ones(10)])
        assert gradient_sign_changes(clean) == 2
        noisy = clean.copy()
        noisy[5] = 1e-9
        assert gradient_sign_changes(noisy) == 2
        assert gradient_sign_changes(np.zeros(16)) == 0


class TestMonotoneAndScaleInvariance:
    def test_recip_gap_nonincreasing(self, neck_run):
        gaps = []
        for snap in neck_run.snapshots:
            gaps.append(float(np.max(1.0 / snap.profile.f - 1.0 / snap.profile.g)))
        assert all(b <= a + 1e-9 for a, b in zip(gaps, gaps[1:]))

    def test_round_solution_bookkeeping(self):
        # on the exact shrinking round solution, (t_hat - t) kappa_vertical
        # stays at 1/4 and the dilated eccentricity x vanishes identically
        state = flow_state(product_data(1, 1, 1, 1.0, PeriodicGrid.of_size(64)))
        traj = evolve(state, SolverConfig(cfl_safety=0.9, snapshot_stride=20))
        for snap in traj.snapshots[::5]:
            m = monitor_snapshot(snap, traj.t_hat, delta=0.1)
            assert m.scale_inv["k12"] == pytest.approx(0.25, abs=1e-6)
            frame = blowup_frame(snap, traj.t_hat, 0)
            assert np.all(frame.x == 0.0)
