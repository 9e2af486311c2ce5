"""Scalar solver: prepared data, profile scheme, reconstruction, references."""

import numpy as np
import pytest

from phasefold import transport
from phasefold.registry import rational_r
from phasefold.scalar import (
    ScalarState,
    build_scalar_problem,
    exact_phase_constant_c,
    one_mode_init,
    reconstruct,
    solve_asymptotic,
    solve_direct_reference,
    solve_ngo,
    solve_phase,
    step_profile,
    uncorrected_init,
    well_prepared_init,
)
from phasefold.spectral import NumericsError, phase_to_tau, trig_interpolate, trig_sample

from conftest import a_smooth, alpha_smooth, c_cos2, brute_force_tau_antiderivative

ZERO = lambda x: np.zeros_like(np.asarray(x, dtype=float))


def make_problem(eps=1e-2, n_x=32, n_tau=64, t_final=0.1, **kw):
    defaults = dict(c=c_cos2, a=a_smooth, r=rational_r, alpha=alpha_smooth)
    defaults.update(kw)
    return build_scalar_problem(
        epsilon=eps, n_x=n_x, n_tau=n_tau, t_final=t_final, **defaults
    )


class TestWellPreparedInit:
    def test_zero_source_gives_flat_profile(self):
        prob = make_problem(r=lambda u: np.zeros_like(u))
        v0 = well_prepared_init(prob)
        alpha = alpha_smooth(prob.xgrid.nodes)
        assert np.max(np.abs(v0 - alpha[:, None])) <= 1e-14

    def test_linear_source_needs_no_correction(self):
        # e^{-i tau} r(e^{i tau} a) is tau-independent for linear r
        prob = make_problem(r=lambda u: u)
        v0 = well_prepared_init(prob)
        alpha = alpha_smooth(prob.xgrid.nodes)
        assert np.max(np.abs(v0 - alpha[:, None])) <= 1e-13

    def test_quadratic_source_closed_form(self):
        # r(u) = u^2: the integrand is a^2 e^{i tau}, whose antiderivative is
        # -i a^2 e^{i tau}, so V = alpha + (eps/a)(-i alpha^2)(1 - e^{i tau})
        eps = 1e-3
        prob = make_problem(eps=eps, r=lambda u: u * u)
        v0 = well_prepared_init(prob)
        x = prob.xgrid.nodes
        tau = prob.taugrid.nodes
        alpha = alpha_smooth(x)[:, None]
        expected = alpha + (eps / a_smooth(x)[:, None]) * (-1j * alpha**2) * (
            1 - np.exp(1j * tau)[None, :]
        )
        assert np.max(np.abs(v0 - expected)) <= 1e-9

    def test_constraint_at_tau_zero(self):
        for eps in (1.0, 1e-2, 1e-4):
            prob = make_problem(eps=eps)
            v0 = well_prepared_init(prob)
            alpha = alpha_smooth(prob.xgrid.nodes)
            assert np.max(np.abs(v0[:, 0] - alpha)) <= 1e-12

    def test_against_quadrature_oracle(self):
        # full corrected data rebuilt through the independent trapezoid L^-1
        eps = 1e-3
        prob = make_problem(eps=eps, n_x=8)
        v0 = well_prepared_init(prob)
        x = prob.xgrid.nodes
        tau = prob.taugrid.nodes
        for j in range(prob.xgrid.n):
            aj = alpha_smooth(x)[j]
            h = lambda t: np.exp(-1j * t) * rational_r(np.exp(1j * t) * aj)
            g = brute_force_tau_antiderivative(h, np.concatenate([[0.0], tau]))
            expected = aj + eps / a_smooth(x)[j] * (g[0] - g[1:])
            assert np.max(np.abs(v0[j] - expected)) <= 1e-7

    def test_vanishing_a_is_bounded_and_pinned(self):
        prob = make_problem(eps=1e-3, a=lambda x: 1.0 + np.cos(2 * x))
        v0 = well_prepared_init(prob)
        alpha = alpha_smooth(prob.xgrid.nodes)
        assert np.all(np.isfinite(v0))
        assert np.max(np.abs(v0[:, 0] - alpha)) <= 1e-12
        # node at a = 0 carries (almost) no correction under the regularized factor
        j0 = int(np.argmin(np.abs(a_smooth(prob.xgrid.nodes) - 0.5)))
        assert np.max(np.abs(v0 - alpha[:, None])) <= 10.0


class TestOneModeInit:
    def test_reduces_to_uncorrected_without_beta(self):
        prob = make_problem()
        v0, s0 = one_mode_init(prob)
        assert np.max(np.abs(v0 - uncorrected_init(prob))) == 0.0
        assert np.max(np.abs(s0)) == 0.0

    def test_unit_amplitude(self):
        prob = make_problem(alpha=lambda x: np.ones_like(x))
        v0, _ = one_mode_init(prob)
        assert np.max(np.abs(v0 - 1.0)) <= 1e-14

    def test_reconstruct_at_t0_recovers_oscillatory_data(self):
        beta = lambda x: 0.4 + 0.3 * np.sin(2 * x)
        prob = make_problem(eps=1e-3, beta=beta)
        v0, s0 = one_mode_init(prob)
        state = ScalarState(v=v0, s=s0, t=0.0)
        u0 = reconstruct(state, prob)
        x = prob.xgrid.nodes
        expected = alpha_smooth(x) * np.exp(1j * beta(x) / prob.epsilon)
        assert np.max(np.abs(u0 - expected)) <= 1e-10


class TestStepProfile:
    def test_single_tau_mode_division(self):
        eps = 0.05
        prob = make_problem(eps=eps, c=ZERO, r=lambda u: np.zeros_like(u))
        tau = prob.taugrid.nodes
        v0 = np.repeat(np.exp(1j * tau)[None, :], prob.xgrid.n, axis=0)
        state = ScalarState(v=v0, s=np.zeros(prob.xgrid.n), t=0.0)
        new = step_profile(state, prob)
        mu = prob.dt * a_smooth(prob.xgrid.nodes) / eps
        expected = np.exp(1j * tau)[None, :] / (1 + 1j * mu)[:, None]
        assert np.max(np.abs(new.v - expected)) <= 1e-12

    def test_reduces_to_plain_upwind_for_flat_profiles(self):
        prob = make_problem(a=ZERO, r=lambda u: np.zeros_like(u))
        alpha = alpha_smooth(prob.xgrid.nodes)
        v0 = np.repeat(alpha[:, None], prob.taugrid.n, axis=1)
        state = ScalarState(v=v0, s=np.zeros(prob.xgrid.n), t=0.0)
        new = step_profile(state, prob)
        c_nodes = c_cos2(prob.xgrid.nodes)
        manual = alpha - prob.dt * c_nodes * transport.upwind_difference(
            alpha, c_nodes, prob.xgrid.dx
        )
        assert np.max(np.abs(new.v - manual[:, None])) <= 1e-13

    def test_flat_profile_without_transport_is_fixed(self):
        prob = make_problem(c=ZERO, r=lambda u: np.zeros_like(u))
        alpha = alpha_smooth(prob.xgrid.nodes)
        v0 = np.repeat(alpha[:, None], prob.taugrid.n, axis=1)
        state = ScalarState(v=v0, s=np.zeros(prob.xgrid.n), t=0.0)
        new = step_profile(state, prob)
        assert np.max(np.abs(new.v - v0)) <= 1e-13

    def test_cfl_guard(self):
        prob = make_problem()
        object.__setattr__(prob, "dt", 2 * prob.xgrid.dx)
        state = ScalarState(
            v=uncorrected_init(prob), s=np.zeros(prob.xgrid.n), t=0.0
        )
        with pytest.raises(NumericsError):
            step_profile(state, prob)

    def test_sup_norm_stability_without_source(self):
        # upwind convexity plus the resolvent contraction.  The contraction
        # bounds the continuous interpolant sup, which the grid max can
        # undersample, so the norm is measured on a 16x oversampled tau grid.
        def sup(v, m=16):
            n = v.shape[1]
            coeff = np.fft.fft(v, axis=1) / n
            big = np.zeros((v.shape[0], m * n), dtype=complex)
            big[:, : n // 2] = coeff[:, : n // 2]
            big[:, -(n // 2) + 1 :] = coeff[:, n // 2 + 1 :]
            big[:, n // 2] = 0.5 * coeff[:, n // 2]
            big[:, -(n // 2)] += 0.5 * coeff[:, n // 2]
            return np.max(np.abs(np.fft.ifft(big * (m * n), axis=1)))

        for eps in (1.0, 1e-2, 1e-4):
            prob = make_problem(eps=eps, r=lambda u: np.zeros_like(u))
            state = ScalarState(
                v=well_prepared_init(make_problem(eps=eps)),
                s=np.zeros(prob.xgrid.n),
                t=0.0,
            )
            prev = sup(state.v)
            for _ in range(20):
                state = step_profile(state, prob)
                cur = sup(state.v)
                assert cur <= prev * (1 + 1e-10)
                prev = cur

    def test_first_step_rate_bounded_uniformly_in_eps(self):
        rates = []
        for eps in (1e-1, 1e-2, 1e-3):
            prob = make_problem(eps=eps, n_x=64)
            v0 = well_prepared_init(prob)
            state = ScalarState(v=v0, s=np.zeros(prob.xgrid.n), t=0.0)
            new = step_profile(state, prob)
            rates.append(np.max(np.abs(new.v - v0)) / prob.dt)
        assert max(rates) / min(rates) <= 3.0


class TestReconstruct:
    def test_flat_profile_carries_the_phase_factor(self):
        prob = make_problem(eps=1e-2)
        s = 0.123 + 0.05 * np.sin(2 * prob.xgrid.nodes)
        v = np.ones((prob.xgrid.n, prob.taugrid.n), dtype=complex) * 2.5
        u = reconstruct(ScalarState(v=v, s=s, t=0.0), prob)
        tau_star = phase_to_tau(s, prob.epsilon)
        assert np.max(np.abs(u - 2.5 * np.exp(1j * tau_star))) <= 1e-12

    def test_single_mode_profile(self):
        prob = make_problem(eps=1e-2)
        tau = prob.taugrid.nodes
        s = np.full(prob.xgrid.n, 0.321)
        v = np.repeat(np.exp(1j * tau)[None, :], prob.xgrid.n, axis=0)
        u = reconstruct(ScalarState(v=v, s=s, t=0.0), prob)
        tau_star = phase_to_tau(s, prob.epsilon)
        assert np.max(np.abs(u - np.exp(2j * tau_star))) <= 1e-12

    def test_initial_time_recovers_alpha(self):
        prob = make_problem(eps=1e-3)
        state = ScalarState(
            v=well_prepared_init(prob), s=np.zeros(prob.xgrid.n), t=0.0
        )
        u0 = reconstruct(state, prob)
        assert np.max(np.abs(u0 - alpha_smooth(prob.xgrid.nodes))) <= 1e-12


class TestPhaseSolvers:
    def test_exact_phase_constant_c_examples(self):
        prob = make_problem(c=lambda x: np.ones_like(x), a=lambda x: np.full_like(x, 1.7))
        s = exact_phase_constant_c(prob, 0.25)
        assert np.max(np.abs(s - 0.425)) <= 1e-12
        assert np.max(np.abs(exact_phase_constant_c(prob, 0.0))) <= 1e-14

    def test_exact_phase_rejects_variable_c(self):
        with pytest.raises(NumericsError):
            exact_phase_constant_c(make_problem(), 0.1)

    def test_zero_forcing_zero_start(self):
        prob = make_problem(a=ZERO)
        for method in ("exact", "upwind1", "spectral_rk4"):
            s = solve_phase(prob, 0.1, method)
            assert np.max(np.abs(s)) <= 1e-12

    def test_pointwise_integration_without_transport(self):
        beta = lambda x: 0.1 * np.cos(2 * x)
        prob = make_problem(c=ZERO, beta=beta)
        s = solve_phase(prob, 0.1, "spectral_rk4")
        expected = beta(prob.xgrid.nodes) + 0.1 * a_smooth(prob.xgrid.nodes)
        assert np.max(np.abs(s - expected)) <= 1e-10

    def test_spectral_rk4_against_closed_form(self):
        prob = make_problem(c=lambda x: np.ones_like(x), n_x=64)
        s = solve_phase(prob, 0.1, "spectral_rk4")
        expected = exact_phase_constant_c(prob, 0.1)
        assert np.max(np.abs(s - expected)) <= 1e-8


class TestPipelineOracles:
    @pytest.mark.parametrize("eps", [1.0, 1e-3])
    def test_pure_rotation_exact(self, eps):
        prob = make_problem(eps=eps, c=ZERO, r=lambda u: np.zeros_like(u))
        result = solve_ngo(prob, phase_method="exact", init="corrected")
        x = prob.xgrid.nodes
        expected = alpha_smooth(x) * np.exp(1j * a_smooth(x) * prob.t_final / eps)
        assert np.max(np.abs(result.u - expected)) <= 1e-10

    def test_constant_c_linear_source_first_order(self):
        lam = 0.5
        eps = 1e-2
        errs = []
        for n in (50, 100, 200):
            prob = make_problem(
                eps=eps, n_x=n, c=lambda x: np.ones_like(x), r=lambda u: lam * u
            )
            result = solve_ngo(prob, phase_method="exact", init="corrected")
            x = prob.xgrid.nodes
            s = exact_phase_constant_c(prob, prob.t_final)
            shifted = alpha_smooth(np.mod(x - prob.t_final - prob.xgrid.lower,
                                          prob.xgrid.length) + prob.xgrid.lower)
            expected = shifted * np.exp(-lam * prob.t_final) * np.exp(
                1j * phase_to_tau(s, eps)
            )
            errs.append(np.max(np.abs(result.u - expected)))
        slope = -np.polyfit(np.log([50, 100, 200]), np.log(errs), 1)[0]
        assert 0.75 <= slope <= 1.35

    def test_ngo_and_direct_agree_at_unit_wavelength(self):
        prob = make_problem(eps=1.0, n_x=64)
        result = solve_ngo(prob, phase_method="exact", init="corrected")
        grid_ref, u_ref = solve_direct_reference(prob, 4000)
        err = np.max(np.abs(result.u - trig_sample(u_ref, grid_ref, prob.xgrid.nodes)))
        assert err <= 2.0 * (prob.dt + prob.xgrid.dx)


class TestDirectReference:
    def test_pure_rotation_machine_exact(self):
        prob = make_problem(eps=1e-3, c=ZERO, r=lambda u: np.zeros_like(u))
        grid, u = solve_direct_reference(prob, 256)
        x = grid.nodes
        expected = alpha_smooth(x) * np.exp(1j * a_smooth(x) * prob.t_final / prob.epsilon)
        assert np.max(np.abs(u - expected)) <= 1e-10

    def test_linear_closed_form(self):
        lam = 0.5
        eps = 1e-2
        prob = make_problem(eps=eps, c=lambda x: np.ones_like(x), r=lambda u: lam * u)
        grid, u = solve_direct_reference(prob, 4000)
        x = grid.nodes
        a_nodes = a_smooth(x)
        s = transport.exact_phase_constant_speed(a_nodes, grid, 1.0, prob.t_final)
        shifted = alpha_smooth(np.mod(x - prob.t_final - grid.lower, grid.length) + grid.lower)
        expected = shifted * np.exp(-lam * prob.t_final) * np.exp(1j * s / eps)
        assert np.max(np.abs(u - expected)) <= 1e-3

    def test_upwind_variant_converges_at_unit_wavelength(self):
        prob = make_problem(eps=1.0)
        g1, u1 = solve_direct_reference(prob, 2000, scheme="upwind")
        g2, u2 = solve_direct_reference(prob, 4000, scheme="spectral")
        err = np.max(np.abs(u1[::1] - trig_sample(u2, g2, g1.nodes)))
        assert err <= 5e-3


class TestAsymptoticModel:
    def test_zero_source_is_plain_advection(self):
        prob = make_problem(r=lambda u: np.zeros_like(u), n_x=64)
        u_bar = solve_asymptotic(prob, prob.t_final)
        u = alpha_smooth(prob.xgrid.nodes)
        c_nodes = c_cos2(prob.xgrid.nodes)
        for _ in range(prob.n_steps()):
            u = u - prob.dt * c_nodes * transport.upwind_difference(
                u, c_nodes, prob.xgrid.dx
            )
        assert np.max(np.abs(u_bar - u)) <= 1e-13

    def test_linear_source_decays_exponentially(self):
        prob = make_problem(c=ZERO, r=lambda u: u, n_x=200)
        u_bar = solve_asymptotic(prob, prob.t_final)
        expected = alpha_smooth(prob.xgrid.nodes) * np.exp(-prob.t_final)
        assert np.max(np.abs(u_bar - expected)) <= 2e-3

    def test_quadratic_source_averages_to_zero(self):
        prob = make_problem(c=ZERO, r=lambda u: u * u)
        u_bar = solve_asymptotic(prob, prob.t_final)
        assert np.max(np.abs(u_bar - alpha_smooth(prob.xgrid.nodes))) <= 1e-12
