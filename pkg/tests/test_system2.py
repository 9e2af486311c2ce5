"""2x2 system: corrected data, scheme, reconstruction, direct reference."""

import numpy as np
import pytest
import scipy.linalg

from phasefold.system2 import (
    SystemState,
    build_system_problem,
    expm2x2,
    solve_system_ngo,
    system_direct_reference,
    system_phase,
    system_reconstruct,
    system_step,
    system_uncorrected_init,
    system_well_prepared_init,
)
from phasefold.spectral import trig_sample

ONE = lambda x: np.ones_like(np.asarray(x, dtype=float))
ZERO = lambda x: np.zeros_like(np.asarray(x, dtype=float))
ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])


def f_smooth(x):
    return 1 + 0.5 * np.cos(x) + 1j * np.sin(x)


def make_problem(eps=1e-2, n_x=32, n_tau=64, t_final=0.1, cmat=ROTATION, **kw):
    defaults = dict(
        a1=ONE,
        a2=lambda x: 4.0 * np.ones_like(x),
        bigE=lambda x: 1.5 + np.cos(x),
        f1_in=f_smooth,
        f2_in=f_smooth,
    )
    defaults.update(kw)
    return build_system_problem(
        cmat=cmat, epsilon=eps, n_x=n_x, n_tau=n_tau, t_final=t_final, **defaults
    )


class TestPhase:
    def test_pointwise_growth_without_transport(self):
        prob = make_problem(a2=ZERO)
        s = system_phase(prob, 0.2, "spectral_rk4")
        expected = 0.2 * (1.5 + np.cos(prob.xgrid.nodes))
        assert np.max(np.abs(s - expected)) <= 1e-10

    def test_zero_gap_keeps_phase_zero(self):
        prob = make_problem(bigE=ZERO)
        for method in ("exact", "upwind1", "spectral_rk4"):
            assert np.max(np.abs(system_phase(prob, 0.2, method))) <= 1e-12

    def test_constant_speed_closed_form_vs_stepper(self):
        prob = make_problem(n_x=64)
        exact = system_phase(prob, 0.1, "exact")
        stepped = system_phase(prob, 0.1, "spectral_rk4")
        assert np.max(np.abs(exact - stepped)) <= 1e-8


class TestWellPrepared:
    def test_no_coupling_means_no_correction(self):
        prob = make_problem(cmat=np.zeros((2, 2)))
        u1, v2 = system_well_prepared_init(prob)
        x = prob.xgrid.nodes
        assert np.max(np.abs(u1 - f_smooth(x)[:, None])) <= 1e-14
        assert np.max(np.abs(v2 - f_smooth(x)[:, None])) <= 1e-14

    def test_corrections_vanish_with_epsilon(self):
        probs = [make_problem(eps=e) for e in (1e-3, 1e-6)]
        x = probs[0].xgrid.nodes
        for prob, eps in zip(probs, (1e-3, 1e-6)):
            u1, v2 = system_well_prepared_init(prob)
            dev = max(
                np.max(np.abs(u1 - f_smooth(x)[:, None])),
                np.max(np.abs(v2 - f_smooth(x)[:, None])),
            )
            assert dev <= 5.0 * eps

    def test_closed_form_at_a_node(self):
        # E(0) = 5/2, C12 = 1, C21 = -1, eps = 0.1: denominator 6.25 + 0.01
        prob = make_problem(eps=0.1, n_x=16)
        u1, v2 = system_well_prepared_init(prob)
        tau = prob.taugrid.nodes
        f1 = f_smooth(0.0)
        f2 = f_smooth(0.0)
        coeff = 1j * 0.1 * 2.5 / (6.25 + 0.01)
        expected = f1 + coeff * (np.exp(-1j * tau) - 1.0) * f2
        assert np.max(np.abs(u1[0] - expected)) <= 1e-13
        # second profile is returned filtered: V2 = e^{i tau} U2
        expected_u2 = -coeff * (np.exp(-1j * tau) - 1.0) * f1 + np.exp(-1j * tau) * f2
        assert np.max(np.abs(v2[0] - np.exp(1j * tau) * expected_u2)) <= 1e-13

    def test_constraint_at_tau_zero(self):
        prob = make_problem(eps=0.2)
        u1, v2 = system_well_prepared_init(prob)
        x = prob.xgrid.nodes
        assert np.max(np.abs(u1[:, 0] - f_smooth(x))) <= 1e-13
        assert np.max(np.abs(v2[:, 0] - f_smooth(x))) <= 1e-13


class TestStep:
    def test_decoupled_single_mode_decay(self):
        eps = 0.05
        prob = make_problem(
            eps=eps, a1=ZERO, a2=ZERO, bigE=lambda x: 2.0 * np.ones_like(x),
            cmat=np.zeros((2, 2)),
        )
        tau = prob.taugrid.nodes
        nx = prob.xgrid.n
        u1 = np.repeat(f_smooth(prob.xgrid.nodes)[:, None], prob.taugrid.n, axis=1)
        v2 = np.repeat(np.exp(1j * tau)[None, :], nx, axis=0)
        state = SystemState(u1=u1.copy(), v2=v2.copy(), s=np.zeros(nx), t=0.0)
        new = system_step(state, prob)
        mu2 = prob.dt * 2.0 / eps
        assert np.max(np.abs(new.u1 - u1)) <= 1e-13  # flat in tau: resolvent is identity
        assert np.max(np.abs(new.v2 - v2 / (1 + 1j * mu2))) <= 1e-12

    def test_large_epsilon_reduces_to_upwind_advection(self):
        prob = make_problem(eps=1e6, cmat=np.zeros((2, 2)), bigE=ONE)
        x = prob.xgrid.nodes
        u1 = np.repeat(f_smooth(x)[:, None], prob.taugrid.n, axis=1)
        state = SystemState(u1=u1.copy(), v2=u1.copy(), s=np.zeros(x.size), t=0.0)
        new = system_step(state, prob)
        shift_b = (f_smooth(x) - f_smooth(np.roll(x, 1))) / prob.xgrid.dx
        expect_u1 = f_smooth(x) - prob.dt * 1.0 * shift_b
        expect_v2 = f_smooth(x) - prob.dt * 4.0 * shift_b
        assert np.max(np.abs(new.u1 - expect_u1[:, None])) <= 1e-8
        assert np.max(np.abs(new.v2 - expect_v2[:, None])) <= 1e-8

    def test_pure_coupling_is_explicit_euler(self):
        prob = make_problem(a1=ZERO, a2=ZERO, bigE=ZERO, cmat=ROTATION)
        tau = prob.taugrid.nodes
        nx = prob.xgrid.n
        rng = np.random.default_rng(5)
        u1 = rng.standard_normal((nx, tau.size)) + 1j * rng.standard_normal((nx, tau.size))
        v2 = rng.standard_normal((nx, tau.size)) + 1j * rng.standard_normal((nx, tau.size))
        state = SystemState(u1=u1.copy(), v2=v2.copy(), s=np.zeros(nx), t=0.0)
        new = system_step(state, prob)
        em = np.exp(-1j * tau)[None, :]
        ep = np.exp(1j * tau)[None, :]
        assert np.max(np.abs(new.u1 - (u1 + prob.dt * em * v2))) <= 1e-12
        assert np.max(np.abs(new.v2 - (v2 - prob.dt * ep * u1))) <= 1e-12


class TestReconstruct:
    def test_flat_first_profile_ignores_phase(self):
        prob = make_problem()
        nx, ntau = prob.xgrid.n, prob.taugrid.n
        state = SystemState(
            u1=np.full((nx, ntau), 1.5 + 0.5j),
            v2=np.zeros((nx, ntau)),
            s=np.linspace(0, 3, nx),
            t=0.0,
        )
        u1, _ = system_reconstruct(state, prob)
        assert np.max(np.abs(u1 - (1.5 + 0.5j))) <= 1e-12

    def test_filtered_mode_phases_cancel(self):
        prob = make_problem(eps=1e-2)
        tau = prob.taugrid.nodes
        nx = prob.xgrid.n
        g = f_smooth(prob.xgrid.nodes)
        state = SystemState(
            u1=np.zeros((nx, tau.size)),
            v2=np.exp(1j * tau)[None, :] * g[:, None],
            s=np.linspace(0, 5, nx),
            t=0.0,
        )
        _, u2 = system_reconstruct(state, prob)
        assert np.max(np.abs(u2 - g)) <= 1e-12

    def test_initial_reconstruction_roundtrip(self):
        prob = make_problem(eps=1e-3)
        u1g, v2g = system_well_prepared_init(prob)
        state = SystemState(u1=u1g, v2=v2g, s=np.zeros(prob.xgrid.n), t=0.0)
        u1, u2 = system_reconstruct(state, prob)
        x = prob.xgrid.nodes
        assert np.max(np.abs(u1 - f_smooth(x))) <= 1e-12
        assert np.max(np.abs(u2 - f_smooth(x))) <= 1e-12


class TestExpm2x2:
    def test_against_scipy_on_random_matrices(self):
        rng = np.random.default_rng(17)
        mats = rng.standard_normal((50, 2, 2)) + 1j * rng.standard_normal((50, 2, 2))
        ours = expm2x2(mats)
        for i in range(50):
            ref = scipy.linalg.expm(mats[i])
            assert np.max(np.abs(ours[i] - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))

    def test_degenerate_eigenvalues(self):
        m = np.array([[2.0, 1.0], [0.0, 2.0]], dtype=complex)
        assert np.max(np.abs(expm2x2(m) - scipy.linalg.expm(m))) <= 1e-12

    def test_stiff_rotation_block(self):
        # C = 0: component 2 rotates by e^{-i E dt / eps}
        e_over_eps = 250.0
        dt = 0.01
        m = np.array([[0.0, 0.0], [0.0, -1j * e_over_eps]]) * dt
        out = expm2x2(m)
        assert abs(out[0, 0] - 1.0) <= 1e-13
        assert abs(out[1, 1] - np.exp(-1j * e_over_eps * dt)) <= 1e-12

    def test_skew_generator_is_plane_rotation(self):
        t = 0.7
        out = expm2x2(t * ROTATION.astype(complex))
        expected = np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])
        assert np.max(np.abs(out - expected)) <= 1e-13


class TestDirectReference:
    def test_norm_conservation_with_skew_coupling(self):
        prob = make_problem(eps=1e-2, t_final=0.05)
        grid, u1, u2 = system_direct_reference(prob, 512)
        x = grid.nodes
        n0 = np.sum(np.abs(f_smooth(x)) ** 2 * 2)
        n1 = np.sum(np.abs(u1) ** 2 + np.abs(u2) ** 2)
        assert abs(n1 - n0) <= 1e-10 * n0

    def test_matches_ngo_at_unit_wavelength(self):
        prob = make_problem(eps=1.0, n_x=64)
        res = solve_system_ngo(prob, phase_method="exact", init="corrected")
        grid, u1r, u2r = system_direct_reference(prob, 4000)
        err = max(
            np.max(np.abs(res.u1 - trig_sample(u1r, grid, prob.xgrid.nodes))),
            np.max(np.abs(res.u2 - trig_sample(u2r, grid, prob.xgrid.nodes))),
        )
        assert err <= 3.0 * (prob.dt + prob.xgrid.dx)

    def test_rejects_nonlinear_source(self):
        prob = make_problem(rfun=lambda u1, u2: (u1, u2))
        with pytest.raises(Exception):
            system_direct_reference(prob, 128)


class TestDegradationModes:
    def test_uncorrected_data_is_strictly_worse_at_intermediate_eps(self):
        eps = 1e-2
        base = make_problem(eps=eps, n_x=100)
        grid, u1r, u2r = system_direct_reference(base, 4000, dt=2.5e-4)
        errs = {}
        for init in ("corrected", "uncorrected"):
            res = solve_system_ngo(base, phase_method="exact", init=init)
            errs[init] = max(
                np.max(np.abs(res.u1 - trig_sample(u1r, grid, base.xgrid.nodes))),
                np.max(np.abs(res.u2 - trig_sample(u2r, grid, base.xgrid.nodes))),
            )
        assert errs["uncorrected"] > 1.5 * errs["corrected"]

    def test_inaccurate_phase_degrades_small_eps(self):
        eps = 1e-3
        base = make_problem(eps=eps, n_x=100)
        grid, u1r, u2r = system_direct_reference(base, 20000, dt=2.5e-4)
        errs = {}
        for method in ("spectral_rk4", "upwind1"):
            res = solve_system_ngo(base, phase_method=method, init="corrected")
            errs[method] = max(
                np.max(np.abs(res.u1 - trig_sample(u1r, grid, base.xgrid.nodes))),
                np.max(np.abs(res.u2 - trig_sample(u2r, grid, base.xgrid.nodes))),
            )
        assert errs["upwind1"] >= 5.0 * errs["spectral_rk4"]

    def test_uncorrected_init_shapes(self):
        prob = make_problem()
        u1, v2 = system_uncorrected_init(prob)
        assert u1.shape == (prob.xgrid.n, prob.taugrid.n)
        assert np.max(np.abs(u1 - u1[:, :1])) == 0.0
