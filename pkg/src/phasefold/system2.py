"""Oscillatory 2x2 hyperbolic system with an order-one band gap E(x):

    d_t u + A(x) d_x u + R(u) = (i E(x)/eps) D u + C u,
    A = diag(a1, a2),  D = diag(0, -1),  C a constant real 2x2 matrix.

Only the second component rotates stiffly, at rate -E/eps, so the phase
solves  d_t S + a2 d_x S = E  with S(0) = 0 and the reconstruction reads

    u1 = U1(x, S/eps),      u2 = e^{-i S/eps} V2(x, S/eps),

where U1 is the plain first profile and V2 = e^{i tau} U2 filters the
dominant rotation out of the second.  Both profiles are stepped by explicit
upwind transport / coupling and an implicit tau-advection, with per-node
stiffness

    mu1 = dt [E + (a1 - a2) dS/dx] / eps,        mu2 = dt E / eps.

Note on signs: combining the chain rule with the growing-phase convention
above fixes the forcing +E, the e^{-i tau} factors in the corrected data and
the +(a1-a2) term in mu1 simultaneously; flipping any one of them alone makes
the reconstruction rotate opposite to the true solution.  ``dxs_sign``
exposes the alternative (a1-a2) sign for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import transport
from .spectral import (
    NumericsError,
    PeriodicGrid,
    advect_exact,
    apply_q_inverse,
    phase_to_tau,
    spectral_derivative,
    trig_interpolate,
)

Coefficient = Callable[[np.ndarray], np.ndarray]


@dataclass
class SystemProblem:
    a1: Coefficient
    a2: Coefficient
    bigE: Coefficient
    cmat: np.ndarray  # constant real 2x2 coupling matrix
    f1_in: Coefficient
    f2_in: Coefficient
    epsilon: float
    xgrid: PeriodicGrid
    taugrid: PeriodicGrid
    dt: float
    t_final: float
    rfun: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None
    corr_cap: float = 10.0
    dxs_sign: float = 1.0

    def n_steps(self) -> int:
        n = int(round(self.t_final / self.dt))
        if abs(n * self.dt - self.t_final) > 1e-9 * max(self.t_final, 1.0):
            raise NumericsError(f"dt={self.dt} does not divide t_final={self.t_final}")
        return n


@dataclass
class SystemState:
    u1: np.ndarray  # first profile, shape (nx, ntau)
    v2: np.ndarray  # filtered second profile e^{i tau} U2, shape (nx, ntau)
    s: np.ndarray  # phase, shape (nx,)
    t: float


def build_system_problem(
    a1: Coefficient,
    a2: Coefficient,
    bigE: Coefficient,
    cmat: np.ndarray,
    f1_in: Coefficient,
    f2_in: Coefficient,
    epsilon: float,
    n_x: int,
    n_tau: int,
    t_final: float,
    lower: float = 0.0,
    length: float = 2 * np.pi,
    dt_rule: float | None = None,
    **kwargs,
) -> SystemProblem:
    """dt = dx / (2 max(|a1|, |a2|)) by default, rounded onto t_final."""
    xgrid = PeriodicGrid(lower, length, n_x)
    x = xgrid.nodes
    if dt_rule is None:
        amax = max(float(np.max(np.abs(a1(x)))), float(np.max(np.abs(a2(x)))))
        dt_rule = 1.0 / (2.0 * max(amax, 1e-30))
    dt_nominal = dt_rule * xgrid.dx
    n_steps = max(1, int(np.ceil(t_final / dt_nominal - 1e-12)))
    return SystemProblem(
        a1=a1,
        a2=a2,
        bigE=bigE,
        cmat=np.asarray(cmat, dtype=float),
        f1_in=f1_in,
        f2_in=f2_in,
        epsilon=epsilon,
        xgrid=xgrid,
        taugrid=PeriodicGrid.tau(n_tau),
        dt=t_final / n_steps,
        t_final=t_final,
        **kwargs,
    )


def system_phase(problem: SystemProblem, t: float, method: str) -> np.ndarray:
    """Phase S(t, .) solving d_t S + a2 d_x S = E, S(0) = 0."""
    grid = problem.xgrid
    x = grid.nodes
    a2_nodes = np.asarray(problem.a2(x), dtype=float)
    e_nodes = np.asarray(problem.bigE(x), dtype=float)
    if method == "exact":
        if transport.is_constant(a2_nodes) and float(a2_nodes[0]) > 0:
            return transport.exact_phase_constant_speed(e_nodes, grid, float(a2_nodes[0]), t)
        return transport.phase_characteristics(problem.a2, problem.bigE, x, t)
    s = np.zeros(grid.n)
    n = max(1, int(round(t / problem.dt)))
    dt = t / n
    for _ in range(n):
        s = system_phase_step(s, a2_nodes, e_nodes, grid, dt, method)
    return s


def system_phase_step(
    s: np.ndarray,
    a2_nodes: np.ndarray,
    e_nodes: np.ndarray,
    grid: PeriodicGrid,
    dt: float,
    method: str,
) -> np.ndarray:
    if method == "upwind1":
        return transport.phase_step_upwind(s, a2_nodes, e_nodes, grid.dx, dt)
    return transport.phase_step_rk4(s, a2_nodes, e_nodes, grid.length, dt)


def _clamped_denominator(denom: np.ndarray, scale: np.ndarray, cap: float) -> np.ndarray:
    """Keep |scale/denom| <= cap by inflating near-zero denominators."""
    floor = np.abs(scale) / cap
    small = np.abs(denom) < floor
    if np.any(small):
        denom = np.where(small, np.where(denom >= 0, 1.0, -1.0) * floor, denom)
    return denom


def system_well_prepared_init(problem: SystemProblem) -> tuple[np.ndarray, np.ndarray]:
    """Corrected initial profiles (U1, V2) for R = 0.

    U1(0,x,tau) = f1 + i eps E C12 / (E^2 - eps^2 C12 C21) (e^{-i tau} - 1) f2,
    U2(0,x,tau) = i eps E C21 / (E^2 - eps^2 C12 C21) (e^{-i tau} - 1) f1
                  + e^{-i tau} f2,
    returned as (U1, V2 = e^{i tau} U2).  Both reduce to (f1, f2) at tau = 0.
    """
    x = problem.xgrid.nodes
    tau = problem.taugrid.nodes
    f1 = np.asarray(problem.f1_in(x), dtype=complex)[:, None]
    f2 = np.asarray(problem.f2_in(x), dtype=complex)[:, None]
    e = np.asarray(problem.bigE(x), dtype=float)[:, None]
    c12 = problem.cmat[0, 1]
    c21 = problem.cmat[1, 0]
    eps = problem.epsilon
    denom = _clamped_denominator(
        e * e - eps**2 * c12 * c21, eps * e * max(abs(c12), abs(c21), 1e-30), problem.corr_cap
    )
    em = np.exp(-1j * tau)[None, :]
    u1 = f1 + (1j * eps * e * c12 / denom) * (em - 1.0) * f2
    u2 = (1j * eps * e * c21 / denom) * (em - 1.0) * f1 + em * f2
    v2 = np.exp(1j * tau)[None, :] * u2
    return u1, v2


def system_uncorrected_init(problem: SystemProblem) -> tuple[np.ndarray, np.ndarray]:
    """Raw data: U1 = f1 and U2 = e^{-i tau} f2, i.e. V2 = f2, with no
    order-eps cross terms."""
    x = problem.xgrid.nodes
    ntau = problem.taugrid.n
    f1 = np.asarray(problem.f1_in(x), dtype=complex)
    f2 = np.asarray(problem.f2_in(x), dtype=complex)
    return (
        np.repeat(f1[:, None], ntau, axis=1),
        np.repeat(f2[:, None], ntau, axis=1),
    )


class _SystemDisc:
    def __init__(self, problem: SystemProblem):
        x = problem.xgrid.nodes
        self.a1_nodes = np.asarray(problem.a1(x), dtype=float)
        self.a2_nodes = np.asarray(problem.a2(x), dtype=float)
        self.e_nodes = np.asarray(problem.bigE(x), dtype=float)
        tau = problem.taugrid.nodes
        self.e_minus = np.exp(-1j * tau)[None, :]
        self.e_plus = np.exp(1j * tau)[None, :]
        amax = max(np.max(np.abs(self.a1_nodes)), np.max(np.abs(self.a2_nodes)))
        transport.check_cfl(np.array([amax]), problem.dt, problem.xgrid.dx)


def system_step(
    state: SystemState,
    problem: SystemProblem,
    disc: _SystemDisc | None = None,
    phase_method: str = "spectral_rk4",
) -> SystemState:
    """Advance (U1, V2, S) by one step.

    Transport and coupling are explicit; the stiff tau-advection is implicit
    with mu1 = dt [E + dxs_sign (a1-a2) dS/dx]/eps (dS/dx spectral) and
    mu2 = dt E/eps.  mu1 may go negative where the gradient term dominates;
    the resolvent stays a contraction for real mu of either sign.
    """
    disc = disc or _SystemDisc(problem)
    dt = problem.dt
    dx = problem.xgrid.dx
    c = problem.cmat
    u1, v2 = state.u1, state.v2
    u2_phys = disc.e_minus * v2  # undo the filter where the coupling needs U2
    rhs1 = -disc.a1_nodes[:, None] * transport.upwind_difference(u1, disc.a1_nodes, dx)
    rhs1 = rhs1 + c[0, 0] * u1 + c[0, 1] * u2_phys
    rhs2 = -disc.a2_nodes[:, None] * transport.upwind_difference(v2, disc.a2_nodes, dx)
    rhs2 = rhs2 + c[1, 0] * disc.e_plus * u1 + c[1, 1] * v2
    if problem.rfun is not None:
        r1, r2 = problem.rfun(u1, u2_phys)
        rhs1 = rhs1 - r1
        rhs2 = rhs2 - disc.e_plus * r2
    ds = spectral_derivative(state.s, problem.xgrid.length).real
    mu1 = dt * (disc.e_nodes + problem.dxs_sign * (disc.a1_nodes - disc.a2_nodes) * ds) / problem.epsilon
    mu2 = dt * disc.e_nodes / problem.epsilon
    u1_new = apply_q_inverse(u1 + dt * rhs1, mu1, axis=1)
    v2_new = apply_q_inverse(v2 + dt * rhs2, mu2, axis=1)
    s_new = system_phase_step(
        state.s, disc.a2_nodes, disc.e_nodes, problem.xgrid, dt, phase_method
    )
    return SystemState(u1=u1_new, v2=v2_new, s=s_new, t=state.t + dt)


def system_reconstruct(
    state: SystemState, problem: SystemProblem
) -> tuple[np.ndarray, np.ndarray]:
    """u1 = interp(U1, S/eps); u2 = e^{-i S/eps} interp(V2, S/eps)."""
    tau_star = phase_to_tau(state.s, problem.epsilon)
    u1 = trig_interpolate(state.u1, tau_star, axis=1)
    u2 = np.exp(-1j * tau_star) * trig_interpolate(state.v2, tau_star, axis=1)
    return u1, u2


@dataclass
class SystemResult:
    u1: np.ndarray
    u2: np.ndarray
    state: SystemState
    problem: SystemProblem


def solve_system_ngo(
    problem: SystemProblem,
    phase_method: str = "exact",
    init: str = "corrected",
) -> SystemResult:
    if init == "corrected":
        u1, v2 = system_well_prepared_init(problem)
    elif init == "uncorrected":
        u1, v2 = system_uncorrected_init(problem)
    else:
        raise ValueError(f"unknown init mode {init!r}")
    disc = _SystemDisc(problem)
    state = SystemState(u1=u1, v2=v2, s=np.zeros(problem.xgrid.n), t=0.0)
    exact_s = phase_method == "exact"
    step_phase = "spectral_rk4" if exact_s else phase_method
    for _ in range(problem.n_steps()):
        state = system_step(state, problem, disc, phase_method=step_phase)
    if exact_s:
        state = SystemState(
            u1=state.u1, v2=state.v2, s=system_phase(problem, state.t, "exact"), t=state.t
        )
    u1_rec, u2_rec = system_reconstruct(state, problem)
    return SystemResult(u1=u1_rec, u2=u2_rec, state=state, problem=problem)


def expm2x2(m: np.ndarray) -> np.ndarray:
    """Closed-form exponential of a batch of 2x2 complex matrices (..., 2, 2).

    exp(M) = e^mu [cosh(q) I + sinch(q) (M - mu I)] with mu = tr M / 2 and
    q^2 = mu^2 - det M; sinch(q) = sinh(q)/q is evaluated by series near 0.
    """
    m = np.asarray(m, dtype=complex)
    mu = 0.5 * (m[..., 0, 0] + m[..., 1, 1])
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    q = np.sqrt(mu * mu - det + 0j)
    small = np.abs(q) < 1e-6
    qs = np.where(small, 1.0, q)
    sinch = np.where(small, 1.0 + q * q / 6.0, np.sinh(qs) / qs)
    cosh = np.cosh(q)
    eye = np.zeros_like(m)
    eye[..., 0, 0] = 1.0
    eye[..., 1, 1] = 1.0
    out = cosh[..., None, None] * eye + sinch[..., None, None] * (
        m - mu[..., None, None] * eye
    )
    return np.exp(mu)[..., None, None] * out


def system_direct_reference(
    problem: SystemProblem,
    n_points: int,
    dt: float | None = None,
) -> tuple[PeriodicGrid, np.ndarray, np.ndarray]:
    """Resolved splitting reference on a fine grid; returns (grid, u1, u2).

    Strang composition of exact substeps: half advection of each component
    (exact Fourier shift for constant speeds, else spectral RK4), then the
    pointwise source u <- exp(dt [(i E/eps) D + C]) u with the matrix
    exponentials precomputed per node, then the second advection half.
    """
    if problem.rfun is not None:
        raise NumericsError("the direct reference covers the linear case R = 0 only")
    grid = PeriodicGrid(problem.xgrid.lower, problem.xgrid.length, n_points)
    x = grid.nodes
    a1n = np.asarray(problem.a1(x), dtype=float)
    a2n = np.asarray(problem.a2(x), dtype=float)
    en = np.asarray(problem.bigE(x), dtype=float)
    u1 = np.asarray(problem.f1_in(x), dtype=complex)
    u2 = np.asarray(problem.f2_in(x), dtype=complex)
    if dt is None:
        amax = max(float(np.max(np.abs(a1n))), float(np.max(np.abs(a2n))), 1e-30)
        dt_nominal = grid.dx / (2.0 * amax)
        n = max(1, int(np.ceil(problem.t_final / dt_nominal - 1e-12)))
        dt = problem.t_final / n
    else:
        n = int(round(problem.t_final / dt))
    mats = np.zeros((grid.n, 2, 2), dtype=complex)
    mats[:, 0, 0] = problem.cmat[0, 0]
    mats[:, 0, 1] = problem.cmat[0, 1]
    mats[:, 1, 0] = problem.cmat[1, 0]
    mats[:, 1, 1] = problem.cmat[1, 1] - 1j * en / problem.epsilon
    prop = expm2x2(dt * mats)

    const1 = transport.is_constant(a1n)
    const2 = transport.is_constant(a2n)
    kmax = np.pi / grid.dx

    def advect(u: np.ndarray, speeds: np.ndarray, const: bool, h: float) -> np.ndarray:
        if const:
            return advect_exact(u, grid.length, float(speeds[0]), h)
        if float(np.max(np.abs(speeds))) * kmax * h > 2.8:
            raise NumericsError("reference dt too large for spectral advection")
        k1 = -speeds * spectral_derivative(u, grid.length)
        k2 = -speeds * spectral_derivative(u + 0.5 * h * k1, grid.length)
        k3 = -speeds * spectral_derivative(u + 0.5 * h * k2, grid.length)
        k4 = -speeds * spectral_derivative(u + h * k3, grid.length)
        return u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    for _ in range(n):
        u1 = advect(u1, a1n, const1, 0.5 * dt)
        u2 = advect(u2, a2n, const2, 0.5 * dt)
        w1 = prop[:, 0, 0] * u1 + prop[:, 0, 1] * u2
        w2 = prop[:, 1, 0] * u1 + prop[:, 1, 1] * u2
        u1, u2 = w1, w2
        u1 = advect(u1, a1n, const1, 0.5 * dt)
        u2 = advect(u2, a2n, const2, 0.5 * dt)
    return grid, u1, u2
