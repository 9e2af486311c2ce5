"""Semiclassical surface-hopping kinetic model in 1-D position and momentum.

Three unknowns on phase space: real band populations f+ and f- and a complex
coherence f^i that rotates at the stiff rate -2E(x)/eps (2E is the band gap;
the "avoided crossing" presets let the gap shrink to O(eps)).  With real
interband coupling b^i(x, p) the model reads, as a real 4-vector
f = (f+, f-, Re f^i, Im f^i),

    transport in x at speed p, in p at per-component speeds
    A = (-(U+E)', -(U-E)', U', U'),  plus the pointwise source f' = B f.

The direct solver splits transport (exact Fourier propagation) from the stiff
source (exact rotation-like closed form).  The wavelength-robust solver
augments every field with the fast phase tau, advected at speeds
(Ee+, Ee-, 2E, 2E)/eps with Ee+- = 2E - (2U +- E)' dS/dp, where the phase
S(t,x,p) solves  d_t S + p d_x S + U' d_p S = 2E, and reconstructs via

    f+- = F+-(x, p, S/eps),    f^i = e^{-i S/eps} G^i(x, p, S/eps),

with G^i = e^{i tau} F^i the filtered coherence profile.  Its grid and step
never depend on eps once the data is prepared (:func:`hopping_well_prepared_init`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spectral import (
    PeriodicGrid,
    periodic_antiderivative,
    phase_to_tau,
    spectral_derivative,
    trig_interpolate,
    trig_sample,
)

Coefficient2D = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class HoppingProblem:
    bigE: Callable[[np.ndarray], np.ndarray]
    bi: Coefficient2D
    f_plus_in: Coefficient2D
    f_minus_in: Coefficient2D
    f_i_in: Coefficient2D
    epsilon: float
    xgrid: PeriodicGrid
    pgrid: PeriodicGrid
    taugrid: PeriodicGrid
    dt: float
    t_final: float
    upot: Callable[[np.ndarray], np.ndarray] | None = None  # default U = 0
    # Implicit Euler damps the fast tau modes and with it the resonant
    # beating between the frozen-phase source substep and the tau advection;
    # the exact per-mode propagator needs dt * E/eps << 1 to compete.
    tau_integrator: str = "implicit"  # "implicit" or "exact" tau substep
    phase_method: str = "exact"  # "exact" or "split" phase advance

    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class KineticState:
    """Point values of (f+, f-, f^i) on the (x, p) grid."""

    fplus: np.ndarray
    fminus: np.ndarray
    fi: np.ndarray  # complex coherence
    t: float


@dataclass
class AugmentedKineticState:
    """Profiles over (x, p, tau) plus the phase S(x, p)."""

    fplus: np.ndarray
    fminus: np.ndarray
    gi: np.ndarray  # complex filtered coherence profile
    s: np.ndarray
    t: float


def _sample_coeffs(problem: HoppingProblem):
    x = problem.xgrid.nodes
    p = problem.pgrid.nodes
    xx = x[:, None]
    pp = p[None, :]
    e = np.asarray(problem.bigE(x), dtype=float)
    u = (
        np.asarray(problem.upot(x), dtype=float)
        if problem.upot is not None
        else np.zeros_like(x)
    )
    # coefficient derivatives taken spectrally from their samples
    de = spectral_derivative(e, problem.xgrid.length).real
    du = spectral_derivative(u, problem.xgrid.length).real
    b = np.broadcast_to(np.asarray(problem.bi(xx, pp), dtype=float), (x.size, p.size)).copy()
    return x, p, e, de, du, b


class _Propagators:
    """Per-run constants: transport phase factors and source-step tables."""

    def __init__(self, problem: HoppingProblem, with_tau: bool):
        self.x, self.p, self.e, de, du, self.b = _sample_coeffs(problem)
        dt = problem.dt
        kx = problem.xgrid.wavenumbers
        kp = problem.pgrid.wavenumbers
        # x-transport at speed p: one factor per (x-mode, p-node)
        self.px = np.exp(-1j * np.multiply.outer(kx, self.p) * dt)
        # p-transport speeds per component: (-(U+E)', -(U-E)', U', U')
        speeds = (-(du + de), -(du - de), du, du)
        self.pp = [np.exp(-1j * np.multiply.outer(s, kp) * dt) for s in speeds]
        self.du = du
        self.de = de
        if with_tau:
            self.px = self.px[..., None]
            self.pp = [f[..., None] for f in self.pp]


def transport_substeps(
    fields: list[np.ndarray], prop: _Propagators
) -> list[np.ndarray]:
    """Exact spectral x-transport then p-transport of the four fields."""
    out = []
    for f, pfac in zip(fields, (prop.pp[0], prop.pp[1], prop.pp[2], prop.pp[2])):
        f = np.fft.ifft(prop.px * np.fft.fft(f, axis=0), axis=0)
        f = np.fft.ifft(
            pfac * np.fft.fft(f, axis=1), axis=1
        )
        out.append(f)
    return out


def _sinc_factors(theta: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """alpha = sin(theta dt)/theta and beta = (1-cos(theta dt))/theta^2, stable
    through theta -> 0."""
    y = theta * dt
    alpha = dt * np.sinc(y / np.pi)
    half = np.sinc(y / (2.0 * np.pi))
    beta = 0.5 * dt * dt * half * half
    return alpha, beta


def direct_source_step(
    fplus: np.ndarray,
    fminus: np.ndarray,
    fi: np.ndarray,
    b: np.ndarray,
    omega: np.ndarray,
    dt: float,
):
    """Exact pointwise step of f' = B f for the unfiltered unknowns.

    f+ + f- is an exact invariant (the +- sources are negatives); the
    remaining 3-vector (f+ - f-, Re f^i, Im f^i) obeys a rotation-like
    generator M with M^3 = -(omega^2 + 4 b^2) M, so exp(dt M) has the
    Rodrigues closed form I + alpha M + beta M^2.
    """
    g = fplus + fminus
    h = fplus - fminus
    rr, ii = fi.real, fi.imag
    theta = np.sqrt(omega * omega + 4.0 * b * b)
    alpha, beta = _sinc_factors(theta, dt)
    mh, mr, mi = 4.0 * b * rr, -b * h + omega * ii, -omega * rr
    m2h = -4.0 * b * b * h + 4.0 * b * omega * ii
    m2r = -(theta * theta) * rr
    m2i = omega * b * h - omega * omega * ii
    h_new = h + alpha * mh + beta * m2h
    rr_new = rr + alpha * mr + beta * m2r
    ii_new = ii + alpha * mi + beta * m2i
    return 0.5 * (g + h_new), 0.5 * (g - h_new), rr_new + 1j * ii_new


def ngo_source_step(
    fplus: np.ndarray,
    fminus: np.ndarray,
    gi: np.ndarray,
    b: np.ndarray,
    tau: np.ndarray,
    dt: float,
):
    """Exact pointwise step of F' = B_tau F for the augmented unknowns.

    B_tau couples (F+, F-, Re G, Im G) through cos/sin tau factors and
    satisfies B_tau^3 = -4 b^2 B_tau; same Rodrigues evaluation, vectorized
    over (x, p, tau).
    """
    ct = np.cos(tau)[None, None, :]
    st = np.sin(tau)[None, None, :]
    b3 = b[..., None]
    rr, ii = gi.real, gi.imag
    w = ct * rr + st * ii
    d = fplus - fminus
    alpha, beta = _sinc_factors(2.0 * b3, dt)
    fplus_new = fplus + alpha * (2.0 * b3 * w) + beta * (-2.0 * b3 * b3 * d)
    fminus_new = fminus - alpha * (2.0 * b3 * w) - beta * (-2.0 * b3 * b3 * d)
    rr_new = rr + alpha * (-b3 * ct * d) + beta * (-4.0 * b3 * b3 * ct * w)
    ii_new = ii + alpha * (-b3 * st * d) + beta * (-4.0 * b3 * b3 * st * w)
    return fplus_new, fminus_new, rr_new + 1j * ii_new


def hopping_direct_step(
    state: KineticState, problem: HoppingProblem, prop: _Propagators | None = None
) -> KineticState:
    """Lie splitting: x-transport, p-transport, exact source rotation."""
    prop = prop or _Propagators(problem, with_tau=False)
    fields = transport_substeps(
        [
            state.fplus.astype(complex),
            state.fminus.astype(complex),
            state.fi.real.astype(complex),
            state.fi.imag.astype(complex),
        ],
        prop,
    )
    fplus, fminus = fields[0].real, fields[1].real
    fi = fields[2].real + 1j * fields[3].real
    omega = 2.0 * prop.e[:, None] / problem.epsilon
    fplus, fminus, fi = direct_source_step(fplus, fminus, fi, prop.b, omega, problem.dt)
    return KineticState(fplus=fplus, fminus=fminus, fi=fi, t=state.t + problem.dt)


def solve_hopping_direct(
    problem: HoppingProblem,
    on_step: Callable[[KineticState], None] | None = None,
) -> KineticState:
    x = problem.xgrid.nodes[:, None]
    p = problem.pgrid.nodes[None, :]
    shape = (problem.xgrid.n, problem.pgrid.n)
    state = KineticState(
        fplus=np.broadcast_to(np.asarray(problem.f_plus_in(x, p), dtype=float), shape).copy(),
        fminus=np.broadcast_to(np.asarray(problem.f_minus_in(x, p), dtype=float), shape).copy(),
        fi=np.broadcast_to(np.asarray(problem.f_i_in(x, p), dtype=complex), shape).copy(),
        t=0.0,
    )
    prop = _Propagators(problem, with_tau=False)
    if on_step is not None:
        on_step(state)
    for _ in range(problem.n_steps()):
        state = hopping_direct_step(state, problem, prop)
        if on_step is not None:
            on_step(state)
    return state


def hopping_well_prepared_init(problem: HoppingProblem) -> AugmentedKineticState:
    """Chapman-Enskog prepared profiles matching the raw data at tau = 0.

    With S(0) = 0 the effective tau speeds are 2E for every component, and

      F+-(0) = f+- +- (2 eps / 2E) Im( conj(b^i) f^i (1 - e^{-i tau}) ),
      G^i(0) = f^i + (i eps / 2E) b^i (e^{i tau} - 1)(f+ - f-).

    F+- are real by construction (the bracket is z - conj(z) up to the i
    prefactor) and all three reduce to the raw data at tau = 0.
    """
    x = problem.xgrid.nodes[:, None]
    p = problem.pgrid.nodes[None, :]
    tau = problem.taugrid.nodes
    shape = (problem.xgrid.n, problem.pgrid.n)
    fp = np.broadcast_to(np.asarray(problem.f_plus_in(x, p), dtype=float), shape)
    fm = np.broadcast_to(np.asarray(problem.f_minus_in(x, p), dtype=float), shape)
    fi = np.broadcast_to(np.asarray(problem.f_i_in(x, p), dtype=complex), shape)
    b = np.broadcast_to(np.asarray(problem.bi(x, p), dtype=float), shape)
    e2 = 2.0 * np.asarray(problem.bigE(problem.xgrid.nodes), dtype=float)[:, None]
    em = np.exp(-1j * tau)[None, None, :]
    ep = np.exp(1j * tau)[None, None, :]
    bracket = np.imag((np.conj(b) * fi)[..., None] * (1.0 - em))
    corr = (2.0 * problem.epsilon / e2)[..., None] * bracket
    fplus = fp[..., None] + corr
    fminus = fm[..., None] - corr
    gi = fi[..., None] + (
        (1j * problem.epsilon / e2) * b * (fp - fm)
    )[..., None] * (ep - 1.0)
    return AugmentedKineticState(
        fplus=fplus.copy(),
        fminus=fminus.copy(),
        gi=gi.copy(),
        s=np.zeros(shape),
        t=0.0,
    )


def hopping_phase_step(
    s: np.ndarray, problem: HoppingProblem, prop: _Propagators
) -> np.ndarray:
    """One split step of  d_t S + p d_x S + U' d_p S = 2E,  S(0) = 0.

    Exact spectral transport in x (speed p) and p (speed U'(x)), then the
    pointwise forcing S += 2E dt.  First order in dt through the splitting;
    since the reconstruction divides S by eps, the stepped phase is only
    adequate for eps = O(1) and the solver defaults to :func:`hopping_phase_exact`.
    """
    px = prop.px if prop.px.ndim == 2 else prop.px[..., 0]
    s = np.fft.ifft(px * np.fft.fft(s, axis=0), axis=0).real
    kp = problem.pgrid.wavenumbers
    pfac = np.exp(-1j * np.multiply.outer(prop.du, kp) * problem.dt)
    s = np.fft.ifft(pfac * np.fft.fft(s, axis=1), axis=1).real
    return s + 2.0 * problem.dt * prop.e[:, None]


def hopping_phase_exact(problem: HoppingProblem, t: float) -> np.ndarray:
    """Machine-accurate phase at time t.

    For U = 0 the characteristics are straight lines and
    S(t,x,p) = 2 (Etil(x) - Etil(x - p t))/p with Etil an antiderivative of E
    (pointwise 2 E(x) t on the p = 0 row); for nonzero U the backward
    characteristic system is integrated by RK4 with a small fixed substep.
    """
    x = problem.xgrid.nodes
    p = problem.pgrid.nodes
    if t == 0.0:
        return np.zeros((x.size, p.size))
    if problem.upot is None:
        e_nodes = np.asarray(problem.bigE(x), dtype=float)
        mean, fluct = periodic_antiderivative(e_nodes, problem.xgrid)
        feet = x[:, None] - t * p[None, :]
        shifted = trig_sample(fluct, problem.xgrid, feet.ravel()).real.reshape(feet.shape)
        here = trig_sample(fluct, problem.xgrid, x).real[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = 2.0 * (mean * t * p[None, :] + here - shifted) / p[None, :]
        zero = np.abs(p) < 1e-14
        if np.any(zero):
            s[:, zero] = 2.0 * e_nodes[:, None] * t
        return s
    # backward feet (Y, Q)' = -(Q, U'(Y)) with quadrature of 2E(Y)
    du_fun = _spectral_derivative_fun(problem.upot, problem.xgrid)
    e_fun = problem.bigE
    yy = np.repeat(x[:, None], p.size, axis=1)
    qq = np.repeat(p[None, :], x.size, axis=0).astype(float)
    sig = np.zeros_like(yy)
    nsub = max(1, int(np.ceil(t / 2.5e-4)))
    h = t / nsub
    for _ in range(nsub):
        k1y, k1q, k1s = -qq, -du_fun(yy), 2.0 * e_fun(yy)
        y2, q2 = yy + 0.5 * h * k1y, qq + 0.5 * h * k1q
        k2y, k2q, k2s = -q2, -du_fun(y2), 2.0 * e_fun(y2)
        y3, q3 = yy + 0.5 * h * k2y, qq + 0.5 * h * k2q
        k3y, k3q, k3s = -q3, -du_fun(y3), 2.0 * e_fun(y3)
        y4, q4 = yy + h * k3y, qq + h * k3q
        k4y, k4q, k4s = -q4, -du_fun(y4), 2.0 * e_fun(y4)
        yy = yy + (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        qq = qq + (h / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
        sig = sig + (h / 6.0) * (k1s + 2 * k2s + 2 * k3s + k4s)
    return sig


def _spectral_derivative_fun(fun, grid: PeriodicGrid):
    """Trig-interpolated derivative of a sampled periodic coefficient."""
    nodes_deriv = spectral_derivative(np.asarray(fun(grid.nodes), dtype=float), grid.length).real

    def deriv(x: np.ndarray) -> np.ndarray:
        return trig_sample(nodes_deriv, grid, np.asarray(x).ravel()).real.reshape(np.shape(x))

    return deriv


def _tau_multipliers(
    speeds: np.ndarray, modes: np.ndarray, dt: float, epsilon: float, kind: str
) -> np.ndarray:
    phase = np.multiply.outer(speeds, modes) * (dt / epsilon)
    if kind == "exact":
        return np.exp(-1j * phase)
    return 1.0 / (1.0 + 1j * phase)


def hopping_ngo_step(
    state: AugmentedKineticState,
    problem: HoppingProblem,
    prop: _Propagators | None = None,
) -> AugmentedKineticState:
    """Lie splitting of the augmented system.

    x-transport, p-transport, exact source rotation with B_tau, then the
    tau-advection at per-component speeds (Ee+, Ee-, 2E, 2E)/eps solved
    mode-wise (exact integration or implicit Euler per
    ``problem.tau_integrator``), and finally the phase step.  The effective
    speeds Ee+- = 2E - (2U +- E)' dS/dp use the current S with spectral dS/dp.
    """
    prop = prop or _Propagators(problem, with_tau=True)
    dt = problem.dt
    fields = transport_substeps(
        [
            state.fplus.astype(complex),
            state.fminus.astype(complex),
            state.gi.real.astype(complex),
            state.gi.imag.astype(complex),
        ],
        prop,
    )
    fplus, fminus = fields[0].real, fields[1].real
    gi = fields[2].real + 1j * fields[3].real
    tau = problem.taugrid.nodes
    fplus, fminus, gi = ngo_source_step(fplus, fminus, gi, prop.b, tau, dt)
    dsdp = spectral_derivative(state.s, problem.pgrid.length, axis=1).real
    e2 = 2.0 * prop.e[:, None]
    ee_plus = e2 - (2.0 * prop.du + prop.de)[:, None] * dsdp
    ee_minus = e2 - (2.0 * prop.du - prop.de)[:, None] * dsdp
    modes = problem.taugrid.modes
    kind = problem.tau_integrator
    fplus = np.fft.ifft(
        _tau_multipliers(ee_plus, modes, dt, problem.epsilon, kind)
        * np.fft.fft(fplus, axis=2),
        axis=2,
    ).real
    fminus = np.fft.ifft(
        _tau_multipliers(ee_minus, modes, dt, problem.epsilon, kind)
        * np.fft.fft(fminus, axis=2),
        axis=2,
    ).real
    gi = np.fft.ifft(
        _tau_multipliers(e2, modes, dt, problem.epsilon, kind) * np.fft.fft(gi, axis=2),
        axis=2,
    )
    if problem.phase_method == "exact":
        s = hopping_phase_exact(problem, state.t + dt)
    else:
        s = hopping_phase_step(state.s, problem, prop)
    return AugmentedKineticState(
        fplus=fplus, fminus=fminus, gi=gi, s=s, t=state.t + dt
    )


def solve_hopping_ngo(
    problem: HoppingProblem,
    on_step: Callable[[AugmentedKineticState], None] | None = None,
) -> AugmentedKineticState:
    state = hopping_well_prepared_init(problem)
    prop = _Propagators(problem, with_tau=True)
    if on_step is not None:
        on_step(state)
    for _ in range(problem.n_steps()):
        state = hopping_ngo_step(state, problem, prop)
        if on_step is not None:
            on_step(state)
    return state


def hopping_reconstruct(
    state: AugmentedKineticState, problem: HoppingProblem
) -> KineticState:
    """Evaluate profiles at tau = S/eps:  f+- directly, f^i with the carrier."""
    tau_star = phase_to_tau(state.s, problem.epsilon)
    fplus = trig_interpolate(state.fplus, tau_star, axis=2).real
    fminus = trig_interpolate(state.fminus, tau_star, axis=2).real
    fi = np.exp(-1j * tau_star) * trig_interpolate(state.gi, tau_star, axis=2)
    return KineticState(fplus=fplus, fminus=fminus, fi=fi, t=state.t)


def densities(state: KineticState, pgrid: PeriodicGrid) -> dict[str, np.ndarray]:
    """rho_k(x) = dp * sum_m f_k(x, p_m) for the four real components."""
    dp = pgrid.dx
    return {
        "rho_plus": dp * np.sum(state.fplus, axis=1),
        "rho_minus": dp * np.sum(state.fminus, axis=1),
        "rho_i_re": dp * np.sum(state.fi.real, axis=1),
        "rho_i_im": dp * np.sum(state.fi.imag, axis=1),
    }


def kinetic_mass(state: KineticState, xgrid: PeriodicGrid, pgrid: PeriodicGrid) -> float:
    """Total band population integral of f+ + f- (rectangle rule)."""
    return float(xgrid.dx * pgrid.dx * np.sum(state.fplus + state.fminus))


def augmented_mass(
    state: AugmentedKineticState, xgrid: PeriodicGrid, pgrid: PeriodicGrid
) -> float:
    """Mass of the tau-averaged profiles: the exact discrete invariant of the
    augmented scheme (every substep preserves it to round-off)."""
    mean = np.mean(state.fplus + state.fminus, axis=2)
    return float(xgrid.dx * pgrid.dx * np.sum(mean))
