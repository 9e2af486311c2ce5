"""Periodic pseudo-spectral infrastructure.

Uniform periodic grids, FFT-based derivatives, exact constant-coefficient
advection, and the calculus of operators acting in the fast periodic phase
variable tau:

* ``tau_average``         -- Pi, the mean over one period (projector onto
                             tau-independent functions),
* ``tau_antiderivative``  -- the inverse of d/dtau on zero-mean functions,
* ``apply_q_inverse``     -- the resolvent (I + mu d/dtau)^-1, an L-inf
                             contraction for real mu,
* ``trig_interpolate``    -- evaluation of the trigonometric interpolant at
                             arbitrary (off-grid) phase values.

All operators act mode-wise in Fourier space and are linear and pure; fields
are plain complex ndarrays with the transformed axis given explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


class NumericsError(RuntimeError):
    """Raised on numerical contract violations (CFL, unresolved reference)."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic 1-D grid: nodes lower + j*length/n, j = 0..n-1.

    The right endpoint is excluded (node n would alias node 0).  Any n >= 2
    is accepted; powers of two are preferred for the tau direction and are
    what the presets use, but the FFT round-trip is accurate to ~1e-15 for
    arbitrary n.
    """

    lower: float
    length: float
    n: int

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError(f"grid length must be positive, got {self.length}")
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 points, got n={self.n}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.lower + self.dx * np.arange(self.n)

    @property
    def modes(self) -> np.ndarray:
        """Integer mode numbers in FFT order (Nyquist reported as -n/2)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.modes * (TWO_PI / self.length)

    @classmethod
    def tau(cls, n: int) -> "PeriodicGrid":
        """The fast-phase grid on (0, 2*pi)."""
        return cls(0.0, TWO_PI, n)


@dataclass
class SpectralField1D:
    """Complex samples of a periodic function on a :class:`PeriodicGrid`."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid n={self.grid.n}"
            )


@dataclass
class ProfileField:
    """Profile samples on the tensor grid x-grid x tau-grid, shape (nx, ntau)."""

    xgrid: PeriodicGrid
    taugrid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.xgrid.n, self.taugrid.n):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"({self.xgrid.n}, {self.taugrid.n})"
            )


def _modes(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def spectral_derivative(values: np.ndarray, period: float, axis: int = -1) -> np.ndarray:
    """Differentiate along a periodic axis: multiply mode k by i*(2*pi/period)*k.

    The unmatched Nyquist mode (even n) has no conjugate partner and its
    derivative coefficient is set to zero.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    k = _modes(n) * (TWO_PI / period)
    if n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    coeff = np.fft.fft(values, axis=axis)
    return np.fft.ifft(1j * k.reshape(shape) * coeff, axis=axis)


def advect_exact(
    values: np.ndarray, period: float, speed: float, dt: float, axis: int = -1
) -> np.ndarray:
    """Exact band-limited solution of  d_t g + speed * d_x g = 0  over dt.

    Mode k is multiplied by exp(-i k (2*pi/period) speed dt).  Shifting by a
    full period is the identity up to round-off.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    k = _modes(n) * (TWO_PI / period)
    shape = [1] * values.ndim
    shape[axis] = n
    mult = np.exp(-1j * k * speed * dt).reshape(shape)
    return np.fft.ifft(mult * np.fft.fft(values, axis=axis), axis=axis)


def tau_average(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Pi: the zeroth Fourier coefficient, i.e. the arithmetic mean of samples."""
    return np.mean(values, axis=axis)


def tau_antiderivative(
    values: np.ndarray,
    period: float = TWO_PI,
    axis: int = -1,
    strict: bool = False,
    tol: float = 1e-10,
) -> np.ndarray:
    """Invert d/dtau on the zero-mean part: mode k -> mode k / (i k 2*pi/period).

    The mean is subtracted before inverting (it is zero analytically wherever
    this operator is applied after I - Pi); with ``strict=True`` a residual
    mean larger than ``tol * max|values|`` raises :class:`NumericsError`
    instead.  The result has zero mean and satisfies
    d_tau(result) = values - Pi(values).
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    coeff = np.fft.fft(values, axis=axis)
    if strict:
        idx = [slice(None)] * values.ndim
        idx[axis] = 0
        mean = np.abs(np.asarray(coeff[tuple(idx)])) / n
        scale = np.max(np.abs(values)) if values.size else 0.0
        if np.any(mean > tol * max(scale, 1e-300)):
            raise NumericsError(
                "tau_antiderivative requires zero-mean input in strict mode "
                f"(max |mean| = {float(np.max(mean)):.3e})"
            )
    k = _modes(n) * (TWO_PI / period)
    k[0] = 1.0  # placeholder; the zero mode is cleared below
    shape = [1] * values.ndim
    shape[axis] = n
    inv = 1.0 / (1j * k)
    inv[0] = 0.0
    return np.fft.ifft(inv.reshape(shape) * coeff, axis=axis)


def apply_q_inverse(
    values: np.ndarray,
    mu: float | np.ndarray,
    period: float = TWO_PI,
    axis: int = -1,
) -> np.ndarray:
    """Solve  w + mu * d_tau w = f  mode-wise: w_k = f_k / (1 + i mu k 2*pi/period).

    ``mu`` may be a scalar or an array broadcastable against ``values`` with
    the tau axis removed (one stiffness value per slice).  Every multiplier
    has modulus <= 1 for real mu of either sign, so the continuous-interpolant
    sup norm never grows.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    k = _modes(n) * (TWO_PI / period)
    shape = [1] * values.ndim
    shape[axis] = n
    k = k.reshape(shape)
    mu_arr = np.asarray(mu, dtype=float)
    if mu_arr.ndim > 0:
        mu_arr = np.expand_dims(mu_arr, axis=axis if axis >= 0 else values.ndim + axis)
    coeff = np.fft.fft(values, axis=axis)
    return np.fft.ifft(coeff / (1.0 + 1j * mu_arr * k), axis=axis)


def _interp_phases(theta: np.ndarray, n: int) -> np.ndarray:
    """Per-mode evaluation factors exp(i m theta) with symmetric Nyquist.

    theta is the angle in (0, 2*pi) coordinates; output shape is
    theta.shape + (n,), ordered like FFT coefficients.
    """
    m = _modes(n)
    ph = np.exp(1j * np.multiply.outer(theta, m))
    if n % 2 == 0:
        # the unmatched Nyquist coefficient multiplies cos(n/2 * theta)
        ph[..., n // 2] = np.cos((n // 2) * theta)
    return ph


def trig_interpolate(
    values: np.ndarray,
    tau_star: float | np.ndarray,
    period: float = TWO_PI,
    axis: int = -1,
) -> np.ndarray:
    """Evaluate the trigonometric interpolant at per-slice points ``tau_star``.

    ``tau_star`` is reduced modulo the period before evaluation and may be a
    scalar or an array matching ``values`` without the tau axis.  Exact at
    grid nodes; the Nyquist mode is treated symmetrically so real data yields
    real values.
    """
    v = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    n = v.shape[-1]
    coeff = np.fft.fft(v, axis=-1) / n
    theta = np.fmod(np.asarray(tau_star, dtype=float), period) * (TWO_PI / period)
    ph = _interp_phases(theta, n)
    return np.einsum("...k,...k->...", coeff, ph)


def trig_sample(values: np.ndarray, grid: PeriodicGrid, x_new: np.ndarray) -> np.ndarray:
    """Evaluate the interpolant of 1-D samples at arbitrary abscissae ``x_new``.

    Used to restrict a resolved reference solution onto a coarse grid; exact
    when the target nodes coincide with source nodes.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[-1]
    coeff = np.fft.fft(values, axis=-1) / n
    theta = np.fmod(np.asarray(x_new, dtype=float) - grid.lower, grid.length) * (
        TWO_PI / grid.length
    )
    ph = _interp_phases(theta, n)
    return coeff @ ph.T if values.ndim > 1 else ph @ coeff


def phase_to_tau(s: np.ndarray, epsilon: float) -> np.ndarray:
    """Reduce the phase S to the evaluation angle S/epsilon modulo 2*pi.

    S is reduced modulo 2*pi*epsilon *before* dividing (fmod is exact in IEEE
    arithmetic), so S/epsilon up to ~1e3 revolutions loses no precision beyond
    the error already present in S itself.
    """
    return np.fmod(np.asarray(s, dtype=float), TWO_PI * epsilon) / epsilon


def periodic_antiderivative(values: np.ndarray, grid: PeriodicGrid):
    """Split f into mean + fluctuation and antidifferentiate spectrally.

    Returns ``(mean, fluct)`` with fluct the zero-mean antiderivative samples;
    the full antiderivative is A(x) = mean*(x - lower) + interp(fluct)(x),
    valid for arguments outside the base cell through the linear part.
    """
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    fluct = tau_antiderivative(values - mean, period=grid.length)
    return mean, fluct.real


def evaluate_antiderivative(
    mean: float, fluct: np.ndarray, grid: PeriodicGrid, x: np.ndarray
) -> np.ndarray:
    """Evaluate the antiderivative produced by :func:`periodic_antiderivative`."""
    x = np.asarray(x, dtype=float)
    return mean * (x - grid.lower) + trig_sample(fluct, grid, x).real
