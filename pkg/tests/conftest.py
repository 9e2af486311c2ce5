"""Shared test fixtures: preset coefficients and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest

from phasefold.registry import rational_r


def c_cos2(x):
    return np.cos(x) ** 2


def a_smooth(x):
    return 1.5 + np.cos(2 * x)


def a_vanishing(x):
    return 1.0 + np.cos(2 * x)


def alpha_smooth(x):
    return 1 + 0.5 * np.cos(2 * x) + 1j * (1 + 0.5 * np.sin(2 * x))


@pytest.fixture
def scalar_coeffs():
    return dict(c=c_cos2, a=a_smooth, r=rational_r, alpha=alpha_smooth)


def brute_force_tau_antiderivative(h, tau_eval, n_quad=200_000):
    """Independent inverse of d/dtau on zero-mean data by composite trapezoid.

    Implements  (I - Pi) int_0^tau h~  with h~ = h - mean(h) directly from
    quadrature on a fine tau grid, no FFTs involved.  ``h`` is a callable of
    tau; values are returned at the points ``tau_eval``.
    """
    grid = np.linspace(0.0, 2 * np.pi, n_quad + 1)
    vals = np.asarray(h(grid), dtype=complex)
    w = np.full(n_quad + 1, grid[1] - grid[0])
    w[0] = w[-1] = 0.5 * (grid[1] - grid[0])
    mean = np.sum(w * vals) / (2 * np.pi)
    vals = vals - mean
    cumulative = np.concatenate(
        [[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * (grid[1] - grid[0]))]
    )
    proj = np.sum(w * cumulative) / (2 * np.pi)
    out = np.interp(np.mod(tau_eval, 2 * np.pi), grid, cumulative.real) + 1j * np.interp(
        np.mod(tau_eval, 2 * np.pi), grid, cumulative.imag
    )
    return out - proj
