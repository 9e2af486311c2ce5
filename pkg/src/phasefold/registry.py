"""Named coefficient functions for config files and presets.

Config files refer to coefficients by these names; ``const:<value>`` yields a
constant function and is accepted anywhere a name is.  Entries are plain
callables of the grid arrays; ``E_avoided`` depends on the wavelength
parameter and is resolved per-epsilon.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np


class ConfigError(ValueError):
    """Raised on malformed configuration (unknown keys/names, bad values)."""


def _gaussian_p(p: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * p**2) / math.sqrt(2.0 * math.pi)


def rational_r(u: np.ndarray) -> np.ndarray:
    """r(u) = u^2 / (u^2 + 2|u|^2), with the removable value r(0) = 0.

    Complex-valued and non-holomorphic; bounded by 1 in modulus.  The
    denominator only vanishes at u = 0.
    """
    u = np.asarray(u, dtype=complex)
    denom = u * u + 2.0 * np.abs(u) ** 2
    safe = np.where(denom == 0, 1.0, denom)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(u) > 0, u * u / safe, 0.0)


_SCALAR_1D: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    "one": lambda x: np.ones_like(np.asarray(x, dtype=float)),
    "cos2": lambda x: np.cos(x) ** 2,
    "three_halves_plus_cos2x": lambda x: 1.5 + np.cos(2 * x),
    "one_plus_cos2x": lambda x: 1.0 + np.cos(2 * x),
    "E_3half_cos": lambda x: 1.5 + np.cos(x),
    "scalar_smooth_complex": lambda x: 1 + 0.5 * np.cos(2 * x)
    + 1j * (1 + 0.5 * np.sin(2 * x)),
    "system_smooth_complex": lambda x: 1 + 0.5 * np.cos(x) + 1j * np.sin(x),
    "system_smooth_real": lambda x: 1 + 0.5 * np.cos(x),
    "smooth_beta": lambda x: 0.4 + 0.3 * np.sin(2 * x),
}

_SOURCE_TERMS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": lambda u: np.zeros_like(np.asarray(u, dtype=complex)),
    "linear_r": lambda u: np.asarray(u, dtype=complex),
    "rational_r": rational_r,
}

_PHASE_SPACE: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "zero2d": lambda x, p: np.zeros(np.broadcast_shapes(np.shape(x), np.shape(p))),
    "gaussian_maxwellian": lambda x, p: (1 + 0.5 * np.cos(x)) * _gaussian_p(p),
    "gaussian_maxwellian_complex": lambda x, p: (
        (1 + 0.5 * np.sin(x)) + 1j * (1 + 0.5 * np.cos(x))
    )
    * _gaussian_p(p),
    "sin_b_coupling": lambda x, p: -0.5 * np.sin(p + 1.0) * np.ones_like(np.asarray(x, dtype=float)),
}


def _const(value: float):
    return lambda *args: value * np.ones(np.broadcast_shapes(*(np.shape(a) for a in args)))


def lookup(name: str, table: str, epsilon: float | None = None):
    """Resolve a coefficient name from one of the tables.

    ``table`` is one of "x", "r", "xp".  ``const:<v>`` returns the constant
    function; ``E_avoided`` (table "x") requires ``epsilon``.
    """
    if name.startswith("const:"):
        try:
            return _const(float(name.split(":", 1)[1]))
        except ValueError as exc:
            raise ConfigError(f"bad constant coefficient {name!r}") from exc
    if table == "x":
        if name == "E_avoided":
            if epsilon is None:
                raise ConfigError("E_avoided needs an epsilon to resolve")
            return lambda x: 1.0 - np.cos(x / 2.0) + epsilon
        if name in _SCALAR_1D:
            return _SCALAR_1D[name]
    elif table == "r":
        if name in _SOURCE_TERMS:
            return _SOURCE_TERMS[name]
    elif table == "xp":
        if name in _PHASE_SPACE:
            return _PHASE_SPACE[name]
    else:
        raise ValueError(f"unknown registry table {table!r}")
    raise ConfigError(f"unknown coefficient name {name!r} (table {table})")


def known_names() -> dict[str, list[str]]:
    return {
        "x": sorted(_SCALAR_1D) + ["E_avoided", "const:<v>"],
        "r": sorted(_SOURCE_TERMS),
        "xp": sorted(_PHASE_SPACE) + ["const:<v>"],
    }
