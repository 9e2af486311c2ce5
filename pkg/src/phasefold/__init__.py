"""Uniformly accurate solvers for highly oscillatory transport equations.

The package reformulates stiff oscillatory transport models by promoting the
oscillation phase to an extra periodic variable: a non-oscillatory linear
phase equation plus an augmented profile equation whose Chapman-Enskog
prepared initial data keeps all profile derivatives bounded uniformly in the
wavelength parameter.  Solvers then run with mesh and time step independent
of the wavelength.

Modules
-------
spectral   periodic grids, FFT calculus, the tau-operator toolbox
transport  slow phase-equation solvers (upwind / spectral RK4 / characteristics)
scalar     the scalar model: profile scheme, prepared data, references
system2    the 2x2 hyperbolic system variant
hopping    the kinetic surface-hopping model in (x, p)
harness    convergence / timing sweeps and CSV reports
cli        command-line entry point (``phasefold``)
"""

from .spectral import (
    NumericsError,
    PeriodicGrid,
    ProfileField,
    SpectralField1D,
    advect_exact,
    apply_q_inverse,
    phase_to_tau,
    spectral_derivative,
    tau_antiderivative,
    tau_average,
    trig_interpolate,
    trig_sample,
)

__all__ = [
    "NumericsError",
    "PeriodicGrid",
    "ProfileField",
    "SpectralField1D",
    "advect_exact",
    "apply_q_inverse",
    "phase_to_tau",
    "spectral_derivative",
    "tau_antiderivative",
    "tau_average",
    "trig_interpolate",
    "trig_sample",
]

__version__ = "0.1.0"
