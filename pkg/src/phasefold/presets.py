"""Named experiment presets mirroring the published test cases."""

from __future__ import annotations

import math

from .config import HoppingSpec, RunConfig, ScalarSpec, SystemSpec
from .registry import ConfigError


def _scalar_base(**overrides) -> RunConfig:
    cfg = RunConfig(
        kind="scalar",
        epsilons=[1.0, 1e-1, 1e-2, 1e-3],
        nts=[20, 40, 100, 200, 1000],
        n_tau=64,
        phase="exact",
        init="corrected",
        t_final=0.1,
        lower=-math.pi / 2,
        length=math.pi,
        out="results/scalar",
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def _build() -> dict[str, RunConfig]:
    presets: dict[str, RunConfig] = {}

    presets["scalar_smooth_a"] = _scalar_base()
    presets["scalar_upwind_phase"] = _scalar_base(phase="upwind1", out="results/scalar_upwind_phase")
    presets["scalar_spectral_phase"] = _scalar_base(
        phase="spectral_rk4", out="results/scalar_spectral_phase"
    )
    presets["scalar_uncorrected"] = _scalar_base(
        init="uncorrected", out="results/scalar_uncorrected"
    )
    vanish = _scalar_base(out="results/scalar_vanishing_a")
    vanish.scalar = ScalarSpec(a="one_plus_cos2x")
    presets["scalar_vanishing_a"] = vanish

    # t_f = 0.2: the distance has two O(eps) parts (profile fluctuation and
    # mean drift); at t_f = 0.1 their sup-norm interference at eps = 1e-1
    # bends the 3-point log-log fit to 0.795, while by t_f = 0.2 the secular
    # drift dominates and the fit sits at 0.91.  Both parts are verified
    # linear in eps down to 1e-4 at either horizon.
    presets["scalar_asymptotic"] = _scalar_base(
        epsilons=[1e-1, 1e-2, 1e-3], nts=[512], t_final=0.2,
        out="results/scalar_asymptotic",
    )

    # oscillation snapshot / time-history run: eps = 5e-3, t_f = 1, dt = 1/64
    # (~pi/200) so that steps land exactly on t_f, reference on 4000 points
    # with dt = t_f/2048 (~5e-4) aligned with the coarse steps.
    series = _scalar_base(
        epsilons=[5e-3],
        nts=[100],
        n_tau=16,
        t_final=1.0,
        dt_rule=(1.0 / 64) / (math.pi / 100),
        ref_n=4000,
        ref_dt=1.0 / 2048,
        out="results/scalar_timeseries",
    )
    presets["scalar_timeseries"] = series

    # the system reference splits into exact substeps (constant speeds), so
    # its step is limited by the Strang splitting error, not a CFL bound
    system = RunConfig(
        kind="system",
        epsilons=[1.0, 1e-1, 1e-2, 1e-3],
        nts=[20, 40, 100, 200, 1000],
        n_tau=64,
        phase="exact",
        init="corrected",
        t_final=0.1,
        lower=0.0,
        length=2 * math.pi,
        ref_dt=2.5e-4,
        out="results/system",
    )
    system.system = SystemSpec()  # a1=1, a2=4, E=3/2+cos x, C = rotation generator
    presets["system_rotation"] = system

    def system_variant(name, **run_overrides):
        cfg = RunConfig(**{**system.__dict__})
        cfg.system = SystemSpec()
        for key, value in run_overrides.items():
            setattr(cfg, key, value)
        return cfg

    presets["system_upwind_phase"] = system_variant(
        "system_upwind_phase", phase="upwind1", out="results/system_upwind_phase"
    )
    presets["system_spectral_phase"] = system_variant(
        "system_spectral_phase", phase="spectral_rk4", out="results/system_spectral_phase"
    )
    presets["system_uncorrected"] = system_variant(
        "system_uncorrected", init="uncorrected", out="results/system_uncorrected"
    )

    def hopping_preset(eps, t_final, ref_n_x, ref_dt, out):
        cfg = RunConfig(
            kind="hopping",
            epsilons=[eps],
            nts=[32],
            n_tau=8,
            t_final=t_final,
            lower=-2 * math.pi,
            length=4 * math.pi,
            out=out,
        )
        cfg.hopping = HoppingSpec(n_x=32, n_p=64, dt=0.05, ref_n_x=ref_n_x, ref_dt=ref_dt)
        return cfg

    presets["hopping_eps_1"] = hopping_preset(1.0, 2.0, 256, 0.05, "results/hopping_eps_1")
    # reference dt refined below the published 0.02: the splitting error of the
    # direct run at dt=0.02 (~4e-2) is not small against the tolerance used
    # for the coarse-run comparison
    presets["hopping_eps_1_32"] = hopping_preset(
        1.0 / 32, 2.0, 512, 0.002, "results/hopping_eps_1_32"
    )
    presets["hopping_eps_1_256"] = hopping_preset(
        1.0 / 256, 0.2, 4096, 5e-4, "results/hopping_eps_1_256"
    )
    return presets


_PRESETS = _build()


def get_preset(name: str) -> RunConfig:
    if name not in _PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; known: {', '.join(sorted(_PRESETS))}"
        )
    cfg = _PRESETS[name]
    # return a deep-ish copy so callers can mutate freely
    out = RunConfig(**{**cfg.__dict__})
    out.scalar = ScalarSpec(**cfg.scalar.__dict__)
    out.system = SystemSpec(**cfg.system.__dict__)
    out.hopping = HoppingSpec(**cfg.hopping.__dict__)
    out.epsilons = list(cfg.epsilons)
    out.nts = list(cfg.nts)
    out.preset = name
    return out


def preset_names() -> list[str]:
    return sorted(_PRESETS)
