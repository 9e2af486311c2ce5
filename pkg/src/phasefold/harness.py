"""Convergence, comparison and timing sweeps, reported as CSV.

Every error CSV uses the fixed column order

    epsilon,n_ts,dt,dx,linf_error,wall_seconds,solver_id

with one row per sweep cell and one per computed reference.  Rows are sorted
deterministically, floats are printed with repr-faithful precision, and no
randomness enters any solver, so re-running a configuration reproduces the
CSV body bit for bit apart from the wall_seconds column.  References are
cached per (kind, coefficients, epsilon, resolution) within a process;
cached and fresh references give identical error rows.
"""

from __future__ import annotations

import json
import subprocess
import time
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from . import hopping as hp
from . import scalar as sc
from . import system2 as sy
from .config import RunConfig
from .registry import ConfigError, lookup
from .spectral import NumericsError, PeriodicGrid, phase_to_tau, trig_sample

CSV_HEADER = "epsilon,n_ts,dt,dx,linf_error,wall_seconds,solver_id"


@dataclass
class ErrorRow:
    epsilon: float
    n_ts: int
    dt: float
    dx: float
    linf_error: float
    wall_seconds: float
    solver_id: str


@dataclass
class ErrorReport:
    rows: list[ErrorRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, **kwargs) -> None:
        self.rows.append(ErrorRow(**kwargs))

    def sorted_rows(self) -> list[ErrorRow]:
        return sorted(self.rows, key=lambda r: (r.epsilon, r.n_ts, r.solver_id))

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [CSV_HEADER]
        for r in self.sorted_rows():
            lines.append(
                f"{_fmt(r.epsilon)},{r.n_ts},{_fmt(r.dt)},{_fmt(r.dx)},"
                f"{_fmt(r.linf_error)},{_fmt(r.wall_seconds)},{r.solver_id}"
            )
        path.write_text("\n".join(lines) + "\n")
        meta = dict(self.metadata)
        meta.setdefault("date", date.today().isoformat())
        Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
        return path


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_table(path: Path, header: str, rows: list[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join([header] + rows) + "\n")
    return path


def linf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def sweep_errors_table(report: ErrorReport) -> dict[float, dict[int, float]]:
    """{epsilon: {n_ts: linf}} of the coarse-solver rows of a report."""
    table: dict[float, dict[int, float]] = {}
    for row in report.rows:
        if row.solver_id == "ngo":
            table.setdefault(row.epsilon, {})[row.n_ts] = row.linf_error
    return table


def reference_points(cfg: RunConfig, epsilon: float) -> int:
    """Direct-reference resolution: max(4000, 20/eps) capped at 20000."""
    if cfg.ref_n:
        return cfg.ref_n
    return int(min(max(4000, np.ceil(20.0 / epsilon)), 20000))


# --- problem builders -------------------------------------------------------


def scalar_problem(cfg: RunConfig, epsilon: float, n_ts: int) -> sc.ScalarProblem:
    s = cfg.scalar
    beta = lookup(s.beta, "x") if s.beta else None
    return sc.build_scalar_problem(
        c=lookup(s.c, "x"),
        a=lookup(s.a, "x"),
        r=lookup(s.r, "r"),
        alpha=lookup(s.alpha, "x"),
        epsilon=epsilon,
        n_x=n_ts,
        n_tau=cfg.n_tau,
        t_final=cfg.t_final,
        lower=cfg.lower,
        length=cfg.length,
        dt_rule=cfg.dt_rule or 0.5,
        beta=beta,
        corr_cap=cfg.corr_cap,
    )


def system_problem(cfg: RunConfig, epsilon: float, n_ts: int) -> sy.SystemProblem:
    s = cfg.system
    cmat = np.array([[s.c11, s.c12], [s.c21, s.c22]])
    return sy.build_system_problem(
        a1=lookup(s.a1, "x"),
        a2=lookup(s.a2, "x"),
        bigE=lookup(s.bigE, "x", epsilon=epsilon),
        cmat=cmat,
        f1_in=lookup(s.f1, "x"),
        f2_in=lookup(s.f2, "x"),
        epsilon=epsilon,
        n_x=n_ts,
        n_tau=cfg.n_tau,
        t_final=cfg.t_final,
        lower=cfg.lower,
        length=cfg.length,
        dt_rule=cfg.dt_rule or None,
        corr_cap=cfg.corr_cap,
        dxs_sign=s.dxs_sign,
    )


def hopping_problem(cfg: RunConfig, epsilon: float, n_x: int, dt: float) -> hp.HoppingProblem:
    h = cfg.hopping
    upot = lookup(h.upot, "x") if h.upot else None
    return hp.HoppingProblem(
        bigE=lookup(h.bigE, "x", epsilon=epsilon),
        bi=lookup(h.bi, "xp"),
        f_plus_in=lookup(h.f_plus, "xp"),
        f_minus_in=lookup(h.f_minus, "xp"),
        f_i_in=lookup(h.f_i, "xp"),
        epsilon=epsilon,
        xgrid=PeriodicGrid(cfg.lower, cfg.length, n_x),
        pgrid=PeriodicGrid(cfg.lower, cfg.length, h.n_p),
        taugrid=PeriodicGrid.tau(cfg.n_tau),
        dt=dt,
        t_final=cfg.t_final,
        upot=upot,
        tau_integrator=h.tau_integrator,
    )


# --- reference cache --------------------------------------------------------

_REFERENCE_CACHE: dict = {}


def clear_reference_cache() -> None:
    _REFERENCE_CACHE.clear()


def _scalar_cache_key(cfg: RunConfig, epsilon: float, n_d: int):
    s = cfg.scalar
    return ("scalar", s.c, s.a, s.r, s.alpha, s.beta, cfg.lower, cfg.length,
            cfg.t_final, epsilon, n_d, cfg.ref_dt)


def scalar_reference(cfg: RunConfig, epsilon: float):
    """Resolved direct solution (cached): returns (grid, u, wall_seconds, n_d)."""
    n_d = reference_points(cfg, epsilon)
    key = _scalar_cache_key(cfg, epsilon, n_d)
    if key not in _REFERENCE_CACHE:
        prob = scalar_problem(cfg, epsilon, max(cfg.nts))
        t0 = time.perf_counter()
        grid, u = sc.solve_direct_reference(
            prob, n_d, dt=cfg.ref_dt or None
        )
        wall = time.perf_counter() - t0
        _REFERENCE_CACHE[key] = (grid, u, wall, n_d)
    return _REFERENCE_CACHE[key]


def system_reference(cfg: RunConfig, epsilon: float):
    n_d = reference_points(cfg, epsilon)
    s = cfg.system
    key = ("system", s.a1, s.a2, s.bigE, s.f1, s.f2, s.c11, s.c12, s.c21, s.c22,
           cfg.lower, cfg.length, cfg.t_final, epsilon, n_d, cfg.ref_dt)
    if key not in _REFERENCE_CACHE:
        prob = system_problem(cfg, epsilon, max(cfg.nts))
        t0 = time.perf_counter()
        grid, u1, u2 = sy.system_direct_reference(prob, n_d, dt=cfg.ref_dt or None)
        wall = time.perf_counter() - t0
        _REFERENCE_CACHE[key] = (grid, u1, u2, wall, n_d)
    return _REFERENCE_CACHE[key]


# --- sweep drivers ----------------------------------------------------------


def run_convergence(cfg: RunConfig) -> ErrorReport:
    """Error-vs-resolution sweep for the scalar or 2x2 system solvers.

    For each (epsilon, n_ts) the augmented solver runs at its own resolution
    and is compared in the sup norm against the cached resolved reference
    restricted to the coarse nodes by trigonometric interpolation.
    """
    if cfg.kind == "scalar":
        return _run_convergence_scalar(cfg)
    if cfg.kind == "system":
        return _run_convergence_system(cfg)
    raise ConfigError(f"convergence sweeps cover scalar and system kinds, not {cfg.kind!r}")


def _run_convergence_scalar(cfg: RunConfig) -> ErrorReport:
    report = ErrorReport(metadata=_meta(cfg))
    for eps in cfg.epsilons:
        grid_ref, u_ref, wall_ref, n_d = scalar_reference(cfg, eps)
        report.add(
            epsilon=eps, n_ts=n_d, dt=cfg.t_final, dx=grid_ref.dx,
            linf_error=0.0, wall_seconds=wall_ref, solver_id="direct",
        )
        for n_ts in cfg.nts:
            prob = scalar_problem(cfg, eps, n_ts)
            t0 = time.perf_counter()
            result = sc.solve_ngo(prob, phase_method=cfg.phase, init=cfg.init)
            wall = time.perf_counter() - t0
            u_ref_coarse = trig_sample(u_ref, grid_ref, prob.xgrid.nodes)
            report.add(
                epsilon=eps, n_ts=n_ts, dt=prob.dt, dx=prob.xgrid.dx,
                linf_error=linf(result.u, u_ref_coarse), wall_seconds=wall,
                solver_id="ngo",
            )
    return report


def _run_convergence_system(cfg: RunConfig) -> ErrorReport:
    report = ErrorReport(metadata=_meta(cfg))
    for eps in cfg.epsilons:
        grid_ref, u1_ref, u2_ref, wall_ref, n_d = system_reference(cfg, eps)
        report.add(
            epsilon=eps, n_ts=n_d, dt=cfg.t_final, dx=grid_ref.dx,
            linf_error=0.0, wall_seconds=wall_ref, solver_id="direct",
        )
        for n_ts in cfg.nts:
            prob = system_problem(cfg, eps, n_ts)
            t0 = time.perf_counter()
            result = sy.solve_system_ngo(prob, phase_method=cfg.phase, init=cfg.init)
            wall = time.perf_counter() - t0
            err = max(
                linf(result.u1, trig_sample(u1_ref, grid_ref, prob.xgrid.nodes)),
                linf(result.u2, trig_sample(u2_ref, grid_ref, prob.xgrid.nodes)),
            )
            report.add(
                epsilon=eps, n_ts=n_ts, dt=prob.dt, dx=prob.xgrid.dx,
                linf_error=err, wall_seconds=wall, solver_id="ngo",
            )
    return report


def run_asymptotic_compare(cfg: RunConfig) -> ErrorReport:
    """Sup-norm distance between the filtered augmented solution and the
    eps -> 0 averaged model, per epsilon.

    The distance compares V(t_f, x, S/eps) (equivalently e^{-iS/eps} times
    the reconstruction) with the averaged solution on the same grid and
    step, so the shared first-order discretization bias cancels and the
    O(eps) model gap is what remains.
    """
    if cfg.kind != "scalar":
        raise ConfigError("the asymptotic comparison is defined for the scalar kind")
    report = ErrorReport(metadata=_meta(cfg))
    n_ts = max(cfg.nts)
    for eps in cfg.epsilons:
        prob = scalar_problem(cfg, eps, n_ts)
        t0 = time.perf_counter()
        result = sc.solve_ngo(prob, phase_method=cfg.phase, init=cfg.init)
        u_bar = sc.solve_asymptotic(prob, cfg.t_final)
        wall = time.perf_counter() - t0
        filtered = np.exp(-1j * phase_to_tau(result.state.s, eps)) * result.u
        report.add(
            epsilon=eps, n_ts=n_ts, dt=prob.dt, dx=prob.xgrid.dx,
            linf_error=linf(filtered, u_bar), wall_seconds=wall,
            solver_id="asym_distance",
        )
    return report


def run_timeseries(cfg: RunConfig, out_dir: str | Path | None = None) -> dict[str, Path]:
    """First-moment history R(t) = |sum u(t,x_j) x_j dx| plus final snapshots.

    The reference runs with a step that divides the coarse step, so both
    solvers are sampled at exactly the coarse step times; the reference
    moment is computed on the coarse mesh (restriction by trigonometric
    interpolation) with the same rectangle rule.
    """
    if cfg.kind != "scalar":
        raise ConfigError("the time-series diagnostic is defined for the scalar kind")
    out = Path(out_dir if out_dir is not None else cfg.out)
    eps = cfg.epsilons[0]
    n_ts = cfg.nts[0]
    prob = scalar_problem(cfg, eps, n_ts)
    xs = prob.xgrid.nodes
    dx = prob.xgrid.dx

    def moment(u: np.ndarray) -> float:
        return float(np.abs(np.sum(u * xs) * dx))

    ngo_series: list[tuple[float, float]] = []
    result = sc.solve_ngo(
        prob,
        phase_method=cfg.phase,
        init=cfg.init,
        on_step=lambda st, u: ngo_series.append((st.t, moment(u))),
    )

    n_d = reference_points(cfg, eps)
    ref_dt = cfg.ref_dt or None
    ref_series: list[tuple[float, float]] = []
    snap_ref: dict[str, np.ndarray] = {}

    def on_ref_step(t: float, u: np.ndarray) -> None:
        ref_series.append((t, moment(trig_sample(u, snap_ref["grid"], xs))))

    prob_ref = scalar_problem(cfg, eps, n_ts)
    grid_ref = PeriodicGrid(cfg.lower, cfg.length, n_d)
    snap_ref["grid"] = grid_ref
    grid_ref, u_ref = sc.solve_direct_reference(prob_ref, n_d, dt=ref_dt, on_step=on_ref_step)

    paths = {}
    rows = [f"{_fmt(t)},{_fmt(r)},ngo" for t, r in ngo_series]
    rows += [f"{_fmt(t)},{_fmt(r)},direct" for t, r in ref_series]
    paths["timeseries"] = _write_table(out / "timeseries.csv", "t,r,solver_id", rows)

    u_ref_coarse = trig_sample(u_ref, grid_ref, xs)
    rows = [
        f"{_fmt(x)},{_fmt(u.real)},{_fmt(u.imag)},ngo"
        for x, u in zip(xs, result.u)
    ] + [
        f"{_fmt(x)},{_fmt(u.real)},{_fmt(u.imag)},direct"
        for x, u in zip(xs, u_ref_coarse)
    ]
    paths["snapshot"] = _write_table(out / "snapshot.csv", "x,re,im,solver_id", rows)
    return paths


def run_hopping(cfg: RunConfig, out_dir: str | Path | None = None) -> dict[str, Path]:
    """Kinetic comparison bundle: p = 0 slices, densities, mass and timings.

    Runs the wavelength-robust solver at its fixed parameters and the direct
    solver at the configured reference resolution for each epsilon; emits
    tidy CSVs for the plotting front end plus an error/timing table (the
    density sup-error in the linf column).
    """
    if cfg.kind != "hopping":
        raise ConfigError("run_hopping needs a hopping configuration")
    out = Path(out_dir if out_dir is not None else cfg.out)
    h = cfg.hopping
    slice_rows: list[str] = []
    dens_rows: list[str] = []
    report = ErrorReport(metadata=_meta(cfg))
    mass_rows: list[str] = []
    for eps in cfg.epsilons:
        prob = hopping_problem(cfg, eps, h.n_x, h.dt)
        t0 = time.perf_counter()
        aug = hp.solve_hopping_ngo(prob)
        wall_ngo = time.perf_counter() - t0
        ngo = hp.hopping_reconstruct(aug, prob)

        prob_ref = hopping_problem(cfg, eps, h.ref_n_x, h.ref_dt)
        t0 = time.perf_counter()
        ref = hp.solve_hopping_direct(prob_ref)
        wall_ref = time.perf_counter() - t0

        if h.ref_n_x % h.n_x:
            raise NumericsError("reference n_x must be a multiple of the coarse n_x")
        stride = h.ref_n_x // h.n_x
        ip0 = int(np.argmin(np.abs(prob.pgrid.nodes)))
        xs = prob.xgrid.nodes
        fields_ngo = {
            "f_plus": ngo.fplus[:, ip0], "f_minus": ngo.fminus[:, ip0],
            "f_i_re": ngo.fi[:, ip0].real, "f_i_im": ngo.fi[:, ip0].imag,
        }
        fields_ref = {
            "f_plus": ref.fplus[::stride, ip0], "f_minus": ref.fminus[::stride, ip0],
            "f_i_re": ref.fi[::stride, ip0].real, "f_i_im": ref.fi[::stride, ip0].imag,
        }
        for name in fields_ngo:
            slice_rows += [
                f"{_fmt(eps)},{_fmt(x)},{name},{_fmt(v)},ngo"
                for x, v in zip(xs, fields_ngo[name])
            ]
            slice_rows += [
                f"{_fmt(eps)},{_fmt(x)},{name},{_fmt(v)},direct"
                for x, v in zip(xs, fields_ref[name])
            ]
        dn = hp.densities(ngo, prob.pgrid)
        dr = hp.densities(ref, prob_ref.pgrid)
        for name in dn:
            dens_rows += [
                f"{_fmt(eps)},{_fmt(x)},{name},{_fmt(v)},ngo" for x, v in zip(xs, dn[name])
            ]
            dens_rows += [
                f"{_fmt(eps)},{_fmt(x)},{name},{_fmt(v)},direct"
                for x, v in zip(xs, dr[name][::stride])
            ]
        dens_err = max(linf(dn[k], dr[k][::stride]) for k in dn)
        report.add(
            epsilon=eps, n_ts=h.n_x, dt=h.dt, dx=prob.xgrid.dx,
            linf_error=dens_err, wall_seconds=wall_ngo, solver_id="ngo",
        )
        report.add(
            epsilon=eps, n_ts=h.ref_n_x, dt=h.ref_dt, dx=prob_ref.xgrid.dx,
            linf_error=0.0, wall_seconds=wall_ref, solver_id="direct",
        )
        mass_rows.append(
            f"{_fmt(eps)},{_fmt(hp.augmented_mass(aug, prob.xgrid, prob.pgrid))},ngo"
        )
        mass_rows.append(
            f"{_fmt(eps)},{_fmt(hp.kinetic_mass(ref, prob_ref.xgrid, prob_ref.pgrid))},direct"
        )
    paths = {
        "slices": _write_table(out / "slices.csv", "epsilon,x,field,value,solver_id", slice_rows),
        "densities": _write_table(out / "densities.csv", "epsilon,x,field,value,solver_id", dens_rows),
        "mass": _write_table(out / "mass.csv", "epsilon,mass,solver_id", mass_rows),
        "timings": report.to_csv(out / "timings.csv"),
    }
    return paths


def run_single(cfg: RunConfig, out_dir: str | Path | None = None) -> dict[str, Path]:
    """One solve at (epsilons[0], nts[0]) with its reference, written as a
    snapshot CSV; returns the written paths."""
    out = Path(out_dir if out_dir is not None else cfg.out)
    eps = cfg.epsilons[0]
    n_ts = cfg.nts[0]
    if cfg.kind == "scalar":
        prob = scalar_problem(cfg, eps, n_ts)
        result = sc.solve_ngo(prob, phase_method=cfg.phase, init=cfg.init)
        grid_ref, u_ref, _, _ = scalar_reference(cfg, eps)
        u_rc = trig_sample(u_ref, grid_ref, prob.xgrid.nodes)
        rows = [
            f"{_fmt(x)},{_fmt(u.real)},{_fmt(u.imag)},ngo"
            for x, u in zip(prob.xgrid.nodes, result.u)
        ] + [
            f"{_fmt(x)},{_fmt(u.real)},{_fmt(u.imag)},direct"
            for x, u in zip(prob.xgrid.nodes, u_rc)
        ]
        return {"snapshot": _write_table(out / "snapshot.csv", "x,re,im,solver_id", rows)}
    if cfg.kind == "system":
        prob = system_problem(cfg, eps, n_ts)
        result = sy.solve_system_ngo(prob, phase_method=cfg.phase, init=cfg.init)
        grid_ref, u1_ref, u2_ref, _, _ = system_reference(cfg, eps)
        u1_rc = trig_sample(u1_ref, grid_ref, prob.xgrid.nodes)
        u2_rc = trig_sample(u2_ref, grid_ref, prob.xgrid.nodes)
        rows = []
        for comp, (ung, urf) in {
            "u1": (result.u1, u1_rc), "u2": (result.u2, u2_rc)
        }.items():
            rows += [
                f"{_fmt(x)},{comp},{_fmt(u.real)},{_fmt(u.imag)},ngo"
                for x, u in zip(prob.xgrid.nodes, ung)
            ]
            rows += [
                f"{_fmt(x)},{comp},{_fmt(u.real)},{_fmt(u.imag)},direct"
                for x, u in zip(prob.xgrid.nodes, urf)
            ]
        return {
            "snapshot": _write_table(out / "snapshot.csv", "x,component,re,im,solver_id", rows)
        }
    raise ConfigError("run_single covers scalar and system kinds; use run_hopping")


def _build_id() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if out.returncode == 0:
            return f"phasefold-0.1.0+{out.stdout.strip()}"
    except OSError:
        pass
    return "phasefold-0.1.0"


def _meta(cfg: RunConfig) -> dict:
    return {
        "preset": cfg.preset or "(inline)",
        "kind": cfg.kind,
        "phase": cfg.phase,
        "init": cfg.init,
        "t_final": cfg.t_final,
        "build": _build_id(),
    }
