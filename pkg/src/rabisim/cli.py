"""Configuration parsing, scenario dispatch, deterministic CSV/JSON output.

Subcommands: ``evolve`` (one trajectory), ``sweep`` (axis scan), ``figure
<id>`` (built-in protocol preset), ``compare`` (cross-engine deviation
report).  Identical configuration yields byte-identical output files: numbers
are serialized with 15 significant digits, JSON keys are sorted, and no
timestamps or machine state enter the files.  Every data file is accompanied
by a JSON sidecar holding the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import periodic, scenarios
from .fock import ObservableRecord
from .params import DEFAULT_WAVELENGTH, ExperimentParams, ParameterError
from .scenarios import ScenarioSpec, SweepCurve, SweepGrid, TimeSeries

TWO_PI = 2.0 * math.pi

TIME_SERIES_HEADER = "t_us,N,x_um,q_hbar_k,sigma_x,sigma_z,parity,norm,energy_hbar_omega"


@dataclass
class RunConfig:
    """Fully resolved run configuration (file values overridden by flags)."""

    scenario: str | None = None
    omega_hz: float = 346.0
    omega_q_hz: float = 0.0
    g_over_omega: float | None = None
    lambda_nm: float = DEFAULT_WAVELENGTH * 1e9
    n_max: int | None = None
    n_q: int = periodic.DEFAULT_N_Q
    n_x: int = periodic.DEFAULT_N_X
    dt_us: float | None = None
    tmax_us: float | None = None
    model: str = "qrm"
    psf_um: float | None = None
    out_dir: str = "out"
    state: str = "band_minus2hk"
    samples_per_period: int = 64


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}
_POSITIVE_KEYS = (
    "omega_hz", "g_over_omega", "lambda_nm", "n_max", "n_q", "n_x",
    "dt_us", "tmax_us", "psf_um", "samples_per_period",
)


def parse_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Merge a JSON config file with flag overrides (flags win) and validate."""
    merged: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ParameterError(f"malformed JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ParameterError(f"config root in {path} must be a JSON object")
        merged.update(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    unknown = set(merged) - _CONFIG_KEYS
    if unknown:
        raise ParameterError(f"unknown config key(s): {sorted(unknown)}")

    cfg = RunConfig(**merged)
    for key in _POSITIVE_KEYS:
        value = getattr(cfg, key)
        if value is not None and value <= 0:
            raise ParameterError(f"config key {key!r} must be positive, got {value}")
    if cfg.omega_q_hz < 0:
        raise ParameterError("config key 'omega_q_hz' must be non-negative")
    if cfg.model not in scenarios.MODELS:
        raise ParameterError(f"config key 'model' must be one of {scenarios.MODELS}")
    for key in ("n_max", "n_q", "n_x", "samples_per_period"):
        value = getattr(cfg, key)
        if value is not None and int(value) != value:
            raise ParameterError(f"config key {key!r} must be an integer")
    return cfg


def resolve_params(cfg: RunConfig) -> ExperimentParams:
    return ExperimentParams.create(
        omega=TWO_PI * cfg.omega_hz,
        omega_q=TWO_PI * cfg.omega_q_hz,
        wavelength=cfg.lambda_nm * 1e-9,
        g_over_omega=cfg.g_over_omega,
    )


def coupling_consistency(cfg: RunConfig) -> float | None:
    """Relative difference between a pinned coupling ratio and the formula value.

    None when no explicit ratio was requested.  Informational: an explicit
    ratio is honored exactly (it adjusts the effective wavelength).
    """
    if cfg.g_over_omega is None:
        return None
    formula = ExperimentParams.create(
        omega=TWO_PI * cfg.omega_hz, wavelength=cfg.lambda_nm * 1e-9
    ).g_over_omega
    return abs(cfg.g_over_omega - formula) / formula


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.15g}"


def _record_row(r: ObservableRecord, params: ExperimentParams) -> str:
    hbar_k = params.hbar * params.k
    cells = (
        r.t * 1e6,
        r.N,
        r.x * 1e6,
        r.q / hbar_k,
        r.sigma_x,
        r.sigma_z,
        r.parity,
        r.norm,
        r.energy / (params.hbar * params.omega),
    )
    return ",".join(_fmt(c) for c in cells)


def write_timeseries(series: TimeSeries, params: ExperimentParams, path: Path) -> None:
    lines = [TIME_SERIES_HEADER]
    lines += [_record_row(r, params) for r in series.records]
    path.write_text("\n".join(lines) + "\n")


def read_timeseries(path: Path) -> dict[str, np.ndarray]:
    """Reparse a written time-series CSV into named columns."""
    lines = path.read_text().strip().splitlines()
    names = lines[0].split(",")
    data = np.array([[float(c) for c in line.split(",")] for line in lines[1:]])
    if data.size == 0:
        data = data.reshape(0, len(names))
    return {name: data[:, i] for i, name in enumerate(names)}


def write_curve(curve: SweepCurve, path: Path) -> None:
    lines = [f"{curve.axis_name},N"]
    lines += [
        f"{_fmt(a)},{_fmt(v)}" for a, v in zip(curve.axis_values, curve.values)
    ]
    path.write_text("\n".join(lines) + "\n")


def write_grid(grid: SweepGrid, path: Path) -> None:
    lines = [",".join(_fmt(v) for v in row) for row in grid.values]
    path.write_text("\n".join(lines) + "\n")


def write_sidecar(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _sidecar_payload(cfg: RunConfig, extra: dict) -> dict:
    payload = {"config": asdict(cfg), **extra}
    consistency = coupling_consistency(cfg)
    if consistency is not None:
        payload["g_over_omega_formula_reldiff"] = consistency
    return payload


# ---------------------------------------------------------------------------
# subcommand drivers
# ---------------------------------------------------------------------------

def _build_spec(cfg: RunConfig, scenario: str) -> ScenarioSpec:
    params = resolve_params(cfg)
    times = None
    if cfg.tmax_us is not None:
        times = scenarios.default_time_grid(
            params, t_max=cfg.tmax_us * 1e-6,
            samples_per_period=int(cfg.samples_per_period),
        )
    elif cfg.samples_per_period != 64:
        times = scenarios.default_time_grid(
            params, samples_per_period=int(cfg.samples_per_period)
        )
    return ScenarioSpec(
        scenario=scenario,
        params=params,
        model=cfg.model,
        times=times,
        state_kind=cfg.state,
        psf_resolution=cfg.psf_um * 1e-6 if cfg.psf_um else None,
        n_max=int(cfg.n_max) if cfg.n_max else None,
        n_q=int(cfg.n_q),
        n_x=int(cfg.n_x),
        dt=cfg.dt_us * 1e-6 if cfg.dt_us else None,
    )


def _series_meta(series: TimeSeries, filename: str) -> dict:
    return {"label": series.label, "file": filename, **series.meta}


def cmd_figure(cfg: RunConfig, figure_id: str) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = _build_spec(cfg, figure_id)
    params = spec.params
    written: list[Path] = []
    series_meta: list[dict] = []

    if figure_id in ("fig2a", "fig3", "fig4a", "fig4b"):
        runner = {
            "fig2a": scenarios.run_fig2a,
            "fig3": scenarios.run_fig3,
            "fig4a": scenarios.run_fig4a,
            "fig4b": scenarios.run_fig4b,
        }[figure_id]
        for series in runner(spec):
            filename = f"{figure_id}_{series.label}.csv"
            p = params.with_omega_q(TWO_PI * series.meta["omega_q_hz"])
            write_timeseries(series, p, out_dir / filename)
            written.append(out_dir / filename)
            series_meta.append(_series_meta(series, filename))
        extra = {"scenario": figure_id, "series": series_meta}
    elif figure_id == "fig2b":
        for curve in scenarios.run_fig2b(spec):
            filename = f"fig2b_{curve.label}.csv"
            write_curve(curve, out_dir / filename)
            written.append(out_dir / filename)
            series_meta.append({"label": curve.label, "file": filename, **curve.meta})
        extra = {"scenario": figure_id, "series": series_meta,
                 "axis_name": "g_over_omega"}
    elif figure_id == "fig4cd":
        grid = scenarios.run_fig4cd(spec)
        write_grid(grid, out_dir / "fig4cd.csv")
        written.append(out_dir / "fig4cd.csv")
        extra = {
            "scenario": figure_id,
            "grid_file": "fig4cd.csv",
            "axes": {
                "rows_omega_q_hz": [float(v) for v in grid.axis_values],
                "cols_t_us": [float(t) * 1e6 for t in grid.times],
            },
            "meta": grid.meta,
        }
    else:
        raise ParameterError(f"unknown figure id {figure_id!r}")

    sidecar = out_dir / f"{figure_id}.json"
    write_sidecar(sidecar, _sidecar_payload(cfg, extra))
    written.append(sidecar)
    return written


def cmd_evolve(cfg: RunConfig, emit_density: bool = False) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = resolve_params(cfg)
    times = scenarios.default_time_grid(
        params,
        t_max=cfg.tmax_us * 1e-6 if cfg.tmax_us else None,
        samples_per_period=int(cfg.samples_per_period),
    )
    series = scenarios.run_time_series(
        params, cfg.state, times, model=cfg.model,
        n_max=int(cfg.n_max) if cfg.n_max else None,
        n_q=int(cfg.n_q), n_x=int(cfg.n_x),
        dt=cfg.dt_us * 1e-6 if cfg.dt_us else None,
    )
    csv_path = out_dir / "evolve.csv"
    write_timeseries(series, params, csv_path)
    written = [csv_path]

    extra: dict = {"scenario": "evolve", "series": [_series_meta(series, "evolve.csv")]}
    if emit_density:
        dt = cfg.dt_us * 1e-6 if cfg.dt_us else None
        lines: list[str]
        if cfg.model == "periodic":
            # detection-axis momentum densities (band-mapped)
            state = periodic.prepare_periodic_initial(cfg.state, params, int(cfg.n_q))
            snaps = periodic.evolve_periodic_series(state, params, times, dt=dt)
            hbar_k = params.hbar * params.k
            lines = ["t_us,p_hbar_k,density"]
            for t, snap in zip(times, snaps):
                p_det, dens = periodic.band_mapping(snap)
                for pv, dv in zip(p_det, dens):
                    lines.append(f"{_fmt(t * 1e6)},{_fmt(pv / hbar_k)},{_fmt(dv * hbar_k)}")
        elif cfg.model == "lattice":
            # real-space densities; --psf-um applies the imaging blur
            state = periodic.prepare_lattice_initial(cfg.state, params, int(cfg.n_x))
            snaps = periodic.evolve_lattice_series(state, params, times, dt=dt)
            lines = ["t_us,x_um,density"]
            for t, snap in zip(times, snaps):
                dens = np.abs(snap.psi) ** 2
                if cfg.psf_um:
                    dens = scenarios.psf_convolve(snap.x_grid, dens, cfg.psf_um * 1e-6)
                for xv, dv in zip(snap.x_grid, dens):
                    lines.append(f"{_fmt(t * 1e6)},{_fmt(xv * 1e6)},{_fmt(dv * 1e-6)}")
        else:
            raise ParameterError("--emit-density requires --model periodic or lattice")
        dens_path = out_dir / "density.csv"
        dens_path.write_text("\n".join(lines) + "\n")
        written.append(dens_path)
        extra["density_file"] = "density.csv"

    sidecar = out_dir / "evolve.json"
    write_sidecar(sidecar, _sidecar_payload(cfg, extra))
    written.append(sidecar)
    return written


def cmd_sweep(cfg: RunConfig, axis: str, values: list[float]) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not values:
        raise ParameterError("sweep requires at least one axis value")
    spec_values = tuple(values)
    if axis == "g_over_omega":
        spec = _build_spec(cfg, "fig2b")
        spec = ScenarioSpec(
            scenario="fig2b", params=spec.params, model=cfg.model,
            omega_q_values=(TWO_PI * cfg.omega_q_hz,),
            g_over_omega_values=spec_values,
            state_kind=cfg.state, n_max=spec.n_max,
        )
        curves = scenarios.run_fig2b(spec)
        path = out_dir / "sweep.csv"
        write_curve(curves[0], path)
        extra = {"scenario": "sweep", "axis_name": axis,
                 "axis_values": list(values), "series": [curves[0].meta]}
    elif axis == "omega_q_hz":
        spec = _build_spec(cfg, "fig4cd")
        spec = ScenarioSpec(
            scenario="fig4cd", params=spec.params, model=cfg.model,
            times=spec.times,
            omega_q_values=tuple(TWO_PI * v for v in values),
            n_max=spec.n_max, n_q=spec.n_q, n_x=spec.n_x, dt=spec.dt,
        )
        grid = scenarios.run_fig4cd(spec)
        path = out_dir / "sweep.csv"
        write_grid(grid, path)
        extra = {
            "scenario": "sweep", "axis_name": axis,
            "axes": {
                "rows_omega_q_hz": [float(v) for v in grid.axis_values],
                "cols_t_us": [float(t) * 1e6 for t in grid.times],
            },
            "meta": grid.meta,
        }
    else:
        raise ParameterError("sweep axis must be 'g_over_omega' or 'omega_q_hz'")
    sidecar = out_dir / "sweep.json"
    write_sidecar(sidecar, _sidecar_payload(cfg, extra))
    return [path, sidecar]


def cmd_compare(
    cfg: RunConfig,
    include_lattice: bool = True,
    omega_q_hz_list: list[float] | None = None,
) -> list[Path]:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = _build_spec(cfg, "oracle_compare")
    if omega_q_hz_list:
        spec = ScenarioSpec(
            scenario="oracle_compare", params=spec.params, times=spec.times,
            omega_q_values=tuple(TWO_PI * v for v in omega_q_hz_list),
            state_kind=spec.state_kind, n_max=spec.n_max,
            n_q=spec.n_q, n_x=spec.n_x, dt=spec.dt,
        )
    report = scenarios.oracle_compare(spec, include_lattice=include_lattice)
    lines = ["pair,observable,omega_q_hz,window,deviation,tolerance,kind,passed"]
    for r in report.rows:
        lines.append(
            f"{r.pair},{r.observable},{_fmt(r.omega_q_hz)},{r.window},"
            f"{_fmt(r.deviation)},{_fmt(r.tolerance)},{r.kind},{r.passed}"
        )
    csv_path = out_dir / "compare.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    sidecar = out_dir / "compare.json"
    write_sidecar(
        sidecar,
        _sidecar_payload(
            cfg,
            {"scenario": "oracle_compare", "all_passed": report.all_passed(),
             "meta": report.meta},
        ),
    )
    return [csv_path, sidecar]


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--omega-hz", type=float, dest="omega_hz")
    p.add_argument("--omega-q-hz", type=float, dest="omega_q_hz")
    p.add_argument("--g-over-omega", type=float, dest="g_over_omega")
    p.add_argument("--lambda-nm", type=float, dest="lambda_nm")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--n-q", type=int, dest="n_q")
    p.add_argument("--n-x", type=int, dest="n_x")
    p.add_argument("--dt-us", type=float, dest="dt_us")
    p.add_argument("--tmax-us", type=float, dest="tmax_us")
    p.add_argument("--model", choices=scenarios.MODELS, dest="model")
    p.add_argument("--psf-um", type=float, dest="psf_um")
    p.add_argument("--state", dest="state")
    p.add_argument("--samples-per-period", type=int, dest="samples_per_period")
    p.add_argument("--out-dir", dest="out_dir")


def _collect_overrides(args: argparse.Namespace) -> dict:
    keys = _CONFIG_KEYS - {"scenario"}
    return {k: getattr(args, k, None) for k in keys if getattr(args, k, None) is not None}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rabisim",
        description="Deep-strong-coupling qubit-oscillator dynamics of trapped atoms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="run a single trajectory")
    _add_common(p_evolve)
    p_evolve.add_argument("--emit-density", action="store_true",
                          help="also write detection-axis momentum densities (periodic model)")

    p_figure = sub.add_parser("figure", help="run a built-in protocol preset")
    p_figure.add_argument("id", choices=["fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig4cd"])
    _add_common(p_figure)

    p_sweep = sub.add_parser("sweep", help="scan one axis")
    p_sweep.add_argument("--axis", required=True, choices=["g_over_omega", "omega_q_hz"])
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    _add_common(p_sweep)

    p_cmp = sub.add_parser("compare", help="cross-engine deviation report")
    p_cmp.add_argument("--no-lattice", action="store_true",
                       help="skip the position-grid oracle (faster)")
    p_cmp.add_argument("--omega-q-list",
                       help="comma-separated band splittings in Hz "
                            "(default: the displacement-protocol set)")
    _add_common(p_cmp)

    args = parser.parse_args(argv)
    try:
        cfg = parse_config(getattr(args, "config", None), _collect_overrides(args))
        if args.command == "evolve":
            written = cmd_evolve(cfg, emit_density=args.emit_density)
        elif args.command == "figure":
            cfg.scenario = args.id
            written = cmd_figure(cfg, args.id)
        elif args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
            written = cmd_sweep(cfg, args.axis, values)
        elif args.command == "compare":
            wq_list = None
            if args.omega_q_list:
                wq_list = [float(v) for v in args.omega_q_list.split(",") if v.strip()]
            written = cmd_compare(cfg, include_lattice=not args.no_lattice,
                                  omega_q_hz_list=wq_list)
        else:  # pragma: no cover
            parser.error("unknown command")
            return 2
    except (ParameterError, periodic.GridError, periodic.StepSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
