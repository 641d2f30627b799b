"""Executable measurement protocols producing deterministic tables.

Each ``run_*`` function reproduces one of the package's built-in protocol
presets (excitation growth, coupling sweep, displacement/quasimomentum/band
time series, qubit-population decay, initial-state sensitivity grid) on the
requested engine, returning plain records for the CLI layer to serialize.
Everything is deterministic: no randomness, fixed grids, results ordered by
axis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import displaced, fock, periodic
from .fock import ObservableRecord
from .params import ExperimentParams, derive_coupling

TWO_PI = 2.0 * math.pi

SCENARIO_IDS = ("fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig4cd", "oracle_compare")
MODELS = ("qrm", "periodic", "lattice")


@dataclass(frozen=True)
class ScenarioSpec:
    """Resolved inputs of one scenario run."""

    scenario: str
    params: ExperimentParams
    model: str = "qrm"
    times: np.ndarray | None = None
    omega_q_values: tuple[float, ...] | None = None      # rad/s
    g_over_omega_values: tuple[float, ...] | None = None
    state_kind: str = "band_minus2hk"
    psf_resolution: float | None = None                  # m, None = detection off
    n_max: int | None = None
    n_q: int = periodic.DEFAULT_N_Q
    n_x: int = periodic.DEFAULT_N_X
    dt: float | None = None

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIO_IDS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.times is not None:
            t = np.asarray(self.times)
            if len(t) == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0.0):
                raise ValueError("times must be strictly increasing and start at 0")


@dataclass(frozen=True)
class TimeSeries:
    label: str
    meta: dict
    records: list[ObservableRecord]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")


@dataclass(frozen=True)
class SweepCurve:
    label: str
    meta: dict
    axis_name: str
    axis_values: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class SweepGrid:
    axis_name: str
    axis_values: np.ndarray   # rows
    times: np.ndarray         # columns, s
    values: np.ndarray        # shape (len(axis_values), len(times))
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.axis_values), len(self.times)):
            raise ValueError("grid shape does not match axes")


def default_time_grid(
    params: ExperimentParams,
    t_max: float | None = None,
    samples_per_period: int = 64,
) -> np.ndarray:
    """Uniform sampling grid, ``samples_per_period`` per trap period.

    The default horizon is the zone-edge time pi/(2*omega), hit exactly by
    the last sample.
    """
    if t_max is None:
        t_max = math.pi / (2.0 * params.omega)
    period = TWO_PI / params.omega
    n = max(1, round(t_max / (period / samples_per_period)))
    return np.linspace(0.0, t_max, n + 1)


# ---------------------------------------------------------------------------
# single-trajectory runners
# ---------------------------------------------------------------------------

def run_time_series(
    params: ExperimentParams,
    state_kind: str,
    times: np.ndarray,
    model: str = "qrm",
    n_max: int | None = None,
    n_q: int = periodic.DEFAULT_N_Q,
    n_x: int = periodic.DEFAULT_N_X,
    dt: float | None = None,
    label: str | None = None,
) -> TimeSeries:
    """One trajectory of one engine, sampled on ``times``."""
    times = np.asarray(times, dtype=float)
    if model == "qrm":
        if n_max is None:
            n_max = fock.choose_truncation(params.g_over_omega)
        ham = fock.build_qrm_hamiltonian(params, n_max)
        psi0 = fock.prepare_state(state_kind, n_max)
        amps = fock.evolve_series(ham, psi0, times)
        records = [
            fock.observables(fock.FockSpinorState(n_max, a), params, ham, t=t)
            for t, a in zip(times, amps)
        ]
        resolved = {"n_max": n_max}
    elif model == "periodic":
        state = periodic.prepare_periodic_initial(state_kind, params, n_q)
        snaps = periodic.evolve_periodic_series(state, params, times, dt=dt)
        records = [
            periodic.periodic_observables(s, params, t=t) for t, s in zip(times, snaps)
        ]
        resolved = {
            "n_q": n_q,
            "dt_s": periodic.resolve_dt(params, dt, periodic.DEFAULT_DT_TWO_BAND),
        }
    elif model == "lattice":
        state = periodic.prepare_lattice_initial(state_kind, params, n_x)
        snaps = periodic.evolve_lattice_series(state, params, times, dt=dt)
        records = [
            periodic.lattice_observables(s, params, t=t) for t, s in zip(times, snaps)
        ]
        resolved = {
            "n_x": n_x,
            "dt_s": periodic.resolve_dt(params, dt, periodic.lattice_default_dt(params)),
        }
    else:
        raise ValueError(f"unknown model {model!r}")
    meta = {
        "model": model,
        "state": state_kind,
        "omega_hz": params.omega / TWO_PI,
        "omega_q_hz": params.omega_q / TWO_PI,
        "g_over_omega": params.g_over_omega,
        **resolved,
    }
    return TimeSeries(label=label or model, meta=meta, records=records)


# ---------------------------------------------------------------------------
# protocol presets
# ---------------------------------------------------------------------------

FIG2A_OMEGA_Q_HZ = (586.0, 5200.0)
FIG2B_OMEGA_Q_HZ = (590.0, 5850.0)
FIG3_OMEGA_Q_HZ = (0.0, 586.0, 1660.0, 3600.0)
FIG4A_OMEGA_Q_HZ = (0.0, 1050.0)
FIG4B_OMEGA_Q_HZ = 4660.0
FIG4CD_OMEGA_Q_MAX_HZ = 5500.0


def run_fig2a(spec: ScenarioSpec) -> list[TimeSeries]:
    """Excitation growth <N>(t) for two band splittings, band-0 preparation."""
    omega_qs = spec.omega_q_values or tuple(TWO_PI * f for f in FIG2A_OMEGA_Q_HZ)
    times = spec.times if spec.times is not None else default_time_grid(spec.params)
    out = []
    for wq in omega_qs:
        p = spec.params.with_omega_q(wq)
        out.append(
            run_time_series(
                p, spec.state_kind, times, model=spec.model,
                n_max=spec.n_max, n_q=spec.n_q, n_x=spec.n_x, dt=spec.dt,
                label=f"omega_q_{wq / TWO_PI:g}Hz",
            )
        )
    return out


def run_fig2b(spec: ScenarioSpec) -> list[SweepCurve]:
    """<N> at the fixed phase time t = (3 pi/8)/omega versus coupling ratio.

    The ratio axis is realized the way the experiment does it: the trap
    frequency is scanned at fixed k and mass, omega = 2 hbar k^2 / (m ratio^2).
    """
    ratios = np.asarray(
        spec.g_over_omega_values
        if spec.g_over_omega_values is not None
        else np.linspace(0.5, 8.0, 16)
    )
    omega_qs = spec.omega_q_values or tuple(TWO_PI * f for f in FIG2B_OMEGA_Q_HZ)
    base = spec.params
    curves = []
    for wq in omega_qs:
        values = np.empty(len(ratios))
        for i, ratio in enumerate(ratios):
            omega = 2.0 * base.hbar * base.k**2 / (base.mass * ratio**2)
            p = ExperimentParams(
                omega=omega,
                omega_q=wq,
                wavelength=base.wavelength,
                k=base.k,
                g=derive_coupling(omega, base.k, base.mass, base.hbar),
                lattice_depth=2.0 * base.hbar * wq,
                mass=base.mass,
                hbar=base.hbar,
            )
            t_probe = 3.0 * math.pi / (8.0 * omega)
            n_max = spec.n_max or fock.choose_truncation(p.g_over_omega)
            ham = fock.build_qrm_hamiltonian(p, n_max)
            psi = fock.evolve(ham, fock.prepare_state(spec.state_kind, n_max), t_probe)
            values[i] = fock.observables(psi, p, ham, t=t_probe).N
        curves.append(
            SweepCurve(
                label=f"omega_q_{wq / TWO_PI:g}Hz",
                meta={"omega_q_hz": wq / TWO_PI, "probe": "3pi/8omega",
                      "state": spec.state_kind},
                axis_name="g_over_omega",
                axis_values=ratios.copy(),
                values=values,
            )
        )
    return curves


def run_fig3(spec: ScenarioSpec) -> list[TimeSeries]:
    """<x>, <q>, <sigma_x> time series across band splittings, both engines.

    Detection (PSF) does not alter these columns: the blur kernel is
    symmetric, so first moments are unchanged; densities for detection-space
    rendering are handled separately (see psf_convolve).
    """
    omega_qs = spec.omega_q_values or tuple(TWO_PI * f for f in FIG3_OMEGA_Q_HZ)
    times = spec.times if spec.times is not None else default_time_grid(spec.params)
    out = []
    for wq in omega_qs:
        p = spec.params.with_omega_q(wq)
        for model in ("qrm", "periodic"):
            out.append(
                run_time_series(
                    p, spec.state_kind, times, model=model,
                    n_max=spec.n_max, n_q=spec.n_q, dt=spec.dt,
                    label=f"omega_q_{wq / TWO_PI:g}Hz_{model}",
                )
            )
    return out


def run_fig4a(spec: ScenarioSpec) -> list[TimeSeries]:
    """<sigma_z>(t) decay for both qubit preparations at two splittings."""
    omega_qs = spec.omega_q_values or tuple(TWO_PI * f for f in FIG4A_OMEGA_Q_HZ)
    times = (
        spec.times if spec.times is not None
        else default_time_grid(spec.params, t_max=700e-6)
    )
    out = []
    for wq in omega_qs:
        p = spec.params.with_omega_q(wq)
        for state in ("qubit_ground", "qubit_excited"):
            out.append(
                run_time_series(
                    p, state, times, model=spec.model,
                    n_max=spec.n_max, n_q=spec.n_q, n_x=spec.n_x, dt=spec.dt,
                    label=f"omega_q_{wq / TWO_PI:g}Hz_{state}",
                )
            )
    return out


def run_fig4b(spec: ScenarioSpec) -> list[TimeSeries]:
    """<N>(t) for ground vs excited preparation at one large splitting."""
    wq = (spec.omega_q_values or (TWO_PI * FIG4B_OMEGA_Q_HZ,))[0]
    times = spec.times if spec.times is not None else default_time_grid(spec.params)
    p = spec.params.with_omega_q(wq)
    return [
        run_time_series(
            p, state, times, model=spec.model,
            n_max=spec.n_max, n_q=spec.n_q, n_x=spec.n_x, dt=spec.dt,
            label=f"omega_q_{wq / TWO_PI:g}Hz_{state}",
        )
        for state in ("qubit_ground", "qubit_excited")
    ]


def run_fig4cd(spec: ScenarioSpec) -> SweepGrid:
    """Excitation-number difference N_excited - N_ground over (t, omega_q)."""
    omega_qs = np.asarray(
        spec.omega_q_values
        if spec.omega_q_values is not None
        else TWO_PI * np.arange(0.0, FIG4CD_OMEGA_Q_MAX_HZ + 1.0, 500.0)
    )
    times = spec.times if spec.times is not None else default_time_grid(spec.params)
    values = np.empty((len(omega_qs), len(times)))
    for i, wq in enumerate(omega_qs):
        p = spec.params.with_omega_q(float(wq))
        n_max = spec.n_max or fock.choose_truncation(p.g_over_omega)
        ham = fock.build_qrm_hamiltonian(p, n_max)
        n_curves = {}
        for state in ("qubit_ground", "qubit_excited"):
            amps = fock.evolve_series(ham, fock.prepare_state(state, n_max), times)
            n_curves[state] = np.array(
                [fock.observables(fock.FockSpinorState(n_max, a), p, ham).N for a in amps]
            )
        values[i] = n_curves["qubit_excited"] - n_curves["qubit_ground"]
    return SweepGrid(
        axis_name="omega_q_hz",
        axis_values=omega_qs / TWO_PI,
        times=times,
        values=values,
        meta={"observable": "N_excited_minus_N_ground",
              "g_over_omega": spec.params.g_over_omega},
    )


# ---------------------------------------------------------------------------
# detection model
# ---------------------------------------------------------------------------

def psf_convolve(
    grid: np.ndarray, density: np.ndarray, resolution: float
) -> np.ndarray:
    """Blur a sampled density with a Gaussian of FWHM ``resolution``.

    Circular FFT convolution with a mass-normalized kernel: total mass is
    preserved to rounding.  A resolution below the grid step returns the
    input unchanged.
    """
    grid = np.asarray(grid, dtype=float)
    density = np.asarray(density, dtype=float)
    if grid.shape != density.shape:
        raise ValueError("grid/density shape mismatch")
    dx = grid[1] - grid[0]
    span = dx * len(grid)
    if resolution < 0.0:
        raise ValueError("resolution must be >= 0")
    if resolution > span / 2.0:
        raise periodic.GridError("blur kernel wider than half the domain")
    sigma = resolution / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    if sigma < dx / 2.0:
        return density.copy()
    offsets = dx * np.arange(len(grid))
    folded = np.minimum(offsets, span - offsets)
    kernel = np.exp(-0.5 * (folded / sigma) ** 2)
    kernel /= kernel.sum()
    return np.real(np.fft.ifft(np.fft.fft(density) * np.fft.fft(kernel)))


# ---------------------------------------------------------------------------
# cross-engine comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonRow:
    pair: str          # e.g. "qrm_vs_periodic"
    observable: str
    omega_q_hz: float
    window: str        # time window description
    deviation: float   # max |difference| / scale over the window
    tolerance: float
    kind: str          # "within" (dev <= tol) or "exceeds" (dev > tol expected)

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance if self.kind == "within" else \
            self.deviation > self.tolerance


@dataclass(frozen=True)
class ComparisonReport:
    rows: list[ComparisonRow]
    meta: dict
    series: dict[str, TimeSeries] = field(default_factory=dict)

    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[ComparisonRow]:
        return [r for r in self.rows if not r.passed]


def _scaled_max_dev(a: np.ndarray, b: np.ndarray, mask: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(a[mask] - b[mask])) / scale)


def _observable_scale(name: str, series: np.ndarray, params: ExperimentParams) -> float:
    """Dynamic range with a physical floor for observables that stay put."""
    floors = {
        "N": 1.0,
        "x": math.sqrt(2.0 * params.hbar / (params.mass * params.omega)),
        "q": params.hbar * params.k,
        "sigma_x": 1.0,
        "sigma_z": 1.0,
        "parity": 1.0,
    }
    return float(max(series.max() - series.min(), np.abs(series).max(), floors[name]))


def oracle_compare(spec: ScenarioSpec, include_lattice: bool = True) -> ComparisonReport:
    """Pairwise engine deviations for the displacement-protocol parameter sets.

    Checks, per band splitting: closed form vs Fock engine (zero splitting,
    relative on <N>); Fock vs periodic within half the zone-edge time (2% of
    each observable's dynamic range) and their expected divergence in <q>
    near the edge; periodic vs lattice up to the edge (5%, with <q> and
    <sigma_x> measured against the fixed scales 2*hbar*k and 1).
    """
    params = spec.params
    omega_qs = spec.omega_q_values or tuple(TWO_PI * f for f in FIG3_OMEGA_Q_HZ)
    times = spec.times if spec.times is not None else default_time_grid(params)
    t_edge = math.pi / (2.0 * params.omega)
    early = times <= 0.5 * t_edge + 1e-12
    late = times >= 0.9 * t_edge - 1e-12
    full = times <= t_edge + 1e-12
    hbar_k2 = 2.0 * params.hbar * params.k

    rows: list[ComparisonRow] = []
    series: dict[str, TimeSeries] = {}
    for wq in omega_qs:
        p = params.with_omega_q(wq)
        wq_hz = wq / TWO_PI
        qrm = run_time_series(p, spec.state_kind, times, model="qrm", n_max=spec.n_max)
        per = run_time_series(p, spec.state_kind, times, model="periodic",
                              n_q=spec.n_q, dt=spec.dt)
        series[f"qrm_wq{wq_hz:g}"] = qrm
        series[f"periodic_wq{wq_hz:g}"] = per
        if wq == 0.0:
            n_oracle = displaced.excitation_expectation(p.g_over_omega, p.omega, times)
            n_num = qrm.column("N")
            nonzero = n_oracle > 1e-9 * n_oracle.max()
            rel = np.max(
                np.abs(n_num[nonzero] - n_oracle[nonzero]) / n_oracle[nonzero]
            )
            rows.append(ComparisonRow(
                pair="analytic_vs_qrm", observable="N", omega_q_hz=wq_hz,
                window="full", deviation=float(rel), tolerance=1e-6, kind="within",
            ))
        for name in ("N", "x", "q", "sigma_x", "sigma_z"):
            a, b = qrm.column(name), per.column(name)
            rows.append(ComparisonRow(
                pair="qrm_vs_periodic", observable=name, omega_q_hz=wq_hz,
                window="t<=0.5*t_edge",
                deviation=_scaled_max_dev(a, b, early, _observable_scale(name, a, p)),
                tolerance=0.02, kind="within",
            ))
        rows.append(ComparisonRow(
            pair="qrm_vs_periodic", observable="q", omega_q_hz=wq_hz,
            window="t>=0.9*t_edge",
            deviation=_scaled_max_dev(qrm.column("q"), per.column("q"), late, hbar_k2),
            tolerance=0.05, kind="exceeds",
        ))
        if include_lattice:
            lat = run_time_series(p, spec.state_kind, times, model="lattice",
                                  n_x=spec.n_x, dt=spec.dt)
            series[f"lattice_wq{wq_hz:g}"] = lat
            rows.append(ComparisonRow(
                pair="periodic_vs_lattice", observable="q", omega_q_hz=wq_hz,
                window="t<=t_edge",
                deviation=_scaled_max_dev(per.column("q"), lat.column("q"), full, hbar_k2),
                tolerance=0.05, kind="within",
            ))
            rows.append(ComparisonRow(
                pair="periodic_vs_lattice", observable="sigma_x", omega_q_hz=wq_hz,
                window="t<=t_edge",
                deviation=_scaled_max_dev(
                    per.column("sigma_x"), lat.column("sigma_x"), full, 1.0
                ),
                tolerance=0.05, kind="within",
            ))
            for name in ("N", "x"):
                a, b = per.column(name), lat.column(name)
                rows.append(ComparisonRow(
                    pair="periodic_vs_lattice", observable=name, omega_q_hz=wq_hz,
                    window="t<=t_edge",
                    deviation=_scaled_max_dev(a, b, full, _observable_scale(name, a, p)),
                    tolerance=0.05, kind="within",
                ))
    return ComparisonReport(
        rows=rows,
        meta={
            "state": spec.state_kind,
            "omega_hz": params.omega / TWO_PI,
            "g_over_omega": params.g_over_omega,
            "omega_q_hz": [w / TWO_PI for w in omega_qs],
        },
        series=series,
    )
