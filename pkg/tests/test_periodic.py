import math

import numpy as np
import pytest

from rabisim.params import ExperimentParams
from rabisim.periodic import (
    DEFAULT_DT_LATTICE,
    DEFAULT_DT_TWO_BAND,
    GridError,
    LatticeGridState,
    StepSizeError,
    band_mapping,
    build_two_band_model,
    evolve_lattice_series,
    evolve_periodic,
    evolve_periodic_series,
    lattice_momentum_density,
    lattice_observables,
    periodic_observables,
    prepare_lattice_initial,
    prepare_periodic_initial,
)
from rabisim.scenarios import default_time_grid, run_time_series

TWO_PI = 2.0 * math.pi
OMEGA = TWO_PI * 346.0

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


@pytest.fixture(scope="module")
def params():
    return ExperimentParams.create(omega=OMEGA, omega_q=TWO_PI * 586.0)


@pytest.fixture(scope="module")
def params0():
    return ExperimentParams.create(omega=OMEGA)


def test_block_rotates_to_qubit_form(params):
    # at three quasimomenta, rotating the literal band-basis block into the
    # (e, g) basis via the qubit dictionary must reproduce the abstract form
    # q^2/2m * I + (2 hbar k/m) q * sigma_x - (hbar omega_q/2) * sigma_z,
    # the Hamiltonian the Fock engine builds
    model = build_two_band_model(params, 64)
    hbar_k = params.hbar * params.k
    # columns: |e> = (|0_b>-|1_b>)/sqrt2, |g> = (|0_b>+|1_b>)/sqrt2
    rot = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
    for q in (-1.3 * hbar_k, 0.0, 0.7 * hbar_k):
        block = model.kinetic_block(q)
        rotated = rot.T @ block @ rot
        expected = (
            q**2 / (2.0 * params.mass) * np.eye(2)
            + (2.0 * hbar_k / params.mass) * q * np.array([[0.0, 1.0], [1.0, 0.0]])
            - 0.5 * params.hbar * params.omega_q * np.array([[1.0, 0.0], [0.0, -1.0]])
        )
        np.testing.assert_allclose(rotated, expected, rtol=0, atol=1e-12 * np.abs(block).max())


def test_crossing_gap(params):
    model = build_two_band_model(params, 64)
    vals = np.linalg.eigvalsh(model.kinetic_block(0.0))
    assert vals[1] - vals[0] == pytest.approx(params.hbar * params.omega_q, rel=1e-12)
    assert vals[1] - vals[0] == pytest.approx(params.lattice_depth / 2.0, rel=1e-12)


def test_free_branch_dispersions(params0):
    # without the lattice coupling the two branches are the shifted parabolas
    model = build_two_band_model(params0, 256)
    hbar_k = params0.hbar * params0.k
    state = prepare_periodic_initial("band_minus2hk", params0, 256)
    q = state.q_grid
    e_band0 = model.kinetic[256:]
    e_band1 = model.kinetic[:256]
    scale = np.abs(model.kinetic).max()
    np.testing.assert_allclose(
        e_band0, q**2 / (2 * params0.mass) + 2 * hbar_k * q / params0.mass,
        rtol=0, atol=1e-12 * scale,
    )
    np.testing.assert_allclose(
        e_band1, q**2 / (2 * params0.mass) - 2 * hbar_k * q / params0.mass,
        rtol=0, atol=1e-12 * scale,
    )


def test_prepared_periodic_states(params):
    st = prepare_periodic_initial("band_minus2hk", params, 512)
    rec = periodic_observables(st, params)
    assert rec.norm == pytest.approx(1.0, abs=1e-12)
    assert rec.sigma_x == pytest.approx(1.0, abs=1e-12)
    assert abs(rec.q) < 1e-9 * params.hbar * params.k
    assert abs(rec.N) < 1e-6
    assert abs(rec.parity) < 1e-12

    g = periodic_observables(prepare_periodic_initial("qubit_ground", params, 512), params)
    assert g.sigma_z == pytest.approx(-1.0, abs=1e-12)
    assert g.parity == pytest.approx(-1.0, abs=1e-10)
    e = periodic_observables(prepare_periodic_initial("qubit_excited", params, 512), params)
    assert e.sigma_z == pytest.approx(1.0, abs=1e-12)
    assert e.parity == pytest.approx(1.0, abs=1e-10)

    with pytest.raises(ValueError):
        prepare_periodic_initial("nope", params, 512)
    with pytest.raises(GridError):
        build_two_band_model(params, 32)


def test_envelope_broader_than_zone_rejected():
    # very stiff trap: the momentum envelope (width ~ sqrt(omega)) spills out
    # of the zone
    stiff = ExperimentParams.create(omega=TWO_PI * 1e5)
    with pytest.raises(GridError):
        prepare_periodic_initial("band_minus2hk", stiff, 256)


def test_band_mapping_peaks(params):
    st = prepare_periodic_initial("band_minus2hk", params, 512)
    p_det, dens = band_mapping(st)
    hbar_k = params.hbar * params.k
    assert dens.sum() * st.dp == pytest.approx(1.0, abs=1e-12)
    assert p_det[np.argmax(dens)] == pytest.approx(-2.0 * hbar_k, abs=st.dp)
    # equal superposition: two peaks of half mass at -/+ 2 hbar k
    st2 = prepare_periodic_initial("qubit_ground", params, 512)
    p_det2, dens2 = band_mapping(st2)
    lower = dens2[p_det2 < 0].sum() * st2.dp
    assert lower == pytest.approx(0.5, abs=1e-12)


def test_evolve_identity_and_classical_motion(params0):
    st = prepare_periodic_initial("band_minus2hk", params0, 512)
    out = evolve_periodic(st, params0, 0.0)
    np.testing.assert_allclose(out.psi, st.psi, atol=1e-14)

    # splitting-free case V=0: the band-0 packet runs the classical loop
    times = default_time_grid(params0, t_max=0.4 * math.pi / (2 * OMEGA))
    snaps = evolve_periodic_series(st, params0, times, dt=5e-8)
    hbar_k = params0.hbar * params0.k
    x_m0 = 2.0 * hbar_k / (params0.mass * params0.omega)
    for t, snap in zip(times, snaps):
        rec = periodic_observables(snap, params0, t=t)
        assert rec.x == pytest.approx(x_m0 * math.sin(OMEGA * t), abs=2e-9 * x_m0 + 1e-12)
        assert rec.q == pytest.approx(
            -2.0 * hbar_k * (1 - math.cos(OMEGA * t)), abs=1e-6 * hbar_k
        )
        assert rec.sigma_x == pytest.approx(1.0, abs=1e-10)


def test_periodic_conservation(params):
    st = prepare_periodic_initial("qubit_ground", params, 1024)
    times = default_time_grid(params)
    snaps = evolve_periodic_series(st, params, times)
    recs = [periodic_observables(s, params, t=t) for t, s in zip(times, snaps)]
    e0 = recs[0].energy
    scale = max(abs(e0), params.hbar * params.omega)
    for r in recs:
        assert abs(r.norm - 1.0) < 1e-10
        assert abs(r.energy - e0) < 1e-8 * scale
        assert abs(r.parity - recs[0].parity) < 1e-8


def test_step_size_guard(params):
    st = prepare_periodic_initial("band_minus2hk", params, 256)
    with pytest.raises(StepSizeError):
        evolve_periodic(st, params, 1e-4, dt=1e-6)
    with pytest.raises(StepSizeError):
        evolve_periodic(st, params, 1e-4, dt=-1e-9)


def test_dt_halving_invariance(params):
    st = prepare_periodic_initial("band_minus2hk", params, 1024)
    t_probe = 3e-4
    a = periodic_observables(evolve_periodic(st, params, t_probe), params)
    b = periodic_observables(
        evolve_periodic(st, params, t_probe, dt=DEFAULT_DT_TWO_BAND / 2), params
    )
    hbar_k = params.hbar * params.k
    assert abs(a.N - b.N) < 1e-5 * max(a.N, 1.0)
    assert abs(a.q - b.q) < 1e-5 * 2 * hbar_k
    assert abs(a.sigma_x - b.sigma_x) < 1e-5


# ---------------------------------------------------------------------------
# lattice oracle
# ---------------------------------------------------------------------------

def test_lattice_ground_state_stationary(params0):
    # V = 0 and no band factor: the trap ground state must not move
    st0 = prepare_lattice_initial("band_minus2hk", params0, 4096, 30e-6)
    x = st0.x_grid
    sigma = math.sqrt(params0.hbar / (2.0 * params0.mass * params0.omega))
    psi = np.exp(-(x**2) / (4.0 * sigma**2)).astype(complex)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * st0.dx)
    ground = LatticeGridState(n_x=4096, half_width=st0.half_width, psi=psi)
    snaps = evolve_lattice_series(ground, params0, np.array([5e-5, 1e-4]))
    r0 = lattice_observables(ground, params0)
    for snap in snaps:
        r = lattice_observables(snap, params0)
        assert abs(r.x - r0.x) < 1e-8 * sigma
        assert abs(r.N - r0.N) < 1e-8


def test_lattice_free_momentum_oscillation(params0):
    # Ehrenfest on the integration axis: exp(-2ikx) packet has <p> = -2 hbar k
    # and oscillates as -2 hbar k cos(omega t) in the trap
    st = prepare_lattice_initial("band_plus2hk", params0, 4096, 30e-6)
    hbar_k = params0.hbar * params0.k
    times = np.array([0.0, 2e-4, 4e-4, 7e-4])
    snaps = evolve_lattice_series(st, params0, times, dt=1e-7)
    for t, snap in zip(times, snaps):
        p, dens = lattice_momentum_density(snap, params0)
        dp = p[1] - p[0]
        p_mean = float((p * dens).sum() * dp)
        assert p_mean == pytest.approx(-2.0 * hbar_k * math.cos(OMEGA * t), abs=2e-4 * hbar_k)


def test_lattice_initial_records_match_two_band(params):
    for kind in ("band_minus2hk", "qubit_ground", "qubit_excited"):
        lat = lattice_observables(prepare_lattice_initial(kind, params, 4096, 30e-6), params)
        per = periodic_observables(prepare_periodic_initial(kind, params, 512), params)
        assert lat.sigma_x == pytest.approx(per.sigma_x, abs=1e-9)
        assert lat.sigma_z == pytest.approx(per.sigma_z, abs=1e-9)
        assert lat.q == pytest.approx(per.q, abs=1e-9 * params.hbar * params.k)
        assert lat.N == pytest.approx(per.N, abs=1e-5)
        assert lat.parity == pytest.approx(per.parity, abs=1e-9)


def test_lattice_two_band_cross_check(params):
    # short-horizon agreement; the zone-edge run lives in the acceptance suite
    times = default_time_grid(params, t_max=2.5e-4)
    per = run_time_series(params, "band_minus2hk", times, model="periodic", n_q=512)
    lat = run_time_series(params, "band_minus2hk", times, model="lattice", n_x=4096)
    hbar_k2 = 2.0 * params.hbar * params.k
    assert np.max(np.abs(per.column("sigma_x") - lat.column("sigma_x"))) < 0.02
    assert np.max(np.abs(per.column("q") - lat.column("q"))) < 0.02 * hbar_k2
    assert np.max(np.abs(per.column("x") - lat.column("x"))) < 0.02 * np.abs(
        per.column("x")
    ).max()


def test_lattice_grid_guards(params):
    with pytest.raises(GridError):
        prepare_lattice_initial("band_minus2hk", params, 4096, 10e-6)  # box < 3 x_m0
    with pytest.raises(GridError):
        prepare_lattice_initial("band_minus2hk", params, 512, 40e-6)  # dx too coarse
    # a state pushed against the box edge trips the domain guard
    st = prepare_lattice_initial("band_minus2hk", params, 4096, 30e-6)
    shifted = np.roll(st.psi, st.n_x // 2)
    bad = LatticeGridState(n_x=st.n_x, half_width=st.half_width, psi=shifted)
    with pytest.raises(GridError):
        evolve_lattice_series(bad, params, np.array([1e-6]))


def test_lattice_conservation(params):
    st = prepare_lattice_initial("qubit_ground", params, 4096, 30e-6)
    times = np.array([0.0, 1e-4, 2e-4])
    snaps = evolve_lattice_series(st, params, times)
    recs = [lattice_observables(s, params) for s in snaps]
    e0 = recs[0].energy
    scale = max(abs(e0), params.hbar * params.omega)
    for r in recs:
        assert abs(r.norm - 1.0) < 1e-10
        assert abs(r.energy - e0) < 1e-8 * scale
