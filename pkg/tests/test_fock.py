import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabisim import displaced
from rabisim.fock import (
    FockSpinorState,
    TruncationError,
    build_qrm_hamiltonian,
    choose_truncation,
    coherent_amplitudes,
    evolve,
    evolve_series,
    observables,
    parity_matrix,
    prepare_state,
)
from rabisim.params import ExperimentParams

TWO_PI = 2.0 * math.pi
OMEGA = TWO_PI * 346.0


@pytest.fixture(scope="module")
def params():
    # coupling ratio pinned exactly for closed-form arithmetic
    return ExperimentParams.create(omega=OMEGA, g_over_omega=6.58)


@pytest.fixture(scope="module")
def ham(params):
    return build_qrm_hamiltonian(params, choose_truncation(6.58))


def test_choose_truncation_values():
    assert choose_truncation(6.58) >= 325
    assert choose_truncation(0.0) >= 20
    with pytest.raises(ValueError):
        choose_truncation(6.58, safety=0.5)


def test_decoupled_oscillator_spectrum():
    # no qubit term, no coupling: each oscillator level twice
    p = ExperimentParams.create(omega=OMEGA, wavelength=1e6)  # k ~ 0 => g ~ 0
    assert p.g_over_omega < 1e-4
    h = build_qrm_hamiltonian(p, 12)
    w = np.sort(np.linalg.eigvalsh(h.matrix)) / (p.hbar * p.omega)
    expected = np.sort(np.concatenate([np.arange(13.0)] * 2))
    np.testing.assert_allclose(w, expected, atol=1e-3)


def test_decoupled_qubit_spectrum():
    p = ExperimentParams.create(omega=OMEGA, omega_q=TWO_PI * 500.0, wavelength=1e6)
    h = build_qrm_hamiltonian(p, 12)
    w = np.sort(np.linalg.eigvalsh(h.matrix)) / (p.hbar * p.omega)
    split = p.omega_q / (2.0 * p.omega)
    expected = np.sort(np.concatenate([np.arange(13.0) - split, np.arange(13.0) + split]))
    np.testing.assert_allclose(w, expected, atol=1e-3)


def test_ground_energy_zero_splitting(params, ham):
    # -g^2/omega for the bare-oscillator form; adding the half-quantum gives
    # the displaced-oscillator value omega/2 - g^2/omega
    w, _ = ham.eigensystem()
    scale = params.hbar * params.omega
    alpha_sq = params.g_over_omega**2
    assert w[0] / scale == pytest.approx(-alpha_sq, rel=1e-10)
    assert (w[0] + 0.5 * scale) / scale == pytest.approx(0.5 - alpha_sq, rel=1e-9)


def test_hermiticity_and_parity_commutation(params, ham):
    h = ham.matrix
    assert np.max(np.abs(h - h.conj().T)) < 1e-12 * np.max(np.abs(h))
    pi = parity_matrix(ham.n_max)
    comm = h @ pi - pi @ h
    assert np.max(np.abs(comm)) == 0.0


def test_prepared_states(params):
    n_max = 40
    g = observables(prepare_state("qubit_ground", n_max), params)
    assert (g.sigma_z, g.N, g.parity) == (-1.0, 0.0, -1.0)
    e = observables(prepare_state("qubit_excited", n_max), params)
    assert (e.sigma_z, e.N, e.parity) == (1.0, 0.0, 1.0)
    b = observables(prepare_state("band_minus2hk", n_max), params)
    assert b.sigma_x == pytest.approx(1.0, abs=1e-15)
    assert b.sigma_z == pytest.approx(0.0, abs=1e-15)
    b2 = observables(prepare_state("band_plus2hk", n_max), params)
    assert b2.sigma_x == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(ValueError):
        prepare_state("nope", n_max)


def test_coherent_preparation(params):
    n_max = choose_truncation(6.58)
    st_ = prepare_state("coherent", n_max, alpha=1j * 6.58, branch=+1)
    rec = observables(st_, params)
    assert rec.N == pytest.approx(6.58**2, rel=1e-10)
    assert rec.sigma_x == pytest.approx(1.0, rel=1e-12)
    # real alpha: displacement along x with <x> = sqrt(hbar/2 m omega) * 2 alpha
    st2 = prepare_state("coherent", 80, alpha=3.0, branch=-1)
    rec2 = observables(st2, params)
    x_unit = math.sqrt(params.hbar / (2.0 * params.mass * params.omega))
    assert rec2.x == pytest.approx(2.0 * 3.0 * x_unit, rel=1e-12)
    with pytest.raises(TruncationError):
        prepare_state("coherent", 30, alpha=6.0)


@given(st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=200)
def test_coherent_amplitudes_normalized(alpha):
    amps = coherent_amplitudes(alpha, 120)
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-9)


def test_evolve_identity_and_reversibility(params, ham):
    psi0 = prepare_state("band_minus2hk", ham.n_max)
    same = evolve(ham, psi0, 0.0)
    assert np.max(np.abs(same.amplitudes - psi0.amplitudes)) < 1e-12
    t = 3.3e-4
    back = evolve(ham, evolve(ham, psi0, t), -t)
    assert np.max(np.abs(back.amplitudes - psi0.amplitudes)) < 1e-10


def test_evolve_dimension_mismatch(params, ham):
    with pytest.raises(ValueError):
        evolve(ham, prepare_state("qubit_ground", ham.n_max + 1), 1e-4)


def test_truncation_flagged_post_hoc(params):
    # far-too-small space: the quench piles population at the cutoff
    small = build_qrm_hamiltonian(params, 25)
    psi0 = prepare_state("band_minus2hk", 25)
    with pytest.raises(TruncationError):
        evolve(small, psi0, math.pi / params.omega)


@pytest.mark.parametrize("ratio", [1.0, 3.0, 6.58])
def test_excitation_matches_closed_form(ratio):
    p = ExperimentParams.create(omega=OMEGA, g_over_omega=ratio)
    n_max = choose_truncation(ratio)
    h = build_qrm_hamiltonian(p, n_max)
    times = np.linspace(0.0, 2.0 * TWO_PI / (2.0 * p.omega), 41)
    amps = evolve_series(h, prepare_state("band_minus2hk", n_max), times)
    n_num = np.array(
        [observables(FockSpinorState(n_max, a), p, h).N for a in amps]
    )
    n_ref = displaced.excitation_expectation(ratio, p.omega, times)
    mask = n_ref > 1e-9 * n_ref.max()
    assert np.max(np.abs(n_num[mask] - n_ref[mask]) / n_ref[mask]) < 1e-6
    # exact peak sample at omega t = pi
    peak = evolve(h, prepare_state("band_minus2hk", n_max), math.pi / p.omega)
    assert observables(peak, p, h).N == pytest.approx(4.0 * ratio**2, rel=1e-6)


def test_conservation_along_trajectory(params, ham):
    times = np.linspace(0.0, 2.0e-3, 23)
    psi0 = prepare_state("qubit_ground", ham.n_max)
    amps = evolve_series(ham, psi0, times)
    recs = [observables(FockSpinorState(ham.n_max, a), params, ham) for a in amps]
    e0 = recs[0].energy
    e_scale = abs(e0) + params.hbar * params.omega
    for r in recs:
        assert abs(r.norm - 1.0) < 1e-10
        assert abs(r.parity - (-1.0)) < 1e-10
        assert abs(r.energy - e0) < 1e-10 * e_scale


def test_sigma_x_frozen_at_zero_splitting(params, ham):
    times = np.linspace(0.0, 2.0e-3, 23)
    psi0 = prepare_state("band_minus2hk", ham.n_max)
    amps = evolve_series(ham, psi0, times)
    sx = [observables(FockSpinorState(ham.n_max, a), params, ham).sigma_x for a in amps]
    assert np.max(np.abs(np.array(sx) - 1.0)) < 1e-10


def test_sigma_x_commutator_zero_splitting(params, ham):
    sx_full = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(ham.n_max + 1))
    comm = ham.matrix @ sx_full - sx_full @ ham.matrix
    assert np.max(np.abs(comm)) == 0.0


def test_ground_excited_symmetry_zero_splitting(params, ham):
    times = np.linspace(0.0, 1.5e-3, 17)
    n_curves = {}
    for kind in ("qubit_ground", "qubit_excited"):
        amps = evolve_series(ham, prepare_state(kind, ham.n_max), times)
        n_curves[kind] = np.array(
            [observables(FockSpinorState(ham.n_max, a), params, ham).N for a in amps]
        )
    assert np.max(np.abs(n_curves["qubit_ground"] - n_curves["qubit_excited"])) < 1e-10


def test_gauge_equivalence(params):
    p = params.with_omega_q(TWO_PI * 1050.0)
    n_max = choose_truncation(p.g_over_omega)
    h_mom = build_qrm_hamiltonian(p, n_max, coupling="momentum")
    h_pos = build_qrm_hamiltonian(p, n_max, coupling="position")
    times = np.linspace(0.0, 7.5e-4, 9)
    for kind in ("qubit_ground", "qubit_excited", "band_minus2hk"):
        a_mom = evolve_series(h_mom, prepare_state(kind, n_max), times)
        a_pos = evolve_series(h_pos, prepare_state(kind, n_max), times)
        for am, ap in zip(a_mom, a_pos):
            rm = observables(FockSpinorState(n_max, am), p, h_mom)
            rp = observables(FockSpinorState(n_max, ap), p, h_pos)
            assert abs(rm.N - rp.N) < 1e-10 * (1.0 + rm.N)
            assert abs(rm.sigma_z - rp.sigma_z) < 1e-10
            assert abs(rm.sigma_x - rp.sigma_x) < 1e-10
            # quadratures exchange roles under the mode rotation
            m_w = p.mass * p.omega
            x_scale = math.sqrt(p.hbar / (2.0 * m_w))
            assert abs(rp.x - rm.q / m_w) < 1e-10 * x_scale
            assert abs(rp.q + m_w * rm.x) < 1e-10 * x_scale * m_w


def test_oracle_state_overlap(params, ham):
    # complex overlap 1 (not only fidelity): pins every phase convention
    alpha = params.g_over_omega
    for frac in (0.21, 0.5, 1.0, 1.37):
        t = frac * math.pi / params.omega
        for kind in ("band_minus2hk", "qubit_ground", "qubit_excited"):
            num = evolve(ham, prepare_state(kind, ham.n_max), t)
            ora = displaced.oracle_state(alpha, params.omega, t, kind, ham.n_max)
            assert displaced and abs(ora.overlap(num) - 1.0) < 1e-9


def test_oracle_state_overlap_position_gauge(params):
    n_max = choose_truncation(params.g_over_omega)
    h = build_qrm_hamiltonian(params, n_max, coupling="position")
    t = 0.8 * math.pi / params.omega
    num = evolve(h, prepare_state("qubit_ground", n_max), t)
    ora = displaced.oracle_state(
        params.g_over_omega, params.omega, t, "qubit_ground", n_max, coupling="position"
    )
    assert abs(ora.overlap(num) - 1.0) < 1e-9


def test_cat_state_structure(params, ham):
    # the band-0 quench passes through two-branch coherent superpositions;
    # check against an explicitly constructed cat at the half-period point
    alpha = params.g_over_omega
    t = math.pi / params.omega
    num = evolve(ham, prepare_state("band_minus2hk", ham.n_max), t)
    # at omega t = pi the branch amplitude is -2*i*alpha (momentum gauge)
    target = FockSpinorState(
        ham.n_max,
        np.outer(
            np.array([1.0, 1.0]) / math.sqrt(2.0),
            coherent_amplitudes(-2j * alpha, ham.n_max),
        ),
    )
    assert num.fidelity(target) > 1.0 - 1e-8


def test_sigma_z_collapse_envelope(params, ham):
    times = np.linspace(0.0, 700e-6, 36)
    amps = evolve_series(ham, prepare_state("qubit_ground", ham.n_max), times)
    sz = np.array(
        [observables(FockSpinorState(ham.n_max, a), params, ham).sigma_z for a in amps]
    )
    ref = displaced.sigma_z_closed_form(params.g_over_omega, params.omega, times)
    assert np.max(np.abs(sz - ref)) < 1e-6


def test_truncation_doubling_invariance(params):
    n1 = choose_truncation(params.g_over_omega)
    t = 3.0 * math.pi / (8.0 * params.omega)
    values = []
    for n_max in (n1, 2 * n1):
        h = build_qrm_hamiltonian(params, n_max)
        psi = evolve(h, prepare_state("band_minus2hk", n_max), t)
        values.append(observables(psi, params, h).N)
    assert abs(values[1] - values[0]) < 1e-8 * values[0]
