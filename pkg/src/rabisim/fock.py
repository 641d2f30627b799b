"""Truncated qubit (x) Fock-space engine for the two-mode coupling Hamiltonian.

The model couples a two-level degree of freedom (the lowest two lattice bands
at their crossing) to one bosonic mode (the quantized trap vibration):

    H = hbar*omega * a'a  -  (hbar*omega_q/2) * sigma_z  +  coupling,

with the default "momentum" coupling  i*hbar*g * sigma_x * (a' - a)  and an
alternative "position" coupling  hbar*g * sigma_x * (a + a'), related by the
mode rotation a -> -i*a.  Quadratures follow

    x = sqrt(hbar/(2 m omega)) * (a + a'),
    q = +i * sqrt(hbar m omega / 2) * (a' - a),

so the momentum coupling equals (2*hbar*k/m) * sigma_x * q.

Qubit conventions (load-bearing, shared with the periodic model):
  * basis ordering (|e>, |g>) with sigma_z = diag(+1, -1);
  * band dictionary |0_b> = (|g>+|e>)/sqrt(2), |1_b> = (|g>-|e>)/sqrt(2);
    band 0 is the sigma_x = +1 state detected at momentum -2*hbar*k for
    quasimomentum 0, band 1 its sigma_x = -1 partner at +2*hbar*k.
  * The sign of the qubit term is anchored to the observable initial-state
    sensitivity: at large splittings the |e,0> preparation gains excitation
    faster than |g,0> (see tests/test_acceptance.py).  With the band
    dictionary above and the literal two-band matrix of periodic.py, the
    qubit term then enters this basis as -(hbar*omega_q/2)*sigma_z; writing
    it with + merely swaps which crossing combination carries each label.

Propagation uses the cached dense spectral decomposition: exact in time up
to floating point, no step error.  States and Hamiltonians are immutable
values; evolution is a pure function, so independent trajectories can run
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import ExperimentParams

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
BAND0 = np.array([1.0, 1.0]) / math.sqrt(2.0)    # (|g>+|e>)/sqrt2, sigma_x = +1
BAND1 = np.array([-1.0, 1.0]) / math.sqrt(2.0)   # (|g>-|e>)/sqrt2, sigma_x = -1

TAIL_WINDOW = 5
TAIL_MASS_LIMIT = 1e-8

STATE_KINDS = ("qubit_ground", "qubit_excited", "band_minus2hk", "band_plus2hk", "coherent")


class TruncationError(RuntimeError):
    """Fock truncation too small for the requested state or evolution."""


def choose_truncation(g_over_omega: float, safety: float = 10.0) -> int:
    """Fock cutoff adequate for a quench at coupling ratio ``g_over_omega``.

    Sized from the peak excitation 4*(g/omega)^2 plus ``safety`` standard
    deviations of the corresponding coherent state plus a constant floor;
    adequacy is enforced post-hoc by the tail-mass check, not guaranteed here.
    """
    if safety < 1.0:
        raise ValueError("safety must be >= 1")
    if g_over_omega < 0.0:
        raise ValueError("g_over_omega must be non-negative")
    peak = 4.0 * g_over_omega**2
    return math.ceil(peak + safety * math.sqrt(peak) + 20.0)


def coherent_amplitudes(gamma: complex, n_max: int) -> np.ndarray:
    """Fock amplitudes exp(-|g|^2/2) g^n / sqrt(n!) via a stable recurrence."""
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(gamma) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * gamma / math.sqrt(n)
    return amps


@dataclass(frozen=True)
class FockSpinorState:
    """Complex amplitudes indexed (spin, n), spin rows (|e>, |g>)."""

    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (2, self.n_max + 1):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} != (2, {self.n_max + 1})"
            )

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def tail_mass(self) -> float:
        """Population in the top ``TAIL_WINDOW`` Fock levels (truncation health)."""
        return float(np.sum(np.abs(self.amplitudes[:, -TAIL_WINDOW:]) ** 2))

    def check_truncation(self) -> None:
        tail = self.tail_mass()
        if tail > TAIL_MASS_LIMIT:
            raise TruncationError(
                f"tail mass {tail:.3e} exceeds {TAIL_MASS_LIMIT:.0e}; increase n_max"
            )

    def fidelity(self, other: "FockSpinorState") -> float:
        return abs(self.overlap(other)) ** 2

    def overlap(self, other: "FockSpinorState") -> complex:
        if other.n_max != self.n_max:
            raise ValueError("n_max mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def prepare_state(
    kind: str,
    n_max: int,
    alpha: complex | None = None,
    branch: int = +1,
) -> FockSpinorState:
    """Initial states used by the measurement protocols.

    ``qubit_ground``/``qubit_excited`` are |g,0> and |e,0>;
    ``band_minus2hk``/``band_plus2hk`` are the sigma_x = +/-1 band states with
    the boson in vacuum; ``coherent`` places a coherent state of amplitude
    ``alpha`` on the sigma_x branch selected by ``branch``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    amps = np.zeros((2, n_max + 1), dtype=complex)
    if kind == "qubit_ground":
        amps[1, 0] = 1.0
    elif kind == "qubit_excited":
        amps[0, 0] = 1.0
    elif kind == "band_minus2hk":
        amps[:, 0] = BAND0
    elif kind == "band_plus2hk":
        amps[:, 0] = BAND1
    elif kind == "coherent":
        if alpha is None:
            raise ValueError("coherent preparation needs alpha")
        if branch not in (+1, -1):
            raise ValueError("branch must be +1 or -1")
        fock = coherent_amplitudes(alpha, n_max)
        if 1.0 - np.sum(np.abs(fock) ** 2) > 1e-10:
            raise TruncationError(
                f"|alpha|^2 = {abs(alpha)**2:.1f} too close to n_max = {n_max}"
            )
        spinor = BAND0 if branch == +1 else BAND1
        amps = np.outer(spinor, fock)
    else:
        raise ValueError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")
    return FockSpinorState(n_max=n_max, amplitudes=amps)


@dataclass
class QrmHamiltonian:
    """Dense Hermitian matrix (entries in J) with a cached eigensystem."""

    n_max: int
    params: ExperimentParams
    coupling: str
    matrix: np.ndarray
    _eigen: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eigen is None:
            w, u = np.linalg.eigh(self.matrix)
            self._eigen = (w, u)
        return self._eigen


def build_qrm_hamiltonian(
    params: ExperimentParams, n_max: int, coupling: str = "momentum"
) -> QrmHamiltonian:
    """Assemble H on the truncated space (see module docstring for the form)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = n_max + 1
    hbar = params.hbar
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    number = np.diag(np.arange(d, dtype=float))
    eye_f = np.eye(d)
    if coupling == "momentum":
        couple = 1j * hbar * params.g * np.kron(SIGMA_X, a.T - a)
    elif coupling == "position":
        couple = hbar * params.g * np.kron(SIGMA_X, a + a.T)
    else:
        raise ValueError("coupling must be 'momentum' or 'position'")
    h = (
        hbar * params.omega * np.kron(np.eye(2), number)
        - 0.5 * hbar * params.omega_q * np.kron(SIGMA_Z, eye_f)
        + couple.astype(complex)
    )
    return QrmHamiltonian(n_max=n_max, params=params, coupling=coupling, matrix=h)


def evolve(
    ham: QrmHamiltonian,
    state: FockSpinorState,
    t: float,
    check_tail: bool = True,
) -> FockSpinorState:
    """psi(t) = exp(-i H t / hbar) psi0 via the cached spectral decomposition."""
    if state.n_max != ham.n_max:
        raise ValueError("state/Hamiltonian n_max mismatch")
    w, u = ham.eigensystem()
    y = u.conj().T @ state.amplitudes.reshape(-1)
    flat = u @ (np.exp(-1j * w * t / ham.params.hbar) * y)
    out = FockSpinorState(n_max=ham.n_max, amplitudes=flat.reshape(2, -1))
    if check_tail:
        out.check_truncation()
    return out


def evolve_series(
    ham: QrmHamiltonian,
    state: FockSpinorState,
    times: np.ndarray,
    check_tail: bool = True,
) -> np.ndarray:
    """Amplitudes at each time, shape (len(times), 2, n_max+1)."""
    if state.n_max != ham.n_max:
        raise ValueError("state/Hamiltonian n_max mismatch")
    times = np.asarray(times, dtype=float)
    w, u = ham.eigensystem()
    y = u.conj().T @ state.amplitudes.reshape(-1)
    phases = np.exp(-1j * np.outer(times, w) / ham.params.hbar)
    flats = (u @ (phases * y).T).T
    out = flats.reshape(len(times), 2, ham.n_max + 1)
    if check_tail and len(times):
        FockSpinorState(ham.n_max, out[-1]).check_truncation()
    return out


@dataclass(frozen=True)
class ObservableRecord:
    """One time-stamped set of expectation values (SI units)."""

    t: float        # s
    N: float        # boson excitation number
    x: float        # m
    q: float        # kg m / s
    sigma_x: float
    sigma_z: float
    parity: float   # <sigma_z (-1)^n>
    norm: float
    energy: float   # J


def observables(
    state: FockSpinorState,
    params: ExperimentParams,
    ham: QrmHamiltonian | None = None,
    t: float = 0.0,
) -> ObservableRecord:
    """All protocol observables of one state.

    N is reported as <a'a>; the second-moment estimator used for grid states,
    (m omega / 2 hbar)(<x^2> + <q^2>/(m omega)^2) - 1/2, equals it identically.
    ``ham`` supplies <H>; when omitted the default momentum-coupling
    Hamiltonian for ``params`` is built on the fly.
    """
    amps = state.amplitudes
    d = state.n_max + 1
    n_vals = np.arange(d)
    pops = np.abs(amps) ** 2
    norm = float(pops.sum())

    n_expect = float((pops * n_vals).sum())
    # <a> summed over both spin rows
    sqrts = np.sqrt(n_vals[1:])
    a_expect = complex((amps[:, :-1].conj() * sqrts * amps[:, 1:]).sum())
    x = math.sqrt(params.hbar / (2.0 * params.mass * params.omega)) * 2.0 * a_expect.real
    q = 2.0 * math.sqrt(params.hbar * params.mass * params.omega / 2.0) * a_expect.imag

    sigma_z = float(pops[0].sum() - pops[1].sum())
    sigma_x = float(2.0 * (amps[0].conj() * amps[1]).sum().real)
    signs = (-1.0) ** n_vals
    parity = float((signs * (pops[0] - pops[1])).sum())

    if ham is None:
        ham = build_qrm_hamiltonian(params, state.n_max)
    flat = amps.reshape(-1)
    energy = float(np.vdot(flat, ham.matrix @ flat).real)

    return ObservableRecord(
        t=t, N=n_expect, x=x, q=q,
        sigma_x=sigma_x, sigma_z=sigma_z, parity=parity,
        norm=norm, energy=energy,
    )


def parity_matrix(n_max: int) -> np.ndarray:
    """Conserved parity sigma_z (-1)^(a'a) on the truncated space."""
    signs = np.diag((-1.0) ** np.arange(n_max + 1))
    return np.kron(SIGMA_Z, signs)
