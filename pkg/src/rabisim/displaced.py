"""Closed-form solutions of the zero-splitting quench (displaced oscillator).

With omega_q = 0 the Hamiltonian is diagonal on each sigma_x branch after a
displacement a -> a + s*alpha (s = branch sign, alpha = g/omega), so a quench
from the boson vacuum stays a coherent state on each branch.  These formulas
are the ground truth for every numerical engine in the package.

Gauge bookkeeping.  For the position-form coupling with the half-quantum
retained, H/hbar = omega*(a'a + 1/2) + g*s*(a + a'), evolution of |0> under
exp(-iHt/hbar) gives

    amplitude_s(t) = s * alpha * (exp(-i omega t) - 1),
    phase(t)       = exp(-i omega t / 2) * exp(+i alpha^2 omega t)
                     * exp(-i alpha^2 sin(omega t)),

with the phase independent of the branch (it cancels in every cross-branch
interference).  The engine's default momentum coupling i*g*s*(a' - a) without
the half-quantum maps onto this via a -> -i*a, giving

    amplitude_s(t) = i * s * alpha * (exp(-i omega t) - 1),
    phase(t)       = exp(+i alpha^2 (omega t - sin(omega t))).

Both sign sets were pinned by requiring complex overlap 1 (not just fidelity)
with direct numerical evolution; see tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .fock import BAND0, BAND1, FockSpinorState, coherent_amplitudes


@dataclass(frozen=True)
class DisplacedBranchSolution:
    """One sigma_x branch of the zero-splitting quench."""

    alpha: float   # g/omega
    branch: int    # sigma_x eigenvalue, +1 or -1

    def __post_init__(self) -> None:
        if self.alpha < 0.0:
            raise ValueError("alpha must be >= 0")
        if self.branch not in (+1, -1):
            raise ValueError("branch must be +1 or -1")


def excitation_expectation(alpha: float, omega: float, t):
    """<N>(t) = 4 alpha^2 sin^2(omega t / 2) for a vacuum quench."""
    if alpha < 0.0 or omega <= 0.0:
        raise ValueError("need alpha >= 0 and omega > 0")
    return 4.0 * alpha**2 * np.sin(0.5 * omega * np.asarray(t)) ** 2


def excitation_maximum(alpha: float) -> float:
    """Peak of <N>(t): 4 alpha^2, reached at omega*t = pi (mod 2 pi)."""
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    return 4.0 * alpha**2


def slow_qubit_bound(n_observed: float) -> float:
    """Lower bound on g/omega implied by an observed excitation number."""
    if n_observed < 0.0:
        raise ValueError("N must be >= 0")
    return math.sqrt(n_observed) / 2.0


def branch_trajectory(
    sol: DisplacedBranchSolution, omega: float, t: float
) -> tuple[complex, complex]:
    """(coherent amplitude, accumulated scalar phase) in the position gauge.

    The phase belongs to the displaced Hamiltonian with the half-quantum
    omega/2 retained; drop its exp(-i omega t/2) factor for a Hamiltonian
    built without the zero-point term.
    """
    a = sol.alpha
    amplitude = sol.branch * a * (np.exp(-1j * omega * t) - 1.0)
    phase = np.exp(-0.5j * omega * t) * np.exp(1j * a**2 * (omega * t - math.sin(omega * t)))
    return complex(amplitude), complex(phase)


def branch_trajectory_momentum_gauge(
    sol: DisplacedBranchSolution, omega: float, t: float
) -> tuple[complex, complex]:
    """Same trajectory expressed for the momentum coupling i*g*sigma_x*(a'-a)."""
    a = sol.alpha
    amplitude = 1j * sol.branch * a * (np.exp(-1j * omega * t) - 1.0)
    phase = np.exp(1j * a**2 * (omega * t - math.sin(omega * t)))
    return complex(amplitude), complex(phase)


def sigma_z_closed_form(alpha: float, omega: float, t, initial: str = "qubit_ground"):
    """<sigma_z>(t) for |g,0> or |e,0> at omega_q = 0.

    The branch overlap <gamma|-gamma> = exp(-2|gamma|^2) with |gamma|^2 =
    4 alpha^2 sin^2(omega t/2) gives a monotone envelope in |gamma|; all
    accumulated phases are branch-independent and cancel.
    """
    env = np.exp(-8.0 * alpha**2 * np.sin(0.5 * omega * np.asarray(t)) ** 2)
    if initial == "qubit_ground":
        return -env
    if initial == "qubit_excited":
        return env
    raise ValueError("initial must be 'qubit_ground' or 'qubit_excited'")


_BRANCH_WEIGHTS = {
    # coefficients on the sigma_x = (+1, -1) branches:
    # |g> = (|0_b> + |1_b>)/sqrt2, |e> = (|0_b> - |1_b>)/sqrt2
    "band_minus2hk": (1.0, 0.0),
    "band_plus2hk": (0.0, 1.0),
    "qubit_ground": (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
    "qubit_excited": (1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)),
}


def oracle_state(
    alpha: float,
    omega: float,
    t: float,
    kind: str,
    n_max: int,
    coupling: str = "momentum",
) -> FockSpinorState:
    """Exact evolved state of a vacuum preparation at omega_q = 0.

    Matches (including global phase) the state evolved by the engine's
    Hamiltonian with the given coupling form and no zero-point term.
    """
    if kind not in _BRANCH_WEIGHTS:
        raise ValueError(f"unsupported initial kind {kind!r}")
    weights = _BRANCH_WEIGHTS[kind]
    amps = np.zeros((2, n_max + 1), dtype=complex)
    for spinor, sign, weight in ((BAND0, +1, weights[0]), (BAND1, -1, weights[1])):
        if weight == 0.0:
            continue
        sol = DisplacedBranchSolution(alpha=alpha, branch=sign)
        if coupling == "momentum":
            gamma, phase = branch_trajectory_momentum_gauge(sol, omega, t)
        elif coupling == "position":
            gamma, phase = branch_trajectory(sol, omega, t)
            phase *= np.exp(0.5j * omega * t)  # engine H carries no zero-point
        else:
            raise ValueError("coupling must be 'momentum' or 'position'")
        amps += weight * phase * np.outer(spinor, coherent_amplitudes(gamma, n_max))
    state = FockSpinorState(n_max=n_max, amplitudes=amps)
    state.check_truncation()
    return state


def cat_state(alpha: float, relative_sign: int, n_max: int) -> FockSpinorState:
    """Normalized boson cat (|i alpha> + s |-i alpha>)/norm on the +1 branch.

    Convenience for checking that the quench produces two-branch coherent
    superpositions; the qubit factor is the sigma_x = +1 state.
    """
    if relative_sign not in (+1, -1):
        raise ValueError("relative_sign must be +1 or -1")
    plus = coherent_amplitudes(1j * alpha, n_max)
    minus = coherent_amplitudes(-1j * alpha, n_max)
    boson = plus + relative_sign * minus
    boson /= np.linalg.norm(boson)
    return FockSpinorState(n_max=n_max, amplitudes=np.outer(fock.BAND0, boson))
