"""Physical constants, experiment parameters, and derived scales.

Everything public here is SI: angular frequencies in rad/s, lengths in m,
masses in kg, energies in J, times in s.  Constructors accept the usual lab
inputs (ordinary frequencies in Hz, wavelength in nm) and convert exactly
once, in this module.  The numerical kernels elsewhere may nondimensionalize
internally; unit conversion is this module's sole responsibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

HBAR = 1.054571817e-34               # J s
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
RB87_MASS = 86.909180527 * ATOMIC_MASS_UNIT
DEFAULT_WAVELENGTH = 783.5e-9        # drive wavelength of the short-period lattice, m


class ParameterError(ValueError):
    """Non-physical or inconsistent parameter value."""


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    atom_mass: float = RB87_MASS

    def __post_init__(self) -> None:
        if self.hbar <= 0.0:
            raise ParameterError("hbar must be positive")
        if self.atom_mass <= 0.0:
            raise ParameterError("atom_mass must be positive")


def derive_coupling(omega: float, k: float, mass: float, hbar: float = HBAR) -> float:
    """Two-mode coupling rate g = k * sqrt(2*hbar*omega/mass), in rad/s."""
    if min(omega, k, mass, hbar) <= 0.0:
        raise ParameterError("derive_coupling requires positive omega, k, mass, hbar")
    return k * math.sqrt(2.0 * hbar * omega / mass)


def lattice_depth_from_qubit_freq(omega_q: float, hbar: float = HBAR) -> float:
    """Lattice depth V (J) giving band splitting hbar*omega_q at the crossing.

    The lattice potential is (V/2)cos(4kx); its plane-wave matrix element is
    V/4, so the two lowest bands split by 2*(V/4) = V/2 at the crossing.
    Hence V = 2*hbar*omega_q.
    """
    if omega_q < 0.0:
        raise ParameterError("omega_q must be non-negative")
    return 2.0 * hbar * omega_q


def qubit_freq_from_lattice_depth(depth: float, hbar: float = HBAR) -> float:
    """Inverse of :func:`lattice_depth_from_qubit_freq`."""
    if depth < 0.0:
        raise ParameterError("lattice depth must be non-negative")
    return depth / (2.0 * hbar)


@dataclass(frozen=True)
class ExperimentParams:
    """Trap/lattice parameters plus the derived coupling, immutable.

    ``g = k*sqrt(2*hbar*omega/mass)`` and ``lattice_depth = 2*hbar*omega_q``
    hold by construction.  When a coupling ratio is imposed explicitly (see
    :meth:`create`), ``k`` and ``wavelength`` are adjusted so the relation
    still holds.
    """

    omega: float          # trap angular frequency, rad/s
    omega_q: float        # qubit (band-splitting) angular frequency, rad/s
    wavelength: float     # lattice drive wavelength, m
    k: float              # 2*pi/wavelength, 1/m
    g: float              # coupling rate, rad/s
    lattice_depth: float  # V, J
    mass: float = RB87_MASS
    hbar: float = HBAR

    def __post_init__(self) -> None:
        if self.omega <= 0.0:
            raise ParameterError("omega must be positive")
        if self.omega_q < 0.0:
            raise ParameterError("omega_q must be non-negative")
        if min(self.wavelength, self.k, self.mass, self.hbar) <= 0.0:
            raise ParameterError("wavelength, k, mass, hbar must be positive")
        g_formula = derive_coupling(self.omega, self.k, self.mass, self.hbar)
        if abs(self.g - g_formula) > 1e-9 * g_formula:
            raise ParameterError("g inconsistent with k*sqrt(2*hbar*omega/mass)")
        v_formula = lattice_depth_from_qubit_freq(self.omega_q, self.hbar)
        if abs(self.lattice_depth - v_formula) > 1e-9 * (v_formula + self.hbar * self.omega):
            raise ParameterError("lattice_depth inconsistent with 2*hbar*omega_q")

    @classmethod
    def create(
        cls,
        omega: float,
        omega_q: float = 0.0,
        wavelength: float = DEFAULT_WAVELENGTH,
        mass: float = RB87_MASS,
        hbar: float = HBAR,
        g_over_omega: float | None = None,
    ) -> "ExperimentParams":
        """Build params from lab quantities (all angular frequencies, rad/s).

        ``g_over_omega``, when given, pins the coupling ratio exactly by
        solving for the effective ``k`` (equivalently the drive wavelength);
        all derived identities then remain exact.
        """
        if omega <= 0.0:
            raise ParameterError("omega must be positive")
        if g_over_omega is not None:
            if g_over_omega <= 0.0:
                raise ParameterError("g_over_omega must be positive")
            k = g_over_omega * omega / math.sqrt(2.0 * hbar * omega / mass)
            wavelength = 2.0 * math.pi / k
        else:
            k = 2.0 * math.pi / wavelength
        g = derive_coupling(omega, k, mass, hbar)
        return cls(
            omega=omega,
            omega_q=omega_q,
            wavelength=wavelength,
            k=k,
            g=g,
            lattice_depth=lattice_depth_from_qubit_freq(omega_q, hbar),
            mass=mass,
            hbar=hbar,
        )

    @classmethod
    def from_config(cls, cfg: dict) -> "ExperimentParams":
        """Build from the JSON parameter schema.

        Keys: ``omega_hz`` (required), ``omega_q_hz`` (default 0),
        ``lambda_nm`` (default 783.5), ``atom`` (only "Rb87").  Frequencies
        are ordinary frequencies in Hz and are converted to rad/s here.
        """
        allowed = {"omega_hz", "omega_q_hz", "lambda_nm", "atom", "g_over_omega"}
        unknown = set(cfg) - allowed
        if unknown:
            raise ParameterError(f"unknown parameter key(s): {sorted(unknown)}")
        if "omega_hz" not in cfg:
            raise ParameterError("missing required key: omega_hz")
        atom = cfg.get("atom", "Rb87")
        if atom != "Rb87":
            raise ParameterError(f"unsupported atom: {atom!r} (only 'Rb87')")
        return cls.create(
            omega=2.0 * math.pi * float(cfg["omega_hz"]),
            omega_q=2.0 * math.pi * float(cfg.get("omega_q_hz", 0.0)),
            wavelength=float(cfg.get("lambda_nm", 783.5)) * 1e-9,
            g_over_omega=(
                float(cfg["g_over_omega"]) if cfg.get("g_over_omega") is not None else None
            ),
        )

    @property
    def g_over_omega(self) -> float:
        return self.g / self.omega

    def with_omega_q(self, omega_q: float) -> "ExperimentParams":
        """Same trap and coupling, different band splitting."""
        return ExperimentParams(
            omega=self.omega,
            omega_q=omega_q,
            wavelength=self.wavelength,
            k=self.k,
            g=self.g,
            lattice_depth=lattice_depth_from_qubit_freq(omega_q, self.hbar),
            mass=self.mass,
            hbar=self.hbar,
        )


@dataclass(frozen=True)
class CharacteristicScales:
    x_ho: float          # ground-wavepacket size sqrt(2*hbar/(m*omega)), m
    x_m0: float          # free oscillation amplitude 2*hbar*k/(m*omega), m
    t_edge: float        # time to reach the zone edge, pi/(2*omega), s
    g_over_omega: float  # dimensionless coupling ratio


def characteristic_scales(params: ExperimentParams) -> CharacteristicScales:
    """Derived length/time scales; x_m0/x_ho equals g/omega identically."""
    x_ho = math.sqrt(2.0 * params.hbar / (params.mass * params.omega))
    x_m0 = 2.0 * params.hbar * params.k / (params.mass * params.omega)
    return CharacteristicScales(
        x_ho=x_ho,
        x_m0=x_m0,
        t_edge=math.pi / (2.0 * params.omega),
        g_over_omega=params.g_over_omega,
    )
