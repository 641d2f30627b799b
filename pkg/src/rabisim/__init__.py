"""Deep-strong-coupling qubit-oscillator dynamics of trapped atoms.

Engines: exact truncated Fock-space propagation, the periodic two-band model
on the quasimomentum circle, and a position-grid lattice oracle, plus the
measurement-protocol presets and a deterministic CSV/JSON CLI.
"""

from .params import (
    CharacteristicScales,
    ExperimentParams,
    ParameterError,
    PhysicalConstants,
    characteristic_scales,
    derive_coupling,
    lattice_depth_from_qubit_freq,
    qubit_freq_from_lattice_depth,
)
from .fock import (
    FockSpinorState,
    ObservableRecord,
    QrmHamiltonian,
    TruncationError,
    build_qrm_hamiltonian,
    choose_truncation,
    evolve,
    evolve_series,
    observables,
    prepare_state,
)
from .displaced import (
    DisplacedBranchSolution,
    branch_trajectory,
    excitation_expectation,
    excitation_maximum,
    oracle_state,
    sigma_z_closed_form,
    slow_qubit_bound,
)
from .periodic import (
    GridError,
    LatticeGridState,
    StepSizeError,
    TwoBandQState,
    band_mapping,
    build_two_band_model,
    evolve_lattice,
    evolve_periodic,
    lattice_band_gap,
    lattice_observables,
    periodic_observables,
    prepare_lattice_initial,
    prepare_periodic_initial,
)
from .scenarios import (
    ScenarioSpec,
    SweepGrid,
    oracle_compare,
    psf_convolve,
    run_fig2a,
    run_fig2b,
    run_fig3,
    run_fig4a,
    run_fig4b,
    run_fig4cd,
)

__version__ = "0.1.0"
