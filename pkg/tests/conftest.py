import math

import pytest

from rabisim.params import ExperimentParams
from rabisim.scenarios import ScenarioSpec, oracle_compare

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def reference_params():
    """Trap at 346 Hz, default drive wavelength: coupling ratio ~ 6.575."""
    return ExperimentParams.create(omega=TWO_PI * 346.0)


@pytest.fixture(scope="session")
def full_comparison_report(reference_params):
    """Cross-engine deviations for the displacement-protocol parameter sets.

    Shared between the scenario tests and the acceptance suite; the lattice
    runs dominate its cost, so it is computed once per session.
    """
    spec = ScenarioSpec(scenario="oracle_compare", params=reference_params)
    return oracle_compare(spec, include_lattice=True)
