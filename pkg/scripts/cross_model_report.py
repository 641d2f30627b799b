#!/usr/bin/env python3
"""Print the cross-engine deviation report for the displacement protocol.

Runs the closed-form solution, the Fock engine, the periodic two-band model,
and the lattice oracle over the zone-edge window at the reference parameters
and prints per-observable deviations against their tolerances.  Pass
--no-lattice to skip the slowest engine.
"""

import argparse
import math
import sys

from rabisim.params import ExperimentParams
from rabisim.scenarios import ScenarioSpec, oracle_compare


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--omega-hz", type=float, default=346.0)
    parser.add_argument("--no-lattice", action="store_true")
    args = parser.parse_args()

    params = ExperimentParams.create(omega=2.0 * math.pi * args.omega_hz)
    spec = ScenarioSpec(scenario="oracle_compare", params=params)
    report = oracle_compare(spec, include_lattice=not args.no_lattice)
    print(f"{'pair':24s} {'obs':8s} {'wq/2pi':>8s} {'window':16s} "
          f"{'dev':>10s} {'tol':>8s} verdict")
    for r in report.rows:
        print(f"{r.pair:24s} {r.observable:8s} {r.omega_q_hz:8.0f} {r.window:16s} "
              f"{r.deviation:10.3e} {r.tolerance:8.3g} "
              f"{'ok' if r.passed else 'FAIL'} ({r.kind})")
    print("all passed" if report.all_passed() else "FAILURES PRESENT")
    return 0 if report.all_passed() else 1


if __name__ == "__main__":
    sys.exit(main())
