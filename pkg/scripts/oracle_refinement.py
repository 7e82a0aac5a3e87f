#!/usr/bin/env python3
"""Grid-refinement experiment for the hidden-state LP oracle.

For the Werner family probed with two mutually unbiased qubit measurements,
bisects the feasibility flip at several grid resolutions. The grid LP is an
inner approximation of the hidden-state set, so the flip climbs toward the
two-measurement limit 1/sqrt(2) as the grid refines.
"""

import argparse
import math
import time

from steerkit.families import werner_state
from steerkit.measurements import all_pairs_strategy
from steerkit.oracle import feasibility_flip, mub_qubit_measurements, phenomenon_from_state, qubit_grid


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolutions", type=int, nargs="+", default=[50, 200, 800])
    parser.add_argument("--tol", type=float, default=1e-3)
    args = parser.parse_args()

    measurements = mub_qubit_measurements(2)
    strategy = all_pairs_strategy(measurements, measurements)

    def phenomenon(mu: float):
        return phenomenon_from_state(werner_state(mu), strategy)

    limit = 1 / math.sqrt(2)
    print(f"{'grid':<8} {'flip mu':<12} {'limit - flip':<14} seconds")
    for resolution in args.resolutions:
        start = time.perf_counter()
        flip = feasibility_flip(phenomenon, qubit_grid(resolution), tol=args.tol)
        elapsed = time.perf_counter() - start
        print(f"{resolution:<8} {flip:<12.6f} {limit - flip:<14.6f} {elapsed:.2f}")


if __name__ == "__main__":
    main()
