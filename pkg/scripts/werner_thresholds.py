#!/usr/bin/env python3
"""Reproduce the Werner-state violation thresholds by bisection.

Prints one row per criterion with the bisected threshold, the closed form,
and the difference. All four flips are found from raw Born-rule statistics,
not from the closed forms.
"""

import argparse
import math

from steerkit.families import boundary_bisect

CLOSED_FORMS = {
    "product-spin": ("(sqrt(5)-1)/2", (math.sqrt(5) - 1) / 2),
    "sum-three-spin": ("1/sqrt(3)", 1 / math.sqrt(3)),
    "linear-2": ("1/sqrt(2)", 1 / math.sqrt(2)),
    "linear-3": ("1/sqrt(3)", 1 / math.sqrt(3)),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tol", type=float, default=1e-9, help="bisection bracket tolerance")
    args = parser.parse_args()

    print(f"{'criterion':<16} {'threshold':<20} {'closed form':<16} {'difference':<12} evals")
    for criterion_id, (label, expected) in CLOSED_FORMS.items():
        result = boundary_bisect(criterion_id, "werner", "mu", tol=args.tol)
        diff = result.threshold - expected
        print(
            f"{criterion_id:<16} {result.threshold:<20.12f} {label:<16} "
            f"{diff:<12.2e} {result.evaluations}"
        )


if __name__ == "__main__":
    main()
