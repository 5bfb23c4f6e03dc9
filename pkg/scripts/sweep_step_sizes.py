#!/usr/bin/env python3
"""Grid refinement study: estimate rates on several grids, extrapolate to h=0.

Prints one table per study.  The polynomial case has an exact grid rate
log 2/(tau+h) to compare against; the linear case only has the h=0 root,
so its predicted column is blank.
"""

import math

from delaygrowth import ConstantHistory, Linear, Power, Zero, solve_char_eq, sweep_h


def show(title: str, result, target: float, target_label: str) -> None:
    print(title)
    print(f"{'N':>4} {'h':>10} {'predicted':>12} {'estimated':>12} {'status':>14}")
    for p in result.points:
        predicted = "" if p.predicted is None else f"{p.predicted:.6f}"
        print(f"{p.steps_per_delay:>4} {p.h:>10.5f} {predicted:>12} "
              f"{p.estimated:>12.6f} {p.status.value:>14}")
    extrapolated = result.extrapolated
    deviation = (extrapolated - target) / target
    print(f"extrapolated h->0: {extrapolated:.6f}   "
          f"{target_label} = {target:.6f}   deviation {deviation:+.2%}")
    print()


def main() -> None:
    poly = sweep_h(Zero(), Power(1.0, 2.0), 1.0, ConstantHistory(1.0), 600.0,
                   [1, 2, 4, 8])
    show("polynomial delayed term g(x) = x^2", poly, math.log(2.0), "log 2")

    linear = sweep_h(Zero(), Linear(1.0), 1.0, ConstantHistory(1.0), 300.0,
                     [16, 32, 64])
    show("proportional delayed term g(x) = x", linear, solve_char_eq(1.0, 1.0),
         "characteristic root")


if __name__ == "__main__":
    main()
