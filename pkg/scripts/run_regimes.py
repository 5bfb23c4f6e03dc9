#!/usr/bin/env python3
"""Run one representative scenario per growth regime and print the reports.

The faster-than-polynomial case cannot sustain a rate estimate: the state
outruns the log-domain cap within a few delay windows, so for that regime
the script reports the truncation point and the triple-log slope over the
reachable range instead of a converged estimate.
"""

import math

from delaygrowth import (
    ConstantHistory, ExpLogPow, Linear, LinTimesExpLogPow, Power, Scenario,
    Zero, format_verification, simulate_euler, verify_scenario,
)

CASES = [
    ("sublinear: g(x) = sqrt(x)",
     Scenario(f=Zero(), g=Power(1.0, 0.5), tau=1.0, steps_per_delay=10,
              history=ConstantHistory(1.0), horizon=2000.0)),
    ("linear: g(x) = x",
     Scenario(f=Zero(), g=Linear(1.0), tau=1.0, steps_per_delay=32,
              history=ConstantHistory(1.0), horizon=300.0)),
    ("just past linear: g(x) = x exp(sqrt(log x))",
     Scenario(f=Zero(), g=LinTimesExpLogPow(1.0, 0.5), tau=1.0,
              steps_per_delay=4, history=ConstantHistory(1.0), horizon=400.0)),
    ("polynomial: g(x) = x^2",
     Scenario(f=Zero(), g=Power(1.0, 2.0), tau=1.0, steps_per_delay=4,
              history=ConstantHistory(1.0), horizon=600.0)),
]

FASTER = ("faster than polynomial: g(x) = exp((log x)^2)",
          Scenario(f=Zero(), g=ExpLogPow(1.0, 2.0), tau=1.0, steps_per_delay=8,
                   history=ConstantHistory(1.0), horizon=100.0))


def main() -> None:
    for label, scenario in CASES:
        print("=" * 72)
        print(label)
        print(format_verification(verify_scenario(scenario)))
        print()

    label, scenario = FASTER
    print("=" * 72)
    print(label)
    trajectory = simulate_euler(scenario)
    usable = [(trajectory.time(n), math.log(math.log(trajectory.state(n))))
              for n in trajectory.indices()
              if n >= 1 and trajectory.state(n) > 1.0]
    slope = (usable[-1][1] - usable[0][1]) / (usable[-1][0] - usable[0][0])
    print(f"truncated: {trajectory.truncated} after {trajectory.forward_steps} "
          f"steps (t = {trajectory.time(trajectory.forward_steps)})")
    print(f"triple-log slope over the reachable range: {slope:.4f} "
          f"(log 2 = {math.log(2.0):.4f})")


if __name__ == "__main__":
    main()
