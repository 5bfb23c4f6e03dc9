"""Config-driven command line front end.

A run is described by a flat ``key = value`` file (``#`` starts a comment)::

    command = verify
    f       = zero
    g       = power(1, 0.5)
    tau     = 1
    psi     = const(1)
    N       = 10
    horizon = 2000

Invoke as ``delaygrowth CONFIG [KEY=VALUE ...]`` or, without a file, as
``delaygrowth COMMAND [KEY=VALUE ...]``; later ``KEY=VALUE`` pairs override
earlier settings.  Exit codes: 0 success, 1 failed verification or envelope,
2 configuration or domain problem (including a refused prediction), 3 numeric
failure before a usable estimate.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field

from .analysis import (
    PredictionRefused, default_functional, envelope_check, envelope_margins,
    format_prediction, format_verification, predict, solve_char_eq, sweep_h,
    verify_scenario,
)
from .coefficients import parse_coefficient
from .errors import DomainError, HorizonExceeded, NumericError
from .simulator import (
    Scenario, parse_history, simulate_euler, write_trajectory_csv,
)

COMMANDS = ("simulate", "predict", "verify", "sweep", "chareq", "envelope")

# every key a config file or override may set
KNOWN_KEYS = ("command", "f", "g", "tau", "psi", "N", "horizon", "out", "tol",
              "eps", "C")

USAGE = """\
usage: delaygrowth CONFIG [KEY=VALUE ...]
       delaygrowth COMMAND [KEY=VALUE ...]

commands: simulate | predict | verify | sweep | chareq | envelope
keys: f, g, tau, psi, N, horizon, out, tol, eps, C
"""


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    values: dict[str, str] = field(default_factory=dict)

    def require(self, key: str) -> str:
        if key not in self.values:
            raise ConfigError(f"command '{self.command}' needs the key '{key}'")
        return self.values[key]

    def get_float(self, key: str, default: float | None = None) -> float:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"command '{self.command}' needs the key '{key}'")
            return default
        raw = self.values[key]
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"key '{key}': not a number: {raw!r}") from None
        return value

    def get_int(self, key: str) -> int:
        raw = self.require(key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"key '{key}': not an integer: {raw!r}") from None


def parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="ascii") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
        values[key] = value
    return values


def parse_overrides(args: list[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    for arg in args:
        key, sep, value = arg.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"override {arg!r}: expected KEY=VALUE")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"override {arg!r}: unknown key '{key}'")
        values[key] = value
    return values


def load_config(argv: list[str]) -> RunConfig:
    if not argv:
        raise ConfigError(USAGE.rstrip())
    head, rest = argv[0], argv[1:]
    if head in COMMANDS:
        values = {"command": head}
        values.update(parse_overrides(rest))
    elif os.path.exists(head):
        values = parse_config_file(head)
        values.update(parse_overrides(rest))
    else:
        raise ConfigError(f"no such config file or command: {head!r}")
    command = values.pop("command", None)
    if command is None:
        raise ConfigError("no command given (set 'command = ...' in the config)")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    return RunConfig(command=command, values=values)


def build_scenario(config: RunConfig) -> Scenario:
    f = parse_coefficient(config.values.get("f", "zero"))
    g = parse_coefficient(config.require("g"))
    history = parse_history(config.require("psi"))
    return Scenario(f=f, g=g, tau=config.get_float("tau"),
                    steps_per_delay=config.get_int("N"), history=history,
                    horizon=config.get_float("horizon"))


def _write_rows(target: str | None, header: str, rows: list[str]) -> None:
    text = header + "\n" + "".join(row + "\n" for row in rows)
    if target is None:
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="ascii", newline="\n") as handle:
            handle.write(text)


def _cell(value) -> str:
    return "" if value is None else repr(float(value))


def cmd_simulate(config: RunConfig) -> int:
    scenario = build_scenario(config)
    trajectory = simulate_euler(scenario)
    functional = default_functional(scenario.g)
    out = config.values.get("out")
    if out is None:
        write_trajectory_csv(trajectory, sys.stdout, functional)
    else:
        write_trajectory_csv(trajectory, out, functional)
        note = " (truncated at the overflow cap)" if trajectory.truncated else ""
        print(f"wrote {len(trajectory.log_states)} rows to {out}{note}")
    return 0


def cmd_predict(config: RunConfig) -> int:
    scenario = build_scenario(config)
    prediction = predict(scenario)
    print(format_prediction(prediction, h=scenario.h))
    return 0


def cmd_verify(config: RunConfig) -> int:
    scenario = build_scenario(config)
    result = verify_scenario(scenario, tolerance=config.get_float("tol", 0.05))
    print(format_verification(result))
    out = config.values.get("out")
    if out is not None:
        # deterministic rerun; verify holds no trajectory of its own
        write_trajectory_csv(simulate_euler(scenario), out,
                             result.prediction.functional)
        print(f"wrote trajectory to {out}")
    return 0 if result.passed else 1


def cmd_sweep(config: RunConfig) -> int:
    f = parse_coefficient(config.values.get("f", "zero"))
    g = parse_coefficient(config.require("g"))
    history = parse_history(config.require("psi"))
    raw = config.require("N")
    try:
        grids = [int(part) for part in raw.split(",")]
    except ValueError:
        raise ConfigError(f"key 'N': expected a comma-separated list, got {raw!r}") from None
    tol = config.get_float("tol", 0.0)
    result = sweep_h(f, g, config.get_float("tau"), history,
                     config.get_float("horizon"), grids,
                     tolerance=tol if tol > 0 else None)
    rows = [f"{p.steps_per_delay},{repr(p.h)},{_cell(p.predicted)},"
            f"{_cell(p.estimated)},{p.status.value}"
            for p in result.points]
    # the h -> 0 limit goes in a final row with the grid sentinel 0
    rows.append(f"0,0.0,{_cell(result.continuous_rate)},"
                f"{_cell(result.extrapolated)},extrapolated")
    out = config.values.get("out")
    _write_rows(out, "N,h,predicted,estimated,status", rows)
    if out is not None:
        print(f"regime: {result.regime.kind.value}")
        print(f"extrapolated rate at h=0: {result.extrapolated!r} "
              f"(predicted {result.continuous_rate!r})")
    return 0


def cmd_chareq(config: RunConfig) -> int:
    rate = solve_char_eq(config.get_float("C"), config.get_float("tau"))
    print(f"{rate:.12f}")
    return 0


def cmd_envelope(config: RunConfig) -> int:
    scenario = build_scenario(config)
    eps = config.get_float("eps", 0.5)
    check = envelope_check(scenario, eps)
    params = check.params
    print(f"eps: {eps!r}")
    print(f"rate: {params.rate!r}")
    print(f"offset: {params.offset!r}")
    print(f"floor (log): {params.floor_log!r}")
    print(f"steps checked: {check.checked}"
          + (" (trajectory truncated at the overflow cap)" if check.truncated else ""))
    print(f"violations: {len(check.violations)}")
    print(f"holds: {'yes' if check.holds else 'no'}")
    out = config.values.get("out")
    if out is not None:
        trajectory = simulate_euler(scenario)
        rows = [f"{n},{repr(trajectory.time(n))},{repr(state)},{repr(env)}"
                for n, state, env in envelope_margins(trajectory, params)]
        _write_rows(out, "n,t,log_x,envelope", rows)
        print(f"wrote margins to {out}")
    return 0 if check.holds else 1


DISPATCH = {
    "simulate": cmd_simulate,
    "predict": cmd_predict,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "chareq": cmd_chareq,
    "envelope": cmd_envelope,
}


def main(argv: list[str] | None = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        config = load_config(args)
        return DISPATCH[config.command](config)
    except (ConfigError, DomainError, PredictionRefused) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (NumericError, HorizonExceeded) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
