"""Explicit Euler stepping for the delayed growth recursion.

The grid has spacing h = tau / N, so the delay is exactly N steps and the
update is

    x[n+1] = x[n] + h * f(x[n]) + h * g(x[n - N])

with x on the history segment [-tau, 0] given by a history function.  All
states are carried in the log domain; a run that outgrows the log cap is
returned truncated rather than failing, since reaching the cap quickly is
exactly what the fast regimes do.

``simulate_direct`` repeats the computation in plain float arithmetic as
an independent cross-check for ranges where that is possible, and
``simulate_undelayed`` iterates the pure recursion y[k+1] = y[k] + g(y[k])
that the delayed dynamics shadow in the superlinear regimes.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from typing import IO

from .coefficients import CoefficientSpec, Zero, classify_regime, RegimeKind
from .errors import DomainError, HorizonExceeded, NumericError
from .functionals import GrowthFunctional, evaluate_many
from .logdomain import LogReal, log_add, log_scale

__all__ = [
    "History", "ConstantHistory", "RampHistory", "parse_history",
    "Scenario", "Trajectory", "SimulationError",
    "simulate_euler", "simulate_direct", "interpolate",
    "UndelayedRun", "simulate_undelayed", "write_trajectory_csv",
]


class SimulationError(NumericError):
    """A step produced a state that is not a number."""


def _positive(v: float, what: str) -> None:
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise DomainError(f"{what} must be positive and finite, got {v!r}")


class History:
    """Initial segment, parameterized by the fraction of the delay elapsed.

    ``at(0.0)`` is the oldest point (t = -tau), ``at(1.0)`` the initial
    value at t = 0.
    """

    def at(self, fraction: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantHistory(History):
    level: float

    def __post_init__(self):
        _positive(self.level, "history level")

    def at(self, fraction: float) -> float:
        return self.level

    def __str__(self) -> str:
        return f"const({self.level!r})"


@dataclass(frozen=True)
class RampHistory(History):
    """Linear segment from ``start`` at t = -tau to ``end`` at t = 0."""

    start: float
    end: float

    def __post_init__(self):
        _positive(self.start, "history start")
        _positive(self.end, "history end")

    def at(self, fraction: float) -> float:
        return self.start * (1.0 - fraction) + self.end * fraction

    def __str__(self) -> str:
        return f"ramp({self.start!r},{self.end!r})"


_HISTORY_RE = re.compile(r"^([a-z]+)\s*\(\s*(.*?)\s*\)$")


def parse_history(text: str) -> History:
    """``const(v)``, ``ramp(a,b)``, or a bare positive number."""
    stripped = text.strip().lower()
    try:
        return ConstantHistory(float(stripped))
    except ValueError:
        pass
    m = _HISTORY_RE.match(stripped)
    if m is None:
        raise DomainError(f"cannot parse history {text!r}")
    name, argstr = m.group(1), m.group(2)
    try:
        args = [float(tok.strip()) for tok in argstr.split(",")] if argstr else []
    except ValueError as exc:
        raise DomainError(f"bad numeric parameter in history {text!r}") from exc
    if name == "const" and len(args) == 1:
        return ConstantHistory(args[0])
    if name == "ramp" and len(args) == 2:
        return RampHistory(args[0], args[1])
    raise DomainError(f"cannot parse history {text!r}")


@dataclass(frozen=True)
class Scenario:
    """One fully specified run of the delayed recursion."""

    f: CoefficientSpec
    g: CoefficientSpec
    tau: float
    steps_per_delay: int
    history: History
    horizon: float

    def __post_init__(self):
        _positive(self.tau, "delay tau")
        _positive(self.horizon, "horizon")
        if not isinstance(self.steps_per_delay, int) or isinstance(self.steps_per_delay, bool) \
                or self.steps_per_delay < 1:
            raise DomainError(
                f"steps per delay must be a positive integer, got {self.steps_per_delay!r}")
        if isinstance(self.g, Zero):
            raise DomainError(
                "the delayed term must be strictly positive; zero() is not")
        for v in self.history_samples():
            _positive(v, "history value")
            if not self.g.supports(math.log(v)):
                raise DomainError(
                    f"history value {v!r} lies outside the domain of the delayed term {self.g}")
        start_log = math.log(self.history_samples()[-1])
        if not self.f.supports(start_log):
            raise DomainError(
                f"initial value {self.history_samples()[-1]!r} lies outside the domain "
                f"of the instantaneous term {self.f}")

    @property
    def h(self) -> float:
        return self.tau / self.steps_per_delay

    def history_samples(self) -> list[float]:
        """History on the grid, oldest first: indices -N .. 0."""
        n = self.steps_per_delay
        return [self.history.at(k / n) for k in range(n + 1)]

    def history_min(self) -> float:
        return min(self.history_samples())

    def planned_steps(self) -> int:
        # nudge past representation error when the horizon is an exact multiple
        return int(math.floor(self.horizon / self.h + 1e-9))

    def describe(self) -> str:
        return (f"x' = {self.f} + delayed {self.g}, tau={self.tau:g}, "
                f"h={self.h:g} ({self.steps_per_delay}/delay), "
                f"history {self.history}, horizon {self.horizon:g}")


@dataclass(frozen=True)
class Trajectory:
    """Grid log-states from index -N (oldest history point) onwards."""

    scenario: Scenario
    log_states: tuple[float, ...]
    truncated: bool

    @property
    def h(self) -> float:
        return self.scenario.h

    @property
    def n_start(self) -> int:
        return -self.scenario.steps_per_delay

    @property
    def n_end(self) -> int:
        return self.n_start + len(self.log_states) - 1

    @property
    def forward_steps(self) -> int:
        """Completed steps past t = 0."""
        return self.n_end

    def state(self, n: int) -> float:
        """log x at grid index n."""
        if not self.n_start <= n <= self.n_end:
            raise DomainError(f"grid index {n} outside [{self.n_start}, {self.n_end}]")
        return self.log_states[n - self.n_start]

    def time(self, n: int) -> float:
        return n * self.h

    def indices(self) -> range:
        return range(self.n_start, self.n_end + 1)

    def fingerprint(self) -> str:
        payload = ",".join(repr(v) for v in self.log_states)
        payload += f";truncated={self.truncated}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def simulate_euler(scenario: Scenario) -> Trajectory:
    """Run the recursion in the log domain up to the horizon or the cap."""
    n_delay = scenario.steps_per_delay
    h = scenario.h
    states: list[LogReal] = [LogReal(math.log(v)) for v in scenario.history_samples()]
    truncated = False
    for _ in range(scenario.planned_steps()):
        current = states[-1]
        delayed = states[-1 - n_delay]
        try:
            step = log_add(current, log_scale(scenario.f.eval_log(current), h))
            step = log_add(step, log_scale(scenario.g.eval_log(delayed), h))
        except HorizonExceeded:
            truncated = True
            break
        if math.isnan(step.log_value):
            raise SimulationError(f"state became undefined after {len(states)} samples")
        states.append(step)
    return Trajectory(scenario=scenario,
                      log_states=tuple(s.log_value for s in states),
                      truncated=truncated)


def simulate_direct(scenario: Scenario, cap: float = 1e15) -> Trajectory:
    """The same recursion in plain float arithmetic, stopping at ``cap``.

    An independent route for cross-checking the log-domain stepping on
    ranges where doubles suffice.
    """
    _positive(cap, "cap")
    n_delay = scenario.steps_per_delay
    h = scenario.h
    xs: list[float] = list(scenario.history_samples())
    truncated = False
    for _ in range(scenario.planned_steps()):
        x = xs[-1] + h * scenario.f.value(xs[-1]) + h * scenario.g.value(xs[-1 - n_delay])
        if math.isnan(x):
            raise SimulationError(f"state became undefined after {len(xs)} samples")
        if x > cap:
            truncated = True
            break
        xs.append(x)
    return Trajectory(scenario=scenario,
                      log_states=tuple(math.log(v) for v in xs),
                      truncated=truncated)


def interpolate(trajectory: Trajectory, t: float) -> float:
    """log x at an off-grid time, linear in the log between neighbors."""
    h = trajectory.h
    position = t / h
    lo = math.floor(position)
    if lo < trajectory.n_start or lo > trajectory.n_end:
        raise DomainError(f"time {t!r} outside the simulated range")
    if lo == trajectory.n_end:
        if position > trajectory.n_end:
            raise DomainError(f"time {t!r} outside the simulated range")
        return trajectory.state(trajectory.n_end)
    frac = position - lo
    a, b = trajectory.state(lo), trajectory.state(lo + 1)
    return a * (1.0 - frac) + b * frac


_UNDELAYED_KINDS = (RegimeKind.RV1_SUPERLINEAR, RegimeKind.POLY_SUPERLINEAR,
                    RegimeKind.FASTER_THAN_POLY)


@dataclass(frozen=True)
class UndelayedRun:
    """States of the pure recursion y[k+1] = y[k] + g(y[k])."""

    log_states: tuple[float, ...]
    truncated: bool

    def fingerprint(self) -> str:
        payload = ",".join(repr(v) for v in self.log_states)
        payload += f";truncated={self.truncated}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def simulate_undelayed(g: CoefficientSpec, start: float, n_steps: int) -> UndelayedRun:
    """Iterate y <- y + g(y) from ``start`` for up to ``n_steps`` steps.

    Only meaningful for superlinear delayed terms, where each step at
    least multiplies the state by a growing factor; other regimes are
    refused because the delayed dynamics do not reduce to this recursion.
    """
    if classify_regime(g).kind not in _UNDELAYED_KINDS:
        raise DomainError(
            f"the undelayed recursion needs a superlinear delayed term, not {g}")
    _positive(start, "start value")
    if not isinstance(n_steps, int) or n_steps < 0:
        raise DomainError(f"step count must be a nonnegative integer, got {n_steps!r}")
    if not g.supports(math.log(start)):
        raise DomainError(f"start value {start!r} lies outside the domain of {g}")
    y = LogReal(math.log(start))
    states = [y]
    truncated = False
    for _ in range(n_steps):
        try:
            y = log_add(y, g.eval_log(y))
        except HorizonExceeded:
            truncated = True
            break
        states.append(y)
    return UndelayedRun(log_states=tuple(s.log_value for s in states),
                        truncated=truncated)


def write_trajectory_csv(trajectory: Trajectory, target,
                         functional: GrowthFunctional | None = None) -> None:
    """Write grid samples as CSV: ``n,t,log_x,functional,ratio``.

    The functional and ratio columns are filled for indices n > 0 whose
    state has reached the functional's lower reference, and left empty
    otherwise.  Floats are written with repr, so files round-trip exactly
    and identical runs produce identical bytes.
    """
    values: dict[int, float] = {}
    if functional is not None:
        eligible = [n for n in trajectory.indices()
                    if n > 0 and trajectory.state(n) >= functional.log_lower]
        results = evaluate_many(functional, [trajectory.state(n) for n in eligible])
        values = dict(zip(eligible, results))

    def render(fh: IO[str]) -> None:
        fh.write("n,t,log_x,functional,ratio\n")
        for n in trajectory.indices():
            t = trajectory.time(n)
            parts = [str(n), repr(t), repr(trajectory.state(n))]
            if n in values:
                parts.append(repr(values[n]))
                parts.append(repr(values[n] / t))
            else:
                parts.extend(["", ""])
            fh.write(",".join(parts) + "\n")

    if hasattr(target, "write"):
        render(target)
    else:
        with open(target, "w", encoding="ascii", newline="\n") as fh:
            render(fh)
