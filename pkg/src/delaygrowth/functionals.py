"""Growth functionals: the integrals whose values advance like clock time.

Two families are used.  The ode-time functional of a shape phi,

    F(x) = integral from lower to x of du / phi(u),

is the time an undelayed comparison flow needs to climb from the lower
reference to x.  The gain-time functional of a delayed term g,

    F(x) = integral from 1 to x of du / (u * log1p(g(u)/u)),

counts delay windows instead: one unit of F is one mean doubling of the
recursion driven by g.  Verification reduces trajectories to sequences
F(x_n)/(n h) and compares them against predicted limits, so everything
here must stay finite and accurate while x itself is only represented by
its logarithm.

All evaluation happens in the substituted variable w = log u.  Shapes with
known antiderivatives (most of the catalog) are integrated in closed form;
the rest go through an adaptive Gauss-Legendre scheme on the transformed
integrand, which is smooth and bounded away from the blow-up scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammainc

from .coefficients import (
    CoefficientSpec, Constant, Linear, LinTimesExpLogPow, ExpLogPow, Power,
    PowerLog, Zero, reciprocal_integral_diverges,
)
from .errors import DomainError, HorizonExceeded, NumericError

__all__ = [
    "FunctionalKind", "GrowthFunctional", "NestedLogProduct",
    "ode_time", "sublinear_time", "gain_time", "rescaled", "default_ode_lower",
    "evaluate", "evaluate_many", "invert", "diverges", "has_closed_form",
    "QUAD_ABS_TOL", "QUAD_REL_TOL", "QUAD_MAX_DEPTH",
]


def _exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _pow(base: float, exponent: float) -> float:
    try:
        return base ** exponent
    except OverflowError:
        return math.inf
    except ZeroDivisionError:
        return math.inf


def _softplus(u: float) -> float:
    """log(1 + e^u) without overflow; exact u for large u."""
    if u > 0:
        return u + math.log1p(math.exp(-u))
    return math.log1p(math.exp(u))


@dataclass(frozen=True)
class NestedLogProduct(CoefficientSpec):
    """phi(x) = (1+x) * log(1+x) * ... * log_{depth-1}(1+x).

    The product of (1+x) with the first depth-1 iterated logarithms.  Its
    reciprocal integrates to the depth-fold iterated log, which grows
    without bound but slower than any catalog shape, making this the
    comparison scale for the fastest supported regimes.  Defined where the
    innermost factor is positive: x > exp_{depth-1}(0) - 1.
    """

    depth: int = 3

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 1:
            raise DomainError(f"nested log depth must be a positive integer, got {self.depth!r}")

    def _chain(self, u: float) -> list[float]:
        # iterated logs of (1+x) starting from log(1+x), with x = e^u
        out = [_softplus(u)]
        for _ in range(self.depth - 1):
            prev = out[-1]
            out.append(math.log(prev) if prev > 0 else -math.inf)
        return out

    def supports(self, u: float) -> bool:
        if self.depth == 1:
            return True
        return self._chain(u)[self.depth - 2] > 0

    def log_term(self, u: float) -> float:
        chain = self._chain(u)
        if self.depth > 1 and chain[self.depth - 2] <= 0:
            return -math.inf
        return sum(chain)

    def antiderivative_log_arg(self, u: float) -> float:
        """log_depth(1 + e^u): the antiderivative of 1/phi at log-argument u."""
        return self._chain(u)[-1]

    def value(self, x: float) -> float:
        if x <= self.domain_threshold:
            raise DomainError(f"{self} is undefined at x = {x!r}")
        acc = 1.0 + x
        factor = math.log(1.0 + x)
        for _ in range(self.depth - 1):
            acc *= factor
            factor = math.log(factor)
        return acc

    @property
    def domain_threshold(self) -> float:
        t = 0.0
        for _ in range(self.depth - 1):
            t = _exp(t)
        return max(t - 1.0, 0.0)

    @property
    def monotone_from(self) -> float:
        return self.domain_threshold

    def __str__(self) -> str:
        return f"nestedlog({self.depth})"


class FunctionalKind(Enum):
    ODE_TIME = "ode-time"
    GAIN_TIME = "gain-time"


@dataclass(frozen=True)
class GrowthFunctional:
    """A growth functional F together with its lower reference and scale.

    Reported values are F(x) / scale; the scale carries regime constants
    so that the scaled functional tends to t itself.
    """

    kind: FunctionalKind
    coeff: CoefficientSpec
    lower: float
    scale: float = 1.0

    def __post_init__(self):
        if isinstance(self.coeff, Zero):
            raise DomainError("a growth functional needs a nonvanishing shape")
        if not (math.isfinite(self.lower) and self.lower > 0):
            raise DomainError(f"lower reference must be positive and finite, got {self.lower!r}")
        if self.kind is FunctionalKind.GAIN_TIME and self.lower < 1.0:
            raise DomainError("gain-time functionals start at 1 or above")
        if not self.coeff.supports(math.log(self.lower)):
            raise DomainError(
                f"lower reference {self.lower!r} lies outside the domain of {self.coeff}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"scale must be positive and finite, got {self.scale!r}")

    @property
    def log_lower(self) -> float:
        return math.log(self.lower)

    def describe(self) -> str:
        text = f"{self.kind.value}[{self.coeff}, lower={self.lower:g}"
        if self.scale != 1.0:
            text += f", scale={self.scale:g}"
        return text + "]"

    def __str__(self) -> str:
        return self.describe()


def ode_time(phi: CoefficientSpec, lower: float, scale: float = 1.0) -> GrowthFunctional:
    return GrowthFunctional(FunctionalKind.ODE_TIME, phi, lower, scale)


def sublinear_time(g: CoefficientSpec) -> GrowthFunctional:
    """The ode-time functional of a sublinear delayed term, from 1."""
    return GrowthFunctional(FunctionalKind.ODE_TIME, g, 1.0)


def gain_time(g: CoefficientSpec) -> GrowthFunctional:
    return GrowthFunctional(FunctionalKind.GAIN_TIME, g, 1.0)


def rescaled(functional: GrowthFunctional, scale: float) -> GrowthFunctional:
    return replace(functional, scale=scale)


def default_ode_lower(phi: CoefficientSpec, history_floor: float) -> float:
    """A lower reference safely inside phi's domain and under the history."""
    return max(history_floor, phi.domain_threshold, math.e)


# ---------------------------------------------------------------------------
# closed forms
#
# Everything is expressed in u = log x.  A dispatcher returns the unscaled
# integral over [log lower, u], or None when only quadrature will do.

_SQRT_PI_HALF = 0.5 * math.sqrt(math.pi)


def _closed_power(c: float, beta: float, la: float, u: float) -> float:
    if beta == 1.0:
        return (u - la) / c
    k = 1.0 - beta
    return (_exp(k * u) - _exp(k * la)) / (c * k)


def _closed_ode(coeff: CoefficientSpec, la: float, u: float) -> float | None:
    if isinstance(coeff, NestedLogProduct):
        return coeff.antiderivative_log_arg(u) - coeff.antiderivative_log_arg(la)
    if isinstance(coeff, Constant):
        return (_exp(u) - _exp(la)) / coeff.level
    if isinstance(coeff, Linear):
        return (u - la) / coeff.slope
    if isinstance(coeff, Power):
        return _closed_power(coeff.coefficient, coeff.exponent, la, u)
    if isinstance(coeff, PowerLog):
        if coeff.log_power == 0.0:
            return _closed_power(coeff.coefficient, coeff.power, la, u)
        if coeff.power == 1.0:
            # integrand (in w) is w^{-gamma}/c; lower > 1 keeps la positive
            g = coeff.log_power
            if g == 1.0:
                return (math.log(u) - math.log(la)) / coeff.coefficient
            k = 1.0 - g
            return (_pow(u, k) - _pow(la, k)) / (coeff.coefficient * k)
        return None
    if isinstance(coeff, LinTimesExpLogPow):
        # integrand e^{-w^alpha}/c; substitute s = w^alpha
        a = 1.0 / coeff.exponent
        lo = float(gammainc(a, _pow(la, coeff.exponent)))
        hi = float(gammainc(a, _pow(u, coeff.exponent)))
        return math.gamma(a) * a * (hi - lo) / coeff.coefficient
    if isinstance(coeff, ExpLogPow):
        if coeff.exponent == 2.0:
            # integrand e^{w - w^2}/c; complete the square
            front = math.exp(0.25) * _SQRT_PI_HALF / coeff.coefficient
            return front * (math.erf(u - 0.5) - math.erf(la - 0.5))
        return None
    return None


def _closed_gain(coeff: CoefficientSpec, la: float, u: float) -> float | None:
    if isinstance(coeff, Linear):
        return (u - la) / math.log1p(coeff.slope)
    if isinstance(coeff, Power) and coeff.exponent == 1.0:
        return (u - la) / math.log1p(coeff.coefficient)
    return None


def has_closed_form(functional: GrowthFunctional) -> bool:
    c = functional.coeff
    if functional.kind is FunctionalKind.ODE_TIME:
        if isinstance(c, (NestedLogProduct, Constant, Linear, Power, LinTimesExpLogPow)):
            return True
        if isinstance(c, PowerLog):
            return c.log_power == 0.0 or c.power == 1.0
        if isinstance(c, ExpLogPow):
            return c.exponent == 2.0
        return False
    return isinstance(c, Linear) or (isinstance(c, Power) and c.exponent == 1.0)


# ---------------------------------------------------------------------------
# quadrature on the transformed integrand

QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-9
QUAD_MAX_DEPTH = 60

_GL7_NODES, _GL7_WEIGHTS = np.polynomial.legendre.leggauss(7)
_GL15_NODES, _GL15_WEIGHTS = np.polynomial.legendre.leggauss(15)


def _integrand(functional: GrowthFunctional) -> Callable[[float], float]:
    coeff = functional.coeff
    if functional.kind is FunctionalKind.ODE_TIME:
        def fn(w: float) -> float:
            return _exp(w - coeff.value_log(w))
        return fn

    def fn(w: float) -> float:
        d = coeff.value_log(w) - w  # log of g(u)/u
        den = _softplus(d) if d > -math.inf else 0.0
        if den <= 0.0:
            return math.inf
        return 1.0 / den
    return fn


def _panel(fn: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (lo + hi)
    f15 = [fn(mid + half * t) for t in _GL15_NODES]
    s15 = half * float(np.dot(_GL15_WEIGHTS, f15))
    f7 = [fn(mid + half * t) for t in _GL7_NODES]
    s7 = half * float(np.dot(_GL7_WEIGHTS, f7))
    return s15, abs(s15 - s7)


def _adaptive(fn: Callable[[float], float], lo: float, hi: float) -> float:
    total_width = hi - lo
    if total_width == 0.0:
        return 0.0
    acc = 0.0
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        est, err = _panel(fn, a, b)
        budget = QUAD_REL_TOL * abs(est) + QUAD_ABS_TOL * ((b - a) / total_width)
        if err <= budget:
            acc += est
        elif depth >= QUAD_MAX_DEPTH:
            raise NumericError(
                f"quadrature failed to converge on [{a:g}, {b:g}] "
                f"(estimate {est:g}, error {err:g})")
        else:
            m = 0.5 * (a + b)
            stack.append((a, m, depth + 1))
            stack.append((m, b, depth + 1))
    return acc


# ---------------------------------------------------------------------------
# public evaluation API; arguments are log x throughout

def evaluate(functional: GrowthFunctional, log_x: float) -> float:
    """F(x)/scale at log x; log x must not fall below the lower reference."""
    if math.isnan(log_x) or math.isinf(log_x):
        raise DomainError(f"functional argument must be finite, got {log_x!r}")
    la = functional.log_lower
    if log_x < la:
        raise DomainError(
            f"argument log x = {log_x!r} lies below the lower reference (log {la:g})")
    if log_x == la:
        return 0.0
    closed = (_closed_ode if functional.kind is FunctionalKind.ODE_TIME
              else _closed_gain)(functional.coeff, la, log_x)
    if closed is None:
        closed = _adaptive(_integrand(functional), la, log_x)
    return closed / functional.scale


def evaluate_many(functional: GrowthFunctional, log_xs: Sequence[float]) -> list[float]:
    """Evaluate at many points.

    Sorted quadrature arguments are handled incrementally, one panel run
    per gap, so a whole trajectory costs what its largest argument costs.
    """
    points = [float(v) for v in log_xs]
    if not points:
        return []
    ascending = all(b >= a for a, b in zip(points, points[1:]))
    if has_closed_form(functional) or not ascending:
        return [evaluate(functional, v) for v in points]
    fn = _integrand(functional)
    out = [evaluate(functional, points[0])]
    for prev, cur in zip(points, points[1:]):
        if cur == prev:
            out.append(out[-1])
        else:
            out.append(out[-1] + _adaptive(fn, prev, cur) / functional.scale)
    return out


INVERT_MAX_ITERS = 500
INVERT_LOG_RANGE = 1e300


def invert(functional: GrowthFunctional, y: float) -> float:
    """log x such that F(x)/scale = y, for diverging functionals.

    Bisection after bracket doubling; the residual tolerance is
    1e-9 * (1 + |y|).  A bracket past log x = 1e300 means the inverse is
    not representable and raises HorizonExceeded.
    """
    if math.isnan(y) or y < 0.0:
        raise DomainError(f"cannot invert at {y!r}: values are nonnegative")
    if math.isinf(y):
        raise HorizonExceeded(
            f"inverse of {functional.describe()} at infinity is not representable")
    if not diverges(functional):
        raise DomainError(
            f"{functional.describe()} is bounded; its inverse is not defined for all values")
    la = functional.log_lower
    if y == 0.0:
        return la
    tol = 1e-9 * (1.0 + abs(y))
    step = 1.0
    hi = la + step
    while evaluate(functional, hi) < y:
        step *= 2.0
        hi = la + step
        if hi > INVERT_LOG_RANGE:
            raise HorizonExceeded(
                f"inverse of {functional.describe()} at {y!r} exceeds log range {INVERT_LOG_RANGE:g}")
    lo = la
    for _ in range(INVERT_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        val = evaluate(functional, mid)
        if abs(val - y) <= tol:
            return mid
        if val < y:
            lo = mid
        else:
            hi = mid
    raise NumericError(f"inversion of {functional.describe()} at {y!r} did not converge")


def diverges(functional: GrowthFunctional) -> bool:
    """Whether F(x) grows without bound as x does."""
    coeff = functional.coeff
    if functional.kind is FunctionalKind.ODE_TIME:
        if isinstance(coeff, NestedLogProduct):
            return True
        try:
            return reciprocal_integral_diverges(coeff)
        except DomainError:
            pass
    else:
        if isinstance(coeff, (Constant, Linear, Power, PowerLog)):
            return True
        if isinstance(coeff, (LinTimesExpLogPow, ExpLogPow)):
            return coeff.exponent <= 1.0
    # unknown shape: compare the functional at two distant rungs
    base = max(functional.log_lower + 1.0, 1e3)
    near = evaluate(functional, base)
    far = evaluate(functional, 1e6)
    return far > 10.0 * near
