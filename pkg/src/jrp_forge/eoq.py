"""Single-commodity lot-sizing: standalone cost curve and its optimum.

g(t) = K/t + lambda*h*t/2, minimized at t* = sqrt(2K/(h*lambda)). The square
root is returned exactly whenever 2K/(h*lambda) is a perfect rational square;
otherwise a rational approximation within relative 1e-12, flagged inexact.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import isqrt

from .model import Commodity, InputError

_GUARD_BITS = 42


def sqrt_fraction(q: Fraction) -> tuple[Fraction, bool]:
    """Square root of a non-negative rational.

    Returns (root, exact). When q is not a perfect square the root is a
    rational approximation with relative error below 2**-40 at any
    magnitude: the scaling shift adapts to q so the floor root always
    carries at least _GUARD_BITS significant bits.
    """
    if q < 0:
        raise InputError(f"square root of negative rational {q}")
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd), True
    shift = _GUARD_BITS + max(0, (d.bit_length() - n.bit_length()) // 2 + 2)
    scaled = isqrt((n << (2 * shift)) // d)
    return Fraction(scaled, 1 << shift), False


@dataclass(frozen=True)
class EoqResult:
    cycle: Fraction
    cost: Fraction
    exact: bool


def standalone_cost(c: Commodity, t: Fraction) -> Fraction:
    """Average periodic cost g(t) = K/t + lambda*h*t/2 at cycle time t."""
    if t <= 0:
        raise InputError(f"cycle time must be > 0, got {t}")
    return c.setup / t + c.demand * c.holding * t / 2


def optimal_cycle(c: Commodity) -> EoqResult:
    """Unconstrained minimizer of g; exact when 2K/(h*lambda) is a square."""
    t2 = 2 * c.setup / (c.holding * c.demand)
    root, exact = sqrt_fraction(t2)
    return EoqResult(cycle=root, cost=standalone_cost(c, root), exact=exact)


def theta_pair(c: Commodity, k0: Fraction) -> tuple[EoqResult, EoqResult]:
    """Optima of the two bracketing problems: setup K and setup K + K0.

    The second optimum is always strictly larger; for commodities built by
    the instance generator the pair is exactly (t*, (1+delta)*t*).
    """
    if k0 <= 0:
        raise InputError(f"joint setup must be > 0, got {k0}")
    lo = optimal_cycle(c)
    hi = optimal_cycle(replace(c, setup=c.setup + k0))
    return lo, hi
