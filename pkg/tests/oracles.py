"""Independent oracles the tests compare the package against.

Everything here is deliberately implemented differently from the package:
set-based epoch counting instead of inclusion-exclusion, float golden-section
search instead of the closed form, reversed-order clause evaluation, and
sympy's primality test. None of it imports package internals beyond types.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, sqrt
from typing import Callable, Sequence

_INVPHI = (sqrt(5) - 1) / 2


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-12) -> float:
    """Minimizer of a unimodal f on [lo, hi] to absolute tolerance tol."""
    a, b = lo, hi
    c = b - (b - a) * _INVPHI
    d = a + (b - a) * _INVPHI
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INVPHI
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INVPHI
            fd = f(d)
    return (a + b) / 2


def golden_section_exact(f: Callable[[Fraction], Fraction], lo: Fraction,
                         hi: Fraction, iters: int = 80,
                         grid_bits: int = 64) -> Fraction:
    """Minimizer of a unimodal f on [lo, hi] with exact comparisons.

    Probes live on a dyadic grid of 2**-grid_bits so the interval state is a
    pair of integers; the probe ratio is a 32-bit approximation of 1/phi and
    both probes are recomputed each round, so only the contraction rate
    depends on the approximation. f is evaluated at exact rationals and the
    comparisons are exact.
    """
    scale = 1 << grid_bits
    rho = 2654435769                     # ~0.618034 * 2**32
    a = (lo.numerator * scale) // lo.denominator            # floor
    b = -((-hi.numerator * scale) // hi.denominator)        # ceil
    for _ in range(iters):
        span = b - a
        c = a + (span * (4294967296 - rho) >> 32)
        d = a + (span * rho >> 32)
        if not a < c < d < b:
            break
        if f(Fraction(c, scale)) < f(Fraction(d, scale)):
            b = d
        else:
            a = c
    return Fraction(a + b, 2 * scale)


def _scale(periods: Sequence[Fraction]) -> tuple[list[int], int]:
    denom_lcm = 1
    for q in periods:
        denom_lcm = denom_lcm * q.denominator // gcd(denom_lcm, q.denominator)
    return [int(q * denom_lcm) for q in periods], denom_lcm


def _epoch_set(int_periods: Sequence[int], hyper: int) -> set[int]:
    epochs: set[int] = set()
    for p in int_periods:
        epochs.update(range(p, hyper + 1, p))
    return epochs


def enum_union_rate(periods: Sequence[Fraction],
                    max_points: int = 5_000_000) -> Fraction:
    """Order epochs per unit time for the union of in-phase series."""
    ints, scale = _scale([Fraction(q) for q in periods])
    hyper = 1
    for p in ints:
        hyper = hyper * p // gcd(hyper, p)
    if sum(hyper // p for p in ints) > max_points:
        raise ValueError("enumeration oracle over budget")
    return Fraction(len(_epoch_set(ints, hyper)) * scale, hyper)


def enum_intersection_rate(families: Sequence[Sequence[Fraction]],
                           max_points: int = 5_000_000) -> Fraction:
    """Epochs per unit time where every family has some series ordering."""
    flat = [Fraction(q) for fam in families for q in fam]
    ints, scale = _scale(flat)
    hyper = 1
    for p in ints:
        hyper = hyper * p // gcd(hyper, p)
    if sum(hyper // p for p in ints) > max_points:
        raise ValueError("enumeration oracle over budget")
    shared: set[int] | None = None
    pos = 0
    for fam in families:
        fam_ints = ints[pos:pos + len(fam)]
        pos += len(fam)
        epochs = _epoch_set(fam_ints, hyper)
        shared = epochs if shared is None else shared & epochs
    assert shared is not None
    return Fraction(len(shared) * scale, hyper)


def sat_eval_reversed(clauses: Sequence[Sequence[int]],
                      assignment: Sequence[bool]) -> bool:
    """Clause evaluation walking clauses and literals back to front."""
    for clause in reversed(list(clauses)):
        clause_true = False
        for lit in sorted(clause, reverse=True):
            value = assignment[abs(lit) - 1]
            if (lit > 0 and value) or (lit < 0 and not value):
                clause_true = True
                break
        if not clause_true:
            return False
    return True
