"""Exact synchronization calculus over in-phase periodic order series.

An order series with period t places orders at t, 2t, 3t, ... (phase 0 for
every series; in-phase is a modeling assumption, not an option). The union
joint-replenishment rate UJR is the density of epochs where at least one
series orders; the intersection rate IJR is the density of epochs where
every given family has some series ordering. Both are exact rationals.

Inclusion-exclusion runs over at most `cap` distinct series (default 20);
larger inputs raise CapExceeded and should go through ujr_enumerate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from . import _kernels
from .model import InputError, JrpError

DEFAULT_IE_CAP = 20
DEFAULT_ENUM_CAP = 10_000_000


class CapExceeded(JrpError):
    """Input exceeds a configured resource cap; no silent approximation."""


@dataclass(frozen=True)
class SeriesFamily:
    """A union of order series, e.g. one commodity group's epochs."""
    periods: tuple[Fraction, ...]
    label: str = ""

    def __post_init__(self):
        if not self.periods:
            raise InputError("series family must be non-empty")


def _as_periods(family) -> list[Fraction]:
    if isinstance(family, SeriesFamily):
        raw: Iterable = family.periods
    elif isinstance(family, (Fraction, int)):
        raw = [family]
    else:
        raw = family
    out = []
    for t in raw:
        t = Fraction(t)
        if t <= 0:
            raise InputError(f"series period must be > 0, got {t}")
        out.append(t)
    return out


def lcm_rational(a: Fraction, b: Fraction) -> Fraction:
    """Smallest positive rational that is an integer multiple of both."""
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise InputError("lcm_rational requires positive arguments")
    den = a.denominator * b.denominator
    return Fraction(lcm(a.numerator * b.denominator, b.numerator * a.denominator), den)


def hyperperiod(families) -> Fraction:
    """lcm of all periods across the given families (or flat periods)."""
    periods: list[Fraction] = []
    if isinstance(families, (SeriesFamily, Fraction, int)):
        periods = _as_periods(families)
    else:
        for fam in families:
            periods.extend(_as_periods(fam))
    if not periods:
        raise InputError("hyperperiod of empty input")
    out = periods[0]
    for t in periods[1:]:
        out = lcm_rational(out, t)
    return out


def _scale_to_integers(periods: Sequence[Fraction]) -> tuple[list[int], int]:
    """Map rational periods onto integers via the denominator lcm L.

    Returns (integer periods, L); a rational period q maps to q*L.
    """
    scale = 1
    for t in periods:
        scale = lcm(scale, t.denominator)
    return [t.numerator * (scale // t.denominator) for t in periods], scale


def _dedup_prune(int_periods: Sequence[int]) -> list[int]:
    # set semantics, then drop any series contained in another (p | q -> F_q subset F_p)
    uniq = sorted(set(int_periods))
    return [q for q in uniq if not any(q % p == 0 for p in uniq if p != q)]


def _int_union_fraction(int_periods: Sequence[int], scale: int) -> Fraction:
    if not int_periods:
        return Fraction(0)
    hyper = 1
    for p in int_periods:
        hyper = lcm(hyper, p)
    count = _kernels.union_count(int_periods, hyper)
    return Fraction(count * scale, hyper)


def ujr(families, cap: int | None = None) -> Fraction:
    """Union joint-replenishment rate |union of all series| / hyperperiod.

    Grouping is irrelevant for a union, so the input may be flat periods,
    one family, or a collection of families. Exact inclusion-exclusion.
    """
    cap = DEFAULT_IE_CAP if cap is None else cap
    periods: list[Fraction] = []
    if isinstance(families, (SeriesFamily, Fraction, int)):
        periods = _as_periods(families)
    else:
        for fam in families:
            periods.extend(_as_periods(fam))
    if not periods:
        raise InputError("ujr of empty input")
    ints, scale = _scale_to_integers(periods)
    distinct = sorted(set(ints))
    if len(distinct) > cap:
        raise CapExceeded(
            f"{len(distinct)} distinct series exceed the inclusion-exclusion cap "
            f"{cap}; use ujr_enumerate or raise the cap"
        )
    return _int_union_fraction(_dedup_prune(distinct), scale)


def ujr_enumerate(families, max_points: int | None = None) -> Fraction:
    """Oracle lane: build the explicit epoch set over one hyperperiod."""
    max_points = DEFAULT_ENUM_CAP if max_points is None else max_points
    periods: list[Fraction] = []
    if isinstance(families, (SeriesFamily, Fraction, int)):
        periods = _as_periods(families)
    else:
        for fam in families:
            periods.extend(_as_periods(fam))
    if not periods:
        raise InputError("ujr_enumerate of empty input")
    ints, scale = _scale_to_integers(periods)
    ints = sorted(set(ints))
    hyper = 1
    for p in ints:
        hyper = lcm(hyper, p)
    points = sum(hyper // p for p in ints)
    if points > max_points:
        raise CapExceeded(
            f"enumeration needs {points} points, over the cap {max_points}"
        )
    count = _kernels.epoch_count(ints, hyper)
    return Fraction(count * scale, hyper)


def ijr(families, cap: int | None = None) -> Fraction:
    """Intersection rate: density of epochs where every family orders.

    The intersection of unions expands to a union over one series per
    family, each with period lcm(choice); the expansion is deduplicated and
    absorbed before inclusion-exclusion. The cap applies to the series that
    remain after absorption.
    """
    cap = DEFAULT_IE_CAP if cap is None else cap
    fams = [_as_periods(f) for f in families]
    if not fams:
        raise InputError("ijr of empty input")
    all_periods = [t for fam in fams for t in fam]
    ints, scale = _scale_to_integers(all_periods)
    it = iter(ints)
    int_fams = [[next(it) for _ in fam] for fam in fams]

    cross = set(int_fams[0])
    for fam in int_fams[1:]:
        cross = {lcm(a, b) for a in cross for b in fam}
        # absorb multiples eagerly to keep the cross product small
        cross = set(_dedup_prune(sorted(cross)))
    pruned = _dedup_prune(sorted(cross))
    if len(pruned) > cap:
        raise CapExceeded(
            f"{len(pruned)} intersection series exceed the inclusion-exclusion "
            f"cap {cap}"
        )
    return _int_union_fraction(pruned, scale)


def ijr_enumerate(families, max_points: int | None = None) -> Fraction:
    """Enumeration cross-check for ijr: intersect per-family epoch sets."""
    max_points = DEFAULT_ENUM_CAP if max_points is None else max_points
    fams = [_as_periods(f) for f in families]
    if not fams:
        raise InputError("ijr_enumerate of empty input")
    all_periods = [t for fam in fams for t in fam]
    ints, scale = _scale_to_integers(all_periods)
    it = iter(ints)
    int_fams = [[next(it) for _ in fam] for fam in fams]
    hyper = 1
    for p in ints:
        hyper = lcm(hyper, p)
    points = sum(hyper // p for p in ints)
    if points > max_points:
        raise CapExceeded(
            f"enumeration needs {points} points, over the cap {max_points}"
        )
    epochs: set[int] | None = None
    for fam in int_fams:
        fam_epochs: set[int] = set()
        for p in fam:
            fam_epochs.update(range(p, hyper + 1, p))
        epochs = fam_epochs if epochs is None else (epochs & fam_epochs)
    assert epochs is not None
    return Fraction(len(epochs) * scale, hyper)


def ijr_cross_seed(beta_i: Fraction, beta_j: Fraction) -> tuple[Fraction, int, int]:
    """IJR of two unit-period series at seeds beta_i <= beta_j.

    Writing beta_j/beta_i = 1 + q/r irreducibly, the joint epochs recur every
    beta_i*(r+q), so the rate is 1/(beta_i*(r+q)). Equal seeds give (0, 1)
    and rate 1/beta_i.
    """
    beta_i, beta_j = Fraction(beta_i), Fraction(beta_j)
    if beta_i <= 0:
        raise InputError(f"seed must be > 0, got {beta_i}")
    if beta_i < 1 or beta_j < beta_i:
        raise InputError("requires 1 <= beta_i <= beta_j")
    ratio_minus_one = beta_j / beta_i - 1
    q, r = ratio_minus_one.numerator, ratio_minus_one.denominator
    if q == 0:
        return Fraction(1) / beta_i, 0, 1
    return Fraction(1) / (beta_i * (r + q)), q, r


@dataclass(frozen=True)
class IdentityCheck:
    identity: int
    description: str
    lhs: Fraction
    rhs: Fraction
    ok: bool


@dataclass(frozen=True)
class CardinalityReport:
    checks: tuple[IdentityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def violations(self) -> tuple[IdentityCheck, ...]:
        return tuple(c for c in self.checks if not c.ok)


def check_cardinality_identities(families, which: int | None = None,
                                 cap: int | None = None) -> CardinalityReport:
    """Evaluate the four union/intersection cardinality identities exactly.

    1. UJR(F1 u F2) = UJR(F1) + UJR(F2) - IJR(F1, F2)
    2. IJR(F1, F2, F3) <= IJR(F1, F2)
    3. IJR(F1, F2 u F3) = IJR(F1, F2) + IJR(F1, F3) - IJR(F1, F2, F3)
    4. adding series grows both UJR and IJR (monotonicity under inclusion)

    `which` selects one identity; None runs every identity the family count
    supports (1 and 4 need two families; 2 and 3 need three).
    """
    fams = [_as_periods(f) for f in families]
    wanted = [which] if which is not None else [1, 2, 3, 4]
    checks: list[IdentityCheck] = []

    def need(k: int):
        if len(fams) < k:
            raise InputError(f"identity needs at least {k} families, got {len(fams)}")

    for ident in wanted:
        if ident == 1:
            need(2)
            lhs = ujr(fams[0] + fams[1], cap=cap)
            rhs = ujr(fams[0], cap=cap) + ujr(fams[1], cap=cap) - ijr(fams[:2], cap=cap)
            checks.append(IdentityCheck(1, "UJR(F1 u F2) = UJR(F1)+UJR(F2)-IJR(F1,F2)",
                                        lhs, rhs, lhs == rhs))
        elif ident == 2:
            if which is None and len(fams) < 3:
                continue
            need(3)
            lhs = ijr(fams[:3], cap=cap)
            rhs = ijr(fams[:2], cap=cap)
            checks.append(IdentityCheck(2, "IJR(F1,F2,F3) <= IJR(F1,F2)",
                                        lhs, rhs, lhs <= rhs))
        elif ident == 3:
            if which is None and len(fams) < 3:
                continue
            need(3)
            lhs = ijr([fams[0], fams[1] + fams[2]], cap=cap)
            rhs = (ijr([fams[0], fams[1]], cap=cap) + ijr([fams[0], fams[2]], cap=cap)
                   - ijr(fams[:3], cap=cap))
            checks.append(IdentityCheck(3, "IJR(F1,F2 u F3) expansion", lhs, rhs, lhs == rhs))
        elif ident == 4:
            need(2)
            grown = fams[0] + fams[1]
            u_ok = ujr(fams[0], cap=cap) <= ujr(grown, cap=cap)
            i_ok = ijr([fams[0], fams[1]], cap=cap) <= ijr([grown, fams[1]], cap=cap)
            checks.append(IdentityCheck(4, "monotonicity under series inclusion",
                                        ujr(fams[0], cap=cap), ujr(grown, cap=cap),
                                        u_ok and i_ok))
        else:
            raise InputError(f"unknown identity {ident}; expected 1..4")
    return CardinalityReport(tuple(checks))
