"""Policy search: seed scaling, exhaustive profiles, descent, power-of-two.

Every winner is selected with exact rational comparisons. Optima of the form
2*sqrt(A*B) are compared through A*B (and against rational endpoint costs
through squares), so ties break deterministically and never through floats.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

from . import sync
from .cost import CostBreakdown, seed_cost, total_cost
from .eoq import optimal_cycle, sqrt_fraction, standalone_cost
from .model import (
    InputError,
    Instance,
    Policy,
    SeedProfile,
    expand_profile,
)

DEFAULT_PROFILE_CAP = 1_000_000

ProfileLike = Union[SeedProfile, Mapping[str, int]]
Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class SolveResult:
    policy: Policy
    cost: CostBreakdown
    method: str
    nodes_explored: int
    wall_time: float


# ---------------------------------------------------------------------------
# exact comparison of per-profile optima

@dataclass(frozen=True)
class _Cand:
    kind: str        # "sqrt": value = A*B, cost 2*sqrt(A*B); "rat": value = cost
    value: Fraction


def _cand_lt(a: _Cand, b: _Cand) -> bool:
    if a.kind == b.kind:
        return a.value < b.value
    if a.kind == "sqrt":  # 2*sqrt(ab) < r  <=>  4*ab < r*r  (costs positive)
        return 4 * a.value < b.value * b.value
    return a.value * a.value < 4 * b.value


def _normalize_interval(seed_interval) -> Optional[Interval]:
    if seed_interval is None:
        return None
    lo, hi = seed_interval
    lo, hi = Fraction(lo), Fraction(hi)
    if lo <= 0 or hi < lo:
        raise InputError(f"seed interval must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
    return lo, hi


def _multipliers(profile: ProfileLike) -> dict[str, int]:
    return dict(profile.multipliers) if isinstance(profile, SeedProfile) else dict(profile)


def _best_seed(a: Fraction, b: Fraction,
               interval: Optional[Interval]) -> tuple[Fraction, str, bool]:
    """Minimizer of a/beta + b*beta over the interval (or over beta > 0)."""
    b2 = a / b
    if interval is not None:
        lo, hi = interval
        if b2 <= lo * lo:
            return lo, "clamped-lo", True
        if b2 >= hi * hi:
            return hi, "clamped-hi", True
    root, exact = sqrt_fraction(b2)
    return root, "interior", exact


def optimize_seed(instance: Instance, profile: ProfileLike,
                  seed_interval=None, cap: int | None = None) -> SolveResult:
    """Best common seed for a fixed multiplier profile.

    cost(beta) = A/beta + B*beta is convex; the interior optimum is
    beta* = sqrt(A/B) with cost 2*sqrt(A*B), exact whenever A/B is a perfect
    rational square and otherwise refined to relative error far below 1e-12.
    An interval clamps to the nearer endpoint, where the cost is exact.
    """
    t0 = time.perf_counter()
    if not instance.commodities:
        raise InputError("cannot optimize an empty instance")
    interval = _normalize_interval(seed_interval)
    mult = _multipliers(profile)
    a, b = seed_cost(instance, SeedProfile(mult), cap=cap)
    beta, where, exact = _best_seed(a, b, interval)
    if where == "interior":
        method = "seed(exact)" if exact else "seed(refined)"
    else:
        method = f"seed({where})"
    policy = expand_profile(SeedProfile(mult, beta))
    breakdown = total_cost(instance, policy, cap=cap)
    return SolveResult(policy, breakdown, method, 1, time.perf_counter() - t0)


def _bounds_map(instance: Instance, k_bounds) -> dict[str, tuple[int, int]]:
    if isinstance(k_bounds, tuple) and len(k_bounds) == 2 \
            and all(isinstance(x, int) for x in k_bounds):
        k_bounds = {cid: k_bounds for cid in instance.ids()}
    out = {}
    for cid in instance.ids():
        if cid not in k_bounds:
            raise InputError(f"k_bounds missing commodity {cid!r}")
        lo, hi = k_bounds[cid]
        if not (isinstance(lo, int) and isinstance(hi, int)) or lo < 1 or hi < lo:
            raise InputError(f"k_bounds for {cid!r} must be integers 1 <= lo <= hi")
        out[cid] = (lo, hi)
    return out


def exhaustive_search(instance: Instance, k_bounds,
                      seed_interval=None,
                      profile_cap: int = DEFAULT_PROFILE_CAP,
                      cap: int | None = None) -> SolveResult:
    """Enumerate every multiplier profile in the bounds, optimize each seed.

    Profiles are scanned in lexicographic order over the instance's commodity
    order, so cost ties keep the lexicographically smallest profile.
    """
    t0 = time.perf_counter()
    if not instance.commodities:
        raise InputError("cannot optimize an empty instance")
    interval = _normalize_interval(seed_interval)
    bounds = _bounds_map(instance, k_bounds)
    n_profiles = 1
    for lo, hi in bounds.values():
        n_profiles *= hi - lo + 1
    if n_profiles > profile_cap:
        raise sync.CapExceeded(
            f"{n_profiles} profiles exceed the cap of {profile_cap}")

    ids = instance.ids()
    setups = [c.setup for c in instance.commodities]
    weights = [c.demand * c.holding / 2 for c in instance.commodities]
    k0 = instance.joint_setup
    ujr_cache: dict[frozenset[int], Fraction] = {}

    def joint_rate(ks: tuple[int, ...]) -> Fraction:
        key = frozenset(ks)
        val = ujr_cache.get(key)
        if val is None:
            val = sync.ujr([Fraction(k) for k in key], cap=cap)
            ujr_cache[key] = val
        return val

    best: Optional[_Cand] = None
    best_profile: Optional[tuple[int, ...]] = None
    ranges = [range(lo, hi + 1) for lo, hi in (bounds[cid] for cid in ids)]
    for ks in itertools.product(*ranges):
        a = k0 * joint_rate(ks)
        b = Fraction(0)
        for setup, weight, k in zip(setups, weights, ks):
            a += setup / k
            b += weight * k
        beta, where, _ = _best_seed(a, b, interval)
        if where == "interior":
            cand = _Cand("sqrt", a * b)
        else:
            cand = _Cand("rat", a / beta + b * beta)
        if best is None or _cand_lt(cand, best):
            best, best_profile = cand, ks

    assert best_profile is not None
    refined = optimize_seed(instance, dict(zip(ids, best_profile)),
                            seed_interval=interval, cap=cap)
    return SolveResult(refined.policy, refined.cost, "exhaustive",
                       n_profiles, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# coordinate descent

CandidateFn = Callable[[Instance, Policy, str], Iterable[Fraction]]


def default_candidates(instance: Instance, policy: Policy,
                       cid: str) -> set[Fraction]:
    """Integer cycles near the standalone optimum plus small multiples and
    unit fractions of the other commodities' current cycles."""
    c = instance.commodity(cid)
    tstar = optimal_cycle(c).cycle
    floor_t = tstar.numerator // tstar.denominator
    cands: set[Fraction] = set()
    for k in range(max(1, floor_t - 2), floor_t + 3):
        cands.add(Fraction(k))
    for other, t in policy.cycles.items():
        if other == cid:
            continue
        for m in (1, 2, 3, 4):
            cands.add(t * m)
            cands.add(t / m)
    return cands


def _default_start(instance: Instance) -> Policy:
    cycles = {}
    for c in instance.commodities:
        tstar = optimal_cycle(c).cycle
        floor_t = max(1, tstar.numerator // tstar.denominator)
        lo, hi = Fraction(floor_t), Fraction(floor_t + 1)
        cycles[c.id] = lo if standalone_cost(c, lo) <= standalone_cost(c, hi) else hi
    return Policy(cycles)


def coordinate_descent(instance: Instance, start: Optional[Policy] = None,
                       candidate_fn: Optional[CandidateFn] = None,
                       max_rounds: int = 100,
                       cap: int | None = None) -> SolveResult:
    """Cycle-by-cycle improvement until a full pass finds nothing better.

    Each commodity in turn is moved to the exact-cost-minimizing candidate
    (ties broken toward the smaller cycle) while the others stay fixed. The
    cost sequence is strictly decreasing, so termination is guaranteed.
    """
    t0 = time.perf_counter()
    if not instance.commodities:
        raise InputError("cannot optimize an empty instance")
    if candidate_fn is None:
        candidate_fn = default_candidates
    policy = start if start is not None else _default_start(instance)
    current = total_cost(instance, policy, cap=cap)
    nodes = 1
    for _ in range(max_rounds):
        improved = False
        for cid in instance.ids():
            best_t = policy.cycle(cid)
            best_total = current.total
            for t in sorted(set(candidate_fn(instance, policy, cid))):
                if t <= 0 or t == policy.cycle(cid):
                    continue
                trial = Policy({**policy.cycles, cid: t})
                nodes += 1
                trial_cost = total_cost(instance, trial, cap=cap)
                if trial_cost.total < best_total or (
                        trial_cost.total == best_total and t < best_t):
                    best_t, best_total = t, trial_cost.total
            if best_total < current.total:
                policy = Policy({**policy.cycles, cid: best_t})
                current = total_cost(instance, policy, cap=cap)
                improved = True
        if not improved:
            break
    return SolveResult(policy, current, "descent", nodes,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# power-of-two policies

def _pow4(m: int) -> Fraction:
    return Fraction(4) ** m


def _best_exponent(c, base: Fraction) -> int:
    """Exact g-minimizing m for cycle base*2^m; ties go to the smaller m."""
    t2 = 2 * c.setup / (c.holding * c.demand)
    r = t2 / (base * base)
    # floor(log4 r), estimated from bit lengths then corrected exactly
    m = (r.numerator.bit_length() - r.denominator.bit_length()) // 2
    while _pow4(m + 1) <= r:
        m += 1
    while _pow4(m) > r:
        m -= 1
    lo_t = base * Fraction(2) ** m
    hi_t = 2 * lo_t
    if standalone_cost(c, lo_t) <= standalone_cost(c, hi_t):
        return m
    return m + 1


def _round_exponent(target_sq: Fraction, base: Fraction) -> int:
    """m with base*2^m in [target/sqrt(2), target*sqrt(2)); exact arithmetic."""
    r = 2 * target_sq / (base * base)
    # largest m with 4^m < r
    m = (r.numerator.bit_length() - r.denominator.bit_length()) // 2
    while _pow4(m + 1) < r:
        m += 1
    while _pow4(m) >= r:
        m -= 1
    return m


def _cluster_target_squares(instance: Instance) -> dict[str, Fraction]:
    """Squared cycle targets from the joint-setup relaxation.

    The joint cost is bounded below by the joint setup paid at the most
    frequent commodity's rate.  Minimizing that relaxation glues the
    commodities with the smallest standalone optima onto one shared cycle
    that carries the joint setup; the rest keep their standalone optima.
    The cluster grows greedily in ascending t* order while the next
    standalone optimum still undercuts the running shared cycle.
    """
    hs = {c.id: c.demand * c.holding / 2 for c in instance.commodities}
    t_sq = {c.id: c.setup / hs[c.id] for c in instance.commodities}
    order = sorted(instance.ids(), key=lambda cid: t_sq[cid])
    by_id = {c.id: c for c in instance.commodities}
    sum_k = instance.joint_setup + by_id[order[0]].setup
    sum_h = hs[order[0]]
    cluster = 1
    for cid in order[1:]:
        if t_sq[cid] >= sum_k / sum_h:
            break
        sum_k += by_id[cid].setup
        sum_h += hs[cid]
        cluster += 1
    shared_sq = sum_k / sum_h
    return {cid: shared_sq if i < cluster else t_sq[cid]
            for i, cid in enumerate(order)}


def power_of_two(instance: Instance, base: Fraction = Fraction(1),
                 optimize_base: bool = False, grid: int = 64,
                 cap: int | None = None) -> SolveResult:
    """Restrict every cycle to base*2^m with integer m.

    With a fixed base each commodity's exponent is chosen by exact cost
    comparison (equivalent to rounding log2(t*/base), half-points rounding
    down). With optimize_base=True, `grid` bases spanning one octave above
    `base` are tried; for each base two exponent patterns are formed — one
    rounding the standalone optima, one rounding the joint-setup relaxation
    targets, which share one cycle across the cluster of most frequent
    commodities — and every distinct pattern is reduced to an integer
    multiplier profile whose common seed is then optimized exactly, so the
    returned policy is the best seed-scaled power-of-two pattern seen.
    """
    t0 = time.perf_counter()
    if not instance.commodities:
        raise InputError("cannot optimize an empty instance")
    base = Fraction(base)
    if base <= 0:
        raise InputError(f"base must be > 0, got {base}")

    if not optimize_base:
        cycles = {c.id: base * Fraction(2) ** _best_exponent(c, base)
                  for c in instance.commodities}
        policy = Policy(cycles)
        return SolveResult(policy, total_cost(instance, policy, cap=cap),
                           f"pot(base={base})", len(cycles),
                           time.perf_counter() - t0)

    if grid < 1:
        raise InputError(f"grid must be >= 1, got {grid}")
    scale_bits = 24
    targets = _cluster_target_squares(instance)
    seen: set[tuple[int, ...]] = set()
    best: Optional[_Cand] = None
    best_profile: Optional[dict[str, int]] = None
    for j in range(grid):
        step = Fraction(round(2 ** (j / grid) * 2 ** scale_bits), 2 ** scale_bits)
        b_j = base * step
        patterns = (
            [_best_exponent(c, b_j) for c in instance.commodities],
            [_round_exponent(targets[c.id], b_j) for c in instance.commodities],
        )
        for exps in patterns:
            m_min = min(exps)
            ks = tuple(2 ** (m - m_min) for m in exps)
            if ks in seen:
                continue
            seen.add(ks)
            profile = dict(zip(instance.ids(), ks))
            a, b = seed_cost(instance, SeedProfile(profile), cap=cap)
            cand = _Cand("sqrt", a * b)
            if best is None or _cand_lt(cand, best):
                best, best_profile = cand, profile

    assert best_profile is not None
    refined = optimize_seed(instance, best_profile, cap=cap)
    return SolveResult(refined.policy, refined.cost, "pot(opt-base)",
                       grid, time.perf_counter() - t0)
