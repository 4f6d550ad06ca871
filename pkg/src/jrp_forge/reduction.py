"""3SAT-to-replenishment instance construction and its desk-scale checks.

A formula over n variables becomes an instance with three commodity classes:

* Variables x_i — may cycle at beta*p_low_i (false) or beta*p_high_i (true),
  where (p_low_i, p_high_i) is a prime pair unique to the variable;
* Clauses z_j — anchored at beta times the product of the three literal
  primes, so a clause's series synchronizes with a variable's exactly when
  the variable's chosen prime divides the product (the literal is true);
* Constants y_k — anchored series that pin the common seed beta.

Constants and Clauses use the anchored construction h = 1/((d^2+2d)t*^2),
K = 1/(d^2+2d) with d the drift tolerance, which makes the bracketing pair
of optima exactly (t*, (1+d)t*). Joint setup is 1 and every demand is 2, so
t*^2 = K/h throughout.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from math import isqrt
from typing import Callable, Mapping, Optional, Sequence

from .cost import decompose, total_cost
from .model import (
    Commodity,
    CommodityKind,
    InputError,
    Instance,
    JrpError,
    Policy,
    format_rational,
    load_instance,
    parse_rational,
    save_instance,
)
from .sat import CnfFormula, brute_force_sat, validate_3sat
from .sync import CapExceeded

DEFAULT_SCHEME = "paired-anchors"
_ANCHOR_PRIME = 7

ROUNDTRIP_MAX_VARS = 10
ROUNDTRIP_MAX_CLAUSES = 15


class ConfigRejected(JrpError):
    """Constants configuration violates a build-time invariant."""


@dataclass(frozen=True)
class PrimePair:
    index: int      # 1-based variable index
    low: int        # false prime
    gap: int        # positive even spacing
    @property
    def high(self) -> int:  # true prime
        return self.low + self.gap


# Default alpha_v_bar is calibrated per variable count so that, at the
# final drift tolerance, flipping any variable to its high prime raises the
# variable-class cost by more than the largest cross-seed rate a clause can
# recover. One calibrated value per n; larger n reuse the n=3 value.
_ALPHA_V_BAR_DEFAULTS = {
    1: Fraction(15827, 20000),
    2: Fraction(74617, 100000),
}
_ALPHA_V_BAR_FALLBACK = Fraction(147, 200)


@dataclass(frozen=True)
class ReductionConstants:
    alpha_c: Fraction = Fraction(1)
    alpha_v_bar: Optional[Fraction] = None   # None -> per-n calibrated default
    alpha_v: Fraction = Fraction(1, 10)
    alpha_n: Fraction = Fraction(1, 10)

    def resolved(self, n: int) -> "ReductionConstants":
        if self.alpha_v_bar is not None:
            return self
        value = _ALPHA_V_BAR_DEFAULTS.get(n, _ALPHA_V_BAR_FALLBACK)
        return replace(self, alpha_v_bar=value)


def default_alpha_v_bar(n: int) -> Fraction:
    return _ALPHA_V_BAR_DEFAULTS.get(n, _ALPHA_V_BAR_FALLBACK)


# ---------------------------------------------------------------------------
# primes

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any desk-scale input."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def select_prime_pairs(n: int) -> tuple[PrimePair, ...]:
    """First n twin-prime pairs starting at (11, 13); ascending and disjoint."""
    if n < 1:
        raise InputError(f"need at least one pair, got n={n}")
    pairs: list[PrimePair] = []
    candidate = 11
    while len(pairs) < n:
        if is_prime(candidate) and is_prime(candidate + 2):
            pairs.append(PrimePair(index=len(pairs) + 1, low=candidate, gap=2))
            candidate += 4
        else:
            candidate += 2
    return tuple(pairs)


def compute_delta(n: int, pairs: Sequence[PrimePair]) -> Fraction:
    """Drift tolerance 1/(6*n*p_high_n^6)."""
    if not pairs:
        raise InputError("compute_delta needs at least one pair")
    return Fraction(1, 6 * n * pairs[-1].high ** 6)


# ---------------------------------------------------------------------------
# commodity builders

def _anchor_costs(t_star: int, delta: Fraction) -> tuple[Fraction, Fraction]:
    denom = delta * delta + 2 * delta
    return Fraction(1) / (denom * t_star * t_star), Fraction(1) / denom


def build_constant_commodity(t_star: int, delta: Fraction,
                             cid: Optional[str] = None) -> Commodity:
    """Anchored commodity whose bracketing optima are exactly (t*, (1+d)t*)."""
    if t_star < 1:
        raise InputError(f"anchor target must be >= 1, got {t_star}")
    if delta <= 0:
        raise InputError(f"drift tolerance must be > 0, got {delta}")
    h, k = _anchor_costs(t_star, delta)
    return Commodity(id=cid or f"y@{t_star}", demand=Fraction(2), holding=h,
                     setup=k, kind=CommodityKind.CONSTANT)


def clause_target(clause: Sequence[int], pairs: Sequence[PrimePair]) -> int:
    """Product of the three literal primes: negative -> low, positive -> high."""
    if len(clause) != 3 or len({abs(lit) for lit in clause}) != 3:
        raise InputError(f"clause {tuple(clause)} must use three distinct variables")
    target = 1
    for lit in clause:
        v = abs(lit)
        if lit == 0 or v > len(pairs):
            raise InputError(f"literal {lit} out of range for {len(pairs)} pairs")
        pair = pairs[v - 1]
        target *= pair.high if lit > 0 else pair.low
    return target


def build_clause_commodity(clause: Sequence[int], pairs: Sequence[PrimePair],
                           delta: Fraction,
                           cid: Optional[str] = None) -> Commodity:
    target = clause_target(clause, pairs)
    h, k = _anchor_costs(target, delta)
    return Commodity(id=cid or f"z@{target}", demand=Fraction(2), holding=h,
                     setup=k, kind=CommodityKind.CLAUSE)


def build_variable_commodity(pair: PrimePair, constants: ReductionConstants,
                             cid: Optional[str] = None) -> Commodity:
    """Choice commodity whose standalone optimum falls strictly between the
    pair's primes, with the high prime dearer by a calibrated sliver."""
    if constants.alpha_v_bar is None:
        raise InputError("alpha_v_bar unresolved; call ReductionConstants.resolved(n)")
    lo, b, hi = pair.low, pair.gap, pair.high
    if b <= 0 or b % 2:
        raise InputError(f"pair spacing must be positive and even, got {b}")
    half = Fraction(b, 2)
    h = constants.alpha_c * (lo * lo - b * b) / (lo * (lo + half) * half)
    if h <= 0:
        raise ConfigRejected(f"pair ({lo},{hi}): holding cost not positive")
    k = h * lo * hi - Fraction(hi, hi - 1) * constants.alpha_c * constants.alpha_v_bar
    if k <= 0:
        raise ConfigRejected(
            f"pair ({lo},{hi}): alpha_v_bar={constants.alpha_v_bar} drives the "
            f"setup cost to {k} <= 0")
    t2 = k / h
    if not (lo * lo < t2 < hi * hi):
        raise ConfigRejected(
            f"pair ({lo},{hi}): standalone optimum t*^2={t2} leaves "
            f"({lo}^2, {hi}^2)")
    return Commodity(id=cid or f"x{pair.index}", demand=Fraction(2), holding=h,
                     setup=k, kind=CommodityKind.VARIABLE)


# ---------------------------------------------------------------------------
# constants schemes

def _scheme_paired_anchors(pairs: Sequence[PrimePair]) -> list[int]:
    """Two anchors per pair at 7*p_low and 7*p_high. The factor 7 is coprime
    to every pair prime and never divides a clause target, so anchors pin
    the seed without pre-synchronizing any clause."""
    targets = []
    for pair in pairs:
        targets.append(pair.low * _ANCHOR_PRIME)
        targets.append(pair.high * _ANCHOR_PRIME)
    return targets


def _scheme_adjacent_products(pairs: Sequence[PrimePair]) -> list[int]:
    """Ring products of neighbouring pairs plus a unit anchor. Kept as a
    named alternative; its unit anchor saturates the joint order (every
    epoch already orders) and its products can pre-cover clause targets, so
    it is not the default."""
    n = len(pairs)
    targets = []
    for i, pair in enumerate(pairs):
        nxt = pairs[(i + 1) % n]
        targets.append(pair.low * nxt.low)
        targets.append(pair.high * nxt.high)
    targets.append(1)
    return targets


CONSTANT_SCHEMES: dict[str, Callable[[Sequence[PrimePair]], list[int]]] = {
    "paired-anchors": _scheme_paired_anchors,
    "adjacent-products": _scheme_adjacent_products,
}


# ---------------------------------------------------------------------------
# the reduction

@dataclass(frozen=True)
class ReductionOutput:
    instance: Instance
    pairs: tuple[PrimePair, ...]
    delta: Fraction
    literal_map: Mapping[int, tuple[int, int]]      # var index -> (low, high)
    clause_targets: Mapping[int, int]               # clause index (1-based) -> t*
    constants_scheme: str
    alpha: ReductionConstants                       # resolved values
    anchor_targets: Mapping[str, int]               # constant/clause id -> t*

    def variable_id(self, i: int) -> str:
        return f"x{i}"

    def clause_id(self, j: int) -> str:
        return f"z{j}"


def reduce_formula(formula: CnfFormula,
                   constants: Optional[ReductionConstants] = None,
                   scheme: str = DEFAULT_SCHEME) -> ReductionOutput:
    """Build the instance for a 3SAT formula; joint setup 1, every demand 2."""
    shape = validate_3sat(formula)
    if not shape.ok:
        raise InputError("; ".join(shape.findings))
    n = formula.n_vars
    if n < 1:
        raise InputError("formula must have at least one variable")
    if scheme not in CONSTANT_SCHEMES:
        raise InputError(
            f"unknown constants scheme {scheme!r}; "
            f"known: {', '.join(sorted(CONSTANT_SCHEMES))}")
    alpha = (constants or ReductionConstants()).resolved(n)
    for name in ("alpha_c", "alpha_v", "alpha_n"):
        if getattr(alpha, name) <= 0:
            raise ConfigRejected(f"{name} must be > 0, got {getattr(alpha, name)}")
    if alpha.alpha_v_bar <= 0:
        raise ConfigRejected(f"alpha_v_bar must be > 0, got {alpha.alpha_v_bar}")

    pairs = select_prime_pairs(n)
    delta = compute_delta(n, pairs)
    commodities: list[Commodity] = []
    anchor_targets: dict[str, int] = {}

    for idx, t_star in enumerate(CONSTANT_SCHEMES[scheme](pairs), start=1):
        cid = f"y{idx}"
        commodities.append(build_constant_commodity(t_star, delta, cid=cid))
        anchor_targets[cid] = t_star

    for pair in pairs:
        commodities.append(build_variable_commodity(pair, alpha))

    clause_targets: dict[int, int] = {}
    p_max = pairs[-1].high
    for j, clause in enumerate(formula.clauses, start=1):
        cid = f"z{j}"
        target = clause_target(clause, pairs)
        if target >= p_max ** 3:
            raise JrpError(f"clause {j}: target {target} >= {p_max}^3")
        commodities.append(build_clause_commodity(clause, pairs, delta, cid=cid))
        clause_targets[j] = target
        anchor_targets[cid] = target

    instance = Instance(
        commodities=tuple(commodities),
        joint_setup=Fraction(1),
        meta=_meta_dict(pairs, delta, clause_targets, scheme, alpha),
    )
    return ReductionOutput(
        instance=instance,
        pairs=pairs,
        delta=delta,
        literal_map={p.index: (p.low, p.high) for p in pairs},
        clause_targets=clause_targets,
        constants_scheme=scheme,
        alpha=alpha,
        anchor_targets=anchor_targets,
    )


def _meta_dict(pairs, delta, clause_targets, scheme, alpha) -> dict:
    return {
        "delta": format_rational(delta),
        "pairs": [[p.low, p.gap, p.high] for p in pairs],
        "literal_map": {str(p.index): [p.low, p.high] for p in pairs},
        "clause_targets": {str(j): t for j, t in clause_targets.items()},
        "constants_scheme": scheme,
        "alpha": {
            "alpha_c": format_rational(alpha.alpha_c),
            "alpha_v_bar": format_rational(alpha.alpha_v_bar),
            "alpha_v": format_rational(alpha.alpha_v),
            "alpha_n": format_rational(alpha.alpha_n),
        },
    }


def reduction_to_json(output: ReductionOutput) -> bytes:
    return save_instance(output.instance)


def reduction_from_json(data: bytes | str) -> ReductionOutput:
    instance = load_instance(data)
    meta = instance.meta
    if not isinstance(meta, dict):
        raise InputError("reduction JSON missing 'meta' object")
    try:
        delta = parse_rational(meta["delta"], where="meta.delta")
        raw_pairs = meta["pairs"]
        scheme = meta["constants_scheme"]
        raw_alpha = meta["alpha"]
        raw_targets = meta["clause_targets"]
    except KeyError as exc:
        raise InputError(f"reduction JSON meta missing {exc.args[0]!r}") from None
    pairs = []
    for i, (low, gap, high) in enumerate(raw_pairs, start=1):
        pair = PrimePair(index=i, low=int(low), gap=int(gap))
        if pair.high != int(high):
            raise InputError(
                f"meta.pairs[{i - 1}]: {high} != {low} + {gap}")
        pairs.append(pair)
    pairs = tuple(pairs)
    alpha = ReductionConstants(
        alpha_c=parse_rational(raw_alpha["alpha_c"], where="meta.alpha.alpha_c"),
        alpha_v_bar=parse_rational(raw_alpha["alpha_v_bar"],
                                   where="meta.alpha.alpha_v_bar"),
        alpha_v=parse_rational(raw_alpha["alpha_v"], where="meta.alpha.alpha_v"),
        alpha_n=parse_rational(raw_alpha["alpha_n"], where="meta.alpha.alpha_n"),
    )
    clause_targets = {int(j): int(t) for j, t in raw_targets.items()}
    anchor_targets: dict[str, int] = {}
    for c in instance.commodities:
        if c.kind in (CommodityKind.CONSTANT, CommodityKind.CLAUSE):
            t2 = c.setup / c.holding
            root = isqrt(t2.numerator // t2.denominator)
            if root * root * t2.denominator != t2.numerator:
                raise InputError(f"commodity {c.id!r}: anchor target not integral")
            anchor_targets[c.id] = root
    return ReductionOutput(
        instance=instance,
        pairs=pairs,
        delta=delta,
        literal_map={p.index: (p.low, p.high) for p in pairs},
        clause_targets=clause_targets,
        constants_scheme=scheme,
        alpha=alpha,
        anchor_targets=anchor_targets,
    )


# ---------------------------------------------------------------------------
# assignments <-> policies

def _check_beta(output: ReductionOutput, beta: Fraction) -> Fraction:
    beta = Fraction(beta)
    if not 1 <= beta <= 1 + output.delta:
        raise InputError(
            f"seed {beta} outside [1, 1 + {output.delta}]")
    return beta


def assignment_to_policy(output: ReductionOutput, assignment: Sequence[bool],
                         beta: Fraction = Fraction(1)) -> Policy:
    """Variables at beta times their truth prime; anchors at beta times t*."""
    beta = _check_beta(output, beta)
    if len(assignment) != len(output.pairs):
        raise InputError(
            f"assignment length {len(assignment)} != {len(output.pairs)} variables")
    cycles: dict[str, Fraction] = {}
    for pair, value in zip(output.pairs, assignment):
        prime = pair.high if value else pair.low
        cycles[output.variable_id(pair.index)] = beta * prime
    for cid, target in output.anchor_targets.items():
        cycles[cid] = beta * target
    return Policy(cycles)


def policy_to_assignment(output: ReductionOutput,
                         policy: Policy) -> tuple[tuple[bool, ...], Fraction]:
    """Invert assignment_to_policy; rejects policies of any other shape."""
    if not output.anchor_targets:
        raise InputError("reduction has no anchor commodities to infer the seed")
    anchor_id, target = next(iter(output.anchor_targets.items()))
    beta = policy.cycle(anchor_id) / target
    if beta <= 0:
        raise InputError("inferred seed is not positive")
    for cid, t in output.anchor_targets.items():
        if policy.cycle(cid) != beta * t:
            raise InputError(f"anchor {cid!r} is not at the common seed")
    assignment: list[bool] = []
    for pair in output.pairs:
        t = policy.cycle(output.variable_id(pair.index))
        if t == beta * pair.low:
            assignment.append(False)
        elif t == beta * pair.high:
            assignment.append(True)
        else:
            raise InputError(
                f"variable x{pair.index} cycles at {t}, which is neither seed "
                f"times {pair.low} nor seed times {pair.high}")
    return tuple(assignment), beta


def clause_synchronized(output: ReductionOutput, policy: Policy,
                        clause_index: int) -> bool:
    """True iff some variable's integer cycle divides the clause target."""
    if clause_index not in output.clause_targets:
        raise InputError(f"no clause with index {clause_index}")
    _assignment, beta = policy_to_assignment(output, policy)
    target = output.clause_targets[clause_index]
    for pair in output.pairs:
        q = policy.cycle(output.variable_id(pair.index)) / beta
        if q.denominator == 1 and target % q.numerator == 0:
            return True
    return False


# ---------------------------------------------------------------------------
# desk-scale verification

def _thread_count() -> int:
    raw = os.environ.get("JRP_FORGE_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _map_assignments(fn, assignments):
    workers = _thread_count()
    if workers == 1:
        return [fn(a) for a in assignments]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, assignments))


@dataclass(frozen=True)
class RoundtripReport:
    satisfiable: bool
    sat_assignment: Optional[tuple[bool, ...]]
    argmin_assignment: tuple[bool, ...]
    argmin_cost: Fraction
    argmin_synchronizes_all: bool
    verdict_consistent: bool       # argmin_synchronizes_all == satisfiable
    gap: Optional[Fraction]        # best violating cost - best synchronized cost
    n_assignments: int
    scope: str


def verify_roundtrip(formula: CnfFormula,
                     constants: Optional[ReductionConstants] = None,
                     scheme: str = DEFAULT_SCHEME,
                     cap: int | None = None) -> RoundtripReport:
    """Compare the assignment-policy argmin against the brute-force verdict.

    Scans all 2^n assignment policies at seed 1. The scan covers assignment
    policies only, not the continuous policy space; the report says so.
    """
    if formula.n_vars > ROUNDTRIP_MAX_VARS:
        raise CapExceeded(
            f"{formula.n_vars} variables exceeds the round-trip cap of "
            f"{ROUNDTRIP_MAX_VARS}")
    if len(formula.clauses) > ROUNDTRIP_MAX_CLAUSES:
        raise CapExceeded(
            f"{len(formula.clauses)} clauses exceeds the round-trip cap of "
            f"{ROUNDTRIP_MAX_CLAUSES}")
    output = reduce_formula(formula, constants, scheme)
    sat_assignment = brute_force_sat(formula)

    def evaluate(assignment: tuple[bool, ...]):
        policy = assignment_to_policy(output, assignment)
        cost = total_cost(output.instance, policy, cap=cap).total
        synced = all(clause_synchronized(output, policy, j)
                     for j in output.clause_targets)
        return assignment, cost, synced

    assignments = list(product((False, True), repeat=formula.n_vars))
    rows = _map_assignments(evaluate, assignments)

    best = min(rows, key=lambda row: (row[1], row[0]))
    synced_costs = [cost for _, cost, synced in rows if synced]
    violating_costs = [cost for _, cost, synced in rows if not synced]
    gap = None
    if synced_costs and violating_costs:
        gap = min(violating_costs) - min(synced_costs)
    return RoundtripReport(
        satisfiable=sat_assignment is not None,
        sat_assignment=sat_assignment,
        argmin_assignment=best[0],
        argmin_cost=best[1],
        argmin_synchronizes_all=best[2],
        verdict_consistent=best[2] == (sat_assignment is not None),
        gap=gap,
        n_assignments=len(rows),
        scope="assignment policies at seed 1 only; the continuous policy "
              "space is out of scope",
    )


@dataclass(frozen=True)
class GapReport:
    beta: Fraction
    tc_variables_low: Fraction     # all variables at their low primes
    tc_variables_high: Fraction    # all variables at their high primes
    lb_term: Fraction              # K0*alpha_v*alpha_n/(beta*t_z)
    margin: Fraction               # tc_low - tc_high + lb_term
    target: Fraction               # discrete at beta=1, else continuous
    passed: bool
    lemma_directions: tuple[tuple[str, bool], ...]

    @property
    def lemma_ok(self) -> bool:
        return all(ok for _, ok in self.lemma_directions)


def _tc_variables(output: ReductionOutput, assignment: Sequence[bool],
                  beta: Fraction, cap: int | None) -> Fraction:
    policy = assignment_to_policy(output, assignment, beta)
    breakdown = decompose(output.instance, policy, cap=cap)
    assert breakdown.tc_variables is not None
    return breakdown.tc_variables


def check_gap_inequality(output: ReductionOutput, beta: Fraction,
                         cap: int | None = None) -> GapReport:
    """Exact margin of the all-low vs all-high variable-class comparison.

    margin = TC_Variables(all-low) - TC_Variables(all-high) + LB, where LB
    is the calibrated floor on the rate a clause could recover by aligning
    with a flipped variable. At seed 1 the margin is held against
    1/p_high_n^6; inside the drift window against a quarter of that. When
    the instance has no clauses, LB uses the synthetic worst-case target
    p_high_n^3 (the largest any clause could have).
    """
    beta = _check_beta(output, beta)
    n = len(output.pairs)
    all_low = (False,) * n
    all_high = (True,) * n
    tc_low = _tc_variables(output, all_low, beta, cap)
    tc_high = _tc_variables(output, all_high, beta, cap)

    p_max = output.pairs[-1].high
    t_z = max(output.clause_targets.values()) if output.clause_targets \
        else p_max ** 3
    lb = (output.instance.joint_setup * output.alpha.alpha_v
          * output.alpha.alpha_n / (beta * t_z))
    margin = tc_low - tc_high + lb
    target = Fraction(1, p_max ** 6) if beta == 1 else Fraction(1, 4 * p_max ** 6)

    directions = []
    for i, pair in enumerate(output.pairs):
        context = list(all_low)
        context[i] = True
        flipped = _tc_variables(output, context, beta, cap)
        directions.append((output.variable_id(pair.index), tc_low < flipped))
    return GapReport(
        beta=beta,
        tc_variables_low=tc_low,
        tc_variables_high=tc_high,
        lb_term=lb,
        margin=margin,
        target=target,
        passed=margin > target,
        lemma_directions=tuple(directions),
    )
