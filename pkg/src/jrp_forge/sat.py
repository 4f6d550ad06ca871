"""CNF formulas: DIMACS parsing/serialization, 3SAT shape checks, brute force.

The parser is total over text input: any malformed content produces an
InputError carrying a line number and a specific message, never an uncaught
exception. Serialization emits canonical DIMACS (header, one clause per
line, trailing 0, no comments), and parsing a serialized formula returns an
equal formula.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .model import InputError, ValidationReport
from .sync import CapExceeded

_INT_RE = re.compile(r"-?\d+\Z")

BRUTE_FORCE_MAX_VARS = 24


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n_vars < 0:
            raise InputError("variable count must be non-negative")
        for idx, clause in enumerate(self.clauses):
            for lit in clause:
                v = abs(lit)
                if lit == 0 or v > self.n_vars:
                    raise InputError(
                        f"clause {idx + 1}: literal {lit} out of range "
                        f"for {self.n_vars} variables")


def _int_token(tok: str, lineno: int) -> int:
    if not _INT_RE.match(tok):
        raise InputError(f"line {lineno}: non-integer token {tok!r}")
    return int(tok)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF. Clauses may span lines; 0 terminates a clause.

    Comment lines start with 'c'; a '%' token ends the payload (some corpus
    files pad after it). Raises InputError with a line number for any defect.
    """
    n_vars: Optional[int] = None
    n_clauses: Optional[int] = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    current_start = 0
    header_line = 0
    done = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if done or not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            done = True
            continue
        if line.startswith("p"):
            if n_vars is not None:
                raise InputError(
                    f"line {lineno}: duplicate problem line "
                    f"(first at line {header_line})")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(
                    f"line {lineno}: malformed problem line {line!r}; "
                    f"expected 'p cnf <vars> <clauses>'")
            n_vars = _int_token(parts[2], lineno)
            n_clauses = _int_token(parts[3], lineno)
            if n_vars < 0 or n_clauses < 0:
                raise InputError(
                    f"line {lineno}: negative counts in problem line")
            header_line = lineno
            continue
        if n_vars is None:
            raise InputError(f"line {lineno}: clause data before problem line")
        for tok in line.split():
            if tok == "%":
                done = True
                break
            lit = _int_token(tok, lineno)
            if lit == 0:
                if len(clauses) == n_clauses:
                    raise InputError(
                        f"line {lineno}: more clauses than the declared "
                        f"{n_clauses}")
                clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > n_vars:
                raise InputError(
                    f"line {lineno}: literal {lit} out of range 1..{n_vars}")
            if not current:
                current_start = lineno
            current.append(lit)

    if n_vars is None:
        raise InputError("line 1: missing problem line")
    if current:
        raise InputError(
            f"line {current_start}: unterminated clause at end of input")
    assert n_clauses is not None
    if len(clauses) != n_clauses:
        raise InputError(
            f"line {header_line}: declared {n_clauses} clauses, found "
            f"{len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def serialize_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.n_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def validate_3sat(formula: CnfFormula) -> ValidationReport:
    """Every clause must hold exactly three literals over distinct variables."""
    findings = []
    for idx, clause in enumerate(formula.clauses):
        if len(clause) != 3:
            findings.append(
                f"clause {idx + 1}: expected 3 literals, found {len(clause)}")
            continue
        vs = {abs(lit) for lit in clause}
        if len(vs) != 3:
            findings.append(
                f"clause {idx + 1}: literals must use three distinct variables")
    return ValidationReport(tuple(findings))


def evaluate(formula: CnfFormula, assignment: tuple[bool, ...]) -> bool:
    """True iff the assignment (indexed by variable, x1 first) satisfies."""
    if len(assignment) != formula.n_vars:
        raise InputError(
            f"assignment length {len(assignment)} != {formula.n_vars} variables")
    for clause in formula.clauses:
        if not any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause):
            return False
    return True


def brute_force_sat(formula: CnfFormula) -> Optional[tuple[bool, ...]]:
    """First satisfying assignment in lexicographic order, or None.

    Order: x1 is the most significant position and False sorts before True,
    so the all-false assignment is tried first. Capped at
    BRUTE_FORCE_MAX_VARS variables.
    """
    n = formula.n_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise CapExceeded(
            f"{n} variables exceeds the brute-force cap of "
            f"{BRUTE_FORCE_MAX_VARS}")
    # bit (n - v) of the counter holds variable v, so counting upward
    # enumerates assignments lexicographically with x1 most significant
    masks = []
    for clause in formula.clauses:
        pos = 0
        neg = 0
        for lit in clause:
            bit = 1 << (n - abs(lit))
            if lit > 0:
                pos |= bit
            else:
                neg |= bit
        masks.append((pos, neg))
    full = (1 << n) - 1
    for m in range(1 << n):
        if all(m & pos or (~m & full) & neg for pos, neg in masks):
            return tuple(bool(m & (1 << (n - v))) for v in range(1, n + 1))
    return None
