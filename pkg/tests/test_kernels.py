import math
import subprocess
import sys
from functools import reduce

from hypothesis import given, settings
from hypothesis import strategies as st

from jrp_forge import _kernels
from jrp_forge._kernels import pure


def _lcm_all(values):
    return reduce(math.lcm, values, 1)


def _normalize(periods):
    """Dedup and drop any period that another period divides."""
    uniq = sorted(set(periods))
    keep = [p for p in uniq
            if not any(q != p and p % q == 0 for q in uniq)]
    return keep


def _set_oracle(periods, hyper):
    pts = set()
    for p in periods:
        pts.update(range(p, hyper + 1, p))
    return len(pts)


def test_backend_reports_lane():
    assert _kernels.backend() in ("fast", "pure")


def test_union_count_hand_values():
    assert _kernels.union_count([2, 3], 6) == 4        # 2,3,4,6
    assert _kernels.union_count([2], 6) == 3
    assert _kernels.union_count([5, 7], 35) == 11


@settings(max_examples=250, derandomize=True, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=40), min_size=1,
                max_size=6))
def test_fast_pure_and_enumeration_agree(raw):
    periods = _normalize(raw)
    hyper = _lcm_all(periods)
    expected = _set_oracle(periods, hyper)
    assert pure.union_count(periods, hyper) == expected
    assert pure.epoch_count(periods, hyper) == expected
    assert _kernels.union_count(periods, hyper) == expected
    assert _kernels.epoch_count(periods, hyper) == expected


def test_big_integer_inputs_use_pure_fallback():
    # hyperperiod beyond 64-bit range must still produce exact counts
    p1, p2 = 2**40, 3**30
    hyper = p1 * p2  # ~2.26e23 >> 2**63
    assert hyper > 2**63
    count = _kernels.union_count([p1, p2], hyper)
    assert count == p2 + p1 - 1  # hyper/p1 + hyper/p2 - hyper/lcm
    assert pure.union_count([p1, p2], hyper) == count


def test_large_prime_products_from_generated_instances():
    # the reduction's clause targets are three-prime products; scaled far
    # past int64 the counting identity must be unaffected
    primes = [10**7 + 19, 10**7 + 79, 10**7 + 103]
    hyper = primes[0] * primes[1] * primes[2]
    got = _kernels.union_count(primes, hyper)
    expect = (primes[1] * primes[2] + primes[0] * primes[2]
              + primes[0] * primes[1]
              - primes[0] - primes[1] - primes[2] + 1)
    assert got == expect


def test_env_var_forces_pure_lane():
    code = (
        "from jrp_forge import _kernels;"
        "print(_kernels.backend());"
        "print(_kernels.union_count([2, 3], 6))"
    )
    proc = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True,
        env={"JRP_FORGE_KERNEL": "pure", "PATH": "/usr/bin:/bin"},
    )
    assert proc.returncode == 0, proc.stderr
    lane, value = proc.stdout.split()
    assert lane == "pure"
    assert value == "4"


def test_compiled_lane_is_active_here():
    # the build installs the extension; this suite exercises the fast lane
    assert _kernels.backend() == "fast"
