"""Pure-Python kernels; exact for arbitrary-precision integers."""
from __future__ import annotations

from math import gcd


def union_count(periods, hyper):
    """Inclusion-exclusion count of the union of multiples in (0, hyper].

    Subset sum with a saturation prune: once a partial lcm reaches the
    hyperperiod, the branch's remaining terms telescope to zero unless the
    subset cannot be extended further.
    """
    ps = list(periods)
    n = len(ps)

    def branch(idx: int, lcm_val, sign: int):
        if lcm_val == hyper and idx != n - 1:
            return 0
        total = sign * (hyper // lcm_val)
        for j in range(idx + 1, n):
            g = gcd(lcm_val, ps[j])
            total += branch(j, lcm_val // g * ps[j], -sign)
        return total

    return sum(branch(j, ps[j], 1) for j in range(n))


def epoch_count(periods, hyper):
    pts: set = set()
    for p in periods:
        pts.update(range(p, hyper + 1, p))
    return len(pts)
