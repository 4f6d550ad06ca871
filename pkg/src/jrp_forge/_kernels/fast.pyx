# cython: boundscheck=False, wraparound=False, cdivision=True
"""64-bit counting kernels. Callers guarantee every period divides the
hyperperiod and the hyperperiod fits in int64, so no lcm here can overflow
(every partial lcm divides the hyperperiod)."""

from libc.stdlib cimport malloc, free, qsort


cdef long long _gcd(long long a, long long b) noexcept nogil:
    cdef long long t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef long long _branch(long long* ps, int n, int idx, long long lcm_val,
                       long long hyper, int sign) noexcept nogil:
    # Sum of signed IE terms for the subset ending at idx plus all of its
    # extensions. Saturated branches (lcm == hyper) telescope to zero.
    if lcm_val == hyper and idx != n - 1:
        return 0
    cdef long long total = sign * (hyper // lcm_val)
    cdef int j
    cdef long long g
    for j in range(idx + 1, n):
        g = _gcd(lcm_val, ps[j])
        total += _branch(ps, n, j, lcm_val // g * ps[j], hyper, -sign)
    return total


def union_count(periods, hyper):
    cdef int n = len(periods)
    if n == 0:
        return 0
    cdef long long H = hyper
    cdef long long* ps = <long long*> malloc(n * sizeof(long long))
    if ps == NULL:
        raise MemoryError()
    cdef int i
    for i in range(n):
        ps[i] = periods[i]
    cdef long long total = 0
    with nogil:
        for i in range(n):
            total += _branch(ps, n, i, ps[i], H, 1)
    free(ps)
    return total


cdef int _cmp_ll(const void* a, const void* b) noexcept nogil:
    cdef long long x = (<const long long*> a)[0]
    cdef long long y = (<const long long*> b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def epoch_count(periods, hyper):
    cdef long long H = hyper
    cdef long long m = 0
    cdef long long p
    for p in periods:
        m += H // p
    if m == 0:
        return 0
    cdef long long* buf = <long long*> malloc(m * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    cdef long long k = 0
    cdef long long v
    for p in periods:
        v = p
        while v <= H:
            buf[k] = v
            k += 1
            v += p
    cdef long long distinct = 0
    cdef long long i
    with nogil:
        qsort(buf, m, sizeof(long long), _cmp_ll)
        distinct = 1
        for i in range(1, m):
            if buf[i] != buf[i - 1]:
                distinct += 1
    free(buf)
    return distinct
