# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _reference.py.

Operation order matches the pure Python kernels line for line, and the
build disables FP contraction, so both backends round identically.
Keep the two files in lockstep.
"""

from libc.math cimport sqrt
from libc.stdlib cimport free, malloc


cpdef double pb_tail_le(double[::1] probs, Py_ssize_t k):
    """Pr[X <= k] for a sum of independent Bernoulli trials."""
    cdef Py_ssize_t n = probs.shape[0]
    cdef Py_ssize_t idx, j, jmax
    cdef double p, q, s
    cdef double* dp
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    dp = <double*> malloc((k + 1) * sizeof(double))
    if dp == NULL:
        raise MemoryError()
    try:
        for j in range(k + 1):
            dp[j] = 0.0
        dp[0] = 1.0
        for idx in range(n):
            p = probs[idx]
            q = 1.0 - p
            jmax = idx + 1
            if jmax > k:
                jmax = k
            for j in range(jmax, 0, -1):
                dp[j] = dp[j] * q + dp[j - 1] * p
            dp[0] = dp[0] * q
        s = 0.0
        for j in range(k + 1):
            s += dp[j]
        return s
    finally:
        free(dp)


cpdef double binom_tail_le(Py_ssize_t n, double p, Py_ssize_t k):
    """Pr[X <= k] for X ~ Binomial(n, p), via the term recurrence."""
    cdef Py_ssize_t i, l
    cdef double q, t, s, r
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    q = 1.0 - p
    t = 1.0
    for i in range(n):
        t *= q
    s = t
    r = p / q
    for l in range(k):
        t = t * ((<double>(n - l)) / (<double>(l + 1))) * r
        s += t
    return s


cpdef double waterfill(double[::1] a, double budget, double cap, double[::1] out):
    """Fill out with argmax of sum(a_i sqrt(p_i)); return the multiplier."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, it
    cdef double amax, v, total_cap, lo, hi, mid, s, t, pi
    if n == 0:
        return 0.0
    if budget <= 0.0:
        for i in range(n):
            out[i] = 0.0
        return 0.0
    amax = 0.0
    for i in range(n):
        v = a[i]
        if v > amax:
            amax = v
    if amax <= 0.0:
        for i in range(n):
            out[i] = 0.0
        return 0.0
    total_cap = 0.0
    for i in range(n):
        if a[i] > 0.0:
            total_cap += cap
    if total_cap <= budget:
        for i in range(n):
            out[i] = cap if a[i] > 0.0 else 0.0
        return 0.0
    # bracket invariant: the allocation at hi fits the budget, at lo it does not
    lo = 0.0
    hi = 0.5 * amax * sqrt((<double>n) / budget)
    for it in range(200):
        if hi - lo < 1e-12:
            break
        mid = 0.5 * (lo + hi)
        s = 0.0
        for i in range(n):
            t = a[i] / (2.0 * mid)
            pi = t * t
            s += cap if pi > cap else pi
        if s > budget:
            lo = mid
        else:
            hi = mid
    for i in range(n):
        t = a[i] / (2.0 * hi)
        pi = t * t
        out[i] = cap if pi > cap else pi
    return hi
