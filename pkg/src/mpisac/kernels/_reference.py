"""Pure Python kernels: the reference the compiled module must match.

These are the scalar inner loops that dominate candidate evaluation in
the optimizer: vote-count tail probabilities and the water-filling
bisection. The compiled twin in _native.pyx keeps the exact same
operation order so both backends produce bit-identical doubles; any
change here must be mirrored there.

Inputs are assumed validated by the callers (fusion, power). Kernels do
no error handling beyond trivial range clamps.
"""

from math import sqrt


def pb_tail_le(probs, k):
    """Pr[X <= k] where X counts successes over independent Bernoulli trials.

    probs holds the per-trial success probabilities. O(N*k) dynamic
    program over the running count; states above k never feed back, so
    the table is truncated at k+1 entries.
    """
    n = len(probs)
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    dp = [0.0] * (k + 1)
    dp[0] = 1.0
    for idx in range(n):
        p = float(probs[idx])
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


def binom_tail_le(n, p, k):
    """Pr[X <= k] for X ~ Binomial(n, p).

    Iterative term recurrence instead of explicit binomial coefficients,
    which keeps intermediate values bounded for n well beyond 60.
    """
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    p = float(p)
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    q = 1.0 - p
    t = 1.0
    for _ in range(n):
        t *= q
    s = t
    r = p / q
    for l in range(k):
        t = t * ((n - l) / (l + 1.0)) * r
        s += t
    return s


def waterfill(a, budget, cap, out):
    """Maximize sum(a_i * sqrt(p_i)) under sum(p) <= budget, 0 <= p_i <= cap.

    Writes the allocation into out and returns the multiplier of the sum
    constraint. Closed form per entry at fixed multiplier lam:
    p_i = min(cap, (a_i / (2 lam))^2), decreasing in lam, so lam is found
    by bisection. The upper bracket is chosen so its allocation already
    fits the budget, which keeps the returned point feasible.
    """
    n = len(a)
    if n == 0:
        return 0.0
    if budget <= 0.0:
        for i in range(n):
            out[i] = 0.0
        return 0.0
    amax = 0.0
    for i in range(n):
        v = float(a[i])
        if v > amax:
            amax = v
    if amax <= 0.0:
        for i in range(n):
            out[i] = 0.0
        return 0.0
    total_cap = 0.0
    for i in range(n):
        if float(a[i]) > 0.0:
            total_cap += cap
    if total_cap <= budget:
        for i in range(n):
            out[i] = cap if float(a[i]) > 0.0 else 0.0
        return 0.0
    # bracket invariant: the allocation at hi fits the budget, at lo it does not
    lo = 0.0
    hi = 0.5 * amax * sqrt(n / budget)
    for _ in range(200):
        if hi - lo < 1e-12:
            break
        mid = 0.5 * (lo + hi)
        s = 0.0
        for i in range(n):
            t = float(a[i]) / (2.0 * mid)
            pi = t * t
            s += cap if pi > cap else pi
        if s > budget:
            lo = mid
        else:
            hi = mid
    for i in range(n):
        t = float(a[i]) / (2.0 * hi)
        pi = t * t
        out[i] = cap if pi > cap else pi
    return hi
