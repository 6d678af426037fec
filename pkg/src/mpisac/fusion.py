"""Hard-decision fusion accuracy for a set of voting radars.

Each radar votes on the binary target state: under a normal state radar
i errs (votes abnormal) with probability P[i], under an abnormal state
it errs with probability Q[i]. The center declares abnormal when at
least n of the N votes say so, and both states are equally likely, so

    accuracy(n) = 1/2 Pr[#abnormal votes <= n-1 | normal]
                + 1/2 Pr[#normal votes <= N-n | abnormal].

Both tails are Poisson-binomial and exact_accuracy evaluates them with
the O(N^2) counting recursion. binomial_accuracy replaces each profile
by its mean rate, which decouples the radars and admits the closed-form
threshold rule in optimal_threshold; gap_bound bounds the price of that
replacement by the profile dispersion. brute_force_accuracy enumerates
all 2^N vote patterns and exists purely as an independent check.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import DegenerateRates, InvalidThreshold, TooLargeForEnumeration
from .scenario import ErrorProfile

BRUTE_FORCE_LIMIT = 16


def _check_threshold(profile: ErrorProfile, n: int) -> int:
    N = len(profile.P)
    if len(profile.Q) != N:
        raise DegenerateRates("profile P and Q lengths differ")
    if N < 1:
        raise InvalidThreshold("empty profile has no valid threshold")
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise InvalidThreshold(f"threshold must be an integer, got {n!r}")
    if not 1 <= n <= N:
        raise InvalidThreshold(f"threshold {n} outside 1..{N}")
    return int(n)


def exact_accuracy(profile: ErrorProfile, n: int) -> float:
    """Fused accuracy at vote threshold n for heterogeneous rates."""
    n = _check_threshold(profile, n)
    N = len(profile.P)
    P = np.ascontiguousarray(profile.P, dtype=np.float64)
    Q = np.ascontiguousarray(profile.Q, dtype=np.float64)
    return 0.5 * kernels.pb_tail_le(P, n - 1) + 0.5 * kernels.pb_tail_le(Q, N - n)


def brute_force_accuracy(profile: ErrorProfile, n: int) -> float:
    """Same quantity by enumerating every vote pattern. Oracle only."""
    n = _check_threshold(profile, n)
    N = len(profile.P)
    if N > BRUTE_FORCE_LIMIT:
        raise TooLargeForEnumeration(
            f"2^{N} vote patterns exceed the enumeration guard ({BRUTE_FORCE_LIMIT})")
    P = np.asarray(profile.P, dtype=np.float64)
    Q = np.asarray(profile.Q, dtype=np.float64)
    votes = (np.arange(2 ** N)[:, None] >> np.arange(N)) & 1
    counts = votes.sum(axis=1)
    pr_normal = np.prod(np.where(votes == 1, P, 1.0 - P), axis=1)
    pr_abnormal = np.prod(np.where(votes == 0, Q, 1.0 - Q), axis=1)
    return 0.5 * float(pr_normal[counts <= n - 1].sum()) \
        + 0.5 * float(pr_abnormal[counts >= n].sum())


def _means(profile: ErrorProfile) -> tuple[float, float]:
    N = len(profile.P)
    if N < 1 or len(profile.Q) != N:
        raise InvalidThreshold("profile must hold at least one rate pair")
    return math.fsum(profile.P) / N, math.fsum(profile.Q) / N


def binomial_accuracy(profile: ErrorProfile, n: int) -> float:
    """Accuracy after replacing each rate list by its mean."""
    n = _check_threshold(profile, n)
    N = len(profile.P)
    p_bar, q_bar = _means(profile)
    return 0.5 * kernels.binom_tail_le(N, p_bar, n - 1) \
        + 0.5 * kernels.binom_tail_le(N, q_bar, N - n)


def optimal_threshold(profile: ErrorProfile) -> int:
    """Closed-form maximizer of binomial_accuracy over n.

    Requires mean rates strictly inside (0, 1) and better-than-chance
    voting (P + Q < 1); at the boundary the defining logarithms lose
    their sign and there is no usable rule.
    """
    N = len(profile.P)
    p_bar, q_bar = _means(profile)
    if not (0.0 < p_bar < 1.0 and 0.0 < q_bar < 1.0):
        raise DegenerateRates(f"mean rates ({p_bar}, {q_bar}) must be inside (0, 1)")
    if p_bar >= 1.0 - q_bar or q_bar >= 1.0 - p_bar:
        raise DegenerateRates(
            f"mean rates ({p_bar}, {q_bar}) are not better than chance")
    alpha = math.log(p_bar / (1.0 - q_bar)) / math.log(q_bar / (1.0 - p_bar))
    n = min(N, math.ceil(N / (1.0 + alpha)))
    return max(1, n)


def best_exact_threshold(profile: ErrorProfile) -> int:
    """argmax of exact_accuracy over 1..N; smallest n on ties."""
    N = len(profile.P)
    if N < 1:
        raise InvalidThreshold("empty profile has no valid threshold")
    best_n, best_v = 1, -math.inf
    for n in range(1, N + 1):
        v = exact_accuracy(profile, n)
        if v > best_v:
            best_n, best_v = n, v
    return best_n


def _dispersion(rates) -> float:
    N = len(rates)
    m = math.fsum(rates) / N
    if not 0.0 < m < 1.0:
        raise DegenerateRates(f"mean rate {m} must be inside (0, 1)")
    top = 1.0 - m ** (N + 1) - (1.0 - m) ** (N + 1)
    coef = N * top / ((N + 1) * m * (1.0 - m))
    return coef * math.fsum((r - m) ** 2 for r in rates)


def gap_bound(profile: ErrorProfile) -> float:
    """Bound on 1/2 sum_n |exact - binomial| from the rate dispersions."""
    if len(profile.P) < 1 or len(profile.Q) != len(profile.P):
        raise InvalidThreshold("profile must hold at least one rate pair")
    return _dispersion(profile.P) + _dispersion(profile.Q)


def restrict(profile: ErrorProfile, members) -> ErrorProfile:
    """Sub-profile over the given radar indices, kept in sorted order."""
    idx = sorted(set(int(i) for i in members))
    N = len(profile.P)
    for i in idx:
        if not 0 <= i < N:
            raise InvalidThreshold(f"member index {i} outside 0..{N - 1}")
    return ErrorProfile(P=tuple(profile.P[i] for i in idx),
                        Q=tuple(profile.Q[i] for i in idx))


def surrogate_accuracy(profile: ErrorProfile, members) -> float:
    """binomial_accuracy of the sub-profile at its own optimal threshold.

    An empty selection senses nothing; a fifty-fifty guess scores 1/2.
    """
    idx = tuple(members)
    if len(idx) == 0:
        return 0.5
    sub = restrict(profile, idx)
    return binomial_accuracy(sub, optimal_threshold(sub))
