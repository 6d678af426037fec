"""Search over the binary sensing/communication assignment.

The score of a selection x blends the fused detection accuracy of the
sensing radars with the receiver rate of the communicating ones:

    score = (1 - mu) * accuracy + mu * rate,

where accuracy is the mean-rate surrogate at its closed-form threshold
(fusion.surrogate_accuracy) and the powers come from solve_p4. Selections
whose sensing minimums do not fit the budget are infeasible and are
never returned.

hmo_solve is a randomized ascent: start from a single sensing radar,
repeatedly draw a candidate a few flips away, keep it when its score is
at least the incumbent's, stop after max_iter accepted moves or when
max_regen consecutive draws fail. exhaustive_solve enumerates all 2^K
selections and is the reference the search is measured against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import beamform, fusion, metrics, power
from .channel import ChannelSet, synthesize_channels
from .errors import Infeasible, NoFeasibleSelection, TooLargeForEnumeration, UnreachableTarget
from .scenario import Scenario, validate

EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class HmoConfig:
    """Knobs of the randomized ascent.

    L: largest number of flips in one candidate draw.
    max_iter: accepted moves before stopping.
    max_regen: consecutive rejected draws before giving up an iteration.
    mu: score weight used when hmo_solve is not given one explicitly.
    seed: search randomness; independent of the channel seed.
    """

    L: int = 2
    max_iter: int = 10
    max_regen: int = 50
    mu: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class Solution:
    """One scored operating point; trace holds the score after each move."""

    x: tuple[int, ...]
    p: tuple[float, ...]
    accuracy: float
    rate: float
    objective: float
    mu: float
    trace: tuple[float, ...]


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    return mu


def surrogate_objective(x, p, scenario: Scenario, beams, mu: float) -> float:
    """Score of a fixed (selection, power) pair under weight mu."""
    mu = _check_mu(mu)
    members = tuple(i for i, xi in enumerate(x) if xi)
    acc = fusion.surrogate_accuracy(scenario.errors, members)
    rate = metrics.comm_rate_zf(x, p, beams, scenario.params.sigma2)
    return (1.0 - mu) * acc + mu * rate


def _evaluate(x, scenario: Scenario, table, mu: float) -> Solution:
    """Score one selection; raises Infeasible/UnreachableTarget to reject it."""
    pr = scenario.params
    beams = table.select(x)
    inst = power.P4Instance(
        x=tuple(x), a=tuple(float(v) for v in beams.a),
        b=tuple(float(v) for v in beams.b),
        P_T=pr.P_T, P_sum=pr.P_sum, sigma2=pr.sigma2, gamma=pr.gamma)
    sol = power.solve_p4(inst)
    members = tuple(i for i, xi in enumerate(x) if xi)
    acc = fusion.surrogate_accuracy(scenario.errors, members)
    rate = metrics.comm_rate_zf(x, sol.p, beams, pr.sigma2)
    obj = (1.0 - mu) * acc + mu * rate
    return Solution(x=tuple(x), p=sol.p, accuracy=acc, rate=rate,
                    objective=obj, mu=mu, trace=())


def evaluate_selection(scenario: Scenario, x, mu: float,
                       channels: ChannelSet | None = None,
                       table=None) -> Solution:
    """Score one fixed selection; Infeasible propagates to the caller."""
    mu = _check_mu(mu)
    validate(scenario)
    if table is None:
        ch = channels if channels is not None else synthesize_channels(scenario)
        table = beamform.mode_table(ch)
    return _evaluate(x, scenario, table, mu)


def neighborhood_sample(x, L: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Flip a uniform 1..L sized subset of positions (L clamped to K)."""
    K = len(x)
    if K < 1:
        raise ValueError("cannot sample a neighbor of an empty selection")
    m = int(rng.integers(1, min(L, K) + 1))
    flips = rng.choice(K, size=m, replace=False)
    out = list(x)
    for i in flips:
        out[i] = 1 - out[i]
    return tuple(out)


def _start_point(scenario: Scenario, table, mu: float) -> Solution:
    K = scenario.params.K
    first = (1,) + (0,) * (K - 1)
    try:
        return _evaluate(first, scenario, table, mu)
    except (Infeasible, UnreachableTarget):
        pass
    try:
        return _evaluate((0,) * K, scenario, table, mu)
    except (Infeasible, UnreachableTarget) as exc:
        raise NoFeasibleSelection(
            "neither the single-sensor start nor all-communication is feasible"
        ) from exc


def hmo_solve(scenario: Scenario, mu: float | None = None,
              config: HmoConfig | None = None,
              channels: ChannelSet | None = None) -> Solution:
    """Randomized ascent over selections; deterministic in config.seed."""
    config = config or HmoConfig()
    mu = _check_mu(config.mu if mu is None else mu)
    if config.L < 1 or config.max_iter < 1 or config.max_regen < 1:
        raise ValueError("HmoConfig fields must be at least 1")
    validate(scenario)
    ch = channels if channels is not None else synthesize_channels(scenario)
    table = beamform.mode_table(ch)
    rng = np.random.default_rng(config.seed)

    best = _start_point(scenario, table, mu)
    trace = [best.objective]
    for _ in range(config.max_iter):
        accepted = None
        for _ in range(config.max_regen):
            cand = neighborhood_sample(best.x, config.L, rng)
            try:
                ev = _evaluate(cand, scenario, table, mu)
            except (Infeasible, UnreachableTarget):
                continue
            if ev.objective >= best.objective:
                accepted = ev
                break
        if accepted is None:
            break
        best = accepted
        trace.append(best.objective)
    return Solution(x=best.x, p=best.p, accuracy=best.accuracy, rate=best.rate,
                    objective=best.objective, mu=mu, trace=tuple(trace))


def exhaustive_solve(scenario: Scenario, mu: float,
                     channels: ChannelSet | None = None) -> Solution:
    """True optimum by enumerating all 2^K selections.

    Ties go to the selection with the smaller binary value, where bit i
    of the value is x[i] * 2^i.
    """
    mu = _check_mu(mu)
    validate(scenario)
    K = scenario.params.K
    if K > EXHAUSTIVE_LIMIT:
        raise TooLargeForEnumeration(
            f"2^{K} selections exceed the enumeration guard ({EXHAUSTIVE_LIMIT})")
    ch = channels if channels is not None else synthesize_channels(scenario)
    table = beamform.mode_table(ch)

    best = None
    for value in range(2 ** K):
        x = tuple((value >> i) & 1 for i in range(K))
        try:
            ev = _evaluate(x, scenario, table, mu)
        except (Infeasible, UnreachableTarget):
            continue
        if best is None or ev.objective > best.objective:
            best = ev
    if best is None:
        raise NoFeasibleSelection("no selection admits a feasible allocation")
    return Solution(x=best.x, p=best.p, accuracy=best.accuracy, rate=best.rate,
                    objective=best.objective, mu=mu, trace=(best.objective,))
