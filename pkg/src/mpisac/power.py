"""Power allocation for a fixed selection vector.

With beams fixed, the selection problem reduces to: every sensing radar
must clear its SINR requirement, every communication radar contributes
a_i sqrt(p_i) to the coherently combined receive amplitude, and the
network shares one power budget. The objective never benefits from
raising a sensing power above its minimum, so sensing powers are pinned
at sigma2 * gamma / b_i and the remaining budget is water-filled over
the communication radars (kernels.waterfill).

grid_oracle solves the same instance by exhaustive evaluation: all but
the last communication power on a uniform grid, the last closed in
closed form since the objective is increasing in it. It shares no
machinery with the solver and exists as its check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import Infeasible, InvalidScenario, OracleTooLarge, UnreachableTarget


@dataclass(frozen=True)
class P4Instance:
    """One allocation problem: selection, scalar gains, and budgets."""

    x: tuple[int, ...]
    a: tuple[float, ...]   # |f_i^H w_i| receive amplitudes
    b: tuple[float, ...]   # |g_i^H w_i|^2 echo power gains
    P_T: float
    P_sum: float
    sigma2: float
    gamma: float


@dataclass(frozen=True)
class P4Solution:
    p: tuple[float, ...]
    objective: float       # sum of a_i sqrt(p_i) over communication radars
    lam: float             # multiplier of the sum-power constraint
    min_powers: tuple[float, ...]


def _check_instance(inst: P4Instance) -> int:
    K = len(inst.x)
    if len(inst.a) != K or len(inst.b) != K:
        raise InvalidScenario(f"instance arrays disagree on K={K}")
    for i, v in enumerate(inst.x):
        if v not in (0, 1):
            raise InvalidScenario(f"x[{i}]: expected 0 or 1, got {v!r}")
    return K


def min_sensing_powers(inst: P4Instance) -> tuple[float, ...]:
    """Per-radar minimum power: sigma2 gamma / b_i when sensing, else 0."""
    K = _check_instance(inst)
    out = []
    for i in range(K):
        if inst.x[i]:
            if not inst.b[i] > 0.0:
                raise UnreachableTarget(
                    f"radar {i} senses but its echo gain is {inst.b[i]}")
            out.append(inst.sigma2 * inst.gamma / inst.b[i])
        else:
            out.append(0.0)
    return tuple(out)


def _feasible_or_raise(inst: P4Instance, pmin) -> float:
    for i, pm in enumerate(pmin):
        if pm > inst.P_T:
            raise Infeasible(
                f"radar {i} needs {pm:.6g} W to sense, cap is {inst.P_T:.6g} W")
    total = 0.0
    for pm in pmin:
        total += pm
    if total > inst.P_sum:
        raise Infeasible(
            f"sensing minimums sum to {total:.6g} W, budget is {inst.P_sum:.6g} W")
    return inst.P_sum - total


def solve_p4(inst: P4Instance) -> P4Solution:
    """Optimal allocation, or Infeasible when the minimums cannot be met."""
    pmin = min_sensing_powers(inst)
    budget = _feasible_or_raise(inst, pmin)
    comm = [i for i, xi in enumerate(inst.x) if not xi]
    acomm = np.ascontiguousarray([inst.a[i] for i in comm], dtype=np.float64)
    alloc = np.zeros(len(comm))
    lam = kernels.waterfill(acomm, budget, inst.P_T, alloc)
    p = list(pmin)
    objective = 0.0
    for k, i in enumerate(comm):
        p[i] = float(alloc[k])
        objective += inst.a[i] * math.sqrt(p[i])
    return P4Solution(p=tuple(p), objective=objective, lam=lam, min_powers=pmin)


ORACLE_MAX_COMM = 3
ORACLE_MAX_CELLS = 50_000_000


def grid_oracle(inst: P4Instance, step: float) -> P4Solution:
    """Exhaustive check of solve_p4 at grid resolution `step`.

    The objective is within O(step) of the optimum. Feasibility
    decisions match solve_p4 exactly (same checks, same order).
    """
    if not step > 0.0:
        raise InvalidScenario(f"step must be positive, got {step}")
    pmin = min_sensing_powers(inst)
    budget = _feasible_or_raise(inst, pmin)
    comm = [i for i, xi in enumerate(inst.x) if not xi]
    ncomm = len(comm)
    if ncomm > ORACLE_MAX_COMM:
        raise OracleTooLarge(
            f"{ncomm} communication radars exceed the oracle limit {ORACLE_MAX_COMM}")

    p = list(pmin)
    cap = min(inst.P_T, budget)
    if ncomm == 0:
        return P4Solution(p=tuple(p), objective=0.0, lam=math.nan, min_powers=pmin)

    a = [inst.a[i] for i in comm]
    # last power is free: the objective increases in it, so it takes
    # whatever budget remains, up to the cap
    if ncomm == 1:
        p[comm[0]] = cap
        return P4Solution(p=tuple(p), objective=a[0] * math.sqrt(cap),
                          lam=math.nan, min_powers=pmin)

    nsteps = int(math.ceil(cap / step)) if cap > 0.0 else 0
    if (nsteps + 1) ** (ncomm - 1) > ORACLE_MAX_CELLS:
        raise OracleTooLarge(
            f"{(nsteps + 1) ** (ncomm - 1)} grid cells exceed {ORACLE_MAX_CELLS}")
    axis = np.linspace(0.0, cap, nsteps + 1)

    if ncomm == 2:
        g0 = axis
        rest = np.minimum(inst.P_T, budget - g0)
        vals = a[0] * np.sqrt(g0) + a[1] * np.sqrt(rest)
        k = int(np.argmax(vals))
        best = (float(g0[k]), float(np.minimum(inst.P_T, budget - g0[k])))
    else:
        g0, g1 = np.meshgrid(axis, axis, indexing="ij")
        head = g0 + g1
        rest = np.minimum(inst.P_T, budget - head)
        vals = np.where(head <= budget,
                        a[0] * np.sqrt(g0) + a[1] * np.sqrt(g1)
                        + a[2] * np.sqrt(np.maximum(rest, 0.0)),
                        -np.inf)
        k0, k1 = np.unravel_index(int(np.argmax(vals)), vals.shape)
        last = min(inst.P_T, budget - float(axis[k0]) - float(axis[k1]))
        best = (float(axis[k0]), float(axis[k1]), last)

    objective = 0.0
    for k, i in enumerate(comm):
        p[i] = best[k]
        objective += inst.a[i] * math.sqrt(p[i])
    return P4Solution(p=tuple(p), objective=objective, lam=math.nan,
                      min_powers=pmin)
