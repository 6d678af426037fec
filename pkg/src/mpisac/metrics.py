"""Exact link metrics evaluated directly from channels and beams.

These evaluators take the full transmit vectors (power and phase
already applied) and make no zero-forcing assumptions; they are the
ground truth the simplified expressions are checked against. Comm
signals from different radars add coherently at the receiver, so a
stray phase shows up as a rate loss here even though the simplified
rate would not see it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamform import BeamformerSet, check_selection
from .channel import ChannelSet
from .scenario import SystemParams


def sensing_sinr_exact(i: int, x, w: np.ndarray, ch: ChannelSet,
                       sigma2: float) -> float:
    """Echo power of radar i over noise plus all cross-radar leakage.

    Communication radars leak coherently (their sum is squared), sensing
    radars add leakage power. Returns 0 when radar i is not sensing.
    """
    xs = check_selection(x, ch.K)
    if not xs[i]:
        return 0.0
    num = abs(np.vdot(ch.g[i], w[i])) ** 2
    den = sigma2
    coherent = 0.0 + 0.0j
    for j in range(ch.K):
        if j == i:
            continue
        leak = np.vdot(ch.h[j, i], w[j])
        if xs[j]:
            den += abs(leak) ** 2
        else:
            coherent += leak
    den += abs(coherent) ** 2
    return float(num / den)


def comm_sinr_exact(x, w: np.ndarray, ch: ChannelSet, sigma2: float) -> float:
    """Coherent received comm power over noise plus sensing leakage."""
    xs = check_selection(x, ch.K)
    signal = 0.0 + 0.0j
    den = sigma2
    for i in range(ch.K):
        inner = np.vdot(ch.f[i], w[i])
        if xs[i]:
            den += abs(inner) ** 2
        else:
            signal += inner
    return float(abs(signal) ** 2 / den)


def comm_rate_exact(x, w: np.ndarray, ch: ChannelSet, sigma2: float) -> float:
    return math.log2(1.0 + comm_sinr_exact(x, w, ch, sigma2))


def comm_rate_zf(x, p, beams: BeamformerSet, sigma2: float) -> float:
    """Rate when nulling is assumed ideal: amplitudes a_i sqrt(p_i) add.

    Matches comm_rate_exact under the package's own beams to rounding
    error; the two are kept separate so that claim stays checkable.
    """
    xs = check_selection(x, len(beams.x))
    amp = 0.0
    for i, xi in enumerate(xs):
        if not xi:
            amp += float(beams.a[i]) * math.sqrt(float(p[i]))
    return math.log2(1.0 + amp * amp / sigma2)


# Relative slack when comparing a SINR against the requirement: power
# pinned exactly at the minimum lands one rounding step either side.
SINR_TOL = 1e-9


def effective_set(x, sinrs, gamma: float) -> tuple[int, ...]:
    """Sensing radars whose SINR meets the requirement."""
    xs = tuple(x)
    return tuple(i for i, xi in enumerate(xs)
                 if xi and sinrs[i] >= gamma * (1.0 - SINR_TOL))


@dataclass(frozen=True)
class LinkReport:
    """Everything measurable about one (selection, power) operating point."""

    x: tuple[int, ...]
    sensing_sinr: tuple[float, ...]
    effective: tuple[int, ...]
    comm_sinr: float
    comm_rate: float


def link_report(x, w: np.ndarray, ch: ChannelSet, params: SystemParams) -> LinkReport:
    xs = check_selection(x, ch.K)
    sinrs = tuple(sensing_sinr_exact(i, xs, w, ch, params.sigma2)
                  for i in range(ch.K))
    csinr = comm_sinr_exact(xs, w, ch, params.sigma2)
    return LinkReport(
        x=xs,
        sensing_sinr=sinrs,
        effective=effective_set(xs, sinrs, params.gamma),
        comm_sinr=csinr,
        comm_rate=math.log2(1.0 + csinr),
    )
