"""Zero-forcing transmit beams for each radar and mode.

Each radar nulls every channel it would otherwise leak into: a sensing
radar keeps only its target echo, a communication radar keeps only its
receiver path. The nulling matrix depends on the radar index and its
own mode alone, never on the other radars' modes, so the two beams per
radar can be precomputed once per channel set (see mode_table).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .errors import InvalidScenario, RankDeficientChannels, ZeroEffectiveChannel

COND_LIMIT = 1e10


def zf_matrix(i: int, x_i: int, ch: ChannelSet) -> np.ndarray:
    """Rows are the conjugated channels radar i must control.

    Sensing (x_i = 1): the echo g_i first, then the K cross/receiver
    channels with the receiver path f_i in slot i; shape (K+1, M). The
    beam reproduces row 0. Communication (x_i = 0): only the K-row
    block; the beam reproduces row i (the receiver path).
    """
    K = ch.K
    rows = []
    if x_i:
        rows.append(ch.g[i])
    for j in range(K):
        rows.append(ch.f[i] if j == i else ch.h[i, j])
    return np.conj(np.stack(rows))


def zf_beamformer(i: int, x_i: int, ch: ChannelSet) -> np.ndarray:
    """Unit-norm minimum-norm beam w with zf_matrix(i, x_i) @ w = e_row.

    Computed from the SVD rather than the literal Gram inverse; raises
    RankDeficientChannels when the row condition number exceeds
    COND_LIMIT and ZeroEffectiveChannel when nothing remains after
    nulling.
    """
    A = zf_matrix(i, x_i, ch)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s[-1] <= 0.0 or s[0] > COND_LIMIT * s[-1]:
        raise RankDeficientChannels(
            f"radar {i} mode {x_i}: channel rows nearly dependent "
            f"(condition {s[0] / s[-1] if s[-1] > 0 else math.inf:.3e})")
    row = 0 if x_i else i
    w = Vh.conj().T @ (np.conj(U[row]) / s)
    norm = np.linalg.norm(w)
    if not norm > 0.0:
        raise ZeroEffectiveChannel(f"radar {i} mode {x_i}: beam vanished")
    return w / norm


def alignment_phase(f_i: np.ndarray, w: np.ndarray) -> float:
    """Phase that rotates f_i^H w onto the non-negative real axis."""
    inner = np.vdot(f_i, w)
    if inner == 0:
        return 0.0
    return float(-np.angle(inner))


@dataclass(frozen=True, eq=False)
class ModeTable:
    """Both candidate beams per radar, with their scalar gains.

    Index [i, m] holds radar i in mode m (0 comm, 1 sensing). a is
    |f_i^H w|, b is |g_i^H w|^2, phase aligns the receiver path for the
    comm mode and is zero for sensing. A beam depends only on its own
    radar's mode, so any selection vector is a pure row pick from here.
    """

    w: np.ndarray      # (K, 2, M) complex
    a: np.ndarray      # (K, 2) float
    b: np.ndarray      # (K, 2) float
    phase: np.ndarray  # (K, 2) float

    def select(self, x) -> "BeamformerSet":
        """Beams for one selection vector, no recomputation."""
        xs = check_selection(x, self.w.shape[0])
        idx = np.arange(len(xs))
        modes = np.asarray(xs)
        return BeamformerSet(
            x=xs,
            w=self.w[idx, modes],
            a=self.a[idx, modes],
            b=self.b[idx, modes],
            phase=self.phase[idx, modes],
        )


def mode_table(ch: ChannelSet) -> ModeTable:
    K, M = ch.K, ch.M
    w = np.empty((K, 2, M), dtype=np.complex128)
    a = np.empty((K, 2))
    b = np.empty((K, 2))
    phase = np.zeros((K, 2))
    for i in range(K):
        for mode in (0, 1):
            wi = zf_beamformer(i, mode, ch)
            w[i, mode] = wi
            a[i, mode] = abs(np.vdot(ch.f[i], wi))
            b[i, mode] = abs(np.vdot(ch.g[i], wi)) ** 2
            if mode == 0:
                phase[i, mode] = alignment_phase(ch.f[i], wi)
    return ModeTable(w=w, a=a, b=b, phase=phase)


@dataclass(frozen=True, eq=False)
class BeamformerSet:
    """Per-radar unit beams and gains for one selection vector."""

    x: tuple[int, ...]
    w: np.ndarray      # (K, M) complex, unit rows
    a: np.ndarray      # (K,) |f_i^H w_i|
    b: np.ndarray      # (K,) |g_i^H w_i|^2
    phase: np.ndarray  # (K,) comm alignment phase, 0 for sensing


def check_selection(x, K: int) -> tuple[int, ...]:
    """Normalize a selection vector, rejecting anything non-binary."""
    xs = tuple(x)
    if len(xs) != K:
        raise InvalidScenario(f"x: expected length {K}, got {len(xs)}")
    for i, v in enumerate(xs):
        if v not in (0, 1):
            raise InvalidScenario(f"x[{i}]: expected 0 or 1, got {v!r}")
    return tuple(int(v) for v in xs)


def build_beamformers(x, ch: ChannelSet, table: ModeTable | None = None) -> BeamformerSet:
    """Assemble the beams for selection x, reusing a ModeTable when given."""
    if table is None:
        table = mode_table(ch)
    return table.select(x)


def scale_beamformers(beams: BeamformerSet, p) -> np.ndarray:
    """Full transmit vectors sqrt(p_i) e^{j phase_i} w_i, shape (K, M)."""
    pv = np.asarray(p, dtype=np.float64)
    if pv.shape != (len(beams.x),):
        raise InvalidScenario(
            f"p: expected {len(beams.x)} powers, got shape {pv.shape}")
    if np.any(pv < 0):
        raise InvalidScenario("p: powers must be non-negative")
    amp = np.sqrt(pv) * np.exp(1j * beams.phase)
    return beams.w * amp[:, None]
