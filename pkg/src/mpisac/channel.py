"""Line-of-sight channel synthesis from scenario geometry.

Every radar carries a horizontal uniform linear array with half
wavelength spacing, so the array response to a direction depends only
on sin(azimuth) * cos(elevation). Azimuth is measured in each radar's
own frame with boresight toward the horizontal room center: arrays face
the room they observe, which keeps the response directions of distinct
nodes spread apart. Channels are deterministic in the geometry except
for the reflection phase of the target, which is drawn once per
synthesis from the seeded generator.

Conventions: h[j, i] is the M-vector channel from radar j toward radar
i, expressed at radar j's array (it pairs with radar j's beamformer).
The diagonal h[i, i] is meaningless and filled with NaN so accidental
reads surface immediately. f[i] points from radar i to the receiver,
g[i] from radar i to the target and back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, MalformedScenario
from .scenario import Scenario, SystemParams, Vec3


def path_loss(distance: float, params: SystemParams) -> float:
    """Linear power gain ref_loss * (d / ref_distance) ** -exponent."""
    if not distance > 0.0:
        raise DegenerateGeometry(f"path loss undefined at distance {distance}")
    return params.ref_loss * (distance / params.ref_distance) ** (
        -params.pathloss_exponent)


def steering_vector(azimuth: float, elevation: float, M: int,
                    wavelength: float) -> np.ndarray:
    """Array response exp(j pi m sin(az) cos(el)), m = 0..M-1, norm sqrt(M).

    Element spacing is fixed at wavelength / 2, so the response is
    independent of the wavelength value itself; the parameter is kept
    for signature stability.
    """
    u = math.sin(azimuth) * math.cos(elevation)
    m = np.arange(M)
    return np.exp(1j * math.pi * m * u)


def direction_angles(src: Vec3, dst: Vec3,
                     boresight: float = 0.0) -> tuple[float, float]:
    """(azimuth, elevation) of dst as seen from src.

    Azimuth is relative to the given boresight heading (radians in the
    horizontal plane); elevation is the angle above the horizontal.
    """
    dx = dst[0] - src[0]
    dy = dst[1] - src[1]
    dz = dst[2] - src[2]
    horiz = math.hypot(dx, dy)
    if horiz == 0.0 and dz == 0.0:
        raise DegenerateGeometry(f"no direction from {src} to {dst}")
    return math.atan2(dy, dx) - boresight, math.atan2(dz, horiz)


def boresight_heading(pos: Vec3, room_bounds: tuple[Vec3, Vec3]) -> float:
    """Heading from pos toward the horizontal room center.

    A radar exactly at the center has no preferred facing; heading 0 is
    used there.
    """
    lo, hi = room_bounds
    cx = 0.5 * (lo[0] + hi[0])
    cy = 0.5 * (lo[1] + hi[1])
    dx, dy = cx - pos[0], cy - pos[1]
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return math.atan2(dy, dx)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """All synthesized channels for one scenario realization.

    h: (K, K, M) complex, NaN on the diagonal.
    f: (K, M) complex, radar to receiver.
    g: (K, M) complex, two-hop radar-target-radar echo.
    """

    h: np.ndarray
    f: np.ndarray
    g: np.ndarray

    @property
    def K(self) -> int:
        return self.f.shape[0]

    @property
    def M(self) -> int:
        return self.f.shape[1]


def _los_vector(src: Vec3, dst: Vec3, params: SystemParams,
                boresight: float) -> np.ndarray:
    az, el = direction_angles(src, dst, boresight)
    amp = math.sqrt(path_loss(math.dist(src, dst), params))
    return amp * steering_vector(az, el, params.M, params.wavelength)


def synthesize_channels(scenario: Scenario, rng=None) -> ChannelSet:
    """Build the ChannelSet; rng defaults to a generator seeded by the scenario.

    The only random quantity is the target reflection phase, drawn once.
    Same (scenario, seed) always yields an identical ChannelSet.
    """
    if rng is None:
        rng = np.random.default_rng(scenario.seed)
    pr = scenario.params
    ge = scenario.geometry
    K, M = pr.K, pr.M

    psi = rng.uniform(0.0, 2.0 * math.pi)
    rho = pr.echo_gain * complex(math.cos(psi), math.sin(psi))

    h = np.full((K, K, M), np.nan + 1j * np.nan, dtype=np.complex128)
    f = np.empty((K, M), dtype=np.complex128)
    g = np.empty((K, M), dtype=np.complex128)
    for j in range(K):
        pos = ge.dfr_positions[j]
        heading = boresight_heading(pos, ge.room_bounds)
        for i in range(K):
            if i != j:
                h[j, i] = _los_vector(pos, ge.dfr_positions[i], pr, heading)
        f[j] = _los_vector(pos, ge.receiver_position, pr, heading)
        az, el = direction_angles(pos, ge.target_position, heading)
        two_hop = path_loss(math.dist(pos, ge.target_position), pr)
        g[j] = rho * two_hop * steering_vector(az, el, M, pr.wavelength)
    return ChannelSet(h=h, f=f, g=g)


def _encode(vec: np.ndarray) -> dict:
    return {"re": vec.real.tolist(), "im": vec.imag.tolist()}


def _decode(obj: dict, M: int, where: str) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedScenario(f"{where}: bad vector encoding") from exc
    if re.shape != (M,) or im.shape != (M,):
        raise MalformedScenario(f"{where}: expected length {M}")
    return re + 1j * im


def save_channels(channels: ChannelSet, path) -> None:
    """JSON dump for regression fixtures; the unused h diagonal is omitted."""
    K = channels.K
    data = {
        "K": K,
        "M": channels.M,
        "h": [[None if i == j else _encode(channels.h[j, i]) for i in range(K)]
              for j in range(K)],
        "f": [_encode(channels.f[j]) for j in range(K)],
        "g": [_encode(channels.g[j]) for j in range(K)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
        fh.write("\n")


def load_channels(path) -> ChannelSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedScenario(f"cannot read channel dump {path}: {exc}") from exc
    try:
        K, M = int(data["K"]), int(data["M"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedScenario(f"channel dump {path}: missing K/M") from exc
    h = np.full((K, K, M), np.nan + 1j * np.nan, dtype=np.complex128)
    f = np.empty((K, M), dtype=np.complex128)
    g = np.empty((K, M), dtype=np.complex128)
    for j in range(K):
        for i in range(K):
            if i != j:
                h[j, i] = _decode(data["h"][j][i], M, f"h[{j}][{i}]")
        f[j] = _decode(data["f"][j], M, f"f[{j}]")
        g[j] = _decode(data["g"][j], M, f"g[{j}]")
    return ChannelSet(h=h, f=f, g=g)
