"""Scenario definition, validation, and file round-trip.

A scenario is the full immutable description of one deployment: radio
and power constants, room geometry, and the per-radar detection error
rates used by the fusion stage. Scenario files are TOML with [params],
[geometry] and [errors] sections; a JSON object with the same layout is
accepted interchangeably. Power values may be written as plain watts or
as strings with a unit ("10 mW", "-50 dBm"); ratio values as linear or
"30 dB".
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

try:
    import tomllib as _toml
except ImportError:  # Python 3.10
    import tomli as _toml

from .errors import InvalidScenario, MalformedScenario

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class SystemParams:
    """Radio and budget constants shared by every link."""

    K: int
    M: int
    P_T: float          # per-radar power cap, watts
    P_sum: float        # network power budget, watts
    sigma2: float       # receiver noise power, watts
    gamma: float        # sensing SINR requirement, linear
    wavelength: float = 0.0517
    pathloss_exponent: float = 2.0
    ref_distance: float = 1.0
    ref_loss: float = 0.05      # power gain at ref_distance, linear
    echo_gain: float = 1.0      # magnitude of the target reflection


@dataclass(frozen=True)
class Geometry:
    """Positions in meters; room_bounds is (lower corner, upper corner)."""

    room_bounds: tuple[Vec3, Vec3]
    dfr_positions: tuple[Vec3, ...]
    target_position: Vec3
    receiver_position: Vec3


@dataclass(frozen=True)
class ErrorProfile:
    """Per-radar detection error rates.

    P[i] is the chance radar i votes "present" when the target state is
    normal; Q[i] the chance it votes "normal" when the state is abnormal.
    """

    P: tuple[float, ...]
    Q: tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    params: SystemParams
    geometry: Geometry
    errors: ErrorProfile
    seed: int = 0


_NUM_UNIT = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-zµ]*)\s*$")

_POWER_SCALE = {"": 1.0, "w": 1.0, "mw": 1e-3, "uw": 1e-6, "µw": 1e-6}


def _split_unit(value: str, field_name: str) -> tuple[float, str]:
    m = _NUM_UNIT.match(value)
    if m is None:
        raise MalformedScenario(f"{field_name}: cannot parse {value!r}")
    return float(m.group(1)), m.group(2).lower()


def parse_power(value, field_name: str = "power") -> float:
    """Return watts. Accepts numbers (watts) or 'W'/'mW'/'uW'/'dBm' strings."""
    if isinstance(value, bool):
        raise MalformedScenario(f"{field_name}: expected a power, got a bool")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        num, unit = _split_unit(value, field_name)
        if unit == "dbm":
            return 10.0 ** ((num - 30.0) / 10.0)
        try:
            return num * _POWER_SCALE[unit]
        except KeyError:
            raise MalformedScenario(
                f"{field_name}: unknown power unit {unit!r}") from None
    raise MalformedScenario(f"{field_name}: expected a power value")


def parse_ratio(value, field_name: str = "ratio") -> float:
    """Return a linear ratio. Accepts numbers (linear) or 'dB' strings."""
    if isinstance(value, bool):
        raise MalformedScenario(f"{field_name}: expected a ratio, got a bool")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        num, unit = _split_unit(value, field_name)
        if unit == "db":
            return 10.0 ** (num / 10.0)
        if unit == "":
            return num
        raise MalformedScenario(f"{field_name}: unknown ratio unit {unit!r}")
    raise MalformedScenario(f"{field_name}: expected a ratio value")


def _as_int(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedScenario(f"{field_name}: expected an integer")
    return value


def _as_float(value, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedScenario(f"{field_name}: expected a number")
    return float(value)


def _as_vec3(value, field_name: str) -> Vec3:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise MalformedScenario(f"{field_name}: expected [x, y, z]")
    return tuple(_as_float(v, field_name) for v in value)


def _require(section: dict, key: str, section_name: str):
    try:
        return section[key]
    except KeyError:
        raise MalformedScenario(f"missing field {section_name}.{key}") from None


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from the file-level mapping."""
    if not isinstance(data, dict):
        raise MalformedScenario("scenario root must be a mapping")
    for section in ("params", "geometry", "errors"):
        if section not in data or not isinstance(data[section], dict):
            raise MalformedScenario(f"missing section [{section}]")
    pr, ge, er = data["params"], data["geometry"], data["errors"]

    params = SystemParams(
        K=_as_int(_require(pr, "K", "params"), "params.K"),
        M=_as_int(_require(pr, "M", "params"), "params.M"),
        P_T=parse_power(_require(pr, "P_T", "params"), "params.P_T"),
        P_sum=parse_power(_require(pr, "P_sum", "params"), "params.P_sum"),
        sigma2=parse_power(_require(pr, "sigma2", "params"), "params.sigma2"),
        gamma=parse_ratio(_require(pr, "gamma", "params"), "params.gamma"),
        wavelength=_as_float(pr.get("wavelength", 0.0517), "params.wavelength"),
        pathloss_exponent=_as_float(
            pr.get("pathloss_exponent", 2.0), "params.pathloss_exponent"),
        ref_distance=_as_float(pr.get("ref_distance", 1.0), "params.ref_distance"),
        ref_loss=parse_ratio(pr.get("ref_loss", 0.05), "params.ref_loss"),
        echo_gain=_as_float(pr.get("echo_gain", 1.0), "params.echo_gain"),
    )

    bounds = _require(ge, "room_bounds", "geometry")
    if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
        raise MalformedScenario("geometry.room_bounds: expected [lower, upper]")
    dfrs = _require(ge, "dfr_positions", "geometry")
    if not isinstance(dfrs, (list, tuple)):
        raise MalformedScenario("geometry.dfr_positions: expected a list")
    geometry = Geometry(
        room_bounds=(
            _as_vec3(bounds[0], "geometry.room_bounds[0]"),
            _as_vec3(bounds[1], "geometry.room_bounds[1]"),
        ),
        dfr_positions=tuple(
            _as_vec3(p, f"geometry.dfr_positions[{i}]") for i, p in enumerate(dfrs)),
        target_position=_as_vec3(
            _require(ge, "target_position", "geometry"), "geometry.target_position"),
        receiver_position=_as_vec3(
            _require(ge, "receiver_position", "geometry"),
            "geometry.receiver_position"),
    )

    for key in ("P", "Q"):
        if not isinstance(_require(er, key, "errors"), (list, tuple)):
            raise MalformedScenario(f"errors.{key}: expected a list")
    errors = ErrorProfile(
        P=tuple(_as_float(v, f"errors.P[{i}]") for i, v in enumerate(er["P"])),
        Q=tuple(_as_float(v, f"errors.Q[{i}]") for i, v in enumerate(er["Q"])),
    )

    seed = _as_int(data.get("seed", 0), "seed")
    scenario = Scenario(params=params, geometry=geometry, errors=errors, seed=seed)
    validate(scenario)
    return scenario


def _inside(p: Vec3, lo: Vec3, hi: Vec3) -> bool:
    return all(lo[k] <= p[k] <= hi[k] for k in range(3))


def validate(scenario: Scenario) -> None:
    """Raise InvalidScenario naming the first field that breaks an invariant."""
    pr, ge, er = scenario.params, scenario.geometry, scenario.errors

    def bad(field_name: str, why: str):
        raise InvalidScenario(f"{field_name}: {why}")

    if pr.K < 1:
        bad("params.K", "need at least one radar")
    if pr.M < pr.K + 1:
        bad("params.M", f"need M >= K+1 antennas for nulling, got M={pr.M}, K={pr.K}")
    for name in ("P_T", "P_sum", "sigma2", "gamma", "wavelength",
                 "pathloss_exponent", "ref_distance", "ref_loss", "echo_gain"):
        v = getattr(pr, name)
        if not math.isfinite(v):
            bad(f"params.{name}", "must be finite")
        if v <= 0.0:
            bad(f"params.{name}", "must be positive")

    lo, hi = ge.room_bounds
    for k in range(3):
        if not (math.isfinite(lo[k]) and math.isfinite(hi[k])):
            bad("geometry.room_bounds", "must be finite")
        if not lo[k] < hi[k]:
            bad("geometry.room_bounds", f"axis {k} has empty extent")
    if len(ge.dfr_positions) != pr.K:
        bad("geometry.dfr_positions",
            f"expected {pr.K} positions, got {len(ge.dfr_positions)}")
    named = [("geometry.target_position", ge.target_position),
             ("geometry.receiver_position", ge.receiver_position)]
    named += [(f"geometry.dfr_positions[{i}]", p)
              for i, p in enumerate(ge.dfr_positions)]
    for field_name, p in named:
        if not all(math.isfinite(v) for v in p):
            bad(field_name, "must be finite")
        if not _inside(p, lo, hi):
            bad(field_name, f"outside room bounds: {p}")
    for i, pi in enumerate(ge.dfr_positions):
        for j in range(i + 1, len(ge.dfr_positions)):
            if math.dist(pi, ge.dfr_positions[j]) <= 1e-9:
                bad(f"geometry.dfr_positions[{j}]", f"co-located with radar {i}")
        if math.dist(pi, ge.target_position) <= 1e-9:
            bad("geometry.target_position", f"co-located with radar {i}")
        if math.dist(pi, ge.receiver_position) <= 1e-9:
            bad("geometry.receiver_position", f"co-located with radar {i}")

    for key, rates in (("P", er.P), ("Q", er.Q)):
        if len(rates) != pr.K:
            bad(f"errors.{key}", f"expected {pr.K} rates, got {len(rates)}")
        for i, r in enumerate(rates):
            if not math.isfinite(r) or not 0.0 <= r < 1.0:
                bad(f"errors.{key}[{i}]", f"rate must be in [0, 1), got {r}")

    if scenario.seed < 0:
        bad("seed", "must be non-negative")


def scenario_to_dict(scenario: Scenario) -> dict:
    """Plain mapping with raw linear/watt numbers; inverse of scenario_from_dict."""
    pr, ge, er = scenario.params, scenario.geometry, scenario.errors
    return {
        "seed": scenario.seed,
        "params": {
            "K": pr.K, "M": pr.M, "P_T": pr.P_T, "P_sum": pr.P_sum,
            "sigma2": pr.sigma2, "gamma": pr.gamma,
            "wavelength": pr.wavelength,
            "pathloss_exponent": pr.pathloss_exponent,
            "ref_distance": pr.ref_distance, "ref_loss": pr.ref_loss,
            "echo_gain": pr.echo_gain,
        },
        "geometry": {
            "room_bounds": [list(ge.room_bounds[0]), list(ge.room_bounds[1])],
            "dfr_positions": [list(p) for p in ge.dfr_positions],
            "target_position": list(ge.target_position),
            "receiver_position": list(ge.receiver_position),
        },
        "errors": {"P": list(er.P), "Q": list(er.Q)},
    }


def loads_scenario(text: str) -> Scenario:
    """Parse scenario text, sniffing JSON (leading '{') versus TOML."""
    stripped = text.lstrip()
    try:
        if stripped.startswith("{"):
            data = json.loads(text)
        else:
            data = _toml.loads(text)
    except (json.JSONDecodeError, _toml.TOMLDecodeError) as exc:
        raise MalformedScenario(f"cannot parse scenario text: {exc}") from exc
    return scenario_from_dict(data)


def load_scenario(path) -> Scenario:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise MalformedScenario(f"cannot read {path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedScenario(f"{path} is not UTF-8: {exc}") from exc
    return loads_scenario(text)


def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        raise TypeError("no booleans in scenario files")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def dumps_scenario(scenario: Scenario, fmt: str = "toml") -> str:
    """Serialize so that loads(dumps(s)) == s exactly (repr round-trip)."""
    data = scenario_to_dict(scenario)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if fmt != "toml":
        raise ValueError(f"unknown scenario format {fmt!r}")
    lines = [f"seed = {data['seed']}", ""]
    for section in ("params", "geometry", "errors"):
        lines.append(f"[{section}]")
        for key, value in data[section].items():
            lines.append(f"{key} = {_toml_scalar(value)}")
        lines.append("")
    return "\n".join(lines)


def save_scenario(scenario: Scenario, path) -> None:
    """Write TOML, or JSON when the path ends in .json."""
    fmt = "json" if str(path).endswith(".json") else "toml"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_scenario(scenario, fmt))


# Default deployment: six wall-mounted radars in a 3 x 4.5 x 3 m room,
# target at the room center, receiver one meter from radar index 4.
# Wall offsets are deliberately uneven: with exactly even spacing,
# opposite radars and the central target fall on one line, which makes
# the nulling matrix rank deficient.
_DEFAULT_DFRS = (
    (2.35, 0.05, 1.5),
    (2.95, 1.41, 1.5),
    (2.95, 3.96, 1.5),
    (1.92, 4.45, 1.5),
    (0.05, 2.39, 1.5),
    (0.05, 1.38, 1.5),
)

_DEFAULT_P = (0.05, 0.09, 0.12, 0.14, 0.05, 0.23)
_DEFAULT_Q = (0.09, 0.14, 0.07, 0.16, 0.05, 0.03)


def default_scenario() -> Scenario:
    """The stock six-radar deployment used by the command line tools."""
    scenario = Scenario(
        params=SystemParams(
            K=6,
            M=16,
            P_T=parse_power("10 mW"),
            P_sum=parse_power("50 mW"),
            sigma2=parse_power("-50 dBm"),
            gamma=parse_ratio("30 dB"),
        ),
        geometry=Geometry(
            room_bounds=((0.0, 0.0, 0.0), (3.0, 4.5, 3.0)),
            dfr_positions=_DEFAULT_DFRS,
            target_position=(1.5, 2.25, 1.5),
            receiver_position=(0.33, 3.35, 1.5),
        ),
        errors=ErrorProfile(P=_DEFAULT_P, Q=_DEFAULT_Q),
        seed=0,
    )
    validate(scenario)
    return scenario
