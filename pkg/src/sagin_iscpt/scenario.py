"""Network scenario generation: Walker-delta shells, user roles, city users."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import jsonschema
import numpy as np

from .channel import RadioParams
from .geo import R_EARTH_MEAN, WGS84, EcefPosition, GeodeticPosition, lla_to_ecef


class ConfigError(ValueError):
    pass


class InvalidSpec(ValueError):
    pass


class InsufficientSatellites(ValueError):
    pass


class NodeRole(str, Enum):
    AP_SATELLITE = "ap_satellite"
    COMM_TERRESTRIAL = "comm_terrestrial"
    COMM_SATELLITE = "comm_satellite"
    CHARGE = "charge"
    SENSING = "sensing"

    @property
    def is_comm(self) -> bool:
        return self in (NodeRole.COMM_TERRESTRIAL, NodeRole.COMM_SATELLITE)


@dataclass(frozen=True)
class ConstellationSpec:
    altitude_m: float
    num_planes: int
    sats_per_plane: int
    inclination_deg: float = 53.0
    raan_spread_deg: float = 360.0
    phasing_offset_deg: float = 0.0

    @property
    def total(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def radius_m(self) -> float:
        return R_EARTH_MEAN + self.altitude_m


DEFAULT_CITIES = (
    ("Berlin", 52.52, 13.4),
    ("New York", 40.71, -74.0),
    ("London", 50.5, -0.13),
    ("Beijing", 39.9, 116.4),
    ("Sydney", -33.87, 151.21),
)


@dataclass(frozen=True)
class City:
    name: str
    latitude_deg: float
    longitude_deg: float


@dataclass
class ScenarioConfig:
    seed: int = 0
    ap_shell: ConstellationSpec = field(default_factory=lambda: ConstellationSpec(
        700e3, 16, 8, 53.0, 360.0, 360.0 / 128))
    user_shell: ConstellationSpec = field(default_factory=lambda: ConstellationSpec(
        300e3, 4, 32, 53.0, 360.0, 360.0 / 128))
    num_user_satellites: int = 30
    num_charge_users: int = 4
    sensing_enabled: bool = True
    cities: list = field(default_factory=lambda: [City(*c) for c in DEFAULT_CITIES])
    city_jitter_deg: float = 0.0
    num_aps: Optional[int] = None
    radio: RadioParams = field(default_factory=RadioParams)

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        try:
            jsonschema.validate(d, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(exc.message) from exc
        d = copy.deepcopy(d)
        kw = {}
        for key in ("ap_shell", "user_shell"):
            if key in d:
                kw[key] = ConstellationSpec(**d.pop(key))
        if "cities" in d:
            kw["cities"] = [City(**c) for c in d.pop("cities")]
        if "radio" in d:
            kw["radio"] = RadioParams(**d.pop("radio"))
        kw.update(d)
        return cls(**kw)


_SHELL_SCHEMA = {
    "type": "object",
    "properties": {
        "altitude_m": {"type": "number", "exclusiveMinimum": 0},
        "num_planes": {"type": "integer", "minimum": 1},
        "sats_per_plane": {"type": "integer", "minimum": 1},
        "inclination_deg": {"type": "number", "minimum": 0, "maximum": 180},
        "raan_spread_deg": {"type": "number"},
        "phasing_offset_deg": {"type": "number"},
    },
    "required": ["altitude_m", "num_planes", "sats_per_plane"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "ap_shell": _SHELL_SCHEMA,
        "user_shell": _SHELL_SCHEMA,
        "num_user_satellites": {"type": "integer", "minimum": 0},
        "num_charge_users": {"type": "integer", "minimum": 0},
        "sensing_enabled": {"type": "boolean"},
        "cities": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "latitude_deg": {"type": "number", "minimum": -90, "maximum": 90},
                    "longitude_deg": {"type": "number", "minimum": -180, "maximum": 180},
                },
                "required": ["name", "latitude_deg", "longitude_deg"],
                "additionalProperties": False,
            },
        },
        "city_jitter_deg": {"type": "number", "minimum": 0},
        "num_aps": {"type": ["integer", "null"], "minimum": 1},
        "radio": {
            "type": "object",
            "properties": {
                "carrier_hz": {"type": "number", "exclusiveMinimum": 0},
                "bandwidth_hz": {"type": "number", "exclusiveMinimum": 0},
                "gain_ap_dBi": {"type": "number"},
                "gain_user_sat_dBi": {"type": "number"},
                "gain_user_terr_dBi": {"type": "number"},
                "max_power_dB": {"type": "number"},
                "noise_power_dBm": {"type": ["number", "null"]},
                "elevation_threshold_deg": {"type": "number", "minimum": -90, "maximum": 90},
                "pathloss_threshold_dB": {"type": "number"},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def load_config(path: Union[str, Path, None]) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ScenarioConfig.from_dict(data)


@dataclass(frozen=True)
class UserNode:
    node_id: str
    role: NodeRole
    position: Union[EcefPosition, GeodeticPosition]

    @property
    def terrestrial(self) -> bool:
        return isinstance(self.position, GeodeticPosition)

    def ecef(self) -> EcefPosition:
        if isinstance(self.position, GeodeticPosition):
            return lla_to_ecef(self.position, WGS84)
        return self.position


_ROLE_RANK = {
    NodeRole.COMM_TERRESTRIAL: 0,
    NodeRole.COMM_SATELLITE: 0,
    NodeRole.SENSING: 1,
    NodeRole.CHARGE: 2,
}


@dataclass(frozen=True)
class NetworkScenario:
    """Immutable node roster.

    Users are kept in canonical column order: communication users, then the
    sensing target (if any), then charge users.
    """

    aps: tuple
    users: tuple
    rng_seed: int = 0
    radio: RadioParams = field(default_factory=RadioParams)
    ap_ids: Optional[tuple] = None

    def __post_init__(self):
        if len(self.aps) < 1:
            raise ValueError("scenario needs at least one AP")
        if self.ap_ids is None:
            object.__setattr__(self, "ap_ids", tuple(f"AP{i}" for i in range(len(self.aps))))
        ids = [u.node_id for u in self.users] + list(self.ap_ids)
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        ranks = [_ROLE_RANK[u.role] for u in self.users]
        if ranks != sorted(ranks):
            raise ValueError("users not in canonical order (comm, sensing, charge)")
        if sum(u.role is NodeRole.SENSING for u in self.users) > 1:
            raise ValueError("at most one sensing target")
        for u in self.users:
            if u.role is NodeRole.COMM_TERRESTRIAL and not u.terrestrial:
                raise ValueError(f"{u.node_id}: terrestrial user needs a geodetic position")
            if u.role is not NodeRole.COMM_TERRESTRIAL and u.terrestrial:
                raise ValueError(f"{u.node_id}: satellite node needs an ECEF position")

    @property
    def num_aps(self) -> int:
        return len(self.aps)

    @property
    def num_comm(self) -> int:
        return sum(u.role.is_comm for u in self.users)

    @property
    def has_sensing(self) -> bool:
        return any(u.role is NodeRole.SENSING for u in self.users)

    @property
    def num_charge(self) -> int:
        return sum(u.role is NodeRole.CHARGE for u in self.users)

    def to_dict(self) -> dict:
        users = []
        for u in self.users:
            entry = {"id": u.node_id, "role": u.role.value}
            if u.terrestrial:
                entry["lla"] = [u.position.latitude_deg, u.position.longitude_deg,
                                u.position.altitude_m]
            else:
                entry["ecef"] = [u.position.x_m, u.position.y_m, u.position.z_m]
            users.append(entry)
        return {
            "rng_seed": self.rng_seed,
            "radio": self.radio.to_dict(),
            "aps": [{"id": i, "ecef": [p.x_m, p.y_m, p.z_m]}
                    for i, p in zip(self.ap_ids, self.aps)],
            "users": users,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkScenario":
        users = []
        for e in d["users"]:
            pos = GeodeticPosition(*e["lla"]) if "lla" in e else EcefPosition(*e["ecef"])
            users.append(UserNode(e["id"], NodeRole(e["role"]), pos))
        return cls(
            aps=tuple(EcefPosition(*a["ecef"]) for a in d["aps"]),
            users=tuple(users),
            rng_seed=int(d.get("rng_seed", 0)),
            radio=RadioParams.from_dict(d.get("radio", {})),
            ap_ids=tuple(a["id"] for a in d["aps"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "NetworkScenario":
        return cls.from_dict(json.loads(text))


def generate_constellation(spec: ConstellationSpec, epoch_phase: float = 0.0) -> list:
    """Walker-delta snapshot; ``epoch_phase`` in radians."""
    if spec.num_planes < 1 or spec.sats_per_plane < 1:
        raise InvalidSpec("plane and satellite counts must be >= 1")
    r = spec.radius_m
    inc = math.radians(spec.inclination_deg)
    ci, si = math.cos(inc), math.sin(inc)
    out = []
    for p in range(spec.num_planes):
        raan = math.radians(p * spec.raan_spread_deg / spec.num_planes)
        cr, sr = math.cos(raan), math.sin(raan)
        for q in range(spec.sats_per_plane):
            u = math.radians(q * 360.0 / spec.sats_per_plane
                             + p * spec.phasing_offset_deg) + epoch_phase
            cu, su = math.cos(u), math.sin(u)
            out.append(EcefPosition(
                r * (cr * cu - sr * su * ci),
                r * (sr * cu + cr * su * ci),
                r * su * si,
            ))
    return out


def _rng(seed: int, stream: int, *extra: int) -> np.random.Generator:
    # independent streams so that e.g. AP subsampling never perturbs user draws
    return np.random.default_rng([seed, stream, *extra])


def subsample_aps(total: int, count: int, seed: int) -> np.ndarray:
    if count > total:
        raise InsufficientSatellites(f"requested {count} APs from a shell of {total}")
    if count == total:
        return np.arange(total)
    return np.sort(_rng(seed, 2, count).choice(total, size=count, replace=False))


def build_scenario(config: ScenarioConfig) -> NetworkScenario:
    seed = config.seed
    ap_shell = generate_constellation(config.ap_shell)
    user_shell = generate_constellation(config.user_shell)

    n_sel = config.num_user_satellites
    n_sense = 1 if config.sensing_enabled else 0
    if n_sel > len(user_shell):
        raise InsufficientSatellites(
            f"requested {n_sel} user satellites from a shell of {len(user_shell)}")
    if config.num_charge_users + n_sense > n_sel:
        raise ConfigError("charge users plus sensing target exceed the selected satellites")

    rng = _rng(seed, 1)
    chosen = np.sort(rng.choice(len(user_shell), size=n_sel, replace=False))
    perm = rng.permutation(n_sel)
    charge_idx = sorted(chosen[perm[:config.num_charge_users]])
    sense_idx = sorted(chosen[perm[config.num_charge_users:config.num_charge_users + n_sense]])
    comm_idx = sorted(chosen[perm[config.num_charge_users + n_sense:]])

    jrng = _rng(seed, 3)
    terr = []
    for city in config.cities:
        lat, lon = city.latitude_deg, city.longitude_deg
        if config.city_jitter_deg > 0:
            dlat, dlon = jrng.uniform(-config.city_jitter_deg, config.city_jitter_deg, 2)
            lat = float(np.clip(lat + dlat, -90.0, 90.0))
            lon = float((lon + dlon + 180.0) % 360.0 - 180.0)
        terr.append(UserNode(f"T-{city.name}", NodeRole.COMM_TERRESTRIAL,
                             GeodeticPosition(lat, lon, 0.0)))

    users = list(terr)
    users += [UserNode(f"S{i}", NodeRole.COMM_SATELLITE, user_shell[i]) for i in comm_idx]
    users += [UserNode(f"S{i}", NodeRole.SENSING, user_shell[i]) for i in sense_idx]
    users += [UserNode(f"S{i}", NodeRole.CHARGE, user_shell[i]) for i in charge_idx]

    n_aps = config.num_aps if config.num_aps is not None else len(ap_shell)
    ap_idx = subsample_aps(len(ap_shell), n_aps, seed)
    return NetworkScenario(
        aps=tuple(ap_shell[i] for i in ap_idx),
        users=tuple(users),
        rng_seed=seed,
        radio=config.radio,
        ap_ids=tuple(f"AP{i}" for i in ap_idx),
    )
