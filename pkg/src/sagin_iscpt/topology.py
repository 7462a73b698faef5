"""AP/user bipartite graph from visibility and channel-strength tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import RadioParams, amplitude_attenuation, channel_coefficient
from .geo import (R_EARTH_MEAN, WGS84, EcefPosition, GeodeticPosition,
                  elevation_angle, isl_min_distance_to_center)
from .scenario import NetworkScenario

FORMAT_HEADER = "# sagin-iscpt topology v1"


@dataclass(frozen=True)
class TopologyGraph:
    """Bipartite AP/user graph.

    Columns are ordered comm users ``[0, num_comm)``, then the sensing target
    (if ``has_sensing``), then ``num_charge`` charge users. ``full_weights``
    keeps visible-but-weak links; ``channels`` holds the complex physical
    channel (gains and phase included) when the graph came from a scenario.
    """

    adjacency: np.ndarray
    weights: np.ndarray
    full_weights: np.ndarray
    num_comm: int
    has_sensing: bool
    num_charge: int
    channels: Optional[np.ndarray] = None

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2:
            raise ValueError("adjacency must be 2-D")
        m, k = a.shape
        if k != self.num_comm + int(self.has_sensing) + self.num_charge:
            raise ValueError(
                f"{k} columns but layout expects {self.num_comm}+{int(self.has_sensing)}"
                f"+{self.num_charge}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency must be binary")
        for name in ("weights", "full_weights"):
            if getattr(self, name).shape != (m, k):
                raise ValueError(f"{name} shape mismatch")
        if (self.weights < 0).any():
            raise ValueError("weights must be non-negative")
        if ((self.weights > 0) & (a == 0)).any():
            raise ValueError("positive dominant weight on a non-edge")

    @classmethod
    def from_matrices(cls, adjacency, weights, num_comm: int, has_sensing: bool,
                      num_charge: int, full_weights=None, channels=None) -> "TopologyGraph":
        a = np.asarray(adjacency, dtype=np.int8)
        w = np.asarray(weights, dtype=float) * a
        fw = w.copy() if full_weights is None else np.asarray(full_weights, dtype=float)
        return cls(a, w, fw, int(num_comm), bool(has_sensing), int(num_charge), channels)

    @property
    def num_aps(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_users(self) -> int:
        return self.adjacency.shape[1]

    @property
    def sensing_col(self) -> Optional[int]:
        return self.num_comm if self.has_sensing else None

    @property
    def charge_cols(self) -> range:
        start = self.num_comm + int(self.has_sensing)
        return range(start, start + self.num_charge)

    def drop_user(self, col: int) -> "TopologyGraph":
        """Graph with one user column removed (layout counts adjusted)."""
        keep = [c for c in range(self.num_users) if c != col]
        nc, hs, np_ = self.num_comm, self.has_sensing, self.num_charge
        if col < self.num_comm:
            nc -= 1
        elif self.has_sensing and col == self.sensing_col:
            hs = False
        else:
            np_ -= 1
        ch = None if self.channels is None else self.channels[:, keep]
        return TopologyGraph(self.adjacency[:, keep], self.weights[:, keep],
                             self.full_weights[:, keep], nc, hs, np_, ch)

    def to_text(self) -> str:
        m, k = self.adjacency.shape
        lines = [FORMAT_HEADER, f"M {m}", f"K {k}", f"K_C {self.num_comm}",
                 f"SENSING {int(self.has_sensing)}", f"K_P {self.num_charge}", "A"]
        lines += [" ".join(str(int(x)) for x in row) for row in self.adjacency]
        lines.append("W")
        lines += [" ".join(f"{x:.16e}" for x in row) for row in self.weights]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TopologyGraph":
        rows = [ln.strip() for ln in text.splitlines()
                if ln.strip() and not ln.startswith("#")]
        head = {}
        i = 0
        while rows[i] != "A":
            key, val = rows[i].split()
            head[key] = int(val)
            i += 1
        m, k = head["M"], head["K"]
        a = np.array([[int(x) for x in r.split()] for r in rows[i + 1:i + 1 + m]])
        if rows[i + 1 + m] != "W":
            raise ValueError("malformed topology file: missing W block")
        w = np.array([[float(x) for x in r.split()]
                      for r in rows[i + 2 + m:i + 2 + 2 * m]])
        if a.shape != (m, k) or w.shape != (m, k):
            raise ValueError("malformed topology file: matrix shape")
        return cls.from_matrices(a, w, head["K_C"], bool(head["SENSING"]), head["K_P"])


def edge_terrestrial(ap: EcefPosition, user: GeodeticPosition, radio: RadioParams) -> bool:
    phi = elevation_angle(ap, user, WGS84)
    # small slack so a zenith pass still clears a 90 degree threshold
    return phi >= math.radians(radio.elevation_threshold_deg) - 1e-12


def isl_visible(ap: EcefPosition, user_sat: EcefPosition,
                r_earth: float = R_EARTH_MEAN, segment_check: bool = False) -> bool:
    return isl_min_distance_to_center(ap, user_sat, segment_check) >= r_earth


def strength_db(ap: EcefPosition, user: EcefPosition, radio: RadioParams) -> float:
    d = float(np.linalg.norm(ap.as_array() - user.as_array()))
    return 20.0 * math.log10(amplitude_attenuation(d, radio.wavelength_m))


def edge_satellite(ap: EcefPosition, user_sat: EcefPosition, radio: RadioParams,
                   segment_check: bool = False) -> bool:
    if not isl_visible(ap, user_sat, segment_check=segment_check):
        return False
    return strength_db(ap, user_sat, radio) >= radio.pathloss_threshold_dB


def build_topology(scenario: NetworkScenario, segment_check: bool = False) -> TopologyGraph:
    radio = scenario.radio
    lam = radio.wavelength_m
    m_count, k_count = scenario.num_aps, len(scenario.users)
    adj = np.zeros((m_count, k_count), dtype=np.int8)
    full = np.zeros((m_count, k_count))
    chan = np.zeros((m_count, k_count), dtype=complex)
    for k, user in enumerate(scenario.users):
        pos = user.ecef()
        for m, ap in enumerate(scenario.aps):
            if user.terrestrial:
                visible = edge_terrestrial(ap, user.position, radio)
                strong = visible
            else:
                visible = isl_visible(ap, pos, segment_check=segment_check)
                strong = visible and strength_db(ap, pos, radio) >= radio.pathloss_threshold_dB
            if not visible:
                continue
            coef = channel_coefficient(ap, pos, user.terrestrial, radio)
            full[m, k] = amplitude_attenuation(coef.distance_m, lam)
            chan[m, k] = coef.complex
            adj[m, k] = 1 if strong else 0
    return TopologyGraph(adj, full * adj, full, scenario.num_comm, scenario.has_sensing,
                         scenario.num_charge, chan)
