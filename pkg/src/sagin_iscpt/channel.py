"""Free-space LoS link budget."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .geo import WGS84, EcefPosition, GeodeticPosition, lla_to_ecef

SPEED_OF_LIGHT = 299792458.0


class NonPositiveDistance(ValueError):
    pass


@dataclass(frozen=True)
class RadioParams:
    """Radio constants; defaults follow the reference simulation table.

    ``max_power_dB`` is read as dBW per AP. ``noise_power_dBm`` of ``None``
    means thermal noise over the bandwidth with a 0 dB noise figure.
    """

    carrier_hz: float = 2e9
    bandwidth_hz: float = 100e6
    gain_ap_dBi: float = 30.0
    gain_user_sat_dBi: float = 30.0
    gain_user_terr_dBi: float = 40.0
    max_power_dB: float = 10.0
    noise_power_dBm: Optional[float] = None
    elevation_threshold_deg: float = 15.0
    pathloss_threshold_dB: float = -190.0

    def __post_init__(self):
        if not self.carrier_hz > 0:
            raise ValueError("carrier_hz must be positive")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def max_power_w(self) -> float:
        return 10.0 ** (self.max_power_dB / 10.0)

    def user_gain_dBi(self, terrestrial: bool) -> float:
        return self.gain_user_terr_dBi if terrestrial else self.gain_user_sat_dBi

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RadioParams":
        return cls(**d)


@dataclass(frozen=True)
class ChannelCoefficient:
    amplitude: float
    phase: float
    distance_m: float

    @property
    def complex(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


def free_space_pathloss_db(d_m: float, lambda_m: float) -> float:
    if not d_m > 0:
        raise NonPositiveDistance(f"distance must be positive, got {d_m}")
    return 20.0 * math.log10(4.0 * math.pi * d_m / lambda_m)


def amplitude_attenuation(d_m, lambda_m):
    """Linear LoS amplitude lambda / (4 pi d); accepts arrays."""
    d = np.asarray(d_m, dtype=float)
    if np.any(d <= 0):
        raise NonPositiveDistance("distance must be positive")
    out = lambda_m / (4.0 * np.pi * d)
    return float(out) if out.ndim == 0 else out


def wrap_phase(phase):
    """Map to [0, 2*pi)."""
    p = np.mod(phase, 2.0 * np.pi)
    # np.mod can return exactly 2*pi for tiny negative inputs
    p = np.where(p >= 2.0 * np.pi, 0.0, p)
    return float(p) if np.ndim(p) == 0 else p


def channel_coefficient(ap: EcefPosition, user_pos, terrestrial: bool,
                        radio: RadioParams) -> ChannelCoefficient:
    if isinstance(user_pos, GeodeticPosition):
        user_pos = lla_to_ecef(user_pos, WGS84)
    d = float(np.linalg.norm(ap.as_array() - user_pos.as_array()))
    lam = radio.wavelength_m
    w = amplitude_attenuation(d, lam)
    gain_db = radio.gain_ap_dBi + radio.user_gain_dBi(terrestrial)
    amp = w * 10.0 ** (gain_db / 20.0)
    return ChannelCoefficient(amp, wrap_phase(-2.0 * math.pi * d / lam), d)


def noise_power_dbm(radio: RadioParams) -> float:
    if radio.noise_power_dBm is not None:
        return float(radio.noise_power_dBm)
    return -174.0 + 10.0 * math.log10(radio.bandwidth_hz)


def noise_power_linear(radio: RadioParams) -> float:
    """Noise power in watts."""
    return 10.0 ** ((noise_power_dbm(radio) - 30.0) / 10.0)
