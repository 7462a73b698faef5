import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sagin_iscpt.channel import (NonPositiveDistance, RadioParams, amplitude_attenuation,
                                 channel_coefficient, free_space_pathloss_db,
                                 noise_power_dbm, noise_power_linear, wrap_phase)
from sagin_iscpt.geo import EcefPosition

LAM = 299792458.0 / 2e9


def test_pathloss_unit_argument():
    assert free_space_pathloss_db(LAM / (4 * math.pi), LAM) == pytest.approx(0.0, abs=1e-12)


def test_pathloss_700km():
    # 20 log10(4 pi 7e5 / 0.149896229), evaluated in 40-digit decimal arithmetic
    assert free_space_pathloss_db(700e3, LAM) == pytest.approx(155.370344, abs=1e-6)


def test_pathloss_doubling():
    d = 123456.0
    delta = free_space_pathloss_db(2 * d, LAM) - free_space_pathloss_db(d, LAM)
    assert delta == pytest.approx(20 * math.log10(2), abs=1e-12)


def test_pathloss_rejects_nonpositive():
    with pytest.raises(NonPositiveDistance):
        free_space_pathloss_db(0.0, LAM)
    with pytest.raises(NonPositiveDistance):
        amplitude_attenuation(-1.0, LAM)


def test_unit_gain_coefficient():
    radio = RadioParams(gain_ap_dBi=0, gain_user_sat_dBi=0)
    d = radio.wavelength_m / (4 * math.pi)
    c = channel_coefficient(EcefPosition(0, 0, 0), EcefPosition(d, 0, 0), False, radio)
    assert c.amplitude == pytest.approx(1.0, rel=1e-12)
    assert c.phase == pytest.approx(2 * math.pi - 0.5, abs=1e-12)


def test_table_gains_satellite_link():
    radio = RadioParams()
    a, b = EcefPosition(7078137.0, 0, 0), EcefPosition(6671000.0, 1e5, 0)
    d = np.linalg.norm(a.as_array() - b.as_array())
    c = channel_coefficient(a, b, False, radio)
    assert c.amplitude == pytest.approx(LAM / (4 * math.pi * d) * 10 ** (60 / 20), rel=1e-12)
    terr = channel_coefficient(a, b, True, radio)
    assert terr.amplitude / c.amplitude == pytest.approx(10 ** (10 / 20), rel=1e-12)


@given(st.floats(-1e7, 1e7), st.floats(-1e7, 1e7), st.floats(1.0, 1e7))
def test_reciprocity(x, y, dz):
    radio = RadioParams()
    a, b = EcefPosition(x, y, 0.0), EcefPosition(x, y, dz)
    ab = channel_coefficient(a, b, False, radio)
    ba = channel_coefficient(b, a, False, radio)
    assert ab.amplitude == ba.amplitude and ab.distance_m == ba.distance_m
    assert 0.0 <= ab.phase < 2 * math.pi


@given(st.floats(1.0, 1e7), st.floats(1.0, 1e7))
def test_amplitude_strictly_decreasing(d1, d2):
    if d1 == d2:
        return
    lo, hi = sorted((d1, d2))
    assert amplitude_attenuation(lo, LAM) > amplitude_attenuation(hi, LAM)


@given(st.floats(-1e9, 1e9))
def test_wrap_phase_range(p):
    assert 0.0 <= wrap_phase(p) < 2 * math.pi


def test_noise_defaults():
    assert noise_power_dbm(RadioParams()) == pytest.approx(-94.0)
    assert noise_power_linear(RadioParams()) == pytest.approx(3.981e-13, rel=1e-3)
    assert noise_power_dbm(RadioParams(bandwidth_hz=1.0)) == pytest.approx(-174.0)
    assert noise_power_linear(RadioParams(noise_power_dBm=-100)) == pytest.approx(1e-13)


def test_radio_validation_and_dict():
    with pytest.raises(ValueError):
        RadioParams(carrier_hz=0)
    r = RadioParams(max_power_dB=13.0)
    assert RadioParams.from_dict(r.to_dict()) == r
    assert RadioParams().max_power_w == pytest.approx(10.0)
