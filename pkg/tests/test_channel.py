import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twinprice.channel import ChannelParams, aotm, rate_factor, transmission_rate
from twinprice.errors import DomainError, InvalidParameterError

# log2(1 + 4e11), evaluated with mpmath at 30 digits.
DEFAULT_FACTOR = 38.5412090437645925641757316245


def test_rate_factor_defaults(ch):
    assert rate_factor(ch) == pytest.approx(DEFAULT_FACTOR, rel=1e-14)
    assert ch.snr == pytest.approx(4e11, rel=1e-12)


def test_rate_factor_unit_snr():
    # 40 dBm * -20 dB * 500^-2 = 4e-4 mW, i.e. about -33.98 dBm of received power.
    rx_dbm = 10 * math.log10(1e4 * 1e-2 * 500.0 ** -2)
    assert rate_factor(ChannelParams(noise_power_dbm=rx_dbm)) == pytest.approx(1.0, rel=1e-12)
    snr3 = ChannelParams(noise_power_dbm=rx_dbm - 10 * math.log10(3.0))
    assert rate_factor(snr3) == pytest.approx(2.0, rel=1e-12)


def test_transmission_rate(ch):
    assert transmission_rate(1.0, ch) == pytest.approx(38.541, abs=1e-3)
    assert transmission_rate(2.0, ch) == pytest.approx(77.082, abs=1e-3)
    assert transmission_rate(0.1352, ch) == pytest.approx(5.211, abs=1e-3)


@pytest.mark.parametrize("b", [0.0, -1.0])
def test_transmission_rate_domain(ch, b):
    with pytest.raises(DomainError):
        transmission_rate(b, ch)


def test_aotm_values():
    assert aotm(3.7, 3.7) == 1.0
    assert aotm(1.0, 38.541) == pytest.approx(0.02595, abs=1e-5)
    assert aotm(2.0, 5.211) == pytest.approx(0.3838, abs=1e-4)


@pytest.mark.parametrize("d, rate", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (1.0, -2.0)])
def test_aotm_domain(d, rate):
    with pytest.raises(DomainError):
        aotm(d, rate)


@pytest.mark.parametrize("kw", [{"distance_m": 0.0}, {"distance_m": -3.0}, {"path_loss_exp": -1.0},
                                {"noise_power_dbm": 1e6}, {"transmit_power_dbm": 1e6}])
def test_invalid_channel(kw):
    with pytest.raises(InvalidParameterError):
        ChannelParams(**kw)


@given(st.floats(-30, 30))
def test_rate_factor_shift_invariance(x):
    base = ChannelParams()
    shifted = ChannelParams(transmit_power_dbm=40 + x, noise_power_dbm=-150 + x)
    assert rate_factor(shifted) == pytest.approx(rate_factor(base), rel=1e-12)


@given(
    st.floats(0.01, 10), st.floats(0.01, 10), st.floats(1e-3, 5), st.floats(1e-3, 5),
)
def test_aotm_monotone(d1, d2, b1, b2, ):
    ch = ChannelParams()
    if b1 != b2:
        lo, hi = sorted((b1, b2))
        assert aotm(d1, transmission_rate(hi, ch)) < aotm(d1, transmission_rate(lo, ch))
    if d1 != d2:
        lo, hi = sorted((d1, d2))
        assert aotm(lo, transmission_rate(b1, ch)) < aotm(hi, transmission_rate(b1, ch))


def test_outputs_finite_on_parameter_box():
    for p in np.linspace(10, 50, 5):
        for d in np.linspace(10, 2000, 5):
            for eps in (0.0, 2.0, 4.0):
                c = ChannelParams(transmit_power_dbm=p, distance_m=d, path_loss_exp=eps)
                f = rate_factor(c)
                assert math.isfinite(f) and f > 0
                assert math.isfinite(aotm(1.0, transmission_rate(0.5, c)))
