import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdsinpaint.guidance import GuidanceConfig, charbonnier_weight, guidance, sigmoid_guidance


def test_charbonnier_values():
    assert charbonnier_weight(0.0, 2.0) == 1.0
    assert charbonnier_weight(4.0, 2.0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert charbonnier_weight(1e6 * 9.0, 3.0) < 1e-2
    assert charbonnier_weight(123.0, math.inf) == 1.0


def test_charbonnier_strictly_decreasing(rng):
    s = np.sort(rng.random((1000, 2)) * 1e4, axis=1)
    s = s[s[:, 0] < s[:, 1]]
    assert np.all(charbonnier_weight(s[:, 0], 3.0) > charbonnier_weight(s[:, 1], 3.0))


def test_charbonnier_errors():
    with pytest.raises(ValueError):
        charbonnier_weight(1.0, 0.0)
    with pytest.raises(ValueError):
        charbonnier_weight(-1.0, 1.0)


def test_arctan_values():
    cfg = GuidanceConfig(lam=1.0, epsilon=0.3)
    assert sigmoid_guidance(0.0, cfg) == 0.0
    assert sigmoid_guidance(0.3, cfg) == pytest.approx(0.5, abs=1e-15)
    assert abs(guidance(1.0, 1e-9) - 1) < 1e-6


def test_sign_values():
    cfg = GuidanceConfig(lam=1.0, kind="sign")
    assert sigmoid_guidance(-3.2, cfg) == -1.0
    assert sigmoid_guidance(0.0, cfg) == 0.0
    assert sigmoid_guidance(5.0, cfg) == 1.0


@given(st.floats(-1e12, 1e12, allow_nan=False), st.floats(1e-6, 1e6))
def test_arctan_odd_and_bounded(x, eps):
    assert guidance(-x, eps) == -guidance(x, eps)
    assert abs(guidance(x, eps)) <= 1.0
    if abs(x / eps) < 1e15:
        assert abs(guidance(x, eps)) < 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        GuidanceConfig(lam=0.0, epsilon=1.0)
    with pytest.raises(ValueError):
        GuidanceConfig(lam=1.0, epsilon=0.0)
    with pytest.raises(ValueError):
        GuidanceConfig(lam=1.0, epsilon=1.0, kind="tanh")
    with pytest.raises(ValueError):
        guidance(1.0, 1.0, "tanh")
