import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ncqwalk.coins import CoinParams, coin, is_unitary
from ncqwalk.observables import PositionDistribution, adaptive_localization, localization_parameter, similarity
from ncqwalk.walk import InitialState, evolve

angles = st.floats(-math.pi, math.pi, allow_nan=False)
amp = st.floats(-1, 1, allow_nan=False)


@given(angles, angles)
def test_coin_unitary(theta, phi):
    assert is_unitary(coin(CoinParams(theta, phi)))


@settings(max_examples=50)
@given(angles, angles, amp, amp, amp, amp, st.integers(0, 60))
def test_norm_conserved(theta, phi, a, b, c, d, n):
    if abs(a) + abs(b) + abs(c) + abs(d) < 1e-3:
        return
    state = evolve(InitialState.custom(0, complex(a, b), complex(c, d)), CoinParams(theta, phi), n)
    assert abs(state.norm() - 1.0) <= 1e-12


weights = st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=20).filter(
    lambda w: sum(w) > 1e-6)


def _dist(offset, w):
    w = np.array(w)
    return PositionDistribution(offset, w / w.sum())


@given(st.integers(-5, 5), weights, st.integers(-5, 5), weights)
def test_similarity_bounds(o1, w1, o2, w2):
    p, q = _dist(o1, w1), _dist(o2, w2)
    s = similarity(p, q)
    assert 0.0 <= s <= 1.0
    assert s == similarity(q, p)


@given(st.integers(-10, 0), weights)
def test_localization_bounds(offset, w):
    dist = _dist(offset, w)
    assert -0.5 - 1e-15 <= localization_parameter(dist).s_l <= 0.5 + 1e-15
    if dist.occupied(1e-6).size >= 2:
        assert -0.5 - 1e-15 <= adaptive_localization(dist).s_l <= 0.5 + 1e-15
