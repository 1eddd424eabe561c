import math

import numpy as np
import pytest

from ncqwalk.coins import CoinParams
from ncqwalk.errors import DegenerateDistributionError, InvalidArgumentError
from ncqwalk.observables import (
    GAMMA_POINTS,
    PositionDistribution,
    adaptive_localization,
    gamma_scan,
    inclusive_range,
    localization_parameter,
    position_distribution,
    similarity,
    summary_stats,
    trajectory_scan,
)
from ncqwalk.walk import InitialState, evolve, path_sum_oracle, step

PI = math.pi


def _walk(theta, phi, n=7):
    return position_distribution(evolve(InitialState.plus(), CoinParams(theta, phi), n))


def test_position_distribution_basics():
    h0 = InitialState.custom(0, 1, 0).prepare()
    assert position_distribution(h0).at(0) == 1.0
    p = position_distribution(step(h0, CoinParams(PI / 4, 0)))
    assert p.at(1) == pytest.approx(0.5) and p.at(-1) == pytest.approx(0.5)
    d = _walk(PI / 4, 0)
    np.testing.assert_allclose(d.probabilities, d.probabilities[::-1], atol=1e-12)


def test_fixed_localization_cases():
    mk = PositionDistribution.from_mapping
    assert localization_parameter(mk({-1: 0.5, 1: 0.5})).s_l == -0.5
    assert localization_parameter(mk({-5: 0.5, 5: 0.5})).s_l == 0.5
    assert localization_parameter(mk({-5: 0.25, -1: 0.25, 1: 0.25, 5: 0.25})).s_l == 0.0
    with pytest.raises(InvalidArgumentError):
        localization_parameter(mk({0: 1.0}), outer=1, inner=1)


def test_adaptive_localization_cases():
    ball = adaptive_localization(_walk(-PI, PI))
    assert ball.outer_position == 7 and ball.s_l == pytest.approx(0.5, abs=1e-12)
    bounce = adaptive_localization(_walk(0, PI / 2))
    assert bounce.outer_position == 1 == bounce.inner_position
    assert bounce.s_l == pytest.approx(-0.5, abs=1e-12)
    had = adaptive_localization(_walk(PI / 4, 0))
    assert (had.outer_position, had.inner_position, had.mode) == (7, 1, "adaptive")
    even = adaptive_localization(_walk(PI / 4, 0, 6))
    assert even.inner_position == 0
    with pytest.raises(DegenerateDistributionError):
        adaptive_localization(PositionDistribution(0, [1.0]))


def test_similarity_cases():
    p = PositionDistribution(0, [0.2, 0.3, 0.5])
    assert similarity(p, p) == pytest.approx(1.0, abs=1e-15)
    assert similarity(p, PositionDistribution(10, [1.0])) == 0.0
    q = PositionDistribution(1, [0.5, 0.5])
    assert similarity(p, q) == similarity(q, p)
    assert 0.0 < similarity(p, q) < 1.0


def test_summary_stats():
    assert summary_stats(PositionDistribution(0, [1.0])) == (0.0, 0.0, 1.0)
    assert summary_stats(PositionDistribution.from_mapping({-1: 0.5, 1: 0.5})) == (0.0, 1.0, 2.0)
    oracle = position_distribution(path_sum_oracle(InitialState.plus(), CoinParams(PI / 4, 0), 7))
    assert summary_stats(_walk(PI / 4, 0))[1] == pytest.approx(summary_stats(oracle)[1], abs=1e-10)


def test_sign_pattern_is_recorded_not_assumed():
    pts = trajectory_scan(-PI / 4, [0, PI / 4, PI / 2, 3 * PI / 4, PI])
    values = [pt.report.s_l for pt in pts]
    # the model gives the same value along the whole line; the
    # acceptance suite reports the mismatch with the expected sign pattern
    np.testing.assert_allclose(values, 0.109375, atol=1e-12)


def test_mirror_trajectories():
    phis = np.linspace(-PI, PI, 25)
    for theta in (PI / 4, -PI / 3, 1.1):
        alpha = [pt.report.s_l for pt in trajectory_scan(theta, phis, mode="fixed")]
        beta = [pt.report.s_l for pt in trajectory_scan(-theta, phis, mode="fixed")]
        np.testing.assert_allclose(alpha, beta, atol=1e-10)


def test_gamma_preset_saturates():
    pts = gamma_scan()
    assert len(pts) == len(GAMMA_POINTS) == 11
    for pt in pts:
        assert abs(pt.report.s_l) == pytest.approx(0.5, abs=1e-12)


def test_inclusive_range():
    np.testing.assert_allclose(inclusive_range(0, PI, PI / 4), np.arange(5) * PI / 4)
    with pytest.raises(InvalidArgumentError):
        inclusive_range(1.0, 0.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        inclusive_range(0.0, 1.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        trajectory_scan(0.0, [0.1])
