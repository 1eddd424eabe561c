"""
Position distributions and the statistics built on them.

The localization parameter uses half-sums over mirror sites,
``S_L = (P(+o) + P(-o))/2 - (P(+i) + P(-i))/2``, which keeps it inside
``[-1/2, 1/2]`` for any normalized distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from ncqwalk.coins import CoinParams
from ncqwalk.errors import DegenerateDistributionError, InvalidArgumentError
from ncqwalk.walk import InitialState, WalkState, evolve

__all__ = [
    "PositionDistribution",
    "LocalizationReport",
    "TrajectoryPoint",
    "position_distribution",
    "localization_parameter",
    "adaptive_localization",
    "similarity",
    "summary_stats",
    "inclusive_range",
    "trajectory_scan",
    "scan_points",
    "GAMMA_POINTS",
    "gamma_scan",
]

OCCUPIED_THRESHOLD = 1e-6


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    """Probabilities ``P(x)`` on consecutive sites starting at ``offset``."""

    offset: int
    probabilities: NDArray[np.float64]

    def __post_init__(self) -> None:
        p = np.array(self.probabilities, dtype=np.float64).reshape(-1)
        if p.size == 0:
            raise InvalidArgumentError("distribution must cover at least one site")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise InvalidArgumentError("probabilities must be finite and non-negative")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def from_mapping(cls, values: dict[int, float]) -> "PositionDistribution":
        """Build from ``{x: P(x)}``; gaps between keys are filled with zeros."""
        if not values:
            raise InvalidArgumentError("empty distribution")
        lo, hi = min(values), max(values)
        p = np.zeros(hi - lo + 1)
        for x, v in values.items():
            p[x - lo] += v
        return cls(lo, p)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.offset, self.offset + self.probabilities.size)

    def at(self, x: int) -> float:
        """``P(x)``, zero outside the stored range."""
        i = x - self.offset
        if 0 <= i < self.probabilities.size:
            return float(self.probabilities[i])
        return 0.0

    def total(self) -> float:
        return float(self.probabilities.sum())

    def normalized(self) -> "PositionDistribution":
        total = self.total()
        if total <= 0.0:
            raise DegenerateDistributionError("distribution has zero total weight")
        return PositionDistribution(self.offset, self.probabilities / total)

    def occupied(self, threshold: float = 0.0) -> NDArray[np.int64]:
        return self.positions[self.probabilities > threshold]


@dataclass(frozen=True)
class LocalizationReport:
    s_l: float
    outer_position: int
    inner_position: int
    mode: Literal["fixed", "adaptive"]


def position_distribution(state: WalkState) -> PositionDistribution:
    """Trace over polarization: ``P(x) = |h_x|^2 + |v_x|^2``."""
    return PositionDistribution(state.offset, state.probabilities())


def _half_sum(dist: PositionDistribution, x: int) -> float:
    return 0.5 * (dist.at(x) + dist.at(-x))


def localization_parameter(
    dist: PositionDistribution, outer: int = 5, inner: int = 1
) -> LocalizationReport:
    """
    ``S_L = P_outer - P_inner`` with mirror half-sums at ``|x| = outer, inner``.

    Raises
    ------
    InvalidArgumentError
        If ``outer <= inner`` or ``inner < 0``.
    """
    if inner < 0 or outer <= inner:
        raise InvalidArgumentError(f"need outer > inner >= 0, got outer={outer}, inner={inner}")
    s_l = _half_sum(dist, outer) - _half_sum(dist, inner)
    return LocalizationReport(s_l, outer, inner, "fixed")


def adaptive_localization(
    dist: PositionDistribution, threshold: float = OCCUPIED_THRESHOLD
) -> LocalizationReport:
    """
    ``S_L`` with the outer index set to the outermost occupied site.

    The inner index is 1 when the outermost occupied site is odd, 0 when it
    is even. If the outermost site is not beyond the inner one the outer peak
    is treated as empty, so a distribution concentrated on the inner sites
    gives ``S_L = -P_inner``.
    """
    occ = dist.occupied(threshold)
    if occ.size < 2:
        raise DegenerateDistributionError(
            f"adaptive S_L needs at least two occupied sites, found {occ.size}"
        )
    outer = int(np.max(np.abs(occ)))
    inner = outer % 2
    if outer <= inner:
        s_l = -_half_sum(dist, inner)
    else:
        s_l = _half_sum(dist, outer) - _half_sum(dist, inner)
    return LocalizationReport(s_l, outer, inner, "adaptive")


def similarity(p: PositionDistribution, q: PositionDistribution) -> float:
    """Squared Bhattacharyya overlap ``[sum_x sqrt(P(x) Q(x))]^2`` aligned by position."""
    lo = max(p.offset, q.offset)
    hi = min(p.offset + p.probabilities.size, q.offset + q.probabilities.size)
    if hi <= lo:
        return 0.0
    a = p.probabilities[lo - p.offset:hi - p.offset]
    b = q.probabilities[lo - q.offset:hi - q.offset]
    s = float(np.sum(np.sqrt(a * b))) ** 2
    return min(1.0, s)


def summary_stats(dist: PositionDistribution) -> tuple[float, float, float]:
    """``(mean, variance, participation_ratio)`` of a normalized distribution."""
    x = dist.positions.astype(np.float64)
    p = dist.probabilities
    mean = float(np.sum(x * p))
    variance = float(np.sum(x * x * p) - mean * mean)
    pr = float(1.0 / np.sum(p * p))
    return mean, variance, pr


def inclusive_range(start: float, stop: float, step: float) -> NDArray[np.float64]:
    """Points ``start, start+step, ...`` up to and including ``stop`` (within 1e-9 step)."""
    if step == 0 or not all(map(math.isfinite, (start, stop, step))):
        raise InvalidArgumentError("range step must be finite and non-zero")
    count = (stop - start) / step
    if count < -1e-9:
        raise InvalidArgumentError(f"empty range {start}:{stop}:{step}")
    n = int(math.floor(count + 1e-9)) + 1
    if n < 2:
        raise InvalidArgumentError("range must contain at least two points")
    return start + step * np.arange(n)


@dataclass(frozen=True)
class TrajectoryPoint:
    theta: float
    phi: float
    report: LocalizationReport


def _report(dist: PositionDistribution, mode: str) -> LocalizationReport:
    if mode == "fixed":
        return localization_parameter(dist)
    if mode == "adaptive":
        return adaptive_localization(dist)
    raise InvalidArgumentError(f"unknown mode {mode!r}")


def trajectory_scan(
    theta: float,
    phis: Iterable[float],
    n_steps: int = 7,
    initial: InitialState | None = None,
    mode: Literal["fixed", "adaptive"] = "fixed",
) -> list[TrajectoryPoint]:
    """``S_L`` after ``n_steps`` steps for each ``phi`` at fixed ``theta``."""
    phis = [float(p) for p in phis]
    if len(phis) < 2:
        raise InvalidArgumentError("a trajectory needs at least two phi values")
    return scan_points([(theta, p) for p in phis], n_steps, initial, mode)


def scan_points(
    points: Sequence[tuple[float, float]],
    n_steps: int = 7,
    initial: InitialState | None = None,
    mode: Literal["fixed", "adaptive"] = "fixed",
) -> list[TrajectoryPoint]:
    initial = initial or InitialState.plus()
    out = []
    for theta, phi in points:
        state = evolve(initial, CoinParams(theta, phi), n_steps)
        out.append(TrajectoryPoint(theta, phi, _report(position_distribution(state), mode)))
    return out


# extreme (de)localization points: ballistic at the zone edge, bouncing or
# ballistic on the {0, +-pi/2} grid
GAMMA_POINTS: tuple[tuple[float, float], ...] = (
    (-math.pi, math.pi),
    (math.pi, math.pi),
) + tuple(
    (a, b)
    for a in (0.0, math.pi / 2, -math.pi / 2)
    for b in (0.0, math.pi / 2, -math.pi / 2)
)


def gamma_scan(
    n_steps: int = 7,
    initial: InitialState | None = None,
    mode: Literal["fixed", "adaptive"] = "adaptive",
) -> list[TrajectoryPoint]:
    """``S_L`` at every point of ``GAMMA_POINTS``."""
    return scan_points(GAMMA_POINTS, n_steps, initial, mode)
