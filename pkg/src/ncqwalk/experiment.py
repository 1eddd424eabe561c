"""
Forward model of the time-multiplexed fiber-loop walk.

Lattice position is encoded in arrival time: step ``N`` arrives after ``N``
round trips, and within a round trip the occupied bins are one time-bin
distance apart, earliest for ``x = -N``. A photon survives a round trip with
probability ``loop_efficiency`` and is tapped out with probability
``outcoupling_probability`` at the step where it is detected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ncqwalk.coins import CoinParams, wrap_angle
from ncqwalk.errors import InvalidArgumentError, NoSignalError
from ncqwalk.observables import PositionDistribution, position_distribution
from ncqwalk.walk import InitialState, evolve

__all__ = [
    "LoopParams",
    "BinnedHistogram",
    "WaveplateSetting",
    "max_steps",
    "arrival_time",
    "detection_probability",
    "multiphoton_probability",
    "expected_counts",
    "expected_histogram",
    "simulate_histogram",
    "ingest_histogram",
    "rebin",
    "waveplate_settings",
]


@dataclass(frozen=True)
class LoopParams:
    """Loop timing and loss constants; times in ns, rates in Hz."""

    round_trip_time: float = 750.0
    time_bin_distance: float = 52.0
    repetition_rate: float = 111e3
    outcoupling_probability: float = 0.05
    loop_efficiency: float = 0.50
    mean_photons_per_pulse: float = 0.003
    background_rate: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.outcoupling_probability < 1.0:
            raise InvalidArgumentError("outcoupling_probability must lie in (0, 1)")
        if not 0.0 < self.loop_efficiency <= 1.0:
            raise InvalidArgumentError("loop_efficiency must lie in (0, 1]")
        if self.mean_photons_per_pulse < 0.0:
            raise InvalidArgumentError("mean_photons_per_pulse must be non-negative")
        if self.background_rate < 0.0:
            raise InvalidArgumentError("background_rate must be non-negative")
        if self.round_trip_time <= 0.0 or self.time_bin_distance <= 0.0:
            raise InvalidArgumentError("round_trip_time and time_bin_distance must be positive")
        if self.repetition_rate <= 0.0:
            raise InvalidArgumentError("repetition_rate must be positive")

    @property
    def pulse_period(self) -> float:
        """Time between laser pulses in ns."""
        return 1e9 / self.repetition_rate

    @property
    def bins_fit(self) -> bool:
        """True when the ``max_steps`` bins of the last step fit inside one round trip."""
        return max_steps(self) * self.time_bin_distance <= self.round_trip_time


@dataclass(frozen=True, eq=False)
class BinnedHistogram:
    """
    Detector counts per arrival-time bin.

    Bin ``i`` covers ``[origin + i*bin_width, origin + (i+1)*bin_width)``.
    ``registry`` maps ``(step, position)`` to the bin holding that arrival,
    when the histogram was produced by the forward model.
    """

    bin_width: float
    counts: NDArray[np.int64]
    origin: float = 0.0
    registry: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.bin_width > 0.0:
            raise InvalidArgumentError("bin_width must be positive")
        c = np.asarray(self.counts)
        if c.ndim != 1:
            raise InvalidArgumentError("counts must be one-dimensional")
        if c.size and (np.any(c < 0) or not np.all(np.equal(np.mod(c, 1), 0))):
            raise InvalidArgumentError("counts must be non-negative integers")
        c = c.astype(np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def times(self) -> NDArray[np.float64]:
        """Left edge of every bin."""
        return self.origin + self.bin_width * np.arange(self.counts.size)

    def bin_index(self, t: float) -> int:
        return int(math.floor((t - self.origin) / self.bin_width))


@dataclass(frozen=True)
class WaveplateSetting:
    """Half-wave plate angles: ``alpha`` sets the y-rotation, ``beta`` the x-rotation."""

    alpha: float
    beta: float

    def to_coin(self) -> CoinParams:
        return CoinParams(wrap_angle(2.0 * self.alpha), wrap_angle(2.0 * self.beta))


def max_steps(params: LoopParams) -> int:
    """Round trips that fit between two laser pulses."""
    return int(math.floor(params.pulse_period / params.round_trip_time))


def _check_site(step: int, position: int) -> None:
    if step < 1:
        raise InvalidArgumentError(f"step must be >= 1, got {step}")
    if abs(position) > step or (position + step) % 2:
        raise InvalidArgumentError(
            f"position {position} is not reachable after {step} steps"
        )


def arrival_time(step: int, position: int, params: LoopParams) -> float:
    """``N * RTT + ((x + N) / 2) * TBD`` in ns."""
    _check_site(step, position)
    return step * params.round_trip_time + ((position + step) // 2) * params.time_bin_distance


def detection_probability(step: int, params: LoopParams) -> float:
    """Probability that a photon is detected at step ``N``: ``p_out * eta**N``."""
    if step < 1:
        raise InvalidArgumentError(f"step must be >= 1, got {step}")
    return params.outcoupling_probability * params.loop_efficiency ** step


def multiphoton_probability(mean_photons: float) -> float:
    """Poisson probability of two or more photons in one pulse."""
    mu = float(mean_photons)
    # 1 - e^-mu (1 + mu), written to avoid cancellation at small mu
    return -math.expm1(-mu) - mu * math.exp(-mu)


def expected_counts(
    params: LoopParams,
    coin: CoinParams,
    initial: InitialState,
    n_pulses: int,
    max_step: int,
) -> dict[tuple[int, int], float]:
    """Mean detected photons per ``(step, position)`` over ``n_pulses`` pulses."""
    if max_step < 1 or max_step > max_steps(params):
        raise InvalidArgumentError(
            f"max_step must lie in [1, {max_steps(params)}], got {max_step}"
        )
    if max_step * params.time_bin_distance > params.round_trip_time:
        raise InvalidArgumentError(
            f"{max_step} steps x {params.time_bin_distance} ns bins overflow the "
            f"{params.round_trip_time} ns round trip"
        )
    out: dict[tuple[int, int], float] = {}
    state = initial.prepare()
    scale = n_pulses * params.mean_photons_per_pulse
    for n in range(1, max_step + 1):
        state = evolve(state, coin, 1)
        dist = position_distribution(state)
        p_det = detection_probability(n, params)
        for x in range(-n, n + 1, 2):
            out[(n, x)] = scale * p_det * dist.at(initial.position + x)
    return out


def expected_histogram(
    params: LoopParams,
    coin: CoinParams,
    initial: InitialState,
    n_pulses: int,
    max_step: int,
    bin_width: float = 1.0,
) -> tuple[NDArray[np.float64], dict[tuple[int, int], int]]:
    """Per-bin Poisson means (signal plus background) and the bin registry."""
    means = expected_counts(params, coin, initial, n_pulses, max_step)
    n_bins = int(math.ceil((max_step + 1) * params.round_trip_time / bin_width))
    hist = np.full(n_bins, params.background_rate * bin_width, dtype=np.float64)
    registry = {}
    for (n, x), mean in means.items():
        idx = int(math.floor(arrival_time(n, x, params) / bin_width))
        registry[(n, x)] = idx
        hist[idx] += mean
    return hist, registry


def simulate_histogram(
    params: LoopParams,
    coin: CoinParams,
    initial: InitialState,
    n_pulses: int,
    max_step: int,
    seed: int,
    bin_width: float = 1.0,
    noise: bool = True,
) -> BinnedHistogram:
    """
    Seeded synthetic arrival-time histogram.

    Each bin is an independent Poisson draw around its analytic mean, so the
    cost does not depend on ``n_pulses``. With ``noise=False`` the means are
    rounded to the nearest integer instead (analytic-mean mode).
    """
    if n_pulses < 0:
        raise InvalidArgumentError("n_pulses must be non-negative")
    means, registry = expected_histogram(params, coin, initial, n_pulses, max_step, bin_width)
    if noise:
        rng = np.random.Generator(np.random.Philox(seed))
        counts = rng.poisson(means)
    else:
        counts = np.rint(means)
    return BinnedHistogram(bin_width, counts, 0.0, registry)


def _window_mask(hist: BinnedHistogram, t: float, window: float) -> NDArray[np.bool_]:
    left = hist.times
    return (left < t + 0.5 * window) & (left + hist.bin_width > t - 0.5 * window)


def ingest_histogram(
    raw: BinnedHistogram, params: LoopParams, step: int, window: float
) -> PositionDistribution:
    """
    Recover ``P_N(x)`` from a measured histogram.

    Counts are integrated over ``window`` ns around each predicted arrival
    time; the median count of bins outside every predicted window is taken
    as background and subtracted; negative results are clipped to zero and
    the rest renormalized.

    Raises
    ------
    NoSignalError
        If nothing survives background subtraction.
    """
    if not 0.0 < window < 0.5 * params.time_bin_distance:
        raise InvalidArgumentError(
            f"window must lie in (0, {0.5 * params.time_bin_distance}) ns, got {window}"
        )
    if step < 1:
        raise InvalidArgumentError(f"step must be >= 1, got {step}")
    counts = raw.counts.astype(np.float64)
    span_steps = max(step, int((raw.origin + raw.bin_width * counts.size)
                               // params.round_trip_time))
    signal_region = np.zeros(counts.size, dtype=bool)
    for n in range(1, span_steps + 1):
        for x in range(-n, n + 1, 2):
            signal_region |= _window_mask(raw, arrival_time(n, x, params), window)
    off = counts[~signal_region]
    background = float(np.median(off)) if off.size else 0.0

    positions = np.arange(-step, step + 1)
    probs = np.zeros(positions.size)
    for x in range(-step, step + 1, 2):
        mask = _window_mask(raw, arrival_time(step, x, params), window)
        probs[x + step] = max(0.0, counts[mask].sum() - background * mask.sum())
    if probs.sum() <= 0.0:
        raise NoSignalError(f"no counts above background at step {step}")
    return PositionDistribution(-step, probs / probs.sum())


def rebin(hist: BinnedHistogram, bin_width: float) -> BinnedHistogram:
    """Sum counts into coarser bins of ``bin_width`` ns (e.g. 72 ps raw data to 1 ns)."""
    if bin_width < hist.bin_width:
        raise InvalidArgumentError("rebin only coarsens")
    idx = np.floor((hist.times - hist.origin) / bin_width + 1e-9).astype(np.int64)
    n_bins = int(idx[-1]) + 1 if idx.size else 0
    out = np.zeros(n_bins, dtype=np.int64)
    np.add.at(out, idx, hist.counts)
    return BinnedHistogram(bin_width, out, hist.origin)


def waveplate_settings(coin: CoinParams) -> WaveplateSetting:
    """Half-wave plate angles ``alpha = theta/2`` and ``beta = phi/2``."""
    return WaveplateSetting(coin.theta / 2.0, coin.phi / 2.0)
