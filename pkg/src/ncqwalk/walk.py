"""
Real-space evolution of the two-component walker.

One step applies the coin at every site and then the polarization-dependent
shift: the H amplitude at ``x`` moves to ``x + 1`` and the V amplitude moves
to ``x - 1``. States are stored densely from ``offset`` upward and grow by
one site on each side per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from ncqwalk import _backend
from ncqwalk.coins import CoinParams, coin
from ncqwalk.errors import InvalidArgumentError, UnsupportedSizeError

__all__ = [
    "Spinor",
    "WalkState",
    "InitialState",
    "translate",
    "step",
    "evolve",
    "path_sum_oracle",
    "MAX_PATH_SUM_STEPS",
]

MAX_PATH_SUM_STEPS = 16


@dataclass(frozen=True)
class Spinor:
    """Polarization amplitudes ``h |H> + v |V>``."""

    h: complex
    v: complex

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.h, self.v], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class WalkState:
    """
    Walker wave-function on a contiguous block of lattice sites.

    Attributes
    ----------
    offset : int
        Lattice position of row 0 of ``amplitudes``.
    amplitudes : ndarray, shape (L, 2)
        Column 0 holds H amplitudes, column 1 holds V amplitudes.
    step_count : int
        Number of steps applied since preparation.
    """

    offset: int
    amplitudes: NDArray[np.complex128]
    step_count: int = 0

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise InvalidArgumentError(f"amplitudes must have shape (L, 2), got {amps.shape}")
        if self.step_count < 0:
            raise InvalidArgumentError("step_count must be non-negative")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.offset, self.offset + self.amplitudes.shape[0])

    def norm(self) -> float:
        """Total probability ``sum_x |h_x|^2 + |v_x|^2``."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def spinor(self, x: int) -> Spinor:
        """Amplitudes at site ``x`` (zero outside the stored block)."""
        i = x - self.offset
        if 0 <= i < self.amplitudes.shape[0]:
            h, v = self.amplitudes[i]
            return Spinor(complex(h), complex(v))
        return Spinor(0j, 0j)

    def probabilities(self) -> NDArray[np.float64]:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)


_CHIRALITY = {
    "chirality_plus": (1 / math.sqrt(2), 1j / math.sqrt(2)),
    "chirality_minus": (1 / math.sqrt(2), -1j / math.sqrt(2)),
}


@dataclass(frozen=True)
class InitialState:
    """
    Single-site preparation.

    ``chirality_plus``/``chirality_minus`` are ``|0> (|H> +- i|V>)/sqrt 2``;
    ``custom`` places a (normalized) spinor at ``position``.
    """

    kind: Literal["chirality_plus", "chirality_minus", "custom"] = "chirality_plus"
    position: int = 0
    payload: Spinor = field(default_factory=lambda: Spinor(1.0, 0.0))

    def __post_init__(self) -> None:
        if self.kind not in ("chirality_plus", "chirality_minus", "custom"):
            raise InvalidArgumentError(f"unknown initial state {self.kind!r}")

    @classmethod
    def plus(cls) -> "InitialState":
        return cls("chirality_plus")

    @classmethod
    def minus(cls) -> "InitialState":
        return cls("chirality_minus")

    @classmethod
    def custom(cls, position: int, h: complex, v: complex) -> "InitialState":
        return cls("custom", int(position), Spinor(complex(h), complex(v)))

    def spinor(self) -> Spinor:
        if self.kind != "custom":
            h, v = _CHIRALITY[self.kind]
            return Spinor(h, v)
        h, v = self.payload.h, self.payload.v
        norm = math.sqrt(abs(h) ** 2 + abs(v) ** 2)
        if not math.isfinite(norm) or norm == 0.0:
            raise InvalidArgumentError("custom spinor must be non-zero and finite")
        return Spinor(h / norm, v / norm)

    def prepare(self) -> WalkState:
        s = self.spinor()
        return WalkState(self.position, np.array([[s.h, s.v]]), 0)


def translate(state: WalkState) -> WalkState:
    """Shift H amplitudes right and V amplitudes left by one site."""
    amps = state.amplitudes
    out = np.zeros((amps.shape[0] + 2, 2), dtype=np.complex128)
    out[2:, 0] = amps[:, 0]
    out[:-2, 1] = amps[:, 1]
    return WalkState(state.offset - 1, out, state.step_count)


def step(state: WalkState, params: CoinParams) -> WalkState:
    """One coin application at every site followed by ``translate``."""
    c = coin(params)
    rotated = state.amplitudes @ c.T
    moved = translate(WalkState(state.offset, rotated, state.step_count))
    return WalkState(moved.offset, moved.amplitudes, state.step_count + 1)


def evolve(initial: InitialState | WalkState, params: CoinParams, n_steps: int) -> WalkState:
    """
    Evolve ``n_steps`` steps with the kernel backend.

    Accepts either a preparation recipe or an already-prepared state. The
    result is deterministic for a given backend and platform.
    """
    if n_steps < 0:
        raise InvalidArgumentError("n_steps must be non-negative")
    state = initial.prepare() if isinstance(initial, InitialState) else initial
    if n_steps == 0:
        return state
    amps = _backend.kernels.evolve_dense(coin(params), state.amplitudes, int(n_steps))
    return WalkState(state.offset - n_steps, amps, state.step_count + n_steps)


def path_sum_oracle(initial: InitialState, params: CoinParams, n_steps: int) -> WalkState:
    """
    Final state by explicit summation over all ``2**n_steps`` shift histories.

    Independent of ``evolve``: each history contributes the product of the
    coin entries it traverses. Limited to ``n_steps <= 16``.
    """
    if n_steps < 0:
        raise InvalidArgumentError("n_steps must be non-negative")
    if n_steps > MAX_PATH_SUM_STEPS:
        raise UnsupportedSizeError(
            f"path summation is limited to {MAX_PATH_SUM_STEPS} steps, got {n_steps}"
        )
    s = initial.spinor()
    amps = _backend.kernels.path_sum(coin(params), s.h, s.v, int(n_steps))
    return WalkState(initial.position - n_steps, amps, n_steps)
