"""
Momentum-space view of one step.

Fourier convention: ``psi(k) = sum_x psi(x) exp(-i k x)``. The shift then acts
as ``diag(exp(-ik), exp(+ik))`` and the Bloch unitary is
``U(k) = diag(exp(-ik), exp(ik)) @ Rx(phi) @ Ry(theta)``, whose eigenphases
``-+E`` obey ``cos E = cos k cos t cos p + sin k sin t sin p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ncqwalk.coins import CoinParams, coin
from ncqwalk.errors import DegeneratePointError, InvalidArgumentError
from ncqwalk.walk import InitialState, WalkState

__all__ = [
    "BlochSample",
    "BandStructure",
    "bloch_unitary",
    "dispersion_cos",
    "quasi_energy",
    "bloch_vector",
    "band_structure",
    "momentum_evolve_oracle",
    "oracle_grid_size",
]

# n(k) is undefined when sin E falls below this
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class BlochSample:
    k: float
    energy_plus: float
    energy_minus: float
    bloch_vector: tuple[float, float, float] | None


@dataclass(frozen=True)
class BandStructure:
    params: CoinParams
    samples: tuple[BlochSample, ...]

    @property
    def k(self) -> NDArray[np.float64]:
        return np.array([s.k for s in self.samples])

    @property
    def energy_plus(self) -> NDArray[np.float64]:
        return np.array([s.energy_plus for s in self.samples])


def bloch_unitary(k: float, params: CoinParams) -> NDArray[np.complex128]:
    """``diag(e^{-ik}, e^{ik}) @ Rx(phi) @ Ry(theta)``."""
    k = float(k)
    if not math.isfinite(k):
        raise InvalidArgumentError(f"k must be finite, got {k!r}")
    shift = np.array([np.exp(-1j * k), np.exp(1j * k)])
    return shift[:, None] * coin(params)


def dispersion_cos(k, params: CoinParams):
    """Right-hand side of the dispersion relation, ``cos E`` as a function of ``k``."""
    t, p = params.theta, params.phi
    return np.cos(k) * math.cos(t) * math.cos(p) + np.sin(k) * math.sin(t) * math.sin(p)


def quasi_energy(k: float, params: CoinParams) -> tuple[float, float]:
    """
    Band pair ``(E, -E)`` with ``E in [0, pi]``.

    ``E = arccos(clip(cos E, -1, 1))``, evaluated as an ``atan2`` of the
    cosine and the sine recovered from the traceless part of ``U(k)``; the two
    agree analytically and the latter keeps full precision near ``E = 0, pi``.
    """
    k = float(k)
    if not math.isfinite(k):
        raise InvalidArgumentError(f"k must be finite, got {k!r}")
    ct, st = math.cos(params.theta), math.sin(params.theta)
    cp, sp = math.cos(params.phi), math.sin(params.phi)
    re = math.cos(k) * ct * cp + math.sin(k) * st * sp
    im = -math.sin(k) * ct * cp + math.cos(k) * st * sp
    b2 = (cp * st) ** 2 + (sp * ct) ** 2
    cos_e = min(1.0, max(-1.0, re))
    energy = math.atan2(math.sqrt(im * im + b2), cos_e)
    return energy, -energy


def bloch_vector(k: float, params: CoinParams) -> tuple[float, float, float]:
    """
    Unit vector ``n(k)`` with ``U(k) = exp(-i E n.sigma)`` for the upper band.

    Raises
    ------
    DegeneratePointError
        If the gap is closed at ``k`` (``sin E < 1e-9``).
    """
    u = bloch_unitary(k, params)
    energy, _ = quasi_energy(k, params)
    sin_e = math.sin(energy)
    if sin_e < DEGENERACY_TOL:
        raise DegeneratePointError(
            f"gap closed at k={k!r} for {params}: E={energy!r}, n(k) undefined"
        )
    m = 1j * (u - math.cos(energy) * np.eye(2)) / sin_e
    herm = 0.5 * (m + m.conj().T)
    herm = herm - 0.5 * np.trace(herm) * np.eye(2)
    n = np.array([herm[0, 1].real, -herm[0, 1].imag, herm[0, 0].real])
    n /= np.linalg.norm(n)
    return float(n[0]), float(n[1]), float(n[2])


def band_structure(params: CoinParams, n_samples: int) -> BandStructure:
    """Quasi-energies and Bloch vectors on ``n_samples`` uniform points of ``[-pi, pi]``."""
    if n_samples < 3:
        raise InvalidArgumentError(f"n_samples must be >= 3, got {n_samples}")
    samples = []
    for k in np.linspace(-math.pi, math.pi, n_samples):
        e_plus, e_minus = quasi_energy(k, params)
        try:
            n = bloch_vector(k, params)
        except DegeneratePointError:
            n = None
        samples.append(BlochSample(float(k), e_plus, e_minus, n))
    return BandStructure(params, tuple(samples))


def oracle_grid_size(n_steps: int) -> int:
    """Next power of two ``>= 4 (n_steps + 1)``."""
    need = 4 * (n_steps + 1)
    return 1 << (need - 1).bit_length()


def momentum_evolve_oracle(
    initial: InitialState, params: CoinParams, n_steps: int
) -> WalkState:
    """
    Evolve by diagonalizing ``U(k)`` on a discrete k-grid.

    The grid has ``oracle_grid_size(n_steps)`` points, enough that the
    light cone ``[-N, N]`` never wraps around.
    """
    if n_steps < 0:
        raise InvalidArgumentError("n_steps must be non-negative")
    state = initial.prepare()
    if n_steps == 0:
        return state
    size = oracle_grid_size(n_steps)
    x0 = initial.position
    k = 2.0 * np.pi * np.arange(size) / size
    spinor = state.amplitudes[0]
    psi_k = spinor[None, :] * np.exp(-1j * k * x0)[:, None]

    c = coin(params)
    shift = np.stack([np.exp(-1j * k), np.exp(1j * k)], axis=1)
    u = shift[:, :, None] * c[None, :, :]
    vals, vecs = np.linalg.eig(u)
    vecs = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    # U^N = V diag(lambda^N) V^-1 in the eigenbasis
    powered = np.einsum("kij,kj,kjl->kil", vecs, vals ** n_steps, np.linalg.inv(vecs))
    near = np.abs(vals[:, 0] - vals[:, 1]) < 1e-6
    for i in np.nonzero(near)[0]:
        powered[i] = np.linalg.matrix_power(u[i], n_steps)
    psi_k = np.einsum("kij,kj->ki", powered, psi_k)

    positions = np.arange(x0 - n_steps, x0 + n_steps + 1)
    phases = np.exp(1j * np.outer(positions, k))
    amps = phases @ psi_k / size
    return WalkState(x0 - n_steps, amps, n_steps)
