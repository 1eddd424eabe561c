"""
Coin operators for the two-rotation walk.

All matrices are 2x2 ``complex128`` arrays in the (H, V) polarization basis.
The step coin is ``Rx(phi) @ Ry(theta)``: the y-rotation acts first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ncqwalk.errors import InvalidArgumentError

__all__ = [
    "CoinParams",
    "wrap_angle",
    "rotation_y",
    "rotation_x",
    "rotation_axis",
    "coin",
    "is_unitary",
]

CoinMatrix = NDArray[np.complex128]


def wrap_angle(angle: float) -> float:
    """Map ``angle`` into ``[-pi, pi]``; values already inside are untouched."""
    angle = float(angle)
    if not math.isfinite(angle):
        raise InvalidArgumentError(f"angle must be finite, got {angle!r}")
    if -math.pi <= angle <= math.pi:
        return angle
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class CoinParams:
    """Rotation angles ``(theta, phi)`` in radians, wrapped into ``[-pi, pi]``."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))
        object.__setattr__(self, "phi", wrap_angle(self.phi))


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
    return value


def rotation_y(theta: float) -> CoinMatrix:
    """Real rotation ``[[cos t, -sin t], [sin t, cos t]]`` (full angle, not t/2)."""
    theta = _check_finite("theta", theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rotation_x(phi: float) -> CoinMatrix:
    """Rotation ``[[cos p, i sin p], [i sin p, cos p]]``."""
    phi = _check_finite("phi", phi)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


def rotation_axis(axis, theta: float) -> CoinMatrix:
    """
    Rotation by ``theta`` about the unit vector ``axis = (nx, ny, nz)``.

    Parameters
    ----------
    axis : sequence of 3 floats
        Rotation axis; must have unit length to within 1e-9.
    theta : float
        Rotation angle in radians.

    Returns
    -------
    ndarray
        ``[[cos t - i nz sin t, (i nx - ny) sin t],
        [(i nx + ny) sin t, cos t + i nz sin t]]``.
    """
    theta = _check_finite("theta", theta)
    nx, ny, nz = (float(v) for v in axis)
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if not math.isfinite(norm) or abs(norm - 1.0) > 1e-9:
        raise InvalidArgumentError(f"axis must be a unit vector, |n|={norm!r}")
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [complex(c, -nz * s), complex(-ny * s, nx * s)],
            [complex(ny * s, nx * s), complex(c, nz * s)],
        ],
        dtype=np.complex128,
    )


def coin(params: CoinParams) -> CoinMatrix:
    """Step coin ``Rx(phi) @ Ry(theta)``."""
    return rotation_x(params.phi) @ rotation_y(params.theta)


def is_unitary(matrix: CoinMatrix, atol: float = 1e-12) -> bool:
    """True when ``M M^dagger = I`` and ``|det M| = 1`` within ``atol``."""
    m = np.asarray(matrix)
    ident = np.eye(m.shape[0])
    if np.max(np.abs(m @ m.conj().T - ident)) > atol:
        return False
    return abs(abs(np.linalg.det(m)) - 1.0) <= atol
