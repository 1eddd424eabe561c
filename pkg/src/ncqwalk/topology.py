"""
Gap closings over the (theta, phi) plane and the (Q0, Qpi) parity invariants.

Writing the dispersion as ``cos E = A cos(k - delta)`` with
``A = sqrt(cos^2 t cos^2 p + sin^2 t sin^2 p)`` shows that both gaps equal
``arccos(A)``. ``A = 1`` exactly on the lattice
``{(m pi/2, n pi/2) : m + n even}``, where the E=0 and E=pi gaps close
together.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from ncqwalk import _backend
from ncqwalk.coins import CoinParams
from ncqwalk.errors import InvalidArgumentError, ResolutionError

__all__ = [
    "GapReport",
    "DiracPoint",
    "InvariantPair",
    "PhaseDiagram",
    "dispersion_amplitude",
    "closed_form_gap",
    "gap_report",
    "gap_grid",
    "closure_lattice",
    "dirac_points",
    "invariants",
    "phase_diagram",
    "CLOSURE_TOL",
]

CLOSURE_TOL = 1e-7
# lattice-membership tolerance for segment points, in radians
_LATTICE_TOL = 1e-9


@dataclass(frozen=True)
class GapReport:
    params: CoinParams
    gap_zero: float
    gap_pi: float
    k_at_gap_zero: float
    k_at_gap_pi: float


@dataclass(frozen=True)
class DiracPoint:
    theta: float
    phi: float
    k: float
    energy_label: float  # 0.0 or math.pi


@dataclass(frozen=True)
class InvariantPair:
    q_zero: int
    q_pi: int
    crossings_zero: int
    crossings_pi: int
    boundary_flag: bool


@dataclass(frozen=True)
class PhaseDiagram:
    """Per-cell gaps and invariants on a uniform grid; arrays are indexed ``[i_theta, j_phi]``."""

    theta_grid: NDArray[np.float64]
    phi_grid: NDArray[np.float64]
    gap_zero: NDArray[np.float64]
    gap_pi: NDArray[np.float64]
    k_at_gap_zero: NDArray[np.float64]
    k_at_gap_pi: NDArray[np.float64]
    q_zero: NDArray[np.int8]
    q_pi: NDArray[np.int8]
    crossings: NDArray[np.int64]
    boundary: NDArray[np.bool_]
    k_resolution: int
    samples_along_line: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.gap_zero.shape

    def cell(self, i: int, j: int) -> tuple[GapReport, InvariantPair]:
        params = CoinParams(self.theta_grid[i], self.phi_grid[j])
        gap = GapReport(params, float(self.gap_zero[i, j]), float(self.gap_pi[i, j]),
                        float(self.k_at_gap_zero[i, j]), float(self.k_at_gap_pi[i, j]))
        n = int(self.crossings[i, j])
        inv = InvariantPair(int(self.q_zero[i, j]), int(self.q_pi[i, j]), n, n,
                            bool(self.boundary[i, j]))
        return gap, inv


def dispersion_amplitude(theta, phi):
    """``A(theta, phi)``, the amplitude of ``cos E`` over the Brillouin zone."""
    return np.sqrt((np.cos(theta) * np.cos(phi)) ** 2 + (np.sin(theta) * np.sin(phi)) ** 2)


def closed_form_gap(theta, phi):
    """``arccos(A)`` computed as ``atan2(sqrt(1 - A^2), A)`` for precision near closures."""
    s2 = (np.cos(phi) * np.sin(theta)) ** 2 + (np.sin(phi) * np.cos(theta)) ** 2
    return np.arctan2(np.sqrt(s2), dispersion_amplitude(theta, phi))


def gap_report(params: CoinParams, k_resolution: int = 256) -> GapReport:
    """
    Numerically minimize ``|E|`` and ``|pi - E|`` over the Brillouin zone.

    A uniform k-grid locates the minimum; golden-section search refines it to
    1e-10 in ``k``.
    """
    if k_resolution < 64:
        raise InvalidArgumentError(f"k_resolution must be >= 64, got {k_resolution}")
    g0, gpi, k0, kpi = _backend.kernels.gap_scan(
        np.array([params.theta]), np.array([params.phi]), int(k_resolution)
    )
    return GapReport(params, float(g0[0]), float(gpi[0]), float(k0[0]), float(kpi[0]))


def gap_grid(theta: NDArray, phi: NDArray, k_resolution: int = 256):
    """Vectorized ``gap_report`` over arrays; returns ``(gap0, gap_pi, k0, k_pi)``."""
    if k_resolution < 64:
        raise InvalidArgumentError(f"k_resolution must be >= 64, got {k_resolution}")
    return _backend.kernels.gap_scan(np.asarray(theta, float), np.asarray(phi, float),
                                     int(k_resolution))


def closure_lattice() -> list[tuple[float, float]]:
    """The 13 points ``(m pi/2, n pi/2)``, ``m + n`` even, inside ``[-pi, pi]^2``."""
    return [
        (m * math.pi / 2, n * math.pi / 2)
        for m in range(-2, 3)
        for n in range(-2, 3)
        if (m + n) % 2 == 0
    ]


def _closure_residual(x):
    theta, phi = x
    return [math.cos(phi) * math.sin(theta), math.sin(phi) * math.cos(theta)]


def _refine_closure(theta0: float, phi0: float) -> tuple[float, float]:
    sol = least_squares(
        _closure_residual, x0=[theta0, phi0],
        bounds=([-math.pi, -math.pi], [math.pi, math.pi]),
        xtol=1e-15, ftol=1e-15, gtol=1e-15,
    )
    return float(sol.x[0]), float(sol.x[1])


def dirac_points(resolution: int = 101, k_resolution: int = 256) -> list[DiracPoint]:
    """
    Locate every gap closing in ``[-pi, pi]^2``.

    Candidates are grid-local minima of the closed-form gap, refined by a
    least-squares root solve, then confirmed with ``gap_report``. One
    ``DiracPoint`` is returned per (point, closed label).
    """
    if resolution < 101:
        raise InvalidArgumentError(f"resolution must be >= 101, got {resolution}")
    axis = np.linspace(-math.pi, math.pi, resolution)
    th, ph = np.meshgrid(axis, axis, indexing="ij")
    gap = closed_form_gap(th, ph)
    padded = np.pad(gap, 1, constant_values=np.inf)
    is_min = np.ones_like(gap, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            nb = padded[1 + di:1 + di + resolution, 1 + dj:1 + dj + resolution]
            is_min &= gap <= nb
    # gap grows at most linearly with distance from a closure
    spacing = axis[1] - axis[0]
    candidates = np.argwhere(is_min & (gap < 2.0 * spacing))

    centers: list[tuple[float, float]] = []
    for i, j in candidates:
        if max(abs(r) for r in _closure_residual((axis[i], axis[j]))) < 1e-15:
            t, p = float(axis[i]), float(axis[j])
        else:
            t, p = _refine_closure(axis[i], axis[j])
        if any(abs(t - a) < 1e-6 and abs(p - b) < 1e-6 for a, b in centers):
            continue
        centers.append((t, p))

    points = []
    for t, p in sorted(centers):
        rep = gap_report(CoinParams(t, p), k_resolution)
        if rep.gap_zero < CLOSURE_TOL:
            points.append(DiracPoint(t, p, rep.k_at_gap_zero, 0.0))
        if rep.gap_pi < CLOSURE_TOL:
            points.append(DiracPoint(t, p, rep.k_at_gap_pi, math.pi))
    return points


def _lattice_hits(theta_t: float, phi_t: float) -> list[float]:
    """Parameters ``t in (0, 1]`` where the segment passes exactly through a closure point."""
    norm2 = theta_t * theta_t + phi_t * phi_t
    hits = []
    for a, b in closure_lattice():
        if a == 0.0 and b == 0.0:
            continue
        cross = theta_t * b - phi_t * a
        if abs(cross) > _LATTICE_TOL * math.sqrt(norm2):
            continue
        t = (theta_t * a + phi_t * b) / norm2
        if t <= 0.0 or t > 1.0 + _LATTICE_TOL:
            continue
        # the point must actually lie on the segment, not on its extension
        if math.hypot(t * theta_t - a, t * phi_t - b) > _LATTICE_TOL * 10:
            continue
        hits.append(min(t, 1.0))
    return sorted(hits)


def invariants(target: CoinParams, samples_along_line: int = 1000) -> InvariantPair:
    """
    Parity of gap closings along the straight line from ``(0, 0)`` to ``target``.

    The origin itself is excluded. A closure at the target sets
    ``boundary_flag`` and is not counted: the reported parities are those of
    the segment ``(0, 1)`` approached from the origin. Every closure shuts the
    E=0 and E=pi gaps together, so both counters move in step.

    Raises
    ------
    ResolutionError
        If two refined events lie closer together than one scan step.
    """
    if samples_along_line < 1000:
        raise InvalidArgumentError(
            f"samples_along_line must be >= 1000, got {samples_along_line}"
        )
    theta_t, phi_t = target.theta, target.phi
    if theta_t == 0.0 and phi_t == 0.0:
        return InvariantPair(0, 0, 0, 0, True)

    scan_step = 1.0 / samples_along_line
    minima = _backend.kernels.segment_minima(theta_t, phi_t, int(samples_along_line))
    events = [float(t) for t, g in minima if g < CLOSURE_TOL and t > 0.5 * scan_step]
    for a, b in zip(events, events[1:]):
        if b - a < scan_step:
            raise ResolutionError(
                f"closure events at t={a!r} and t={b!r} are closer than the scan step; "
                "increase samples_along_line"
            )
    for t in _lattice_hits(theta_t, phi_t):
        if not any(abs(t - e) < scan_step for e in events):
            events.append(t)
    events.sort()

    boundary = bool(closed_form_gap(theta_t, phi_t) < CLOSURE_TOL)
    interior = [t for t in events if t < 1.0 - scan_step] if boundary else events
    n = len(interior)
    return InvariantPair(n % 2, n % 2, n, n, boundary)


def _default_workers() -> int:
    raw = os.environ.get("QW_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def phase_diagram(
    resolution: int = 101,
    k_resolution: int = 256,
    samples_along_line: int = 1000,
    workers: int | None = None,
) -> PhaseDiagram:
    """
    Gap reports and invariants on a ``resolution x resolution`` grid over ``[-pi, pi]^2``.

    ``workers`` (default: the ``QW_THREADS`` environment variable, else 1)
    splits the invariant scans over threads; results do not depend on it.
    """
    if resolution < 51:
        raise InvalidArgumentError(f"resolution must be >= 51, got {resolution}")
    axis = np.linspace(-math.pi, math.pi, resolution)
    th, ph = np.meshgrid(axis, axis, indexing="ij")
    g0, gpi, k0, kpi = gap_grid(th, ph, k_resolution)

    def row(i):
        out = []
        for j in range(resolution):
            out.append(invariants(CoinParams(axis[i], axis[j]), samples_along_line))
        return out

    workers = workers or _default_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(resolution)))
    else:
        rows = [row(i) for i in range(resolution)]

    q0 = np.array([[c.q_zero for c in r] for r in rows], dtype=np.int8)
    qpi = np.array([[c.q_pi for c in r] for r in rows], dtype=np.int8)
    crossings = np.array([[c.crossings_zero for c in r] for r in rows], dtype=np.int64)
    boundary = np.array([[c.boundary_flag for c in r] for r in rows], dtype=bool)
    return PhaseDiagram(axis, axis.copy(), g0, gpi, k0, kpi, q0, qpi, crossings, boundary,
                        int(k_resolution), int(samples_along_line))
