"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The package imports whichever is available through ``ncqwalk._backend``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def evolve_dense(coin: np.ndarray, amps: np.ndarray, n_steps: int) -> np.ndarray:
    """Apply ``n_steps`` coin+shift steps to a dense ``(L, 2)`` amplitude block.

    The returned block has ``L + 2*n_steps`` rows; its first row sits
    ``n_steps`` sites to the left of the input's first row.
    """
    c00, c01 = coin[0, 0], coin[0, 1]
    c10, c11 = coin[1, 0], coin[1, 1]
    size = amps.shape[0]
    h = np.zeros(size + 2 * n_steps, dtype=np.complex128)
    v = np.zeros(size + 2 * n_steps, dtype=np.complex128)
    lo, hi = n_steps, n_steps + size
    h[lo:hi] = amps[:, 0]
    v[lo:hi] = amps[:, 1]
    for _ in range(n_steps):
        hw = h[lo:hi]
        vw = v[lo:hi]
        hc = c00 * hw + c01 * vw
        vc = c10 * hw + c11 * vw
        h[lo + 1:hi + 1] = hc
        h[lo] = 0.0
        v[lo - 1:hi - 1] = vc
        v[hi - 1] = 0.0
        lo -= 1
        hi += 1
    return np.stack([h, v], axis=1)


def path_sum(coin: np.ndarray, h0: complex, v0: complex, n_steps: int) -> np.ndarray:
    """Sum amplitudes over all ``2**n_steps`` shift histories from one site.

    Row ``j`` of the result is position ``j - n_steps`` relative to the start.
    Direction 0 is H (moves right), direction 1 is V (moves left).
    """
    c = [[complex(coin[0, 0]), complex(coin[0, 1])],
         [complex(coin[1, 0]), complex(coin[1, 1])]]
    out = np.zeros((2 * n_steps + 1, 2), dtype=np.complex128)
    if n_steps == 0:
        out[0, 0] = h0
        out[0, 1] = v0
        return out
    first = (c[0][0] * h0 + c[0][1] * v0, c[1][0] * h0 + c[1][1] * v0)
    for path in itertools.product((0, 1), repeat=n_steps):
        amp = first[path[0]]
        for prev, cur in zip(path, path[1:]):
            amp *= c[cur][prev]
        lefts = sum(path)
        pos = n_steps - 2 * lefts
        out[pos + n_steps, path[-1]] += amp
    return out


def _energy(k, ct, st, cp, sp):
    # atan2 form keeps precision where cos E is close to +-1
    cc = ct * cp
    ss = st * sp
    re = np.cos(k) * cc + np.sin(k) * ss
    im = -np.sin(k) * cc + np.cos(k) * ss
    b2 = (cp * st) ** 2 + (sp * ct) ** 2
    return np.arctan2(np.sqrt(im * im + b2), re)


def _golden_batch(f, a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized golden-section minimization of ``f`` on each ``[a_i, b_i]``."""
    a = a.copy()
    b = b.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = f(c)
    fd = f(d)
    while np.any(b - a > tol):
        left = fc < fd
        # left: minimum in [a, d]; else in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_d = np.where(left, c, a + _INVPHI * (b - a))
        new_c = np.where(left, b - _INVPHI * (b - a), d)
        fd_keep = np.where(left, fc, fd)
        fc_keep = np.where(left, fc, fd)
        c, d = new_c, new_d
        fc_new = f(c)
        fd_new = f(d)
        fc = np.where(left, fc_new, fc_keep)
        fd = np.where(left, fd_keep, fd_new)
    x = 0.5 * (a + b)
    return x


def _refine_bracket(grid: np.ndarray, idx: np.ndarray):
    n = grid.shape[0]
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, n - 1)]
    return lo, hi


def _wrap(k):
    return np.where(k > np.pi, k - 2 * np.pi, np.where(k < -np.pi, k + 2 * np.pi, k))


def gap_scan(theta: np.ndarray, phi: np.ndarray, k_resolution: int):
    """Minimal distances of the upper band to E=0 and E=pi, per parameter pair.

    Returns ``(gap0, gap_pi, k0, k_pi)`` arrays with the shape of ``theta``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    shape = theta.shape
    t = theta.ravel()
    p = phi.ravel()
    ct, st, cp, sp = np.cos(t), np.sin(t), np.cos(p), np.sin(p)
    k = np.linspace(-np.pi, np.pi, k_resolution)
    energy = _energy(k[None, :], ct[:, None], st[:, None], cp[:, None], sp[:, None])
    i0 = np.argmin(energy, axis=1)
    ipi = np.argmax(energy, axis=1)

    def e_of(kk):
        return _energy(kk, ct, st, cp, sp)

    # k is periodic, so brackets may cross the zone edge
    h = k[1] - k[0]
    k0 = _wrap(_golden_batch(e_of, k[i0] - h, k[i0] + h, 1e-10))
    kpi = _wrap(_golden_batch(lambda kk: -e_of(kk), k[ipi] - h, k[ipi] + h, 1e-10))

    g0 = e_of(k0)
    gpi = np.pi - e_of(kpi)
    # the grid point can beat the refined one on flat bands
    grid0 = energy[np.arange(t.size), i0]
    gridpi = np.pi - energy[np.arange(t.size), ipi]
    use = grid0 < g0
    g0 = np.where(use, grid0, g0)
    k0 = np.where(use, k[i0], k0)
    use = gridpi < gpi
    gpi = np.where(use, gridpi, gpi)
    kpi = np.where(use, k[ipi], kpi)
    return (g0.reshape(shape), gpi.reshape(shape),
            k0.reshape(shape), kpi.reshape(shape))


def _beta2(t, theta_t, phi_t):
    th = t * theta_t
    ph = t * phi_t
    return (np.cos(ph) * np.sin(th)) ** 2 + (np.sin(ph) * np.cos(th)) ** 2


def _segment_gap(t, theta_t, phi_t):
    th = t * theta_t
    ph = t * phi_t
    a = np.sqrt((np.cos(th) * np.cos(ph)) ** 2 + (np.sin(th) * np.sin(ph)) ** 2)
    return np.arctan2(np.sqrt(_beta2(t, theta_t, phi_t)), a)


def segment_minima(theta_t: float, phi_t: float, samples: int) -> np.ndarray:
    """Refined local minima of the closed-form gap along ``t -> t*(theta_t, phi_t)``.

    Returns an ``(m, 2)`` array of ``(t, gap)`` rows sorted by ``t``.
    """
    t = np.linspace(0.0, 1.0, samples + 1)
    g = _segment_gap(t, theta_t, phi_t)
    left = np.concatenate(([np.inf], g[:-1]))
    right = np.concatenate((g[1:], [np.inf]))
    idx = np.nonzero((g < left) & (g <= right))[0]
    if idx.size == 0:
        return np.empty((0, 2))
    lo, hi = _refine_bracket(t, idx)
    tr = _golden_batch(lambda tt: _beta2(tt, theta_t, phi_t), lo, hi, 1e-13)
    # endpoints of [0, 1] can be the true minimizers
    gr = _segment_gap(tr, theta_t, phi_t)
    grid_g = g[idx]
    use = grid_g <= gr
    tr = np.where(use, t[idx], tr)
    gr = np.where(use, grid_g, gr)
    return np.stack([tr, gr], axis=1)
