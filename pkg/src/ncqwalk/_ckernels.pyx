# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and semantics as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt, INFINITY, M_PI

cnp.import_array()

cdef double INVPHI = 0.6180339887498949


def evolve_dense(coin, amps, Py_ssize_t n_steps):
    cdef double c00r = coin[0, 0].real, c00i = coin[0, 0].imag
    cdef double c01r = coin[0, 1].real, c01i = coin[0, 1].imag
    cdef double c10r = coin[1, 0].real, c10i = coin[1, 0].imag
    cdef double c11r = coin[1, 1].real, c11i = coin[1, 1].imag
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t total = size + 2 * n_steps
    src = np.ascontiguousarray(amps, dtype=np.complex128).view(np.float64)
    out = np.zeros((total, 4), dtype=np.float64)
    cdef double[:, ::1] a = out
    cdef const double[:, ::1] s = src
    cdef Py_ssize_t i, g, step
    cdef Py_ssize_t lo = n_steps, hi = n_steps + size
    cdef double hr, hi_, vr, vi
    for i in range(size):
        a[lo + i, 0] = s[i, 0]
        a[lo + i, 1] = s[i, 1]
        a[lo + i, 2] = s[i, 2]
        a[lo + i, 3] = s[i, 3]
    with nogil:
        for step in range(n_steps):
            for g in range(lo, hi):
                hr = a[g, 0]
                hi_ = a[g, 1]
                vr = a[g, 2]
                vi = a[g, 3]
                a[g, 0] = (c00r * hr - c00i * hi_) + (c01r * vr - c01i * vi)
                a[g, 1] = (c00r * hi_ + c00i * hr) + (c01r * vi + c01i * vr)
                a[g, 2] = (c10r * hr - c10i * hi_) + (c11r * vr - c11i * vi)
                a[g, 3] = (c10r * hi_ + c10i * hr) + (c11r * vi + c11i * vr)
            # H moves right, V moves left
            g = hi - 1
            while g >= lo:
                a[g + 1, 0] = a[g, 0]
                a[g + 1, 1] = a[g, 1]
                g -= 1
            a[lo, 0] = 0.0
            a[lo, 1] = 0.0
            for g in range(lo, hi):
                a[g - 1, 2] = a[g, 2]
                a[g - 1, 3] = a[g, 3]
            a[hi - 1, 2] = 0.0
            a[hi - 1, 3] = 0.0
            lo -= 1
            hi += 1
    return out.view(np.complex128).reshape(total, 2)


def path_sum(coin, h0, v0, int n_steps):
    cdef double cr[2][2]
    cdef double ci[2][2]
    cdef int r, c
    for r in range(2):
        for c in range(2):
            cr[r][c] = coin[r, c].real
            ci[r][c] = coin[r, c].imag
    out = np.zeros((2 * n_steps + 1, 4), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double h0r = complex(h0).real, h0i = complex(h0).imag
    cdef double v0r = complex(v0).real, v0i = complex(v0).imag
    if n_steps == 0:
        o[0, 0] = h0r
        o[0, 1] = h0i
        o[0, 2] = v0r
        o[0, 3] = v0i
        return out.view(np.complex128).reshape(1, 2)
    cdef double fr[2]
    cdef double fi[2]
    for r in range(2):
        fr[r] = (cr[r][0] * h0r - ci[r][0] * h0i) + (cr[r][1] * v0r - ci[r][1] * v0i)
        fi[r] = (cr[r][0] * h0i + ci[r][0] * h0r) + (cr[r][1] * v0i + ci[r][1] * v0r)
    cdef unsigned long long mask, npaths = 1ULL << n_steps
    cdef int j, d, prev, lefts
    cdef double ar, ai, tr
    cdef Py_ssize_t row
    with nogil:
        for mask in range(npaths):
            # bit j is the direction taken at step j (0: H, 1: V)
            d = <int>(mask & 1ULL)
            ar = fr[d]
            ai = fi[d]
            lefts = d
            prev = d
            for j in range(1, n_steps):
                d = <int>((mask >> j) & 1ULL)
                tr = ar * cr[d][prev] - ai * ci[d][prev]
                ai = ar * ci[d][prev] + ai * cr[d][prev]
                ar = tr
                lefts += d
                prev = d
            row = 2 * (n_steps - lefts)
            o[row, 2 * prev] += ar
            o[row, 2 * prev + 1] += ai
    return out.view(np.complex128).reshape(2 * n_steps + 1, 2)


cdef inline double _energy(double k, double ct, double st, double cp, double sp) nogil:
    cdef double cc = ct * cp
    cdef double ss = st * sp
    cdef double ck = cos(k), sk = sin(k)
    cdef double re = ck * cc + sk * ss
    cdef double im = -sk * cc + ck * ss
    cdef double b2 = (cp * st) * (cp * st) + (sp * ct) * (sp * ct)
    return atan2(sqrt(im * im + b2), re)


cdef inline double _golden_energy(double a, double b, double ct, double st,
                                  double cp, double sp, double sign,
                                  double tol) nogil:
    cdef double c = b - INVPHI * (b - a)
    cdef double d = a + INVPHI * (b - a)
    cdef double fc = sign * _energy(c, ct, st, cp, sp)
    cdef double fd = sign * _energy(d, ct, st, cp, sp)
    while b - a > tol:
        if fc < fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            fc = sign * _energy(c, ct, st, cp, sp)
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            fd = sign * _energy(d, ct, st, cp, sp)
    return 0.5 * (a + b)


cdef inline double _wrap(double k) nogil:
    if k > M_PI:
        return k - 2.0 * M_PI
    if k < -M_PI:
        return k + 2.0 * M_PI
    return k


def gap_scan(theta, phi, int k_resolution):
    theta_arr = np.ascontiguousarray(theta, dtype=np.float64)
    phi_arr = np.ascontiguousarray(phi, dtype=np.float64)
    shape = theta_arr.shape
    cdef double[::1] t = theta_arr.ravel()
    cdef double[::1] p = phi_arr.ravel()
    cdef Py_ssize_t n = t.shape[0]
    g0_arr = np.empty(n)
    gpi_arr = np.empty(n)
    k0_arr = np.empty(n)
    kpi_arr = np.empty(n)
    kgrid = np.linspace(-np.pi, np.pi, k_resolution)
    cdef double[::1] kg = kgrid
    cdef double[::1] g0 = g0_arr, gpi = gpi_arr, k0 = k0_arr, kpi = kpi_arr
    cdef Py_ssize_t i, j, jmin, jmax
    cdef double h = kg[1] - kg[0]
    cdef double ct, st, cp, sp, e, emin, emax, kr, er
    with nogil:
        for i in range(n):
            ct = cos(t[i])
            st = sin(t[i])
            cp = cos(p[i])
            sp = sin(p[i])
            emin = INFINITY
            emax = -INFINITY
            jmin = 0
            jmax = 0
            for j in range(k_resolution):
                e = _energy(kg[j], ct, st, cp, sp)
                if e < emin:
                    emin = e
                    jmin = j
                if e > emax:
                    emax = e
                    jmax = j
            # k is periodic, so brackets may cross the zone edge
            kr = _wrap(_golden_energy(kg[jmin] - h, kg[jmin] + h,
                                      ct, st, cp, sp, 1.0, 1e-10))
            er = _energy(kr, ct, st, cp, sp)
            if emin < er:
                g0[i] = emin
                k0[i] = kg[jmin]
            else:
                g0[i] = er
                k0[i] = kr
            kr = _wrap(_golden_energy(kg[jmax] - h, kg[jmax] + h,
                                      ct, st, cp, sp, -1.0, 1e-10))
            er = M_PI - _energy(kr, ct, st, cp, sp)
            if M_PI - emax < er:
                gpi[i] = M_PI - emax
                kpi[i] = kg[jmax]
            else:
                gpi[i] = er
                kpi[i] = kr
    return (g0_arr.reshape(shape), gpi_arr.reshape(shape),
            k0_arr.reshape(shape), kpi_arr.reshape(shape))


cdef inline double _beta2(double t, double th_t, double ph_t) nogil:
    cdef double th = t * th_t
    cdef double ph = t * ph_t
    cdef double x = cos(ph) * sin(th)
    cdef double y = sin(ph) * cos(th)
    return x * x + y * y


cdef inline double _seg_gap(double t, double th_t, double ph_t) nogil:
    cdef double th = t * th_t
    cdef double ph = t * ph_t
    cdef double x = cos(th) * cos(ph)
    cdef double y = sin(th) * sin(ph)
    return atan2(sqrt(_beta2(t, th_t, ph_t)), sqrt(x * x + y * y))


def segment_minima(double theta_t, double phi_t, int samples):
    grid = np.linspace(0.0, 1.0, samples + 1)
    cdef double[::1] tg = grid
    gvals = np.empty(samples + 1)
    cdef double[::1] g = gvals
    cdef Py_ssize_t i, m = samples + 1
    for i in range(m):
        g[i] = _seg_gap(tg[i], theta_t, phi_t)
    rows = []
    cdef double left, right, a, b, c, d, fc, fd, tr, gr
    for i in range(m):
        left = g[i - 1] if i > 0 else INFINITY
        right = g[i + 1] if i < m - 1 else INFINITY
        if not (g[i] < left and g[i] <= right):
            continue
        a = tg[i - 1] if i > 0 else tg[0]
        b = tg[i + 1] if i < m - 1 else tg[m - 1]
        c = b - INVPHI * (b - a)
        d = a + INVPHI * (b - a)
        fc = _beta2(c, theta_t, phi_t)
        fd = _beta2(d, theta_t, phi_t)
        while b - a > 1e-13:
            if fc < fd:
                b = d
                d = c
                fd = fc
                c = b - INVPHI * (b - a)
                fc = _beta2(c, theta_t, phi_t)
            else:
                a = c
                c = d
                fc = fd
                d = a + INVPHI * (b - a)
                fd = _beta2(d, theta_t, phi_t)
        tr = 0.5 * (a + b)
        gr = _seg_gap(tr, theta_t, phi_t)
        if g[i] <= gr:
            rows.append((tg[i], g[i]))
        else:
            rows.append((tr, gr))
    if not rows:
        return np.empty((0, 2))
    return np.array(rows, dtype=np.float64)
