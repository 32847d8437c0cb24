# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see :mod:`fluxtwin._core_py` for the reference versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, sqrt, exp, cos, sin, fabs, hypot, M_PI, INFINITY
from libc.float cimport DBL_EPSILON

cnp.import_array()

OK = 0
COINCIDENT = 1
TOO_COARSE = 2


def reduce_letters(letters):
    cdef Py_ssize_t n = len(letters)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] word = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t size = 0, k, p, q, best
    cdef long a, b, d
    cdef bint cancelled, movable
    for p in range(n):
        a = letters[p]
        cancelled = False
        k = size - 1
        while k >= 0:
            b = word[k]
            if b == a:
                for q in range(k, size - 1):
                    word[q] = word[q + 1]
                size -= 1
                cancelled = True
                break
            if b - a == 1 or a - b == 1:
                break
            k -= 1
        if not cancelled:
            word[size] = a
            size += 1

    result = []
    while size > 0:
        best = -1
        for p in range(size):
            a = word[p]
            if best >= 0 and a >= word[best]:
                continue
            movable = True
            for q in range(p):
                d = word[q] - a
                if -2 < d < 2:
                    movable = False
                    break
            if movable:
                best = p
        result.append(int(word[best]))
        for q in range(best, size - 1):
            word[q] = word[q + 1]
        size -= 1
    return result


cdef inline void _uv(const double[:, :] x, Py_ssize_t row, const double[:] m,
                     Py_ssize_t i, Py_ssize_t j, Py_ssize_t k,
                     double *u, double *v) noexcept nogil:
    cdef double mi = m[i], mj = m[j], mk = m[k]
    cdef double mu1 = mi * mj / (mi + mj)
    cdef double mu2 = (mi + mj) * mk / (mi + mj + mk)
    u[0] = sqrt(mu1) * (x[row, i] - x[row, j])
    v[0] = sqrt(mu2) * (mi * (x[row, i] - x[row, k]) + mj * (x[row, j] - x[row, k])) / (mi + mj)


def sweep_angles(points, masses, triples, double eps, double mu0, int max_depth):
    cdef const double[:, :] x = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:] m = np.ascontiguousarray(masses, dtype=np.float64)
    cdef cnp.int64_t[:, :] tr = np.ascontiguousarray(triples, dtype=np.int64).reshape(-1, 3)
    cdef Py_ssize_t nt = tr.shape[0], ns = x.shape[0] - 1
    dtheta_arr = np.zeros(nt)
    min_r_arr = np.full(nt, np.inf)
    cdef double[:] dtheta = dtheta_arr
    cdef double[:] min_r = min_r_arr
    cdef Py_ssize_t t, s, i, j, k, q, pieces
    cdef int depth
    cdef double u0, v0, u1, v1, du, dv, dd, tc, r, rmin, total, acc, worst, prev, cur, step, f
    cdef double smu0 = sqrt(mu0), half_pi = 0.5 * M_PI
    cdef bint ok
    for t in range(nt):
        i = tr[t, 0]; j = tr[t, 1]; k = tr[t, 2]
        total = 0.0
        rmin = INFINITY
        _uv(x, 0, m, i, j, k, &u1, &v1)
        for s in range(ns):
            u0 = u1; v0 = v1
            _uv(x, s + 1, m, i, j, k, &u1, &v1)
            du = u1 - u0; dv = v1 - v0
            dd = du * du + dv * dv
            tc = 0.0
            if dd > 0.0:
                tc = -(u0 * du + v0 * dv) / dd
                if tc < 0.0:
                    tc = 0.0
                elif tc > 1.0:
                    tc = 1.0
            r = hypot(u0 + tc * du, v0 + tc * dv) / smu0
            if r < rmin:
                rmin = r
            if r <= eps:
                min_r[t] = rmin
                return dtheta_arr, min_r_arr, COINCIDENT, (int(t), int(s))
            pieces = 1
            ok = False
            for depth in range(max_depth + 1):
                acc = 0.0
                worst = 0.0
                prev = atan2(v0, u0)
                for q in range(1, pieces + 1):
                    f = <double>q / pieces
                    cur = atan2(v0 + f * dv, u0 + f * du)
                    step = cur - prev
                    if step > M_PI:
                        step -= 2.0 * M_PI
                    elif step <= -M_PI:
                        step += 2.0 * M_PI
                    if fabs(step) > worst:
                        worst = fabs(step)
                    acc += step
                    prev = cur
                if worst < half_pi:
                    ok = True
                    break
                pieces *= 2
            if not ok:
                min_r[t] = rmin
                return dtheta_arr, min_r_arr, TOO_COARSE, (int(t), int(s))
            total += acc
        dtheta[t] = total
        min_r[t] = rmin
    return dtheta_arr, min_r_arr, OK, (-1, -1)


def covering_sum(phi, double alpha, double inertia, double hbar, double time,
                 bint imaginary, int n_wind):
    phi_arr = np.asarray(phi, dtype=np.float64)
    cdef const double[:] f = phi_arr.ravel()
    cdef Py_ssize_t npts = f.shape[0], p
    values_arr = np.empty(npts, dtype=np.complex128)
    tails_arr = np.empty(npts)
    cdef double complex[:] values = values_arr
    cdef double[:] tails = tails_arr
    cdef double complex pref, term, acc
    cdef double two_pi = 2.0 * M_PI, s, g, ph, mag, mag_sum, edge
    cdef int n
    if imaginary:
        pref = sqrt(inertia / (two_pi * hbar * time))
    else:
        pref = complex(np.sqrt(inertia / (2j * M_PI * hbar * time)))
    for p in range(npts):
        acc = 0.0
        mag_sum = 0.0
        edge = 0.0
        for n in range(-n_wind, n_wind + 1):
            s = f[p] - two_pi * n
            if imaginary:
                g = exp(-inertia * s * s / (2.0 * hbar * time))
                term = (cos(two_pi * alpha * n) + 1j * sin(two_pi * alpha * n)) * (pref * g)
            else:
                ph = inertia * s * s / (2.0 * hbar * time)
                term = (cos(two_pi * alpha * n) + 1j * sin(two_pi * alpha * n)) * pref * (cos(ph) + 1j * sin(ph))
            mag = abs(term)
            mag_sum += mag
            if (n == -n_wind or n == n_wind) and mag > edge:
                edge = mag
            acc = acc + term
        values[p] = acc
        tails[p] = edge + (2 * n_wind + 1) * DBL_EPSILON * mag_sum
    return values_arr.reshape(phi_arr.shape), tails_arr.reshape(phi_arr.shape)


def mode_sum(phi, double alpha, double inertia, double hbar, double time,
             bint imaginary, int n_modes):
    phi_arr = np.asarray(phi, dtype=np.float64)
    cdef const double[:] f = phi_arr.ravel()
    cdef Py_ssize_t npts = f.shape[0], p
    values_arr = np.empty(npts, dtype=np.complex128)
    tails_arr = np.empty(npts)
    cdef double complex[:] values = values_arr
    cdef double[:] tails = tails_arr
    cdef double complex term, acc
    cdef double rate = hbar * time / (2.0 * inertia), inv = 1.0 / (2.0 * M_PI)
    cdef double q, ph, g, mag, mag_sum, edge
    cdef int m
    for p in range(npts):
        acc = 0.0
        mag_sum = 0.0
        edge = 0.0
        for m in range(-n_modes, n_modes + 1):
            q = m + alpha
            ph = q * f[p]
            if imaginary:
                g = inv * exp(-rate * q * q)
                term = g * cos(ph) + 1j * (g * sin(ph))
            else:
                ph -= rate * q * q
                term = inv * cos(ph) + 1j * (inv * sin(ph))
            mag = abs(term)
            mag_sum += mag
            if (m == -n_modes or m == n_modes) and mag > edge:
                edge = mag
            acc = acc + term
        values[p] = acc
        tails[p] = edge + (2 * n_modes + 1) * DBL_EPSILON * mag_sum
    return values_arr.reshape(phi_arr.shape), tails_arr.reshape(phi_arr.shape)
