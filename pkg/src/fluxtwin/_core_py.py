"""Pure-Python implementations of the hot kernels.

Signatures mirror :mod:`fluxtwin._core` exactly; :mod:`fluxtwin._backend`
picks one at import time. Inputs are assumed validated by the callers.
"""
import math
import sys

import numpy as np

EPS = sys.float_info.epsilon

# status codes shared with the compiled core
OK = 0
COINCIDENT = 1
TOO_COARSE = 2


def reduce_letters(letters):
    """Shortlex normal form of a twin-group word given as 1-based letters."""
    out = []
    for a in letters:
        cancelled = False
        for k in range(len(out) - 1, -1, -1):
            b = out[k]
            if b == a:
                del out[k]
                cancelled = True
                break
            if b - a == 1 or a - b == 1:
                break
        if not cancelled:
            out.append(a)

    # Pull the smallest letter that commutes with everything before it.
    word = out
    result = []
    while word:
        best = -1
        for p, a in enumerate(word):
            if best >= 0 and a >= word[best]:
                continue
            for q in range(p):
                d = word[q] - a
                if -2 < d < 2:
                    break
            else:
                best = p
        result.append(word.pop(best))
    return result


def _triple_uv(x, m, i, j, k):
    mi, mj, mk = m[i], m[j], m[k]
    mu1 = mi * mj / (mi + mj)
    mu2 = (mi + mj) * mk / (mi + mj + mk)
    xi1 = x[i] - x[j]
    xi2 = (mi * (x[i] - x[k]) + mj * (x[j] - x[k])) / (mi + mj)
    return math.sqrt(mu1) * xi1, math.sqrt(mu2) * xi2


def sweep_angles(points, masses, triples, eps, mu0, max_depth):
    """Unwrapped triple-angle increments along a polyline.

    Parameters
    ----------
    points : (T, n) float array
        Polyline vertices in configuration space.
    masses : (n,) float array
    triples : (K, 3) int array
        Zero-based particle indices, ``i < j < k``.
    eps : float
        Exclusion hyperradius.
    mu0 : float
        Reference mass scale.
    max_depth : int
        Maximum number of bisection rounds per segment.

    Returns
    -------
    dtheta : (K,) float array
    min_r : (K,) float array
        Exact minimum hyperradius over the polyline, per triple.
    status : int
    where : tuple of int
        ``(triple, segment)`` of the first failure, ``(-1, -1)`` on success.
    """
    points = np.asarray(points, dtype=float)
    m = np.asarray(masses, dtype=float)
    nt = len(triples)
    dtheta = np.zeros(nt)
    min_r = np.full(nt, np.inf)
    smu0 = math.sqrt(mu0)
    half_pi = 0.5 * math.pi
    for t in range(nt):
        i, j, k = (int(v) for v in triples[t])
        total = 0.0
        rmin = math.inf
        u1, v1 = _triple_uv(points[0], m, i, j, k)
        for s in range(len(points) - 1):
            u0, v0 = u1, v1
            u1, v1 = _triple_uv(points[s + 1], m, i, j, k)
            du, dv = u1 - u0, v1 - v0
            dd = du * du + dv * dv
            if dd > 0.0:
                tc = min(1.0, max(0.0, -(u0 * du + v0 * dv) / dd))
            else:
                tc = 0.0
            r = math.hypot(u0 + tc * du, v0 + tc * dv) / smu0
            if r < rmin:
                rmin = r
            if r <= eps:
                min_r[t] = rmin
                return dtheta, min_r, COINCIDENT, (t, s)
            pieces = 1
            for _ in range(max_depth + 1):
                acc = 0.0
                worst = 0.0
                prev = math.atan2(v0, u0)
                for q in range(1, pieces + 1):
                    f = q / pieces
                    cur = math.atan2(v0 + f * dv, u0 + f * du)
                    step = cur - prev
                    if step > math.pi:
                        step -= 2.0 * math.pi
                    elif step <= -math.pi:
                        step += 2.0 * math.pi
                    worst = max(worst, abs(step))
                    acc += step
                    prev = cur
                if worst < half_pi:
                    break
                pieces *= 2
            else:
                min_r[t] = rmin
                return dtheta, min_r, TOO_COARSE, (t, s)
            total += acc
        dtheta[t] = total
        min_r[t] = rmin
    return dtheta, min_r, OK, (-1, -1)


def _finish(terms):
    mags = [abs(z) for z in terms]
    value = 0j
    for z in terms:
        value += z
    tail = max(mags[0], mags[-1]) + len(terms) * EPS * sum(mags)
    return value, tail


def covering_sum(phi, alpha, inertia, hbar, time, imaginary, n_wind):
    """Winding-weighted sum of free ring kernels at angle differences ``phi``."""
    phi = np.asarray(phi, dtype=float)
    values = np.empty(phi.shape, dtype=complex)
    tails = np.empty(phi.shape)
    if imaginary:
        pref = math.sqrt(inertia / (2.0 * math.pi * hbar * time))
    else:
        pref = np.sqrt(inertia / (2j * math.pi * hbar * time))
    two_pi = 2.0 * math.pi
    for p, f in enumerate(phi.flat):
        terms = []
        for n in range(-n_wind, n_wind + 1):
            s = f - two_pi * n
            weight = complex(math.cos(two_pi * alpha * n), math.sin(two_pi * alpha * n))
            if imaginary:
                g = pref * math.exp(-inertia * s * s / (2.0 * hbar * time))
            else:
                ph = inertia * s * s / (2.0 * hbar * time)
                g = pref * complex(math.cos(ph), math.sin(ph))
            terms.append(weight * g)
        values.flat[p], tails.flat[p] = _finish(terms)
    return values, tails


def mode_sum(phi, alpha, inertia, hbar, time, imaginary, n_modes):
    """Twisted-ring eigenmode expansion of the kernel at angle differences ``phi``."""
    phi = np.asarray(phi, dtype=float)
    values = np.empty(phi.shape, dtype=complex)
    tails = np.empty(phi.shape)
    rate = hbar * time / (2.0 * inertia)
    inv = 1.0 / (2.0 * math.pi)
    for p, f in enumerate(phi.flat):
        terms = []
        for m in range(-n_modes, n_modes + 1):
            q = m + alpha
            ph = q * f
            if imaginary:
                g = inv * math.exp(-rate * q * q)
                terms.append(complex(g * math.cos(ph), g * math.sin(ph)))
            else:
                ph -= rate * q * q
                terms.append(complex(inv * math.cos(ph), inv * math.sin(ph)))
        values.flat[p], tails.flat[p] = _finish(terms)
    return values, tails
