"""Background Abelian gauge field of idealised fluxes through triple coincidences.

Away from the coincidence loci the potential is pure gauge,
``A = hbar * sum_{ijk} alpha_ijk d(theta_ijk)``, so Wilson lines reduce to
``exp(i sum alpha_ijk * dtheta_ijk)`` with unwrapped angle changes. Direct
Gauss-Legendre quadrature of ``A . dx`` is kept as an independent route
(:func:`line_integral_quadrature`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .coords import (
    EPSILON,
    MAX_REFINE,
    MassSystem,
    Trajectory,
    Triple,
    all_triples,
    angle_increments,
    as_configuration,
    check_triple,
    triple_radius,
)
from .errors import CoincidenceError, InvalidLoopError, NotALoopError, SamplingTooCoarseError
from .twin import WINDING_TOL, TwinWord, is_pure, winding_numbers, word_to_trajectory


@dataclass
class FluxSet:
    """One real flux parameter per triple ``i < j < k``.

    Values are stored as given; physics depends only on ``alpha mod 1``.
    """

    n: int
    alpha: dict[Triple, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("a flux set needs n >= 3")
        expected = set(all_triples(self.n))
        alpha = {check_triple(k, self.n): float(v) for k, v in dict(self.alpha).items()}
        if set(alpha) != expected:
            missing = sorted(expected - set(alpha))
            raise ValueError(f"flux set must cover every triple; missing {missing}")
        self.alpha = {t: alpha[t] for t in sorted(alpha)}

    @classmethod
    def uniform(cls, n: int, alpha: float) -> "FluxSet":
        return cls(n, {t: alpha for t in all_triples(n)})

    @classmethod
    def single(cls, alpha: float) -> "FluxSet":
        return cls(3, {(1, 2, 3): alpha})

    def __getitem__(self, triple) -> float:
        return self.alpha[tuple(triple)]

    def with_value(self, triple, value: float) -> "FluxSet":
        new = dict(self.alpha)
        new[tuple(triple)] = float(value)
        return FluxSet(self.n, new)

    def shifted(self, delta: float) -> "FluxSet":
        return FluxSet(self.n, {t: a + delta for t, a in self.alpha.items()})

    def reduced(self) -> dict[Triple, float]:
        """Flux values folded into the fundamental domain ``[0, 1)``."""
        return {t: a % 1.0 for t, a in self.alpha.items()}

    def to_json(self) -> str:
        return json.dumps({f"[{i},{j},{k}]": a for (i, j, k), a in self.alpha.items()})

    @classmethod
    def from_mapping(cls, data: Mapping, n: int | None = None) -> "FluxSet":
        alpha = {}
        for key, value in data.items():
            if isinstance(key, str):
                key = tuple(int(v) for v in json.loads(key))
            alpha[tuple(key)] = float(value)
        if n is None:
            n = max((max(k) for k in alpha), default=3)
        return cls(n, alpha)

    @classmethod
    def from_json(cls, text: str, n: int | None = None) -> "FluxSet":
        return cls.from_mapping(json.loads(text), n)


def _check_flux(ms: MassSystem, flux: FluxSet):
    if flux.n != ms.n:
        raise ValueError(f"flux set is for n={flux.n}, mass system has n={ms.n}")


def gauge_potential(
    ms: MassSystem, flux: FluxSet, c, hbar: float = 1.0, eps: float = EPSILON
) -> np.ndarray:
    """Cartesian components ``A_i`` of the gauge potential at a configuration.

    Returns an ``(n,)`` array in units of ``hbar`` per length; the
    components always sum to zero.
    """
    _check_flux(ms, flux)
    x = as_configuration(c, ms.n)
    A = np.zeros(ms.n)
    for t in ms.triples():
        r = triple_radius(ms, x, t)
        if not r > eps:
            raise CoincidenceError(f"triple {t} within {eps:.3g} of coincidence (r={r:.3g})")
        a = flux[t]
        if a == 0.0:
            continue
        j, k, l = (v - 1 for v in t)
        mj, mk, ml = ms.m[j], ms.m[k], ms.m[l]
        xj, xk, xl = x[j], x[k], x[l]
        s = math.sqrt(mj * mk * ml * (mj + mk + ml))
        den = mj * mk * (xj - xk) ** 2 + mk * ml * (xk - xl) ** 2 + ml * mj * (xl - xj) ** 2
        f = -hbar * a * s / den
        A[j] += f * (xk - xl)
        A[k] += f * (xl - xj)
        A[l] += f * (xj - xk)
    return A


def covariant_gradient(
    f: Callable[[np.ndarray], complex],
    ms: MassSystem,
    flux: FluxSet,
    c,
    step: float = 1e-5,
    hbar: float = 1.0,
    eps: float = EPSILON,
) -> np.ndarray:
    """``(d/dx_i + (i/hbar) A_i) f`` at ``c`` by central differences."""
    x = as_configuration(c, ms.n)
    A = gauge_potential(ms, flux, x, hbar, eps)
    f0 = complex(f(x))
    out = np.empty(ms.n, dtype=complex)
    for i in range(ms.n):
        e = np.zeros(ms.n)
        e[i] = step
        out[i] = (complex(f(x + e)) - complex(f(x - e))) / (2.0 * step)
    return out + 1j / hbar * A * f0


def _phase_sum(flux: FluxSet, dtheta: Mapping[Triple, float]) -> float:
    return math.fsum(flux[t] * d for t, d in dtheta.items())


def wilson_line(
    ms: MassSystem,
    flux: FluxSet,
    path: Trajectory,
    eps: float = EPSILON,
    max_refine: int = MAX_REFINE,
) -> complex:
    """``exp((i/hbar) int_path A)`` along an open or closed path."""
    _check_flux(ms, flux)
    dtheta = angle_increments(ms, path, None, eps, max_refine)
    ph = _phase_sum(flux, dtheta)
    return complex(math.cos(ph), math.sin(ph))


def _closed_windings(ms, loop, eps, max_refine):
    if not loop.is_closed():
        raise InvalidLoopError("loop endpoints differ")
    return winding_numbers(loop, ms, None, eps, max_refine)


def wilson_loop(
    ms: MassSystem,
    flux: FluxSet,
    loop: Trajectory,
    eps: float = EPSILON,
    max_refine: int = MAX_REFINE,
) -> complex:
    """Holonomy ``exp(2 pi i sum alpha_ijk w_ijk)`` of a closed loop."""
    _check_flux(ms, flux)
    if not loop.is_closed():
        raise InvalidLoopError("loop endpoints differ")
    dtheta = angle_increments(ms, loop, None, eps, max_refine)
    for t, d in dtheta.items():
        turns = d / (2.0 * math.pi)
        if abs(turns - round(turns)) > WINDING_TOL:
            raise SamplingTooCoarseError(f"winding of {t} is {turns!r} turns, not an integer")
    ph = _phase_sum(flux, dtheta)
    return complex(math.cos(ph), math.sin(ph))


def rep_phase_value(flux: FluxSet, windings: Mapping[Triple, int]) -> complex:
    # fold each product into one turn before exponentiating
    turns = math.fsum((flux[t] * w) % 1.0 for t, w in windings.items()) % 1.0
    ph = 2.0 * math.pi * turns
    return complex(math.cos(ph), math.sin(ph))


def loop_flux(
    ms: MassSystem,
    flux: FluxSet,
    loop: Trajectory,
    hbar: float = 1.0,
    eps: float = EPSILON,
    max_refine: int = MAX_REFINE,
) -> float:
    """Circulation ``oint A`` of a closed loop, i.e. the enclosed flux."""
    _check_flux(ms, flux)
    w = _closed_windings(ms, loop, eps, max_refine)
    return 2.0 * math.pi * hbar * math.fsum(flux[t] * k for t, k in w.items())


def line_integral_quadrature(
    ms: MassSystem,
    flux: FluxSet,
    path: Trajectory,
    order: int = 16,
    subdivisions: int = 1,
    hbar: float = 1.0,
    eps: float = EPSILON,
) -> float:
    """``int A . dx`` by Gauss-Legendre quadrature on every polyline segment."""
    _check_flux(ms, flux)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    total = []
    pts = path.points
    for a, b in zip(pts[:-1], pts[1:]):
        for q in range(subdivisions):
            p0 = a + (b - a) * (q / subdivisions)
            d = (b - a) / subdivisions
            if not np.any(d):
                continue
            for s, wq in zip(nodes, weights):
                total.append(wq * float(gauge_potential(ms, flux, p0 + s * d, hbar, eps) @ d))
    return math.fsum(total)


def rep_value(w: TwinWord, ms: MassSystem, flux: FluxSet, spacing: float = 1.0) -> complex:
    """One-dimensional representation value of a pure twin word."""
    _check_flux(ms, flux)
    if w.n != ms.n:
        raise ValueError(f"word has {w.n} strands, mass system {ms.n} particles")
    if not is_pure(w):
        raise NotALoopError(f"word {w} does not induce the identity permutation")
    return rep_phase_value(flux, winding_numbers(word_to_trajectory(w, spacing), ms))


def curl(
    ms: MassSystem, flux: FluxSet, c, step: float = 1e-4, hbar: float = 1.0
) -> np.ndarray:
    """Antisymmetric finite-difference field strength ``d_i A_j - d_j A_i``."""
    x = as_configuration(c, ms.n)
    J = np.empty((ms.n, ms.n))
    for i in range(ms.n):
        e = np.zeros(ms.n)
        e[i] = step
        J[i] = (gauge_potential(ms, flux, x + e, hbar) - gauge_potential(ms, flux, x - e, hbar)) / (
            2.0 * step
        )
    return J - J.T
