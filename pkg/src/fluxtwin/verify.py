"""Invariant suite run by ``fluxtwin verify``.

Each check returns a :class:`Check` with the measured deviation and the
tolerance it was held to. Checks are deterministic (fixed seeds).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import coords, gauge, kernel, spectral, twin


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _check(suite, name, value, tol, detail=""):
    value = float(value)
    return Check(suite, name, bool(value <= tol), value, tol, detail)


def _fit_order(hs, errs) -> float:
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def check_coords(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_a = worst_b = worst_rt = 0.0
    for _ in range(1000):
        ms = coords.MassSystem(tuple(rng.uniform(0.1, 10.0, 3)))
        x = rng.normal(size=3) * 5
        j = coords.to_jacobi(ms, x)
        mu = coords.reduced_masses(ms)
        lhs = float(np.dot(ms.array, x * x))
        rhs = sum(m * v * v for m, v in zip(mu, (j.xi1, j.xi2, j.xi3)))
        worst_a = max(worst_a, abs(lhs - rhs) / lhs)
        J = coords.jacobi_matrix(ms)
        worst_b = max(worst_b, float(np.max(np.abs(J @ np.diag(1 / ms.array) @ J.T - np.diag(1 / np.array(mu))))))
        back = coords.from_jacobi(ms, j)
        worst_rt = max(worst_rt, float(np.max(np.abs(back - x)) / np.max(np.abs(x))))
    return [
        _check("coords", "quadratic_form_identity", worst_a, 1e-10),
        _check("coords", "kinetic_form_identity", worst_b, 1e-12),
        _check("coords", "jacobi_round_trip", worst_rt, 1e-12),
    ]


def check_twin(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(2000):
        n = int(rng.integers(2, 7))
        w = twin.TwinWord(n, tuple(int(v) for v in rng.integers(1, n, size=rng.integers(0, 65))))
        r = twin.reduce_word(w)
        if twin.reduce_word(r) != r or twin.induced_permutation(r) != twin.induced_permutation(w):
            bad += 1
    examples = (
        twin.reduce_word(twin.TwinWord(2, (1, 1))).letters == ()
        and twin.reduce_word(twin.TwinWord(4, (1, 3, 1))).letters == (3,)
        and twin.reduce_word(twin.TwinWord(3, (1, 2, 1))).letters == (1, 2, 1)
        and twin.is_pure(twin.TwinWord(3, (1, 2) * 3))
    )
    base = twin.TwinWord(3, (1, 2) * 3)
    wind_err = 0
    for k in range(-3, 4):
        w = base**k if k else twin.TwinWord(3, ())
        wind_err = max(wind_err, abs(twin.word_windings(w)[(1, 2, 3)] - k))
    return [
        _check("twin", "reduce_idempotent_and_permutation_preserving", bad, 0),
        _check("twin", "reduction_examples", 0 if examples else 1, 0),
        _check("twin", "pt3_winding_homomorphism", wind_err, 0),
    ]


def check_gauge(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_q = 0.0
    for _ in range(20):
        ms = coords.MassSystem(tuple(rng.uniform(0.2, 5.0, 3)))
        k = int(rng.integers(-2, 3))
        alpha = float(rng.uniform(0.05, 0.95))
        fs = gauge.FluxSet.single(alpha)
        if k == 0:
            loop = coords.relative_loop(ms, center=(2.0, 0.5), radius=1.0)
        else:
            loop = coords.relative_loop(ms, center=(0.2, -0.1), radius=1.0, turns=k)
        q = gauge.line_integral_quadrature(ms, fs, loop) / (2 * math.pi * alpha)
        worst_q = max(worst_q, abs(q - k), abs(gauge.loop_flux(ms, fs, loop) / (2 * math.pi * alpha) - k))
    ms4 = coords.MassSystem((1.0, 1.0, 1.0, 1.0))
    fs4 = gauge.FluxSet(4, {(1, 2, 3): 0.2, (1, 2, 4): 0.3, (1, 3, 4): 0.4, (2, 3, 4): 0.5})
    loop4 = coords.relative_loop(ms4, (1, 2, 3), base=[0, 0, 0, 50.0])
    z = gauge.wilson_loop(ms4, fs4, loop4)
    turns = (math.atan2(z.imag, z.real) / (2 * math.pi)) % 1.0
    hom = 0.0
    fs = gauge.FluxSet.uniform(4, 0.37)
    for _ in range(50):
        u = twin.random_pure_word(rng, 4, 16)
        v = twin.random_pure_word(rng, 4, 16)
        lhs = gauge.rep_value(u * v, ms4, fs)
        hom = max(hom, abs(lhs - gauge.rep_value(u, ms4, fs) * gauge.rep_value(v, ms4, fs)))
    pts = rng.normal(size=(20, 4))
    sum_a = max(abs(gauge.gauge_potential(ms4, fs4, p).sum()) for p in pts)
    flat = max(float(np.max(np.abs(gauge.curl(ms4, fs4, p)))) for p in pts)
    return [
        _check("gauge", "circulation_quantization", worst_q, 1e-6),
        _check("gauge", "n4_flux_locality", abs(turns - 0.2), 1e-6),
        _check("gauge", "representation_homomorphism", hom, 1e-9),
        _check("gauge", "potential_sums_to_zero", sum_a, 1e-12),
        _check("gauge", "flatness_off_coincidence", flat, 1e-5),
    ]


def check_kernel() -> list[Check]:
    th = 2 * math.pi * np.arange(32) / 32
    poisson = twist = period = modulus = 0.0
    for red in (0.05, 0.5, 5.0):
        for a in (0.0, 0.3, 0.5):
            spec = kernel.KernelSpec(time=2 * red, alpha=a)
            c, tc = kernel.covering_sum_kernel_ring(spec, th, th, return_tail=True)
            m = kernel.mode_sum_kernel_ring(spec, th, th)
            poisson = max(poisson, float(np.max(np.abs(c - m))))
            c2, tc2 = kernel.covering_sum_kernel_ring(spec, th + 2 * math.pi, th, return_tail=True)
            bound = 10 * np.maximum(tc, tc2)
            twist = max(twist, float(np.max(np.abs(c2 - np.exp(2j * math.pi * a) * c) / bound)))
            g, tg = kernel.gauge_transform_kernel(spec, th, th, return_tail=True)
            g2, tg2 = kernel.gauge_transform_kernel(spec, th + 2 * math.pi, th, return_tail=True)
            period = max(period, float(np.max(np.abs(g2 - g) / (10 * np.maximum(tg, tg2)))))
            modulus = max(modulus, float(np.max(np.abs(np.abs(g) - np.abs(c)))))
    return [
        _check("kernel", "poisson_summation", poisson, 1e-8),
        _check("kernel", "twisted_boundary_condition", twist, 1.0, "residual / (10 x tail)"),
        _check("kernel", "gauge_kernel_periodicity", period, 1.0, "residual / (10 x tail)"),
        _check("kernel", "gauge_factor_is_pure_phase", modulus, 1e-12),
    ]


def check_spectral() -> list[Check]:
    mdev = sdev = 0.0
    for N in (32, 64, 128):
        for a in (0.0, 0.25, 0.5, 0.75):
            rep = spectral.unitary_equivalence_check(spectral.RingGrid(N, alpha=a))
            mdev = max(mdev, rep.matrix_deviation)
            sdev = max(sdev, rep.spectrum_deviation)
    Ns = [32, 64, 128, 256]
    alpha = 0.3
    exact = spectral.ring_levels_analytic(1.0, 1.0, alpha, 10).energies[:6]
    errs = []
    for N in Ns:
        e = spectral.spectrum(spectral.build_ring_hamiltonian(spectral.RingGrid(N, alpha=alpha)), 6).energies
        errs.append(float(np.max(np.abs(e - exact))))
    ring_p = _fit_order([2 * math.pi / N for N in Ns], errs)
    exact_r = math.pi**2 / 2
    errs_r = [abs(spectral.radial_spectrum(spectral.RadialGrid(M, nu=0.5), 1).energies[0] - exact_r) for M in Ns]
    radial_p = _fit_order([1.0 / M for M in Ns], errs_r)
    paired = all(
        spectral.spectrum(spectral.build_ring_hamiltonian(spectral.RingGrid(N, alpha=0.5))).is_paired()
        for N in Ns
    )
    return [
        _check("spectral", "unitary_equivalence_matrix", mdev, 1e-13, "absolute, entrywise"),
        _check("spectral", "unitary_equivalence_spectrum", sdev, 1e-10),
        _check("spectral", "ring_convergence_order", abs(ring_p - 2.0), 0.2, f"order {ring_p:.4f}"),
        _check("spectral", "radial_convergence_order", abs(radial_p - 2.0), 0.2, f"order {radial_p:.4f}"),
        _check("spectral", "half_flux_degeneracy", 0 if paired else 1, 0),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "coords": check_coords,
    "twin": check_twin,
    "gauge": check_gauge,
    "kernel": check_kernel,
    "spectral": check_spectral,
}


def run(suite: str = "all") -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    out: list[Check] = []
    for name in names:
        try:
            fn = SUITES[name]
        except KeyError:
            raise ValueError(f"unknown suite {name!r}; choose from {['all', *SUITES]}") from None
        out.extend(fn())
    return out
