import cmath
import math

import numpy as np
import pytest

from fluxtwin import coords, gauge, twin
from fluxtwin.errors import CoincidenceError, InvalidLoopError, NotALoopError

EQ = coords.MassSystem((1.0, 1.0, 1.0))


def fd_angle_gradient(ms, x, triple=(1, 2, 3), step=1e-6):
    g = np.empty(ms.n)
    for i in range(ms.n):
        e = np.zeros(ms.n)
        e[i] = step
        d = coords.triple_angle(ms, x + e, triple) - coords.triple_angle(ms, x - e, triple)
        d = (d + math.pi) % (2 * math.pi) - math.pi
        g[i] = d / (2 * step)
    return g


def test_potential_example():
    A = gauge.gauge_potential(EQ, gauge.FluxSet.single(0.4), (1.0, -1.0, 0.0), hbar=1.5)
    s3 = math.sqrt(3.0)
    assert A == pytest.approx(1.5 * 0.4 * np.array([s3 / 6, s3 / 6, -s3 / 3]), abs=1e-15)


def test_potential_is_flux_times_angle_gradient(rng):
    for _ in range(40):
        ms = coords.MassSystem(tuple(rng.uniform(0.2, 5, 3)), mu0=float(rng.uniform(0.5, 2)))
        x = rng.normal(size=3)
        alpha, hbar = float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 2))
        A = gauge.gauge_potential(ms, gauge.FluxSet.single(alpha), x, hbar)
        assert A == pytest.approx(hbar * alpha * fd_angle_gradient(ms, x), abs=1e-8 * max(1.0, np.max(np.abs(A))))


def test_potential_symmetries(rng):
    ms = coords.MassSystem((1.0, 2.0, 3.0, 0.5))
    fs = gauge.FluxSet(4, {(1, 2, 3): 0.1, (1, 2, 4): -0.3, (1, 3, 4): 0.7, (2, 3, 4): 0.25})
    for _ in range(20):
        x = rng.normal(size=4)
        A = gauge.gauge_potential(ms, fs, x)
        assert abs(A.sum()) < 1e-14 * max(1.0, np.max(np.abs(A)))
        assert gauge.gauge_potential(ms, fs, 2 * x) == pytest.approx(A / 2, rel=1e-12)
        assert gauge.gauge_potential(ms, fs, x + 3.7) == pytest.approx(A, rel=1e-9)
        # superposition over triples
        parts = sum(
            gauge.gauge_potential(ms, gauge.FluxSet(4, {t: (fs[t] if t == s else 0.0) for t in fs.alpha}), x)
            for s in fs.alpha
        )
        assert parts == pytest.approx(A, rel=1e-12, abs=1e-14)


def test_potential_at_coincidence():
    with pytest.raises(CoincidenceError):
        gauge.gauge_potential(EQ, gauge.FluxSet.single(0.3), (1.0, 1.0, 1.0))


def test_curl_vanishes(rng):
    ms = coords.MassSystem((1.0, 2.0, 3.0, 4.0))
    fs = gauge.FluxSet.uniform(4, 0.37)
    for _ in range(10):
        F = gauge.curl(ms, fs, rng.normal(size=4) * 2)
        assert np.max(np.abs(F)) < 1e-5
        assert np.allclose(F, -F.T)


def test_covariant_gradient_examples():
    x = np.array([0.3, -0.8, 1.1])
    assert gauge.covariant_gradient(lambda y: 1.0, EQ, gauge.FluxSet.single(0.0), x) == pytest.approx(np.zeros(3))
    fs = gauge.FluxSet.single(0.35)
    A = gauge.gauge_potential(EQ, fs, x, hbar=2.0)
    got = gauge.covariant_gradient(lambda y: 1.0, EQ, fs, x, hbar=2.0)
    assert got == pytest.approx(1j / 2.0 * A)


def test_covariant_gradient_gauge_covariance():
    """With ``f = exp(-i alpha (theta - theta_0)) g`` the covariant gradient is the phase times ``grad g``."""
    ms = coords.MassSystem((1.0, 2.0, 3.0))
    fs = gauge.FluxSet.single(0.3)
    th0 = coords.triple_angle(ms, (1.0, 0.0, -1.0))

    def g(y):
        return complex(math.sin(y[0]) + y[1] * y[2], y[0] ** 2)

    def grad_g(y):
        return np.array([math.cos(y[0]) + 2j * y[0], y[2], y[1]])

    x = np.array([0.9, -0.2, -0.6])
    phase = cmath.exp(-1j * 0.3 * (coords.triple_angle(ms, x) - th0))
    errs = []
    for h in (1e-2, 5e-3):
        got = gauge.covariant_gradient(lambda y: cmath.exp(-1j * 0.3 * (coords.triple_angle(ms, y) - th0)) * g(y),
                                       ms, fs, x, step=h)
        errs.append(np.max(np.abs(got - phase * grad_g(x))))
    assert errs[1] < 1e-4
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)  # O(step**2)


def _arc(ms, th_a, th_b, r=1.0, n=40):
    th = np.linspace(th_a, th_b, n)
    pts = [coords.from_jacobi(ms, coords.from_hyperpolar(ms, coords.HyperPolarPoint(r, t, 0.0))) for t in th]
    return coords.Trajectory.from_points(pts)


def test_wilson_line_examples():
    fs = gauge.FluxSet.single(0.3)
    const = coords.Trajectory.from_points([[1.0, 0.0, -1.0]] * 3)
    assert gauge.wilson_line(EQ, fs, const) == 1
    quarter = _arc(EQ, 0.2, 0.2 + math.pi / 2)
    z = gauge.wilson_line(EQ, fs, quarter)
    assert z == pytest.approx(cmath.exp(1j * 0.3 * math.pi / 2), abs=1e-14)
    assert gauge.wilson_line(EQ, fs, quarter.reversed()) == pytest.approx(z.conjugate(), abs=1e-15)
    q = gauge.line_integral_quadrature(EQ, fs, quarter, subdivisions=2)
    assert cmath.exp(1j * q) == pytest.approx(z, abs=1e-10)


def test_wilson_loop_examples():
    alpha = 0.3
    fs = gauge.FluxSet.single(alpha)
    loop = coords.relative_loop(EQ, radius=2.0)
    assert gauge.wilson_loop(EQ, fs, loop) == pytest.approx(cmath.exp(2j * math.pi * alpha), abs=1e-14)
    q = gauge.line_integral_quadrature(EQ, fs, loop)
    assert cmath.exp(1j * q) == pytest.approx(cmath.exp(2j * math.pi * alpha), abs=1e-9)
    off = coords.relative_loop(EQ, center=(3.0, 0.0), radius=1.0)
    assert gauge.wilson_loop(EQ, fs, off) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(InvalidLoopError):
        gauge.wilson_loop(EQ, fs, _arc(EQ, 0.0, 1.0))


def test_n4_locality():
    ms = coords.MassSystem((1.0, 1.0, 1.0, 1.0))
    loop = coords.relative_loop(ms, (1, 2, 3), base=[0, 0, 0, 40.0])
    fs = gauge.FluxSet(4, {(1, 2, 3): 0.2, (1, 2, 4): 0.3, (1, 3, 4): 0.4, (2, 3, 4): 0.5})
    z = gauge.wilson_loop(ms, fs, loop)
    assert z == pytest.approx(cmath.exp(2j * math.pi * 0.2), abs=1e-14)
    q = gauge.line_integral_quadrature(ms, fs, loop, subdivisions=2)
    assert q / (2 * math.pi) == pytest.approx(0.2, abs=1e-8)


@pytest.mark.parametrize("turns,enclosing,expected", [(1, True, 1), (2, True, 2), (-1, True, -1), (1, False, 0)])
def test_loop_flux_against_quadrature(turns, enclosing, expected):
    ms = coords.MassSystem((1.0, 3.0, 0.7))
    fs = gauge.FluxSet.single(0.21)
    center = (0.2, -0.3) if enclosing else (2.5, 1.0)
    loop = coords.relative_loop(ms, center=center, radius=1.0, turns=turns, n_points=96)
    hbar = 1.3
    flux = gauge.loop_flux(ms, fs, loop, hbar)
    assert flux == pytest.approx(2 * math.pi * hbar * 0.21 * expected, abs=1e-14)
    quad = gauge.line_integral_quadrature(ms, fs, loop, hbar=hbar)
    if expected:
        assert abs(quad - flux) / abs(flux) < 1e-6
    else:
        assert abs(quad) < 1e-9


def test_rep_value_examples(rng):
    fs = gauge.FluxSet.single(0.3)
    assert gauge.rep_value(twin.TwinWord(3, ()), EQ, fs) == 1
    z = gauge.rep_value(twin.TwinWord(3, (1, 2) * 3), EQ, fs)
    assert z == pytest.approx(cmath.exp(2j * math.pi * 0.3), abs=1e-15)
    with pytest.raises(NotALoopError):
        gauge.rep_value(twin.TwinWord(3, (1,)), EQ, fs)
    ms = coords.MassSystem((1.0, 2.0, 3.0, 4.0))
    f4 = gauge.FluxSet(4, {t: float(rng.uniform(0, 1)) for t in coords.all_triples(4)})
    for _ in range(50):
        u, v = twin.random_pure_word(rng, 4, 24), twin.random_pure_word(rng, 4, 24)
        assert gauge.rep_value(u * v, ms, f4) == pytest.approx(
            gauge.rep_value(u, ms, f4) * gauge.rep_value(v, ms, f4), abs=1e-12)


def test_flux_periodicity(rng):
    ms = coords.MassSystem((1.0, 2.0, 3.0))
    fs = gauge.FluxSet.single(0.3)
    for _ in range(20):
        w = twin.random_pure_word(rng, 3, 24)
        assert gauge.rep_value(w, ms, fs.shifted(1.0)) == pytest.approx(gauge.rep_value(w, ms, fs), abs=1e-12)
        assert gauge.rep_value(w, ms, fs.shifted(-3.0)) == pytest.approx(gauge.rep_value(w, ms, fs), abs=1e-12)


def test_flux_set_validation_and_io():
    with pytest.raises(ValueError):
        gauge.FluxSet(4, {(1, 2, 3): 0.1})
    fs = gauge.FluxSet(4, {(1, 2, 3): 0.1, (1, 2, 4): 1.3, (1, 3, 4): -0.4, (2, 3, 4): 0.5})
    back = gauge.FluxSet.from_json(fs.to_json())
    assert back == fs
    assert back.reduced()[(1, 2, 4)] == pytest.approx(0.3)
    assert back.reduced()[(1, 3, 4)] == pytest.approx(0.6)
    assert fs.with_value((1, 2, 3), 0.9)[(1, 2, 3)] == 0.9
