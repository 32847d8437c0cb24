import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluxtwin import coords
from fluxtwin.errors import CoincidenceError, InvalidGeometryError, InvalidMassError, SamplingTooCoarseError


def exact_reduced(m1, m2, m3):
    m1, m2, m3 = F(m1), F(m2), F(m3)
    return 1 / (1 / m1 + 1 / m2), 1 / (1 / (m1 + m2) + 1 / m3), m1 + m2 + m3


def exact_jacobi(m, x):
    m1, m2, m3 = map(F, m)
    x1, x2, x3 = map(F, x)
    return x1 - x2, (m1 * x1 + m2 * x2) / (m1 + m2) - x3, (m1 * x1 + m2 * x2 + m3 * x3) / (m1 + m2 + m3)


@pytest.mark.parametrize("m", [(1, 1, 1), (1, 2, 3), (3, 5, 7), (1, 100, 2)])
def test_reduced_masses_match_rational_oracle(m):
    ms = coords.MassSystem(tuple(float(v) for v in m))
    got = coords.reduced_masses(ms)
    for g, e in zip(got, exact_reduced(*m)):
        assert g == pytest.approx(float(e), rel=1e-15)


def test_reduced_masses_examples():
    assert coords.reduced_masses(coords.MassSystem((1.0, 1.0, 1.0))) == pytest.approx((0.5, 2 / 3, 3.0))
    assert coords.reduced_masses(coords.MassSystem((1.0, 2.0, 3.0))) == pytest.approx((2 / 3, 1.5, 6.0))


@pytest.mark.parametrize("bad", [(1.0, 1.0, 0.0), (1.0, -2.0, 1.0), (1.0, float("nan"), 1.0), (1.0, 1.0)])
def test_invalid_masses(bad):
    with pytest.raises(InvalidMassError):
        coords.MassSystem(bad)


def test_jacobi_examples():
    eq = coords.MassSystem((1.0, 1.0, 1.0))
    j = coords.to_jacobi(eq, (2.5, 2.5, 2.5))
    assert (j.xi1, j.xi2, j.xi3) == pytest.approx((0.0, 0.0, 2.5))
    j = coords.to_jacobi(eq, (1.0, 0.0, -1.0))
    assert (j.xi1, j.xi2, j.xi3) == pytest.approx((1.0, 1.5, 0.0), abs=1e-15)
    assert tuple(map(float, exact_jacobi((1, 1, 1), (1, 0, -1)))) == (1.0, 1.5, 0.0)
    j = coords.to_jacobi(coords.MassSystem((1.0, 2.0, 3.0)), (0.0, 0.0, 0.0))
    assert (j.xi1, j.xi2, j.xi3) == (0.0, 0.0, 0.0)


def test_from_jacobi_examples():
    eq = coords.MassSystem((1.0, 1.0, 1.0))
    assert coords.from_jacobi(eq, coords.JacobiPoint(0.0, 0.0, 4.0)) == pytest.approx([4.0, 4.0, 4.0])
    assert coords.from_jacobi(eq, coords.JacobiPoint(1.0, 1.5, 0.0)) == pytest.approx([1.0, 0.0, -1.0], abs=1e-15)


def test_jacobi_against_rational_oracle(rng):
    for _ in range(200):
        m = tuple(int(v) for v in rng.integers(1, 20, 3))
        x = tuple(int(v) for v in rng.integers(-50, 50, 3))
        got = coords.to_jacobi(coords.MassSystem(tuple(map(float, m))), tuple(map(float, x)))
        exp = exact_jacobi(m, x)
        assert np.allclose(got.as_array(), [float(v) for v in exp], rtol=1e-14, atol=1e-13)


def test_triple_selection_on_larger_system():
    ms = coords.MassSystem((1.0, 2.0, 3.0, 4.0))
    x = np.array([0.3, -1.2, 2.0, 0.7])
    j = coords.to_jacobi(ms, x, (2, 3, 4))
    exp = exact_jacobi((2, 3, 4), (F(-12, 10), F(2), F(7, 10)))
    assert j.as_array() == pytest.approx([float(v) for v in exp])
    with pytest.raises(ValueError):
        coords.to_jacobi(ms, x)
    with pytest.raises(ValueError):
        coords.check_triple((3, 2, 1), 4)


def test_hyperpolar_examples():
    eq = coords.MassSystem((1.0, 1.0, 1.0))
    h = coords.to_hyperpolar(eq, coords.to_jacobi(eq, (1.0, -1.0, 0.0)))
    assert h.r == pytest.approx(math.sqrt(2.0))
    assert h.theta == 0.0
    h = coords.to_hyperpolar(eq, coords.JacobiPoint(0.0, 0.7, 0.0))
    assert h.theta == pytest.approx(math.pi / 2)
    with pytest.raises(CoincidenceError):
        coords.to_hyperpolar(eq, coords.JacobiPoint(0.0, 0.0, 1.0))


def test_hyperradius_matches_pairwise_form(rng):
    for _ in range(100):
        ms = coords.MassSystem(tuple(rng.uniform(0.1, 5, 3)), mu0=float(rng.uniform(0.3, 3)))
        x = rng.normal(size=3)
        h = coords.to_hyperpolar(ms, coords.to_jacobi(ms, x))
        assert h.r == pytest.approx(coords.triple_radius(ms, x, (1, 2, 3)), rel=1e-12)
        assert 0.0 <= h.theta < 2 * math.pi


def test_triple_angle_examples():
    eq = coords.MassSystem((1.0, 1.0, 1.0))
    assert coords.triple_angle(eq, (1.0, -1.0, 0.0)) == 0.0
    # x_i = x_j: vanishing xi1, sign of the angle from xi2
    assert coords.triple_angle(eq, (0.0, 0.0, -1.0)) == pytest.approx(math.pi / 2)
    assert coords.triple_angle(eq, (0.0, 0.0, 1.0)) == pytest.approx(3 * math.pi / 2)
    with pytest.raises(CoincidenceError):
        coords.triple_angle(eq, (0.2, 0.2, 0.2))


def test_triple_angle_follows_rotation():
    ms = coords.MassSystem((1.0, 2.0, 3.0))
    for th in np.linspace(0.01, 2 * math.pi - 0.01, 37):
        x = coords.from_jacobi(ms, coords.from_hyperpolar(ms, coords.HyperPolarPoint(1.3, th, 0.4)))
        assert coords.triple_angle(ms, x) == pytest.approx(th, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    st.tuples(*[st.floats(0.05, 50.0)] * 3),
    st.tuples(*[st.floats(-1e3, 1e3)] * 3),
)
def test_quadratic_form_and_round_trip(m, x):
    ms = coords.MassSystem(m)
    j = coords.to_jacobi(ms, x)
    mu = coords.reduced_masses(ms)
    lhs = sum(mi * xi * xi for mi, xi in zip(m, x))
    rhs = mu[0] * j.xi1**2 + mu[1] * j.xi2**2 + mu[2] * j.xi3**2
    assert abs(lhs - rhs) <= 1e-10 * max(lhs, 1e-300)
    scale = max(1.0, max(abs(v) for v in x))
    assert np.max(np.abs(coords.from_jacobi(ms, j) - np.array(x))) <= 1e-12 * scale * 10


def test_kinetic_form_identity():
    for m in ((1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (0.1, 10.0, 0.5)):
        ms = coords.MassSystem(m)
        J = coords.jacobi_matrix(ms)
        mu = np.array(coords.reduced_masses(ms))
        assert np.allclose(J @ np.diag(1 / np.array(m)) @ J.T, np.diag(1 / mu), atol=1e-14)


def test_trajectory_basics(tmp_path):
    tr = coords.Trajectory.from_points([[0, 1, 2], [1, 1, 2], [0, 1, 2]])
    assert tr.is_closed()
    back = coords.Trajectory.from_csv(tr.to_csv())
    assert np.array_equal(back.points, tr.points) and np.array_equal(back.times, tr.times)
    rev = tr.reversed()
    assert np.array_equal(rev.points, tr.points[::-1])
    joined = tr.then(tr)
    assert len(joined.times) == 5 and joined.times[-1] == 2.0
    with pytest.raises(InvalidGeometryError):
        coords.Trajectory([0, 1], [[0, 0, 0]])
    with pytest.raises(InvalidGeometryError):
        coords.Trajectory([1, 0], [[0, 0, 0], [1, 1, 1]])


def test_angle_increments_resolve_near_miss():
    """A single straight segment passing near the locus gains almost pi."""
    ms = coords.MassSystem((1.0, 1.0, 1.0))

    def at(u, v):
        return coords.from_jacobi(ms, coords.JacobiPoint(u / math.sqrt(0.5), v / math.sqrt(2 / 3), 0.0))

    tr = coords.Trajectory.from_points([at(-5.0, 1e-3), at(5.0, 1e-3)])
    d = coords.angle_increments(ms, tr)[(1, 2, 3)]
    assert d == pytest.approx(-(math.pi - 2 * math.atan(1e-3 / 5.0)), rel=1e-12)
    with pytest.raises(CoincidenceError):
        coords.angle_increments(ms, coords.Trajectory.from_points([at(-5.0, 0.0), at(5.0, 0.0)]))
    with pytest.raises(SamplingTooCoarseError):
        coords.angle_increments(ms, tr, max_refine=0)


def test_relative_loop_windings():
    ms = coords.MassSystem((1.0, 2.0, 3.0, 4.0))
    loop = coords.relative_loop(ms, (2, 3, 4), center=(0.1, 0.1), radius=1.0, turns=-2, base=[30.0, 0, 0, 0])
    w = {t: round(d / (2 * math.pi)) for t, d in coords.angle_increments(ms, loop).items()}
    assert w == {(1, 2, 3): 0, (1, 2, 4): 0, (1, 3, 4): 0, (2, 3, 4): -2}
    r = [coords.triple_radius(ms, p, (2, 3, 4)) for p in loop.points]
    assert np.allclose(np.min(r), 1.0 - math.hypot(0.1, 0.1), rtol=1e-2)
