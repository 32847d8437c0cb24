"""Mass-weighted geometry of the few-body configuration space.

Particles and triples are labelled from 1, matching the usual physics
notation ``x_1, ..., x_n``. For a triple ``(i, j, k)`` the Jacobi
coordinates are

    xi1 = x_i - x_j
    xi2 = (m_i (x_i - x_k) + m_j (x_j - x_k)) / (m_i + m_j)
    xi3 = (m_i x_i + m_j x_j + m_k x_k) / (m_i + m_j + m_k)

and the relative plane is parametrised by the hyperradius ``r`` and the
angle ``theta`` through ``xi1 = sqrt(mu0/mu1) r cos(theta)`` and
``xi2 = sqrt(mu0/mu2) r sin(theta)``. ``theta`` therefore increases
counterclockwise in the ``(sqrt(mu1) xi1, sqrt(mu2) xi2)`` plane; this is
the orientation convention used for every winding number in the package.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import CoincidenceError, InvalidGeometryError, InvalidMassError

#: Default exclusion radius around every triple-coincidence locus.
EPSILON = 1e-9

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class MassSystem:
    """Particle masses and the reference mass scale ``mu0``."""

    m: tuple[float, ...]
    mu0: float = 1.0

    def __post_init__(self):
        m = tuple(float(v) for v in self.m)
        object.__setattr__(self, "m", m)
        if len(m) < 3:
            raise InvalidMassError(f"need at least 3 particles, got {len(m)}")
        if not all(math.isfinite(v) and v > 0 for v in m):
            raise InvalidMassError(f"masses must be positive and finite: {m}")
        if not (math.isfinite(self.mu0) and self.mu0 > 0):
            raise InvalidMassError(f"mu0 must be positive, got {self.mu0}")

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.m, dtype=float)

    def triples(self) -> list[Triple]:
        return all_triples(self.n)

    def triple_masses(self, triple: Triple) -> tuple[float, float, float]:
        i, j, k = check_triple(triple, self.n)
        return self.m[i - 1], self.m[j - 1], self.m[k - 1]


def all_triples(n: int) -> list[Triple]:
    """All ``(i, j, k)`` with ``1 <= i < j < k <= n`` in lexicographic order."""
    return [tuple(t) for t in combinations(range(1, n + 1), 3)]


def check_triple(triple, n: int) -> Triple:
    i, j, k = (int(v) for v in triple)
    if not 1 <= i < j < k <= n:
        raise ValueError(f"triple must satisfy 1 <= i < j < k <= {n}, got {triple}")
    return i, j, k


@dataclass(frozen=True)
class JacobiPoint:
    xi1: float
    xi2: float
    xi3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2, self.xi3])


@dataclass(frozen=True)
class HyperPolarPoint:
    """Hyperradius, angle in ``[0, 2*pi)`` and centre of mass.

    ``sheet`` counts full turns when the point is used on the unwrapped
    (covering) angle; ``unwrapped = theta + 2*pi*sheet``.
    """

    r: float
    theta: float
    xi3: float
    sheet: int = 0

    @property
    def unwrapped(self) -> float:
        return self.theta + 2.0 * math.pi * self.sheet


def _masses_for(ms: MassSystem, triple: Triple | None):
    if triple is None:
        if ms.n != 3:
            raise ValueError("a triple must be selected when n != 3")
        triple = (1, 2, 3)
    return check_triple(triple, ms.n), ms.triple_masses(triple)


def _reduced(m1: float, m2: float, m3: float) -> tuple[float, float, float]:
    return 1.0 / (1.0 / m1 + 1.0 / m2), 1.0 / (1.0 / (m1 + m2) + 1.0 / m3), m1 + m2 + m3


def reduced_masses(ms: MassSystem, triple: Triple = (1, 2, 3)) -> tuple[float, float, float]:
    """Reduced masses ``(mu1, mu2, mu3)`` of the Jacobi coordinates of a triple.

    >>> reduced_masses(MassSystem((1.0, 2.0, 3.0)))
    (0.6666666666666666, 1.5, 6.0)
    """
    return _reduced(*ms.triple_masses(triple))


def jacobi_matrix(ms: MassSystem, triple: Triple | None = None) -> np.ndarray:
    """The 3x3 linear map ``xi = J @ (x_i, x_j, x_k)``."""
    _, (a, b, c) = _masses_for(ms, triple)
    M = a + b + c
    return np.array(
        [
            [1.0, -1.0, 0.0],
            [a / (a + b), b / (a + b), -1.0],
            [a / M, b / M, c / M],
        ]
    )


def as_configuration(x, n: int | None = None) -> np.ndarray:
    c = np.asarray(x, dtype=float)
    if c.ndim != 1:
        raise InvalidGeometryError("a configuration is a 1-d sequence of positions")
    if n is not None and c.shape[0] != n:
        raise InvalidGeometryError(f"expected {n} positions, got {c.shape[0]}")
    if not np.all(np.isfinite(c)):
        raise InvalidGeometryError("configuration entries must be finite")
    return c


def to_jacobi(ms: MassSystem, c, triple: Triple | None = None) -> JacobiPoint:
    """Jacobi coordinates of the selected triple of a configuration."""
    (i, j, k), (a, b, cm) = _masses_for(ms, triple)
    x = as_configuration(c, ms.n)
    xi, xj, xk = x[i - 1], x[j - 1], x[k - 1]
    return JacobiPoint(
        xi - xj,
        (a * (xi - xk) + b * (xj - xk)) / (a + b),
        (a * xi + b * xj + cm * xk) / (a + b + cm),
    )


def from_jacobi(ms: MassSystem, j: JacobiPoint) -> np.ndarray:
    """Inverse of :func:`to_jacobi` for a three-body system."""
    if ms.n != 3:
        raise ValueError("from_jacobi reconstructs three-body configurations only")
    a, b, c = ms.m
    M = a + b + c
    # x3 from the centre of mass, then the pair centre, then the pair.
    x3 = j.xi3 - (a + b) / M * j.xi2
    pair = x3 + j.xi2
    x1 = pair + b / (a + b) * j.xi1
    x2 = pair - a / (a + b) * j.xi1
    return np.array([x1, x2, x3])


def _plane(ms: MassSystem, jp: JacobiPoint, triple):
    m1, m2, _ = reduced_masses(ms, triple)
    return math.sqrt(m1) * jp.xi1, math.sqrt(m2) * jp.xi2


def _angle(u: float, v: float) -> float:
    th = math.atan2(v, u)
    if th < 0.0:
        th += 2.0 * math.pi
    # atan2 of a tiny negative v rounds to exactly 2*pi
    return 0.0 if th >= 2.0 * math.pi else th


def to_hyperpolar(
    ms: MassSystem, j: JacobiPoint, triple: Triple | None = None, eps: float = EPSILON
) -> HyperPolarPoint:
    """Hyperradius and full-circle angle of a Jacobi point.

    Raises
    ------
    CoincidenceError
        If the hyperradius does not exceed ``eps``.
    """
    t, _ = _masses_for(ms, triple)
    u, v = _plane(ms, j, t)
    r = math.hypot(u, v) / math.sqrt(ms.mu0)
    if not r > eps:
        raise CoincidenceError(f"hyperradius {r:.3g} within exclusion radius {eps:.3g}")
    return HyperPolarPoint(r, _angle(u, v), j.xi3)


def from_hyperpolar(ms: MassSystem, h: HyperPolarPoint, triple: Triple | None = None) -> JacobiPoint:
    t, _ = _masses_for(ms, triple)
    m1, m2, _ = reduced_masses(ms, t)
    s = math.sqrt(ms.mu0)
    return JacobiPoint(
        s / math.sqrt(m1) * h.r * math.cos(h.theta),
        s / math.sqrt(m2) * h.r * math.sin(h.theta),
        h.xi3,
    )


def triple_radius(ms: MassSystem, c, triple: Triple) -> float:
    """Mass-weighted distance of the triple from its coincidence locus."""
    a, b, cm = ms.triple_masses(triple)
    i, j, k = triple
    x = as_configuration(c, ms.n)
    xi, xj, xk = x[i - 1], x[j - 1], x[k - 1]
    num = a * b * (xi - xj) ** 2 + a * cm * (xi - xk) ** 2 + b * cm * (xj - xk) ** 2
    return math.sqrt(num / (ms.mu0 * (a + b + cm)))


def min_triple_radius(ms: MassSystem, c) -> float:
    return min(triple_radius(ms, c, t) for t in ms.triples())


def triple_angle(ms: MassSystem, c, triple: Triple = (1, 2, 3), eps: float = EPSILON) -> float:
    """Angle of a triple in ``[0, 2*pi)``, resolved by quadrant."""
    t = check_triple(triple, ms.n)
    jp = to_jacobi(ms, c, t)
    return to_hyperpolar(ms, jp, t, eps).theta


@dataclass
class Trajectory:
    """Time-ordered polyline in configuration space.

    Between vertices the motion is linear in every coordinate, so each
    triple's relative-plane image of a segment is a straight segment.
    """

    times: np.ndarray
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] != self.times.shape[0]:
            raise InvalidGeometryError("times and points must have the same length")
        if self.points.shape[0] < 2:
            raise InvalidGeometryError("a trajectory needs at least two vertices")
        if np.any(np.diff(self.times) < 0):
            raise InvalidGeometryError("times must be non-decreasing")
        if not np.all(np.isfinite(self.points)):
            raise InvalidGeometryError("trajectory points must be finite")

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_points(cls, points: Sequence, **meta) -> "Trajectory":
        pts = np.asarray(points, dtype=float)
        return cls(np.linspace(0.0, 1.0, len(pts)), pts, dict(meta))

    def is_closed(self, atol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.points))))
        return bool(np.allclose(self.points[0], self.points[-1], rtol=0.0, atol=atol * scale))

    def reversed(self) -> "Trajectory":
        t = self.times[-1] + self.times[0] - self.times[::-1]
        return Trajectory(t, self.points[::-1].copy(), dict(self.meta))

    def then(self, other: "Trajectory") -> "Trajectory":
        """Concatenate, shifting ``other`` in time to start where this ends."""
        if not np.allclose(self.points[-1], other.points[0], rtol=0.0, atol=1e-12):
            raise InvalidGeometryError("trajectories do not join")
        t2 = other.times - other.times[0] + self.times[-1]
        return Trajectory(
            np.concatenate([self.times, t2[1:]]),
            np.vstack([self.points, other.points[1:]]),
            dict(self.meta),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time"] + [f"x{i}" for i in range(1, self.n + 1)])
        for t, row in zip(self.times, self.points):
            w.writerow([format(t, ".17g")] + [format(v, ".17g") for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        header, body = rows[0], rows[1:]
        if header[0] != "time":
            raise InvalidGeometryError("trajectory CSV must start with a 'time' column")
        data = np.array([[float(v) for v in r] for r in body])
        return cls(data[:, 0], data[:, 1:])


#: Bisection rounds allowed per segment before unwrapping gives up.
MAX_REFINE = 30


def angle_increments(
    ms: MassSystem,
    traj: Trajectory,
    triples: Sequence[Triple] | None = None,
    eps: float = EPSILON,
    max_refine: int = MAX_REFINE,
) -> dict[Triple, float]:
    """Unwrapped change of each triple angle along a trajectory.

    Every polyline segment is bisected until all per-step angle changes
    are below ``pi/2``; the distance to each coincidence locus is checked
    exactly on every segment, not only at the vertices.

    Raises
    ------
    CoincidenceError
        If any segment comes within ``eps`` of a triple coincidence.
    SamplingTooCoarseError
        If a segment still has a step of ``pi/2`` or more after
        ``max_refine`` bisections.
    """
    from . import _backend
    from .errors import SamplingTooCoarseError

    if traj.n != ms.n:
        raise InvalidGeometryError(f"trajectory has {traj.n} coordinates, masses {ms.n}")
    triples = ms.triples() if triples is None else [check_triple(t, ms.n) for t in triples]
    if not triples:
        return {}
    idx = np.array(triples, dtype=np.int64) - 1
    dtheta, min_r, status, (t, s) = _backend.core.sweep_angles(
        traj.points, ms.array, idx, float(eps), float(ms.mu0), int(max_refine)
    )
    if status == _backend.COINCIDENT:
        raise CoincidenceError(
            f"segment {s} passes within {min_r[t]:.3g} of the coincidence locus of {triples[t]}"
        )
    if status == _backend.TOO_COARSE:
        raise SamplingTooCoarseError(f"segment {s} of triple {triples[t]} could not be resolved")
    return {tr: float(d) for tr, d in zip(triples, dtheta)}


def relative_loop(
    ms: MassSystem,
    triple: Triple = (1, 2, 3),
    center: tuple[float, float] = (0.0, 0.0),
    radius: float = 1.0,
    turns: int = 1,
    n_points: int = 64,
    base=None,
    phase: float = 0.0,
) -> Trajectory:
    """Closed circle in a triple's relative plane.

    The circle is drawn in the ``(r cos theta, r sin theta)`` plane around
    ``center`` and traversed ``turns`` times (negative for clockwise), with
    ``n_points`` vertices per turn. The other particles and the triple's
    centre of mass are taken from ``base`` (zeros by default). A loop winds
    around the coincidence locus only if ``|center| < radius``.
    """
    t = check_triple(triple, ms.n)
    if turns == 0:
        raise InvalidGeometryError("turns must be nonzero")
    if not radius > 0:
        raise InvalidGeometryError("radius must be positive")
    x0 = np.zeros(ms.n) if base is None else as_configuration(base, ms.n).copy()
    sub = MassSystem(ms.triple_masses(t), ms.mu0)
    xi3 = to_jacobi(sub, x0[np.array(t) - 1]).xi3
    m1, m2, _ = _reduced(*sub.m)
    s = math.sqrt(ms.mu0)
    count = n_points * abs(turns)
    ang = phase + 2.0 * math.pi * turns * np.arange(count + 1) / count
    pts = np.repeat(x0[None, :], count + 1, axis=0)
    for q, a in enumerate(ang):
        u = center[0] + radius * math.cos(a)
        v = center[1] + radius * math.sin(a)
        jp = JacobiPoint(s * u / math.sqrt(m1), s * v / math.sqrt(m2), xi3)
        pts[q, np.array(t) - 1] = from_jacobi(sub, jp)
    pts[-1] = pts[0]
    return Trajectory(np.linspace(0.0, 1.0, count + 1), pts, {"triple": t, "turns": turns})
