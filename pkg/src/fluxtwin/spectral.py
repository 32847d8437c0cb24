"""Discretised twisted and gauge Hamiltonians on the reduced geometries.

The angular problem lives on a ring of ``N`` sites at fixed hyperradius
``r``. In the twisted description the hopping across the wrap carries
``exp(+-2 pi i alpha)`` and the rest is the plain second difference; in the
gauge description every link carries the Peierls phase ``exp(i alpha h)`` of
the uniform potential ``A_theta = hbar alpha / r`` and the wrap is periodic.
The two matrices are related exactly by ``W = diag(exp(i alpha theta_j))``:
``W^H H_twisted W = H_gauge``.

The radial problem separates on ``r`` with effective order
``nu = |m + alpha|``. It is solved for ``phi = psi / r**nu``, which is
smooth and even at the origin, in conservative form
``-(hbar^2 / 2 mu) r**-(2nu+1) (r**(2nu+1) phi')'`` on a cell-centred grid
whose innermost face sits at ``r = 0`` (zero flux, i.e. regularity). This
keeps second-order convergence for every ``nu >= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg

from . import output
from .errors import InvalidGeometryError, InvalidOperatorError, OracleError

TWISTED = "twisted"
GAUGE = "gauge"

#: Relative tolerance for calling two levels degenerate.
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class RingGrid:
    N: int
    r: float = 1.0
    mu: float = 1.0
    alpha: float = 0.0
    bc_kind: str = TWISTED
    hbar: float = 1.0

    def __post_init__(self):
        if self.N < 8:
            raise InvalidGeometryError(f"ring needs N >= 8 sites, got {self.N}")
        if self.bc_kind not in (TWISTED, GAUGE):
            raise InvalidGeometryError(f"bc_kind must be 'twisted' or 'gauge', got {self.bc_kind!r}")
        if not (self.r > 0 and self.mu > 0 and self.hbar > 0):
            raise InvalidGeometryError("r, mu and hbar must be positive")

    @property
    def h(self) -> float:
        return 2.0 * math.pi / self.N

    @property
    def thetas(self) -> np.ndarray:
        return self.h * np.arange(self.N)

    @property
    def energy_unit(self) -> float:
        """``hbar**2 / (2 mu r**2)``."""
        return self.hbar**2 / (2.0 * self.mu * self.r**2)

    def with_kind(self, kind: str) -> "RingGrid":
        return RingGrid(self.N, self.r, self.mu, self.alpha, kind, self.hbar)


@dataclass(frozen=True)
class RadialGrid:
    """Radial disk problem of radius ``R`` with a hard wall at ``R``.

    ``inner`` selects the treatment at the origin: ``"regular"`` (default)
    imposes zero flux at ``r = 0`` on ``psi / r**nu``; ``"dirichlet"`` puts a
    hard wall at ``epsilon_core`` (default ``R / (10 M)``) and discretises
    ``psi`` directly, which converges only at first order for ``nu < 1``.
    """

    M: int
    R: float = 1.0
    nu: float = 0.0
    mu: float = 1.0
    hbar: float = 1.0
    potential: tuple | None = None
    inner: str = "regular"
    epsilon_core: float | None = None

    def __post_init__(self):
        if self.M < 2:
            raise InvalidGeometryError("radial grid needs M >= 2")
        if not (self.R > 0 and self.mu > 0 and self.hbar > 0):
            raise InvalidGeometryError("R, mu and hbar must be positive")
        if not self.nu >= 0:
            raise InvalidGeometryError(f"nu must be >= 0, got {self.nu}")
        if self.inner not in ("regular", "dirichlet"):
            raise InvalidGeometryError(f"unknown inner boundary {self.inner!r}")
        if self.epsilon_core is not None and not 0 < self.epsilon_core < self.R:
            raise InvalidGeometryError("epsilon_core must lie in (0, R)")
        if self.potential is not None and len(self.potential) != self.M:
            raise InvalidGeometryError("potential must have one sample per radial site")

    @property
    def core(self) -> float:
        return self.R / (10.0 * self.M) if self.epsilon_core is None else self.epsilon_core

    @property
    def radii(self) -> np.ndarray:
        if self.inner == "regular":
            return (np.arange(self.M) + 0.5) * (self.R / self.M)
        h = (self.R - self.core) / (self.M + 1)
        return self.core + h * np.arange(1, self.M + 1)


@dataclass
class SpectrumTable:
    energies: np.ndarray
    residuals: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        if self.residuals is not None:
            self.residuals = np.asarray(self.residuals, dtype=float)

    @property
    def k(self) -> int:
        return int(self.energies.shape[0])

    def __len__(self) -> int:
        return self.k

    def is_paired(self, rtol: float = DEGENERACY_TOL) -> bool:
        """Whether the levels split into consecutive degenerate pairs."""
        e = self.energies
        if len(e) % 2:
            return False
        a, b = e[0::2], e[1::2]
        scale = np.maximum(np.abs(a), np.abs(b))
        return bool(np.all(np.abs(a - b) <= rtol * np.maximum(scale, 1e-300)))

    def to_csv(self) -> str:
        res = self.residuals if self.residuals is not None else [float("nan")] * self.k
        rows = ((i, float(e), float(r)) for i, (e, r) in enumerate(zip(self.energies, res)))
        return output.dumps_csv(("index", "energy", "residual"), rows, self.meta)

    def as_dict(self) -> dict:
        return {
            "meta": self.meta,
            "energies": self.energies,
            "residuals": self.residuals,
        }


def turn_phase(alpha: float, N: int = 1, j: int = 1) -> complex:
    """Correctly rounded ``exp(2 pi i alpha j / N)``.

    The argument is formed and reduced in extended precision, so phases of
    far sites carry no more error than near ones.
    """
    with mpmath.workdps(30):
        t = mpmath.mpf(alpha) * j / N
        z = mpmath.expjpi(2 * (t - mpmath.floor(t)))
        return complex(float(z.real), float(z.imag))


def build_ring_hamiltonian(g: RingGrid) -> np.ndarray:
    N, alpha = g.N, g.alpha
    c = g.hbar**2 / (2.0 * g.mu * g.r**2 * g.h**2)
    H = np.zeros((N, N), dtype=complex)
    idx = np.arange(N)
    H[idx, idx] = 2.0 * c
    if g.bc_kind == TWISTED:
        hop = -c * np.ones(N - 1, dtype=complex)
        wrap = -c * turn_phase(alpha)  # H[N-1, 0]
    else:
        link = turn_phase(alpha, N)
        hop = -c * link * np.ones(N - 1)
        wrap = -c * link
    H[idx[:-1], idx[1:]] = hop
    H[idx[1:], idx[:-1]] = hop.conj()
    H[N - 1, 0] = wrap
    H[0, N - 1] = np.conj(wrap)
    return H


def ring_gauge_transform(g: RingGrid) -> np.ndarray:
    """Diagonal of ``W = diag(exp(i alpha theta_j))``, the discrete Wilson line."""
    return np.array([turn_phase(g.alpha, g.N, j) for j in range(g.N)])


def ring_levels_analytic(mu: float, r: float, alpha: float, m_range, hbar: float = 1.0) -> SpectrumTable:
    """Continuum levels ``hbar**2 (m + alpha)**2 / (2 mu r**2)`` for ``m`` in ``m_range``."""
    if isinstance(m_range, int):
        m_range = range(-m_range, m_range + 1)
    m = np.asarray(list(m_range), dtype=float)
    e = np.sort(hbar**2 * (m + alpha) ** 2 / (2.0 * mu * r**2))
    return SpectrumTable(e, None, {"kind": "ring-analytic", "mu": mu, "r": r, "alpha": alpha})


def ring_levels_discrete(g: RingGrid) -> np.ndarray:
    """Closed-form circulant eigenvalues ``4 c sin**2((k + alpha) h / 2)``, sorted."""
    c = g.hbar**2 / (2.0 * g.mu * g.r**2 * g.h**2)
    k = np.arange(g.N)
    return np.sort(4.0 * c * np.sin((k + g.alpha) * g.h / 2.0) ** 2)


def _radial_regular(g: RadialGrid):
    M, h = g.M, g.R / g.M
    a = 2.0 * g.nu + 1.0
    faces = h * np.arange(M + 1)
    w_face = faces**a
    # cell-averaged weight; exact integral of r**a over the cell
    vol = (faces[1:] ** (a + 1) - faces[:-1] ** (a + 1)) / ((a + 1) * h)
    k = g.hbar**2 / (2.0 * g.mu)
    diag = k * (w_face[1:] + w_face[:-1]) / (vol * h * h)
    # hard wall at R through the ghost value phi_{M} = -phi_{M-1}
    diag[-1] += k * w_face[-1] / (vol[-1] * h * h)
    off = -k * w_face[1:-1] / (h * h * np.sqrt(vol[:-1] * vol[1:]))
    return diag, off


def _radial_dirichlet(g: RadialGrid):
    r = g.radii
    h = r[1] - r[0]
    rp, rm = r + h / 2, r - h / 2
    k = g.hbar**2 / (2.0 * g.mu)
    diag = k * ((rp + rm) / (r * h * h) + g.nu**2 / r**2)
    off = -k * rp[:-1] / (h * h * np.sqrt(r[:-1] * r[1:]))
    return diag, off


def radial_tridiagonal(g: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the symmetrised radial operator."""
    diag, off = _radial_regular(g) if g.inner == "regular" else _radial_dirichlet(g)
    if g.potential is not None:
        diag = diag + np.asarray(g.potential, dtype=float)
    return diag, off


def build_radial_hamiltonian(g: RadialGrid) -> np.ndarray:
    """Dense symmetric tridiagonal radial Hamiltonian."""
    d, e = radial_tridiagonal(g)
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


def radial_spectrum(g: RadialGrid, k: int) -> SpectrumTable:
    """Lowest ``k`` radial levels via the tridiagonal eigensolver."""
    d, e = radial_tridiagonal(g)
    k = min(k, g.M)
    w, v = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    Hv = d[:, None] * v
    Hv[:-1] += e[:, None] * v[1:]
    Hv[1:] += e[:, None] * v[:-1]
    res = np.linalg.norm(Hv - v * w, axis=0)
    return SpectrumTable(w, res, {"kind": "radial", "M": g.M, "R": g.R, "nu": g.nu, "inner": g.inner})


def bessel_j_series(nu: float, x: float, dps: int | None = None) -> float:
    """``J_nu(x)`` from its power series, summed in extended precision."""
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    # the largest term grows like exp(x); pad the precision to cover the cancellation
    prec = dps if dps is not None else 20 + int(0.45 * x)
    with mpmath.workdps(prec):
        # nu must be promoted too: float rounding in k + nu is amplified by the cancellation
        nu = mpmath.mpf(nu)
        X = mpmath.mpf(x) / 2
        term = X**nu / mpmath.gamma(nu + 1)
        total = term
        X2 = X * X
        k = 0
        while True:
            k += 1
            term = -term * X2 / (k * (k + nu))
            total += term
            if abs(term) < mpmath.mpf(10) ** (-prec) * max(abs(total), 1) and k > x:
                break
        return float(total)


def bessel_zeros(nu: float, count: int, step: float = 0.25) -> np.ndarray:
    """First ``count`` positive zeros of ``J_nu`` by scanning and bisection."""
    if count <= 0:
        return np.empty(0)
    zeros = []
    x0 = max(nu, 0.0) + 1e-3
    f0 = bessel_j_series(nu, x0)
    limit = nu + 10.0 + 4.0 * count * math.pi
    while len(zeros) < count:
        x1 = x0 + step
        if x1 > limit:
            raise OracleError(f"failed to bracket {count} zeros of J_{nu} below {limit:.3g}")
        f1 = bessel_j_series(nu, x1)
        if f0 == 0.0:
            zeros.append(x0)
        elif f0 * f1 < 0:
            a, b, fa = x0, x1, f0
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = bessel_j_series(nu, mid)
                if fa * fm <= 0:
                    b = mid
                else:
                    a, fa = mid, fm
                if b - a <= 4e-16 * b:
                    break
            zeros.append(0.5 * (a + b))
        x0, f0 = x1, f1
    return np.array(zeros[:count])


def disk_levels_analytic(
    mu: float, R: float, nu: float, k_count: int, hbar: float = 1.0
) -> SpectrumTable:
    """Disk levels ``hbar**2 j_{nu,k}**2 / (2 mu R**2)`` from Bessel zeros."""
    if nu < 0:
        raise ValueError("nu must be >= 0")
    z = bessel_zeros(nu, k_count)
    return SpectrumTable(hbar**2 * z**2 / (2.0 * mu * R**2), None,
                         {"kind": "disk-analytic", "mu": mu, "R": R, "nu": nu})


def spectrum(H: np.ndarray, k: int | None = None, herm_tol: float = 1e-12) -> SpectrumTable:
    """Smallest ``k`` eigenvalues of a Hermitian matrix with residual norms."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidOperatorError("operator must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if H.size and np.max(np.abs(H - H.conj().T)) > herm_tol * scale:
        raise InvalidOperatorError("operator is not Hermitian")
    n = H.shape[0]
    k = n if k is None else min(int(k), n)
    if k <= 0:
        return SpectrumTable(np.empty(0), np.empty(0), {"kind": "matrix", "size": n})
    w, v = scipy.linalg.eigh(H, subset_by_index=(0, k - 1))
    res = np.linalg.norm(H @ v - v * w, axis=0)
    return SpectrumTable(w, res, {"kind": "matrix", "size": n})


def _sandwich_deviation(W, Ht, Hg) -> float:
    """``max |conj(W_i) Ht_ij W_j - Hg_ij|`` evaluated exactly-ish in mpmath.

    Working in extended precision keeps the check's own rounding (a few ulp
    of ``max |H|``, which grows like ``N**2``) out of the measurement.
    """
    W, Ht, Hg = np.asarray(W), np.asarray(Ht), np.asarray(Hg)
    rows, cols = np.nonzero((Ht != 0) | (Hg != 0))
    worst = mpmath.mpf(0)
    with mpmath.workdps(40):
        mc = lambda z: mpmath.mpc(z.real, z.imag)
        for i, j in zip(rows.tolist(), cols.tolist()):
            d = mpmath.conj(mc(W[i])) * mc(Ht[i, j]) * mc(W[j]) - mc(Hg[i, j])
            worst = max(worst, abs(d))
    return float(worst)


@dataclass
class EquivalenceReport:
    N: int
    alpha: float
    matrix_deviation: float
    spectrum_deviation: float
    matrix_tol: float
    spectrum_tol: float

    @property
    def passed(self) -> bool:
        return self.matrix_deviation <= self.matrix_tol and self.spectrum_deviation <= self.spectrum_tol

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "alpha": self.alpha,
            "matrix_deviation": self.matrix_deviation,
            "spectrum_deviation": self.spectrum_deviation,
            "passed": self.passed,
        }


def unitary_equivalence_check(
    g: RingGrid, matrix_tol: float = 1e-13, spectrum_tol: float = 1e-10, relative: bool = False
) -> EquivalenceReport:
    """Compare ``W^H H_twisted W`` with ``H_gauge`` and their spectra.

    The matrix deviation is the largest entrywise difference, absolute by
    default or divided by ``max |H|`` when ``relative`` is set. Spectra are
    compared relative to the largest level.
    """
    Ht = build_ring_hamiltonian(g.with_kind(TWISTED))
    Hg = build_ring_hamiltonian(g.with_kind(GAUGE))
    W = ring_gauge_transform(g)
    mdev = _sandwich_deviation(W, Ht, Hg)
    if relative:
        mdev /= float(np.max(np.abs(Ht)))
    et = scipy.linalg.eigvalsh(Ht)
    eg = scipy.linalg.eigvalsh(Hg)
    sdev = float(np.max(np.abs(et - eg)) / max(np.max(np.abs(et)), 1e-300))
    return EquivalenceReport(g.N, g.alpha, mdev, sdev, matrix_tol, spectrum_tol)
