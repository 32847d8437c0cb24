"""Covering-space propagators on the angular circle at fixed hyperradius.

The universal cover of the circle is the line, and the deck group (the
integers) acts by ``theta -> theta + 2 pi n``. The twisted kernel is the sum
over windings of free kernels of a particle with moment of inertia
``mu r**2`` weighted by ``exp(2 pi i alpha n)``; the mode expansion in the
twisted eigenbasis ``exp(i (m + alpha) theta)`` is the Poisson-dual form of
the same object and serves as its independent check.

Time is either real (oscillatory kernels) or imaginary (heat kernels).
Only imaginary time gives absolutely convergent sums; real-time sums are
evaluated as truncated and flagged by their tail estimate.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import _backend, output
from .errors import DegenerateTimeError, TruncationError, TruncationWarning

IMAGINARY = "imaginary"
REAL = "real"


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of a ring kernel.

    Attributes
    ----------
    mu : float
        Effective mass.
    radius : float
        Fixed hyperradius ``r``.
    time : float
        Evolution parameter; ``tau`` in imaginary mode, ``t`` in real mode.
    mode : {"imaginary", "real"}
    alpha : float
        Flux parameter.
    n_wind, n_modes : int
        Sums run over ``|n| <= n_wind`` and ``|m| <= n_modes``.
    hbar : float
    tail_tol : float
        Tail estimates above this trigger a :class:`TruncationWarning`, or a
        :class:`TruncationError` when ``strict`` is set.
    """

    mu: float = 1.0
    radius: float = 1.0
    time: float = 1.0
    mode: str = IMAGINARY
    alpha: float = 0.0
    n_wind: int = 64
    n_modes: int = 64
    hbar: float = 1.0
    tail_tol: float = 1e-8
    strict: bool = False

    def __post_init__(self):
        if self.mode not in (IMAGINARY, REAL):
            raise ValueError(f"mode must be 'imaginary' or 'real', got {self.mode!r}")
        if self.n_wind < 1 or self.n_modes < 1:
            raise ValueError("truncations n_wind and n_modes must be >= 1")
        if not (self.mu > 0 and self.radius > 0 and self.hbar > 0):
            raise ValueError("mu, radius and hbar must be positive")
        if self.time == 0 or not math.isfinite(self.time):
            raise DegenerateTimeError("evolution time must be nonzero and finite")
        if self.mode == IMAGINARY and self.time <= 0:
            raise DegenerateTimeError("imaginary time must be positive")

    @property
    def imaginary(self) -> bool:
        return self.mode == IMAGINARY

    @property
    def inertia(self) -> float:
        return self.mu * self.radius**2

    @property
    def reduced_time(self) -> float:
        """Dimensionless ``hbar * time / (2 mu r**2)``."""
        return self.hbar * self.time / (2.0 * self.inertia)


def free_kernel_line(
    m: float, t: float, x, y, hbar: float = 1.0, mode: str = IMAGINARY
):
    """Free-particle propagator on the line.

    In imaginary time this is the heat kernel
    ``sqrt(m / (2 pi hbar tau)) exp(-m (x - y)**2 / (2 hbar tau))``; in real
    time ``sqrt(m / (2 pi i hbar t)) exp(i m (x - y)**2 / (2 hbar t))``.
    """
    if t == 0:
        raise DegenerateTimeError("free kernel is singular at t = 0")
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    if mode == IMAGINARY:
        if t < 0:
            raise DegenerateTimeError("imaginary time must be positive")
        return np.sqrt(m / (2.0 * math.pi * hbar * t)) * np.exp(-m * d * d / (2.0 * hbar * t))
    if mode == REAL:
        return np.sqrt(m / (2j * math.pi * hbar * t)) * np.exp(1j * m * d * d / (2.0 * hbar * t))
    raise ValueError(f"unknown mode {mode!r}")


def _check_tail(spec: KernelSpec, tail):
    worst = float(np.max(tail)) if np.size(tail) else 0.0
    if worst > spec.tail_tol:
        msg = f"series tail {worst:.3g} exceeds {spec.tail_tol:.3g}; increase the truncation"
        if spec.strict:
            raise TruncationError(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=3)


def _phi(theta, theta_prime):
    a = np.asarray(theta, dtype=float)
    b = np.asarray(theta_prime, dtype=float)
    if a.ndim and b.ndim:
        return np.subtract.outer(a, b)
    return a - b


def _scalar(values, tails):
    if np.ndim(values) == 0:
        return complex(values), float(tails)
    return values, tails


def covering_sum_kernel_ring(spec: KernelSpec, theta, theta_prime, return_tail: bool = False):
    """Twisted ring kernel as a winding sum over covering-space images.

    ``theta`` and ``theta_prime`` live on the cover and may be any reals.
    Scalars give a scalar, a scalar and an array broadcast, and two arrays
    give the outer grid ``U[a, b] = U(theta[a], theta_prime[b])``.
    """
    phi = _phi(theta, theta_prime)
    values, tails = _backend.core.covering_sum(
        phi, spec.alpha, spec.inertia, spec.hbar, spec.time, spec.imaginary, spec.n_wind
    )
    _check_tail(spec, tails)
    values, tails = _scalar(values, tails)
    return (values, tails) if return_tail else values


def mode_sum_kernel_ring(spec: KernelSpec, theta, theta_prime, return_tail: bool = False):
    """Twisted ring kernel from its eigenmode expansion."""
    phi = _phi(theta, theta_prime)
    values, tails = _backend.core.mode_sum(
        phi, spec.alpha, spec.inertia, spec.hbar, spec.time, spec.imaginary, spec.n_modes
    )
    _check_tail(spec, tails)
    values, tails = _scalar(values, tails)
    return (values, tails) if return_tail else values


def gauge_transform_kernel(spec: KernelSpec, theta, theta_prime, return_tail: bool = False):
    """Kernel in the periodic gauge: ``exp(-i alpha (theta - theta')) U(theta, theta')``."""
    phi = _phi(theta, theta_prime)
    values, tails = covering_sum_kernel_ring(spec, theta, theta_prime, return_tail=True)
    values = np.exp(-1j * spec.alpha * phi) * values
    # the extra phase costs a rounding error proportional to |alpha * phi|
    tails = tails + np.abs(values) * (1.0 + np.abs(spec.alpha * phi)) * np.finfo(float).eps
    values, tails = _scalar(values, tails)
    return (values, tails) if return_tail else values


KERNEL_METHODS = {
    "covering": covering_sum_kernel_ring,
    "mode": mode_sum_kernel_ring,
    "gauge": gauge_transform_kernel,
}


@dataclass
class KernelTable:
    """Kernel values on a ``(theta, theta')`` grid.

    ``values[a, b]`` is ``U(thetas[a], thetas[b])`` and ``tail`` the largest
    truncation estimate over the grid.
    """

    thetas: np.ndarray
    values: np.ndarray
    spec: KernelSpec
    method: str
    tail: float

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.values))))
        return bool(np.max(np.abs(self.values - self.values.conj().T)) <= tol * scale)

    def metadata(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "method": self.method,
            "n_theta": int(len(self.thetas)),
            "tail_estimate": self.tail,
        }

    def to_csv(self) -> str:
        rows = (
            (th, thp, self.values[a, b].real, self.values[a, b].imag)
            for a, th in enumerate(self.thetas)
            for b, thp in enumerate(self.thetas)
        )
        return output.dumps_csv(("theta", "theta_prime", "re", "im"), rows, self.metadata())

    def write(self, path) -> None:
        """Write ``path`` as CSV and ``path + '.json'`` as the metadata sidecar."""
        path = str(path)
        with open(path, "w") as fh:
            fh.write(self.to_csv())
        with open(path + ".json", "w") as fh:
            fh.write(output.dumps_json(self.metadata()))


def kernel_table(spec: KernelSpec, n_theta: int = 32, method: str = "covering") -> KernelTable:
    try:
        fn = KERNEL_METHODS[method]
    except KeyError:
        raise ValueError(f"method must be one of {sorted(KERNEL_METHODS)}") from None
    thetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    values, tails = fn(spec, thetas, thetas, return_tail=True)
    return KernelTable(thetas, values, spec, method, float(np.max(tails)))


def compose_ring(u_left: np.ndarray, u_right: np.ndarray, n_theta: int) -> np.ndarray:
    """Trapezoid-rule composition ``int_0^{2 pi} U(., s) V(s, .) ds`` on a uniform grid."""
    return u_left @ u_right * (2.0 * math.pi / n_theta)
