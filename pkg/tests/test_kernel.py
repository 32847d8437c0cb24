import json
import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy import integrate

from fluxtwin import kernel
from fluxtwin.errors import DegenerateTimeError, TruncationError, TruncationWarning

TH = 2 * math.pi * np.arange(32) / 32


def test_free_kernel_diagonal_and_normalisation():
    m, tau, hbar = 1.7, 0.4, 0.8
    assert kernel.free_kernel_line(m, tau, 0.3, 0.3, hbar) == pytest.approx(math.sqrt(m / (2 * math.pi * hbar * tau)))
    total, _ = integrate.quad(lambda y: kernel.free_kernel_line(m, tau, 0.3, y, hbar), -np.inf, np.inf, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_free_kernel_semigroup():
    m, a, b = 1.0, 0.3, 0.5
    x, y = 0.2, -0.7
    comp, _ = integrate.quad(
        lambda s: kernel.free_kernel_line(m, a, x, s) * kernel.free_kernel_line(m, b, s, y), -np.inf, np.inf, epsabs=1e-13
    )
    assert comp == pytest.approx(kernel.free_kernel_line(m, a + b, x, y), abs=1e-6)


def test_free_kernel_real_time_modulus():
    z = kernel.free_kernel_line(1.0, 2.0, 0.0, 1.3, mode="real")
    assert abs(z) == pytest.approx(math.sqrt(1 / (4 * math.pi)))


def test_degenerate_time():
    with pytest.raises(DegenerateTimeError):
        kernel.free_kernel_line(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(DegenerateTimeError):
        kernel.KernelSpec(time=0.0)
    with pytest.raises(DegenerateTimeError):
        kernel.KernelSpec(time=-1.0)
    with pytest.raises(ValueError):
        kernel.KernelSpec(mode="complex")


@pytest.mark.parametrize("tau", [0.05, 0.5, 3.0])
def test_untwisted_kernel_is_theta_function(tau):
    spec = kernel.KernelSpec(mu=1.3, radius=0.8, time=tau)
    s = spec.reduced_time
    phi = np.linspace(-3, 9, 25)
    got = kernel.covering_sum_kernel_ring(spec, phi, 0.0)
    expected = [float(mpmath.jtheta(3, p / 2, mpmath.exp(-s))) / (2 * math.pi) for p in phi]
    assert np.allclose(got.real, expected, rtol=1e-12, atol=1e-14)
    assert np.all(got.real > 0) and np.max(np.abs(got.imag)) < 1e-15


@pytest.mark.parametrize("alpha", [0.0, 0.13, 0.5, 0.9, 2.25])
@pytest.mark.parametrize("tau", [0.1, 1.0, 6.0])
def test_covering_equals_mode_sum(alpha, tau):
    spec = kernel.KernelSpec(time=tau, alpha=alpha)
    cov = kernel.covering_sum_kernel_ring(spec, TH, TH)
    mode = kernel.mode_sum_kernel_ring(spec, TH, TH)
    assert np.max(np.abs(cov - mode)) < 1e-8


def test_twist_identity_within_tail():
    spec = kernel.KernelSpec(time=0.7, alpha=0.31)
    for n in (1, 2, -1):
        v1, t1 = kernel.covering_sum_kernel_ring(spec, TH + 2 * math.pi * n, TH, return_tail=True)
        v0, t0 = kernel.covering_sum_kernel_ring(spec, TH, TH, return_tail=True)
        res = np.abs(v1 - np.exp(2j * math.pi * 0.31 * n) * v0)
        assert np.all(res <= 10 * np.maximum(t0, t1))


def test_mode_sum_limits():
    spec = kernel.KernelSpec(time=200.0, alpha=0.0)
    assert kernel.mode_sum_kernel_ring(spec, 1.0, 1.0) == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    half = kernel.KernelSpec(time=0.4, alpha=0.5)
    v = kernel.mode_sum_kernel_ring(half, TH, TH)
    # modes m and -1-m pair into a cosine series
    assert np.max(np.abs(v.imag)) < 1e-14
    assert np.max(np.abs(v.real)) > 0.1


def test_gauge_kernel_properties():
    spec = kernel.KernelSpec(time=0.3, alpha=0.42)
    g, tg = kernel.gauge_transform_kernel(spec, TH, TH, return_tail=True)
    g2, tg2 = kernel.gauge_transform_kernel(spec, TH + 2 * math.pi, TH, return_tail=True)
    assert np.all(np.abs(g2 - g) <= 10 * np.maximum(tg, tg2))
    cov = kernel.covering_sum_kernel_ring(spec, TH, TH)
    assert np.max(np.abs(np.abs(g) - np.abs(cov))) < 1e-12
    zero = kernel.KernelSpec(time=0.3)
    assert np.array_equal(kernel.gauge_transform_kernel(zero, TH, TH), kernel.covering_sum_kernel_ring(zero, TH, TH))


def test_ring_semigroup():
    a, b = kernel.KernelSpec(time=0.3, alpha=0.27), kernel.KernelSpec(time=0.5, alpha=0.27)
    n = 64
    th = 2 * math.pi * np.arange(n) / n
    U = kernel.covering_sum_kernel_ring(a, th, th)
    V = kernel.covering_sum_kernel_ring(b, th, th)
    W = kernel.covering_sum_kernel_ring(kernel.KernelSpec(time=0.8, alpha=0.27), th, th)
    assert np.max(np.abs(kernel.compose_ring(U, V, n) - W)) < 1e-10


def test_scalar_and_broadcast_shapes():
    spec = kernel.KernelSpec(time=1.0, alpha=0.2)
    z, t = kernel.covering_sum_kernel_ring(spec, 0.4, 0.1, return_tail=True)
    assert isinstance(z, complex) and isinstance(t, float)
    assert kernel.covering_sum_kernel_ring(spec, TH, 0.0).shape == (32,)
    assert kernel.mode_sum_kernel_ring(spec, TH, TH[:5]).shape == (32, 5)


def test_real_time_truncation_is_flagged():
    spec = kernel.KernelSpec(time=1.0, mode="real", n_wind=8)
    with pytest.warns(TruncationWarning):
        kernel.covering_sum_kernel_ring(spec, 0.0, 0.0)
    strict = kernel.KernelSpec(time=1.0, mode="real", n_wind=8, strict=True)
    with pytest.raises(TruncationError):
        kernel.covering_sum_kernel_ring(strict, 0.0, 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        kernel.covering_sum_kernel_ring(kernel.KernelSpec(time=1.0), 0.0, 0.0)


def test_kernel_table_output(tmp_path):
    spec = kernel.KernelSpec(time=0.5, alpha=0.2)
    table = kernel.kernel_table(spec, n_theta=8)
    assert table.values.shape == (8, 8) and table.is_hermitian()
    text = table.to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    meta = json.loads(lines[0][2:])
    assert meta["n_theta"] == 8 and meta["method"] == "covering"
    assert lines[1] == "theta,theta_prime,re,im" and len(lines) == 2 + 64
    re0 = float(lines[2].split(",")[2])
    assert re0 == table.values[0, 0].real  # 17 digits round-trip exactly
    path = tmp_path / "k.csv"
    table.write(path)
    assert path.read_text() == text
    assert json.loads((tmp_path / "k.csv.json").read_text()) == meta
    with pytest.raises(ValueError):
        kernel.kernel_table(spec, method="nope")
