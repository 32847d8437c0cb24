"""Time the compiled core against the pure-Python fallback.

    python3 benchmarks/bench_core.py [--repeat 5]

Each kernel is run on identical inputs with both backends; results are
checked for agreement before timings are reported.
"""
import argparse
import timeit

import numpy as np

from fluxtwin import _core_py, twin

try:
    from fluxtwin import _core as _core_cy
except ImportError:
    _core_cy = None


def cases():
    rng = np.random.default_rng(0)
    words = [[int(a) for a in rng.integers(1, 6, size=64)] for _ in range(500)]
    traj = twin.word_to_trajectory(twin.TwinWord(4, (1, 2, 3, 2, 1) * 6 + (1, 2, 1, 2, 1, 2)))
    pts = np.vstack([traj.points] * 20)
    masses = np.array([1.0, 2.0, 3.0, 4.0])
    idx = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], dtype=np.int64)
    phi = np.subtract.outer(*(2 * [2 * np.pi * np.arange(64) / 64]))
    return {
        "reduce_letters (500 words x 64)": lambda core: [core.reduce_letters(w) for w in words],
        "sweep_angles (%d vertices, 4 triples)" % len(pts): lambda core: core.sweep_angles(pts, masses, idx, 1e-9, 1.0, 30),
        "covering_sum (64x64 grid, N=64)": lambda core: core.covering_sum(phi, 0.3, 1.0, 1.0, 0.5, True, 64),
        "mode_sum (64x64 grid, M=64)": lambda core: core.mode_sum(phi, 0.3, 1.0, 1.0, 0.5, True, 64),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a[:3], b[:3]))
    if isinstance(a, list) and a and isinstance(a[0], list):
        return all(list(x) == list(y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a), np.asarray(b), rtol=1e-12, atol=1e-14)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core_cy is None:
        print("compiled core not built; only the Python fallback is available")
    print(f"{'kernel':<42}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_core_py), number=1, repeat=args.repeat)) * 1e3
        if _core_cy is None:
            print(f"{name:<42}{t_py:>14.2f}{'-':>14}{'-':>10}")
            continue
        assert _same(fn(_core_py), fn(_core_cy)), f"backends disagree on {name}"
        t_cy = min(timeit.repeat(lambda: fn(_core_cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<42}{t_py:>14.2f}{t_cy:>14.2f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
