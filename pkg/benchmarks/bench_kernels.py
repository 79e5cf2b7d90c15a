"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs each hot kernel on realistic workloads with both backends, checks the
outputs stay bit-identical, and prints a timing table.

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import importlib
import time

import numpy as np

from ecgdet._kernels import _pure

try:
    _native = importlib.import_module("ecgdet._kernels._native")
except ImportError:
    _native = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads(rng):
    samples = rng.integers(-2048, 2048, size=650_000, dtype=np.int64)
    packed = _pure.pack_fmt212(samples)

    n_points = 3600
    xs = np.linspace(0, 639, n_points).astype(np.int64)
    ys = (320 + 250 * np.sin(np.linspace(0, 40, n_points))).astype(np.int64)

    image = np.full((640, 640), 255, dtype=np.uint8)

    def draw(impl):
        canvas = image.copy()
        impl.draw_polyline(canvas, xs, ys, 2)
        return canvas

    trace = draw(_pure)

    return [
        (
            "pack_fmt212 (650k samples)",
            lambda impl: impl.pack_fmt212(samples),
        ),
        (
            "unpack_fmt212 (650k samples)",
            lambda impl: impl.unpack_fmt212(packed, len(samples)),
        ),
        (
            "draw_polyline (3600 pts, 640x640)",
            draw,
        ),
        (
            "rotate_nearest (640x640, 0.7 deg)",
            lambda impl: impl.rotate_nearest(trace, 0.7),
        ),
    ]


def check_equivalence(make_call):
    np.testing.assert_array_equal(make_call(_pure), make_call(_native))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    args = parser.parse_args()

    if _native is None:
        print("compiled backend unavailable; build the extension to compare")

    rng = np.random.default_rng(0)
    rows = []
    for name, call in workloads(rng):
        pure_s = timeit(lambda: call(_pure), args.repeats)
        if _native is not None:
            check_equivalence(call)
            native_s = timeit(lambda: call(_native), args.repeats)
            speedup = pure_s / native_s if native_s > 0 else float("inf")
            rows.append((name, pure_s, native_s, speedup))
        else:
            rows.append((name, pure_s, None, None))

    header = f"{'kernel':<36}{'pure (ms)':>12}{'native (ms)':>13}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, pure_s, native_s, speedup in rows:
        native_col = f"{native_s * 1e3:>13.3f}" if native_s is not None else f"{'-':>13}"
        speed_col = f"{speedup:>8.2f}x" if speedup is not None else f"{'-':>9}"
        print(f"{name:<36}{pure_s * 1e3:>12.3f}{native_col}{speed_col}")
    if _native is not None:
        print("\noutputs verified bit-identical between backends")


if __name__ == "__main__":
    main()
