"""Time each hot kernel under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--bound 1000000] [--repeat 5]

Both kernel tables are called directly, so one process compares them; the
first numba call per kernel is a warm-up and is not timed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qrdensity import _kernels


def cases(bound: int):
    primes = np.flatnonzero(_kernels.NUMPY_KERNELS["sieve_mask"](bound)).astype(np.int64)
    odd = primes[primes > 2]
    p = 1_000_003
    table = _kernels.NUMPY_KERNELS["residue_table"](p)
    a, b, s = (1, 9), (2, 6), 2
    nmax = min((p - 1 - x) // y - (s - 1) for x, y in zip(a, b))
    rng = np.random.default_rng(0)
    n = 20
    odd_masks = [int(x) for x in rng.integers(1, 1 << n, size=4)]
    even_masks = [int(x) for x in rng.integers(1, 1 << n, size=4)]
    return {
        "sieve_mask": (bound,),
        "legendre_prime": (210, odd),
        "residue_table": (p,),
        "count_windows": (table, a, b, s, nmax, 1),
        "parity_count": (odd_masks, even_masks, n),
    }


def best_of(fn, args, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend is available")
    backends = {"numpy": _kernels.NUMPY_KERNELS}
    if _kernels.HAVE_NUMBA:
        backends["numba"] = _kernels.NUMBA_KERNELS

    work = cases(args.bound)
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for name, call_args in work.items():
        row = {}
        results = set()
        for backend, table in backends.items():
            fn = table[name]
            out = fn(*call_args)  # warm-up / compile
            results.add(out if isinstance(out, int) else np.asarray(out).tobytes())
            row[backend] = best_of(fn, call_args, args.repeat)
        assert len(results) == 1, f"{name}: backends disagree"
        speed = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        print(f"{name:<16}" + "".join(f"{row[b] * 1e3:>10.2f}ms" for b in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
