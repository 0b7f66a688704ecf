"""Compare the compiled and pure-numpy power-sum kernels.

Both backends consume the same bit stream, so for equal seeds they must agree:
bit for bit when q/p is 1, 2 or 1/2, and to about 1e-13 relative otherwise
(libm ``pow`` against numpy's vectorised ``power``).

    python benchmarks/bench_kernels.py [--rows 2000] [--n 4096] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from lpball.kernels import available_backends, power_sums

CASES = [(2.0, 1.0), (1.0, 2.0), (2.0, 4.0), (1.5, 2.5), (3.0, 1.0)]


def run(backend: str, n: int, rows: int, p: float, q: float, seed: int) -> tuple[float, np.ndarray]:
    bg = np.random.PCG64(seed)
    t0 = time.perf_counter()
    out = power_sums(bg, n, rows, p, q, k=n // 2, backend=backend)
    return time.perf_counter() - t0, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the fallback is available")
    print(f"n={args.n} rows={args.rows} (best of {args.repeat})")
    print(f"{'p':>5} {'q':>5} " + " ".join(f"{b:>12}" for b in backends) + f" {'speedup':>8} {'max rel diff':>13}")
    for p, q in CASES:
        times, outs = {}, {}
        for b in backends:
            best = min(run(b, args.n, args.rows, p, q, seed=r)[0] for r in range(args.repeat))
            times[b] = best
            outs[b] = run(b, args.n, args.rows, p, q, seed=12345)[1]
        line = f"{p:5g} {q:5g} " + " ".join(f"{times[b]:11.3f}s" for b in backends)
        if len(backends) == 2:
            a, c = outs["cython"], outs["python"]
            rel = float(np.max(np.abs(a - c) / np.abs(c)))
            line += f" {times['python'] / times['cython']:7.1f}x {rel:13.2e}"
        print(line)


if __name__ == "__main__":
    main()
