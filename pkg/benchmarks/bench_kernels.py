"""Compiled loop kernels against the vectorised numpy fallback.

    python benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Run with GEOTRANSIT_DISABLE_JIT=1 to confirm that the fallback is what the
package uses when compilation is switched off.
"""
import argparse
import time

import numpy as np

from geotransit import _kernels as K
from geotransit.geom import random_arrays


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"jit enabled: {K.JIT_ENABLED}   n = {args.n}")
    for s in (1.0, 0.0, -1.0):
        k2 = -np.sign(s) * s * s
        are, aim = random_arrays(rng, s, args.n)
        bre, bim = random_arrays(rng, s, args.n)
        # warm-up compiles the loop kernels
        K.bmatmul(are[:2], aim[:2], bre[:2], bim[:2], k2, use_jit=True)
        K.projective4(are[:2], aim[:2], k2, use_jit=True)
        for name, call in (
            ("bmatmul", lambda j: K.bmatmul(are, aim, bre, bim, k2, use_jit=j)),
            ("projective4", lambda j: K.projective4(are, aim, k2, use_jit=j)),
        ):
            t_np = best_of(lambda: call(False), args.repeat)
            t_jit = best_of(lambda: call(True), args.repeat)
            a, b = call(False), call(True)
            pairs = zip(a, b) if isinstance(a, tuple) else [(a, b)]
            diff = max(np.abs(x - y).max() for x, y in pairs)
            print(f"s={s:+.0f} {name:12s} numpy {t_np * 1e3:8.2f} ms   "
                  f"loop {t_jit * 1e3:8.2f} ms   speedup {t_np / t_jit:5.2f}x   "
                  f"max diff {diff:.1e}")


if __name__ == "__main__":
    main()
