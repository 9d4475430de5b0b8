"""Numba vs numpy kernels.

Times the two hot kernels on identical random segments, then an end-to-end
batch of dual-functional draws in a subprocess per value of
``LAMPERTI_OU_BACKEND``.

    python benchmarks/bench_kernels.py [--sizes 1000 100000] [--repeat 5]
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from lamperti_ou._backend import get_kernels

END_TO_END = """
import time
from lamperti_ou.models import JumpLaw, LevyModel
from lamperti_ou.replicates import log_hat_I_draws
for m in (LevyModel.compound_poisson(1.0, JumpLaw.constant(1.0)), LevyModel.stable_subordinator(0.5)):
    log_hat_I_draws(m, 20, 0)  # warm-up (numba compilation)
    t0 = time.perf_counter()
    log_hat_I_draws(m, {n}, 1)
    print(m.label(), time.perf_counter() - t0)
"""


def segment(n, rng):
    return rng.exponential(0.01, n), rng.exponential(1.0, n) * (rng.random(n) < 0.1)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(sizes, repeat):
    nb, npk = get_kernels("numba"), get_kernels("numpy")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'n':>9}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for n in sizes:
        dt, jumps = segment(n, rng)
        cases = {
            "gou_scan": lambda k: k.gou_scan(dt, jumps, 0.5, 0.0, 0.0),
            # huge tolerance so the accumulation runs over the whole block
            "hat_i_accumulate": lambda k: k.hat_i_accumulate(dt, jumps, 0.5, False, 0.0, -math.inf, 1e300, 0.0),
        }
        for name, call in cases.items():
            call(nb)  # compile
            a = best(lambda: call(nb), repeat)
            b = best(lambda: call(npk), repeat)
            print(f"{name:<18}{n:>9}{1e3 * a:>12.3f}{1e3 * b:>12.3f}{b / a:>10.1f}x")


def end_to_end(n):
    print(f"\nend to end: {n} draws of the dual functional")
    for backend in ("numba", "numpy"):
        env = dict(os.environ, LAMPERTI_OU_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env, capture_output=True,
                             text=True, check=True).stdout
        for line in out.strip().splitlines():
            label, secs = line.rsplit(" ", 1)
            print(f"  {backend:<6} {label:<55} {float(secs):8.3f} s")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--draws", type=int, default=2000)
    a = p.parse_args(argv)
    kernel_table(a.sizes, a.repeat)
    end_to_end(a.draws)


if __name__ == "__main__":
    main()
