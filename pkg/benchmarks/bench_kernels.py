"""Time the numba and numpy kernels on the same workloads.

    python3 benchmarks/bench_kernels.py --steps 100000 --spins 2 4 8
"""

import argparse
import time

import numpy as np

from qtmchaos import kernels
from qtmchaos._accel import NUMBA_AVAILABLE
from qtmchaos.drive import DriveSequence


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(n_spins, steps, repeat, backends):
    dim = 2 ** n_spins
    psi0 = np.zeros(dim, dtype=np.complex128)
    psi0[0] = 1.0
    angles = DriveSequence("fibonacci", 0.7).angles((steps + 1) // 2)
    results = {}
    for backend in backends:
        # first call compiles (or loads the cache) outside the timing
        states = kernels.evolve(psi0, angles, 2, n_spins, backend=backend)
        kernels.reduced_density(states, n_spins, 0, backend=backend)
        states = kernels.evolve(psi0, angles, steps, n_spins, backend=backend)
        t_evolve = best_of(lambda: kernels.evolve(psi0, angles, steps, n_spins, backend=backend), repeat)
        t_reduce = best_of(lambda: kernels.reduced_density(states, n_spins, 0, backend=backend), repeat)
        results[backend] = (t_evolve, t_reduce, states)
    return results


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--spins", type=int, nargs="+", default=[2, 4, 8])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    backends = ["numpy"] + (["numba"] if NUMBA_AVAILABLE else [])
    print(f"{'spins':>5} {'backend':>7} {'evolve [s]':>11} {'reduce [s]':>11} {'speedup':>8}")
    for n in args.spins:
        res = bench(n, args.steps, args.repeat, backends)
        base = res["numpy"][0] + res["numpy"][1]
        for b, (te, tr, states) in res.items():
            print(f"{n:>5} {b:>7} {te:>11.4f} {tr:>11.4f} {base / (te + tr):>7.1f}x")
        if "numba" in res:
            diff = np.abs(res["numba"][2] - res["numpy"][2]).max()
            print(f"{'':>5} max |numba - numpy| = {diff:.1e}")


if __name__ == "__main__":
    main()
