"""Compare the numba and pure-numpy kernels.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Times the
Jacobi eigensolver and one propagation step at several sizes, then a full
``simulate`` run with each backend bound in turn.  The first numba call of
every kernel is excluded (compilation).
"""

import argparse
import time

import numpy as np

from qboxbloch import _kernels, models
from qboxbloch.fields import FieldProfile, Gaussian, Pulse
from qboxbloch.integrators import StepperSpec, simulate
from qboxbloch.verify import random_density, random_dipole, random_hermitian


def best_of(fn, repeat, number):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def backends():
    out = {"numpy": (_kernels.jacobi_eigh_numpy, _kernels.conjugate_numpy)}
    if _kernels.HAVE_NUMBA:
        out["numba"] = (_kernels.jacobi_eigh_numba, _kernels.conjugate_numba)
    return out


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<10}{'n':>4}" + "".join(f"{name:>14}" for name in backends()) + f"{'speedup':>10}")
    for n in (2, 4, 8, 16):
        V, rho = random_hermitian(rng, n), random_density(rng, n)
        for label, call in (("eigh", lambda e, c: e(V)), ("step", lambda e, c: c(rho, V, 0.01))):
            times = {}
            for name, (eigh, conj) in backends().items():
                call(eigh, conj)  # warm-up / compile
                times[name] = best_of(lambda: call(eigh, conj), repeat, 200)
            speed = times["numpy"] / times["numba"] if "numba" in times else float("nan")
            print(f"{label:<10}{n:>4}" + "".join(f"{t * 1e6:>11.1f} us" for t in times.values())
                  + f"{speed:>9.1f}x")


def bench_simulate(repeat):
    rng = np.random.default_rng(1)
    sys = models.OneSpeciesSystem(np.sort(rng.normal(size=4)), random_dipole(rng, 4))
    prof = FieldProfile([Pulse([0.5, 0, 0], 1.0, 0.0, Gaussian(10.0, 3.0))])
    spec = StepperSpec("unitary_midpoint", 1e-2, 0.0, 20.0, 100)
    rho0 = random_density(rng, 4)
    saved = _kernels.jacobi_eigh, _kernels.conjugate
    try:
        for name, (eigh, conj) in backends().items():
            _kernels.jacobi_eigh, _kernels.conjugate = eigh, conj
            simulate("one_species", sys, rho0, prof, StepperSpec("unitary_midpoint", 1e-2, 0.0, 0.1))
            t = best_of(lambda: simulate("one_species", sys, rho0, prof, spec), repeat, 1)
            print(f"simulate (4 levels, 2000 unitary steps) with {name:<6}: {t:.3f} s")
    finally:
        _kernels.jacobi_eigh, _kernels.conjugate = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"numba available: {_kernels.HAVE_NUMBA}, active by default: {_kernels.USE_NUMBA}")
    bench_kernels(args.repeat)
    bench_simulate(args.repeat)


if __name__ == "__main__":
    main()
