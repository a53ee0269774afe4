"""Time the numba and numpy kernel backends on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each workload runs once untimed (numba compilation, caches), then the best
of ``--repeat`` runs is reported together with the numpy/numba ratio.
"""

import argparse
import time

import numpy as np

from torusfourier import kernels
from torusfourier.double_series import geometric_terms
from torusfourier.oracles import CoefficientOracle
from torusfourier.polydisc import dense_section_matrix, section_terms


def workloads():
    orc = CoefficientOracle.toeplitz_composite(3)
    table = section_terms(orc, 84)
    rng = np.random.default_rng(0)
    z = np.exp(2j * np.pi * rng.random((4096, 84)))
    zr, zi = np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag)
    bil = (table.rows, table.cols, table.coef_re, table.coef_im, zr, zi, zr, zi)

    mat = dense_section_matrix(CoefficientOracle.single_toeplitz_block(3), 64)
    z0 = np.exp(2j * np.pi * rng.random((4, 64)))

    terms = geometric_terms().table(96)
    tre, tim = np.ascontiguousarray(terms.real), np.ascontiguousarray(terms.imag)
    sums = kernels.get_backend("numpy").partial_sum_table(tre, tim)

    big = rng.normal(size=100_000)
    return {
        "compensated_sum 1e5": lambda be: be.compensated_sum(big, big),
        "bilinear_sections 4096x84": lambda be: be.bilinear_sections(*bil),
        "partial_sum_table 96x96": lambda be: be.partial_sum_table(tre, tim),
        "cauchy_violations_2d 96x96": lambda be: be.cauchy_violations_2d(*sums),
        "coordinate_ascent C_3 x4": lambda be: be.coordinate_ascent(mat, z0, 720, 50, 60, 1e-14),
    }


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    nb = kernels.get_backend("numba")
    npy = kernels.get_backend("numpy")
    print(f"{'workload':32s} {'numba [s]':>11s} {'numpy [s]':>11s} {'ratio':>8s}")
    for name, work in workloads().items():
        t_nb = best_of(lambda: work(nb), args.repeat)
        t_np = best_of(lambda: work(npy), args.repeat)
        print(f"{name:32s} {t_nb:11.4f} {t_np:11.4f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
