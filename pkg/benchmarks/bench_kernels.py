"""Compare the compiled and numpy backends of ``output_trace_norms``.

    python benchmarks/bench_kernels.py [--repeat N]

Each case times one search-sized batch: Kraus operators of a channel on
``d`` dimensions, ``T`` Haar isometries into ``C^d`` and the Gell-Mann basis
of the subspace.
"""
import argparse
import timeit

import numpy as np

from privmap import _kernels_py
from privmap.channels import depolarizing, full_dephasing
from privmap.linalg import gell_mann_basis, haar_isometry

try:
    from privmap import _kernels
except ImportError:
    _kernels = None

CASES = [
    ("2-qubit dephasing, k=2", full_dephasing(2), 2, 512),
    ("3-qubit dephasing, k=2", full_dephasing(3), 2, 512),
    ("3-qubit dephasing, k=4", full_dephasing(3), 4, 256),
    ("depolarizing(4), k=2", depolarizing(4), 2, 512),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'case':28s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>9s}")
    for name, phi, k, T in CASES:
        isos = np.array([haar_isometry(phi.dim_in, k, rng) for _ in range(T)])
        ops = gell_mann_basis(k)
        t_py = min(timeit.repeat(lambda: _kernels_py.output_trace_norms(phi.kraus, isos, ops), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{name:28s} {1e3 * t_py:11.2f} {'n/a':>12s}")
            continue
        t_cy = min(timeit.repeat(lambda: _kernels.output_trace_norms(phi.kraus, isos, ops), number=1, repeat=args.repeat))
        diff = np.max(np.abs(_kernels.output_trace_norms(phi.kraus, isos, ops) - _kernels_py.output_trace_norms(phi.kraus, isos, ops)))
        print(f"{name:28s} {1e3 * t_py:11.2f} {1e3 * t_cy:12.2f} {t_py / t_cy:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()
