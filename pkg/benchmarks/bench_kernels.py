"""Compare the compiled and pure-Python eigensolver backends.

Run with ``python3 benchmarks/bench_kernels.py``. Each workload is timed
under every available backend and the results are checked to agree.
"""
import argparse
import time

import numpy as np

from jointmeas import linalg
from jointmeas.operator_basis import basis_for_dimension, qutrit_builtin
from jointmeas.povm import critical_eta, face_operators
from jointmeas.states import make_rng


def _random_hermitian(rng, n, count):
    a = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    return 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))


def _time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(count):
    rng = make_rng(1)
    stack5 = _random_hermitian(rng, 5, count)
    stack16 = _random_hermitian(rng, 16, max(count // 20, 1))
    faces4 = face_operators(basis_for_dimension(4))
    qutrit = qutrit_builtin()
    return {
        f"herm_eig 5x5 x{count}": lambda: np.array([linalg.herm_eig(h).eigenvalues for h in stack5]),
        f"herm_eig 16x16 x{len(stack16)}": lambda: np.array([linalg.herm_eig(h).eigenvalues for h in stack16]),
        "min_eigenvalues n=4 faces (1024)": lambda: linalg.min_eigenvalues(faces4),
        "critical_eta qutrit + bisection": lambda: np.array([critical_eta(qutrit).bisection]),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = linalg.available_backends()
    results = {}
    print(f"{'workload':40s}" + "".join(f"{b:>12s}" for b in backends) + "    speedup")
    for name in workloads(args.count):
        row = {}
        for backend in backends:
            prev = linalg.use_backend(backend)
            try:
                # rebuild closures so cached state does not leak between backends
                row[backend] = _time(workloads(args.count)[name], args.repeat)
            finally:
                linalg.use_backend(prev)
        results[name] = row
        times = [row[b][0] for b in backends]
        speed = f"{times[-1] / times[0]:9.1f}x" if len(times) > 1 else "      n/a"
        print(f"{name:40s}" + "".join(f"{t:11.4f}s" for t in times) + "  " + speed)
        if len(backends) > 1:
            vals = [row[b][1] for b in backends]
            err = float(np.max(np.abs(vals[0] - vals[1])))
            if err > 1e-9:
                raise SystemExit(f"backends disagree on {name}: {err:.2e}")


if __name__ == "__main__":
    main()
