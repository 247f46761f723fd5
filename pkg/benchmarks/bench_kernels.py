"""Compare the compiled and numpy phase-search kernels.

Times one objective/gradient evaluation and one full descent per backend
on random coset tensors, and reports the speedup of the compiled core.

    python benchmarks/bench_kernels.py [--dims 2x2 3x3 4x4] [--repeat 5]
"""
import argparse
import timeit

import numpy as np
from scipy.stats import unitary_group

from luequiv import kernels
from luequiv.phase import build_coset_tensor


def _dims(text):
    m, n = text.split("x")
    return int(m), int(n)


def _instance(M, N, rng):
    K = M * N
    X = unitary_group.rvs(K, random_state=rng)
    W = np.kron(unitary_group.rvs(M, random_state=rng), unitary_group.rvs(N, random_state=rng))
    ct = build_coset_tensor(X, W.conj().T @ X, M, N)
    th0 = np.concatenate([[0.0], rng.uniform(0, 2 * np.pi, K - 1)])
    return ct.terms, th0


def bench(dims, repeat, number):
    rng = np.random.default_rng(0)
    names = kernels.available_backends()
    print(f"{'dims':>6} {'kernel':>10} " + " ".join(f"{n:>12}" for n in names) + "   speedup")
    for M, N in dims:
        terms, th0 = _instance(M, N, rng)
        for label, call in (("obj+grad", lambda b: b.objective_gradient(terms, th0)),
                            ("descend", lambda b: b.descend(terms, th0))):
            n = number if label == "obj+grad" else max(1, number // 100)
            times = {}
            for name in names:
                b = kernels.get_backend(name)
                times[name] = min(timeit.repeat(lambda: call(b), number=n, repeat=repeat)) / n
            row = " ".join(f"{times[k] * 1e6:10.1f}us" for k in names)
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{M}x{N:<4} {label:>10} {row}   {speed:6.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=_dims, nargs="+", default=[(2, 2), (2, 3), (3, 3), (2, 4), (4, 4)])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=2000)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    bench(args.dims, args.repeat, args.number)


if __name__ == "__main__":
    main()
