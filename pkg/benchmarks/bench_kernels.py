"""Timing comparison of the compiled and the pure-numpy kernel paths.

Each low-level batch kernel in matrixball._kernels ships as a numba-compiled
loop plus a vectorized numpy fallback (selected at import time through the
MATRIXBALL_DISABLE_NUMBA environment variable). This script times both twins
on identical workloads and reports the speedup, verifying along the way that
they agree to near machine precision.

Usage:
    python3 benchmarks/bench_kernels.py --batch 20000 --repeats 7
"""

import argparse
import time

import numpy as np

from matrixball import _kernels, group
from matrixball.structure import structure_data


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_workloads(r, b, batch, seed):
    sd = structure_data(r, b)
    rng = np.random.default_rng(seed)
    q = sd.q

    G = rng.normal(size=(batch, q, q)) + 1j * rng.normal(size=(batch, q, q))
    Qm, _ = np.linalg.qr(G)
    U = np.ascontiguousarray(np.swapaxes(Qm[:, :, :r], -1, -2).conj())
    Z = 0.6 * U * rng.uniform(0.2, 1.0, size=(batch, 1, 1))
    g = group.random_group_element(seed, 0.7, sd)
    Gg = np.stack([group.random_group_element(seed + i, 0.5, sd) for i in range(256)])
    V1 = np.ascontiguousarray(U[..., :, :r])
    x = rng.uniform(-1.0, 1.0, size=batch)

    m = min(256, batch)
    return {
        "logdet_ipzz": (
            lambda: _kernels._logdet_ipzz_nb(Z),
            lambda: _kernels._logdet_ipzz_np(Z),
        ),
        "cross_logabsdet": (
            lambda: _kernels._cross_logabsdet_nb(Z[:m], U[:m]),
            lambda: _kernels._cross_logabsdet_np(Z[:m], U[:m]),
        ),
        "mobius_batch": (
            lambda: _kernels._mobius_batch_nb(g, Z, r),
            lambda: _kernels._mobius_batch_np(g, Z, r),
        ),
        "h1_batch": (
            lambda: _kernels._h1_batch_nb(Gg, r),
            lambda: _kernels._h1_batch_np(Gg, r),
        ),
        "radial_logweight": (
            lambda: _kernels._radial_logweight_nb(V1, 1.5),
            lambda: _kernels._radial_logweight_np(V1, 1.5),
        ),
        "jacobi_batch": (
            lambda: _kernels._jacobi_batch_nb(6, float(b - 1), 2.0, x),
            lambda: _kernels._jacobi_batch_np(6, float(b - 1), 2.0, x),
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, default=1, help="rank (default 1)")
    ap.add_argument("--b", type=int, default=1, help="excess (default 1)")
    ap.add_argument("--batch", type=int, default=20000, help="batch size")
    ap.add_argument("--repeats", type=int, default=7, help="best-of repeats")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; only the numpy path is available")

    loads = make_workloads(args.r, args.b, args.batch, args.seed)
    print("backend at import: %s   (r, b) = (%d, %d), batch %d, best of %d"
          % (_kernels.backend(), args.r, args.b, args.batch, args.repeats))
    print("%-18s %12s %12s %9s %10s" % ("kernel", "numba [ms]", "numpy [ms]", "speedup", "max |diff|"))

    for name, (fn_nb, fn_np) in loads.items():
        ref = np.asarray(fn_np())
        if _kernels.HAVE_NUMBA:
            got = np.asarray(fn_nb())  # first call compiles
            diff = float(np.max(np.abs(got - ref)))
            t_nb = best_of(fn_nb, args.repeats)
        else:
            diff = 0.0
            t_nb = float("nan")
        t_np = best_of(fn_np, args.repeats)
        print("%-18s %12.3f %12.3f %9.2fx %10.2e"
              % (name, 1e3 * t_nb, 1e3 * t_np, t_np / t_nb, diff))


if __name__ == "__main__":
    main()
