"""Compare compiled and NumPy kernels on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Prints the best wall time of each implementation and the speed-up.
"""

import argparse
import timeit

import numpy as np

from ccmkdv._kernels import available


def skew_stack(rng, m, n):
    a = rng.normal(size=(m, n, n)) + 1j * rng.normal(size=(m, n, n))
    return a - np.swapaxes(a, 1, 2)


def workloads(quick):
    rng = np.random.default_rng(0)
    scale = 10 if quick else 1
    out = []
    for n in (4, 8, 12):
        a = skew_stack(rng, 4000 // scale, n)
        out.append((f"pfaffian batch {a.shape[0]} x order {n}", lambda k, a=a: k.pfaffian_ltl_batch(a)))
    for nterms, npts in ((16, 200_000), (32, 50_000)):
        npts //= scale
        c = rng.normal(size=nterms) + 1j * rng.normal(size=nterms)
        kx = rng.normal(size=nterms) + 1j * rng.normal(size=nterms)
        kt = rng.normal(size=nterms) + 1j * rng.normal(size=nterms)
        x, t = rng.uniform(-10, 10, npts), rng.uniform(-2, 2, npts)
        shift = np.zeros(npts)
        out.append((f"expsum values {nterms} terms x {npts} pts",
                    lambda k, a=(c, kx, kt, x, t, shift): k.expsum_jet(*a, 0, 0)))
        out.append((f"expsum jet    {nterms} terms x {npts} pts",
                    lambda k, a=(c, kx, kt, x, t, shift): k.expsum_jet(*a, 3, 1)))
        out.append((f"max exponent  {nterms} terms x {npts} pts",
                    lambda k, a=(kx, kt, x, t): k.expsum_max_exponent(*a)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="ten times smaller inputs")
    args = ap.parse_args()
    impls = available()
    names = sorted(impls, reverse=True)
    print(f"{'workload':<42}" + "".join(f"{n:>12}" for n in names) + ("   speed-up" if len(names) > 1 else ""))
    for label, fn in workloads(args.quick):
        best = {}
        for name in names:
            fn(impls[name])  # warm-up
            best[name] = min(timeit.repeat(lambda: fn(impls[name]), number=1, repeat=args.repeat))
        row = f"{label:<42}" + "".join(f"{best[n] * 1e3:>10.2f}ms" for n in names)
        if "cython" in best:
            row += f"   {best['python'] / best['cython']:>7.1f}x"
        print(row)
    if "cython" not in impls:
        print("compiled kernels not built; only the NumPy fallback was timed")


if __name__ == "__main__":
    main()
