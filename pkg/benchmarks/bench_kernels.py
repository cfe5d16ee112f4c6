"""Compare the compiled and NumPy kernels on the PSU(3, q) pipeline.

    python3 benchmarks/bench_kernels.py [--q 3 4] [--repeat 3]

For each backend and q this times group enumeration, the conjugacy-class
search and the structure-constant sweeps, and checks that both backends
produce the same tensor.
"""

from __future__ import annotations

import argparse
import time

from psucentre.classalg import structure_constants
from psucentre.gfq import make_field_ctx
from psucentre.kernels import BACKENDS
from psucentre.unitary import build_psu, conjugacy_classes
from psucentre.zkncf import prime_power


def bench(q: int, backend: str, repeat: int, threads: int) -> tuple[dict, str]:
    p, r = prime_power(q)
    F = make_field_ctx(p, r)
    best = {}
    checksum = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        G = build_psu(F, backend=backend)
        t1 = time.perf_counter()
        cd = conjugacy_classes(G)
        t2 = time.perf_counter()
        st = structure_constants(G, cd, threads=threads)
        t3 = time.perf_counter()
        for name, dt in (("enumerate", t1 - t0), ("classes", t2 - t1), ("sweeps", t3 - t2)):
            best[name] = min(best.get(name, dt), dt)
        checksum = st.checksum()
    return best, checksum


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    print(f"{'q':>3} {'backend':>8} {'enumerate':>10} {'classes':>10} {'sweeps':>10}  checksum")
    for q in args.q:
        sums = {}
        for backend in sorted(BACKENDS):
            t, sums[backend] = bench(q, backend, args.repeat, args.threads)
            print(f"{q:>3} {backend:>8} {t['enumerate']:>9.3f}s {t['classes']:>9.3f}s {t['sweeps']:>9.3f}s"
                  f"  {sums[backend]}")
        if len(set(sums.values())) != 1:
            raise SystemExit(f"backends disagree at q={q}: {sums}")
    if "cython" not in BACKENDS:
        print("compiled extension not built; only the NumPy backend was timed")


if __name__ == "__main__":
    main()
