"""Time the compiled closure kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--horizons 12 14 16] [--repeat 5]

Diagrams come from the cantor-interval example (``2**H - 1`` vertices).
Each kernel is run on the same inputs with both backends, results are
compared, and the best of ``--repeat`` wall times is reported.
"""

import argparse
import random
import time

from afglimm import _kernels_py
from afglimm.construct import construct
from afglimm.generators import parse_example

try:
    from afglimm import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(d, rng):
    n = d.size
    seed = bytearray(n)
    for v in rng.sample(range(n), 3):
        seed[v] = 1
    # exclude one complete path, as largest_ideal_avoiding_path does
    excluded = bytearray(n)
    v = rng.randrange(d.final_start, n)
    excluded[v] = 1
    while d.parent_ids(v):
        v = d.parent_ids(v)[0]
        excluded[v] = 1
    members = bytearray(1 if rng.random() < 0.5 else 0 for _ in range(n))
    cp, ci, pp, pi = d.child_ptr, d.child_idx, d.parent_ptr, d.parent_idx
    fs = d.final_start
    # a genuine ideal, so the axiom check has to scan every vertex
    ideal = _kernels_py.greatest_fixpoint(cp, ci, pp, pi, excluded)
    return {
        "reach (descendants)": lambda k: k.reach(cp, ci, seed),
        "reach (ancestors)": lambda k: k.reach(pp, pi, seed),
        "greatest_fixpoint": lambda k: k.greatest_fixpoint(cp, ci, pp, pi, excluded),
        "saturate": lambda k: k.saturate(cp, ci, members, fs),
        "ideal_violation": lambda k: k.ideal_violation(cp, ci, ideal, fs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizons", type=int, nargs="+", default=[12, 14, 16])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        raise SystemExit("compiled kernels are not built; run pip install -e . --no-build-isolation")
    rng = random.Random(0)
    print(f"{'H':>3} {'vertices':>9}  {'kernel':<20} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for H in args.horizons:
        d = construct(parse_example("cantor-interval").presentation(H)).diagram
        for name, run in cases(d, rng).items():
            tp, rp = best_of(lambda: run(_kernels_py), args.repeat)
            tc, rc = best_of(lambda: run(_compiled), args.repeat)
            if rp != rc:
                raise SystemExit(f"backends disagree on {name} at H={H}")
            print(f"{H:>3} {d.size:>9}  {name:<20} {tp * 1e3:>10.2f} {tc * 1e3:>10.3f} {tp / tc:>7.0f}x")


if __name__ == "__main__":
    main()
