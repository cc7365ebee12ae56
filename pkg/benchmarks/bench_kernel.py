"""Compare the compiled kernel against the pure-Python fallback.

Times tip solves (plain and with the variation system) and backward flows on a
few drivers, and reports the largest disagreement between the two backends.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--tol 1e-10]
"""
import argparse
import time

import numpy as np

from loewnerlab import loewner_ode
from loewnerlab._kernel import BACKEND
from loewnerlab.specs import parse_driver

DRIVERS = ["linear:1", "sine:1", "sqrtcircle:1.5,8@0.1", "example1"]


def _time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(tol):
    for spec in DRIVERS:
        d = parse_driver(spec)
        s = min(0.3, 0.9 * d.horizon)
        yield spec, "tip", lambda b, d=d, s=s: loewner_ode.tip_limit(d, s, tol, backend=b)
        yield spec, "variation", lambda b, d=d, s=s: complex(
            loewner_ode.solve_tip_with_variation(d, s, tol / 2, tol, check=False,
                                                 backend=b).tip_variation)
        yield spec, "flow", lambda b, d=d, s=s: loewner_ode.flow(
            d, 0.3 + 1.0j, s, "backward", tol, backend=b).value


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--tol", type=float, default=1e-10)
    args = ap.parse_args(argv)
    if BACKEND != "cython":
        raise SystemExit("compiled kernel not built; run pip install -e . first")
    print(f"{'driver':<22}{'case':<11}{'cython [ms]':>12}{'python [ms]':>13}{'speedup':>9}"
          f"{'max diff':>11}")
    for spec, name, fn in cases(args.tol):
        tc, vc = _time(lambda: fn("cython"), args.repeat)
        tp, vp = _time(lambda: fn("python"), args.repeat)
        diff = abs(complex(vc) - complex(vp))
        print(f"{spec:<22}{name:<11}{1e3 * tc:12.2f}{1e3 * tp:13.2f}{tp / tc:9.1f}"
              f"{diff:11.1e}")


if __name__ == "__main__":
    main()
