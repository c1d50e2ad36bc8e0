"""Compare the compiled quaternion kernel against the pure-Python twin.

Times the primitive operations and a chart-shaped workload (holonomy
products with exp/log round trips), and reports the agreement between
the two backends, which should be bit-exact.

    python3 benchmarks/bench_kernel.py [--number 200000]
"""

import argparse
import math
import time

from cobord2._kernel import compiled_backend, pure_backend
from cobord2 import su2


def _inputs(n):
    qs = [su2.sample_haar(su2.mix_seed(77, k)) for k in range(64)]
    vs = [su2.sample_ball(math.pi - 1e-3, su2.mix_seed(78, k)) for k in range(64)]
    return qs, vs


def bench_primitive(backend, name, n, qs, vs):
    f = getattr(backend, name)
    if name in ("qmul", "qcomm"):
        args = [(qs[i % 64], qs[(i * 7 + 1) % 64]) for i in range(256)]
    elif name == "qrot":
        args = [(qs[i % 64], vs[i % 64]) for i in range(256)]
    elif name == "qexp":
        args = [(vs[i % 64],) for i in range(256)]
    elif name == "qlog":
        args = [(q,) for q in qs if q[0] > -0.99][:256]
    else:
        args = [(qs[: (i % 32) + 2],) for i in range(256)]
    t0 = time.perf_counter()
    for i in range(n):
        f(*args[i % len(args)])
    return time.perf_counter() - t0


def bench_workload(backend, n, qs, vs):
    qmul, qexp, qlog, qconj = backend.qmul, backend.qexp, backend.qlog, backend.qconj
    t0 = time.perf_counter()
    acc = (1.0, 0.0, 0.0, 0.0)
    for i in range(n):
        g = qs[i % 64]
        c = qmul(qmul(g, qexp(vs[i % 64])), qconj(g))
        acc = qmul(acc, c)
        if acc[0] <= -1.0 + 1e-9:
            acc = (1.0, 0.0, 0.0, 0.0)
        qlog(acc)
    return time.perf_counter() - t0


def check_agreement(qs, vs):
    if compiled_backend is None:
        return None
    worst = 0.0
    for i in range(64):
        pairs = [
            ("qmul", (qs[i], qs[(i + 1) % 64])),
            ("qexp", (vs[i],)),
            ("qrot", (qs[i], vs[i])),
            ("qcomm", (qs[i], qs[(i + 3) % 64])),
            ("qprod", (qs[i:] + qs[:i],)),
        ]
        if qs[i][0] > -0.99:
            pairs.append(("qlog", (qs[i],)))
        for name, args in pairs:
            a = getattr(compiled_backend, name)(*args)
            b = getattr(pure_backend, name)(*args)
            worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    return worst


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--number", type=int, default=200_000)
    args = parser.parse_args()
    n = args.number
    qs, vs = _inputs(n)

    if compiled_backend is None:
        print("compiled kernel not built; timing the pure backend only")
        backends = [("pure", pure_backend)]
    else:
        backends = [("compiled", compiled_backend), ("pure", pure_backend)]

    print("%-10s %12s %12s %8s" % ("op", *(b[0] for b in backends), "speedup")
          if len(backends) == 2 else "op timings")
    for op in ("qmul", "qexp", "qlog", "qrot", "qcomm", "qprod"):
        times = [bench_primitive(b, op, n, qs, vs) for _, b in backends]
        if len(times) == 2:
            print("%-10s %10.3fs %10.3fs %7.1fx" % (op, times[0], times[1], times[1] / times[0]))
        else:
            print("%-10s %10.3fs" % (op, times[0]))

    times = [bench_workload(b, n // 2, qs, vs) for _, b in backends]
    if len(times) == 2:
        print("%-10s %10.3fs %10.3fs %7.1fx" % ("workload", times[0], times[1], times[1] / times[0]))
    else:
        print("%-10s %10.3fs" % ("workload", times[0]))

    worst = check_agreement(qs, vs)
    if worst is not None:
        print("backend agreement: max |delta| = %.3g %s"
              % (worst, "(bit-exact)" if worst == 0.0 else ""))


if __name__ == "__main__":
    main()
