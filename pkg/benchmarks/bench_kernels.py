"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs under both backends; the table lists
the best wall time, the speedup and the max absolute output difference.
"""
import argparse
import timeit

import numpy as np

from comparison_lab._kernels import available_backends, get_backend
from comparison_lab.spaces import k_pod_graph


def _inputs(rng):
    g = k_pod_graph(6, 1.0, 1e-3)
    n = 200_000
    a = rng.uniform(0.01, 1.2, n)
    b = rng.uniform(0.01, 1.2, n)
    c = np.abs(a - b) + rng.uniform(0.0, 1.0, n) * (a + b - np.abs(a - b))
    x = rng.uniform(0.0, 2.0, n)
    t = np.linspace(0.0, 1.0, 4097)
    f = np.sin(3 * t)
    centers = t[512:-512:4]
    taus = 0.125 * 2.0 ** -np.arange(7)
    return {
        "dijkstra": lambda m: m.dijkstra(g.indptr, g.indices, g.weights, 0),
        "versine_batch": lambda m: m.versine_batch(1.0, a, b, c),
        "side_from_versine_batch": lambda m: m.side_from_versine_batch(-1.0, a, b, x),
        "second_differences": lambda m: m.second_differences(t, f, centers, taus),
        "one_sided_quotients": lambda m: np.stack(m.one_sided_quotients(t, f, centers, taus)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the python backend is available")
    cases = _inputs(np.random.default_rng(0))
    print(f"{'kernel':<26}" + "".join(f"{b + ' [ms]':>16}" for b in backends) + f"{'speedup':>10}{'max diff':>12}")
    for name, call in cases.items():
        times, outs = [], []
        for b in backends:
            mod = get_backend(b)
            outs.append(np.asarray(call(mod)))
            times.append(min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat)) * 1e3)
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        diff = float(np.nanmax(np.abs(outs[0] - outs[-1]))) if len(outs) > 1 else 0.0
        print(f"{name:<26}" + "".join(f"{v:>16.2f}" for v in times) + f"{speed:>10.1f}x{diff:>12.2e}")


if __name__ == "__main__":
    main()
