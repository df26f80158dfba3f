"""Benchmark: compiled Cython graph kernels versus the pure-Python twin.

Run:  python benchmarks/bench_kernels.py [n_vertices] [avg_degree]

The kernels (attractor, reachability, SCC) are the inner loops of parity
solving, negotiation iteration, and the stochastic sweeps; everything else
in the package is exact-rational arithmetic that gains nothing from
compilation.
"""

import random
import sys
import time

from equilibra._kernels import pure, csr, csr_pred

try:
    from equilibra._kernels import _speedups as compiled
except ImportError:
    compiled = None


def make_graph(rng, n, deg):
    edges = sorted({(rng.randrange(n), rng.randrange(n))
                    for _ in range(n * deg)})
    coalition = [rng.randint(0, 1) for _ in range(n)]
    target = [1 if rng.random() < 0.05 else 0 for _ in range(n)]
    return edges, coalition, target


def bench(impl, n, off, dst, poff, psrc, coalition, target, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        impl.attractor(n, off, dst, poff, psrc, coalition, target)
    t_attr = (time.perf_counter() - t0) / reps
    t0 = time.perf_counter()
    for _ in range(reps):
        impl.reachable(n, off, dst, target)
    t_reach = (time.perf_counter() - t0) / reps
    t0 = time.perf_counter()
    for _ in range(reps):
        impl.scc(n, off, dst)
    t_scc = (time.perf_counter() - t0) / reps
    return t_attr, t_reach, t_scc


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    deg = int(sys.argv[2]) if len(sys.argv) > 2 else 6
    reps = 5
    rng = random.Random(0)
    edges, coalition, target = make_graph(rng, n, deg)
    off, dst = csr(n, edges)
    poff, psrc = csr_pred(n, edges)
    print(f"graph: {n} vertices, {len(edges)} edges, {reps} reps")
    rows = [("pure", bench(pure, n, off, dst, poff, psrc,
                           coalition, target, reps))]
    if compiled is not None:
        rows.append(("compiled", bench(compiled, n, off, dst, poff, psrc,
                                       coalition, target, reps)))
        # twins must agree
        assert (pure.attractor(n, off, dst, poff, psrc, coalition, target)
                == compiled.attractor(n, off, dst, poff, psrc, coalition,
                                      target))
        assert pure.scc(n, off, dst) == compiled.scc(n, off, dst)
    else:
        print("compiled core unavailable; showing pure only")
    print(f"{'impl':>10} {'attractor':>12} {'reachable':>12} {'scc':>12}")
    for name, (ta, tr, ts) in rows:
        print(f"{name:>10} {ta * 1e3:>10.2f}ms {tr * 1e3:>10.2f}ms "
              f"{ts * 1e3:>10.2f}ms")
    if compiled is not None:
        base = rows[0][1]
        fast = rows[1][1]
        speed = [b / f for b, f in zip(base, fast)]
        print(f"{'speedup':>10} {speed[0]:>11.1f}x {speed[1]:>11.1f}x "
              f"{speed[2]:>11.1f}x")


if __name__ == "__main__":
    main()
