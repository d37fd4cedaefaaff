"""Benchmark the numba and pure-numpy flavors of the two hot kernels.

Run: python benchmarks/bench_kernels.py
"""
import math
import time

import numpy as np

from quasiweb import (
    Params,
    build_cell_hamiltonian,
    cell_boundaries,
    ground_states,
    solve_cell,
)
from quasiweb._kernels import (
    USE_NUMBA,
    _husimi_grid_loops,
    _husimi_grid_numpy,
    _strobo_orbits_loops,
    _strobo_orbits_numpy,
    husimi_grid,
    strobo_orbits,
)


def _timeit(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_husimi():
    params = Params(4, 0.002, 0.12, 600)
    cell = cell_boundaries(params, 0, 140)[0]
    upper, _ = ground_states(solve_cell(build_cell_hamiltonian(params, cell)))
    levels = cell.levels(params.mu)
    weights = upper.coeffs.astype(complex)
    r = np.linspace(0.0, 12.0, 400)
    phi = np.arange(480) * (2 * math.pi / 480)

    impls = [("numpy", _husimi_grid_numpy)]
    if USE_NUMBA:
        import numba
        jitted = numba.njit(cache=True)(_husimi_grid_loops)
        husimi_grid(levels, weights, params.hbar0, r[:4], phi[:4],
                    impl=jitted)  # warm the JIT
        impls.append(("numba", jitted))

    print(f"husimi_grid: {levels.size} levels on a {r.size}x{phi.size} grid")
    results = {}
    for name, impl in impls:
        dt = _timeit(lambda: husimi_grid(levels, weights, params.hbar0,
                                         r, phi, impl=impl))
        results[name] = husimi_grid(levels, weights, params.hbar0, r, phi,
                                    impl=impl)
        print(f"  {name:6s} {dt * 1e3:9.2f} ms")
    if len(results) == 2:
        diff = np.max(np.abs(results["numba"] - results["numpy"]))
        print(f"  max |numba - numpy| = {diff:.3e}")


def bench_strobo():
    mu, eps = 4, 0.05
    rng_r = np.linspace(3.0, 11.0, 64)
    x0 = rng_r.copy()
    p0 = np.zeros_like(x0)
    n_periods, spp = 2000, 64

    impls = [("numpy", _strobo_orbits_numpy)]
    if USE_NUMBA:
        import numba
        jitted = numba.njit(cache=True)(_strobo_orbits_loops)
        strobo_orbits(x0[:2], p0[:2], mu, eps, 0.0, 2, 16, 1e3, impl=jitted)
        impls.append(("numba", jitted))

    print(f"strobo_orbits: {x0.size} orbits x {n_periods} periods "
          f"x {spp} steps")
    results = {}
    for name, impl in impls:
        dt = _timeit(lambda: strobo_orbits(x0, p0, mu, eps, 0.0, n_periods,
                                           spp, 1e3, impl=impl))
        results[name] = strobo_orbits(x0, p0, mu, eps, 0.0, n_periods,
                                      spp, 1e3, impl=impl)
        print(f"  {name:6s} {dt * 1e3:9.2f} ms")
    if len(results) == 2:
        diff = max(
            np.nanmax(np.abs(results["numba"][i] - results["numpy"][i]))
            for i in range(2)
        )
        print(f"  max |numba - numpy| = {diff:.3e}")


if __name__ == "__main__":
    if not USE_NUMBA:
        print("numba disabled (QUASIWEB_DISABLE_NUMBA=1): numpy flavor only")
    bench_husimi()
    bench_strobo()
