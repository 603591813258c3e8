"""Compare the compiled core with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--optimize]

Times each kernel on the (2, 2, 3, 2) shapes the optimizer uses, plus one
full objective evaluation. ``--optimize`` also times a short ``maximize`` run
per backend in a subprocess (the backend is chosen at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from seqmns import _backend, matcore
from seqmns.constructions import build_scenario
from seqmns.optimize import KERNEL_RATIO

TOL, SWEEPS, SNAP = matcore.OFF_DIAGONAL_TOL, matcore.MAX_SWEEPS, matcore.ROUNDOFF_SNAP


def cases(impl):
    rng = np.random.default_rng(0)
    h2 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h2 = h2 + h2.conj().T
    h8 = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h8 = h8 + h8.conj().T
    raw_a = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    raw_b = rng.normal(size=(2, 2, 2)) + 1j * rng.normal(size=(2, 2, 2))
    s = build_scenario("trine")
    rho, alice, bob = s.state.matrix, s.alice_povm.stacked, s.bob_povm.stacked
    sq, sigma = s.alice_povm.sqrt_elements, s.bob_conditioned
    rr = np.broadcast_to(alice, (3,) + alice.shape)

    def objective():
        a, _ = impl.povm_from_raw(raw_a, KERNEL_RATIO, TOL, SWEEPS)
        b, _ = impl.povm_from_raw(raw_b, KERNEL_RATIO, TOL, SWEEPS)
        return impl.raw_witness(rho, a, b, SNAP, TOL, SWEEPS)

    return {
        "jacobi 2x2": lambda: impl.jacobi_eigh(h2, TOL, SWEEPS),
        "jacobi 8x8": lambda: impl.jacobi_eigh(h8, TOL, SWEEPS),
        "joint_table": lambda: impl.joint_table(sq, rr, sigma),
        "povm_from_raw": lambda: impl.povm_from_raw(raw_a, KERNEL_RATIO, TOL, SWEEPS),
        "raw_witness": lambda: impl.raw_witness(rho, alice, bob, SNAP, TOL, SWEEPS),
        "objective": objective,
    }


def time_us(fn, repeat):
    number = max(1, repeat)
    return min(timeit.repeat(fn, number=number, repeat=5)) / number * 1e6


OPT_SNIPPET = (
    "import time; from seqmns.optimize import OptConfig, maximize; t=time.perf_counter(); "
    "r=maximize(OptConfig(restarts=3, max_iters=2000, seed=7)); "
    "print(f'{time.perf_counter()-t:.2f} {r.best_value:.10f}')"
)


def time_optimize(pure):
    env = dict(os.environ)
    env.pop("SEQMNS_PURE_PYTHON", None)
    if pure:
        env["SEQMNS_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", OPT_SNIPPET], env=env, capture_output=True, text=True, check=True)
    secs, best = out.stdout.split()
    return float(secs), best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--optimize", action="store_true")
    args = ap.parse_args()

    impls = _backend.implementations()
    if "cython" not in impls:
        print("compiled core not built; timing the fallback only")
    names = sorted(impls, reverse=True)
    results = {n: {k: time_us(f, args.repeat) for k, f in cases(impls[n]).items()} for n in names}

    header = f"{'kernel':<15}" + "".join(f"{n + ' (us)':>16}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for kernel in results[names[0]]:
        row = f"{kernel:<15}" + "".join(f"{results[n][kernel]:16.2f}" for n in names)
        if len(names) == 2:
            row += f"{results['python'][kernel] / results['cython'][kernel]:9.1f}x"
        print(row)

    if args.optimize:
        for n in names:
            secs, best = time_optimize(pure=(n == "python"))
            print(f"maximize 3 restarts, {n}: {secs:.2f} s (best {best})")


if __name__ == "__main__":
    main()
