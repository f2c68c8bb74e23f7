"""Compare the numba and numpy statevector kernels.

    python benchmarks/bench_kernels.py [--qubits 12 16 20] [--gates 200] [--repeat 3]

Each row times the same random gate sequence on both backends (after JIT
warm-up) and checks that the final states agree.
"""
import argparse
import time

import numpy as np

from distq import _kernels


def random_program(rng, n, n_gates):
    prog = []
    for _ in range(n_gates):
        q = int(rng.integers(n))
        if rng.random() < 0.5:
            m = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
            prog.append(("apply_1q", (q, m[0, 0], m[0, 1], m[1, 0], m[1, 1])))
        else:
            t = int((q + 1 + rng.integers(n - 1)) % n)
            prog.append(("apply_cx" if rng.random() < 0.8 else "apply_swap", (q, t)))
    return prog


def run(impl, state, prog):
    for name, args in prog:
        getattr(impl, name)(state, *args)
    return state


def best_of(impl, start, prog, repeat):
    best = float("inf")
    for _ in range(repeat):
        s = start.copy()
        t0 = time.perf_counter()
        run(impl, s, prog)
        best = min(best, time.perf_counter() - t0)
    return best, s


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[10, 14, 18, 20])
    ap.add_argument("--gates", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels.numba_kernels is None:
        raise SystemExit("numba is not importable; nothing to compare")
    _kernels.warmup(_kernels.numba_kernels)

    rng = np.random.default_rng(args.seed)
    print(f"{'qubits':>6} {'gates':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}  agree")
    for n in args.qubits:
        prog = random_program(rng, n, args.gates)
        v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        start = v / np.linalg.norm(v)
        t_np, s_np = best_of(_kernels.numpy_kernels, start, prog, args.repeat)
        t_nb, s_nb = best_of(_kernels.numba_kernels, start, prog, args.repeat)
        agree = np.allclose(s_np, s_nb, atol=1e-10)
        print(f"{n:>6} {args.gates:>6} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {t_np / t_nb:>8.2f}  {agree}")


if __name__ == "__main__":
    main()
