"""Time the inference kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter because the backend is fixed at
import time by HMMARO_DISABLE_NUMBA.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _stochastic(rng, *shape):
    x = rng.random(shape)
    return x / x.sum(axis=-1, keepdims=True)


def _best_of(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def child(repeat):
    from hmmaro import kernels

    rng = np.random.default_rng(0)
    N, K, T = 4, 20, 400
    pi, A, B = _stochastic(rng, N), _stochastic(rng, N, N), _stochastic(rng, N, K)
    obs = rng.integers(0, K, T)
    E = np.ascontiguousarray(B[:, obs].T)
    log_args = (np.log(pi), np.log(A), np.log(E))
    seqs = [rng.integers(0, K, rng.integers(20, 41)) for _ in range(30)]
    symbols = np.concatenate(seqs).astype(np.int64)
    bounds = np.cumsum([0] + [len(s) for s in seqs]).astype(np.int64)

    def fwd_bwd():
        a, s, _ = kernels.forward_scaled(pi, A, E)
        b = kernels.backward_scaled(A, E, s)
        kernels.transition_counts(a, b, A, E, s)

    def objective_batch():
        # what one metaheuristic iteration costs on the desk-scale dataset
        for _ in range(100):
            kernels.batch_loglik_discrete(pi, A, B, symbols, bounds)

    result = {
        "backend": kernels.BACKEND,
        f"forward+backward+xi (T={T})": _best_of(fwd_bwd, repeat),
        f"viterbi (T={T})": _best_of(lambda: kernels.viterbi_log(*log_args), repeat),
        "100 x batch loglik (30 seqs)": _best_of(objective_batch, repeat),
    }
    print(json.dumps(result))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.child:
        child(args.repeat)
        return
    rows = []
    for disable in ("0", "1"):
        env = dict(os.environ, HMMARO_DISABLE_NUMBA=disable)
        out = subprocess.run(
            [sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        rows.append(json.loads(out.stdout))
    names = [k for k in rows[0] if k != "backend"]
    by = {r["backend"]: r for r in rows}
    print(f"{'kernel':34s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for k in names:
        nb = by.get("numba", {}).get(k, float("nan"))
        npy = by["numpy"][k]
        print(f"{k:34s} {nb * 1e3:10.3f} {npy * 1e3:10.3f} {npy / nb:8.1f}x")


if __name__ == "__main__":
    main()
