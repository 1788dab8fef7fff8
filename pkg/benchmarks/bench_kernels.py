"""Compare the native and pure kernel backends on the two hot paths.

Usage: python benchmarks/bench_kernels.py [--trees N] [--rows N]

Prints wall times for forest training, forest prediction, and the roster DP,
plus a cross-backend agreement check on the shared workload.
"""

import argparse
import importlib
import sys
import time

import numpy as np

sys.path.insert(0, "src")
sys.path.insert(0, "tests")


def load_backends():
    backends = {}
    for name in ("pure", "_native"):
        try:
            backends[name.lstrip("_")] = importlib.import_module(
                f"fantasyxi.kernels.{name}")
        except ImportError:
            pass
    return backends


def bench(fn, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--rows", type=int, default=5000)
    args = parser.parse_args()

    from fantasyxi.learner import fit_codebook, encode_batting
    from fantasyxi.rng import Rng, stream_seed
    from fantasyxi.synth import synth_batting_rows

    rows = synth_batting_rows(args.rows, seed=1001)
    codebook = fit_codebook({
        "player": [r.batsman for r in rows],
        "MF": [r.format for r in rows],
        "team1": [r.team1 for r in rows],
        "team2": [r.team2 for r in rows],
        "venue": [r.venue for r in rows],
    })
    matrix = encode_batting(rows, codebook)
    X = np.ascontiguousarray(matrix.X)
    y = np.ascontiguousarray(matrix.y)

    rng = Rng(5)
    wt2 = np.array([14 + rng.randbelow(9) for _ in range(22)], dtype=np.int64)
    points = np.array([rng.randbelow(601) * 0.25 for _ in range(22)])
    team = np.array([0] * 11 + [1] * 11, dtype=np.int8)

    backends = load_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"workload: {args.rows} rows x 13 cols, {args.trees} trees, "
          f"22-card roster DP\n")

    outputs = {}
    for name, impl in backends.items():
        def train():
            return [impl.fit_tree(X, y, stream_seed(42, 0x7EE5 + t), 4, 2,
                                  False, False)
                    for t in range(args.trees)]
        t_train, trees = bench(train, repeat=1)

        def predict():
            acc = np.zeros(len(X))
            for tree in trees:
                acc += impl.predict_tree(*tree, X)
            return acc / len(trees)
        t_pred, preds = bench(predict)

        def dp():
            return impl.knapsack_layers(wt2, points, team, 200, 11, 7, 7)
        t_dp, layers = bench(dp)

        outputs[name] = (trees, preds, layers)
        print(f"{name:>7}: fit {t_train:8.3f}s   predict {t_pred:7.4f}s   "
              f"dp {t_dp:7.4f}s")

    if len(outputs) == 2:
        (t_a, p_a, g_a), (t_b, p_b, g_b) = outputs.values()
        trees_equal = all(
            all(np.array_equal(x, z) for x, z in zip(ta, tb))
            for ta, tb in zip(t_a, t_b))
        print(f"\ncross-backend agreement: trees={trees_equal} "
              f"predictions={np.array_equal(p_a, p_b)} "
              f"dp={np.array_equal(g_a, g_b)}")


if __name__ == "__main__":
    main()
