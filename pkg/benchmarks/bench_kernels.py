"""Time the compiled and pure-Python alignment kernels on the same batch.

    python benchmarks/bench_kernels.py [--pairs 2000] [--repeat 3]

Both backends run the E-step and Viterbi over identical packed arrays from
one trained model; the script checks they agree before reporting timings.
"""
import argparse
import importlib
import random
import time

import numpy as np

from mtgender.aligner import AlignmentConfig, train_alignment


def synthetic_bitext(n_pairs, seed=0, vocab=400):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n_pairs):
        k = rng.randint(6, 18)
        source = [f"s{rng.randrange(vocab)}" for _ in range(k)]
        target = [f"t{w[1:]}" if rng.random() < 0.85 else f"t{rng.randrange(vocab)}" for w in source]
        for _ in range(2):
            a = rng.randrange(k - 1)
            target[a], target[a + 1] = target[a + 1], target[a]
        pairs.append((source, target))
    return pairs


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    pairs = synthetic_bitext(args.pairs)
    model = train_alignment(pairs, AlignmentConfig(iterations=2))
    src_len, tgt_len, offsets, idx = model._batch(pairs)
    probs = np.asarray(model.probs)
    print(f"{args.pairs} pairs, {int(tgt_len.sum())} target tokens, {idx.size} prior cells, "
          f"{probs.size} parameters")

    backends = {"python": importlib.import_module("mtgender.aligner._kernels_py")}
    try:
        backends["cython"] = importlib.import_module("mtgender.aligner._kernels")
    except ImportError:
        print("compiled kernels not built; timing the Python fallback only")

    results = {}
    for name, k in backends.items():
        t_e, e_out = best_of(lambda: k.e_step(src_len, tgt_len, offsets, idx, probs, model.tension,
                                              model.p0, probs.size), args.repeat)
        t_v, v_out = best_of(lambda: k.viterbi(src_len, tgt_len, offsets, idx, probs, model.tension,
                                               model.p0), args.repeat)
        results[name] = (t_e, t_v, e_out, v_out)
        print(f"{name:>7}  e_step {t_e * 1e3:9.2f} ms   viterbi {t_v * 1e3:9.2f} ms")

    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        assert np.allclose(py[2][0], cy[2][0], rtol=1e-12, atol=1e-15)
        assert abs(py[2][1] - cy[2][1]) <= 1e-9 * abs(py[2][1])
        assert np.array_equal(py[3], cy[3])
        print(f"speedup  e_step {py[0] / cy[0]:8.1f}x   viterbi {py[1] / cy[1]:8.1f}x   (outputs agree)")


if __name__ == "__main__":
    main()
