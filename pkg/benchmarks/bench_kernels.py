"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--rows 20000] [--repeat 3]

Covers one root split search, one full tree, and a Pegasos run, on an
NSL-KDD-shaped synthetic design matrix. Also checks the two backends agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from idsbench import kernels
from idsbench.classifiers import default_spec
from idsbench.classifiers.svm import LinearSvmModel
from idsbench.classifiers.tree import fit_tree, presort
from idsbench.preprocess import apply_schema, fit_schema
from idsbench.synthetic import make_document


def best_of(fn, repeat):
    times = []
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    try:
        backends = {"cython": kernels.get_backend("cython"), "python": kernels.get_backend("python")}
    except ImportError:
        print("compiled kernels are not built; nothing to compare")
        return 1

    doc = make_document(args.rows, seed=args.seed)
    data = apply_schema(fit_schema(doc), doc)
    x, y = data.values, data.labels.astype(np.float64)
    xt = np.ascontiguousarray(x.T)
    order = presort(xt)
    w = np.ones(len(y))
    feats = np.arange(x.shape[1], dtype=np.int64)
    svm_params = default_spec("svm").hyperparameters
    print(f"{data.n_rows} rows x {data.width} columns, best of {args.repeat}\n")

    cases = {
        "root split (gini)": lambda k: k.best_split(xt, order, 0, len(y), feats, y, w, kernels.GINI),
        "full tree (gini)": lambda k: fit_tree(x, y, kernels=k),
        "depth-4 tree (sse)": lambda k: fit_tree(x, y - y.mean(), criterion="sse", max_depth=4, kernels=k),
        "pegasos, 10 epochs": lambda k: LinearSvmModel.fit(data, svm_params, 42, backend=k),
    }
    print(f"{'kernel':<22}{'cython s':>10}{'python s':>10}{'speedup':>9}  agree")
    for name, run in cases.items():
        tc, rc = best_of(lambda: run(backends["cython"]), args.repeat)
        tp, rp = best_of(lambda: run(backends["python"]), args.repeat)
        if isinstance(rc, LinearSvmModel):
            agree = np.allclose(rc.weights, rp.weights, rtol=1e-9, atol=1e-12)
        elif isinstance(rc, tuple):
            agree = rc[:2] == rp[:2]
        else:
            agree = all(np.array_equal(getattr(rc, f), getattr(rp, f)) for f in ("feature", "threshold", "value"))
        print(f"{name:<22}{tc:>10.4f}{tp:>10.4f}{tp / tc:>8.1f}x  {'yes' if agree else 'NO'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
