"""Grid-searched RBF SVM on a small multiclass problem.

The solver is pairwise coordinate ascent on the dual (one-vs-one across
classes); hyperparameters come from stratified cross-validation over a
log-spaced C x gamma grid, ties resolved toward the smaller values.
"""

import numpy as np

from tsembed import svm


def make_blobs(per_class=20, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array(
        [[0.0, 0.0, 0.0], [4.0, 1.0, -2.0], [-1.0, 4.5, 2.0]]
    )
    x = np.vstack(
        [rng.normal(size=(per_class, 3)) * 1.2 + c for c in centers]
    )
    y = np.repeat(np.arange(len(centers)), per_class)
    test_x = np.vstack(
        [rng.normal(size=(per_class, 3)) * 1.2 + c for c in centers]
    )
    return x, y, test_x, y.copy()


def main():
    x, y, test_x, test_y = make_blobs()
    result = svm.grid_search_cv(x, y, folds=5, seed=0)

    gammas = sorted({g for _, g in result.cv_error_table})
    cs = sorted({c for c, _ in result.cv_error_table})
    print("cross-validation error, rows C down / columns gamma across:")
    print("          " + " ".join(f"{g:7.3f}" for g in gammas))
    for c in cs:
        cells = " ".join(f"{result.cv_error_table[(c, g)]:7.3f}" for g in gammas)
        print(f"  {c:7.2f} {cells}")

    print(f"\nbest cell: C={result.best_c:g} gamma={result.best_gamma:g}")
    model = svm.ovo_train(x, y, result.best_c, result.best_gamma)
    print(f"pairwise machines: {model.pairs}")
    for pair, binary in zip(model.pairs, model.models):
        print(f"  {pair}: {binary.support_vectors.shape[0]} support vectors")
    print(f"held-out error: {svm.evaluate(model, test_x, test_y):.3f}")


if __name__ == "__main__":
    main()
