"""Dynamic time warping as a classifier: distances, bands, and 1-NN.

DTW aligns two series along a monotone warping path and sums squared
pointwise differences; the Sakoe-Chiba band caps how far the path may
stray from the diagonal, trading alignment freedom for speed.
"""

import time

import numpy as np

from tsembed import baselines, dataio


def main():
    ds = dataio.make_synthetic(3, 16, 30, 0.15, 6)
    train = [dataio.znormalize(s) for s in ds.train]
    test = [dataio.znormalize(s) for s in ds.test]
    print(f"{len(train)} train / {len(test)} test, length {ds.series_length}")

    a, b = train[0], train[1 + len(train) // 3]
    euclid = float(((a.values - b.values) ** 2).sum())
    print(f"\ntwo series, labels {a.label} and {b.label}:")
    print(f"  squared euclidean {euclid:8.2f}")
    print(f"  dtw, no band      {baselines.dtw_distance(a, b):8.2f}")
    for w in (1, 3, 10):
        banded = baselines.dtw_distance(a, b, baselines.DtwConfig(window=w))
        print(f"  dtw, band {w:2d}      {banded:8.2f}")

    start = time.perf_counter()
    predictions, error = baselines.dtw_1nn_classify(train, test, workers=1)
    elapsed = time.perf_counter() - start
    print(f"\n1-NN error {error:.3f} ({elapsed:.1f}s serial)")

    matrix = baselines.dtw_distance_matrix(test, train, workers=1)
    nearest = matrix.argmin(axis=1)
    print("\nfirst five test series and their nearest training neighbors:")
    for i in range(5):
        j = int(nearest[i])
        mark = "" if test[i].label == train[j].label else "   <- miss"
        print(
            f"  test {i} (class {test[i].label}) -> train {j} "
            f"(class {train[j].label}), distance {matrix[i, j]:.2f}{mark}"
        )


if __name__ == "__main__":
    main()
