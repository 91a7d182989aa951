"""Tests for the elastic-distance baseline: the dynamic program against a
path-enumeration oracle, band handling, batching, and 1-NN classification."""

import os

import numpy as np
import pytest

from tsembed import baselines
from tsembed.baselines import DtwConfig
from tsembed.dataio import TimeSeries


def brute_force_dtw(a, b, window=None):
    """Minimum folded path cost over every admissible warping path.

    Costs are accumulated as `cost + acc` along each path, which is the same
    association the dynamic program produces, so results match bit for bit.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ta, tb = a.size, b.size
    best = [np.inf]

    def walk(i, j, acc):
        if window is not None and abs(i - j) > window:
            return
        diff = a[i] - b[j]
        acc = diff * diff + acc
        if i == ta - 1 and j == tb - 1:
            best[0] = min(best[0], acc)
            return
        if i + 1 < ta and j + 1 < tb:
            walk(i + 1, j + 1, acc)
        if i + 1 < ta:
            walk(i + 1, j, acc)
        if j + 1 < tb:
            walk(i, j + 1, acc)

    walk(0, 0, 0.0)
    return float(best[0])


# ---------------------------------------------------------------- distance


def test_identical_series_have_zero_distance():
    values = np.random.default_rng(0).normal(size=12)
    assert baselines.dtw_distance(values, values) == 0.0


def test_pinned_small_example():
    # the single point of a must pair with both points of b: 1 + 1
    assert baselines.dtw_distance([0.0], [1.0, 1.0]) == 2.0


def test_distance_bounded_by_diagonal_cost():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rng.normal(size=7)
        b = rng.normal(size=7)
        assert baselines.dtw_distance(a, b) <= float(((a - b) ** 2).sum()) + 1e-12


def test_distance_is_symmetric():
    rng = np.random.default_rng(2)
    for _ in range(30):
        a = rng.normal(size=rng.integers(1, 9))
        b = rng.normal(size=rng.integers(1, 9))
        assert baselines.dtw_distance(a, b) == baselines.dtw_distance(b, a)


def test_dynamic_program_matches_path_enumeration():
    rng = np.random.default_rng(3)
    for trial in range(200):
        a = rng.normal(size=rng.integers(1, 7))
        b = rng.normal(size=rng.integers(1, 7))
        window = None
        if trial % 2 == 1:
            window = int(abs(a.size - b.size) + rng.integers(0, 4))
        cfg = DtwConfig(window=window)
        assert baselines.dtw_distance(a, b, cfg) == brute_force_dtw(a, b, window)


def test_narrower_band_never_shrinks_distance():
    rng = np.random.default_rng(4)
    a = rng.normal(size=8)
    b = rng.normal(size=8)
    distances = [baselines.dtw_distance(a, b, DtwConfig(window=w)) for w in range(9)]
    for tight, loose in zip(distances, distances[1:]):
        assert tight >= loose
    assert distances[-1] == baselines.dtw_distance(a, b)


def test_band_without_a_path_raises():
    with pytest.raises(ValueError, match="no warping path"):
        baselines.dtw_distance(np.zeros(3), np.zeros(6), DtwConfig(window=1))
    with pytest.raises(ValueError, match="no warping path"):
        baselines.dtw_distances(np.zeros(3), np.zeros((2, 6)), DtwConfig(window=2))


def test_window_must_be_non_negative():
    with pytest.raises(ValueError):
        DtwConfig(window=-1)


def test_input_validation():
    with pytest.raises(ValueError):
        baselines.dtw_distance(np.zeros(0), np.zeros(3))
    with pytest.raises(ValueError):
        baselines.dtw_distance(np.zeros((2, 2)), np.zeros(3))
    with pytest.raises(ValueError):
        baselines.dtw_distances(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        baselines.dtw_distances(np.zeros(3), np.zeros((2, 0)))


# ---------------------------------------------------------------- batching


def test_batched_distances_match_reference_bitwise():
    rng = np.random.default_rng(5)
    for ta, tb, window in [(7, 5, None), (7, 5, 3), (4, 9, None), (4, 9, 6), (6, 6, 0)]:
        query = rng.normal(size=ta)
        trains = rng.normal(size=(9, tb))
        cfg = DtwConfig(window=window)
        batched = baselines.dtw_distances(query, trains, cfg)
        reference = np.array(
            [baselines.dtw_distance(query, row, cfg) for row in trains]
        )
        assert np.array_equal(batched, reference)


def test_distance_matrix_handles_mixed_lengths():
    # rows grouped by length are scattered back to the original column order
    rng = np.random.default_rng(6)
    train = [TimeSeries(rng.normal(size=n), label=0) for n in (5, 3, 5, 4, 3)]
    test = [TimeSeries(rng.normal(size=n), label=0) for n in (4, 6)]
    matrix = baselines.dtw_distance_matrix(test, train)
    assert matrix.shape == (2, 5)
    for i, q in enumerate(test):
        for j, t in enumerate(train):
            assert matrix[i, j] == baselines.dtw_distance(q.values, t.values)


def test_distance_matrix_rejects_empty_sets():
    series = [TimeSeries(np.zeros(3), label=0)]
    with pytest.raises(ValueError, match="empty train"):
        baselines.dtw_distance_matrix(series, [])
    with pytest.raises(ValueError, match="empty test"):
        baselines.dtw_distance_matrix([], series)


def test_parallel_matrix_matches_serial():
    rng = np.random.default_rng(7)
    train = [TimeSeries(rng.normal(size=10), label=0) for _ in range(6)]
    train += [TimeSeries(rng.normal(size=8), label=1) for _ in range(4)]
    test = [TimeSeries(rng.normal(size=9), label=0) for _ in range(12)]
    serial = baselines.dtw_distance_matrix(test, train, workers=1)
    parallel = baselines.dtw_distance_matrix(test, train, workers=3)
    assert np.array_equal(serial, parallel)


def test_resolve_workers_env_cap(monkeypatch):
    monkeypatch.delenv("TSEMBED_THREADS", raising=False)
    assert baselines.resolve_workers(3) == 3
    assert baselines.resolve_workers(0) == 1
    assert baselines.resolve_workers(None) == (os.cpu_count() or 1)
    monkeypatch.setenv("TSEMBED_THREADS", "2")
    assert baselines.resolve_workers(8) == 2
    assert baselines.resolve_workers(None) == min(os.cpu_count() or 1, 2)
    assert baselines.resolve_workers(1) == 1
    monkeypatch.setenv("TSEMBED_THREADS", "many")
    with pytest.raises(ValueError, match="TSEMBED_THREADS"):
        baselines.resolve_workers(4)


# ---------------------------------------------------------------- 1-NN


def test_exact_match_recovers_label():
    rng = np.random.default_rng(8)
    train = [TimeSeries(rng.normal(size=6), label=k) for k in range(4)]
    test = [TimeSeries(train[2].values.copy(), label=2)]
    predictions, error = baselines.dtw_1nn_classify(train, test)
    assert predictions.tolist() == [2]
    assert error == 0.0


def test_tie_goes_to_lowest_train_index():
    values = np.array([0.5, -0.5, 1.0])
    train = [TimeSeries(values.copy(), label=3), TimeSeries(values.copy(), label=1)]
    test = [TimeSeries(np.array([0.4, -0.6, 1.1]), label=1)]
    predictions, _ = baselines.dtw_1nn_classify(train, test)
    assert predictions.tolist() == [3]


def test_small_classification_oracle():
    train = [
        TimeSeries(np.array([0.0, 0.0, 0.0]), label=0),
        TimeSeries(np.array([1.0, 1.0, 1.0]), label=1),
        TimeSeries(np.array([5.0, 5.0, 5.0]), label=2),
    ]
    test = [
        TimeSeries(np.array([0.1, 0.1, 0.1]), label=0),
        TimeSeries(np.array([0.9, 1.0, 1.1]), label=1),
        TimeSeries(np.array([4.0, 5.0, 6.0]), label=2),
        TimeSeries(np.array([0.4, 0.4, 0.4]), label=1),  # nearer the zeros
    ]
    predictions, error = baselines.dtw_1nn_classify(train, test)
    assert predictions.tolist() == [0, 1, 2, 0]
    assert error == 0.25


# ---------------------------------------------------------------- output


def test_write_distance_matrix_csv(tmp_path):
    matrix = np.array([[0.0, 1.5, 30.25], [2.0, 0.1, 0.2]])
    path = str(tmp_path / "distances.csv")
    baselines.write_distance_matrix_csv(matrix, path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "train0,train1,train2"
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(parsed, matrix)
