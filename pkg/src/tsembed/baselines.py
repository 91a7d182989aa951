"""Dynamic time warping distance and the DTW 1-nearest-neighbor classifier.

The distance is the minimal cumulative squared point cost over monotone
warping paths, computed by the standard dynamic program
D[i][j] = cost(i, j) + min(D[i-1][j], D[i][j-1], D[i-1][j-1]). No square
root is applied at the end; nearest-neighbor decisions are invariant to it.
An optional Sakoe-Chiba band restricts paths to |i - j| <= window.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np


@dataclass
class DtwConfig:
    window: int | None = None  # Sakoe-Chiba band radius; None = full window

    def __post_init__(self):
        if self.window is not None and self.window < 0:
            raise ValueError("window radius must be >= 0")


def _values(series) -> np.ndarray:
    v = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("series must be non-empty and one-dimensional")
    return v


def _check_band(window, ta: int, tb: int) -> None:
    if window is not None and window < abs(ta - tb):
        raise ValueError(
            f"window {window} admits no warping path between lengths {ta} and {tb}"
        )


def dtw_distance(a, b, cfg: DtwConfig | None = None) -> float:
    """DTW distance between two series (squared point cost, no final root)."""
    av, bv = _values(a), _values(b)
    window = cfg.window if cfg is not None else None
    ta, tb = av.size, bv.size
    _check_band(window, ta, tb)
    d = np.full((ta + 1, tb + 1), np.inf)
    d[0, 0] = 0.0
    for i in range(1, ta + 1):
        jlo = 1 if window is None else max(1, i - window)
        jhi = tb if window is None else min(tb, i + window)
        for j in range(jlo, jhi + 1):
            diff = av[i - 1] - bv[j - 1]
            d[i, j] = diff * diff + min(d[i - 1, j - 1], d[i - 1, j], d[i, j - 1])
    return float(d[ta, tb])


def dtw_distances(query, train_matrix: np.ndarray, cfg: DtwConfig | None = None) -> np.ndarray:
    """Distances from one query to every row of an equal-length train matrix.

    Runs the same dynamic program as dtw_distance for all rows at once,
    sweeping anti-diagonals; results are identical bit for bit.
    """
    qv = _values(query)
    trains = np.asarray(train_matrix, dtype=np.float64)
    if trains.ndim != 2 or trains.shape[1] == 0:
        raise ValueError("train matrix must be [n, length] and non-empty")
    window = cfg.window if cfg is not None else None
    ta, (n, tb) = qv.size, trains.shape
    _check_band(window, ta, tb)

    diff = qv[None, :, None] - trains[:, None, :]
    cost = diff * diff  # [n, ta, tb]
    d = np.full((n, ta + 1, tb + 1), np.inf)
    d[:, 0, 0] = 0.0
    for s in range(2, ta + tb + 1):  # s = i + j over cells with i, j >= 1
        ilo, ihi = max(1, s - tb), min(ta, s - 1)
        if window is not None:
            # |i - j| <= w with j = s - i bounds i to [(s-w)/2, (s+w)/2]
            ilo = max(ilo, -((window - s) // 2))
            ihi = min(ihi, (s + window) // 2)
        if ilo > ihi:
            continue
        i = np.arange(ilo, ihi + 1)
        j = s - i
        best = np.minimum(d[:, i - 1, j - 1], d[:, i - 1, j])
        np.minimum(best, d[:, i, j - 1], out=best)
        d[:, i, j] = cost[:, i - 1, j - 1] + best
    return d[:, ta, tb]


def _group_by_length(series_list):
    groups: dict[int, list[int]] = {}
    for idx, s in enumerate(series_list):
        groups.setdefault(_values(s).size, []).append(idx)
    return [
        (np.array(idxs), np.stack([_values(series_list[i]) for i in idxs]))
        for _, idxs in sorted(groups.items())
    ]


def _distance_row(query, groups, cfg) -> np.ndarray:
    out = np.empty(sum(len(idxs) for idxs, _ in groups))
    for idxs, matrix in groups:
        out[idxs] = dtw_distances(query, matrix, cfg)
    return out


_POOL_STATE: dict = {}


def _pool_init(groups, cfg):
    _POOL_STATE["groups"] = groups
    _POOL_STATE["cfg"] = cfg


def _pool_rows(queries):
    return np.stack(
        [_distance_row(q, _POOL_STATE["groups"], _POOL_STATE["cfg"]) for q in queries]
    )


def resolve_workers(requested: int | None = None) -> int:
    """Worker-process count: the request (default cpu count) capped by the
    TSEMBED_THREADS environment variable."""
    count = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("TSEMBED_THREADS")
    if cap is not None:
        try:
            count = min(count, int(cap))
        except ValueError:
            raise ValueError(f"TSEMBED_THREADS must be an integer, got {cap!r}")
    return max(1, count)


def dtw_distance_matrix(
    test, train, cfg: DtwConfig | None = None, workers: int | None = None
) -> np.ndarray:
    """Full [n_test, n_train] distance matrix, optionally across processes.

    Rows are independent, so the split over workers leaves every entry
    identical to the single-process result.
    """
    if not train:
        raise ValueError("empty train set")
    if not test:
        raise ValueError("empty test set")
    groups = _group_by_length(train)
    queries = [_values(s) for s in test]
    workers = resolve_workers(workers)
    if workers <= 1 or len(queries) < 2 * workers:
        return np.stack([_distance_row(q, groups, cfg) for q in queries])
    chunks = [list(c) for c in np.array_split(np.arange(len(queries)), workers)]
    batches = [[queries[i] for i in chunk] for chunk in chunks if chunk]
    ctx = get_context("fork")
    with ctx.Pool(len(batches), initializer=_pool_init, initargs=(groups, cfg)) as pool:
        parts = pool.map(_pool_rows, batches)
    return np.concatenate(parts)


def dtw_1nn_classify(
    train, test, cfg: DtwConfig | None = None, workers: int | None = None
):
    """Label each test series by its nearest training series under DTW.

    Ties go to the lowest training index. Returns (predictions, error_rate)
    with the error measured against the test labels.
    """
    matrix = dtw_distance_matrix(test, train, cfg, workers)
    nearest = matrix.argmin(axis=1)
    train_labels = np.array([s.label for s in train])
    predictions = train_labels[nearest]
    truth = np.array([s.label for s in test])
    error_rate = float(np.mean(predictions != truth))
    return predictions, error_rate


def write_distance_matrix_csv(matrix: np.ndarray, path: str) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write(",".join(f"train{j}" for j in range(matrix.shape[1])) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
