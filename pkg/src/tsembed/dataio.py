"""Dataset loading, normalization, and synthetic corpus generation.

Datasets follow the UCR text convention: one series per line, class label in
the first field, followed by the observations, separated by commas or
whitespace. A dataset directory holds a ``<Name>_TRAIN`` and ``<Name>_TEST``
file pair (optionally with a .tsv/.txt/.csv extension).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

DEGENERATE_STD = 1e-12
DEFAULT_LENGTH_CAP = 512

_UCR_SUFFIXES = ("", ".tsv", ".txt", ".csv")


@dataclass
class TimeSeries:
    """One univariate real-valued sequence with an optional class label."""

    values: np.ndarray
    label: int | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series contains non-finite values")

    def __len__(self):
        return self.values.size


@dataclass
class Dataset:
    """A named train/test split of fixed-length labeled series."""

    name: str
    train: list[TimeSeries]
    test: list[TimeSeries]
    num_classes: int
    series_length: int


@dataclass
class Corpus:
    """A collection of datasets used for unsupervised training or validation."""

    datasets: list[Dataset]
    role: str  # "train" or "validation"
    max_length: int = DEFAULT_LENGTH_CAP

    def __post_init__(self):
        if self.role not in ("train", "validation"):
            raise ValueError(f"unknown corpus role: {self.role!r}")
        for ds in self.datasets:
            if ds.series_length > self.max_length:
                raise ValueError(
                    f"dataset {ds.name!r} has length {ds.series_length}, "
                    f"above the corpus cap {self.max_length}"
                )

    def all_series(self) -> list[TimeSeries]:
        out = []
        for ds in self.datasets:
            out.extend(ds.train)
            out.extend(ds.test)
        return out


def _parse_lines(path: str) -> tuple[list[float], list[np.ndarray]]:
    raw_labels: list[float] = []
    rows: list[np.ndarray] = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",") if "," in line else line.split()
            try:
                record = np.array([float(f) for f in fields], dtype=np.float64)
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field")
            if record.size < 2:
                raise ValueError(f"{path}: line {lineno}: need a label and at least one value")
            if width is None:
                width = record.size
            elif record.size != width:
                raise ValueError(
                    f"{path}: line {lineno}: record has {record.size - 1} values, "
                    f"expected {width - 1}"
                )
            raw_labels.append(record[0])
            rows.append(record[1:])
    if not rows:
        raise ValueError(f"{path}: no records found")
    return raw_labels, rows


def _remap_labels(raw_labels: list[float]) -> list[int]:
    # Contiguous 0-based ids, preserving the sorted order of the raw labels.
    mapping = {raw: idx for idx, raw in enumerate(sorted(set(raw_labels)))}
    return [mapping[raw] for raw in raw_labels]


def parse_ucr(path: str) -> list[TimeSeries]:
    """Parse a UCR-format file into labeled series.

    Labels are remapped to contiguous integers [0, C) preserving the sorted
    order of the raw labels found in the file.
    """
    raw_labels, rows = _parse_lines(path)
    labels = _remap_labels(raw_labels)
    return [TimeSeries(values=v, label=l) for v, l in zip(rows, labels)]


def write_ucr(path: str, series: list[TimeSeries]) -> None:
    """Write series to a UCR-format file (tab-delimited, full float precision)."""
    with open(path, "w") as fh:
        for ts in series:
            label = 0 if ts.label is None else ts.label
            fh.write("\t".join([str(label)] + [repr(float(v)) for v in ts.values]) + "\n")


def _find_split_file(directory: str, name: str, split: str) -> str:
    for suffix in _UCR_SUFFIXES:
        candidate = os.path.join(directory, f"{name}_{split}{suffix}")
        if os.path.isfile(candidate):
            return candidate
    raise FileNotFoundError(f"no {name}_{split} file under {directory}")


def load_dataset(directory: str) -> Dataset:
    """Load a <Name>_TRAIN / <Name>_TEST pair from a dataset directory.

    Train and test share one label mapping so class ids agree across splits.
    """
    name = os.path.basename(os.path.normpath(directory))
    raw_tr, rows_tr = _parse_lines(_find_split_file(directory, name, "TRAIN"))
    raw_te, rows_te = _parse_lines(_find_split_file(directory, name, "TEST"))
    if rows_tr[0].size != rows_te[0].size:
        raise ValueError(f"{name}: train/test series lengths differ")
    joint = _remap_labels(raw_tr + raw_te)
    labels_tr, labels_te = joint[: len(raw_tr)], joint[len(raw_tr):]
    train = [TimeSeries(v, l) for v, l in zip(rows_tr, labels_tr)]
    test = [TimeSeries(v, l) for v, l in zip(rows_te, labels_te)]
    return Dataset(
        name=name,
        train=train,
        test=test,
        num_classes=len(set(joint)),
        series_length=rows_tr[0].size,
    )


def save_dataset(dataset: Dataset, directory: str) -> None:
    """Write a dataset as a UCR file pair named after the directory."""
    os.makedirs(directory, exist_ok=True)
    name = os.path.basename(os.path.normpath(directory))
    write_ucr(os.path.join(directory, f"{name}_TRAIN.tsv"), dataset.train)
    write_ucr(os.path.join(directory, f"{name}_TEST.tsv"), dataset.test)


def znormalize_values(values: np.ndarray) -> np.ndarray:
    """Normalize to zero mean and unit population standard deviation.

    Series with standard deviation below 1e-12 come back as all zeros rather
    than erroring, so corpora with constant series stay loadable.
    """
    values = np.asarray(values, dtype=np.float64)
    std = values.std()
    if std < DEGENERATE_STD:
        return np.zeros_like(values)
    return (values - values.mean()) / std


def znormalize(series: TimeSeries) -> TimeSeries:
    return TimeSeries(values=znormalize_values(series.values), label=series.label)


def znormalize_dataset(dataset: Dataset) -> Dataset:
    return Dataset(
        name=dataset.name,
        train=[znormalize(s) for s in dataset.train],
        test=[znormalize(s) for s in dataset.test],
        num_classes=dataset.num_classes,
        series_length=dataset.series_length,
    )


# Waveform families for the synthetic surrogate corpora. Periodic families get
# a per-series random phase so instances within a class differ even at zero
# noise amplitude; the autoregressive family draws unit-variance innovations
# from the per-series stream.
def _sine(t, phase, rng, freq=2.0):
    return np.sin(2 * np.pi * (freq * t + phase))


def _square(t, phase, rng, freq=2.0):
    return np.sign(np.sin(2 * np.pi * (freq * t + phase)) + 1e-12)


def _sawtooth(t, phase, rng, freq=2.0):
    return 2.0 * np.mod(freq * t + phase, 1.0) - 1.0


def _ar1(t, phase, rng):
    innovations = rng.standard_normal(t.size)
    out = np.empty(t.size)
    acc = 0.0
    for i in range(t.size):
        acc = 0.9 * acc + innovations[i]
        out[i] = acc
    return out


def _trend_up(t, phase, rng):
    return 2.0 * t - 1.0 + rng.uniform(-0.5, 0.5)


def _trend_down(t, phase, rng):
    return 1.0 - 2.0 * t + rng.uniform(-0.5, 0.5)


_FAMILIES = [
    _sine,
    _square,
    _sawtooth,
    _ar1,
    _trend_up,
    _trend_down,
    lambda t, phase, rng: _sine(t, phase, rng, freq=5.0),
    lambda t, phase, rng: _square(t, phase, rng, freq=5.0),
]


def make_synthetic(
    num_classes: int,
    per_class: int,
    length: int,
    noise: float,
    seed: int,
) -> Dataset:
    """Generate a labeled dataset from distinct waveform families.

    Each class comes from one family (sines of class-dependent frequency,
    square, sawtooth, AR(1), linear trends) plus additive Gaussian noise of
    the given amplitude. Deterministic for a fixed seed; each class is split
    50/50 into train and test.
    """
    if not 2 <= num_classes <= 8:
        raise ValueError("num_classes must be in 2..8")
    if per_class < 2:
        raise ValueError("per_class must be at least 2 to split train/test")
    if length < 1:
        raise ValueError("length must be positive")
    t = np.arange(length, dtype=np.float64) / length
    train: list[TimeSeries] = []
    test: list[TimeSeries] = []
    n_train = (per_class + 1) // 2
    for cls in range(num_classes):
        family = _FAMILIES[cls]
        for idx in range(per_class):
            rng = np.random.default_rng([seed, cls, idx])
            phase = rng.uniform(0.0, 1.0)
            wave = family(t, phase, rng)
            wave = wave + noise * rng.standard_normal(length)
            ts = TimeSeries(values=wave, label=cls)
            (train if idx < n_train else test).append(ts)
    return Dataset(
        name=f"synthetic{num_classes}c",
        train=train,
        test=test,
        num_classes=num_classes,
        series_length=length,
    )


def synthetic_control(seed: int = 0, per_class_split: int = 50) -> Dataset:
    """Generate a control-chart dataset: 6 classes, length 60.

    Uses the classic control-chart process (normal, cyclic, increasing and
    decreasing trend, upward and downward shift) around level 30 with noise
    scale 2, matching the well-known benchmark layout of 50 train and 50 test
    instances per class. Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    length = 60
    t = np.arange(1, length + 1, dtype=np.float64)
    mean, scale = 30.0, 2.0

    def one(cls: int) -> np.ndarray:
        base = mean + scale * rng.uniform(-3.0, 3.0, size=length)
        if cls == 1:  # cyclic
            amp = rng.uniform(10.0, 15.0)
            period = rng.uniform(10.0, 15.0)
            base += amp * np.sin(2 * np.pi * t / period)
        elif cls == 2:  # increasing trend
            base += rng.uniform(0.2, 0.5) * t
        elif cls == 3:  # decreasing trend
            base -= rng.uniform(0.2, 0.5) * t
        elif cls == 4:  # upward shift
            base += rng.uniform(7.5, 20.0) * (t >= rng.uniform(length / 3, 2 * length / 3))
        elif cls == 5:  # downward shift
            base -= rng.uniform(7.5, 20.0) * (t >= rng.uniform(length / 3, 2 * length / 3))
        return base

    train, test = [], []
    for cls in range(6):
        for split, bucket in (("train", train), ("test", test)):
            for _ in range(per_class_split):
                bucket.append(TimeSeries(values=one(cls), label=cls))
    return Dataset(
        name="SyntheticControl",
        train=train,
        test=test,
        num_classes=6,
        series_length=length,
    )


def stratified_subsample_indices(labels, fraction: float, seed: int) -> np.ndarray:
    """Indices of a class-balanced subsample, in original order.

    Per-class counts are ceil(fraction * class count) with a minimum of one
    instance per class. Deterministic for a fixed seed.
    """
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("empty training set")
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    if any(l is None for l in labels):
        raise ValueError("all series must be labeled")
    rng = np.random.default_rng(seed)
    keep = np.zeros(labels.size, dtype=bool)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        count = max(1, math.ceil(fraction * idx.size - 1e-9))
        keep[rng.choice(idx, size=count, replace=False)] = True
    return np.flatnonzero(keep)


def stratified_subsample(
    train: list[TimeSeries], fraction: float, seed: int
) -> list[TimeSeries]:
    """Subsample while maintaining class balance; see
    stratified_subsample_indices for the per-class counting rule."""
    idx = stratified_subsample_indices([s.label for s in train], fraction, seed)
    return [train[i] for i in idx]


def load_manifest(path: str) -> tuple[Corpus, Corpus]:
    """Read a corpus manifest: one dataset directory per line, prefixed with
    a role tag ``train:`` or ``val:``. Returns the train and validation corpora.
    """
    train_dirs, val_dirs = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tag, _, rest = line.partition(":")
            tag, rest = tag.strip(), rest.strip()
            if tag == "train" and rest:
                train_dirs.append(rest)
            elif tag == "val" and rest:
                val_dirs.append(rest)
            else:
                raise ValueError(f"{path}: line {lineno}: expected 'train: <dir>' or 'val: <dir>'")
    if not train_dirs:
        raise ValueError(f"{path}: no train datasets listed")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(d):
        return d if os.path.isabs(d) else os.path.join(base, d)

    train_corpus = Corpus([load_dataset(resolve(d)) for d in train_dirs], role="train")
    val_corpus = Corpus([load_dataset(resolve(d)) for d in val_dirs], role="validation")
    return train_corpus, val_corpus


def write_embeddings(path: str, labels: np.ndarray, vectors: np.ndarray) -> None:
    """Write an embedding table as CSV, one row per instance, label first."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if len(labels) != vectors.shape[0]:
        raise ValueError("labels and vectors disagree on instance count")
    with open(path, "w") as fh:
        for label, row in zip(labels, vectors):
            fh.write(",".join([str(int(label))] + [repr(float(v)) for v in row]) + "\n")


def read_embeddings(path: str) -> tuple[np.ndarray, np.ndarray]:
    labels, rows = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                labels.append(int(float(fields[0])))
                rows.append([float(f) for f in fields[1:]])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed embedding row")
    if not rows:
        raise ValueError(f"{path}: no rows")
    return np.array(labels, dtype=np.int64), np.array(rows, dtype=np.float64)
