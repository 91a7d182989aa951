"""A tour of the synthetic waveform families.

The generator draws each class from a different family (sines, square,
sawtooth, AR(1), trend), adds Gaussian noise, and splits 50/50 into train
and test. This script prints an ASCII sketch of one series per class and
saves the dataset in the two-file tab-separated layout the rest of the
tooling reads.
"""

import os

import numpy as np

from tsembed import dataio

OUT = os.path.join(os.path.dirname(__file__), "out", "waves")
LEVELS = " .:-=+*#%@"


def sparkline(values):
    lo, hi = values.min(), values.max()
    span = hi - lo if hi > lo else 1.0
    idx = ((values - lo) / span * (len(LEVELS) - 1)).round().astype(int)
    return "".join(LEVELS[i] for i in idx)


def main():
    ds = dataio.make_synthetic(
        num_classes=5, per_class=12, length=60, noise=0.05, seed=0
    )
    print(f"dataset {ds.name!r}: {len(ds.train)} train / {len(ds.test)} test,")
    print(f"{ds.num_classes} classes, length {ds.series_length}\n")

    for cls in range(ds.num_classes):
        members = [s for s in ds.train if s.label == cls]
        stacked = np.stack([s.values for s in members])
        print(f"class {cls}  mean {stacked.mean():+.3f}  sd {stacked.std():.3f}")
        print(f"  {sparkline(members[0].values)}")
        print(f"  {sparkline(members[1].values)}")

    os.makedirs(OUT, exist_ok=True)
    dataio.save_dataset(ds, OUT)
    # the file pair is named after its directory, which is how loaders find it
    print(f"\nsaved to {OUT}/ as waves_TRAIN.tsv and waves_TEST.tsv")
    print(
        "the same data comes out of:  "
        "tsembed synth --classes 5 --per-class 12 --noise 0.05"
    )


if __name__ == "__main__":
    main()
