"""Run every evaluation protocol on one dataset and print the report.

Methods side by side: DTW 1-NN, an SVM over frozen-encoder embeddings
(whole embedding, per-layer slices, and a reduced-label variant), and an
SVM over embeddings from an autoencoder trained fresh inside the
protocol. Reuses the encoder cached by demo 03 when present. Takes
about a minute.
"""

import os

from tsembed import dataio, harness, sae

OUT = os.path.join(os.path.dirname(__file__), "out")
CKPT = os.path.join(OUT, "encoder.ckpt")


def get_model(ds):
    if os.path.exists(CKPT):
        print(f"loading {CKPT}")
        return sae.load_checkpoint(CKPT)
    print("training the encoder on the unlabeled train split...")
    series = [dataio.znormalize(s) for s in ds.train]
    wrapped = dataio.Dataset(ds.name, series, [], ds.num_classes, ds.series_length)
    corpus = dataio.Corpus([wrapped], "train")
    config = sae.TrainConfig(max_iterations=1000, eval_every=250, seed=0)
    model = sae.train(
        corpus, dataio.Corpus([wrapped], "validation"), config, num_layers=2, units=32
    ).model
    os.makedirs(OUT, exist_ok=True)
    sae.save_checkpoint(model, CKPT)
    return model


def main():
    ds = dataio.make_synthetic(3, 100, 60, 0.1, 7)
    print(f"dataset: {len(ds.train)} train / {len(ds.test)} test, 3 classes\n")
    model = get_model(ds)

    print("running the comparison...\n")
    report = harness.compare_dataset(
        ds,
        ["dtw", "frozen", "layers", "reduced", "data-sae"],
        checkpoint_model=model,
        seed=0,
        sae_layers=2,
        sae_units=32,
        sae_config=sae.TrainConfig(max_iterations=1000, eval_every=250, seed=0),
    )
    print(report.to_table())

    os.makedirs(OUT, exist_ok=True)
    path = os.path.join(OUT, "report.json")
    with open(path, "w") as fh:
        fh.write(report.to_json())
    print(f"\nreport -> {path}")


if __name__ == "__main__":
    main()
