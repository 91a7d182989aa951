"""Embed a labeled dataset with a frozen encoder and map it to 2-D.

The encoder is an autoencoder trained on this dataset's own train split
with the labels stripped; any class structure visible in the map was
learned from reconstruction alone. The first run trains and caches the
encoder (about half a minute); reruns load the checkpoint.
"""

import os

import numpy as np

from tsembed import dataio, sae, tsne

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
    model = get_model(ds)

    test = [dataio.znormalize(s) for s in ds.test]
    labels = np.array([s.label for s in test])
    vectors = sae.embed_many(model, test)
    print(f"embedded {vectors.shape[0]} held-out series into {vectors.shape[1]} dims")

    # how class-coherent is the embedding space itself?
    d = np.linalg.norm(vectors[:, None, :] - vectors[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    loo = float(np.mean(labels[d.argmin(axis=1)] != labels))
    print(f"nearest-neighbor error in embedding space: {loo:.3f}")

    coords, history = tsne.tsne_run(
        vectors, tsne.TsneConfig(perplexity=12.0, iterations=1000, seed=0)
    )
    print(f"KL divergence: {history[0]:.3f} at start, {history[-1]:.3f} at end")

    dd = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=2)
    np.fill_diagonal(dd, np.inf)
    purity = float(np.mean(labels[dd.argmin(axis=1)] == labels))
    print(f"fraction of map points whose nearest neighbor shares their class: {purity:.3f}")

    os.makedirs(OUT, exist_ok=True)
    csv_path, svg_path = tsne.emit_scatter(coords, labels, os.path.join(OUT, "map"))
    print(f"wrote {csv_path} and {svg_path}")


if __name__ == "__main__":
    main()
