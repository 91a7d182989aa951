"""Train a small sequence autoencoder and watch the loss curve.

The training corpus mixes two synthetic datasets of different lengths to
exercise the length-bucketed batching; a third, unseen dataset serves as
validation. The checkpoint that scored best on validation is what gets
saved, not the final iterate.
"""

import os

from tsembed import dataio, sae

OUT = os.path.join(os.path.dirname(__file__), "out")


def build_corpora():
    # z-normalize per series, as the downstream embedding pipeline does
    def norm(ds):
        return dataio.Dataset(
            ds.name,
            [dataio.znormalize(s) for s in ds.train],
            [dataio.znormalize(s) for s in ds.test],
            ds.num_classes,
            ds.series_length,
        )

    train = [
        norm(dataio.make_synthetic(3, 20, 40, 0.1, 1)),
        norm(dataio.make_synthetic(2, 20, 30, 0.1, 2)),
    ]
    val = [norm(dataio.make_synthetic(3, 6, 40, 0.1, 9))]
    return dataio.Corpus(train, "train"), dataio.Corpus(val, "validation")


def main():
    train_corpus, val_corpus = build_corpora()
    n_series = len(train_corpus.all_series())
    print(f"training corpus: {n_series} series across lengths 30 and 40")

    config = sae.TrainConfig(
        batch_size=16, max_iterations=400, eval_every=50, seed=0
    )
    result = sae.train(train_corpus, val_corpus, config, num_layers=2, units=16)

    print("\n iter   train/pt   val/pt")
    for row in result.history:
        print(
            f"{row['iteration']:5d}   {row['train_loss_per_point']:.4f}"
            f"     {row['val_loss_per_point']:.4f}"
        )
    best = min(row["val_loss_per_point"] for row in result.history)
    print(f"\nbest validation loss per point: {best:.4f}")

    os.makedirs(OUT, exist_ok=True)
    ckpt = os.path.join(OUT, "model.ckpt")
    sae.save_checkpoint(result.model, ckpt)
    sae.write_history_csv(result.history, os.path.join(OUT, "history.csv"))
    print(f"checkpoint -> {ckpt}")
    print(f"embedding dimension: {result.model.embedding_dim}")


if __name__ == "__main__":
    main()
