"""Command-line orchestration of the full pipeline.

Subcommands cover autoencoder training on a corpus manifest, embedding
extraction, the classifier comparison protocol (frozen-encoder SVM,
data-specific SAE, DTW 1-NN, reduced-label and per-layer probes), scaling
benchmarks, synthetic dataset generation, and 2-D map export. Every command
writes its outputs under a run directory containing a config digest and a
versions file, so any result can be reproduced from what it records.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, baselines, dataio, sae, svm, tsne


# ---------------------------------------------------------------------------
# reports

@dataclass
class MethodResult:
    method: str
    error_rate: float
    config_digest: str
    model_digest: str
    seeds: list[int]
    wall_time: float
    per_seed_errors: list[float] | None = None

    def __post_init__(self):
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError(f"{self.method}: error rate {self.error_rate} outside [0,1]")
        if self.method.endswith("-reduced") and len(self.seeds) != 3:
            raise ValueError("reduced-label rows must record exactly 3 seeds")


@dataclass
class ExperimentReport:
    dataset: str
    rows: list[MethodResult] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"dataset": self.dataset, "rows": [asdict(r) for r in self.rows]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        doc = json.loads(text)
        return cls(
            dataset=doc["dataset"],
            rows=[MethodResult(**row) for row in doc["rows"]],
        )

    def to_table(self) -> str:
        headers = ["method", "error", "seeds", "wall_s", "model"]
        lines = [headers]
        for r in self.rows:
            lines.append(
                [
                    r.method,
                    f"{r.error_rate:.4f}",
                    ",".join(str(s) for s in r.seeds),
                    f"{r.wall_time:.2f}",
                    r.model_digest[:12],
                ]
            )
        widths = [max(len(row[i]) for row in lines) for i in range(len(headers))]
        out = [f"dataset: {self.dataset}"]
        for k, row in enumerate(lines):
            out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if k == 0:
                out.append("  ".join("-" * w for w in widths))
        return "\n".join(out)


# ---------------------------------------------------------------------------
# provenance

def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest_of(obj) -> str:
    return hashlib.sha256(_canonical(obj).encode()).hexdigest()


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _svm_model_digest(model: svm.SvmModel) -> str:
    doc = {
        "classes": [int(c) for c in model.classes],
        "c": model.c,
        "gamma": model.gamma,
        "models": [
            {
                "sv": m.support_vectors.tolist(),
                "coef": m.dual_coefs.tolist(),
                "labels": m.sv_labels.tolist(),
                "bias": m.bias,
            }
            for m in model.models
        ],
    }
    return digest_of(doc)


def _series_digest(series_list) -> str:
    h = hashlib.sha256()
    for s in series_list:
        h.update(np.ascontiguousarray(s.values, dtype="<f8").tobytes())
        h.update(str(s.label).encode())
    return h.hexdigest()


def _sae_model_digest(model: sae.SaeModel) -> str:
    h = hashlib.sha256()
    for p in sae.param_arrays(model):
        h.update(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return h.hexdigest()


def write_provenance(run_dir: str, command: str, config: dict) -> str:
    os.makedirs(run_dir, exist_ok=True)
    digest = digest_of({"command": command, "config": config})
    with open(os.path.join(run_dir, "config.json"), "w") as fh:
        json.dump({"command": command, "config": config, "digest": digest}, fh, indent=2)
        fh.write("\n")
    with open(os.path.join(run_dir, "versions.txt"), "w") as fh:
        fh.write(f"tsembed {__version__}\n")
        fh.write(f"python {platform.python_version()}\n")
        fh.write(f"numpy {np.__version__}\n")
    return digest


# ---------------------------------------------------------------------------
# comparison protocol

KNOWN_METHODS = ("frozen", "data-sae", "dtw", "reduced", "layers")


def _svm_rows_input(dataset: dataio.Dataset):
    train = [dataio.znormalize(s) for s in dataset.train]
    test = [dataio.znormalize(s) for s in dataset.test]
    train_y = np.array([s.label for s in train])
    test_y = np.array([s.label for s in test])
    return train, test, train_y, test_y


def _fit_eval(train_x, train_y, test_x, test_y, seed, folds, grid_tol=1e-3):
    gs = svm.grid_search_cv(train_x, train_y, folds=folds, seed=seed, tol=grid_tol)
    model = svm.ovo_train(train_x, train_y, gs.best_c, gs.best_gamma, tol=grid_tol)
    error = svm.evaluate(model, test_x, test_y)
    return error, gs, model


def compare_dataset(
    dataset: dataio.Dataset,
    methods,
    checkpoint_model: sae.SaeModel | None = None,
    seed: int = 0,
    folds: int = 5,
    sae_layers: int = 2,
    sae_units=32,
    sae_config: sae.TrainConfig | None = None,
    workers: int | None = None,
) -> ExperimentReport:
    """Run the requested method subset on one dataset and report error rates.

    Test labels are used only for the final error computation; every model
    and hyperparameter choice is fitted on the train split alone.
    """
    for m in methods:
        if m not in KNOWN_METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {KNOWN_METHODS}")
    if checkpoint_model is None and any(
        m in methods for m in ("frozen", "reduced", "layers")
    ):
        raise ValueError("frozen-encoder methods need a checkpoint")

    train, test, train_y, test_y = _svm_rows_input(dataset)
    report = ExperimentReport(dataset=dataset.name)

    frozen_train = frozen_test = None
    if checkpoint_model is not None:
        frozen_train = sae.embed_many(checkpoint_model, train)
        frozen_test = sae.embed_many(checkpoint_model, test)
        encoder_digest = _sae_model_digest(checkpoint_model)

    if "frozen" in methods:
        t0 = time.perf_counter()
        error, gs, fitted = _fit_eval(frozen_train, train_y, frozen_test, test_y, seed, folds)
        report.rows.append(
            MethodResult(
                method="frozen",
                error_rate=error,
                config_digest=digest_of(
                    {"method": "frozen", "seed": seed, "folds": gs.folds,
                     "encoder": encoder_digest, "best_c": gs.best_c,
                     "best_gamma": gs.best_gamma}
                ),
                model_digest=_svm_model_digest(fitted),
                seeds=[seed],
                wall_time=time.perf_counter() - t0,
            )
        )

    if "data-sae" in methods:
        t0 = time.perf_counter()
        config = sae_config if sae_config is not None else sae.TrainConfig(
            max_iterations=1000, eval_every=100, seed=seed
        )
        own = dataio.Dataset(
            name=dataset.name, train=train, test=[],
            num_classes=dataset.num_classes, series_length=dataset.series_length,
        )
        corpus = dataio.Corpus([own], role="train")
        val = dataio.Corpus([own], role="validation")
        result = sae.train(corpus, val, config, num_layers=sae_layers, units=sae_units)
        emb_train = sae.embed_many(result.model, train)
        emb_test = sae.embed_many(result.model, test)
        error, gs, fitted = _fit_eval(emb_train, train_y, emb_test, test_y, seed, folds)
        report.rows.append(
            MethodResult(
                method="data-sae",
                error_rate=error,
                config_digest=digest_of(
                    {"method": "data-sae", "seed": seed, "folds": gs.folds,
                     "layers": sae_layers, "units": sae_units,
                     "iterations": config.max_iterations,
                     "encoder": _sae_model_digest(result.model),
                     "best_c": gs.best_c, "best_gamma": gs.best_gamma}
                ),
                model_digest=_svm_model_digest(fitted),
                seeds=[config.seed],
                wall_time=time.perf_counter() - t0,
            )
        )

    if "dtw" in methods:
        t0 = time.perf_counter()
        _, error = baselines.dtw_1nn_classify(train, test, workers=workers)
        report.rows.append(
            MethodResult(
                method="dtw",
                error_rate=error,
                config_digest=digest_of({"method": "dtw", "window": None}),
                model_digest=_series_digest(train),
                seeds=[],
                wall_time=time.perf_counter() - t0,
            )
        )

    if "reduced" in methods:
        t0 = time.perf_counter()
        seeds = [seed, seed + 1, seed + 2]
        errors, digests = [], []
        for s in seeds:
            idx = dataio.stratified_subsample_indices(train_y, 2.0 / 3.0, s)
            error, _, fitted = _fit_eval(
                frozen_train[idx], train_y[idx], frozen_test, test_y, s, folds
            )
            errors.append(error)
            digests.append(_svm_model_digest(fitted))
        report.rows.append(
            MethodResult(
                method="frozen-reduced",
                error_rate=float(np.mean(errors)),
                config_digest=digest_of(
                    {"method": "frozen-reduced", "fraction": "2/3",
                     "seeds": seeds, "folds": folds, "encoder": encoder_digest}
                ),
                model_digest=digest_of(digests),
                seeds=seeds,
                wall_time=time.perf_counter() - t0,
                per_seed_errors=errors,
            )
        )

    if "layers" in methods:
        for layer in range(1, checkpoint_model.num_layers + 1):
            t0 = time.perf_counter()
            emb_train = sae.embed_many(checkpoint_model, train, selector=layer)
            emb_test = sae.embed_many(checkpoint_model, test, selector=layer)
            error, gs, fitted = _fit_eval(emb_train, train_y, emb_test, test_y, seed, folds)
            report.rows.append(
                MethodResult(
                    method=f"frozen-layer{layer}",
                    error_rate=error,
                    config_digest=digest_of(
                        {"method": f"frozen-layer{layer}", "seed": seed,
                         "folds": gs.folds, "encoder": encoder_digest,
                         "best_c": gs.best_c, "best_gamma": gs.best_gamma}
                    ),
                    model_digest=_svm_model_digest(fitted),
                    seeds=[seed],
                    wall_time=time.perf_counter() - t0,
                )
            )

    return report


# ---------------------------------------------------------------------------
# scaling benchmark

def bench_embedding_scaling(model: sae.SaeModel, lengths, repeats: int = 5, batch: int = 4):
    """Wall time of embedding a fixed batch at each series length, with a
    least-squares linear fit over length. Returns a dict with per-length
    times (best of `repeats`), slope, intercept, and R^2."""
    lengths = sorted(int(t) for t in lengths)
    if len(lengths) < 3:
        raise ValueError("need at least 3 lengths for a fit")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    rng = np.random.default_rng(0)
    times = []
    for t_len in lengths:
        matrix = rng.normal(size=(batch, t_len))
        sae.embed_many(model, matrix)  # warm up
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            sae.embed_many(model, matrix)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    x = np.array(lengths, dtype=np.float64)
    y = np.array(times)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {
        "lengths": lengths,
        "times": [float(v) for v in times],
        "slope": float(slope),
        "intercept": float(intercept),
        "r_squared": float(r2),
        "batch": batch,
        "repeats": repeats,
    }


# ---------------------------------------------------------------------------
# commands

def _load_dataset_arg(value: str) -> dataio.Dataset:
    if value == "synthetic-control":
        return dataio.synthetic_control()
    if value.startswith("synthetic-control:"):
        return dataio.synthetic_control(seed=int(value.split(":", 1)[1]))
    return dataio.load_dataset(value)


def _parse_units(value: str):
    parts = value.split(",")
    return int(parts[0]) if len(parts) == 1 else [int(p) for p in parts]


def cmd_train_sae(args, parser: argparse.ArgumentParser) -> int:
    run_dir = args.run_dir
    if not os.path.isfile(args.manifest):
        parser.error(f"manifest not found: {args.manifest}")
    if args.val_manifest and not os.path.isfile(args.val_manifest):
        parser.error(f"manifest not found: {args.val_manifest}")
    train_corpus, val_corpus = dataio.load_manifest(args.manifest)
    if args.val_manifest:
        vt, vv = dataio.load_manifest(args.val_manifest)
        val_corpus = dataio.Corpus(vt.datasets + vv.datasets, role="validation")
    if not val_corpus.datasets:
        print("no validation datasets listed; validating on the training corpus")
        val_corpus = dataio.Corpus(train_corpus.datasets, role="validation")

    config = sae.TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        dropout_rate=args.dropout,
        max_iterations=args.max_iters,
        eval_every=args.eval_every,
        seed=args.seed,
    )
    units = _parse_units(args.units)
    write_provenance(
        run_dir,
        "train-sae",
        {
            "manifest": os.path.abspath(args.manifest),
            "layers": args.layers, "units": units, "lr": config.learning_rate,
            "batch": config.batch_size, "dropout": config.dropout_rate,
            "max_iters": config.max_iterations, "eval_every": config.eval_every,
            "seed": config.seed,
        },
    )
    print(
        f"training config: lr={config.learning_rate} batch={config.batch_size} "
        f"dropout={config.dropout_rate} layers={args.layers} units={units} "
        f"seed={config.seed}"
    )
    result = sae.train(train_corpus, val_corpus, config, num_layers=args.layers, units=units)
    ckpt = os.path.join(run_dir, "model.ckpt")
    sae.save_checkpoint(result.model, ckpt)
    sae.write_history_csv(result.history, os.path.join(run_dir, "history.csv"))
    print(f"checkpoint: {ckpt}")
    print(f"checkpoint digest: {file_digest(ckpt)}")
    print(f"best validation loss per point: {min(r['val_loss_per_point'] for r in result.history):.6g}")
    return 0


def cmd_embed(args) -> int:
    model = sae.load_checkpoint(args.checkpoint)
    dataset = _load_dataset_arg(args.dataset)
    selector = args.layer if args.layer == "all" else int(args.layer)
    train, test, train_y, test_y = _svm_rows_input(dataset)
    write_provenance(
        args.run_dir,
        "embed",
        {"checkpoint": file_digest(args.checkpoint), "dataset": dataset.name,
         "layer": args.layer},
    )
    vec_train = sae.embed_many(model, train, selector=selector)
    vec_test = sae.embed_many(model, test, selector=selector)
    out = args.out or os.path.join(args.run_dir, "embeddings.csv")
    dataio.write_embeddings(
        out,
        np.concatenate([train_y, test_y]),
        np.concatenate([vec_train, vec_test]),
    )
    print(f"embeddings: {out} ({vec_train.shape[0]} train + {vec_test.shape[0]} test rows, "
          f"{vec_train.shape[1]} dims)")
    return 0


def cmd_compare(args, parser: argparse.ArgumentParser) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in KNOWN_METHODS:
            parser.error(f"unknown method {m!r}; choose from {', '.join(KNOWN_METHODS)}")
    needs_ckpt = [m for m in methods if m in ("frozen", "reduced", "layers")]
    if needs_ckpt and not args.checkpoint:
        parser.error(f"methods {', '.join(needs_ckpt)} require --checkpoint")

    dataset = _load_dataset_arg(args.dataset)
    model = sae.load_checkpoint(args.checkpoint) if args.checkpoint else None
    sae_config = sae.TrainConfig(
        learning_rate=args.sae_lr,
        batch_size=args.sae_batch,
        dropout_rate=args.sae_dropout,
        max_iterations=args.sae_iters,
        eval_every=args.sae_eval_every,
        seed=args.seed,
    )
    write_provenance(
        args.run_dir,
        "compare",
        {"dataset": dataset.name, "methods": methods, "seed": args.seed,
         "folds": args.folds,
         "checkpoint": file_digest(args.checkpoint) if args.checkpoint else None,
         "sae": {"layers": args.sae_layers, "units": _parse_units(args.sae_units),
                 "iters": args.sae_iters, "lr": args.sae_lr,
                 "batch": args.sae_batch, "dropout": args.sae_dropout}},
    )
    report = compare_dataset(
        dataset,
        methods,
        checkpoint_model=model,
        seed=args.seed,
        folds=args.folds,
        sae_layers=args.sae_layers,
        sae_units=_parse_units(args.sae_units),
        sae_config=sae_config,
        workers=args.workers,
    )
    with open(os.path.join(args.run_dir, "report.json"), "w") as fh:
        fh.write(report.to_json() + "\n")
    table = report.to_table()
    with open(os.path.join(args.run_dir, "report.txt"), "w") as fh:
        fh.write(table + "\n")
    print(table)
    return 0


def cmd_bench_scaling(args, parser: argparse.ArgumentParser) -> int:
    lengths = [int(v) for v in args.lengths.split(",") if v.strip()]
    if len(lengths) < 3:
        parser.error("need at least 3 lengths, e.g. --lengths 64,128,256,512")
    if args.repeats < 2:
        print("warning: a single repeat is noisy; consider --repeats 5", file=sys.stderr)
    if args.checkpoint:
        model = sae.load_checkpoint(args.checkpoint)
    else:
        model = sae.init_sae(args.layers, _parse_units(args.units), seed=args.seed)
    write_provenance(
        args.run_dir,
        "bench-scaling",
        {"lengths": lengths, "repeats": args.repeats,
         "checkpoint": file_digest(args.checkpoint) if args.checkpoint else None,
         "layers": args.layers, "units": _parse_units(args.units)},
    )
    bench = bench_embedding_scaling(model, lengths, repeats=args.repeats)
    with open(os.path.join(args.run_dir, "scaling.json"), "w") as fh:
        json.dump(bench, fh, indent=2)
        fh.write("\n")
    print("length  best_time_s")
    for t_len, t in zip(bench["lengths"], bench["times"]):
        print(f"{t_len:>6}  {t:.6f}")
    print(f"linear fit: slope={bench['slope']:.3g}s/step  R^2={bench['r_squared']:.4f}")
    return 0


def cmd_synth(args) -> int:
    dataset = dataio.make_synthetic(
        args.classes, args.per_class, args.length, args.noise, args.seed
    )
    write_provenance(
        args.run_dir,
        "synth",
        {"classes": args.classes, "per_class": args.per_class,
         "length": args.length, "noise": args.noise, "seed": args.seed},
    )
    out_dir = os.path.join(args.run_dir, args.name)
    dataio.save_dataset(dataset, out_dir)
    print(f"dataset: {out_dir} ({len(dataset.train)} train / {len(dataset.test)} test)")
    return 0


def cmd_tsne(args) -> int:
    labels, vectors = dataio.read_embeddings(args.embeddings)
    config = tsne.TsneConfig(
        perplexity=args.perplexity,
        iterations=args.iterations,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    write_provenance(
        args.run_dir,
        "tsne",
        {"embeddings": os.path.abspath(args.embeddings),
         "perplexity": config.perplexity, "iterations": config.iterations,
         "learning_rate": config.learning_rate, "seed": config.seed},
    )
    coords = tsne.tsne_embed(vectors, config)
    csv_path, svg_path = tsne.emit_scatter(
        coords, [int(l) for l in labels], os.path.join(args.run_dir, "map")
    )
    print(f"coordinates: {csv_path}")
    print(f"scatter: {svg_path}")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsembed",
        description="GRU sequence-autoencoder embeddings for time series, "
        "with DTW and SVM evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-sae", help="train an autoencoder on a corpus manifest")
    p.add_argument("manifest", help="manifest listing 'train: <dir>' / 'val: <dir>' lines")
    p.add_argument("--val-manifest", help="separate manifest supplying validation datasets")
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--units", default="60", help="per-layer width, int or comma list")
    p.add_argument("--lr", type=float, default=0.006)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--dropout", type=float, default=0.4)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--eval-every", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--run-dir", default="runs/train-sae")
    p.set_defaults(func=lambda a, _p=p: cmd_train_sae(a, _p))

    p = sub.add_parser("embed", help="embed a dataset with a trained checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("dataset", help="dataset directory, or 'synthetic-control[:seed]'")
    p.add_argument("--layer", default="all", help="'all' or a 1-based layer index")
    p.add_argument("--out", help="output CSV path (default <run-dir>/embeddings.csv)")
    p.add_argument("--run-dir", default="runs/embed")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("compare", help="run the classifier comparison protocol")
    p.add_argument("dataset", help="dataset directory, or 'synthetic-control[:seed]'")
    p.add_argument("--checkpoint", help="frozen-encoder checkpoint")
    p.add_argument("--methods", default="dtw",
                   help=f"comma list from: {', '.join(KNOWN_METHODS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--sae-layers", type=int, default=2)
    p.add_argument("--sae-units", default="32")
    p.add_argument("--sae-iters", type=int, default=1000)
    p.add_argument("--sae-lr", type=float, default=0.006)
    p.add_argument("--sae-batch", type=int, default=32)
    p.add_argument("--sae-dropout", type=float, default=0.4)
    p.add_argument("--sae-eval-every", type=int, default=100)
    p.add_argument("--run-dir", default="runs/compare")
    p.set_defaults(func=lambda a, _p=p: cmd_compare(a, _p))

    p = sub.add_parser("bench-scaling", help="measure embedding time vs series length")
    p.add_argument("--checkpoint", help="use this model (default: a fresh one)")
    p.add_argument("--lengths", default="64,128,256,512")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--units", default="32")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--run-dir", default="runs/bench-scaling")
    p.set_defaults(func=lambda a, _p=p: cmd_bench_scaling(a, _p))

    p = sub.add_parser("synth", help="generate a synthetic waveform dataset")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="synthetic")
    p.add_argument("--run-dir", default="runs/synth")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("tsne", help="project an embedding CSV to 2-D")
    p.add_argument("embeddings", help="label-first embedding CSV")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--run-dir", default="runs/tsne")
    p.set_defaults(func=cmd_tsne)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures exit 1, usage errors exit 2 via argparse
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
