"""Release gate: ten numbered end-to-end checks with literal bounds.

Each test prints one [PASS]/[FAIL] line (bypassing capture) so a full run
reads as a checklist. Quantitative bars and runtime budgets are asserted
exactly as stated; nothing here is tuned to the implementation under test.
"""

import tempfile
import time
import warnings

import numpy as np

from tsembed import baselines, dataio, harness, sae, svm, tsne

from geometry import convex_hull, hulls_disjoint
from test_baselines import brute_force_dtw
from test_sae import numeric_gradients, one_series_corpora, random_corpora


def criterion(num, text):
    """Wrap a check so it reports a single pass/fail line on the terminal."""

    def deco(fn):
        def run(capsys):
            try:
                detail = fn()
            except BaseException:
                with capsys.disabled():
                    print(f"[FAIL] criterion {num}: {text}", flush=True)
                raise
            line = f"[PASS] criterion {num}: {text}"
            if detail:
                line += f" ({detail})"
            with capsys.disabled():
                print(line, flush=True)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return deco


@criterion(1, "analytic gradients match central differences (rel < 1e-4)")
def test_criterion_01_gradient_correctness():
    start = time.perf_counter()
    model = sae.init_sae(2, 3, seed=1)
    batch = np.random.default_rng(4).normal(size=(2, 5))
    _, outputs, enc_trace, dec_trace = sae.batch_forward(model, batch)
    analytic = sae.backward(model, batch, outputs, enc_trace, dec_trace)
    numeric = numeric_gradients(model, batch)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        rel = np.abs(a - n) / np.maximum(1.0, np.abs(n))
        worst = max(worst, float(rel.max()))
    elapsed = time.perf_counter() - start
    assert worst < 1e-4
    assert elapsed < 10.0
    return f"worst rel {worst:.2e}, {elapsed:.1f}s"


@criterion(2, "one-series memorization: per-point loss < 1e-2 within 2000 iterations")
def test_criterion_02_memorization():
    start = time.perf_counter()
    t = np.arange(30) / 30.0
    values = np.sin(2.0 * np.pi * 2.0 * t)
    train_corpus, val_corpus, _ = one_series_corpora(values)
    config = sae.TrainConfig(
        batch_size=1, dropout_rate=0.0, max_iterations=2000, eval_every=100, seed=0
    )
    result = sae.train(train_corpus, val_corpus, config, num_layers=2, units=32)
    loss = sae.corpus_loss(result.model, train_corpus)
    elapsed = time.perf_counter() - start
    assert loss < 1e-2
    assert elapsed < 120.0
    return f"loss {loss:.2e}, {elapsed:.1f}s"


@criterion(3, "DTW dynamic program equals brute-force path enumeration exactly")
def test_criterion_03_dtw_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    for _ in range(200):
        a = rng.normal(size=rng.integers(1, 7))
        b = rng.normal(size=rng.integers(1, 7))
        assert baselines.dtw_distance(a, b) == brute_force_dtw(a, b)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    return f"200 pairs, {elapsed:.1f}s"


@criterion(4, "DTW 1-NN error on the control-chart benchmark <= 0.05")
def test_criterion_04_dtw_benchmark():
    start = time.perf_counter()
    ds = dataio.synthetic_control()
    train = [dataio.znormalize(s) for s in ds.train]
    test = [dataio.znormalize(s) for s in ds.test]
    _, error = baselines.dtw_1nn_classify(train, test, workers=1)
    elapsed = time.perf_counter() - start
    assert error <= 0.05
    assert elapsed < 300.0
    return f"error {error:.4f}, {elapsed:.0f}s single-threaded"


@criterion(5, "trained-encoder SVM pipeline error <= 0.10 on at least 2 of 3 seeds")
def test_criterion_05_encoder_pipeline():
    start = time.perf_counter()
    errors = []
    for seed in (0, 1, 2):
        report = harness.compare_dataset(
            dataio.synthetic_control(),
            ["data-sae"],
            seed=seed,
            sae_layers=2,
            sae_units=32,
            sae_config=sae.TrainConfig(max_iterations=1000, eval_every=250, seed=seed),
        )
        (row,) = report.rows
        assert row.seeds == [seed]
        errors.append(row.error_rate)
    elapsed = time.perf_counter() - start
    hits = sum(e <= 0.10 for e in errors)
    assert hits >= 2, f"errors {errors}"
    assert elapsed < 2700.0
    summary = "/".join(f"{e:.3f}" for e in errors)
    return f"errors {summary}, {elapsed:.0f}s"


@criterion(6, "label-reduction gap: 2/3-label error within 0.05 of full-label error")
def test_criterion_06_reduced_labels():
    ds = dataio.make_synthetic(3, 100, 60, 0.1, 7)
    ztrain = [dataio.znormalize(s) for s in ds.train]
    unlabeled = dataio.Dataset("synthetic-3", ztrain, [], 3, ds.series_length)
    config = sae.TrainConfig(max_iterations=1000, eval_every=250, seed=0)
    result = sae.train(
        dataio.Corpus([unlabeled], "train"),
        dataio.Corpus([unlabeled], "validation"),
        config,
        num_layers=2,
        units=32,
    )
    report = harness.compare_dataset(
        ds, ["frozen", "reduced"], checkpoint_model=result.model, seed=0
    )
    rows = {r.method: r for r in report.rows}
    reduced = rows["frozen-reduced"]
    assert len(reduced.seeds) == 3
    gap = reduced.error_rate - rows["frozen"].error_rate
    assert gap <= 0.05
    return f"full {rows['frozen'].error_rate:.4f}, reduced mean {reduced.error_rate:.4f}"


@criterion(7, "SMO dual within 1e-3 of a QP oracle; KKT satisfied at every point")
def test_criterion_07_smo_oracle():
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    rng = np.random.default_rng(11)
    cs = [0.5, 1.0, 2.0, 5.0, 10.0]
    gammas = [0.3, 0.5, 0.8, 1.2, 2.0]
    for trial in range(5):
        n, c, gamma = 8, cs[trial], gammas[trial]
        x = rng.normal(size=(n, 2))
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        if len(set(y)) < 2:
            y[0] = -y[0]
        kernel = svm.rbf_kernel_matrix(x, x, gamma)
        alpha, bias, _, _ = svm._smo_solve(kernel, y, c=c, tol=1e-6, max_iter=200_000)
        sol = solvers.qp(
            matrix(np.outer(y, y) * kernel),
            matrix(-np.ones(n)),
            matrix(np.vstack([-np.eye(n), np.eye(n)])),
            matrix(np.hstack([np.zeros(n), c * np.ones(n)])),
            matrix(y[None, :]),
            matrix(np.zeros(1)),
        )
        reference = np.array(sol["x"]).ravel()
        gap = abs(
            svm.dual_objective(kernel, y, alpha)
            - svm.dual_objective(kernel, y, reference)
        )
        assert gap <= 1e-3

        assert np.all(alpha >= -1e-12) and np.all(alpha <= c + 1e-12)
        assert abs(alpha @ y) <= 1e-9
        margins = y * (kernel @ (alpha * y) + bias)
        slack = 1e-3
        for a, m in zip(alpha, margins):
            if a <= 1e-9:
                assert m >= 1.0 - slack
            elif a >= c - 1e-9:
                assert m <= 1.0 + slack
            else:
                assert abs(m - 1.0) <= slack
    return "5 problems, dual gap <= 1e-3"


@criterion(8, "embedding wall time linear in sequence length (R^2 >= 0.95)")
def test_criterion_08_linear_scaling():
    model = sae.init_sae(2, 32, seed=0)
    bench = harness.bench_embedding_scaling(model, [64, 128, 256, 512], repeats=5)
    assert bench["r_squared"] >= 0.95
    return f"R^2 {bench['r_squared']:.4f}"


@criterion(9, "t-SNE separates 10-sigma blobs; entropy calibrated; KL non-negative")
def test_criterion_09_tsne_sanity():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(30, 4))
    b = rng.normal(size=(30, 4))
    b[:, 0] += 10.0  # unit-variance blobs, centers 10 sigma apart
    x = np.vstack([a, b])

    perplexity = 8.0
    diffs = x[:, None, :] - x[None, :, :]
    d2 = (diffs * diffs).sum(axis=2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        _, cond = tsne.perplexity_calibrate(d2, perplexity)
    target = np.log2(perplexity)
    worst = 0.0
    for row in cond:
        p = row[row > 0]
        entropy = float(-(p * np.log2(p)).sum())
        worst = max(worst, abs(entropy - target) / target)
    assert worst <= 1e-4

    coords, history = tsne.tsne_run(
        x, tsne.TsneConfig(perplexity=perplexity, iterations=400, seed=0)
    )
    # KL is non-negative up to accumulation error in the sum
    assert min(history) >= -1e-12
    assert hulls_disjoint(convex_hull(coords[:30]), convex_hull(coords[30:]))
    return f"entropy rel {worst:.1e}, min KL {min(history):.3f}"


@criterion(10, "fixed seeds reproduce every artifact bit for bit")
def test_criterion_10_determinism():
    train_corpus, val_corpus = random_corpora(n=6, length=10, seed=2)
    config = sae.TrainConfig(batch_size=3, max_iterations=40, eval_every=20, seed=5)

    runs = []
    for _ in range(2):
        result = sae.train(train_corpus, val_corpus, config, num_layers=2, units=8)
        with tempfile.TemporaryDirectory() as tmp:
            path = tmp + "/model.ckpt"
            sae.save_checkpoint(result.model, path)
            with open(path, "rb") as fh:
                blob = fh.read()
        runs.append((result, blob))
    assert runs[0][1] == runs[1][1]

    matrix = np.random.default_rng(3).normal(size=(5, 10))
    first = sae.embed_many(runs[0][0].model, matrix)
    again = sae.embed_many(runs[1][0].model, matrix)
    assert np.array_equal(first, again)
    assert np.array_equal(first, sae.embed_many(runs[0][0].model, matrix))

    y = np.repeat([0, 1, 2], 8)
    assert np.array_equal(
        svm.stratified_folds(y, 4, seed=9), svm.stratified_folds(y, 4, seed=9)
    )

    points = np.random.default_rng(6).normal(size=(20, 3))
    cfg = tsne.TsneConfig(perplexity=5.0, iterations=60, seed=1)
    coords_a, hist_a = tsne.tsne_run(points, cfg)
    coords_b, hist_b = tsne.tsne_run(points, cfg)
    assert np.array_equal(coords_a, coords_b)
    assert hist_a == hist_b

    first_ds = dataio.make_synthetic(2, 4, 12, 0.05, 3)
    second_ds = dataio.make_synthetic(2, 4, 12, 0.05, 3)
    for s1, s2 in zip(first_ds.train + first_ds.test, second_ds.train + second_ds.test):
        assert np.array_equal(s1.values, s2.values)
        assert s1.label == s2.label
    return "checkpoints, embeddings, folds, t-SNE, generators"
