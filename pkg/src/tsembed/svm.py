"""RBF-kernel SVM trained by sequential minimal optimization.

Multiclass problems are reduced one-vs-one with majority voting, and
hyperparameters (C, gamma) are picked by stratified k-fold cross-validation
over a logarithmic grid. The SMO solver works on the standard dual

    min_a  1/2 a'Qa - sum(a)   s.t. 0 <= a_i <= C,  sum(y_i a_i) = 0

with Q_ij = y_i y_j K(x_i, x_j), selecting the maximal KKT-violating pair
each iteration and stopping when the violation gap falls below tol.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np


def rbf_kernel(x, y, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2) for two equal-dimension vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    d = x - y
    return float(np.exp(-gamma * (d * d).sum()))


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # ||a_i - b_j||^2 via the expansion; clip tiny negatives from cancellation
    aa = (a * a).sum(axis=1)[:, None]
    bb = (b * b).sum(axis=1)[None, :]
    return np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0)


def rbf_kernel_matrix(a, b, gamma: float) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return np.exp(-gamma * _sq_dists(a, b))


def _smo_solve(kernel: np.ndarray, y: np.ndarray, c: float, tol: float, max_iter: int):
    """Solve the binary dual on a precomputed kernel matrix.

    Returns (alpha, bias, iterations, gap). Gradient bookkeeping is kept in
    p_k = sum_l alpha_l y_l K_kl, so the violation score of point k is
    y_k - p_k; optimality is max_up(score) - min_low(score) <= tol.
    """
    n = y.size
    alpha = np.zeros(n)
    p = np.zeros(n)
    eps = 1e-12
    m = ms = 0.0
    for it in range(max_iter):
        at_top = alpha >= c - eps
        at_zero = alpha <= eps
        up = np.where(y > 0, ~at_top, ~at_zero)
        low = np.where(y > 0, ~at_zero, ~at_top)
        score = y - p
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        m, ms = float(score[i]), float(score[j])
        if m - ms <= tol:
            return alpha, (m + ms) / 2.0, it, m - ms
        eta = kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j]
        t = (m - ms) / max(eta, eps)
        cap_i = c - alpha[i] if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else c - alpha[j]
        t = min(t, cap_i, cap_j)
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        p += t * (kernel[:, i] - kernel[:, j])
    warnings.warn(f"SMO hit the iteration cap ({max_iter}); gap {m - ms:.3g}")
    return alpha, (m + ms) / 2.0, max_iter, m - ms


def dual_objective(kernel: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """1/2 a'Qa - sum(a), the quantity SMO minimizes."""
    q = (y[:, None] * y[None, :]) * kernel
    return float(0.5 * alpha @ (q @ alpha) - alpha.sum())


@dataclass
class BinarySvm:
    support_vectors: np.ndarray  # [n_sv, dim]
    dual_coefs: np.ndarray  # alpha >= 0, one per SV
    sv_labels: np.ndarray  # +-1, one per SV
    bias: float
    gamma: float
    c: float

    def decision_function(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if self.support_vectors.size == 0:
            return np.full(x.shape[0], self.bias)
        k = rbf_kernel_matrix(x, self.support_vectors, self.gamma)
        return k @ (self.dual_coefs * self.sv_labels) + self.bias


def smo_train(
    x, y, c: float, gamma: float, tol: float = 1e-3, max_iter: int = 100_000
) -> BinarySvm:
    """Train a binary RBF SVM; y must contain both +1 and -1."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise ValueError("labels must contain both +1 and -1")
    if c <= 0:
        raise ValueError("C must be positive")
    kernel = rbf_kernel_matrix(x, x, gamma)
    alpha, bias, _, _ = _smo_solve(kernel, y, c, tol, max_iter)
    mask = alpha > 1e-12
    return BinarySvm(
        support_vectors=x[mask].copy(),
        dual_coefs=alpha[mask].copy(),
        sv_labels=y[mask].copy(),
        bias=bias,
        gamma=gamma,
        c=c,
    )


@dataclass
class SvmModel:
    models: list[BinarySvm]
    pairs: list[tuple[int, int]]  # class ids; first maps to +1
    classes: np.ndarray
    c: float
    gamma: float

    @property
    def num_classes(self) -> int:
        return self.classes.size


def _class_pairs(classes):
    return [(int(a), int(b)) for i, a in enumerate(classes) for b in classes[i + 1 :]]


def ovo_train(x, y, c: float, gamma: float, tol: float = 1e-3) -> SvmModel:
    """One binary model per class pair; the smaller class id plays +1."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("need at least 2 classes")
    models = []
    pairs = _class_pairs(classes)
    for a, b in pairs:
        sub = (y == a) | (y == b)
        signs = np.where(y[sub] == a, 1.0, -1.0)
        models.append(smo_train(x[sub], signs, c, gamma, tol))
    return SvmModel(models=models, pairs=pairs, classes=classes, c=c, gamma=gamma)


def ovo_predict(model: SvmModel, x) -> np.ndarray:
    """Majority vote over all pairs; ties go to the lowest class id."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    index = {int(cls): k for k, cls in enumerate(model.classes)}
    votes = np.zeros((x.shape[0], model.num_classes), dtype=np.int64)
    for (a, b), binary in zip(model.pairs, model.models):
        scores = binary.decision_function(x)
        votes[scores >= 0, index[a]] += 1
        votes[scores < 0, index[b]] += 1
    winners = model.classes[np.argmax(votes, axis=1)]
    return winners[0] if single else winners


def evaluate(model: SvmModel, x, y) -> float:
    """Fraction of misclassified instances, in [0, 1]."""
    predictions = ovo_predict(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))
    return float(np.mean(predictions != np.asarray(y)))


def stratified_folds(y, folds: int, seed: int) -> np.ndarray:
    """Deterministic fold id per instance; each class is shuffled by the
    seeded generator and dealt round-robin so folds stay class-balanced."""
    y = np.asarray(y)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    assign = np.full(y.size, -1, dtype=np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        assign[idx] = np.arange(idx.size) % folds
    return assign


@dataclass
class GridSearchResult:
    best_c: float
    best_gamma: float
    cv_error_table: dict  # (C, gamma) -> mean fold error
    folds: int
    seed: int
    fold_assign: np.ndarray = field(repr=False)


@dataclass
class _KernelBinary:
    idx: np.ndarray  # absolute indices of SVs into the full kernel
    coef: np.ndarray  # alpha * y per SV
    bias: float


def _ovo_train_kernel(kernel, y, tr_idx, classes, c, tol, max_iter=100_000):
    models = []
    for a, b in _class_pairs(classes):
        sub = tr_idx[(y[tr_idx] == a) | (y[tr_idx] == b)]
        signs = np.where(y[sub] == a, 1.0, -1.0)
        alpha, bias, _, _ = _smo_solve(
            kernel[np.ix_(sub, sub)], signs, c, tol, max_iter
        )
        mask = alpha > 1e-12
        models.append(_KernelBinary(sub[mask], (alpha * signs)[mask], bias))
    return models


def _ovo_predict_kernel(kernel, models, te_idx, classes):
    votes = np.zeros((te_idx.size, classes.size), dtype=np.int64)
    index = {int(cls): k for k, cls in enumerate(classes)}
    for (a, b), binary in zip(_class_pairs(classes), models):
        scores = kernel[np.ix_(te_idx, binary.idx)] @ binary.coef + binary.bias
        votes[scores >= 0, index[a]] += 1
        votes[scores < 0, index[b]] += 1
    return classes[np.argmax(votes, axis=1)]


DEFAULT_GRID = tuple(float(v) for v in np.logspace(-3, 3, 7))


def grid_search_cv(
    x,
    y,
    folds: int = 5,
    seed: int = 0,
    c_grid=DEFAULT_GRID,
    gamma_grid=DEFAULT_GRID,
    tol: float = 1e-3,
) -> GridSearchResult:
    """Mean k-fold error for every (C, gamma) cell; argmin ties prefer the
    smaller C, then the smaller gamma."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise ValueError("need at least 2 classes")
    smallest = int(counts.min())
    if smallest < 2:
        raise ValueError("every class needs at least 2 instances")
    eff_folds = folds
    if smallest < folds:
        eff_folds = max(2, smallest)
        warnings.warn(
            f"smallest class has {smallest} instances; reducing folds "
            f"{folds} -> {eff_folds}"
        )
    assign = stratified_folds(y, eff_folds, seed)
    d2 = _sq_dists(x, x)
    table: dict = {}
    for gamma in gamma_grid:
        kernel = np.exp(-float(gamma) * d2)
        for c in c_grid:
            errors = []
            for f in range(eff_folds):
                te_idx = np.flatnonzero(assign == f)
                tr_idx = np.flatnonzero(assign != f)
                models = _ovo_train_kernel(kernel, y, tr_idx, classes, float(c), tol)
                pred = _ovo_predict_kernel(kernel, models, te_idx, classes)
                errors.append(float(np.mean(pred != y[te_idx])))
            table[(float(c), float(gamma))] = float(np.mean(errors))
    best_c, best_gamma = min(table, key=lambda k: (table[k], k[0], k[1]))
    return GridSearchResult(
        best_c=best_c,
        best_gamma=best_gamma,
        cv_error_table=table,
        folds=eff_folds,
        seed=seed,
        fold_assign=assign,
    )


def save_svm(model: SvmModel, path: str) -> None:
    """JSON container; floats use shortest round-trip notation, so a reload
    reproduces the model exactly."""
    doc = {
        "kind": "rbf-ovo-svm",
        "classes": [int(c) for c in model.classes],
        "c": model.c,
        "gamma": model.gamma,
        "pairs": [list(p) for p in model.pairs],
        "models": [
            {
                "support_vectors": m.support_vectors.tolist(),
                "dual_coefs": m.dual_coefs.tolist(),
                "sv_labels": m.sv_labels.tolist(),
                "bias": m.bias,
            }
            for m in model.models
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_svm(path: str) -> SvmModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "rbf-ovo-svm":
        raise ValueError(f"{path}: not an SVM model file")
    dim = None
    models = []
    for m in doc["models"]:
        sv = np.asarray(m["support_vectors"], dtype=np.float64)
        if sv.size == 0:
            sv = sv.reshape(0, dim if dim else 0)
        dim = sv.shape[1] if sv.ndim == 2 else dim
        models.append(
            BinarySvm(
                support_vectors=sv,
                dual_coefs=np.asarray(m["dual_coefs"], dtype=np.float64),
                sv_labels=np.asarray(m["sv_labels"], dtype=np.float64),
                bias=float(m["bias"]),
                gamma=float(doc["gamma"]),
                c=float(doc["c"]),
            )
        )
    return SvmModel(
        models=models,
        pairs=[tuple(p) for p in doc["pairs"]],
        classes=np.asarray(doc["classes"]),
        c=float(doc["c"]),
        gamma=float(doc["gamma"]),
    )
