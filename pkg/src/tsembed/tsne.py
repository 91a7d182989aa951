"""Exact O(N^2) t-SNE with perplexity calibration and SVG/CSV export.

Pairwise affinities in the input space use per-point Gaussian bandwidths
found by bisection so every row's perplexity (2 to the Shannon entropy)
matches the requested value. The 2-D map minimizes KL(P||Q) with a
Student-t low-dimensional kernel by momentum gradient descent with the
standard early-exaggeration phase and per-coordinate gain adaptation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    seed: int = 0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch: int = 250
    exaggeration: float = 12.0
    exaggeration_until: int = 250

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.perplexity <= 1:
            raise ValueError("perplexity must exceed 1")


def _pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    ss = (x * x).sum(axis=1)
    d2 = np.maximum(ss[:, None] + ss[None, :] - 2.0 * (x @ x.T), 0.0)
    np.fill_diagonal(d2, 0.0)
    return d2


def _row_affinities(d_row: np.ndarray, beta: float) -> np.ndarray:
    # shift by the min distance; cancels in the ratio, avoids underflow
    w = np.exp(-beta * (d_row - d_row.min()))
    return w / w.sum()


def _row_perplexity(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(2.0 ** -(nz * np.log2(nz)).sum())


def perplexity_calibrate(d2: np.ndarray, perplexity: float, max_steps: int = 100):
    """Per-row Gaussian bandwidths and conditional affinities.

    Bisection runs until the row perplexity is within 1e-5 relative of the
    target; a row that cannot converge falls back to uniform with a warning.
    Returns (betas, conditional) where conditional[i, j] = p_{j|i} and the
    diagonal is zero.
    """
    d2 = np.asarray(d2, dtype=np.float64)
    n = d2.shape[0]
    if n < 3:
        raise ValueError("need at least 3 points")
    if not (1.0 < perplexity < n):
        raise ValueError(f"perplexity must lie in (1, {n})")
    if np.abs(np.diagonal(d2)).max() > 0:
        raise ValueError("distance matrix must have a zero diagonal")

    betas = np.ones(n)
    cond = np.zeros((n, n))
    others = np.arange(n)
    for i in range(n):
        d_row = d2[i, others != i]
        beta, lo, hi = 1.0, 0.0, np.inf
        p = None
        for _ in range(max_steps):
            p = _row_affinities(d_row, beta)
            gap = _row_perplexity(p) - perplexity
            if abs(gap) <= 1e-5 * perplexity:
                break
            if gap > 0:  # entropy too high: sharpen
                lo = beta
                beta = beta * 2.0 if hi == np.inf else 0.5 * (beta + hi)
            else:
                hi = beta
                beta = 0.5 * (lo + beta)
        else:
            warnings.warn(f"perplexity search did not converge on row {i}; using uniform")
            p = np.full(n - 1, 1.0 / (n - 1))
            beta = np.nan
        betas[i] = beta
        cond[i, others != i] = p
    return betas, cond


def joint_affinities(conditional: np.ndarray) -> np.ndarray:
    """Symmetrize conditionals into a joint distribution summing to 1."""
    n = conditional.shape[0]
    return (conditional + conditional.T) / (2.0 * n)


def _q_distribution(y: np.ndarray):
    w = 1.0 / (1.0 + _pairwise_sq_dists(y))
    np.fill_diagonal(w, 0.0)
    return w / w.sum(), w


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float((p[mask] * (np.log(p[mask]) - np.log(np.maximum(q[mask], 1e-12)))).sum())


def tsne_run(x, cfg: TsneConfig):
    """Full descent; returns (coords, kl_history) with one KL value per
    iteration, always measured against the unexaggerated affinities."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3:
        raise ValueError("need at least 3 points")
    n = x.shape[0]
    _, cond = perplexity_calibrate(_pairwise_sq_dists(x), cfg.perplexity)
    p_true = joint_affinities(cond)

    rng = np.random.default_rng(cfg.seed)
    y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    history = []
    for it in range(cfg.iterations):
        p = p_true * cfg.exaggeration if it < cfg.exaggeration_until else p_true
        q, w = _q_distribution(y)
        pq = (p - q) * w
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)

        same_sign = np.sign(grad) == np.sign(update)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        momentum = (
            cfg.momentum_early if it < cfg.momentum_switch else cfg.momentum_late
        )
        update = momentum * update - cfg.learning_rate * gains * grad
        y = y + update
        y = y - y.mean(axis=0)

        q_true, _ = _q_distribution(y)
        history.append(kl_divergence(p_true, q_true))
    return y, history


def tsne_embed(x, cfg: TsneConfig | None = None) -> np.ndarray:
    """2-D coordinates for a set of embedding vectors."""
    coords, _ = tsne_run(x, cfg if cfg is not None else TsneConfig())
    return coords


_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def emit_scatter(coords, labels, path: str):
    """Write coords+labels as CSV and an SVG scatter with a legend.

    `path` may carry a .svg or .csv suffix or none; both files are written
    next to each other with the same stem. Returns (csv_path, svg_path).
    """
    coords = np.asarray(coords, dtype=np.float64)
    labels = list(labels)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise ValueError("coords must be [n, 2]")
    if len(labels) != coords.shape[0]:
        raise ValueError("labels and coords disagree in length")
    stem = path
    for suffix in (".svg", ".csv"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    csv_path, svg_path = stem + ".csv", stem + ".svg"

    with open(csv_path, "w") as fh:
        fh.write("x,y,label\n")
        for (cx, cy), lab in zip(coords, labels):
            fh.write(f"{float(cx)!r},{float(cy)!r},{lab}\n")

    unique = sorted(set(labels), key=lambda v: (str(type(v)), v))
    color = {lab: _PALETTE[i % len(_PALETTE)] for i, lab in enumerate(unique)}
    width, height, margin = 640, 480, 40
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = np.where(hi - lo < 1e-12, 1.0, hi - lo)

    def sx(v):
        return margin + (v - lo[0]) / span[0] * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - lo[1]) / span[1] * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for (cx, cy), lab in zip(coords, labels):
        parts.append(
            f'<circle cx="{sx(cx):.2f}" cy="{sy(cy):.2f}" r="3" '
            f'fill="{color[lab]}" fill-opacity="0.7"/>'
        )
    for i, lab in enumerate(unique):
        ly = margin + 18 * i
        parts.append(f'<circle cx="{width - 130}" cy="{ly}" r="5" fill="{color[lab]}"/>')
        parts.append(
            f'<text x="{width - 118}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="12">{lab}</text>'
        )
    parts.append("</svg>")
    with open(svg_path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return csv_path, svg_path
