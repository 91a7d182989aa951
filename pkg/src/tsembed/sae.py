"""Sequence autoencoder: joint encoder/decoder training and embedding extraction.

The encoder runs a GRU stack over a series; its final hidden states (one
vector per layer) are the fixed-dimensional embedding, of dimension equal to
the sum of the layer widths. The decoder is a stack of identical sizes whose
initial state is the encoder's final state copied layer by layer; it receives
a zero scalar as external input at every step and a linear output head maps
its top-layer state to one reconstructed value per step. Training minimizes
the summed squared reconstruction error against the input series in reversed
order, by backpropagation through time and Adam.
"""

from __future__ import annotations

import copy
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .dataio import Corpus, TimeSeries
from .rnn import (
    GruLayerParams,
    HiddenState,
    LayerGrads,
    forward_batch,
    init_layer,
    stack_backward,
)

CHECKPOINT_MAGIC = b"TSEMBSAE"
CHECKPOINT_VERSION = 1


@dataclass
class SaeModel:
    encoder: list[GruLayerParams]
    decoder: list[GruLayerParams]
    head_weight: np.ndarray  # [units of top layer]
    head_bias: np.ndarray  # scalar, kept as shape-() array

    def __post_init__(self):
        if len(self.encoder) != len(self.decoder):
            raise ValueError("encoder and decoder must have the same depth")
        for l, (e, d) in enumerate(zip(self.encoder, self.decoder)):
            if e.units != d.units or e.input_dim != d.input_dim:
                raise ValueError(f"layer {l + 1}: encoder/decoder sizes differ")
        self.head_weight = np.asarray(self.head_weight, dtype=np.float64)
        self.head_bias = np.asarray(self.head_bias, dtype=np.float64).reshape(())
        if self.head_weight.shape != (self.encoder[-1].units,):
            raise ValueError("output head width must match the top layer")

    @property
    def num_layers(self) -> int:
        return len(self.encoder)

    @property
    def units(self) -> list[int]:
        return [l.units for l in self.encoder]

    @property
    def embedding_dim(self) -> int:
        return sum(self.units)

    def copy(self) -> "SaeModel":
        return SaeModel(
            encoder=[l.copy() for l in self.encoder],
            decoder=[l.copy() for l in self.decoder],
            head_weight=self.head_weight.copy(),
            head_bias=self.head_bias.copy(),
        )


@dataclass
class TrainConfig:
    learning_rate: float = 0.006
    batch_size: int = 32
    dropout_rate: float = 0.4
    max_iterations: int = 1000
    eval_every: int = 100
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    clip_norm: float = 10.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")


def init_sae(num_layers: int, units, seed: int = 0) -> SaeModel:
    """Build a fresh model; `units` is an int applied to every layer or a list."""
    if num_layers < 1:
        raise ValueError("need at least one layer")
    sizes = [units] * num_layers if isinstance(units, int) else list(units)
    if len(sizes) != num_layers:
        raise ValueError("units list does not match layer count")
    rng = np.random.default_rng(seed)
    encoder, decoder = [], []
    dim = 1
    for c in sizes:
        encoder.append(init_layer(dim, c, rng))
        dim = c
    dim = 1
    for c in sizes:
        decoder.append(init_layer(dim, c, rng))
        dim = c
    bound = np.sqrt(6.0 / (sizes[-1] + 1))
    head_weight = rng.uniform(-bound, bound, size=sizes[-1])
    return SaeModel(encoder, decoder, head_weight, np.float64(0.0))


def param_arrays(model: SaeModel) -> list[np.ndarray]:
    """All trainable tensors in a stable order (shared by grads and Adam state)."""
    out = []
    for layer in model.encoder + model.decoder:
        out.extend([layer.w_reset, layer.w_update, layer.w_propose])
    out.extend([model.head_weight, model.head_bias])
    return out


def _grad_arrays(enc_grads, dec_grads, d_head_w, d_head_b) -> list[np.ndarray]:
    out = []
    for g in enc_grads + dec_grads:
        out.extend([g.w_reset, g.w_update, g.w_propose])
    out.extend([d_head_w, d_head_b])
    return out


def _decode_batch(model, init, steps, train=False, dropout_rate=0.0, rng=None):
    batch = init[0].shape[0]
    zeros = np.zeros((batch, steps))
    trace = forward_batch(
        model.decoder, zeros, train=train, dropout_rate=dropout_rate, rng=rng, init=init
    )
    # outputs[b, t] = head . h_t^L + bias
    top = trace.states[-1][1:]  # [T, B, c]
    outputs = (top @ model.head_weight).T + float(model.head_bias)
    return outputs, trace


def decode(model: SaeModel, init: HiddenState, steps: int) -> np.ndarray:
    """Unroll the decoder for `steps` steps from the given initial state.

    The decoder's only inputs are the initial state and the step count; the
    per-step external input is a zero scalar. Inference mode, deterministic.
    """
    if steps <= 0:
        raise ValueError("steps must be positive")
    init = [np.asarray(h, dtype=np.float64) for h in init]
    single = init[0].ndim == 1
    if single:
        init = [h[None, :] for h in init]
    outputs, _ = _decode_batch(model, init, steps)
    return outputs[0] if single else outputs


def reconstruction_loss(recon: np.ndarray, target: TimeSeries) -> float:
    """Summed squared error of a reconstruction against the reversed target."""
    recon = np.asarray(recon, dtype=np.float64)
    values = np.asarray(getattr(target, "values", target), dtype=np.float64)
    if recon.shape != values.shape:
        raise ValueError("reconstruction and target lengths differ")
    diff = recon - values[..., ::-1]
    return float((diff * diff).sum())


def reconstruct(model: SaeModel, series) -> np.ndarray:
    """Encode then decode one series (inference mode); returns the output
    sequence, which approximates the series in reversed order."""
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    enc = forward_batch(model.encoder, values[None, :])
    outputs, _ = _decode_batch(model, enc.final_states(), values.size)
    return outputs[0]


def batch_forward(model, batch, train=False, dropout_rate=0.0, rng=None):
    """Forward a [B, T] batch through encoder and decoder.

    Returns (loss_sum, outputs, enc_trace, dec_trace). The loss is the summed
    squared error against the time-reversed inputs.
    """
    batch = np.asarray(batch, dtype=np.float64)
    enc_trace = forward_batch(
        model.encoder, batch, train=train, dropout_rate=dropout_rate, rng=rng
    )
    # The state handoff is a recurrent-state copy, so it is never dropped out.
    outputs, dec_trace = _decode_batch(
        model,
        enc_trace.final_states(),
        batch.shape[1],
        train=train,
        dropout_rate=dropout_rate,
        rng=rng,
    )
    diff = outputs - batch[:, ::-1]
    return float((diff * diff).sum()), outputs, enc_trace, dec_trace


def backward(model, batch, outputs, enc_trace, dec_trace) -> list[np.ndarray]:
    """Exact gradients of the batch loss for every parameter tensor.

    Gradient flows from the per-step output errors through the decoder, across
    the state handoff into the encoder's final states, and back through time.
    """
    batch = np.asarray(batch, dtype=np.float64)
    d_out = 2.0 * (outputs - batch[:, ::-1])  # [B, T]
    top = dec_trace.states[-1][1:]  # [T, B, c]
    d_top = d_out.T[:, :, None] * model.head_weight[None, None, :]
    d_head_w = np.einsum("tbc,bt->c", top, d_out)
    d_head_b = np.asarray(d_out.sum())
    dec_grads, d_handoff = stack_backward(model.decoder, dec_trace, d_top=d_top)
    enc_grads, _ = stack_backward(model.encoder, enc_trace, d_final=d_handoff)
    return _grad_arrays(enc_grads, dec_grads, d_head_w, d_head_b)


def clip_gradients(grads: list[np.ndarray], max_norm: float) -> float:
    """Scale gradients in place so their global norm is at most max_norm."""
    total = np.sqrt(sum(float((g * g).sum()) for g in grads))
    if max_norm > 0 and total > max_norm:
        scale = max_norm / total
        for g in grads:
            g *= scale
    return total


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    config: TrainConfig,
) -> list[np.ndarray]:
    """One Adam update (in place) with bias-corrected moment estimates."""
    state.step += 1
    t = state.step
    b1, b2 = config.beta1, config.beta2
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        p -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return params


def _length_buckets(series_list: list[TimeSeries]) -> dict[int, np.ndarray]:
    buckets: dict[int, list[np.ndarray]] = {}
    for s in series_list:
        buckets.setdefault(len(s), []).append(s.values)
    return {length: np.stack(rows) for length, rows in buckets.items()}


def corpus_loss(model: SaeModel, corpus_or_series) -> float:
    """Mean per-point reconstruction loss over a corpus (inference mode)."""
    series = (
        corpus_or_series.all_series()
        if isinstance(corpus_or_series, Corpus)
        else list(corpus_or_series)
    )
    if not series:
        raise ValueError("empty corpus")
    total, points = 0.0, 0
    for length, matrix in sorted(_length_buckets(series).items()):
        loss, _, _, _ = batch_forward(model, matrix)
        total += loss
        points += matrix.size
    return total / points


@dataclass
class TrainResult:
    model: SaeModel
    history: list[dict]  # iteration, train_loss_per_point, val_loss_per_point
    iteration_losses: list[float] = field(default_factory=list)


def train(
    train_corpus: Corpus,
    val_corpus: Corpus,
    config: TrainConfig,
    num_layers: int = 3,
    units=60,
) -> TrainResult:
    """Train an autoencoder on the corpus and return the checkpoint with the
    lowest validation reconstruction error per point.

    Batches are drawn uniformly over all series of all training datasets;
    series are grouped by exact length so each batch is a dense matrix.
    """
    series = train_corpus.all_series()
    if not series:
        raise ValueError("empty training corpus")
    if not val_corpus.all_series():
        raise ValueError("empty validation corpus")

    rng = np.random.default_rng(config.seed)
    model = init_sae(num_layers, units, seed=config.seed)
    params = param_arrays(model)
    adam = AdamState.for_params(params)

    buckets = [m for _, m in sorted(_length_buckets(series).items())]
    counts = np.array([m.shape[0] for m in buckets], dtype=np.float64)
    weights = counts / counts.sum()

    history: list[dict] = []
    iteration_losses: list[float] = []
    best_val = np.inf
    best_model = model.copy()
    window: list[float] = []

    for iteration in range(1, config.max_iterations + 1):
        bucket = buckets[rng.choice(len(buckets), p=weights)]
        n = min(config.batch_size, bucket.shape[0])
        batch = bucket[rng.choice(bucket.shape[0], size=n, replace=False)]
        loss, outputs, enc_trace, dec_trace = batch_forward(
            model, batch, train=True, dropout_rate=config.dropout_rate, rng=rng
        )
        grads = backward(model, batch, outputs, enc_trace, dec_trace)
        clip_gradients(grads, config.clip_norm)
        adam_step(params, grads, adam, config)

        per_point = loss / batch.size
        iteration_losses.append(per_point)
        window.append(per_point)

        if iteration % config.eval_every == 0 or iteration == config.max_iterations:
            val_loss = corpus_loss(model, val_corpus)
            history.append(
                {
                    "iteration": iteration,
                    "train_loss_per_point": float(np.mean(window)),
                    "val_loss_per_point": val_loss,
                }
            )
            window = []
            if val_loss < best_val:
                best_val = val_loss
                best_model = model.copy()

    return TrainResult(model=best_model, history=history, iteration_losses=iteration_losses)


def write_history_csv(history: list[dict], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("iteration,train_loss_per_point,val_loss_per_point\n")
        for row in history:
            fh.write(
                f"{row['iteration']},{row['train_loss_per_point']!r},"
                f"{row['val_loss_per_point']!r}\n"
            )


def embed(model: SaeModel, series, selector="all") -> np.ndarray:
    """Fixed-dimensional embedding of one series from the frozen encoder.

    The input is expected to be z-normalized. selector="all" concatenates the
    final hidden states of every layer; an integer i in 1..L selects the final
    state of layer i only.
    """
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    return embed_many(model, values[None, :], selector)[0]


def embed_many(model: SaeModel, series_or_matrix, selector="all") -> np.ndarray:
    """Embed many equal-length series at once; returns [N, dim]."""
    if isinstance(series_or_matrix, np.ndarray):
        matrix = np.asarray(series_or_matrix, dtype=np.float64)
    else:
        matrix = np.stack([np.asarray(s.values, dtype=np.float64) for s in series_or_matrix])
    trace = forward_batch(model.encoder, matrix)
    finals = trace.final_states()
    if selector == "all":
        return np.concatenate(finals, axis=1)
    layer = int(selector)
    if not 1 <= layer <= model.num_layers:
        raise ValueError(f"layer selector {layer} out of range 1..{model.num_layers}")
    return finals[layer - 1]


def _checkpoint_entries(model: SaeModel):
    entries = []
    for prefix, layers in (("enc", model.encoder), ("dec", model.decoder)):
        for idx, layer in enumerate(layers):
            entries.append((f"{prefix}{idx}.reset", layer.w_reset))
            entries.append((f"{prefix}{idx}.update", layer.w_update))
            entries.append((f"{prefix}{idx}.propose", layer.w_propose))
    entries.append(("head.weight", model.head_weight))
    entries.append(("head.bias", model.head_bias.reshape(1)))
    return entries


def save_checkpoint(model: SaeModel, path: str) -> None:
    """Write a self-describing checkpoint: architecture header plus row-major
    64-bit float tensors. Round-trips bit for bit."""
    entries = _checkpoint_entries(model)
    header = {
        "format": CHECKPOINT_VERSION,
        "kind": "gru-sae",
        "layers": model.num_layers,
        "units": model.units,
        "arrays": [[name, list(arr.shape)] for name, arr in entries],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        for _, arr in entries:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path: str) -> SaeModel:
    """Load a checkpoint, refusing truncated files and format mismatches."""
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        packed = fh.read(8)
        if len(packed) != 8:
            raise ValueError(f"{path}: truncated header")
        version, header_len = struct.unpack("<II", packed)
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        blob = fh.read(header_len)
        if len(blob) != header_len:
            raise ValueError(f"{path}: truncated header")
        header = json.loads(blob)
        arrays = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape))
            raw = fh.read(count * 8)
            if len(raw) != count * 8:
                raise ValueError(f"{path}: truncated tensor {name}")
            arrays[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after tensors")

    layers = header["layers"]
    units = header["units"]
    try:
        encoder = [
            GruLayerParams(
                arrays[f"enc{l}.reset"], arrays[f"enc{l}.update"], arrays[f"enc{l}.propose"]
            )
            for l in range(layers)
        ]
        decoder = [
            GruLayerParams(
                arrays[f"dec{l}.reset"], arrays[f"dec{l}.update"], arrays[f"dec{l}.propose"]
            )
            for l in range(layers)
        ]
        model = SaeModel(
            encoder, decoder, arrays["head.weight"], arrays["head.bias"].reshape(())
        )
    except KeyError as exc:
        raise ValueError(f"{path}: checkpoint is missing tensor {exc}")
    if model.units != units:
        raise ValueError(f"{path}: architecture header disagrees with tensors")
    return model
