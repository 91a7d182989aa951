"""GRU layers and multilayer recurrence.

A layer holds three gate weight matrices of shape [units, input_dim + units]
acting on the concatenation of the (optionally dropped-out) layer input and
the previous hidden state. There are no bias terms. Dropout applies to the
non-recurrent input only, with inverted scaling so inference needs no
rescaling; in training mode a fresh mask is sampled per time step.

The forward pass records a full trace (gates, proposed states, masked inputs)
so gradients can be backpropagated through time with `stack_backward`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Hidden state of a stack: one vector (or [batch, units] matrix) per layer.
HiddenState = list[np.ndarray]


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class GruLayerParams:
    """Gate weights of one layer: reset, update, and proposed-state matrices."""

    w_reset: np.ndarray
    w_update: np.ndarray
    w_propose: np.ndarray

    def __post_init__(self):
        shapes = {self.w_reset.shape, self.w_update.shape, self.w_propose.shape}
        if len(shapes) != 1:
            raise ValueError("gate matrices must share one shape")
        for w in (self.w_reset, self.w_update, self.w_propose):
            if not np.all(np.isfinite(w)):
                raise ValueError("gate weights must be finite")

    @property
    def units(self) -> int:
        return self.w_reset.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_reset.shape[1] - self.w_reset.shape[0]

    def copy(self) -> "GruLayerParams":
        return GruLayerParams(
            self.w_reset.copy(), self.w_update.copy(), self.w_propose.copy()
        )


@dataclass
class LayerGrads:
    """Gradient accumulators mirroring GruLayerParams."""

    w_reset: np.ndarray
    w_update: np.ndarray
    w_propose: np.ndarray


def init_layer(input_dim: int, units: int, rng: np.random.Generator) -> GruLayerParams:
    """Initialize gate weights uniformly in [-a, a], a = sqrt(6/(fan_in+fan_out))."""
    fan_in = input_dim + units
    bound = np.sqrt(6.0 / (fan_in + units))
    shape = (units, fan_in)
    return GruLayerParams(
        w_reset=rng.uniform(-bound, bound, size=shape),
        w_update=rng.uniform(-bound, bound, size=shape),
        w_propose=rng.uniform(-bound, bound, size=shape),
    )


def sample_mask(dim: int, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted-dropout mask: entries 0 with probability `rate`, else 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    if rate == 0.0:
        return np.ones(dim)
    return (rng.random(dim) >= rate) / (1.0 - rate)


def _mask_batch(shape: tuple[int, ...], rate: float, rng) -> np.ndarray:
    if rate == 0.0 or rng is None:
        return np.ones(shape)
    return (rng.random(shape) >= rate) / (1.0 - rate)


def _step(layer, h_prev, x_masked):
    """One batched transition; returns (h, r, u, h_tilde)."""
    z = np.concatenate([x_masked, h_prev], axis=1)
    r = sigmoid(z @ layer.w_reset.T)
    u = sigmoid(z @ layer.w_update.T)
    zp = np.concatenate([x_masked, r * h_prev], axis=1)
    h_tilde = np.tanh(zp @ layer.w_propose.T)
    h = (1.0 - u) * h_prev + u * h_tilde
    return h, r, u, h_tilde


def gru_step(
    layer: GruLayerParams,
    h_prev: np.ndarray,
    x: np.ndarray,
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Advance one layer by one step. The mask applies to x only, never to h_prev.

    Accepts single vectors ([input_dim], [units]) or batches ([B, input_dim],
    [B, units]) and returns the next hidden state with matching shape.
    """
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x, h_prev = x[None, :], h_prev[None, :]
    if x.shape[1] != layer.input_dim or h_prev.shape[1] != layer.units:
        raise ValueError(
            f"expected input dim {layer.input_dim} and state dim {layer.units}, "
            f"got {x.shape[1]} and {h_prev.shape[1]}"
        )
    x_masked = x if mask is None else x * mask
    h, _, _, _ = _step(layer, h_prev, x_masked)
    return h[0] if single else h


def _check_stack(layers: list[GruLayerParams]) -> None:
    if not layers:
        raise ValueError("need at least one layer")
    if layers[0].input_dim != 1:
        raise ValueError("first layer must take scalar input")
    for l in range(1, len(layers)):
        if layers[l].input_dim != layers[l - 1].units:
            raise ValueError(f"layer {l + 1} input dim does not match layer {l} units")


@dataclass
class StackTrace:
    """Everything the forward pass saw, retained for backpropagation.

    Time-major arrays: states[l] has shape [T+1, B, units_l] with the initial
    state at index 0; reset/update/proposed/masked/masks have shape [T, B, .].
    """

    inputs: np.ndarray
    states: list[np.ndarray]
    reset: list[np.ndarray]
    update: list[np.ndarray]
    proposed: list[np.ndarray]
    masked: list[np.ndarray]
    masks: list[np.ndarray]

    @property
    def steps(self) -> int:
        return self.inputs.shape[1]

    def final_states(self) -> HiddenState:
        return [s[-1] for s in self.states]


def forward_batch(
    layers: list[GruLayerParams],
    inputs: np.ndarray,
    train: bool = False,
    dropout_rate: float = 0.0,
    rng: np.random.Generator | None = None,
    init: HiddenState | None = None,
) -> StackTrace:
    """Run a batch of equal-length sequences through the stack.

    `inputs` is [B, T]. Initial hidden states default to zeros. In training
    mode a fresh dropout mask is sampled for every layer input at every step;
    in inference mode masks are identity.
    """
    _check_stack(layers)
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] < 1:
        raise ValueError("inputs must be [batch, steps] with steps >= 1")
    if train and dropout_rate > 0.0 and rng is None:
        raise ValueError("training with dropout needs a random generator")
    batch, steps = inputs.shape
    rate = dropout_rate if train else 0.0

    states = [np.empty((steps + 1, batch, l.units)) for l in layers]
    reset = [np.empty((steps, batch, l.units)) for l in layers]
    update = [np.empty((steps, batch, l.units)) for l in layers]
    proposed = [np.empty((steps, batch, l.units)) for l in layers]
    masked = [np.empty((steps, batch, l.input_dim)) for l in layers]
    masks = [np.empty((steps, batch, l.input_dim)) for l in layers]

    for l, layer in enumerate(layers):
        if init is None:
            states[l][0] = 0.0
        else:
            states[l][0] = np.asarray(init[l], dtype=np.float64)

    for t in range(steps):
        x = inputs[:, t][:, None]
        for l, layer in enumerate(layers):
            m = _mask_batch((batch, layer.input_dim), rate, rng if rate > 0 else None)
            xm = x * m
            h, r, u, h_tilde = _step(layer, states[l][t], xm)
            masks[l][t] = m
            masked[l][t] = xm
            reset[l][t] = r
            update[l][t] = u
            proposed[l][t] = h_tilde
            states[l][t + 1] = h
            x = h
    for l in range(len(layers)):
        if not np.all(np.isfinite(states[l][steps])):
            raise FloatingPointError(f"non-finite hidden state in layer {l + 1}")
    return StackTrace(
        inputs=inputs,
        states=states,
        reset=reset,
        update=update,
        proposed=proposed,
        masked=masked,
        masks=masks,
    )


def stack_forward(
    layers: list[GruLayerParams],
    series,
    mode: str = "infer",
    rng: np.random.Generator | None = None,
    dropout_rate: float = 0.0,
) -> tuple[HiddenState, StackTrace]:
    """Process one series through the stack from zero initial state.

    Returns the final hidden state of every layer together with the full
    trace. mode="train" samples fresh dropout masks per step; mode="infer"
    uses identity masks and is deterministic.
    """
    if mode not in ("train", "infer"):
        raise ValueError(f"unknown mode {mode!r}")
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty series")
    trace = forward_batch(
        layers,
        values[None, :],
        train=(mode == "train"),
        dropout_rate=dropout_rate,
        rng=rng,
    )
    final = [s[-1, 0] for s in trace.states]
    return final, trace


def zero_grads(layers: list[GruLayerParams]) -> list[LayerGrads]:
    return [
        LayerGrads(
            np.zeros_like(l.w_reset),
            np.zeros_like(l.w_update),
            np.zeros_like(l.w_propose),
        )
        for l in layers
    ]


def stack_backward(
    layers: list[GruLayerParams],
    trace: StackTrace,
    d_top: np.ndarray | None = None,
    d_final: HiddenState | None = None,
) -> tuple[list[LayerGrads], HiddenState]:
    """Backpropagate through the recorded forward pass.

    `d_top` carries per-step loss gradients on the top layer's states
    ([T, B, units_L]); `d_final` carries gradients on the final state of every
    layer. Returns parameter gradients and the gradient with respect to the
    initial hidden states (used to route gradient across an encoder/decoder
    state handoff).
    """
    n_layers = len(layers)
    steps = trace.steps
    batch = trace.inputs.shape[0]
    grads = zero_grads(layers)

    # carry[l]: gradient flowing into h_t^l through the recurrence.
    if d_final is not None:
        carry = [np.array(d_final[l], dtype=np.float64, copy=True) for l in range(n_layers)]
    else:
        carry = [np.zeros((batch, l.units)) for l in layers]

    for t in range(steps - 1, -1, -1):
        from_above = None
        for l in range(n_layers - 1, -1, -1):
            layer = layers[l]
            d = layer.input_dim
            delta = carry[l].copy()
            if from_above is not None:
                delta += from_above
            if l == n_layers - 1 and d_top is not None:
                delta += d_top[t]

            h_prev = trace.states[l][t]
            r = trace.reset[l][t]
            u = trace.update[l][t]
            h_tilde = trace.proposed[l][t]
            xm = trace.masked[l][t]

            da_u = delta * (h_tilde - h_prev) * u * (1.0 - u)
            da_p = delta * u * (1.0 - h_tilde * h_tilde)
            g = da_p @ layer.w_propose[:, d:]
            da_r = g * h_prev * r * (1.0 - r)

            carry[l] = (
                delta * (1.0 - u)
                + g * r
                + da_u @ layer.w_update[:, d:]
                + da_r @ layer.w_reset[:, d:]
            )

            z = np.concatenate([xm, h_prev], axis=1)
            zp = np.concatenate([xm, r * h_prev], axis=1)
            grads[l].w_reset += da_r.T @ z
            grads[l].w_update += da_u.T @ z
            grads[l].w_propose += da_p.T @ zp

            if l > 0:
                dx = da_r @ layer.w_reset[:, :d] + da_u @ layer.w_update[:, :d]
                dx += da_p @ layer.w_propose[:, :d]
                from_above = dx * trace.masks[l][t]
            else:
                from_above = None
    return grads, carry
