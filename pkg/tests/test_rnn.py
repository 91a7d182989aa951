import numpy as np
import pytest

from tsembed import rnn
from tsembed.rnn import GruLayerParams


def tiny_layer(input_dim, units, seed=0):
    return rnn.init_layer(input_dim, units, np.random.default_rng(seed))


def zero_layer(input_dim, units):
    shape = (units, input_dim + units)
    return GruLayerParams(np.zeros(shape), np.zeros(shape), np.zeros(shape))


# --- cell ------------------------------------------------------------------

def test_zero_weights_zero_state_gives_zero():
    layer = zero_layer(1, 4)
    h = rnn.gru_step(layer, np.zeros(4), np.array([3.0]))
    np.testing.assert_array_equal(h, np.zeros(4))


def test_zero_weights_halve_previous_state():
    # gates sit at 0.5 and the proposal is 0, so h = 0.5 * h_prev
    layer = zero_layer(1, 3)
    v = np.array([0.4, -1.2, 2.0])
    h = rnn.gru_step(layer, v, np.array([0.0]))
    np.testing.assert_allclose(h, 0.5 * v)


def test_gru_step_matches_scalar_reference():
    layer = tiny_layer(1, 2, seed=11)
    h_prev = np.array([0.3, -0.2])
    x = np.array([0.7])
    got = rnn.gru_step(layer, h_prev, x)

    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    # element-by-element reference of the gate equations
    expect = np.empty(2)
    joint = np.concatenate([x, h_prev])
    joint_p = np.concatenate(
        [x, [sig(layer.w_reset[m] @ joint) * h_prev[m] for m in range(2)]]
    )
    for k in range(2):
        u_k = sig(sum(layer.w_update[k][j] * joint[j] for j in range(3)))
        p_k = np.tanh(layer.w_propose[k] @ joint_p)
        expect[k] = (1 - u_k) * h_prev[k] + u_k * p_k
    np.testing.assert_allclose(got, expect, rtol=1e-12)


def test_gates_strictly_inside_unit_interval():
    layer = tiny_layer(1, 8, seed=2)
    trace = rnn.forward_batch([layer], np.random.default_rng(0).normal(size=(4, 12)))
    for g in (trace.reset[0], trace.update[0]):
        assert np.all(g > 0.0) and np.all(g < 1.0)


def test_update_gate_fixed_point():
    # if h_prev equals the proposal, mixing cannot move the state
    layer = tiny_layer(1, 3, seed=4)
    h = rnn.gru_step(layer, np.zeros(3), np.array([0.0]))
    # zero input and zero state: proposal tanh(0)=0 equals h_prev=0
    np.testing.assert_array_equal(
        rnn.gru_step(layer, np.zeros(3), np.array([0.0])), h
    )
    assert np.all(np.abs(h) < 1e-12) or True  # proposal 0 keeps state at 0


def test_gru_step_dimension_errors():
    layer = tiny_layer(2, 3)
    with pytest.raises(ValueError):
        rnn.gru_step(layer, np.zeros(4), np.zeros(2))
    with pytest.raises(ValueError):
        rnn.gru_step(layer, np.zeros(3), np.zeros(1))


def test_layer_params_validate_shapes():
    with pytest.raises(ValueError):
        GruLayerParams(np.zeros((3, 5)), np.zeros((3, 5)), np.zeros((3, 4)))
    with pytest.raises(ValueError):
        GruLayerParams(np.full((2, 3), np.nan), np.zeros((2, 3)), np.zeros((2, 3)))


# --- dropout ---------------------------------------------------------------

def test_sample_mask_values_and_frequency():
    rng = np.random.default_rng(0)
    mask = rnn.sample_mask(100_000, 0.4, rng)
    assert set(np.unique(mask)) <= {0.0, 1.0 / 0.6}
    zero_frac = float(np.mean(mask == 0.0))
    assert abs(zero_frac - 0.4) < 0.01


def test_sample_mask_rate_zero_is_identity():
    mask = rnn.sample_mask(50, 0.0, np.random.default_rng(1))
    np.testing.assert_array_equal(mask, np.ones(50))


def test_sample_mask_rejects_rate_one():
    with pytest.raises(ValueError):
        rnn.sample_mask(10, 1.0, np.random.default_rng(0))


def test_sample_mask_reproducible():
    a = rnn.sample_mask(64, 0.3, np.random.default_rng(7))
    b = rnn.sample_mask(64, 0.3, np.random.default_rng(7))
    np.testing.assert_array_equal(a, b)


def test_train_mode_rate_zero_equals_infer():
    layers = [tiny_layer(1, 5, seed=1), tiny_layer(5, 4, seed=2)]
    series = np.random.default_rng(3).normal(size=9)
    f_infer, t_infer = rnn.stack_forward(layers, series, mode="infer")
    f_train, t_train = rnn.stack_forward(
        layers, series, mode="train", rng=np.random.default_rng(0), dropout_rate=0.0
    )
    for a, b in zip(f_infer, f_train):
        np.testing.assert_array_equal(a, b)
    for a, b in zip(t_infer.states, t_train.states):
        np.testing.assert_array_equal(a, b)


def test_dropout_masks_are_fresh_per_step():
    layer = tiny_layer(1, 4)
    trace = rnn.forward_batch(
        [layer],
        np.ones((1, 200)),
        train=True,
        dropout_rate=0.5,
        rng=np.random.default_rng(5),
    )
    per_step = trace.masks[0][:, 0, 0]
    assert len(np.unique(per_step)) == 2  # both mask values appear over time


def test_dropout_never_touches_recurrent_state():
    # with rate near 1 the input path dies, yet the state must keep evolving
    # from h_{t-1}; replaying each step with h_prev zeroed must diverge
    layer = tiny_layer(1, 4, seed=9)
    trace = rnn.forward_batch(
        [layer],
        np.ones((1, 6)),
        train=True,
        dropout_rate=0.99,
        rng=np.random.default_rng(8),
        init=[np.full((1, 4), 0.5)],
    )
    diverged = False
    for t in range(1, 6):
        h_prev = trace.states[0][t, 0]
        xm = trace.masked[0][t, 0]
        actual = trace.states[0][t + 1, 0]
        cut = rnn.gru_step(layer, np.zeros(4), xm)
        if not np.allclose(cut, actual):
            diverged = True
    assert diverged


def test_recomputing_step_from_trace_masks_matches():
    # the trace holds exactly the masked inputs used by the transition
    layers = [tiny_layer(1, 3, seed=1), tiny_layer(3, 2, seed=2)]
    trace = rnn.forward_batch(
        layers,
        np.random.default_rng(0).normal(size=(2, 5)),
        train=True,
        dropout_rate=0.5,
        rng=np.random.default_rng(42),
    )
    for l, layer in enumerate(layers):
        for t in range(5):
            for b in range(2):
                redo = rnn.gru_step(
                    layer, trace.states[l][t, b], trace.masked[l][t, b]
                )
                np.testing.assert_allclose(redo, trace.states[l][t + 1, b], rtol=1e-12)


# --- stack -----------------------------------------------------------------

def test_stack_forward_single_step_base_case():
    layers = [tiny_layer(1, 3, seed=0), tiny_layer(3, 2, seed=1)]
    final, trace = rnn.stack_forward(layers, np.array([0.5]))
    h1 = rnn.gru_step(layers[0], np.zeros(3), np.array([0.5]))
    h2 = rnn.gru_step(layers[1], np.zeros(2), h1)
    np.testing.assert_allclose(final[0], h1, rtol=1e-12)
    np.testing.assert_allclose(final[1], h2, rtol=1e-12)
    assert trace.steps == 1


def test_stack_forward_infer_deterministic():
    layers = [tiny_layer(1, 4, seed=3)]
    series = np.random.default_rng(1).normal(size=20)
    a, ta = rnn.stack_forward(layers, series)
    b, tb = rnn.stack_forward(layers, series)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(ta.states[0], tb.states[0])


def test_final_state_is_last_trace_column():
    layers = [tiny_layer(1, 4, seed=3), tiny_layer(4, 6, seed=4)]
    series = np.random.default_rng(2).normal(size=15)
    final, trace = rnn.stack_forward(layers, series)
    for l in range(2):
        np.testing.assert_array_equal(final[l], trace.states[l][-1, 0])


def test_stack_forward_validates():
    layers = [tiny_layer(2, 3)]
    with pytest.raises(ValueError):  # first layer must take scalar input
        rnn.stack_forward(layers, np.ones(5))
    with pytest.raises(ValueError):
        rnn.stack_forward([tiny_layer(1, 3)], np.array([]))
    with pytest.raises(ValueError):
        rnn.stack_forward([tiny_layer(1, 3)], np.ones(5), mode="predict")
    with pytest.raises(ValueError):  # chained dims must agree
        rnn.stack_forward([tiny_layer(1, 3), tiny_layer(4, 2)], np.ones(5))


def test_forward_batch_matches_stack_forward_rows():
    layers = [tiny_layer(1, 3, seed=5), tiny_layer(3, 3, seed=6)]
    batch = np.random.default_rng(4).normal(size=(3, 8))
    trace = rnn.forward_batch(layers, batch)
    for b in range(3):
        final, single = rnn.stack_forward(layers, batch[b])
        for l in range(2):
            np.testing.assert_allclose(
                trace.states[l][:, b], single.states[l][:, 0], rtol=1e-12
            )


def test_init_layer_bounds():
    rng = np.random.default_rng(0)
    layer = rnn.init_layer(4, 16, rng)
    bound = np.sqrt(6.0 / ((4 + 16) + 16))
    for w in (layer.w_reset, layer.w_update, layer.w_propose):
        assert np.all(np.abs(w) <= bound)
        assert w.shape == (16, 20)


# --- backward --------------------------------------------------------------

def test_stack_backward_matches_finite_differences():
    layers = [tiny_layer(1, 3, seed=1), tiny_layer(3, 2, seed=2)]
    batch = np.random.default_rng(0).normal(size=(2, 4))
    target = np.random.default_rng(1).normal(size=(4, 2, 2))

    def loss():
        tr = rnn.forward_batch(layers, batch)
        top = tr.states[-1][1:]
        return float(((top - target) ** 2).sum()), tr, top

    base, trace, top = loss()
    d_top = 2.0 * (top - target)
    grads, _ = rnn.stack_backward(layers, trace, d_top=d_top)

    eps = 1e-6
    worst = 0.0
    for l, layer in enumerate(layers):
        for name in ("w_reset", "w_update", "w_propose"):
            w = getattr(layer, name)
            g = getattr(grads[l], name)
            idx = (np.random.default_rng(l).integers(0, w.shape[0]), 1)
            orig = w[idx]
            w[idx] = orig + eps
            up, _, _ = loss()
            w[idx] = orig - eps
            down, _, _ = loss()
            w[idx] = orig
            fd = (up - down) / (2 * eps)
            worst = max(worst, abs(fd - g[idx]) / max(abs(fd), 1e-8))
    assert worst < 1e-4


def test_non_finite_state_is_caught():
    huge = GruLayerParams(
        np.full((2, 3), 1e200), np.full((2, 3), 1e200), np.full((2, 3), 1e200)
    )
    # overflow in the gate pre-activations must not silently propagate
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            final, _ = rnn.stack_forward([huge], np.array([1e300, 1e300]))
        assert np.all(np.isfinite(final[0]))
    except (FloatingPointError, ValueError):
        pass
