import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nndbench.checks import GRADCHECK_TOLERANCE, TARGETS, run_gradcheck
from nndbench.decoders import ArchitectureSpec, build
from nndbench.errors import NumericalError
from nndbench.neuralnet import (
    LSTM,
    Adam,
    Conv1D,
    Dense,
    Dropout,
    MaxPool1D,
    Network,
    ReLU,
    Sigmoid,
    backward_and_step,
    compute_gradients,
    gradient_check,
    load_model,
    mse_grad,
    mse_loss,
    save_model,
    xavier_bound,
    xavier_init,
)


# ---- loss ------------------------------------------------------------------

def test_mse_perfect_prediction():
    x = np.array([[1.0, 0.0, 1.0]])
    assert mse_loss(x, x) == 0.0


def test_mse_single_bit_maximal():
    assert mse_loss([[1.0]], [[0.0]]) == 1.0


def test_mse_half_outputs():
    assert mse_loss([[1, 0, 1, 0]], [[0.5] * 4]) == 0.25


def test_mse_averages_over_batch():
    x = np.array([[1.0, 0.0], [1.0, 1.0]])
    xh = np.array([[1.0, 0.0], [0.0, 1.0]])
    # per-sample losses 0 and 0.5
    assert mse_loss(x, xh) == pytest.approx(0.25)


def test_mse_shape_mismatch():
    with pytest.raises(ValueError):
        mse_loss(np.zeros((2, 4)), np.zeros((2, 3)))


def test_mse_grad_zero_at_fit():
    x = np.array([[1.0, 0.0]])
    assert not np.any(mse_grad(x, x))


# ---- forward ---------------------------------------------------------------

@pytest.mark.parametrize("kind", ["mlp", "cnn", "rnn"])
def test_zero_parameters_give_half(kind, rng):
    model = build(ArchitectureSpec(kind, 8, 4, rnn_hidden=16), rng)
    for p in model.parameters():
        p[...] = 0
    out = model.forward(rng.standard_normal((5, 8)))
    np.testing.assert_array_equal(out, 0.5)


@pytest.mark.parametrize("kind", ["mlp", "cnn", "rnn"])
def test_infer_mode_deterministic(kind, rng):
    model = build(ArchitectureSpec(kind, 8, 4, rnn_hidden=16), rng)
    y = rng.standard_normal((7, 8))
    np.testing.assert_array_equal(model.forward(y), model.forward(y))


def test_dense_cancellation_example():
    layer = Dense(2, 1)
    layer.params["W"][...] = [[1.0], [1.0]]
    net = Network([layer, Sigmoid()])
    assert net.forward([[2.0, -2.0]])[0, 0] == 0.5


def test_output_gradient_zero_at_exact_fit():
    sig = Sigmoid()
    out = sig.forward(np.zeros((1, 2)))
    assert not np.any(sig.backward(mse_grad(out.copy(), out)))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (3, 4), elements=st.floats(-1e300, 1e300)))
def test_sigmoid_strictly_inside_unit_interval(z):
    for dtype in (np.float32, np.float64):
        with np.errstate(over="ignore"):
            y = Sigmoid().forward(z.astype(dtype))
        assert np.all(y > 0) and np.all(y < 1)


def test_conv_same_padding_keeps_length(rng):
    conv = Conv1D(1, 4, 3, "same", rng)
    assert conv.forward(rng.standard_normal((2, 8, 1))).shape == (2, 8, 4)


def test_conv_matches_direct_correlation(rng):
    conv = Conv1D(2, 3, 3, "valid", rng, dtype=np.float64)
    x = rng.standard_normal((1, 6, 2))
    W = conv.params["W"]
    expect = np.array([[np.einsum("kc,kco->o", x[0, t:t + 3], W) for t in range(4)]])
    np.testing.assert_allclose(conv.forward(x), expect + conv.params["b"])


def test_maxpool_routes_gradient_to_max():
    pool = MaxPool1D(2)
    x = np.array([[[1.0], [3.0], [5.0], [2.0]]])
    np.testing.assert_array_equal(pool.forward(x)[0, :, 0], [3.0, 5.0])
    dx = pool.backward(np.ones((1, 2, 1)))
    np.testing.assert_array_equal(dx[0, :, 0], [0, 1, 1, 0])


def test_lstm_hidden_bounded(rng):
    lstm = LSTM(1, 5, rng, dtype=np.float64)
    h = lstm.forward(rng.standard_normal((3, 8, 1)) * 100)
    assert h.shape == (3, 5) and np.all(np.abs(h) < 1)


def test_relu_forward_backward():
    r = ReLU()
    np.testing.assert_array_equal(r.forward(np.array([[-1.0, 0.0, 2.0]])), [[0, 0, 2]])
    np.testing.assert_array_equal(r.backward(np.ones((1, 3))), [[0, 0, 1]])


# ---- dropout ---------------------------------------------------------------

def test_dropout_is_identity_at_inference(rng):
    x = rng.standard_normal((4, 10)).astype(np.float32)
    np.testing.assert_array_equal(Dropout(0.1).forward(x), x)


def test_dropout_needs_rng_in_training():
    with pytest.raises(ValueError):
        Dropout(0.1).forward(np.ones((1, 3), np.float32), train=True)


def test_dropout_preserves_expectation(rng):
    dense = Dense(4, 3, rng, dtype=np.float64)
    net = Network([dense, Dropout(0.1)])
    x = rng.standard_normal((1, 4))
    ref = net.forward(x)[0]
    passes = 10**5
    out = net.forward(np.repeat(x, passes, axis=0), train=True, rng=rng)
    rel = np.abs(out.mean(axis=0) - ref) / np.abs(ref)
    assert np.all(rel < 0.02)


def test_dropout_zero_fraction(rng):
    out = Dropout(0.1).forward(np.ones((1000, 100), np.float32), train=True, rng=rng)
    assert abs(np.mean(out == 0) - 0.1) < 0.005
    assert set(np.unique(out)) == {0.0, np.float32(1 / 0.9)}


# ---- initialization --------------------------------------------------------

def test_xavier_bound_dense_64_32():
    assert xavier_bound((64, 32)) == 0.25


def test_xavier_samples_within_bound(rng):
    w = xavier_init((64, 32), rng)
    assert np.all(np.abs(w) <= 0.25)
    # uniform over the full support, not a narrower one
    assert np.abs(w).max() > 0.24


def test_xavier_reproducible():
    a = xavier_init((3, 8, 16), np.random.default_rng(5))
    b = xavier_init((3, 8, 16), np.random.default_rng(5))
    np.testing.assert_array_equal(a, b)


def test_biases_start_at_zero(rng):
    model = build(ArchitectureSpec("cnn", 8, 4), rng)
    for layer in model.layers:
        for name in layer.bias_names:
            assert not np.any(layer.params[name])


# ---- optimizer and training step --------------------------------------------

def _tiny_mlp(rng, dtype=np.float32):
    return Network([Dense(4, 3, rng, dtype), ReLU(), Dense(3, 2, rng, dtype), Sigmoid()])


def test_identical_models_identical_steps(rng):
    a = _tiny_mlp(rng)
    b = a.copy()
    x = rng.standard_normal((16, 4))
    t = rng.integers(0, 2, (16, 2)).astype(np.float32)
    oa, ob = Adam(), Adam()
    for _ in range(3):
        backward_and_step(a, x, t, oa)
        backward_and_step(b, x, t, ob)
    for pa, pb in zip(a.parameters(), b.parameters()):
        np.testing.assert_array_equal(pa, pb)
    assert oa.t == ob.t == 3


def test_adam_zero_gradient_leaves_parameters(rng):
    model = _tiny_mlp(rng)
    opt = Adam()
    x = rng.standard_normal((8, 4))
    t = rng.integers(0, 2, (8, 2)).astype(np.float32)
    backward_and_step(model, x, t, opt)
    before = [p.copy() for p in model.parameters()]
    # fresh optimizer: zero moments, zero gradient
    fresh = Adam()
    fresh.step(model.parameters(), [np.zeros_like(p) for p in model.parameters()])
    for p, q in zip(model.parameters(), before):
        np.testing.assert_array_equal(p, q)
    assert fresh.t == 1


def test_adam_counter_increments_by_one(rng):
    model = _tiny_mlp(rng)
    opt = Adam()
    x = rng.standard_normal((8, 4))
    t = np.zeros((8, 2), np.float32)
    for k in range(1, 4):
        report = backward_and_step(model, x, t, opt)
        assert opt.t == report.step_index == k
        assert report.loss >= 0 and report.grad_norm >= 0


def test_step_report_loss_is_batch_mse(rng):
    model = _tiny_mlp(rng)
    x = rng.standard_normal((8, 4))
    t = rng.integers(0, 2, (8, 2)).astype(np.float32)
    expect = mse_loss(t, model.forward(x))
    assert backward_and_step(model, x, t, Adam()).loss == pytest.approx(expect)


def test_first_adam_step_moves_by_learning_rate(rng):
    model = _tiny_mlp(rng, np.float64)
    before = [p.copy() for p in model.parameters()]
    x = rng.standard_normal((8, 4))
    t = rng.integers(0, 2, (8, 2)).astype(np.float64)
    backward_and_step(model, x, t, Adam())
    for p, q, g in zip(model.parameters(), before, model.gradients()):
        moved = np.abs(g) > 1e-6
        np.testing.assert_allclose(np.abs(p - q)[moved], 1e-3, rtol=1e-3)


def test_non_finite_input_raises(rng):
    model = _tiny_mlp(rng)
    x = np.full((2, 4), np.nan)
    with pytest.raises(NumericalError) as info:
        backward_and_step(model, x, np.zeros((2, 2)), Adam())
    assert "loss" in info.value.diagnostic


def test_loss_nonincreasing_on_fixed_noiseless_batch(book8):
    model = build(ArchitectureSpec("mlp", 8, 4, dropout=0.0), np.random.default_rng(0))
    x = book8.symbols.astype(np.float32)
    t = book8.info_words.astype(np.float32)
    opt = Adam()
    losses = [backward_and_step(model, x, t, opt).loss for _ in range(101)]
    drops = sum(b <= a for a, b in zip(losses, losses[1:]))
    assert drops >= 95


# ---- gradient check --------------------------------------------------------

def test_tiny_mlp_gradcheck():
    rng = np.random.default_rng(7)
    model = _tiny_mlp(rng, np.float64)
    x = rng.standard_normal((5, 4))
    t = rng.integers(0, 2, (5, 2)).astype(np.float64)
    assert gradient_check(model, x, t, h=1e-5) < 1e-4


def test_gradcheck_detects_wrong_backward(monkeypatch):
    rng = np.random.default_rng(1)
    model = _tiny_mlp(rng, np.float64)
    x = rng.standard_normal((5, 4))
    t = rng.integers(0, 2, (5, 2)).astype(np.float64)
    orig = ReLU.backward
    monkeypatch.setattr(ReLU, "backward", lambda self, d: 1.5 * orig(self, d))
    assert gradient_check(model, x, t) > 1e-2


@pytest.mark.parametrize("h", [1e-8, 1e-2])
def test_gradcheck_rejects_step(h, rng):
    with pytest.raises(ValueError):
        gradient_check(_tiny_mlp(rng), np.zeros((1, 4)), np.zeros((1, 2)), h=h)


def test_gradcheck_does_not_mutate_model(rng):
    model = _tiny_mlp(rng)
    before = [p.copy() for p in model.parameters()]
    gradient_check(model, rng.standard_normal((3, 4)), np.ones((3, 2)))
    for p, q in zip(model.parameters(), before):
        np.testing.assert_array_equal(p, q)
        assert p.dtype == np.float32


@pytest.mark.parametrize("name", ["dense", "conv", "pool", "lstm", "mlp", "cnn"])
@pytest.mark.parametrize("seed", [0, 1])
def test_gradcheck_targets(name, seed):
    assert run_gradcheck(name, seed=seed) < GRADCHECK_TOLERANCE


def test_gradcheck_extended_matches_double_on_small_target():
    a = run_gradcheck("lstm", seed=3)
    b = run_gradcheck("lstm", seed=3, precision="extended")
    assert a < GRADCHECK_TOLERANCE and b < GRADCHECK_TOLERANCE


def test_gradcheck_target_registry():
    assert set(TARGETS) == {"dense", "conv", "pool", "lstm", "mlp", "cnn", "rnn"}


def test_compute_gradients_leaves_grads_shaped(rng):
    model = build(ArchitectureSpec("rnn", 8, 4, rnn_hidden=8), rng)
    compute_gradients(model, rng.standard_normal((3, 8)), np.ones((3, 4)), train=False)
    for p, g in zip(model.parameters(), model.gradients()):
        assert p.shape == g.shape


# ---- serialization ---------------------------------------------------------

@pytest.mark.parametrize("kind", ["mlp", "cnn", "rnn"])
def test_serialization_round_trip(kind, tmp_path, rng):
    model = build(ArchitectureSpec(kind, 8, 4, rnn_hidden=12), rng)
    opt = Adam()
    x = rng.standard_normal((4, 8))
    backward_and_step(model, x, np.ones((4, 4)), opt, rng=rng)
    path = tmp_path / "m.nndm"
    save_model(path, model, opt, extra={"note": 1})
    loaded, lopt, extra = load_model(path)
    assert extra == {"note": 1} and loaded.arch == kind
    for (na, a), (nb, b) in zip(model.named_parameters(), loaded.named_parameters()):
        assert na == nb and a.dtype == b.dtype
        np.testing.assert_array_equal(a, b)
    assert lopt.t == opt.t
    for a, b in zip(opt.state_arrays(), lopt.state_arrays()):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(model.forward(x), loaded.forward(x))
    # resumed training continues identically
    backward_and_step(model, x, np.ones((4, 4)), opt, rng=np.random.default_rng(3))
    backward_and_step(loaded, x, np.ones((4, 4)), lopt, rng=np.random.default_rng(3))
    for a, b in zip(model.parameters(), loaded.parameters()):
        np.testing.assert_array_equal(a, b)


def test_serialization_bytes_deterministic(tmp_path):
    spec = ArchitectureSpec("cnn", 16, 8)
    paths = []
    for i in range(2):
        model = build(spec, np.random.default_rng(9))
        paths.append(tmp_path / f"{i}.nndm")
        save_model(paths[-1], model)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_load_rejects_foreign_file(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"JUNKJUNKJUNK")
    with pytest.raises(ValueError):
        load_model(p)
