"""Sequential network container, MSE loss, training step and gradient check."""
import copy
from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError
from .layers import Dropout


class Network:
    """A stack of layers applied in order.

    ``arch`` is a free-form tag ("mlp", "cnn", "rnn"); ``meta`` holds
    anything a builder wants to round-trip through serialization.
    """

    def __init__(self, layers, arch="custom", meta=None):
        self.layers = list(layers)
        self.arch = arch
        self.meta = dict(meta or {})

    @property
    def dtype(self):
        for p in self.parameters():
            return p.dtype
        return np.dtype(np.float32)

    def named_parameters(self):
        for i, layer in enumerate(self.layers):
            for name, p in layer.params.items():
                yield f"layers.{i}.{name}", p

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def gradients(self):
        return [layer.grads[name] for layer in self.layers for name in layer.params]

    def forward(self, x, train=False, rng=None):
        out = np.asarray(x, dtype=self.dtype)
        for layer in self.layers:
            out = layer.forward(out, train=train, rng=rng)
        return out

    __call__ = forward

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def astype(self, dtype):
        """Deep copy with every parameter cast to ``dtype``."""
        net = self.copy()
        for layer in net.layers:
            layer.params = {k: v.astype(dtype) for k, v in layer.params.items()}
        return net

    def copy(self):
        return copy.deepcopy(self)

    def set_dropout(self, rate):
        for layer in self.layers:
            if isinstance(layer, Dropout):
                layer.rate = rate

    def __repr__(self):
        inner = ",\n  ".join(repr(l) for l in self.layers)
        return f"Network(arch={self.arch!r}, layers=[\n  {inner}\n])"


def mse_loss(x, x_hat):
    """Squared error averaged over the K bits and then over the batch."""
    x = np.asarray(x)
    x_hat = np.asarray(x_hat)
    if x.shape != x_hat.shape:
        raise ValueError(f"shape mismatch: targets {x.shape} vs outputs {x_hat.shape}")
    return float(np.mean((x_hat.astype(np.float64) - x) ** 2))


def mse_grad(x, x_hat):
    """Gradient of ``mse_loss`` with respect to ``x_hat``."""
    x_hat = np.asarray(x_hat)
    return (2.0 / x_hat.size) * (x_hat - np.asarray(x, dtype=x_hat.dtype))


@dataclass(frozen=True)
class TrainStepReport:
    loss: float
    grad_norm: float
    step_index: int


def compute_gradients(model, inputs, targets, train=True, rng=None):
    """Forward + backward pass; returns the loss and leaves gradients in the layers."""
    out = model.forward(inputs, train=train, rng=rng)
    loss = mse_loss(targets, out)
    model.backward(mse_grad(targets, out))
    return loss


def backward_and_step(model, inputs, targets, optimizer, rng=None):
    """One Adam step on the MSE loss of a mini-batch (dropout active)."""
    loss = compute_gradients(model, inputs, targets, train=True, rng=rng)
    grads = model.gradients()
    sq = sum(float(np.vdot(g, g)) for g in grads)
    if not (np.isfinite(loss) and np.isfinite(sq)):
        raise NumericalError(
            f"non-finite loss or gradient at step {optimizer.t + 1}",
            {"loss": loss, "grad_sq_norm": sq, "step": optimizer.t + 1},
        )
    optimizer.step(model.parameters(), grads)
    return TrainStepReport(loss, float(np.sqrt(sq)), optimizer.t)


PRECISIONS = {"double": np.float64, "extended": np.longdouble}


def gradient_check(model, inputs, targets, h=1e-5, precision="double", max_per_array=None,
                   rng=None):
    """Largest relative discrepancy between backprop and central differences.

    Analytic gradients come from a float64 copy of ``model`` in inference
    mode. The finite-difference reference (L(w + h) - L(w - h)) / 2h is
    evaluated on a copy held in ``precision``: "double" (float64) or
    "extended" (long double). Extended precision lowers the difference
    quotient's roundoff floor from about 1e-12 to about 1e-15, which matters
    when some gradients are 1e-9 or smaller.

    Every coordinate of every parameter is perturbed unless ``max_per_array``
    is given, in which case that many coordinates per array are drawn from
    ``rng``. The per-coordinate error is |g_a - g_n| / max(|g_a|, |g_n|, 1e-12).
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"step h must lie in [1e-7, 1e-3], got {h}")
    fd_dtype = PRECISIONS[precision]
    net = model.astype(np.float64)
    compute_gradients(net, np.asarray(inputs, np.float64), np.asarray(targets, np.float64),
                      train=False)
    analytic = [g.copy() for g in net.gradients()]

    probe = model.astype(fd_dtype) if fd_dtype is not np.float64 else net
    if fd_dtype is not np.float64:
        # same parameter values as the analytic copy, widened without rounding
        for dst, src in zip(probe.parameters(), net.parameters()):
            dst[...] = src
    x_in = np.asarray(inputs, dtype=fd_dtype)
    tgt = np.asarray(targets, dtype=fd_dtype)
    step = fd_dtype(h)

    def loss():
        return np.mean((probe.forward(x_in) - tgt) ** 2)

    worst = 0.0
    for p, ga in zip(probe.parameters(), analytic):
        flat, gflat = p.reshape(-1), ga.reshape(-1)
        coords = np.arange(flat.size)
        if max_per_array is not None and flat.size > max_per_array:
            coords = np.sort(rng.choice(flat.size, size=max_per_array, replace=False))
        for j in coords:
            old = flat[j]
            flat[j] = old + step
            up = loss()
            flat[j] = old - step
            down = loss()
            flat[j] = old
            gn = float((up - down) / (2 * step))
            a = float(gflat[j])
            worst = max(worst, abs(a - gn) / max(abs(a), abs(gn), 1e-12))
    return worst
