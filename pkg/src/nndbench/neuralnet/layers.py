"""Layers with hand-written backward passes.

Every layer maps a batch-first array to a batch-first array. Sequence and
convolution layers use the (batch, length, channels) layout. ``forward``
caches what ``backward`` needs, so a backward call always refers to the most
recent forward call.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from .init import xavier_init


def _sigmoid_tanh(z, out):
    # sigmoid via tanh; far cheaper than expit on large blocks
    np.multiply(z, 0.5, out=out)
    np.tanh(out, out=out)
    out *= 0.5
    out += 0.5
    return out


class Layer:
    """Base class. Parameterized layers fill ``params`` and, after
    ``backward``, ``grads`` with arrays of matching shape."""

    weight_names = ()
    bias_names = ()

    def __init__(self):
        self.params = {}
        self.grads = {}

    def forward(self, x, train=False, rng=None):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def config(self):
        """Constructor arguments, used for serialization."""
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.config().items())
        return f"{type(self).__name__}({args})"


class Dense(Layer):
    weight_names = ("W",)
    bias_names = ("b",)

    def __init__(self, n_in, n_out, rng=None, dtype=np.float32):
        super().__init__()
        self.n_in, self.n_out = n_in, n_out
        if rng is None:
            W = np.zeros((n_in, n_out), dtype=dtype)
        else:
            W = xavier_init((n_in, n_out), rng, dtype=dtype)
        self.params = {"W": W, "b": np.zeros(n_out, dtype=dtype)}

    def forward(self, x, train=False, rng=None):
        self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, dout):
        self.grads = {"W": self._x.T @ dout, "b": dout.sum(axis=0)}
        return dout @ self.params["W"].T

    def config(self):
        return {"n_in": self.n_in, "n_out": self.n_out}


class Conv1D(Layer):
    """Stride-1 convolution over (batch, length, channels).

    ``padding="same"`` zero-pads so the output length equals the input length
    (odd kernels only); ``"valid"`` applies no padding.
    """

    weight_names = ("W",)
    bias_names = ("b",)

    def __init__(self, in_channels, out_channels, kernel_size, padding="same", rng=None,
                 dtype=np.float32):
        super().__init__()
        if padding not in ("same", "valid"):
            raise ValueError(f"unknown padding {padding!r}")
        if padding == "same" and kernel_size % 2 == 0:
            raise ValueError("'same' padding needs an odd kernel size")
        self.in_channels, self.out_channels = in_channels, out_channels
        self.kernel_size, self.padding = kernel_size, padding
        shape = (kernel_size, in_channels, out_channels)
        W = np.zeros(shape, dtype=dtype) if rng is None else xavier_init(shape, rng, dtype=dtype)
        self.params = {"W": W, "b": np.zeros(out_channels, dtype=dtype)}

    def forward(self, x, train=False, rng=None):
        k = self.kernel_size
        pad = (k - 1) // 2 if self.padding == "same" else 0
        xp = np.pad(x, ((0, 0), (pad, pad), (0, 0))) if pad else x
        # (batch, L_out, C_in, k) -> (batch, L_out, k, C_in)
        cols = sliding_window_view(xp, k, axis=1).transpose(0, 1, 3, 2)
        B, L_out = cols.shape[:2]
        cols = cols.reshape(B * L_out, k * self.in_channels)
        self._cols, self._xshape, self._pad = cols, xp.shape, pad
        W = self.params["W"].reshape(k * self.in_channels, self.out_channels)
        return (cols @ W).reshape(B, L_out, self.out_channels) + self.params["b"]

    def backward(self, dout):
        k, cin = self.kernel_size, self.in_channels
        B, L_out, cout = dout.shape
        d2 = dout.reshape(B * L_out, cout)
        W = self.params["W"].reshape(k * cin, cout)
        self.grads = {
            "W": (self._cols.T @ d2).reshape(k, cin, cout),
            "b": d2.sum(axis=0),
        }
        dcols = (d2 @ W.T).reshape(B, L_out, k, cin)
        dxp = np.zeros(self._xshape, dtype=dout.dtype)
        for j in range(k):
            dxp[:, j:j + L_out, :] += dcols[:, :, j, :]
        p = self._pad
        return dxp[:, p:dxp.shape[1] - p, :] if p else dxp

    def config(self):
        return {
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "kernel_size": self.kernel_size,
            "padding": self.padding,
        }


class MaxPool1D(Layer):
    """Non-overlapping max pooling along the length axis (stride = size)."""

    def __init__(self, size=2):
        super().__init__()
        self.size = size

    def forward(self, x, train=False, rng=None):
        B, L, C = x.shape
        if L % self.size:
            raise ValueError(f"length {L} not divisible by pool size {self.size}")
        xr = x.reshape(B, L // self.size, self.size, C)
        # ties resolve to the first position in each window
        self._idx = np.argmax(xr, axis=2)[:, :, None, :]
        self._shape = xr.shape
        return np.take_along_axis(xr, self._idx, axis=2)[:, :, 0, :]

    def backward(self, dout):
        dx = np.zeros(self._shape, dtype=dout.dtype)
        np.put_along_axis(dx, self._idx, dout[:, :, None, :], axis=2)
        B, Lp, s, C = self._shape
        return dx.reshape(B, Lp * s, C)

    def config(self):
        return {"size": self.size}


class LSTM(Layer):
    """Single LSTM cell unrolled over the length axis; returns the final hidden state.

    Input (batch, T, input_size) -> output (batch, hidden_size). The weight
    matrix stacks input rows above recurrent rows, shape
    (input_size + hidden_size, 4 * hidden_size), with gate columns ordered
    input, forget, cell candidate, output. Initial h and c are zero.
    """

    weight_names = ("W",)
    bias_names = ("b",)

    def __init__(self, input_size, hidden_size, rng=None, dtype=np.float32):
        super().__init__()
        self.input_size, self.hidden_size = input_size, hidden_size
        shape = (input_size + hidden_size, 4 * hidden_size)
        W = np.zeros(shape, dtype=dtype) if rng is None else xavier_init(shape, rng, dtype=dtype)
        self.params = {"W": W, "b": np.zeros(4 * hidden_size, dtype=dtype)}

    def forward(self, x, train=False, rng=None):
        B, T, I = x.shape
        H = self.hidden_size
        W, b = self.params["W"], self.params["b"]
        Wx, Wh = W[:I], W[I:]
        xt = np.ascontiguousarray(x.transpose(1, 0, 2))  # (T, B, I)
        if I == 1:
            # outer product; broadcasting beats a rank-1 matmul by far
            xw = xt * Wx[0] + b
        else:
            xw = (xt.reshape(T * B, I) @ Wx + b).reshape(T, B, 4 * H)
        dtype = xw.dtype
        hs = np.zeros((T + 1, B, H), dtype=dtype)
        cs = np.zeros((T + 1, B, H), dtype=dtype)
        gates = np.empty((T, B, 4 * H), dtype=dtype)
        tcs = np.empty((T, B, H), dtype=dtype)
        for t in range(T):
            z = xw[t] + hs[t] @ Wh
            a = gates[t]
            _sigmoid_tanh(z, out=a)
            np.tanh(z[:, 2 * H:3 * H], out=a[:, 2 * H:3 * H])
            i, f, g, o = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
            np.multiply(f, cs[t], out=cs[t + 1])
            cs[t + 1] += i * g
            np.tanh(cs[t + 1], out=tcs[t])
            np.multiply(o, tcs[t], out=hs[t + 1])
        self._cache = (xt, hs, cs, gates, tcs)
        return hs[T].copy()

    def backward(self, dout):
        xt, hs, cs, gates, tcs = self._cache
        T, B, I = xt.shape
        H = self.hidden_size
        Wh = self.params["W"][I:]
        WhT = np.ascontiguousarray(Wh.T)
        dz = np.empty_like(gates)
        dh = dout
        dc = np.zeros((B, H), dtype=dout.dtype)
        for t in range(T - 1, -1, -1):
            a = gates[t]
            i, f, g, o = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
            tc = tcs[t]
            dc = dc + dh * o * (1.0 - tc * tc)
            d = dz[t]
            np.multiply(dc * g, i * (1.0 - i), out=d[:, :H])
            np.multiply(dc * cs[t], f * (1.0 - f), out=d[:, H:2 * H])
            np.multiply(dc * i, 1.0 - g * g, out=d[:, 2 * H:3 * H])
            np.multiply(dh * tc, o * (1.0 - o), out=d[:, 3 * H:])
            dc = dc * f
            dh = d @ WhT
        dz2 = dz.reshape(T * B, 4 * H)
        dWx = xt.reshape(T * B, I).T @ dz2
        dWh = hs[:-1].reshape(T * B, H).T @ dz2
        self.grads = {"W": np.concatenate([dWx, dWh], axis=0), "b": dz2.sum(axis=0)}
        if I == 1:
            dx = (dz2 @ self.params["W"][0]).reshape(T, B, 1)
        else:
            dx = (dz2 @ self.params["W"][:I].T).reshape(T, B, I)
        return dx.transpose(1, 0, 2)

    def config(self):
        return {"input_size": self.input_size, "hidden_size": self.hidden_size}


class ReLU(Layer):
    def forward(self, x, train=False, rng=None):
        self._mask = x > 0
        return x * self._mask

    def backward(self, dout):
        return dout * self._mask


class Sigmoid(Layer):
    """Logistic output, kept strictly inside (0, 1) at the working precision."""

    def forward(self, x, train=False, rng=None):
        info = np.finfo(x.dtype)
        y = expit(x)
        np.clip(y, info.smallest_subnormal, 1.0 - info.epsneg, out=y)
        self._y = y
        return y

    def backward(self, dout):
        y = self._y
        return dout * y * (1.0 - y)


class Dropout(Layer):
    """Inverted dropout: in training, zero each unit with probability ``rate``
    and scale survivors by 1 / (1 - rate). Identity at inference."""

    def __init__(self, rate=0.1):
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate

    def forward(self, x, train=False, rng=None):
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise ValueError("training-mode dropout needs a random generator")
        keep = rng.random(x.shape) >= self.rate
        self._mask = keep.astype(x.dtype) / x.dtype.type(1.0 - self.rate)
        return x * self._mask

    def backward(self, dout):
        return dout if self._mask is None else dout * self._mask

    def config(self):
        return {"rate": self.rate}


class Reshape(Layer):
    """Reshape the non-batch dimensions, e.g. (N,) -> (N, 1) or (1, K) -> (K,)."""

    def __init__(self, shape):
        super().__init__()
        self.shape = tuple(shape)

    def forward(self, x, train=False, rng=None):
        self._in = x.shape
        return x.reshape((x.shape[0],) + self.shape)

    def backward(self, dout):
        return dout.reshape(self._in)

    def config(self):
        return {"shape": list(self.shape)}


LAYER_TYPES = {
    cls.__name__: cls
    for cls in (Dense, Conv1D, MaxPool1D, LSTM, ReLU, Sigmoid, Dropout, Reshape)
}
