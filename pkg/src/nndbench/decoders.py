"""MLP, CNN and LSTM decoder builders and one-shot decoding."""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigurationError
from .neuralnet import (
    LSTM,
    Conv1D,
    Dense,
    Dropout,
    MaxPool1D,
    Network,
    ReLU,
    Reshape,
    Sigmoid,
)

KINDS = ("mlp", "cnn", "rnn")


@dataclass(frozen=True)
class ArchitectureSpec:
    kind: str
    N: int
    K: int
    mlp_hidden: tuple = (64, 32, 16)
    cnn_channels: tuple = (8, 16, 32)
    rnn_hidden: int = 256
    dropout: float = 0.1

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "mlp_hidden", tuple(self.mlp_hidden))
        object.__setattr__(self, "cnn_channels", tuple(self.cnn_channels))
        if kind not in KINDS:
            raise ConfigurationError(f"unknown architecture {self.kind!r}; expected one of {KINDS}")
        if not (1 <= self.K <= self.N):
            raise ConfigurationError(f"need 1 <= K <= N, got N={self.N}, K={self.K}")
        if kind == "cnn":
            pools = len(self.cnn_channels)
            if self.N % (2**pools):
                raise ConfigurationError(
                    f"CNN needs N divisible by {2**pools} (one halving per pool), got N={self.N}"
                )

    def to_dict(self):
        d = asdict(self)
        d["mlp_hidden"] = list(self.mlp_hidden)
        d["cnn_channels"] = list(self.cnn_channels)
        return d


@dataclass(frozen=True)
class ParamCount:
    weights_only: int
    total_with_biases: int


def build(spec, rng, dtype=np.float32):
    """Build a freshly initialized decoder for ``spec`` (Xavier weights, zero biases).

    * mlp: Dense N -> 64 -> 32 -> 16 -> K, ReLU + dropout after each hidden layer.
    * cnn: three [conv3 same-padded, ReLU, max-pool 2, dropout] stages with
      8/16/32 channels, then a valid conv with kernel N/8 mapping 32 -> K
      channels at length 1, squeezed to K outputs.
    * rnn: one symbol per time step into a single LSTM cell, dropout on the
      final hidden state, then Dense hidden -> K.

    All three end in a sigmoid.
    """
    N, K, p = spec.N, spec.K, spec.dropout
    layers = []
    if spec.kind == "mlp":
        width = N
        for h in spec.mlp_hidden:
            layers += [Dense(width, h, rng, dtype), ReLU(), Dropout(p)]
            width = h
        layers.append(Dense(width, K, rng, dtype))
    elif spec.kind == "cnn":
        layers.append(Reshape((N, 1)))
        cin, length = 1, N
        for cout in spec.cnn_channels:
            layers += [Conv1D(cin, cout, 3, "same", rng, dtype), ReLU(), MaxPool1D(2), Dropout(p)]
            cin, length = cout, length // 2
        layers += [Conv1D(cin, K, length, "valid", rng, dtype), Reshape((K,))]
    else:
        layers += [
            Reshape((N, 1)),
            LSTM(1, spec.rnn_hidden, rng, dtype),
            Dropout(p),
            Dense(spec.rnn_hidden, K, rng, dtype),
        ]
    layers.append(Sigmoid())
    return Network(layers, arch=spec.kind, meta={"spec": spec.to_dict()})


def spec_of(model):
    """Recover the ArchitectureSpec stored in a built model."""
    return ArchitectureSpec(**model.meta["spec"])


def param_count(spec):
    """Trainable parameter counts, with and without bias vectors."""
    N, K = spec.N, spec.K
    if spec.kind == "mlp":
        widths = [N, *spec.mlp_hidden, K]
        weights = sum(a * b for a, b in zip(widths, widths[1:]))
        biases = sum(widths[1:])
    elif spec.kind == "cnn":
        chans = [1, *spec.cnn_channels]
        weights = sum(3 * a * b for a, b in zip(chans, chans[1:]))
        final_kernel = N // 2 ** len(spec.cnn_channels)
        weights += final_kernel * chans[-1] * K
        biases = sum(spec.cnn_channels) + K
    else:
        h = spec.rnn_hidden
        weights = 4 * h * (h + 1) + h * K
        biases = 4 * h + K
    return ParamCount(weights, weights + biases)


def count_model_parameters(model):
    """Count parameters by inspecting the arrays of a built model."""
    weights = biases = 0
    for layer in model.layers:
        weights += sum(layer.params[n].size for n in layer.weight_names)
        biases += sum(layer.params[n].size for n in layer.bias_names)
    return ParamCount(int(weights), int(weights + biases))


def predict(model, y):
    """Sigmoid outputs for a single vector (N,) or a batch (B, N), inference mode."""
    y = np.asarray(y)
    N = model.meta["spec"]["N"] if "spec" in model.meta else None
    if N is not None and y.shape[-1] != N:
        raise ValueError(f"received vectors must have length {N}, got shape {y.shape}")
    out = model.forward(np.atleast_2d(y), train=False)
    return out[0] if y.ndim == 1 else out


def decode(model, y):
    """Hard decisions: bit i is 1 iff output i > 0.5 (exactly 0.5 gives 0)."""
    return (predict(model, y) > 0.5).astype(np.uint8)
