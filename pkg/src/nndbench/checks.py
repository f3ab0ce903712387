"""Gradient-check targets: each layer type in isolation and the full decoders."""
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .decoders import ArchitectureSpec, build
from .neuralnet import (
    LSTM,
    Conv1D,
    Dense,
    MaxPool1D,
    Network,
    Reshape,
    Sigmoid,
    gradient_check,
)

GRADCHECK_TOLERANCE = 1e-4


@dataclass(frozen=True)
class CheckTarget:
    build: object
    n_in: int
    n_out: int
    batch: int = 4
    precision: str = "double"
    max_per_array: int = None


def _dense(rng):
    return Network([Dense(8, 5, rng), Sigmoid()], arch="dense")


def _conv(rng):
    return Network([Reshape((8, 1)), Conv1D(1, 3, 3, "same", rng), Reshape((24,)), Sigmoid()],
                   arch="conv")


def _pool(rng):
    return Network([Reshape((8, 1)), Conv1D(1, 3, 3, "same", rng), MaxPool1D(2),
                    Reshape((12,)), Sigmoid()], arch="pool")


def _lstm(rng):
    return Network([Reshape((4, 1)), LSTM(1, 6, rng), Dense(6, 2, rng), Sigmoid()], arch="lstm")


def _arch(kind):
    return lambda rng: build(ArchitectureSpec(kind, 8, 4), rng)


# The full-size LSTM decoder has many gradients below 1e-8, where the
# float64 difference quotient's roundoff (~3e-12 absolute) exceeds 1e-4
# relative; its reference is therefore evaluated in extended precision.
TARGETS = {
    "dense": CheckTarget(_dense, 8, 5),
    "conv": CheckTarget(_conv, 8, 24),
    "pool": CheckTarget(_pool, 8, 12),
    "lstm": CheckTarget(_lstm, 4, 2),
    "mlp": CheckTarget(_arch("mlp"), 8, 4),
    "cnn": CheckTarget(_arch("cnn"), 8, 4),
    "rnn": CheckTarget(_arch("rnn"), 8, 4, batch=2, precision="extended", max_per_array=100),
}


def run_gradcheck(name, seed=0, h=1e-5, precision=None, max_per_array=None):
    """Max relative gradient error for the named target at a random point."""
    t = TARGETS[name]
    rng = stream(seed, "gradcheck", name)
    model = t.build(rng)
    inputs = (1.0 - 2.0 * rng.integers(0, 2, size=(t.batch, t.n_in))
              + 0.5 * rng.standard_normal((t.batch, t.n_in)))
    targets = rng.integers(0, 2, size=(t.batch, t.n_out)).astype(np.float64)
    return gradient_check(
        model, inputs, targets, h=h,
        precision=precision or t.precision,
        max_per_array=max_per_array if max_per_array is not None else t.max_per_array,
        rng=rng,
    )
