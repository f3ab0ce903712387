"""Training-set generation and the mini-batch training loop."""
import math
from dataclasses import dataclass, field

import numpy as np

from .._rng import stream
from ..channel import NoiseSpec, sigma_from_ebn0, transmit
from ..errors import NumericalError
from ..neuralnet import Adam, AdamConfig, backward_and_step, save_model


@dataclass(frozen=True)
class TrainingSubset:
    """Codebook indices the training words are drawn from."""

    indices: np.ndarray
    p: float

    def __len__(self):
        return len(self.indices)


def subset_size(p, codebook_size):
    # round half up, at least one word
    return max(1, min(codebook_size, math.floor(p * codebook_size + 0.5)))


def make_training_subset(book, p, seed):
    """Uniformly random subset of ``round(p * 2**K)`` codebook indices, sorted."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"training ratio must lie in (0, 1], got {p}")
    size = subset_size(p, len(book))
    if size == len(book):
        idx = np.arange(len(book))
    else:
        rng = stream(seed, "subset", book.code.K, float(p))
        idx = np.sort(rng.choice(len(book), size=size, replace=False))
    idx.setflags(write=False)
    return TrainingSubset(idx, float(p))


def sample_batch(subset, book, spec, batch_size, rng):
    """Fresh (inputs, targets) batch: x uniform over the subset, y = bpsk(encode(x)) + n."""
    j = rng.integers(0, len(subset.indices), size=batch_size)
    idx = subset.indices[j]
    y = transmit(book.symbols[idx], spec, rng)
    return y, book.info_words[idx].copy()


def _sigma_for(rho_t_db, rate):
    if rho_t_db is None or (math.isinf(rho_t_db) and rho_t_db > 0):
        return 0.0
    return sigma_from_ebn0(rho_t_db, rate)


class SamplePool:
    """Finite training set of ``size`` (codeword, unit noise) pairs.

    The pool is consumed sequentially in mini-batches; each pass ("epoch")
    over it uses a fresh permutation, so runs longer than the pool wrap
    around with reshuffling. The batch at a given step depends only on the
    seed and the step index, which makes interrupted runs resumable exactly.
    """

    def __init__(self, book, subset, size, sigma, seed, dtype=np.float32):
        rng = stream(seed, "pool")
        self.size = int(size)
        self.index = subset.indices[rng.integers(0, len(subset.indices), size=self.size)]
        self.noise = rng.standard_normal((self.size, book.code.N), dtype=np.float32)
        self.book, self.sigma, self.seed, self.dtype = book, float(sigma), seed, dtype
        self._symbols = book.symbols.astype(dtype)
        self._perms = {}

    def _perm(self, epoch):
        if epoch not in self._perms:
            if len(self._perms) > 2:
                self._perms.clear()
            self._perms[epoch] = stream(self.seed, "perm", epoch).permutation(self.size)
        return self._perms[epoch]

    def batch(self, step, batch_size):
        g = step * batch_size + np.arange(batch_size, dtype=np.int64)
        epochs, pos = np.divmod(g, self.size)
        rows = np.empty(batch_size, dtype=np.int64)
        for e in np.unique(epochs):
            sel = epochs == e
            rows[sel] = self._perm(int(e))[pos[sel]]
        idx = self.index[rows]
        y = self._symbols[idx]
        if self.sigma > 0:
            y = y + self.dtype(self.sigma) * self.noise[rows]
        return y, self.book.info_words[idx]


@dataclass
class TrainResult:
    model: object
    optimizer: Adam
    steps: int
    loss_trace: dict = field(default_factory=dict)


def _is_log_step(step):
    return step >= 1 and 10 ** round(math.log10(step)) == step


def train(model, book, subset, rho_t_db, steps, *, batch_size=128, num_train_samples=10**6,
          seed=0, adam=None, optimizer=None, start_step=0, pool=None, on_log_step=None,
          checkpoint_path=None):
    """Run ``steps`` Adam mini-batch steps on ``model`` in place.

    ``rho_t_db`` is the training Eb/N0; None or +inf trains without noise.
    Resuming with the optimizer of an earlier run and ``start_step`` equal to
    the steps already taken continues the identical sequence of batches and
    dropout masks. The loss is recorded at every power-of-ten step and at the
    last step; ``on_log_step(step, model)`` is called at the same points.
    On a non-finite loss the model and optimizer are written to
    ``checkpoint_path`` (if given) before the error propagates.
    """
    optimizer = optimizer or Adam(adam or AdamConfig())
    if pool is None:
        sigma = _sigma_for(rho_t_db, book.code.rate)
        pool = SamplePool(book, subset, num_train_samples, sigma, seed)
    trace = {}
    end = start_step + steps
    for s in range(start_step + 1, end + 1):
        inputs, targets = pool.batch(s - 1, batch_size)
        try:
            report = backward_and_step(model, inputs, targets, optimizer, rng=stream(seed, "dropout", s))
        except NumericalError as exc:
            if checkpoint_path is not None:
                save_model(checkpoint_path, model, optimizer,
                           extra={"failed_step": s, "diagnostic": exc.diagnostic})
            raise
        if _is_log_step(s) or s == end:
            trace[s] = report.loss
            if on_log_step is not None:
                on_log_step(s, model)
    return TrainResult(model, optimizer, end, trace)


def noise_spec(rho_t_db, rate, seed=0):
    """NoiseSpec for a training SNR; None or +inf gives the noiseless spec."""
    if rho_t_db is None:
        return NoiseSpec.noiseless(rate, seed)
    return NoiseSpec(rho_t_db, rate, seed)
