"""BER evaluation, NVE-based training-SNR selection and timing."""
import time
from dataclasses import dataclass, field

import numpy as np

from .._rng import derive_seed, stream
from ..decoders import build, decode
from ..errors import NumericalError
from ..map_oracle import map_ber
from ..neuralnet import AdamConfig, compute_gradients
from ..simulate import monte_carlo_ber
from .training import train

EVAL_BATCH = 4096


def _decider(model):
    def decide(y):
        return np.concatenate([decode(model, y[i:i + EVAL_BATCH])
                               for i in range(0, len(y), EVAL_BATCH)])
    return decide


def nnd_ber(model, book, ebn0_db, num_samples, seed, restrict_to="full", subset=None, threads=1):
    """Monte-Carlo information-bit error rate of one-shot decoding with ``model``.

    ``restrict_to="subset"`` draws the transmitted words from ``subset`` only.
    With the same seed, the channel realizations match those of ``map_ber``.
    """
    if restrict_to not in ("full", "subset"):
        raise ValueError(f"restrict_to must be 'full' or 'subset', got {restrict_to!r}")
    candidates = None
    if restrict_to == "subset":
        if subset is None:
            raise ValueError("restrict_to='subset' needs a subset")
        candidates = subset.indices
    return monte_carlo_ber(book, _decider(model), ebn0_db, num_samples, seed,
                           threads=threads, candidates=candidates)


def noiseless_ber(model, book, indices=None):
    """Exact BER over noiseless transmissions of the given codebook entries
    (all of them by default), one transmission each."""
    idx = np.arange(len(book)) if indices is None else np.asarray(indices)
    est = _decider(model)(book.symbols[idx])
    return float(np.count_nonzero(est != book.info_words[idx])) / est.size


class UndefinedRatioError(ZeroDivisionError):
    pass


def compute_nve(ber_nnd, ber_map):
    """Mean over validation points of BER_NND / BER_MAP."""
    ber_nnd = np.asarray(ber_nnd, dtype=np.float64)
    ber_map = np.asarray(ber_map, dtype=np.float64)
    if ber_nnd.shape != ber_map.shape or ber_nnd.ndim != 1 or ber_nnd.size == 0:
        raise ValueError("need two nonempty BER lists of equal length")
    if np.any(ber_map <= 0):
        raise UndefinedRatioError("MAP BER is zero at a validation point; drop that point")
    return float(np.mean(ber_nnd / ber_map))


@dataclass
class SnrSelection:
    rho_t_db: float
    nve_table: dict
    val_points: list
    dropped_points: list
    models: dict = field(default_factory=dict, repr=False)
    train_results: dict = field(default_factory=dict, repr=False)


def validation_map_bers(book, config, threads=1):
    """MAP BER at each validation SNR, keeping only points where it is nonzero."""
    kept, dropped = {}, []
    for v in config.val_snr_grid_db:
        b = map_ber(book.code, v, config.num_val_samples, derive_seed(config.seed, "val", v),
                    threads=threads, book=book)
        if b > 0:
            kept[v] = b
        else:
            dropped.append(v)
    return kept, dropped


def select_training_snr(arch_spec, book, subset, config, threads=1, map_val=None, trainer=None):
    """Train one model per grid SNR and pick the one with the least NVE.

    Ties go to the lower SNR. Validation runs at ``config.val_snr_grid_db``
    with ``config.num_val_samples`` samples per point; NND and MAP share the
    channel realizations at each point. Validation points where the MAP BER
    is zero are dropped and listed in ``dropped_points``.

    ``trainer(arch_spec, rho_t)`` may be supplied to obtain the trained
    (model, TrainResult) pair for a grid point, e.g. from a checkpoint. A
    trainer returning None marks the point as failed (NVE None).
    """
    if map_val is None:
        map_val, dropped = validation_map_bers(book, config, threads)
    else:
        dropped = [v for v in config.val_snr_grid_db if v not in map_val]
    if not map_val:
        raise ValueError("MAP BER is zero at every validation point; increase num_val_samples")
    points = sorted(map_val)
    trainer = trainer or (lambda spec, rho: train_cell(spec, book, subset, config, rho))
    table, models, results = {}, {}, {}
    for rho in config.train_snr_grid_db:
        trained = trainer(arch_spec, rho)
        if trained is None:
            # training diverged for this grid point; it cannot be selected
            table[rho] = None
            continue
        model, result = trained
        nnd = [nnd_ber(model, book, v, config.num_val_samples,
                       derive_seed(config.seed, "val", v), threads=threads) for v in points]
        table[rho] = compute_nve(nnd, [map_val[v] for v in points])
        models[rho], results[rho] = model, result
    finite = [r for r in table if table[r] is not None]
    if not finite:
        raise NumericalError("training diverged at every grid SNR")
    best = min(finite, key=lambda r: (table[r], r))
    return SnrSelection(best, table, points, dropped, models, results)


def train_cell(arch_spec, book, subset, config, rho_t_db, on_log_step=None, checkpoint_path=None):
    """Build and train a fresh model for one (architecture, p, training SNR) cell."""
    keys = (arch_spec.kind, float(subset.p), "inf" if rho_t_db is None else float(rho_t_db))
    model = build(arch_spec, stream(config.seed, "init", *keys))
    result = train(
        model, book, subset, rho_t_db, config.max_steps,
        batch_size=config.batch_size,
        num_train_samples=config.num_train_samples,
        seed=derive_seed(config.seed, "train", *keys),
        adam=AdamConfig(learning_rate=config.learning_rate),
        on_log_step=on_log_step,
        checkpoint_path=checkpoint_path,
    )
    return model, result


def time_per_sample(model, direction="forward", repetitions=200, warmup=10, seed=0):
    """Median wall-clock microseconds for one single-sample pass.

    ``forward`` is an inference pass; ``backward`` is a training-mode forward
    pass plus backpropagation of the MSE loss (no optimizer update).
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if repetitions < 100:
        raise ValueError("repetitions must be >= 100")
    rng = stream(seed, "timing")
    N = model.meta["spec"]["N"]
    K = model.meta["spec"]["K"]
    y = (1.0 - 2.0 * rng.integers(0, 2, size=(1, N))).astype(model.dtype)
    x = rng.integers(0, 2, size=(1, K)).astype(model.dtype)

    if direction == "forward":
        def run():
            model.forward(y, train=False)
    else:
        def run():
            compute_gradients(model, y, x, train=True, rng=rng)

    for _ in range(warmup):
        run()
    samples = np.empty(repetitions)
    for i in range(repetitions):
        t0 = time.perf_counter()
        run()
        samples[i] = time.perf_counter() - t0
    return float(np.median(samples) * 1e6)
