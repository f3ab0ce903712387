import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields

from ..decoders import KINDS
from ..errors import ConfigurationError


def _grid(start, stop, step):
    return [float(v) for v in range(start, stop + 1, step)]


@dataclass
class ExperimentConfig:
    """Declarative description of one benchmark run.

    Defaults follow the reference protocol (10**6 training samples, 10**5 test
    samples, mini-batches of 128, dropout 0.1, a 12-point training-SNR grid
    from -2 to 20 dB) except ``max_steps``, which is set to a desk-scale
    2 * 10**4 mini-batch steps, and ``num_val_samples``.
    """

    n: int = 8
    k: int = 4
    archs: list = field(default_factory=lambda: list(KINDS))
    p_list: list = field(default_factory=lambda: [0.4, 0.6, 0.8, 1.0])
    train_snr_grid_db: list = field(default_factory=lambda: _grid(-2, 20, 2))
    eval_snr_grid_db: list = field(default_factory=lambda: _grid(0, 8, 1))
    val_snr_grid_db: list = field(default_factory=lambda: _grid(0, 8, 1))
    num_train_samples: int = 10**6
    num_test_samples: int = 10**5
    num_val_samples: int = 10**4
    batch_size: int = 128
    max_steps: int = 2 * 10**4
    noiseless: bool = False
    seed: int = 0
    learning_rate: float = 1e-3
    dropout: float = 0.1
    mlp_hidden: list = field(default_factory=lambda: [64, 32, 16])
    cnn_channels: list = field(default_factory=lambda: [8, 16, 32])
    rnn_hidden: int = 256
    measure_timing: bool = True
    timing_repetitions: int = 200

    def __post_init__(self):
        self.archs = [a.lower() for a in self.archs]
        self.validate()

    def validate(self):
        def bad(msg):
            raise ConfigurationError(msg)

        if self.n < 2 or self.n & (self.n - 1):
            bad(f"n must be a power of two >= 2, got {self.n}")
        if not 1 <= self.k <= self.n:
            bad(f"need 1 <= k <= n, got k={self.k}")
        if self.k > 24:
            bad("k > 24 cannot be enumerated")
        for a in self.archs:
            if a not in KINDS:
                bad(f"unknown architecture {a!r}")
        if len(set(self.archs)) != len(self.archs):
            bad("duplicate architectures")
        for p in self.p_list:
            if not 0.0 < p <= 1.0:
                bad(f"training ratio must lie in (0, 1], got {p}")
        for name in ("p_list", "train_snr_grid_db", "eval_snr_grid_db", "val_snr_grid_db"):
            grid = getattr(self, name)
            if not grid:
                bad(f"{name} must be nonempty")
            if list(grid) != sorted(grid):
                bad(f"{name} must be sorted")
            if not all(math.isfinite(v) for v in grid):
                bad(f"{name} must hold finite values")
        for name in ("num_train_samples", "num_test_samples", "num_val_samples", "batch_size",
                     "timing_repetitions"):
            if getattr(self, name) < 1:
                bad(f"{name} must be >= 1")
        if self.max_steps < 0:
            bad("max_steps must be >= 0")
        if not 0.0 <= self.dropout < 1.0:
            bad("dropout must lie in [0, 1)")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a JSON object")
        return cls.from_dict(data)

    def canonical_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self):
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
