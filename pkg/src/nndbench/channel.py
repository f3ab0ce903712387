"""BPSK modulation over an AWGN channel."""
import math
from dataclasses import dataclass, field

import numpy as np


def bpsk_modulate(u):
    """Map bits to symbols: 0 -> +1.0, 1 -> -1.0."""
    return 1.0 - 2.0 * np.asarray(u, dtype=np.float64)


def sigma_from_ebn0(ebn0_db, rate):
    """Noise standard deviation for a given Eb/N0 (dB) and code rate.

    Unit-energy BPSK symbols carry ``rate`` information bits each, so
    sigma**2 = 1 / (2 * rate * 10**(ebn0_db / 10)).
    """
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


@dataclass(frozen=True)
class NoiseSpec:
    """Channel operating point. ``ebn0_db=inf`` (or ``noiseless()``) gives sigma = 0."""

    ebn0_db: float
    rate: float
    seed: int = 0
    sigma: float = field(init=False)

    def __post_init__(self):
        if math.isinf(self.ebn0_db) and self.ebn0_db > 0:
            sigma = 0.0
        else:
            sigma = sigma_from_ebn0(self.ebn0_db, self.rate)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def noiseless(cls, rate, seed=0):
        return cls(math.inf, rate, seed)


def transmit(s, spec, rng):
    """Return y = s + n with n ~ N(0, spec.sigma**2) drawn from ``rng``.

    The noise is always drawn (so the generator advances identically whatever
    sigma is) and then scaled; sigma = 0 therefore returns ``s`` exactly.
    """
    s = np.asarray(s, dtype=np.float64)
    n = rng.standard_normal(s.shape)
    if spec.sigma == 0.0:
        return s.copy()
    return s + spec.sigma * n
