"""Exhaustive MAP decoding over the full codebook.

With equiprobable information words and AWGN the posterior is maximized by
the codeword whose BPSK image is nearest to the received vector, so decoding
is a minimum squared-Euclidean-distance search.
"""
from dataclasses import dataclass

import numpy as np

from .codec import enumerate_codebook
from .simulate import monte_carlo_ber


@dataclass(frozen=True)
class MapDecision:
    info_bits: np.ndarray
    codeword_index: int
    metric: float


def distance_metrics(y, book):
    """Squared distances ||y - bpsk(c_i)||**2, shape (batch, 2**K).

    Expanded as ||y||**2 - 2<y, s_i> + N since every symbol has unit energy.
    """
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    corr = y @ book.symbols.T
    return (y * y).sum(axis=1, keepdims=True) - 2.0 * corr + book.code.N


def map_decode_indices(y, book):
    """Batch MAP decisions as codeword indices; ties go to the smallest index."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if y.shape[1] != book.code.N:
        raise ValueError(f"received vectors must have length {book.code.N}, got {y.shape[1]}")
    # argmin returns the first minimum, which is the smallest index
    return np.argmin(distance_metrics(y, book), axis=1)


def map_decode(y, book):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != book.code.N:
        raise ValueError(f"received vector must have length {book.code.N}, got shape {y.shape}")
    d = distance_metrics(y, book)[0]
    i = int(np.argmin(d))
    return MapDecision(book.info_words[i].copy(), i, float(d[i]))


def map_ber(code, ebn0_db, num_samples, seed, threads=1, book=None):
    """Monte-Carlo BER of MAP decoding at ``ebn0_db``."""
    book = enumerate_codebook(code) if book is None else book
    return monte_carlo_ber(
        book,
        lambda y: book.info_words[map_decode_indices(y, book)],
        ebn0_db,
        num_samples,
        seed,
        threads=threads,
    )
