"""Chunked Monte-Carlo bit-error-rate estimation shared by all decoders."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._rng import stream
from .channel import sigma_from_ebn0

CHUNK_SIZE = 4096


def _sigma(ebn0_db, rate):
    return 0.0 if np.isposinf(ebn0_db) else sigma_from_ebn0(ebn0_db, rate)


def monte_carlo_ber(book, decide, ebn0_db, num_samples, seed, threads=1, candidates=None):
    """Information-bit error rate of ``decide`` over ``num_samples`` channel uses.

    ``decide`` maps a (batch, N) array of received vectors to a (batch, K)
    array of bit estimates. Information words are drawn uniformly from
    ``candidates`` (codebook indices; the full codebook when None).

    Work is split into fixed-size chunks, each with its own random stream
    keyed by (seed, chunk index). The result therefore depends on the seed
    only, never on ``threads``, and two decoders evaluated with the same seed
    see identical noise realizations.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    code = book.code
    sigma = _sigma(ebn0_db, code.rate)
    symbols = book.symbols
    pool = None if candidates is None else np.asarray(candidates, dtype=np.int64)
    starts = range(0, num_samples, CHUNK_SIZE)

    def run_chunk(chunk):
        size = min(CHUNK_SIZE, num_samples - chunk * CHUNK_SIZE)
        rng = stream(seed, "mc", chunk)
        if pool is None:
            idx = rng.integers(0, len(book), size=size)
        else:
            idx = pool[rng.integers(0, len(pool), size=size)]
        noise = rng.standard_normal((size, code.N))
        y = symbols[idx] + sigma * noise if sigma > 0 else symbols[idx]
        est = np.asarray(decide(y))
        return int(np.count_nonzero(est != book.info_words[idx]))

    chunks = range(len(starts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            errors = sum(ex.map(run_chunk, chunks))
    else:
        errors = sum(map(run_chunk, chunks))
    return errors / (code.K * num_samples)
