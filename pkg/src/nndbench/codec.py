"""Polar code construction, encoding and codebook enumeration.

Bit vectors are plain ``uint8`` numpy arrays holding 0/1 values; batches of
words are 2-D arrays with one word per row.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, ResourceError

MAX_ENUMERABLE_K = 24


def _is_power_of_two(n):
    return isinstance(n, (int, np.integer)) and n >= 2 and (n & (n - 1)) == 0


def bhattacharyya_parameters(N):
    """Exact Bhattacharyya parameters of the ``N`` synthetic channels.

    Starts from the erasure channel with Z = 1/2 and applies the polarizing
    recursion Z -> (2Z - Z**2, Z**2) once per level. Values are kept as
    ``Fraction`` so that ties are exact.
    """
    if not _is_power_of_two(N):
        raise ConfigurationError(f"block length must be a power of two >= 2, got {N}")
    z = [Fraction(1, 2)]
    while len(z) < N:
        z = [v for zi in z for v in (2 * zi - zi * zi, zi * zi)]
    return z


@dataclass(frozen=True)
class PolarCode:
    """An (N, K) polar code with frozen bits fixed to 0."""

    N: int
    K: int
    info_positions: tuple

    @property
    def n(self):
        return self.N.bit_length() - 1

    @property
    def rate(self):
        return self.K / self.N

    @property
    def frozen_positions(self):
        info = set(self.info_positions)
        return tuple(i for i in range(self.N) if i not in info)


def construct_code(N, K):
    """Build the (N, K) polar code whose information set holds the K most
    reliable synthetic channels (smallest Bhattacharyya parameter).

    Ties are broken toward the higher index.
    """
    if not _is_power_of_two(N):
        raise ConfigurationError(f"block length must be a power of two >= 2, got {N}")
    if not isinstance(K, (int, np.integer)) or not 1 <= K <= N:
        raise ConfigurationError(f"need 1 <= K <= N, got K={K}, N={N}")
    z = bhattacharyya_parameters(N)
    order = sorted(range(N), key=lambda i: (z[i], -i))
    return PolarCode(int(N), int(K), tuple(sorted(order[:K])))


def polar_transform(u):
    """Multiply rows of ``u`` by the n-fold Kronecker power of [[1,0],[1,1]] (mod 2).

    Natural index order, no bit reversal. Accepts shape (N,) or (batch, N).
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    half = 1
    while half < N:
        view = x.reshape(x.shape[:-1] + (N // (2 * half), 2, half))
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def encode(code, x):
    """Encode information word(s) ``x`` (length K, or a batch of rows) into
    codeword(s) of length N."""
    x = np.asarray(x)
    if x.shape[-1:] != (code.K,):
        raise ValueError(f"expected information words of length {code.K}, got shape {x.shape}")
    if x.size and not np.isin(x, (0, 1)).all():
        raise ValueError("information bits must be 0 or 1")
    u = np.zeros(x.shape[:-1] + (code.N,), dtype=np.uint8)
    u[..., list(code.info_positions)] = x
    return polar_transform(u)


def int_to_bits(indices, width):
    """Binary expansions of ``indices``, most significant bit first."""
    indices = np.asarray(indices, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((indices[..., None] >> shifts) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Codebook:
    """All 2**K (information word, codeword) pairs, row i holding the K-bit
    binary expansion of i."""

    code: PolarCode
    info_words: np.ndarray
    codewords: np.ndarray

    def __len__(self):
        return self.info_words.shape[0]

    @property
    def symbols(self):
        """BPSK images of the codewords (0 -> +1, 1 -> -1)."""
        return 1.0 - 2.0 * self.codewords.astype(np.float64)


def enumerate_codebook(code):
    if code.K > MAX_ENUMERABLE_K:
        raise ResourceError(
            f"codebook of 2**{code.K} words exceeds the enumeration guard K <= {MAX_ENUMERABLE_K}"
        )
    info = int_to_bits(np.arange(2**code.K), code.K)
    words = encode(code, info)
    info.setflags(write=False)
    words.setflags(write=False)
    return Codebook(code, info, words)
