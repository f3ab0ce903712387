from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nndbench.codec import (
    bhattacharyya_parameters,
    construct_code,
    encode,
    enumerate_codebook,
    int_to_bits,
    polar_transform,
)
from nndbench.errors import ConfigurationError, ResourceError


def z_by_bit_walk(N, i):
    """Reference: walk the index bits from the most significant one."""
    z = Fraction(1, 2)
    for b in format(i, f"0{N.bit_length() - 1}b"):
        z = z * z if b == "1" else 2 * z - z * z
    return z


def info_set_reference(N, K):
    z = [z_by_bit_walk(N, i) for i in range(N)]
    ranked = sorted(range(N), key=lambda i: (z[i], -i))
    return tuple(sorted(ranked[:K]))


def generator_matrix(N):
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.array([[1]], dtype=np.int64)
    while G.shape[0] < N:
        G = np.kron(G, F)
    return G


def test_z_values_n4():
    z = bhattacharyya_parameters(4)
    assert [float(v) for v in z] == [0.9375, 0.5625, 0.4375, 0.0625]


@pytest.mark.parametrize("N,K,expected", [
    (4, 2, (2, 3)),
    (2, 2, (0, 1)),
    (2, 1, (1,)),
    (8, 4, (3, 5, 6, 7)),
])
def test_construct_golden(N, K, expected):
    assert construct_code(N, K).info_positions == expected


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32, 64])
def test_construct_matches_bit_walk_reference(N):
    for K in range(1, N + 1):
        assert construct_code(N, K).info_positions == info_set_reference(N, K)


def test_construct_deterministic():
    assert construct_code(32, 16) == construct_code(32, 16)


def test_frozen_complement():
    code = construct_code(16, 8)
    assert sorted(code.info_positions + code.frozen_positions) == list(range(16))
    assert code.rate == 0.5


@pytest.mark.parametrize("N,K", [(6, 3), (1, 1), (0, 0), (8, 0), (8, 9), (8, -1)])
def test_construct_rejects_bad_config(N, K):
    with pytest.raises(ConfigurationError):
        construct_code(N, K)


@pytest.mark.parametrize("x,expected", [([0, 0], [0, 0, 0, 0]), ([1, 0], [1, 0, 1, 0])])
def test_encode_examples_n4(x, expected):
    code = construct_code(4, 2)
    assert encode(code, x).tolist() == expected


def test_encode_n2_repetition():
    assert encode(construct_code(2, 1), [1]).tolist() == [1, 1]


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32])
def test_encode_matches_kronecker_product(N):
    rng = np.random.default_rng(N)
    code = construct_code(N, N // 2)
    x = rng.integers(0, 2, size=(200, code.K))
    u = np.zeros((200, N), dtype=np.int64)
    u[:, list(code.info_positions)] = x
    expected = (u @ generator_matrix(N)) % 2
    np.testing.assert_array_equal(encode(code, x), expected)


def test_encode_length_mismatch():
    with pytest.raises(ValueError):
        encode(construct_code(8, 4), [1, 0, 1])


def test_encode_rejects_non_bits():
    with pytest.raises(ValueError):
        encode(construct_code(4, 2), [2, 0])


@pytest.mark.parametrize("N", [8, 16, 32])
def test_linearity(N):
    rng = np.random.default_rng(100 + N)
    code = construct_code(N, N // 2)
    a = rng.integers(0, 2, size=(1000, code.K), dtype=np.uint8)
    b = rng.integers(0, 2, size=(1000, code.K), dtype=np.uint8)
    np.testing.assert_array_equal(encode(code, a ^ b), encode(code, a) ^ encode(code, b))


@pytest.mark.parametrize("N", [8, 16, 32])
def test_injectivity(N):
    book = enumerate_codebook(construct_code(N, N // 2))
    assert len({w.tobytes() for w in book.codewords}) == 2 ** (N // 2)


@pytest.mark.parametrize("N", [8, 16])
def test_frozen_positions_of_u_are_zero(N):
    # the transform is its own inverse mod 2, so it recovers u from a codeword
    code = construct_code(N, N // 2)
    book = enumerate_codebook(code)
    u = polar_transform(book.codewords)
    assert not u[:, list(code.frozen_positions)].any()
    np.testing.assert_array_equal(u[:, list(code.info_positions)], book.info_words)


def test_codebook_small_examples():
    assert len(enumerate_codebook(construct_code(2, 1))) == 2
    book = enumerate_codebook(construct_code(4, 2))
    assert len(book) == 4
    assert [0, 0, 0, 0] in book.codewords.tolist()


def test_codebook_n8(book8):
    assert len(book8) == 16
    assert len({w.tobytes() for w in book8.codewords}) == 16
    for i, w in enumerate(book8.info_words):
        assert int("".join(map(str, w)), 2) == i


def test_codebook_guard():
    with pytest.raises(ResourceError):
        enumerate_codebook(construct_code(32, 25))


def test_codebook_symbols(book8):
    np.testing.assert_array_equal(book8.symbols, 1 - 2 * book8.codewords.astype(float))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**12 - 1))
def test_int_to_bits_roundtrip(i):
    bits = int_to_bits(i, 12)
    assert int("".join(map(str, bits)), 2) == i
