"""Polar codes: choosing the information set and encoding.

Run with ``python demos/01_polar_code.py``.
"""
# %%
import numpy as np

from nndbench.codec import bhattacharyya_parameters, construct_code, encode, enumerate_codebook

# %% [markdown]
# The Bhattacharyya parameter Z of each synthetic channel of a length-8
# polar transform (design Z = 0.5) ranks the channels by reliability.
# The K most reliable ones carry information, and the rest are frozen to 0.

# %%
for i, z in enumerate(bhattacharyya_parameters(8)):
    print(f"u{i}: Z = {float(z):.4f}")

code = construct_code(8, 4)
print("information positions:", code.info_positions)
print("frozen positions:     ", code.frozen_positions)

# %% [markdown]
# Encoding is a linear map over GF(2). Encoding XOR-ed messages gives the
# XOR of the codewords.

# %%
rng = np.random.default_rng(0)
a, b = rng.integers(0, 2, (2, 4), dtype=np.uint8)
print("x_a =", a, "-> c_a =", encode(code, a))
print("x_b =", b, "-> c_b =", encode(code, b))
print("linear:", np.array_equal(encode(code, a ^ b), encode(code, a) ^ encode(code, b)))

# %% [markdown]
# K = 4 gives 16 codewords. Their pairwise Hamming distances set how hard
# MAP decoding is.

# %%
book = enumerate_codebook(code)
dist = (book.codewords[:, None, :] != book.codewords[None, :, :]).sum(axis=2)
print("minimum distance:", dist[~np.eye(16, dtype=bool)].min())
print("BPSK images (first 4 rows):\n", book.symbols[:4])
