"""MAP decoding over BPSK/AWGN as the reference for every neural decoder.

Run with ``python demos/02_map_baseline.py``.
"""
# %%
import numpy as np

from nndbench.channel import NoiseSpec, sigma_from_ebn0, transmit
from nndbench.codec import construct_code, enumerate_codebook
from nndbench.map_oracle import map_ber, map_decode

code = construct_code(8, 4)
book = enumerate_codebook(code)

# %% [markdown]
# Eb/N0 maps to the noise standard deviation through the code rate. At rate
# 1/2, 0 dB gives sigma = 1.

# %%
for ebn0 in (0, 2, 4, 6):
    print(f"Eb/N0 = {ebn0} dB -> sigma = {sigma_from_ebn0(ebn0, code.rate):.4f}")

# %% [markdown]
# One received vector, decoded by exhaustive nearest-codeword search.

# %%
rng = np.random.default_rng(1)
y = transmit(book.symbols[9], NoiseSpec(2.0, code.rate), rng)
d = map_decode(y, book)
print("sent   ", book.info_words[9])
print("decided", d.info_bits, "squared distance", round(d.metric, 3))

# %% [markdown]
# BER curve. The same seed at two thread counts gives the same number,
# because the Monte-Carlo work is split into fixed chunks.

# %%
for ebn0 in (0, 2, 4, 6):
    print(f"{ebn0} dB: MAP BER = {map_ber(code, ebn0, 10**5, seed=ebn0):.3e}")
print("thread-invariant:", map_ber(code, 3, 20000, 5, threads=1) == map_ber(code, 3, 20000, 5, threads=2))
