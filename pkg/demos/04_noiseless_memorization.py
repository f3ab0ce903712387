"""Noiseless training: memorizing the codebook, and what happens when only
part of it is seen.

Run with ``python demos/04_noiseless_memorization.py`` (about a minute).
"""
# %%
import numpy as np

from nndbench.codec import construct_code, enumerate_codebook
from nndbench.decoders import ArchitectureSpec, build
from nndbench.harness import make_training_subset, noiseless_ber, train

book = enumerate_codebook(construct_code(8, 4))

# %% [markdown]
# Train an MLP on noiseless codewords and probe the exact BER over the
# training subset and over the whole codebook at every power-of-ten step.

# %%
for p in (1.0, 0.4):
    subset = make_training_subset(book, p, seed=0)
    model = build(ArchitectureSpec("mlp", 8, 4), np.random.default_rng(0))
    rows = []

    def probe(step, m, subset=subset):
        rows.append((step, noiseless_ber(m, book, subset.indices), noiseless_ber(m, book)))

    train(model, book, subset, None, 20000, seed=0, on_log_step=probe)
    print(f"p = {p:.0%} ({len(subset)} of 16 words)")
    for step, sub, full in rows:
        print(f"  step {step:>6}: subset BER {sub:.3f}   full BER {full:.3f}")

# %% [markdown]
# With all 16 words the full-codebook BER reaches zero. With 6 words the
# network fits those exactly, yet errs on the unseen ones.
