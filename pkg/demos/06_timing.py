"""Per-sample forward and backward cost of the three decoders.

Run with ``python demos/06_timing.py``.
"""
# %%
import numpy as np

from nndbench.decoders import ArchitectureSpec, build, param_count
from nndbench.harness import time_per_sample

# %% [markdown]
# Median wall-clock time of one single-sample pass. The backward number is a
# training-mode forward pass plus backpropagation. The LSTM decoder walks
# the codeword one symbol at a time with a 256-wide state, so it is the
# slowest by a wide margin.

# %%
for n in (8, 16, 32):
    for kind in ("mlp", "cnn", "rnn"):
        spec = ArchitectureSpec(kind, n, n // 2)
        model = build(spec, np.random.default_rng(0))
        fwd = time_per_sample(model, "forward", 200)
        bwd = time_per_sample(model, "backward", 200)
        pc = param_count(spec)
        print(f"N={n:2d} {kind}: {pc.total_with_biases:7d} params   "
              f"forward {fwd:8.1f} us   backward {bwd:8.1f} us")
