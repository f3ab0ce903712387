"""Picking the training SNR by normalized validation error (NVE).

Run with ``python demos/05_training_snr.py`` (a few minutes).
"""
# %%
from nndbench.codec import construct_code, enumerate_codebook
from nndbench.decoders import ArchitectureSpec
from nndbench.harness import (
    ExperimentConfig,
    make_training_subset,
    nnd_ber,
    select_training_snr,
)
from nndbench.map_oracle import map_ber

book = enumerate_codebook(construct_code(8, 4))
subset = make_training_subset(book, 1.0, seed=0)

# %% [markdown]
# One MLP per training SNR on a coarse grid, each validated at 0..8 dB
# against MAP on the same noise. NVE is the mean BER ratio, so 1.0 means
# MAP-level decoding. Training too clean leaves the decoder unprepared for
# noise, and training too noisy blurs the decision regions.

# %%
cfg = ExperimentConfig(archs=["mlp"], p_list=[1.0], train_snr_grid_db=[-2.0, 2.0, 6.0, 20.0],
                       max_steps=5000)
sel = select_training_snr(ArchitectureSpec("mlp", 8, 4), book, subset, cfg)
for rho, nve in sel.nve_table.items():
    mark = "  <- selected" if rho == sel.rho_t_db else ""
    print(f"rho_t = {rho:5.1f} dB   NVE = {nve:.3f}{mark}")

# %%
model = sel.models[sel.rho_t_db]
for ebn0 in (0, 2, 4, 6):
    print(f"{ebn0} dB: NND {nnd_ber(model, book, ebn0, 10**5, seed=ebn0):.3e}   "
          f"MAP {map_ber(book.code, ebn0, 10**5, seed=ebn0, book=book):.3e}")
