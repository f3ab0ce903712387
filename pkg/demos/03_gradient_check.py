"""Checking hand-written backpropagation against finite differences.

Run with ``python demos/03_gradient_check.py`` (the full LSTM decoder takes
about half a minute, the rest seconds).
"""
# %%
from nndbench.checks import TARGETS, run_gradcheck

# %% [markdown]
# Each target is a small network built around one layer type, or one of the
# three full decoders at N = 8. Errors are the largest relative difference
# between the analytic gradient and a central difference with h = 1e-5.
#
# The full LSTM decoder has many tiny gradients (around 1e-9). A float64
# difference quotient cannot resolve those, so its reference is computed in
# long double. The small LSTM target shows the two agree where both work.

# %%
for name, target in TARGETS.items():
    err = run_gradcheck(name)
    print(f"{name:6s} ({target.precision:8s}) max relative error {err:.2e}")

print("lstm, double   :", f"{run_gradcheck('lstm', precision='double'):.2e}")
print("lstm, extended :", f"{run_gradcheck('lstm', precision='extended'):.2e}")
