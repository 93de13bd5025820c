# %% [markdown]
# # Cross-checking against operator algebra
#
# The oracle expands the creation-operator products term by term with exact
# rational phases and compares them with the sparse-state propagation.

# %%
import math

import numpy as np

from pfhyper.hilbert import BinGrid
from pfhyper.oracle import compare_with_state, sagnac_monomials
from pfhyper.sagnac import C_LIGHT, SagnacConfig, simulate

rng = np.random.default_rng(1)
omega_c = 2 * math.pi * C_LIGHT / 1550e-9
for n in (1, 2, 3):
    grid = BinGrid.from_offsets(2 * omega_c, [2 * math.pi * 0.5e12 * (k + 1) for k in range(n)])
    lengths = rng.uniform(0.5, 2.0, 6)
    cfg = SagnacConfig(grid, *lengths, beat_length=4e-3)
    err = compare_with_state(sagnac_monomials(cfg), simulate(cfg))
    print(f"{n} bin pair(s): max amplitude discrepancy {err:.2e}")
