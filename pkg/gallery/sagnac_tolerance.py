# %% [markdown]
# # How well must the loop lengths match?
#
# In the Sagnac source the pair leaving on each path picks up a
# birefringent phase that depends on the signed length mismatch Delta L.
# The polarisation concurrence falls as |cos(b Delta L / 2)|.

# %%
import math

import numpy as np

from pfhyper.entanglement import concurrence, reduce
from pfhyper.hilbert import BinGrid
from pfhyper.sagnac import (C_LIGHT, SagnacConfig, concurrence_sagnac_analytic, simulate,
                            tolerance_for_concurrence)

omega_c = 2 * math.pi * C_LIGHT / 1550e-9
grid = BinGrid.from_offsets(2 * omega_c, [2 * math.pi * 1e12])  # bins 2 THz apart
cfg = SagnacConfig(grid, *(1.0,) * 6, beat_length=4e-3, wavelength=1550e-9)

for c in (0.999, 0.99):
    print(f"C >= {c}: |Delta L| <= {tolerance_for_concurrence(cfg, c) * 100:.3f} cm")

# %% [markdown]
# Full propagation agrees with the closed form.

# %%
for extra_cm in np.linspace(0, 3, 7):
    c = cfg.with_lengths(L4p=1.0 + extra_cm / 100)
    num = concurrence(reduce(simulate(c))[0])
    print(f"Delta L = {c.delta_L * 100:4.1f} cm  numeric {num:.6f}  analytic {concurrence_sagnac_analytic(c):.6f}")
