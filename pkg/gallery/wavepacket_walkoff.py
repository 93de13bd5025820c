# %% [markdown]
# # Group-delay walk-off
#
# Even with Delta L = 0 the two frequency orderings of the pair can arrive
# at slightly different times.  Choosing L4 and L4' to cancel that residual
# puts all four output terms on the same delay.  Lengthening L1 by 1 cm then
# shifts them by about 13 fs, far inside a 3 ps correlation time.

# %%
import math

from pfhyper.hilbert import BinGrid
from pfhyper.sagnac import C_LIGHT, SagnacConfig, phase_breakdown
from pfhyper.temporal import (compensate_lengths, correlation_time, frequency_visibility,
                              lobe_count, s14_residual, wavepacket)

omega_c = 2 * math.pi * C_LIGHT / 1550e-9
width = 2 * math.pi * 100e9
grid = BinGrid.from_offsets(2 * omega_c, [2 * math.pi * 1e12], width)
cfg = compensate_lengths(SagnacConfig(grid, *(1.0,) * 6, beat_length=4e-3))
print("compensated L4, L4' =", cfg.L4, cfg.L4p)

for name, c in (("compensated", cfg),
                ("L1 + 1 cm", cfg.with_lengths(L1=cfg.L1 + 0.01)),
                ("L1 + 10 m", cfg.with_lengths(L1=cfg.L1 + 10.0))):
    prof = wavepacket(c, width)
    delays = [f"{t * 1e12:.4f}" for t in phase_breakdown(c).delays]
    print(f"{name:12s} walk-off {abs(s14_residual(c)) * 1e15:10.2f} fs  "
          f"visibility {frequency_visibility(prof):.4f}  lobes {lobe_count(prof)}  delays (ps) {delays}")

print(f"correlation time {correlation_time(width) * 1e12:.2f} ps")
