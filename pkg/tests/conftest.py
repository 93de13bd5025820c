import math

import numpy as np
import pytest

from pfhyper.elements import Dispersion
from pfhyper.hilbert import BinGrid
from pfhyper.sagnac import C_LIGHT, SagnacConfig

OMEGA_C = 2 * math.pi * C_LIGHT / 1550e-9
PUMP = 2 * OMEGA_C
THZ = 2 * math.pi * 1e12


def grid(offsets_thz=(1.0,), width_thz=None):
    width = None if width_thz is None else width_thz * THZ
    return BinGrid.from_offsets(PUMP, [o * THZ for o in offsets_thz], width)


def random_offsets(rng, n):
    return tuple(sorted(rng.choice(np.arange(1, 20), size=n, replace=False) * 0.25))


def random_sagnac(rng, n_bins=1, gvd=False, width_thz=None):
    """Sagnac config with random lengths (0.5-2 m) and PMF parameters."""
    g = grid(random_offsets(rng, n_bins), width_thz)
    lengths = {n: float(rng.uniform(0.5, 2.0)) for n in ("L1", "L2", "L3", "L3p", "L4", "L4p")}
    if not gvd:
        return SagnacConfig(g, beat_length=float(rng.uniform(2e-3, 10e-3)), **lengths)
    ng = 1.468 / C_LIGHT
    m = float(rng.uniform(0.5e-12, 2e-12))
    k0 = 1.444 * OMEGA_C / C_LIGHT
    h = Dispersion(k0, ng - m / 2, float(rng.uniform(1e-26, 3e-26)))
    v = Dispersion(k0 + 2 * math.pi / 4e-3, ng + m / 2, float(rng.uniform(1e-26, 3e-26)))
    return SagnacConfig(g, h=h, v=v, **lengths)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def report(number, title, ok, detail=""):
    """Record one acceptance criterion outcome; printed in the terminal summary."""
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
