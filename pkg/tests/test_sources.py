import math

import pytest

from pfhyper.hilbert import ModeLabel, StateError
from pfhyper.sources import SourceSpec, make_source_state, make_two_source_input

from conftest import grid


@pytest.mark.parametrize("n", [1, 2, 4])
def test_source_state_weights(n):
    g = grid(tuple(0.5 * (k + 1) for k in range(n)))
    s = make_source_state(SourceSpec(1, g, theta=0.4, phi_rp=1.1))
    assert len(s) == 2 * n
    assert s.norm_sq() == pytest.approx(1.0, abs=1e-15)
    ws, wi = g.pairs[0]
    hv = s.amp(ModeLabel(1, "H", ws), ModeLabel(1, "V", wi))
    vh = s.amp(ModeLabel(1, "V", ws), ModeLabel(1, "H", wi))
    assert abs(hv) == pytest.approx(1 / math.sqrt(2 * n))
    assert vh / hv == pytest.approx(complex(math.cos(1.1), math.sin(1.1)))


def test_phi_rp_is_reduced():
    assert SourceSpec(1, grid(), phi_rp=2 * math.pi + 0.5).phi_rp == pytest.approx(0.5)


def test_flat_top_needs_width():
    with pytest.raises(ValueError):
        SourceSpec(1, grid(), spectral_model="flat_top")
    SourceSpec(1, grid(width_thz=0.1), spectral_model="flat_top")
    with pytest.raises(ValueError):
        SourceSpec(1, grid(), spectral_model="lorentzian")


def test_two_source_input():
    s = make_two_source_input(SourceSpec(1, grid()), SourceSpec(2, grid(), theta=0.3))
    assert s.normalized
    assert len(s) == 4
    with pytest.raises(StateError):
        make_two_source_input(SourceSpec(1, grid()), SourceSpec(1, grid()))
