import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfhyper.elements import (PBS_REFLECT_H_MAP, SAGNAC_PBS_MAP, Dispersion, ElementDescriptor,
                              FiberSegment, apply_bs, apply_chain, apply_cross_splice,
                              apply_fiber, apply_pbs, bs_matrix)
from pfhyper.hilbert import ModeLabel, StateError, make_state, normalize
from pfhyper.sources import SourceSpec, make_source_state, make_two_source_input

from conftest import OMEGA_C, grid

H = Dispersion(7.0e6, 4.9e-9, 2e-26)
V = Dispersion(7.0e6 + 1570.0, 4.9e-9 + 1.3e-12, 2.1e-26)


def seg(length):
    return FiberSegment(length, H, V, OMEGA_C)


def test_bs_matrix_unitary():
    u = bs_matrix()
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-15)


def test_bs_rejects_foreign_paths():
    s = make_state([((ModeLabel(5, "H", 1e15), ModeLabel(1, "V", 1e15)), 1)])
    with pytest.raises(StateError, match="outside"):
        apply_bs(s)


def test_single_source_through_bs_bunches():
    s = apply_bs(make_source_state(SourceSpec(1, grid())))
    bunched = [a for (m1, m2), a in s.items() if m1.path == m2.path]
    assert len(bunched) == 4
    # each pair term a+a+ picks up 1/2 (and -1/2) on same-path outputs
    assert all(abs(a) * math.sqrt(2) == pytest.approx(0.5) for a in bunched)


@pytest.mark.parametrize("mapping", [SAGNAC_PBS_MAP, PBS_REFLECT_H_MAP])
def test_pbs_is_a_permutation(mapping):
    assert len(set(mapping.values())) == 4
    s = make_two_source_input(SourceSpec(1, grid((1, 2))), SourceSpec(2, grid((1, 2)), 0.3))
    out = apply_pbs(s, mapping)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-15)
    assert sorted(abs(a) for a in out.amplitudes.values()) == pytest.approx(
        sorted(abs(a) for a in s.amplitudes.values()))


def test_fiber_phase_matches_direct_product():
    w = OMEGA_C + 3e12
    s = seg(1.0)
    d = w - OMEGA_C
    k = V.k0 + V.inv_vg * d + 0.5 * V.gvd * d * d
    assert s.wavenumber("V", w) == pytest.approx(k, rel=1e-15)
    assert math.remainder(s.phase("V", w) - k * 1.0, 2 * math.pi) == pytest.approx(0, abs=1e-6)


def test_fiber_segment_rejects_negative_length():
    with pytest.raises(ValueError):
        seg(-1.0)


def _state():
    return make_two_source_input(SourceSpec(1, grid((1.0, 1.5))), SourceSpec(2, grid((1.0, 1.5))))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_fiber_additivity(a, b):
    s = _state()
    one = apply_fiber(apply_fiber(s, seg(a), 1), seg(b), 1)
    both = apply_fiber(s, seg(a + b), 1)
    for k in s.amplitudes:
        assert one.amp(*k) == pytest.approx(both.amp(*k), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 3.0))
def test_fiber_is_unitary(length):
    out = apply_fiber(_state(), seg(length), 2)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-14)


def test_cross_splice_is_an_involution():
    s = _state()
    twice = apply_cross_splice(apply_cross_splice(s, 1), 1)
    assert twice.amplitudes == pytest.approx(s.amplitudes)


def test_cross_splice_does_not_commute_with_birefringent_fiber():
    s = _state()
    a = apply_fiber(apply_cross_splice(s, 1), seg(0.37), 1)
    b = apply_cross_splice(apply_fiber(s, seg(0.37), 1), 1)
    diff = max(abs(a.amp(*k) - b.amp(*k)) for k in a.amplitudes)
    assert diff > 1e-3


def test_chain_equals_individual_elements():
    s = _state()
    chain = [ElementDescriptor("Fiber", (1,), {"segment": seg(0.5)}),
             ElementDescriptor("WDM"),
             ElementDescriptor("BS", (1, 2, 3, 4)),
             ElementDescriptor("CrossSplice", (3,))]
    direct = apply_cross_splice(apply_bs(apply_fiber(s, seg(0.5), 1)), 3)
    assert apply_chain(s, chain).amplitudes == pytest.approx(direct.amplitudes)


def test_element_descriptor_validation():
    with pytest.raises(ValueError):
        ElementDescriptor("Mirror")
    with pytest.raises(ValueError):
        ElementDescriptor("BS", (1, 1, 3, 4))
    with pytest.raises(ValueError):
        ElementDescriptor("Fiber", (1, 2))


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_bs_preserves_norm(phi, t1, t2):
    s = make_two_source_input(SourceSpec(1, grid((1, 2)), t1, phi),
                              SourceSpec(2, grid((1, 2)), t2, phi))
    assert apply_bs(s).norm_sq() == pytest.approx(1.0, abs=1e-13)


def test_bs_bunched_input_norm():
    m1, m2 = ModeLabel(1, "H", 1e15), ModeLabel(2, "H", 1e15)
    s = normalize(make_state([((m1, m1), 1), ((m1, m2), 1)]))
    assert apply_bs(s).norm_sq() == pytest.approx(1.0, abs=1e-15)


def test_pump_phase_element_matches_source_theta():
    g = grid((1.0, 2.0))
    plain = make_two_source_input(SourceSpec(1, g), SourceSpec(2, g))
    shifted = apply_chain(plain, [ElementDescriptor("PumpPhase", (2,), {"theta": 0.7}),
                                  ElementDescriptor("BS", (1, 2, 3, 4))])
    direct = apply_bs(make_two_source_input(SourceSpec(1, g), SourceSpec(2, g, theta=0.7)))
    assert shifted.amplitudes == pytest.approx(direct.amplitudes)
