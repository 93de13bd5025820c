import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfhyper.hilbert import (BinGrid, ModeLabel, StateError, TwoPhotonState,
                             accessible_dimensionality, fidelity, inner, make_state,
                             normalize, phase_aligned, same_path_weight, transform)

from conftest import PUMP, THZ, grid


def m(path, pol, w=1.0e15):
    return ModeLabel(path, pol, w)


def test_mode_label_validation():
    with pytest.raises(StateError):
        ModeLabel(1, "D", 1e15)
    with pytest.raises(StateError):
        ModeLabel(1, "H", 0.0)
    assert m(1, "H") < m(1, "V") < m(2, "H")


def test_bin_grid_energy_conservation_is_exact():
    g = grid((0.5, 1.0, 1.5))
    assert all(ws + wi == g.pump_omega for ws, wi in g.pairs)
    with pytest.raises(StateError, match="energy"):
        BinGrid(PUMP, ((PUMP / 2 + THZ, PUMP / 2 - THZ * 1.0001),))
    with pytest.raises(StateError, match="disjoint"):
        BinGrid.from_offsets(PUMP, [THZ, THZ])


def test_make_state_rejects_duplicates_and_unknown_modes():
    a, b = m(1, "H"), m(2, "V")
    with pytest.raises(StateError, match="duplicate"):
        make_state([((a, b), 1), ((b, a), 1)])
    with pytest.raises(StateError, match="unknown"):
        make_state([((a, b), 1)], registry=[a])


def test_normalize_and_fidelity():
    a, b, c = m(1, "H"), m(2, "V"), m(2, "H")
    s = normalize(make_state([((a, b), 3), ((a, c), 4j)]))
    assert s.normalized
    assert s.norm_sq() == pytest.approx(1.0, abs=1e-15)
    assert fidelity(s, s) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(StateError):
        normalize(TwoPhotonState({}))


def test_fidelity_registry_mismatch():
    s1 = normalize(make_state([((m(1, "H"), m(2, "V")), 1)]))
    s2 = normalize(make_state([((m(5, "H"), m(6, "V")), 1)]))
    with pytest.raises(StateError, match="registr"):
        fidelity(s1, s2)


def test_bunched_mode_norm():
    # (a+)^2 |0> / sqrt(2) stored with amplitude 1 has unit norm; a 50:50
    # splitter acting on one photon per input gives HOM bunching.
    a1, a2 = m(1, "H"), m(2, "H")
    s = make_state([((a1, a2), 1)])
    r = 1 / math.sqrt(2)

    def bs(x):
        if x.path == 1:
            return [(x.replace(path=3), r), (x.replace(path=4), 1j * r)]
        return [(x.replace(path=3), 1j * r), (x.replace(path=4), r)]

    out = transform(s, bs)
    assert out.amp(m(3, "H"), m(4, "H")) == pytest.approx(0, abs=1e-16)
    assert abs(out.amp(m(3, "H"), m(3, "H"))) == pytest.approx(r)
    assert out.norm_sq() == pytest.approx(1.0)
    assert same_path_weight(out) == pytest.approx(1.0)


def test_phase_aligned_removes_global_phase():
    a, b = m(1, "H"), m(2, "V")
    s = make_state([((a, b), 2 * np.exp(0.7j))])
    assert phase_aligned(s)[(a, b)] == pytest.approx(2.0)


@pytest.mark.parametrize("n", range(1, 6))
def test_accessible_dimensionality(n):
    assert accessible_dimensionality(n, "collinear") == 4 * n
    assert accessible_dimensionality(n, "two_path") == 8 * n


def test_accessible_dimensionality_rejects_bad_input():
    with pytest.raises(ValueError):
        accessible_dimensionality(0, "collinear")
    with pytest.raises(ValueError):
        accessible_dimensionality(2, "ring")


amp = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw):
    modes = [m(p, pol, w) for p in (1, 2) for pol in "HV" for w in (1e15, 2e15)]
    entries = {}
    for _ in range(draw(st.integers(1, 6))):
        i, j = draw(st.integers(0, 7)), draw(st.integers(0, 7))
        entries[(modes[i], modes[j]) if modes[i] <= modes[j] else (modes[j], modes[i])] = draw(amp)
    s = TwoPhotonState(entries, registry=frozenset(modes))
    if s.norm_sq() < 1e-6:
        s = TwoPhotonState({(modes[0], modes[1]): 1}, registry=frozenset(modes))
    return normalize(s)


@settings(max_examples=60, deadline=None)
@given(states(), states())
def test_fidelity_symmetric_and_bounded(a, b):
    f = fidelity(a, b)
    assert f == pytest.approx(fidelity(b, a), abs=1e-12)
    assert -1e-12 <= f <= 1 + 1e-12


@settings(max_examples=60, deadline=None)
@given(states(), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_local_unitary_preserves_norm(s, theta, phi):
    # polarisation rotation on path 1 and a phase on path 2
    c, sn = math.cos(theta), math.sin(theta)

    def rule(x):
        if x.path == 1:
            if x.pol == "H":
                return [(x, c), (x.replace(pol="V"), sn)]
            return [(x.replace(pol="H"), -sn), (x, c)]
        return [(x, np.exp(1j * phi))]

    out = transform(s, rule)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(states())
def test_inner_is_conjugate_symmetric(s):
    assert inner(s, s).real == pytest.approx(s.norm_sq())
    assert abs(inner(s, s).imag) < 1e-12
