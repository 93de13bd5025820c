import math

import numpy as np
import pytest
from scipy.linalg import sqrtm

from pfhyper.elements import PBS_REFLECT_H_MAP, apply_bs, apply_pbs
from pfhyper.entanglement import (DensityMatrix, concurrence, polarization_coherence_alpha,
                                  purity, reduce, spin_flip)
from pfhyper.hilbert import ModeLabel, StateError, make_state, normalize
from pfhyper.oracle import alpha_riemann
from pfhyper.sagnac import concurrence_sagnac_analytic, simulate
from pfhyper.sources import SourceSpec, make_two_source_input
from pfhyper.temporal import compensate_lengths

from conftest import grid, random_sagnac


def textbook_concurrence(rho):
    sq = sqrtm(rho)
    r = sqrtm(sq @ spin_flip(rho) @ sq)
    lam = np.sort(np.real(np.linalg.eigvals(r)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def random_rho(rng, rank):
    w = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = w @ w.conj().T
    return rho / np.trace(rho)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_concurrence_matches_textbook_formula(rng, rank):
    for _ in range(20):
        rho = random_rho(rng, rank)
        assert concurrence(rho) == pytest.approx(textbook_concurrence(rho), abs=1e-6)


def test_concurrence_known_states():
    bell = np.zeros(4, complex)
    bell[[1, 2]] = 1 / math.sqrt(2)
    assert concurrence(np.outer(bell, bell.conj())) == pytest.approx(1.0, abs=1e-15)
    assert concurrence(np.eye(4) / 4) == 0.0
    werner = 0.5 * np.outer(bell, bell.conj()) + 0.5 * np.eye(4) / 4
    assert concurrence(werner) == pytest.approx(0.25, abs=1e-12)


def test_concurrence_invariant_under_local_unitaries(rng):
    def haar2():
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / abs(np.diag(r)))

    for _ in range(20):
        rho = random_rho(rng, 2)
        u = np.kron(haar2(), haar2())
        assert concurrence(u @ rho @ u.conj().T) == pytest.approx(concurrence(rho), abs=1e-10)


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(4))
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ValueError, match="positive"):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError, match="4x4"):
        concurrence(np.eye(2) / 2)


def test_reduce_requires_normalized_and_nonempty_sector():
    m1, m2 = ModeLabel(1, "H", 1e15), ModeLabel(1, "V", 2e15)
    with pytest.raises(StateError):
        reduce(make_state([((m1, m2), 2)]))
    with pytest.raises(StateError, match="one photon"):
        reduce(normalize(make_state([((m1, m2), 1)])))
    s = normalize(make_state([((ModeLabel(3, "H", 1e15), ModeLabel(4, "V", 2e15)), 1)]))
    with pytest.raises(ValueError):
        reduce(s, keep="spin")


@pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 9))
def test_bs_concurrence_both_dofs(phi):
    s = apply_bs(make_two_source_input(SourceSpec(1, grid(), 0, phi), SourceSpec(2, grid(), 0, phi)))
    for keep in ("polarization", "frequency"):
        rho, rep = reduce(s, keep=keep)
        assert rep.p_keep == pytest.approx(1.0, abs=1e-12)
        assert concurrence(rho) == pytest.approx(abs(math.cos(phi)), abs=1e-9)


def test_pbs_multibin_purity():
    g = grid((0.5, 1.0, 1.5))
    s = apply_pbs(make_two_source_input(SourceSpec(1, g), SourceSpec(2, g, theta=1.0)),
                  PBS_REFLECT_H_MAP)
    rho, rep = reduce(s)
    assert rep.p_keep == pytest.approx(1.0)
    assert 0.25 - 1e-12 <= purity(rho) <= 1 + 1e-12


def test_sagnac_numeric_concurrence(rng):
    for _ in range(10):
        cfg = random_sagnac(rng)
        rho, rep = reduce(simulate(cfg))
        assert rep.p_keep == pytest.approx(1.0, abs=1e-12)
        assert concurrence(rho) == pytest.approx(concurrence_sagnac_analytic(cfg), abs=1e-9)


def test_alpha_is_unity_for_balanced_loop(rng):
    cfg = compensate_lengths(random_sagnac(rng, width_thz=0.1).with_lengths(L2=1.0, L1=1.0))
    assert abs(polarization_coherence_alpha(cfg)) == pytest.approx(1.0, abs=1e-9)


def test_alpha_against_midpoint_reference(rng):
    for n in (1, 2):
        cfg = random_sagnac(rng, n_bins=n, width_thz=0.1)
        a = polarization_coherence_alpha(cfg, points_per_bin=2001)
        b = alpha_riemann(cfg)
        assert abs(a - b) < 1e-6
        assert abs(a) <= 1 + 1e-12


def test_alpha_needs_width(rng):
    with pytest.raises(ValueError):
        polarization_coherence_alpha(random_sagnac(rng))
