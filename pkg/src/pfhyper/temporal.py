"""Coincidence wavepackets and group-delay bookkeeping for the Sagnac loop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sagnac import SagnacConfig, phase_breakdown

VISIBILITY_THRESHOLD = 0.999


@dataclass(frozen=True)
class ConditionResiduals:
    """r1 = tA+tB-tC-tD, r2 = tA-tB+tC-tD, r3 = tA-tB-tC+tD (seconds)."""

    r1: float
    r2: float
    r3: float


def _inverse_velocities(config: SagnacConfig, bin_index: int = 0):
    ws, wi = config.grid.pairs[bin_index]
    return (config.inverse_group_velocity("V", ws), config.inverse_group_velocity("H", ws),
            config.inverse_group_velocity("V", wi), config.inverse_group_velocity("H", wi))


def condition_residuals(config: SagnacConfig, bin_index: int = 0) -> ConditionResiduals:
    """Overlap residuals as explicit length x inverse-velocity combinations.

    r2 and r3 factor as (L1+L2)(..) + (L3+L3'-L4-L4')(..) and
    Delta_L * (..).  r1 factors into (L1-L2) and (L3-L3'+L4-L4') pieces that
    both carry signal/idler group-velocity differences, so it vanishes
    identically without GVD.
    """
    a, b, c, d = _inverse_velocities(config, bin_index)
    L1, L2, L3, L3p, L4, L4p = (config.L1, config.L2, config.L3,
                                config.L3p, config.L4, config.L4p)
    s_minus_i = (a - c) + (b - d)        # 1/vgVs + 1/vgHs - 1/vgVi - 1/vgHi
    gvm_s_minus_i = (a - b) - (c - d)    # 1/vgVs - 1/vgHs - 1/vgVi + 1/vgHi
    gvm_sum = (a - b) + (c - d)          # 1/vgVs - 1/vgHs + 1/vgVi - 1/vgHi
    total = a + b + c + d
    r1 = (L1 - L2) * s_minus_i + math.fsum((L3, -L3p, L4, -L4p)) * gvm_s_minus_i
    r2 = (L1 + L2) * gvm_sum + math.fsum((L3, L3p, -L4, -L4p)) * total
    r3 = config.delta_L * gvm_sum
    return ConditionResiduals(r1, r2, r3)


def s14_residual(config: SagnacConfig, bin_index: int = 0) -> float:
    """(L1+L2)(1/vgV - 1/vgH) + (L3+L3'-L4-L4')(1/vgV + 1/vgH), seconds.

    1/vgX is the mean of its signal and idler values.
    """
    a, b, c, d = _inverse_velocities(config, bin_index)
    inv_v = 0.5 * (a + c)
    inv_h = 0.5 * (b + d)
    return ((config.L1 + config.L2) * (inv_v - inv_h)
            + math.fsum((config.L3, config.L3p, -config.L4, -config.L4p)) * (inv_v + inv_h))


def correlation_time(bin_width: float) -> float:
    """Biphoton correlation time 2/Delta_omega (s).

    This is the delay at which the sinc envelope argument Delta_omega*t/2
    reaches 1; 2*pi*100 GHz gives ~3.2 ps.
    """
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    return 2.0 / bin_width


def walkoff_ratio(config: SagnacConfig, bin_width: float) -> float:
    return abs(s14_residual(config)) / correlation_time(bin_width)


@dataclass(frozen=True)
class WavepacketProfile:
    """Psi(t) on a uniform grid of t = t3 - t4.

    ``amplitude`` is normalised to unit L2 norm on the grid (Riemann sum with
    the grid step); ``scale`` is the factor that was divided out.
    """

    t: np.ndarray
    amplitude: np.ndarray
    phases: tuple
    delays: tuple
    weights: tuple
    bin_width: float
    analyzer: tuple
    scale: float


def _analyzer_vector(a) -> np.ndarray:
    v = np.atleast_1d(np.asarray(a, dtype=float))
    if v.size == 1:
        return np.array([math.cos(v[0]), math.sin(v[0])])
    v = v[:2]
    n = np.hypot(*v)
    if n == 0:
        raise ValueError("analyzer axis must be nonzero")
    return v / n


def branch_weights(analyzer) -> tuple:
    """Projection weights of terms A, B (HH) and C, D (VV) for linear analyzers.

    Each analyzer is an angle from H (rad) or a real 2-vector (H, V).
    """
    e3, e4 = (_analyzer_vector(a) for a in analyzer)
    hh = e3[0] * e4[0]
    vv = e3[1] * e4[1]
    return (hh, hh, vv, vv)


def sinc_envelope(t, delay: float, bin_width: float):
    """Delta_omega * sinc(Delta_omega (delay - t)/2), unnormalised sinc sin(x)/x."""
    x = bin_width * (delay - np.asarray(t, dtype=float)) / 2
    return bin_width * np.sinc(x / np.pi)


def default_time_grid(delays, bin_width: float, n_points: int | None = None) -> np.ndarray:
    lo = min(delays) - 5 / bin_width * 2 * math.pi
    hi = max(delays) + 5 / bin_width * 2 * math.pi
    if n_points is None:
        n_points = int(np.clip(math.ceil((hi - lo) * bin_width / 0.1), 2001, 200_001))
    return np.linspace(lo, hi, n_points)


def wavepacket(config: SagnacConfig, bin_width: float, analyzer=(math.pi / 4, math.pi / 4),
               t=None, n_points: int | None = None, bin_index: int = 0) -> WavepacketProfile:
    """Coincidence amplitude for flat-top bins of width ``bin_width`` (rad/s)."""
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    pb = phase_breakdown(config, bin_index)
    weights = branch_weights(analyzer)
    if t is None:
        t = default_time_grid(pb.delays, bin_width, n_points)
    t = np.asarray(t, dtype=float)
    psi = np.zeros(t.shape, dtype=complex)
    for w, phi, tau in zip(weights, pb.phases, pb.delays):
        if w:
            psi += w * np.exp(1j * phi) * sinc_envelope(t, tau, bin_width)
    dt = t[1] - t[0] if t.size > 1 else 1.0
    norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dt)
    scale = norm if norm > 0 else 1.0
    return WavepacketProfile(t, psi / scale, pb.phases, pb.delays, weights, bin_width,
                             tuple(tuple(_analyzer_vector(a)) for a in analyzer), scale)


def envelope_overlap(delay_a: float, delay_b: float, bin_width: float) -> float:
    """|<e_a|e_b>| for unit-norm sinc envelopes centred at the two delays.

    Both are flat-top spectra of width bin_width, so the overlap is
    (1/bin_width) * |integral of exp(i nu (a-b)) over the band|.
    """
    x = bin_width * (delay_a - delay_b) / 2
    return float(abs(np.sinc(x / np.pi)))


def frequency_visibility(profile: WavepacketProfile) -> float:
    """Overlap of the tau_A and tau_B wavepackets (frequency-ordering branches)."""
    return envelope_overlap(profile.delays[0], profile.delays[1], profile.bin_width)


def lobe_count(profile: WavepacketProfile, rel_height: float = 0.5) -> int:
    """Number of separated peaks of |Psi|^2 above ``rel_height`` of the maximum."""
    p = np.abs(profile.amplitude) ** 2
    above = p >= rel_height * p.max()
    edges = np.flatnonzero(np.diff(above.astype(int)) == 1)
    return int(len(edges) + (1 if above[0] else 0))


def compensate_lengths(config: SagnacConfig, bin_index: int = 0) -> SagnacConfig:
    """Choose L4 and L4' so that Delta_L = 0 and the compensation residual vanishes.

    L1, L2, L3 and L3' are kept.  Raises if the solution needs a negative
    length.
    """
    a, b, c, d = _inverse_velocities(config, bin_index)
    inv_v, inv_h = 0.5 * (a + c), 0.5 * (b + d)
    L1, L2, L3, L3p = config.L1, config.L2, config.L3, config.L3p
    # L3 + L3' - L4 - L4' = target, and L4' - L4 = -(L1 - L2 + L3 - L3')
    target = -(L1 + L2) * (inv_v - inv_h) / (inv_v + inv_h)
    total = L3 + L3p - target
    diff = -(L1 - L2 + L3 - L3p)
    L4 = 0.5 * (total - diff)
    L4p = 0.5 * (total + diff)
    if L4 < 0 or L4p < 0:
        raise ValueError("no non-negative L4, L4' satisfy both conditions")
    return config.with_lengths(L4=L4, L4p=L4p)
