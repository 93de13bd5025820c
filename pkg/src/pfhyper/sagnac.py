"""PPSF Sagnac-loop source: propagation model and closed-form phases.

Loop layout, following the pair from the PPSF outwards:

    path 1: pair -> L1 -> PBS      (pump reached the PPSF through L2)
    path 2: pair -> L2 -> PBS      (pump reached the PPSF through L1)
    PBS (SAGNAC_PBS_MAP) -> paths 3, 4
    path 3: L3 -> cross splice -> L3'
    path 4: L4 -> cross splice -> L4'

All lengths are metres, frequencies rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _precise
from .elements import (SAGNAC_PBS_MAP, Dispersion, ElementDescriptor, FiberSegment,
                       apply_chain)
from .hilbert import BinGrid, TwoPhotonState
from .sources import SourceSpec, make_two_source_input

C_LIGHT = 299_792_458.0
LENGTH_NAMES = ("L1", "L2", "L3", "L3p", "L4", "L4p")

DEFAULT_PHASE_INDEX = 1.444
DEFAULT_GROUP_INDEX = 1.468
DEFAULT_PUMP_INDEX = 1.454


def gvm_from_beat_length(wavelength: float, beat_length: float) -> float:
    """Group-velocity mismatch 1/v_gV - 1/v_gH ~ lambda / (c L_B) in s/m."""
    if not wavelength > 0 or not beat_length > 0:
        raise ValueError("wavelength and beat length must be positive")
    if math.isinf(beat_length):
        return 0.0
    return wavelength / (C_LIGHT * beat_length)


def pmf_dispersion(wavelength: float, beat_length: float,
                   phase_index: float = DEFAULT_PHASE_INDEX,
                   group_index: float = DEFAULT_GROUP_INDEX):
    """(H, V) Taylor records of a PMF about ``2 pi c / wavelength``.

    V carries the larger group delay so that ``M = 1/v_gV - 1/v_gH`` is
    positive; phase birefringence is ``2 pi / L_B``.  GVD is zero.
    """
    omega_c = 2 * math.pi * C_LIGHT / wavelength
    m = gvm_from_beat_length(wavelength, beat_length)
    k0h = phase_index * omega_c / C_LIGHT
    dk = 0.0 if math.isinf(beat_length) else 2 * math.pi / beat_length
    ng = group_index / C_LIGHT
    return (Dispersion(k0h, ng - m / 2), Dispersion(k0h + dk, ng + m / 2))


@dataclass(frozen=True)
class SagnacConfig:
    """Loop parameters.

    Birefringence comes either from explicit ``h``/``v`` records or from
    ``beat_length`` (with ``wavelength``), never both.  ``k_pump`` defaults
    to ``DEFAULT_PUMP_INDEX * pump_omega / c``; ``omega_ref`` (the Taylor
    expansion point) defaults to the bin-grid centre.
    """

    grid: BinGrid
    L1: float = 0.0
    L2: float = 0.0
    L3: float = 0.0
    L3p: float = 0.0
    L4: float = 0.0
    L4p: float = 0.0
    h: Dispersion | None = None
    v: Dispersion | None = None
    beat_length: float | None = None
    wavelength: float | None = None
    k_pump: float | None = None
    omega_ref: float | None = None
    phase_index: float = field(default=DEFAULT_PHASE_INDEX, repr=False)
    group_index: float = field(default=DEFAULT_GROUP_INDEX, repr=False)

    def __post_init__(self):
        for name in LENGTH_NAMES:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        explicit = self.h is not None or self.v is not None
        if explicit == (self.beat_length is not None):
            raise ValueError("give exactly one of (h, v) records or beat_length")
        if explicit and (self.h is None or self.v is None):
            raise ValueError("both h and v records are required")
        if self.beat_length is not None:
            wl = self.wavelength
            if wl is None:
                wl = 2 * math.pi * C_LIGHT / self.grid.center_omega
                object.__setattr__(self, "wavelength", wl)
            h, v = pmf_dispersion(wl, self.beat_length, self.phase_index, self.group_index)
            object.__setattr__(self, "h", h)
            object.__setattr__(self, "v", v)
        if self.omega_ref is None:
            object.__setattr__(self, "omega_ref", self.grid.center_omega)
        if self.k_pump is None:
            object.__setattr__(self, "k_pump",
                               DEFAULT_PUMP_INDEX * self.grid.pump_omega / C_LIGHT)

    def lengths(self) -> dict:
        return {n: getattr(self, n) for n in LENGTH_NAMES}

    def with_lengths(self, **lengths) -> "SagnacConfig":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw.update(lengths)
        if kw["beat_length"] is not None:
            kw["h"] = kw["v"] = None
        return SagnacConfig(**kw)

    def segment(self, name: str) -> FiberSegment:
        return FiberSegment(getattr(self, name), self.h, self.v, self.omega_ref)

    @property
    def delta_L(self) -> float:
        """Signed L1 - L2 + L3 - L4 - L3' + L4'."""
        return math.fsum((self.L1, -self.L2, self.L3, -self.L4, -self.L3p, self.L4p))

    def record(self, pol: str) -> Dispersion:
        return self.h if pol == "H" else self.v

    def birefringence(self, omega: float) -> float:
        """k_H(omega) - k_V(omega), formed from coefficient differences."""
        d = omega - self.omega_ref
        h, v = self.h, self.v
        return (h.k0 - v.k0) + (h.inv_vg - v.inv_vg) * d + 0.5 * (h.gvd - v.gvd) * d * d

    def inverse_group_velocity(self, pol: str, omega: float) -> float:
        r = self.record(pol)
        return r.inv_vg + r.gvd * (omega - self.omega_ref)

    @property
    def gvm(self) -> float:
        """1/v_gV - 1/v_gH at the expansion point."""
        return self.v.inv_vg - self.h.inv_vg


def loop_chain(config: SagnacConfig) -> list[ElementDescriptor]:
    def fiber(name, path):
        return ElementDescriptor("Fiber", (path,), {"segment": config.segment(name)})

    return [
        fiber("L1", 1), fiber("L2", 2),
        ElementDescriptor("PBS", (), {"mapping": SAGNAC_PBS_MAP}),
        fiber("L3", 3), fiber("L4", 4),
        ElementDescriptor("CrossSplice", (3,)), ElementDescriptor("CrossSplice", (4,)),
        fiber("L3p", 3), fiber("L4p", 4),
    ]


def pump_phases(config: SagnacConfig) -> tuple[float, float]:
    """Pump phases at the PPSF for the pairs leaving on path 1 and path 2."""
    return (_precise.wrapped_product_sum((config.k_pump, config.L2)),
            _precise.wrapped_product_sum((config.k_pump, config.L1)))


def simulate(config: SagnacConfig, bin_index: int | None = None) -> TwoPhotonState:
    """Output state at the ends of L3' and L4'.

    The PPSF emits phi_RP = 0 pairs.  ``bin_index`` restricts the source to a
    single bin pair of the grid; by default all pairs are emitted.
    """
    grid = config.grid
    if bin_index is not None:
        grid = BinGrid(grid.pump_omega, (grid.pairs[bin_index],), grid.bin_width)
    t1, t2 = pump_phases(config)
    state = make_two_source_input(SourceSpec(1, grid, theta=t1),
                                  SourceSpec(2, grid, theta=t2))
    return apply_chain(state, loop_chain(config))


@dataclass(frozen=True)
class PhaseBreakdown:
    """Constant phases (rad, wrapped to (-pi, pi]) and group delays (s) of the
    four output terms: A = H(ws)3 H(wi)4, B = H(wi)3 H(ws)4,
    C = V(ws)3 V(wi)4, D = V(wi)3 V(ws)4."""

    phi_A: float
    phi_B: float
    phi_C: float
    phi_D: float
    tau_A: float
    tau_B: float
    tau_C: float
    tau_D: float
    delta_L: float

    @property
    def phases(self):
        return (self.phi_A, self.phi_B, self.phi_C, self.phi_D)

    @property
    def delays(self):
        return (self.tau_A, self.tau_B, self.tau_C, self.tau_D)


def _k(config: SagnacConfig, pol: str, omega: float):
    r = config.record(pol)
    return _precise.wavenumber(r.k0, r.inv_vg, r.gvd, omega, config.omega_ref)


def phase_breakdown(config: SagnacConfig, bin_index: int = 0) -> PhaseBreakdown:
    ws, wi = config.grid.pairs[bin_index]
    kp = config.k_pump
    L1, L2, L3, L3p, L4, L4p = (config.L1, config.L2, config.L3,
                                config.L3p, config.L4, config.L4p)
    kVs, kHs = _k(config, "V", ws), _k(config, "H", ws)
    kVi, kHi = _k(config, "V", wi), _k(config, "H", wi)
    ps = _precise.wrapped_product_sum
    phi_A = ps((kp, L2), (kVs, L1), (kHi, L1), (kVs, L3), (kHs, L3p), (kVi, L4), (kHi, L4p))
    phi_B = ps((kp, L2), (kHs, L1), (kVi, L1), (kVi, L3), (kHi, L3p), (kVs, L4), (kHs, L4p))
    phi_C = ps((kp, L1), (kVs, L2), (kHi, L2), (kHs, L3), (kVs, L3p), (kHi, L4), (kVi, L4p))
    phi_D = ps((kp, L1), (kHs, L2), (kVi, L2), (kHi, L3), (kVi, L3p), (kHs, L4), (kVs, L4p))

    gVs = config.inverse_group_velocity("V", ws)
    gHs = config.inverse_group_velocity("H", ws)
    gVi = config.inverse_group_velocity("V", wi)
    gHi = config.inverse_group_velocity("H", wi)
    fs = math.fsum
    tau_A = fs((L1 * gVs, -L1 * gHi, L3 * gVs, L3p * gHs, -L4 * gVi, -L4p * gHi))
    tau_B = fs((L1 * gHs, -L1 * gVi, -L3 * gVi, -L3p * gHi, L4 * gVs, L4p * gHs))
    tau_C = fs((L2 * gVs, -L2 * gHi, L3 * gHs, L3p * gVs, -L4 * gHi, -L4p * gVi))
    tau_D = fs((L2 * gHs, -L2 * gVi, -L3 * gHi, -L3p * gVi, L4 * gHs, L4p * gVs))
    return PhaseBreakdown(phi_A, phi_B, phi_C, phi_D, tau_A, tau_B, tau_C, tau_D,
                          config.delta_L)


def birefringence_bracket(config: SagnacConfig, bin_index: int = 0) -> float:
    """k_H(ws) - k_V(ws) + k_V(wi) - k_H(wi)."""
    ws, wi = config.grid.pairs[bin_index]
    return config.birefringence(ws) - config.birefringence(wi)


def concurrence_sagnac_analytic(config: SagnacConfig, bin_index: int = 0) -> float:
    return abs(math.cos(0.5 * birefringence_bracket(config, bin_index) * config.delta_L))


def tolerance_for_concurrence(config: SagnacConfig, c_target: float,
                              bin_index: int = 0) -> float:
    """Largest |Delta L| (m) keeping the analytic concurrence at or above ``c_target``."""
    if not 0 < c_target < 1:
        raise ValueError("target concurrence must lie strictly between 0 and 1")
    b = abs(birefringence_bracket(config, bin_index))
    if b == 0:
        return math.inf
    return 2 * math.acos(c_target) / b
