"""Lossless linear-optical elements acting on two-photon states.

Beam-splitter convention (the single place it is defined):
``a3 = (a1 + i a2)/sqrt(2)``, ``a4 = (i a1 + a2)/sqrt(2)``, equivalently
``a1+ -> (a3+ + i a4+)/sqrt(2)`` and ``a2+ -> (i a3+ + a4+)/sqrt(2)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _precise
from .hilbert import ModeLabel, StateError, TwoPhotonState, transform

# PMF-coupled PBS of the Sagnac loop: (path, pol) -> (path, pol).
SAGNAC_PBS_MAP = {
    (1, "H"): (4, "V"),
    (1, "V"): (3, "V"),
    (2, "H"): (4, "H"),
    (2, "V"): (3, "H"),
}

# Free-space PBS that reflects H and transmits V: input 1 transmits to 3,
# input 2 transmits to 4.
PBS_REFLECT_H_MAP = {
    (1, "H"): (4, "H"),
    (1, "V"): (3, "V"),
    (2, "H"): (3, "H"),
    (2, "V"): (4, "V"),
}


def bs_matrix() -> np.ndarray:
    """Path matrix U with ``a_out = U a_in`` for the 50:50 beam splitter."""
    return np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)


def apply_bs(state: TwoPhotonState, in_paths=(1, 2), out_paths=(3, 4)) -> TwoPhotonState:
    p1, p2 = in_paths
    p3, p4 = out_paths
    outside = {m.path for m in state.support()} - {p1, p2}
    if outside:
        raise StateError(f"state has support on paths {sorted(outside)} outside BS inputs")
    u = bs_matrix()

    def rule(m: ModeLabel):
        # a+_in_j -> sum_k U[k, j] a+_out_k  (U is symmetric here)
        j = 0 if m.path == p1 else 1
        return [(m.replace(path=p3), u[0, j]), (m.replace(path=p4), u[1, j])]

    return transform(state, rule)


def apply_pbs(state: TwoPhotonState, mapping: Mapping = SAGNAC_PBS_MAP) -> TwoPhotonState:
    """Ideal, frequency-independent PBS given as a (path, pol) relabelling."""

    def rule(m: ModeLabel):
        try:
            path, pol = mapping[(m.path, m.pol)]
        except KeyError:
            raise StateError(f"PBS mapping has no entry for {(m.path, m.pol)}") from None
        return [(m.replace(path=path, pol=pol), 1.0)]

    for m in state.support():
        if (m.path, m.pol) not in mapping:
            raise StateError(f"PBS mapping has no entry for {(m.path, m.pol)}")
    pruned = TwoPhotonState(state.amplitudes, state.normalized,
                            frozenset(m for m in state.registry if (m.path, m.pol) in mapping))
    return transform(pruned, rule)


@dataclass(frozen=True)
class Dispersion:
    """Taylor record of one polarisation axis: k0 (rad/m), 1/v_g (s/m), GVD (s^2/m)."""

    k0: float
    inv_vg: float
    gvd: float = 0.0

    def __post_init__(self):
        if not self.inv_vg > 0:
            raise ValueError("inverse group velocity must be positive")


@dataclass(frozen=True)
class FiberSegment:
    length: float
    h: Dispersion
    v: Dispersion
    omega_ref: float

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("fiber length must be non-negative")

    def record(self, pol: str) -> Dispersion:
        return self.h if pol == "H" else self.v

    def wavenumber(self, pol: str, omega: float) -> float:
        r = self.record(pol)
        d = omega - self.omega_ref
        return r.k0 + r.inv_vg * d + 0.5 * r.gvd * d * d

    def inverse_group_velocity(self, pol: str, omega: float) -> float:
        r = self.record(pol)
        return r.inv_vg + r.gvd * (omega - self.omega_ref)

    def phase(self, pol: str, omega: float) -> float:
        """k(omega)*L wrapped to (-pi, pi]."""
        r = self.record(pol)
        k = _precise.wavenumber(r.k0, r.inv_vg, r.gvd, omega, self.omega_ref)
        return _precise.wrapped_product_sum((k, self.length))

    def with_length(self, length: float) -> "FiberSegment":
        return FiberSegment(length, self.h, self.v, self.omega_ref)


def apply_fiber(state: TwoPhotonState, segment: FiberSegment, path: int) -> TwoPhotonState:
    if segment.length == 0:
        return state
    phases = {}

    def rule(m: ModeLabel):
        if m.path != path:
            return [(m, 1.0)]
        if m not in phases:
            phases[m] = cmath.exp(1j * segment.phase(m.pol, m.omega))
        return [(m, phases[m])]

    return transform(state, rule)


def apply_cross_splice(state: TwoPhotonState, path: int) -> TwoPhotonState:
    """90-degree splice: swaps H and V on ``path``."""

    def rule(m: ModeLabel):
        if m.path != path:
            return [(m, 1.0)]
        return [(m.replace(pol="V" if m.pol == "H" else "H"), 1.0)]

    return transform(state, rule)


def pump_phase_factor(theta: float) -> complex:
    """Factor multiplying a source's pair-creation amplitude for pump phase theta."""
    return cmath.exp(1j * theta)


def apply_pump_phase(state: TwoPhotonState, path: int, theta: float) -> TwoPhotonState:
    """Multiply the pair terms created on ``path`` (both photons there) by e^{i theta}.

    This acts on the source amplitude, not on single-photon modes, so it must
    be applied before any element that mixes paths.
    """
    f = pump_phase_factor(theta)
    amps = {k: (a * f if k[0].path == path and k[1].path == path else a)
            for k, a in state.amplitudes.items()}
    return TwoPhotonState(amps, normalized=state.normalized, registry=state.registry)


@dataclass(frozen=True)
class ElementDescriptor:
    """One element of an optical chain.

    ``kind`` is one of BS, PBS, Fiber, CrossSplice, WDM, PumpPhase.  WDM is a lossless
    router here and acts as identity on the state; it exists so chains can be
    written to match a hardware layout.
    """

    kind: str
    paths: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        arity = {"BS": 4, "PBS": 0, "Fiber": 1, "CrossSplice": 1, "WDM": 0, "PumpPhase": 1}
        if self.kind not in arity:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if arity[self.kind] and len(self.paths) != arity[self.kind]:
            raise ValueError(f"{self.kind} expects {arity[self.kind]} paths")
        if self.kind == "BS" and len(set(self.paths)) != 4:
            raise ValueError("BS wiring must use four distinct paths")


def apply_element(state: TwoPhotonState, el: ElementDescriptor) -> TwoPhotonState:
    if el.kind == "BS":
        return apply_bs(state, el.paths[:2], el.paths[2:])
    if el.kind == "PBS":
        return apply_pbs(state, el.params.get("mapping", SAGNAC_PBS_MAP))
    if el.kind == "Fiber":
        return apply_fiber(state, el.params["segment"], el.paths[0])
    if el.kind == "CrossSplice":
        return apply_cross_splice(state, el.paths[0])
    if el.kind == "PumpPhase":
        return apply_pump_phase(state, el.paths[0], el.params.get("theta", 0.0))
    return state


def apply_chain(state: TwoPhotonState, chain) -> TwoPhotonState:
    for el in chain:
        state = apply_element(state, el)
    return state
