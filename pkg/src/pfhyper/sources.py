"""Collinear type-II SPDC sources in the first-order (single pair) regime."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .elements import pump_phase_factor
from .hilbert import BinGrid, ModeLabel, StateError, TwoPhotonState, pair_key

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SourceSpec:
    """One source arm.

    ``phi_rp`` is the relative phase of the V(s)H(i) term against H(s)V(i);
    it is stored reduced to [0, 2*pi).  ``spectral_model`` is ``"delta"`` or
    ``"flat_top"``; the latter needs ``grid.bin_width`` and only matters to
    the coherence and wavepacket calculations, the state stays bin-labelled.
    """

    path: int
    grid: BinGrid
    theta: float = 0.0
    phi_rp: float = 0.0
    spectral_model: str = "delta"

    def __post_init__(self):
        object.__setattr__(self, "phi_rp", float(self.phi_rp) % TWO_PI)
        if self.spectral_model not in ("delta", "flat_top"):
            raise ValueError(f"unknown spectral model {self.spectral_model!r}")
        if self.spectral_model == "flat_top" and self.grid.bin_width is None:
            raise ValueError("flat_top model needs a grid with bin_width")


def _pair_terms(spec: SourceSpec, weight: complex):
    rel = cmath.exp(1j * spec.phi_rp)
    p = spec.path
    for ws, wi in spec.grid.pairs:
        yield pair_key(ModeLabel(p, "H", ws), ModeLabel(p, "V", wi)), weight
        yield pair_key(ModeLabel(p, "V", ws), ModeLabel(p, "H", wi)), weight * rel


def _registry(spec: SourceSpec):
    return frozenset(ModeLabel(spec.path, pol, w)
                     for pair in spec.grid.pairs for w in pair for pol in ("H", "V"))


def make_source_state(spec: SourceSpec) -> TwoPhotonState:
    w = pump_phase_factor(spec.theta) / math.sqrt(2 * spec.grid.n_bins)
    return TwoPhotonState(dict(_pair_terms(spec, w)), normalized=True,
                          registry=_registry(spec))


def make_two_source_input(spec1: SourceSpec, spec2: SourceSpec) -> TwoPhotonState:
    """Single-pair sector of |psi>_1 |psi>_2: exactly one of the two arms emits."""
    if spec1.path == spec2.path:
        raise StateError("the two sources must sit on different paths")
    amps = {}
    for spec in (spec1, spec2):
        w = pump_phase_factor(spec.theta) / math.sqrt(2 * spec.grid.n_bins) / math.sqrt(2)
        amps.update(_pair_terms(spec, w))
    state = TwoPhotonState(amps, registry=_registry(spec1) | _registry(spec2))
    if abs(state.norm_sq() - 1.0) <= 1e-12:
        object.__setattr__(state, "normalized", True)
    return state
