"""Two-photon states over labelled bosonic modes.

A state is stored as a sparse table of amplitudes on unordered mode pairs,
expressed in the normalised Fock basis: for distinct modes ``|m1, m2> =
a+_m1 a+_m2 |0>`` and for a doubly occupied mode ``|2_m> = (a+_m)^2 / sqrt(2)
|0>``.  With that convention the squared norm is just the sum of ``|amp|^2``.
Only the two-photon sector is represented; vacuum and four-photon terms are
outside the model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

POLARIZATIONS = ("H", "V")
SQRT2 = math.sqrt(2.0)

ATOL = 1e-10


class StateError(ValueError):
    """Raised for malformed states or incompatible state operations."""


@dataclass(frozen=True, order=True)
class ModeLabel:
    """One photon mode: spatial path, linear polarisation, angular frequency (rad/s)."""

    path: int
    pol: str
    omega: float

    def __post_init__(self):
        if self.pol not in POLARIZATIONS:
            raise StateError(f"polarization must be 'H' or 'V', got {self.pol!r}")
        if not self.omega > 0:
            raise StateError(f"mode frequency must be positive, got {self.omega!r}")

    def replace(self, *, path=None, pol=None, omega=None) -> "ModeLabel":
        return ModeLabel(self.path if path is None else path,
                         self.pol if pol is None else pol,
                         self.omega if omega is None else omega)


Key = tuple[ModeLabel, ModeLabel]


def pair_key(m1: ModeLabel, m2: ModeLabel) -> Key:
    return (m1, m2) if m1 <= m2 else (m2, m1)


@dataclass(frozen=True)
class BinGrid:
    """Pump frequency and the conjugate signal/idler bin centres (rad/s).

    ``bin_width`` is the flat-top bin width; ``None`` means delta-like bins.
    """

    pump_omega: float
    pairs: tuple[tuple[float, float], ...]
    bin_width: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((float(s), float(i)) for s, i in self.pairs))
        if not self.pairs:
            raise StateError("BinGrid needs at least one bin pair")
        seen = set()
        for ws, wi in self.pairs:
            if ws + wi != self.pump_omega:
                raise StateError(
                    f"bin pair ({ws!r}, {wi!r}) violates energy conservation "
                    f"with pump {self.pump_omega!r}")
            if not ws > wi > 0:
                raise StateError(f"signal must be above idler, got ({ws!r}, {wi!r})")
            if ws in seen or wi in seen:
                raise StateError("bin pairs must be disjoint")
            seen.update((ws, wi))
        if self.bin_width is not None and not self.bin_width > 0:
            raise StateError("bin_width must be positive")

    @classmethod
    def from_offsets(cls, pump_omega: float, offsets, bin_width=None) -> "BinGrid":
        """Pairs placed symmetrically about pump/2 at the given angular offsets.

        The idler is computed as ``pump - signal``, which is exact in binary
        floating point here, so energy conservation holds bit-for-bit.
        """
        pairs = []
        for off in offsets:
            ws = pump_omega / 2 + off
            pairs.append((ws, pump_omega - ws))
        return cls(pump_omega, tuple(pairs), bin_width)

    @property
    def n_bins(self) -> int:
        return len(self.pairs)

    @property
    def center_omega(self) -> float:
        return self.pump_omega / 2


@dataclass(frozen=True)
class TwoPhotonState:
    amplitudes: Mapping[Key, complex]
    normalized: bool = False
    registry: frozenset = field(default=frozenset())

    def __post_init__(self):
        amps = {}
        for (m1, m2), a in self.amplitudes.items():
            amps[pair_key(m1, m2)] = complex(a)
        object.__setattr__(self, "amplitudes", amps)
        support = self.support()
        if not self.registry:
            object.__setattr__(self, "registry", frozenset(support))
        elif not support <= self.registry:
            extra = sorted(support - self.registry)
            raise StateError(f"modes outside registry: {extra}")
        if self.normalized and abs(self.norm_sq() - 1.0) > 1e-12:
            raise StateError("state flagged normalized but norm is %r" % self.norm_sq())

    def amp(self, m1: ModeLabel, m2: ModeLabel) -> complex:
        return self.amplitudes.get(pair_key(m1, m2), 0j)

    def items(self):
        return sorted(self.amplitudes.items())

    def support(self) -> set:
        return {m for key in self.amplitudes for m in key}

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    def __len__(self):
        return len(self.amplitudes)


def make_state(entries: Iterable, registry: Iterable[ModeLabel] | None = None) -> TwoPhotonState:
    """Build a state from ``((m1, m2), amplitude)`` entries."""
    amps = {}
    reg = frozenset(registry) if registry is not None else None
    for (m1, m2), a in entries:
        if reg is not None:
            for m in (m1, m2):
                if m not in reg:
                    raise StateError(f"unknown mode {m}")
        key = pair_key(m1, m2)
        if key in amps:
            raise StateError(f"duplicate entry for {key}")
        amps[key] = complex(a)
    return TwoPhotonState(amps, normalized=False, registry=reg or frozenset())


def normalize(state: TwoPhotonState) -> TwoPhotonState:
    n2 = state.norm_sq()
    if n2 <= 0:
        raise StateError("cannot normalize a zero-norm state")
    if state.normalized:
        return state
    s = 1.0 / math.sqrt(n2)
    return TwoPhotonState({k: a * s for k, a in state.amplitudes.items()},
                          normalized=True, registry=state.registry)


def _check_compatible(a: TwoPhotonState, b: TwoPhotonState):
    if not (a.support() <= b.registry and b.support() <= a.registry):
        raise StateError("states live on mismatched mode registries")


def inner(a: TwoPhotonState, b: TwoPhotonState) -> complex:
    """<a|b>."""
    return sum((a.amplitudes[k].conjugate() * b.amplitudes[k]
                for k in a.amplitudes.keys() & b.amplitudes.keys()), 0j)


def fidelity(a: TwoPhotonState, b: TwoPhotonState) -> float:
    """|<a|b>|^2 for normalised states."""
    _check_compatible(a, b)
    for s in (a, b):
        if abs(s.norm_sq() - 1.0) > 1e-10:
            raise StateError("fidelity needs normalized states")
    return abs(inner(a, b)) ** 2


def phase_aligned(state: TwoPhotonState, ref: TwoPhotonState | None = None) -> dict:
    """Amplitudes divided by the phase of the reference's largest amplitude."""
    ref = state if ref is None else ref
    if not ref.amplitudes:
        return dict(state.amplitudes)
    key = max(ref.items(), key=lambda kv: abs(kv[1]))[0]
    a = state.amp(*key)
    if a == 0:
        return dict(state.amplitudes)
    rot = abs(a) / a
    return {k: v * rot for k, v in state.amplitudes.items()}


def transform(state: TwoPhotonState,
              rule: Callable[[ModeLabel], list[tuple[ModeLabel, complex]]]) -> TwoPhotonState:
    """Apply a linear map on creation operators, ``a+_m -> sum_n c_n a+_n``.

    ``rule`` is called once per mode; it returns the image of ``a+_m``.
    """
    images = {}

    def image(m):
        if m not in images:
            images[m] = [(n, complex(c)) for n, c in rule(m)]
        return images[m]

    ops: dict[Key, complex] = {}
    for (m1, m2), amp in state.amplitudes.items():
        coeff = amp / SQRT2 if m1 == m2 else amp
        for n1, c1 in image(m1):
            for n2, c2 in image(m2):
                k = pair_key(n1, n2)
                ops[k] = ops.get(k, 0j) + coeff * c1 * c2
    amps = {k: (c * SQRT2 if k[0] == k[1] else c) for k, c in ops.items() if c != 0}
    registry = frozenset(n for m in state.registry for n, c in image(m) if c != 0)
    out = TwoPhotonState(amps, normalized=False, registry=registry | {m for k in amps for m in k})
    if state.normalized and abs(out.norm_sq() - 1.0) <= 1e-12:
        object.__setattr__(out, "normalized", True)
    return out


def same_path_weight(state: TwoPhotonState) -> float:
    """Probability weight on keys with both photons in one spatial path."""
    return math.fsum(abs(a) ** 2 for (m1, m2), a in state.amplitudes.items()
                     if m1.path == m2.path)


def accessible_dimensionality(n_bins: int, layout: str) -> int:
    """Polarisation x frequency dimension reachable by local measurements.

    Collinear pairs only reach the ``{|w_s,n>|w_i,n>}`` frequency basis (4N);
    spatially separated pairs also reach the symmetric/antisymmetric
    combinations, doubling it (8N).
    """
    if not isinstance(n_bins, (int, np.integer)) or n_bins < 1:
        raise ValueError("n_bins must be a positive integer")
    if layout == "collinear":
        return 4 * int(n_bins)
    if layout == "two_path":
        return 8 * int(n_bins)
    raise ValueError(f"unknown layout {layout!r}")
