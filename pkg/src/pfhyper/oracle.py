"""Brute-force reference: creation-operator monomials expanded term by term.

Nothing here reuses the sparse-state machinery.  Monomials are ordered
label tuples with a complex coefficient and an exact rational phase; every
substitution multiplies out the full Cartesian product, and like terms are
only collected at the very end.  Fibre phases are accumulated as exact
``Fraction`` values of k*L and turned into complex numbers once, at 50
digits, so the reference does not inherit double rounding of 1e7 rad phases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from .hilbert import ModeLabel, StateError, TwoPhotonState, pair_key

Rule = Callable[[ModeLabel], list]


@dataclass(frozen=True)
class OperatorMonomial:
    labels: tuple
    coeff: complex
    phase: Fraction = Fraction(0)

    def normal_ordered(self) -> "OperatorMonomial":
        return OperatorMonomial(tuple(sorted(self.labels)), self.coeff, self.phase)


def _exp_i(phase: Fraction) -> complex:
    with mpmath.workdps(50):
        x = mpmath.mpf(phase.numerator) / phase.denominator
        two_pi = 2 * mpmath.pi
        x = x - two_pi * mpmath.floor(x / two_pi)
        return complex(mpmath.cos(x), mpmath.sin(x))


def expand_product(monomials: Iterable[OperatorMonomial],
                   substitutions: Sequence[Rule]) -> list[OperatorMonomial]:
    """Push monomials through substitution rules and collect like terms.

    A rule maps one label to ``[(label, coeff, phase), ...]``.  Labels a rule
    does not touch must map to themselves.
    """
    terms = list(monomials)
    for rule in substitutions:
        expanded = []
        for mono in terms:
            images = []
            for lab in mono.labels:
                img = rule(lab)
                labs = [x[0] for x in img]
                if len(set(labs)) != len(labs):
                    raise ValueError(f"rule maps {lab} to a repeated label")
                images.append(img)
            for combo in itertools.product(*images):
                c = mono.coeff
                ph = mono.phase
                for _, ci, pi in combo:
                    c *= ci
                    ph += pi
                expanded.append(OperatorMonomial(tuple(x[0] for x in combo), c, ph))
        terms = expanded
    collected: dict[tuple, complex] = {}
    for mono in terms:
        key = tuple(sorted(mono.labels))
        collected[key] = collected.get(key, 0j) + mono.coeff * _exp_i(mono.phase)
    return [OperatorMonomial(k, c) for k, c in sorted(collected.items())]


def monomial_norm_sq(monomials: Iterable[OperatorMonomial]) -> float:
    """<psi|psi> for psi = sum of monomials acting on vacuum (bosonic weights)."""
    total = {}
    for m in monomials:
        key = tuple(sorted(m.labels))
        total[key] = total.get(key, 0j) + m.coeff * _exp_i(m.phase)
    s = 0.0
    for key, c in total.items():
        w = 1
        for _, grp in itertools.groupby(key):
            w *= math.factorial(len(list(grp)))
        s += w * abs(c) ** 2
    return s


def monomial_amplitudes(monomials: Iterable[OperatorMonomial]) -> dict:
    """Two-photon Fock amplitudes: a+a+ -> c, (a+)^2 -> sqrt(2) c."""
    amps = {}
    for m in monomials:
        if len(m.labels) != 2:
            raise ValueError("only two-photon monomials map to Fock amplitudes")
        a, b = m.labels
        c = m.coeff * _exp_i(m.phase)
        k = pair_key(a, b)
        amps[k] = amps.get(k, 0j) + (c * math.sqrt(2) if a == b else c)
    return amps


def compare_with_state(monomials, state: TwoPhotonState) -> float:
    """Largest amplitude discrepancy after global-phase alignment."""
    ref = monomial_amplitudes(monomials)
    labels = {m for k in ref for m in k}
    if not labels <= state.registry:
        raise StateError("oracle terms use modes outside the state registry")
    keys = set(ref) | set(state.amplitudes)
    if not keys:
        return 0.0
    k0 = max(keys, key=lambda k: abs(state.amp(*k)))
    a_state, a_ref = state.amp(*k0), ref.get(k0, 0j)
    rot_s = abs(a_state) / a_state if a_state else 1.0
    rot_r = abs(a_ref) / a_ref if a_ref else 1.0
    return max(abs(state.amp(*k) * rot_s - ref.get(k, 0j) * rot_r) for k in keys)


# -- substitution rules ------------------------------------------------------

def identity_rule(lab):
    return [(lab, 1.0, Fraction(0))]


def bs_rule(p1=1, p2=2, p3=3, p4=4) -> Rule:
    r = 1 / math.sqrt(2)

    def rule(lab):
        if lab.path == p1:
            return [(ModeLabel(p3, lab.pol, lab.omega), r, Fraction(0)),
                    (ModeLabel(p4, lab.pol, lab.omega), 1j * r, Fraction(0))]
        if lab.path == p2:
            return [(ModeLabel(p3, lab.pol, lab.omega), 1j * r, Fraction(0)),
                    (ModeLabel(p4, lab.pol, lab.omega), r, Fraction(0))]
        return identity_rule(lab)
    return rule


def relabel_rule(mapping: dict) -> Rule:
    def rule(lab):
        tgt = mapping.get((lab.path, lab.pol))
        if tgt is None:
            return identity_rule(lab)
        return [(ModeLabel(tgt[0], tgt[1], lab.omega), 1.0, Fraction(0))]
    return rule


def swap_rule(path: int) -> Rule:
    return relabel_rule({(path, "H"): (path, "V"), (path, "V"): (path, "H")})


def exact_wavenumber(record, omega: float, omega_ref: float) -> Fraction:
    d = Fraction(omega) - Fraction(omega_ref)
    return (Fraction(record.k0) + Fraction(record.inv_vg) * d
            + Fraction(record.gvd) * d * d / 2)


def fiber_rule(path: int, length: float, h, v, omega_ref: float) -> Rule:
    L = Fraction(length)

    def rule(lab):
        if lab.path != path:
            return identity_rule(lab)
        rec = h if lab.pol == "H" else v
        return [(lab, 1.0, exact_wavenumber(rec, lab.omega, omega_ref) * L)]
    return rule


# -- scenario builders -------------------------------------------------------

def source_monomials(path: int, pairs, phi_rp: float = 0.0, theta=Fraction(0),
                     weight: float = 1.0) -> list[OperatorMonomial]:
    """e^{i theta}(a+_{H,s} a+_{V,i} + e^{i phi} a+_{V,s} a+_{H,i}) per bin pair."""
    theta = theta if isinstance(theta, Fraction) else Fraction(theta)
    n = len(pairs)
    w = weight / math.sqrt(2 * n)
    rel = complex(math.cos(phi_rp), math.sin(phi_rp))
    out = []
    for ws, wi in pairs:
        out.append(OperatorMonomial((ModeLabel(path, "H", ws), ModeLabel(path, "V", wi)), w, theta))
        out.append(OperatorMonomial((ModeLabel(path, "V", ws), ModeLabel(path, "H", wi)),
                                    w * rel, theta))
    return out


def bs_monomials(pairs, phi_rp=0.0, theta1=0.0, theta2=0.0, pbs_mapping=None):
    """Two sources on paths 1 and 2 through a BS (or a PBS relabelling)."""
    src = (source_monomials(1, pairs, phi_rp, theta1, 1 / math.sqrt(2))
           + source_monomials(2, pairs, phi_rp, theta2, 1 / math.sqrt(2)))
    rule = bs_rule() if pbs_mapping is None else relabel_rule(pbs_mapping)
    return expand_product(src, [rule])


# PBS of the loop written out independently of the elements module.
_LOOP_PBS = {(1, "H"): (4, "V"), (1, "V"): (3, "V"), (2, "H"): (4, "H"), (2, "V"): (3, "H")}


def sagnac_monomials(config, pairs=None) -> list[OperatorMonomial]:
    pairs = config.grid.pairs if pairs is None else pairs
    kp = Fraction(config.k_pump)
    src = (source_monomials(1, pairs, 0.0, kp * Fraction(config.L2), 1 / math.sqrt(2))
           + source_monomials(2, pairs, 0.0, kp * Fraction(config.L1), 1 / math.sqrt(2)))
    h, v, r = config.h, config.v, config.omega_ref
    rules = [
        fiber_rule(1, config.L1, h, v, r),
        fiber_rule(2, config.L2, h, v, r),
        relabel_rule(_LOOP_PBS),
        fiber_rule(3, config.L3, h, v, r),
        fiber_rule(4, config.L4, h, v, r),
        swap_rule(3),
        swap_rule(4),
        fiber_rule(3, config.L3p, h, v, r),
        fiber_rule(4, config.L4p, h, v, r),
    ]
    return expand_product(src, rules)


# -- independent quadratures -------------------------------------------------

def wavepacket_quadrature(t, phases, delays, weights, bin_width: float, n_points: int = 10_001):
    """Integrate sum_k w_k exp(i(phi_k + nu (tau_k - t))) over the band numerically."""
    from scipy.integrate import simpson

    nu = np.linspace(-bin_width / 2, bin_width / 2, n_points)
    t = np.asarray(t, dtype=float)
    spectrum = np.zeros(nu.shape, dtype=complex)
    for w, phi, tau in zip(weights, phases, delays):
        if w:
            spectrum += w * np.exp(1j * (phi + nu * tau))
    integrand = spectrum[None, :] * np.exp(-1j * np.outer(t.ravel(), nu))
    return simpson(integrand, x=nu, axis=1).reshape(t.shape)


def alpha_riemann(config, points_per_bin: int = 10_010) -> complex:
    """Midpoint-rule polarisation coherence straight from the wavenumber records.

    The k0 and pump parts of the A-C and B-D phase differences are kept as
    exact fractions; the dispersive remainder (~1e4 rad at most for metre
    lengths) is evaluated per sample in double precision.
    """
    dw = config.grid.bin_width
    h, v, r = config.h, config.v, config.omega_ref

    def k(rec, w):
        x = w - r
        return rec.inv_vg * x + 0.5 * rec.gvd * x * x  # k0 handled separately

    L1, L2, L3, L3p, L4, L4p = (config.L1, config.L2, config.L3,
                                config.L3p, config.L4, config.L4p)
    edges = (np.arange(points_per_bin) + 0.5) / points_per_bin - 0.5
    total = 0j
    for ws, wi in config.grid.pairs:
        w3 = ws + edges * dw
        w4 = config.grid.pump_omega - w3
        # A - C and B - D phase differences (frequency-dependent parts)
        dA = ((k(v, w3) + k(h, w4)) * (L1 - L2)
              + (k(v, w3) - k(h, w3)) * (L3 - L3p)
              + (k(v, w4) - k(h, w4)) * (L4 - L4p))
        dB = ((k(h, w3) + k(v, w4)) * (L1 - L2)
              + (k(v, w4) - k(h, w4)) * (L3 - L3p)
              + (k(v, w3) - k(h, w3)) * (L4 - L4p))
        # constant parts: k0 terms and pump terms, exact then wrapped
        kp = Fraction(config.k_pump)
        k0h, k0v = Fraction(h.k0), Fraction(v.k0)
        F = Fraction
        cA = (kp * (F(L2) - F(L1)) + (k0v + k0h) * (F(L1) - F(L2))
              + (k0v - k0h) * (F(L3) - F(L3p)) + (k0v - k0h) * (F(L4) - F(L4p)))
        cB = (kp * (F(L2) - F(L1)) + (k0h + k0v) * (F(L1) - F(L2))
              + (k0v - k0h) * (F(L3) - F(L3p)) + (k0v - k0h) * (F(L4) - F(L4p)))
        eA, eB = _exp_i(cA), _exp_i(cB)
        total += np.mean(0.5 * (eA * np.exp(1j * dA) + eB * np.exp(1j * dB)))
    return complex(total / config.grid.n_bins)
