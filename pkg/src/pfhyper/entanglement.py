"""Reduced density matrices, Wootters concurrence and the finite-linewidth
polarisation coherence."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .hilbert import StateError, TwoPhotonState

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y).real  # real: entries +-1 on the anti-diagonal

# Eigenvalues of rho below this are treated as exact zeros before the
# concurrence is formed; the square root would otherwise lift ~1e-17 noise
# to ~3e-9.
RANK_TOL = 1e-13


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix with basis labels.

    ``factor`` (optional) is a matrix W with ``matrix = W W^+``; when the
    matrix comes from a partial trace of a pure state this is exact and lets
    the concurrence avoid an eigendecomposition of rho.
    """

    matrix: np.ndarray
    labels: tuple = ()
    factor: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > 1e-12:
            raise ValueError("density matrix trace is %r" % np.trace(m))
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PostSelectionReport:
    p_keep: float
    sector: str


def _frequency_alphabet(state: TwoPhotonState, paths) -> list[float]:
    omegas = {m.omega for m in state.registry if m.path in paths}
    return sorted(omegas, reverse=True)


def reduce(state: TwoPhotonState, out_paths=(3, 4), keep: str = "polarization"):
    """Trace out one degree of freedom of the photon pair split over ``out_paths``.

    Projects on the one-photon-per-path sector, reports its weight, and
    returns the reduced matrix over (photon A, photon B).  Polarisation basis
    is {H, V}; the frequency alphabet is every bin frequency on those paths in
    descending order (signal first).
    """
    keep = keep.lower()
    if keep not in ("polarization", "frequency"):
        raise ValueError(f"keep must be 'polarization' or 'frequency', got {keep!r}")
    if abs(state.norm_sq() - 1.0) > 1e-10:
        raise StateError("reduce needs a normalized state")
    pa, pb = out_paths
    freqs = _frequency_alphabet(state, out_paths)
    fidx = {w: n for n, w in enumerate(freqs)}
    pidx = {"H": 0, "V": 1}
    nf = len(freqs)
    psi = np.zeros((2, nf, 2, nf), dtype=complex)
    for (m1, m2), a in state.amplitudes.items():
        if m1.path == pb and m2.path == pa:
            m1, m2 = m2, m1
        if m1.path == pa and m2.path == pb:
            psi[pidx[m1.pol], fidx[m1.omega], pidx[m2.pol], fidx[m2.omega]] += a
    p_keep = float(np.sum(np.abs(psi) ** 2))
    if p_keep == 0:
        raise StateError(f"no amplitude with one photon in each of paths {out_paths}")
    psi /= math.sqrt(p_keep)
    report = PostSelectionReport(p_keep, f"one photon in path {pa}, one in path {pb}")
    if keep == "polarization":
        w = psi.transpose(0, 2, 1, 3).reshape(4, nf * nf)
        labels = tuple(a + b for a in "HV" for b in "HV")
    else:
        w = psi.transpose(1, 3, 0, 2).reshape(nf * nf, 4)
        labels = tuple((a, b) for a in freqs for b in freqs)
    rho = w @ w.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, labels, factor=w), report


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """(Y x Y) rho* (Y x Y)."""
    return YY @ np.asarray(rho).conj() @ YY


def _factor_from_eig(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    keep = w > RANK_TOL * max(1.0, w.max())
    return v[:, keep] * np.sqrt(w[keep])


def concurrence(rho: DensityMatrix | np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state.

    With rho = W W^+, the values lambda_i (square roots of the eigenvalues
    of rho * spin_flip(rho)) are the singular values of the symmetric matrix
    W^T (Y x Y) W, which is what gets computed.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(np.asarray(rho))
    if rho.dim != 4:
        raise ValueError("concurrence is defined for 4x4 two-qubit matrices only")
    w = rho.factor if rho.factor is not None else _factor_from_eig(rho.matrix)
    tau = w.T @ YY @ w
    lam = np.sort(np.linalg.svd(tau, compute_uv=False))[::-1]
    lam = np.concatenate([lam, np.zeros(4)])[:4]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def concurrence_bs_analytic(phi_rp: float) -> float:
    return abs(math.cos(phi_rp))


def _coherence_integrand(config, nu: np.ndarray, ws: float, wi: float) -> np.ndarray:
    """0.5 * (exp(i phi_A(nu)) + exp(i phi_B(nu))) across one signal bin.

    ``phi_X(nu)`` is split as the exact bin-centre phase plus a small
    frequency-dependent remainder, so the large k*L terms never enter the
    vectorised part.
    """
    from .sagnac import phase_breakdown  # local: sagnac does not import this module

    pb = phase_breakdown(config, _bin_of(config, ws))
    r = config.omega_ref
    L1, L2 = config.L1, config.L2
    d3, d4 = config.L3 - config.L3p, config.L4 - config.L4p
    h, v = config.h, config.v

    def dk(rec, w0, dnu):
        # k(w0 + dnu) - k(w0)
        x0 = w0 - r
        return rec.inv_vg * dnu + 0.5 * rec.gvd * (2 * x0 * dnu + dnu * dnu)

    # phi_A: [kp - kV(w) - kH(wp-w)](L2-L1) + [kV-kH](w)(L3-L3') + [kV-kH](wp-w)(L4-L4')
    ra = (-(dk(v, ws, nu) + dk(h, wi, -nu)) * (L2 - L1)
          + (dk(v, ws, nu) - dk(h, ws, nu)) * d3
          + (dk(v, wi, -nu) - dk(h, wi, -nu)) * d4)
    rb = (-(dk(h, ws, nu) + dk(v, wi, -nu)) * (L2 - L1)
          + (dk(v, wi, -nu) - dk(h, wi, -nu)) * d3
          + (dk(v, ws, nu) - dk(h, ws, nu)) * d4)
    phi_a = _wrapped_diff(pb.phi_A, pb.phi_C)
    phi_b = _wrapped_diff(pb.phi_B, pb.phi_D)
    return 0.5 * (np.exp(1j * (phi_a + ra)) + np.exp(1j * (phi_b + rb)))


def _wrapped_diff(a: float, b: float) -> float:
    return math.remainder(a - b, 2 * math.pi)


def _bin_of(config, ws: float) -> int:
    for n, (s, _) in enumerate(config.grid.pairs):
        if s == ws:
            return n
    raise ValueError("frequency is not a signal bin centre")


def polarization_coherence_alpha(config, points_per_bin: int = 1001) -> complex:
    """Off-diagonal element alpha of the polarisation matrix for flat-top bins.

    alpha is the spectral average of (e^{i phi_A(w)} + e^{i phi_B(w)})/2 over
    the signal bins, with phi_A = arg(A) - arg(C) and phi_B = arg(B) - arg(D);
    it is normalised so that |alpha| = 1 for a fully coherent pair.  Composite
    Simpson, ``points_per_bin`` samples per bin (odd).
    """
    dw = config.grid.bin_width
    if dw is None or not dw > 0:
        raise ValueError("polarization coherence needs a flat-top grid with bin_width > 0")
    if points_per_bin < 3 or points_per_bin % 2 == 0:
        raise ValueError("points_per_bin must be an odd integer >= 3")
    nu = np.linspace(-dw / 2, dw / 2, points_per_bin)
    total = 0j
    for ws, wi in config.grid.pairs:
        f = _coherence_integrand(config, nu, ws, wi)
        total += complex(simpson(f, x=nu)) / dw
    alpha = total / config.grid.n_bins
    if not cmath.isfinite(alpha):
        raise ValueError("coherence quadrature did not converge")
    return alpha
