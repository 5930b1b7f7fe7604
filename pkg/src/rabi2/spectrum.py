"""Truncated Fock-space spectrum of the two-photon Rabi Hamiltonian.

Reading the Bargmann system as (H - E) psi = 0 with z -> a^dagger and
d/dz -> a gives::

    H = w N + 2g (a^2 + a^dagger^2) sigma_z + (w0/2) sigma_x

in the basis |n, s>, s = 0 for the phi1 component and s = 1 for phi2, stored
at row 2n + s.  This is the only module that uses floating point.

``sigma_x * i^N`` commutes with H, so the truncated matrix splits exactly
into four tridiagonal chains: photon residue r in {0, 1} and a label tau,
with states |n_j, sigma_x = (-1)^(j + tau)>, n_j = r + 2j.  Diagonal entries
are ``w n_j + (-1)^(j+tau) w0/2`` and off-diagonal entries are
``2g sqrt((n_j+1)(n_j+2))``.  :func:`diagonalize` solves the chains and
measures every eigenpair's residual against the dense matrix.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .eigen import eigh_dense, eigh_tridiagonal
from .errors import SolverError, SpectralCollapseError, UsageError
from .series import ModelParams

log = logging.getLogger(__name__)

DEFAULT_CUTOFFS = (500, 600)
DEFAULT_TOL = 1e-10
PARITY_BLOCKS = (None, "even", "odd")


def check_collapse(params: ModelParams) -> None:
    """Refuse couplings at or past the collapse point |4g| >= omega."""
    if abs(4 * params.g) >= params.omega:
        raise SpectralCollapseError(
            f"spectral collapse: |4g| = {abs(4 * params.g)} >= omega = {params.omega}; "
            "the two-photon Hamiltonian has no discrete spectrum bounded below here"
        )


def _normalize_parity(parity_block):
    if parity_block in ("both", None):
        return None
    if parity_block not in ("even", "odd"):
        raise UsageError(f"parity must be even, odd or both, got {parity_block!r}")
    return parity_block


@dataclass(frozen=True)
class Chain:
    """One tridiagonal block and the matrix rows its states live on."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    up_rows: np.ndarray
    down_rows: np.ndarray
    signs: np.ndarray


@dataclass(frozen=True)
class TruncatedHamiltonian:
    params: ModelParams
    n_max: int
    matrix: np.ndarray = field(repr=False)
    parity_block: str | None
    photon_numbers: np.ndarray = field(repr=False)
    spins: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def row_index(self) -> dict:
        return {(int(n), int(s)): i for i, (n, s) in enumerate(zip(self.photon_numbers, self.spins))}

    def chains(self) -> list[Chain]:
        """Exact orthogonal reduction of this truncation to tridiagonal chains."""
        p = self.params
        w, half_w0, two_g = float(p.omega), float(p.omega0) / 2, float(2 * p.g)
        rows = self.row_index()
        residues = {None: (0, 1), "even": (0,), "odd": (1,)}[self.parity_block]
        out = []
        for r in residues:
            ns = np.arange(r, self.n_max + 1, 2)
            if ns.size == 0:
                continue
            for tau in (0, 1):
                signs = np.where((np.arange(ns.size) + tau) % 2 == 0, 1.0, -1.0)
                diag = w * ns + signs * half_w0
                off = two_g * np.sqrt((ns[:-1] + 1.0) * (ns[:-1] + 2.0))
                out.append(Chain(diag, off,
                                 np.array([rows[(int(n), 0)] for n in ns]),
                                 np.array([rows[(int(n), 1)] for n in ns]),
                                 signs))
        return out


def build_hamiltonian(params: ModelParams, n_max: int, parity_block: str | None = None,
                      *, allow_small: bool = False) -> TruncatedHamiltonian:
    """Dense truncated matrix, photon numbers 0..n_max.

    ``allow_small`` permits n_max < 2, where the a^2 coupling cannot act;
    it is used to check the bare two-level block.
    """
    if n_max < (0 if allow_small else 2):
        raise UsageError(f"n_max must be >= 2, got {n_max}")
    check_collapse(params)
    parity_block = _normalize_parity(parity_block)
    w, half_w0, two_g = float(params.omega), float(params.omega0) / 2, float(2 * params.g)

    ns = np.arange(n_max + 1)
    if parity_block == "even":
        ns = ns[ns % 2 == 0]
    elif parity_block == "odd":
        ns = ns[ns % 2 == 1]
    photon = np.repeat(ns, 2)
    spin = np.tile([0, 1], ns.size)
    index = {(int(n), int(s)): i for i, (n, s) in enumerate(zip(photon, spin))}
    dim = photon.size
    h = np.zeros((dim, dim))
    for (n, s), i in index.items():
        h[i, i] = w * n
        if s == 0:
            j = index[(n, 1)]
            h[i, j] = h[j, i] = half_w0
        k = index.get((n + 2, s))
        if k is not None:
            amp = two_g * math.sqrt((n + 1) * (n + 2))
            h[i, k] = h[k, i] = amp if s == 0 else -amp
    return TruncatedHamiltonian(params, n_max, h, parity_block, photon, spin)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residuals: np.ndarray
    residual_bound: float
    truncation_pair: tuple
    converged_count: int | None
    tolerance: float
    status: str = "ok"
    full: "SpectrumResult | None" = field(default=None, repr=False)

    def __len__(self):
        return self.eigenvalues.shape[0]


def _residuals(h: np.ndarray, w: np.ndarray, v: np.ndarray) -> np.ndarray:
    r = h @ v - v * w
    return np.linalg.norm(r, axis=0) / np.linalg.norm(v, axis=0)


def diagonalize(h, tol: float = DEFAULT_TOL, *, backend: str | None = None,
                method: str = "auto") -> SpectrumResult:
    """Every eigenpair of a truncated Hamiltonian (or of any symmetric matrix).

    ``method="chains"`` (the default for :class:`TruncatedHamiltonian`) solves
    the four tridiagonal chains; ``method="dense"`` runs Householder reduction
    on the full matrix.  Either way each pair must satisfy
    ``||Hv - lam v|| <= tol * ||H||`` against the dense matrix, or
    :class:`SolverError` is raised.
    """
    if method not in ("auto", "chains", "dense"):
        raise UsageError(f"unknown method {method!r}")
    if isinstance(h, TruncatedHamiltonian):
        matrix = h.matrix
        pair = (h.n_max, None)
        if method in ("auto", "chains"):
            w, v = _solve_chains(h, backend)
        else:
            w, v = eigh_dense(matrix, backend=backend)
    else:
        if method == "chains":
            raise UsageError("chain method needs a TruncatedHamiltonian")
        matrix = np.asarray(h, dtype=np.float64)
        pair = (None, None)
        w, v = eigh_dense(matrix, backend=backend)

    res = _residuals(matrix, w, v) if w.size else np.empty(0)
    bound = float(res.max()) if res.size else 0.0
    hnorm = float(np.max(np.abs(w))) if w.size else 0.0
    if bound > tol * max(hnorm, np.finfo(float).tiny):
        raise SolverError(f"eigenpair residual {bound:.3e} exceeds tol*||H|| = {tol * hnorm:.3e}")
    return SpectrumResult(w, v, res, bound, pair, None, tol)


def _solve_chains(h: TruncatedHamiltonian, backend) -> tuple[np.ndarray, np.ndarray]:
    dim = h.dimension
    values, vectors = [], []
    root_half = math.sqrt(0.5)
    for chain in h.chains():
        w, z = eigh_tridiagonal(chain.diagonal, chain.offdiagonal, backend=backend)
        v = np.zeros((dim, w.size))
        v[chain.up_rows, :] = root_half * z
        v[chain.down_rows, :] = root_half * chain.signs[:, None] * z
        values.append(w)
        vectors.append(v)
    w = np.concatenate(values)
    v = np.concatenate(vectors, axis=1)
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def converged_spectrum(params: ModelParams, n_max: int = DEFAULT_CUTOFFS[0],
                       n_max2: int = DEFAULT_CUTOFFS[1], tol: float = DEFAULT_TOL, *,
                       parity_block: str | None = None,
                       backend: str | None = None) -> SpectrumResult:
    """Levels that agree, index by index, between two cutoffs.

    Matching is by sorted position, not by nearest value, so degenerate pairs
    are compared slot for slot.  The reported eigenpairs come from the larger
    cutoff.  No agreeing level at all yields status ``"warning"``.
    """
    if not n_max < n_max2:
        raise UsageError(f"cutoffs must increase, got ({n_max}, {n_max2})")
    small = diagonalize(build_hamiltonian(params, n_max, parity_block), tol, backend=backend)
    large = diagonalize(build_hamiltonian(params, n_max2, parity_block), tol, backend=backend)
    shared = min(len(small), len(large))
    agree = np.abs(small.eigenvalues[:shared] - large.eigenvalues[:shared]) <= tol
    k = shared if agree.all() else int(np.argmin(agree))
    status = "ok"
    if k == 0:
        status = "warning"
        warnings.warn("no eigenvalue agrees between the two cutoffs; "
                      "the coupling may be too close to spectral collapse", RuntimeWarning)
    large.truncation_pair = (n_max, n_max2)
    large.converged_count = k
    return SpectrumResult(
        eigenvalues=large.eigenvalues[:k],
        eigenvectors=large.eigenvectors[:, :k],
        residuals=large.residuals[:k],
        residual_bound=float(large.residuals[:k].max()) if k else 0.0,
        truncation_pair=(n_max, n_max2),
        converged_count=k,
        tolerance=tol,
        status=status,
        full=large,
    )


# ---- Bargmann norm -------------------------------------------------------

CONVERGING_INCREMENT = 1e-12
DIVERGING_INCREMENT = 1e-6
TAIL_WINDOW = 10
RATIO_SLACK = 1e-9  # log-term rounding allowed in the ratio test


@dataclass(frozen=True)
class BargmannNormDiag:
    partial_log_sums: np.ndarray
    classification: str

    @property
    def norm_squared(self) -> float:
        finite = self.partial_log_sums[np.isfinite(self.partial_log_sums)]
        return float(np.exp(finite[-1])) if finite.size else 0.0

    def to_json(self) -> dict:
        return {"classification": self.classification, "norm_squared": self.norm_squared}


def bargmann_norm_diag(coeffs: Sequence, basis: str = "fock") -> BargmannNormDiag:
    """Partial sums of the Bargmann norm, in log scale, and a verdict on them.

    With ``basis="fock"`` the input is the orthonormal-basis amplitude c_n and
    the squared norm is sum |c_n|^2.  With ``basis="monomial"`` it is the
    coefficient of z^n and each term carries an extra n!.

    Classification over the last ten terms: *converging* if every increment
    of the log partial sum is below 1e-12; *diverging* if the terms never
    decrease beyond rounding (ratio test >= 1) and every increment exceeds 1e-6; otherwise
    *inconclusive*.
    """
    c = np.abs(np.asarray(coeffs, dtype=np.complex128))
    if basis not in ("fock", "monomial"):
        raise UsageError(f"basis must be 'fock' or 'monomial', got {basis!r}")
    with np.errstate(divide="ignore"):
        log_terms = 2.0 * np.log(c)
    if basis == "monomial":
        log_terms = log_terms + np.array([math.lgamma(n + 1) for n in range(c.size)])
    partial = np.logaddexp.accumulate(log_terms) if c.size else np.empty(0)

    finite = np.isfinite(partial)
    classification = "inconclusive"
    if finite.any():
        start = int(np.argmax(finite))
        tail = partial[start:]
        if tail.size > TAIL_WINDOW:
            inc = np.diff(tail)[-TAIL_WINDOW:]
            terms = log_terms[start:][-TAIL_WINDOW:]
            if np.all(inc < CONVERGING_INCREMENT):
                classification = "converging"
            elif np.all(np.diff(terms) >= -RATIO_SLACK) and np.all(inc > DIVERGING_INCREMENT):
                classification = "diverging"
    return BargmannNormDiag(partial, classification)


def eigenvector_norm_diags(h: TruncatedHamiltonian, vector: np.ndarray) -> dict:
    """Norm diagnostics for the phi1 (s=0) and phi2 (s=1) Fock components."""
    out = {}
    for s, name in ((0, "phi1"), (1, "phi2")):
        comp = np.zeros(h.n_max + 1)
        mask = h.spins == s
        comp[h.photon_numbers[mask]] = vector[mask]
        out[name] = bargmann_norm_diag(comp, "fock")
    return out


# ---- closed forms used as oracles ---------------------------------------

def decoupled_levels(params: ModelParams, count: int) -> np.ndarray:
    """g = 0: the levels w n +- w0/2, lowest ``count`` of them."""
    w, half = float(params.omega), abs(float(params.omega0)) / 2
    n = np.arange(count + 1)
    return np.sort(np.concatenate((w * n - half, w * n + half)))[:count]


def bogoliubov_levels(params: ModelParams, count: int) -> np.ndarray:
    """w0 = 0: each spin sector is w N +- 2g(a^2 + a^dagger^2), a squeezed
    oscillator with frequency sqrt(w^2 - 16 g^2) and zero-point shift -w/2.
    Every level is doubly degenerate."""
    if params.omega0 != 0:
        raise UsageError("closed form needs omega0 = 0")
    check_collapse(params)
    w = float(params.omega)
    eps = math.sqrt(float(params.omega ** 2 - 16 * params.g ** 2))
    n = np.arange((count + 1) // 2)
    return np.repeat(eps * (n + 0.5) - w / 2, 2)[:count]


# ---- spectrum versus the G scan -----------------------------------------

@dataclass
class ThesisReport:
    params: ModelParams
    spectrum: SpectrumResult
    scan: object | None
    scan_skipped: str | None
    control: object | None
    norm_diags: list

    @property
    def scan_vacuous(self) -> bool:
        return self.scan is not None and self.scan.all_zero

    def conclusion(self) -> str:
        k = self.spectrum.converged_count or 0
        if self.scan is None:
            scan_text = f"G scan not run ({self.scan_skipped})"
        else:
            scan_text = (f"G(z0, E) is exactly zero at {self.scan.zero_count} of "
                         f"{len(self.scan.points)} scanned energies")
        verdict = ("so the root condition is met everywhere and singles out no energy"
                   if self.scan_vacuous else "see the scan values")
        return f"{scan_text}, {verdict}; the truncated Hamiltonian has {k} discrete converged levels."


def spectrum_vs_gscan(params: ModelParams, grid: Sequence[Fraction], z0=Fraction(1, 3), *,
                      cutoffs: tuple = DEFAULT_CUTOFFS, tol: float = DEFAULT_TOL,
                      order: int = 200, control: bool = False,
                      parity_block: str | None = None,
                      backend: str | None = None) -> ThesisReport:
    """Converged levels next to the G scan over the same parameters.

    With g = 0 the Bargmann system drops to first order and the series
    recurrence has nothing to divide by, so the scan is skipped and the
    reason recorded.
    """
    from .gfunction import g_root_scan
    from .series import InitialConditions

    spec = converged_spectrum(params, cutoffs[0], cutoffs[1], tol,
                              parity_block=parity_block, backend=backend)
    h = build_hamiltonian(params, cutoffs[1], parity_block)
    diags = [eigenvector_norm_diags(h, spec.eigenvectors[:, j]) for j in range(len(spec))]
    scan = control_scan = skipped = None
    if params.g == 0:
        skipped = "g = 0 leaves no second-order recurrence to build G from"
    else:
        scan = g_root_scan(params, grid, z0, order)
        if control:
            control_scan = g_root_scan(params, grid, z0, order, ics=InitialConditions(1, 1, 1, 0))
    return ThesisReport(params, spec, scan, skipped, control_scan, diags)
