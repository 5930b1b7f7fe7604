"""Symmetric eigensolver: Householder reduction, Sturm bisection, inverse iteration.

The tridiagonal stage splits the matrix wherever an off-diagonal entry is
negligible, finds each block's eigenvalues by bisection on Sturm counts and
its eigenvectors by inverse iteration with a pivoted LU of ``T - lam I``.
Eigenvalues closer than 1e-3 ||T|| form a cluster whose vectors are
orthogonalized against each other inside the iteration.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import SolverError, UsageError

MAX_INVERSE_ITERATIONS = 5
CLUSTER_GAP = 1e-3
_START_SEED = 20240229


def _start_vector(m: int, k: int = 0) -> np.ndarray:
    return np.random.default_rng((_START_SEED, k)).uniform(-1.0, 1.0, m)


def _split_points(d: np.ndarray, e: np.ndarray) -> list[tuple[int, int]]:
    small = np.abs(e) <= kernels.EPS * (np.abs(d[:-1]) + np.abs(d[1:]))
    cuts = [0] + [i + 1 for i in np.nonzero(small)[0]] + [d.shape[0]]
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _clusters(lam: np.ndarray, gap: float) -> list[tuple[int, int]]:
    """Runs of at least two eigenvalues with neighbours closer than ``gap``."""
    out, start = [], 0
    for j in range(1, lam.shape[0] + 1):
        if j < lam.shape[0] and lam[j] - lam[j - 1] < gap:
            continue
        if j - start > 1:
            out.append((start, j))
        start = j
    return out


def _orthogonalize(y: np.ndarray, vecs: list) -> np.ndarray:
    for _ in range(2):
        for v in vecs:
            y = y - np.dot(v, y) * v
    return y / np.linalg.norm(y)


def _cluster_vectors(invit, d, e, lam, pivfloor, tol, maxit) -> np.ndarray:
    """Inverse iteration for one cluster, orthogonalizing against earlier
    members after every solve so repeated shifts still give distinct vectors."""
    vecs = []
    for j, lam_j in enumerate(lam):
        x, ok = _orthogonalize(_start_vector(d.shape[0], j + 1), vecs), False
        for _ in range(maxit):
            y = invit(d, e, np.array([lam_j]), x, pivfloor, np.inf, 1)[0][:, 0]
            y = _orthogonalize(y, vecs)
            r = d * y - lam_j * y
            r[:-1] += e * y[1:]
            r[1:] += e * y[:-1]
            x = y
            if np.linalg.norm(r) <= tol:
                ok = True
                break
        if not ok:
            raise SolverError(f"inverse iteration stalled in a cluster at {lam_j!r}", maxit)
        vecs.append(x)
    return np.column_stack(vecs)


def _fix_signs(z: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(z), axis=0)
    signs = np.sign(z[idx, np.arange(z.shape[1])])
    signs[signs == 0] = 1.0
    return z * signs


def eigh_tridiagonal(d, e, *, backend: str | None = None,
                     maxit: int = MAX_INVERSE_ITERATIONS) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of the symmetric tridiagonal matrix with diagonal ``d``
    and off-diagonal ``e``, eigenvalues ascending."""
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    m = d.shape[0]
    if e.shape[0] != max(m - 1, 0):
        raise UsageError(f"off-diagonal length {e.shape[0]} does not match size {m}")
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise UsageError("tridiagonal matrix has non-finite entries")
    bisect = kernels.get("bisect", backend)
    invit = kernels.get("inverse_iteration", backend)

    w = np.empty(m)
    z = np.zeros((m, m))
    for a, b in _split_points(d, e):
        if b - a == 1:
            w[a] = d[a]
            z[a, a] = 1.0
            continue
        db, eb = d[a:b], e[a:b - 1]
        radius = np.abs(np.concatenate(([0.0], eb))) + np.abs(np.concatenate((eb, [0.0])))
        bnorm = float(np.max(np.abs(db) + radius))
        e2 = eb * eb
        pivmin = np.finfo(np.float64).tiny * max(1.0, float(e2.max()))
        pad = 2.0 * kernels.EPS * bnorm + 2.0 * pivmin
        lo = float(np.min(db - radius)) - pad
        hi = float(np.max(db + radius)) + pad
        lam = bisect(db, e2, lo, hi, pivmin, kernels.EPS * bnorm)
        size = b - a
        x0 = _start_vector(size)
        pivfloor, tol = kernels.EPS * bnorm, size * kernels.EPS * bnorm
        zb, its = invit(db, eb, lam, x0, pivfloor, tol, maxit)
        zb = np.array(zb)
        clustered = np.zeros(size, dtype=bool)
        for lo_j, hi_j in _clusters(lam, CLUSTER_GAP * bnorm):
            zb[:, lo_j:hi_j] = _cluster_vectors(invit, db, eb, lam[lo_j:hi_j], pivfloor, tol, maxit)
            clustered[lo_j:hi_j] = True
        stalled = (its < 0) & ~clustered
        if np.any(stalled):
            bad = int(np.nonzero(stalled)[0][0])
            raise SolverError(f"inverse iteration stalled for eigenvalue {lam[bad]!r}", maxit)
        w[a:b] = lam
        z[a:b, a:b] = zb
    order = np.argsort(w, kind="stable")
    return w[order], _fix_signs(z[:, order])


def eigh_dense(a, *, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of a dense real symmetric matrix."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise UsageError("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise UsageError("matrix is not symmetric")
    if a.shape[0] == 0:
        return np.empty(0), np.empty((0, 0))
    d, off, q = kernels.get("householder", backend)(a)
    w, z = eigh_tridiagonal(d, off, backend=backend)
    return w, _fix_signs(q @ z)
