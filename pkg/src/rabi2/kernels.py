"""Hot loops of the eigensolver, compiled with numba when it is available.

Every kernel exists twice: a scalar-loop version compiled with ``numba.njit``
and a vectorized pure-numpy version.  Both perform the same floating-point
operations in the same order, so they agree to the last bit on the bisection
and to rounding on the rest.

Backend selection happens once at import:

* ``RABI2_BACKEND=numba`` (default) uses the compiled kernels, falling back to
  numpy if numba cannot be imported;
* ``RABI2_BACKEND=numpy`` forces the pure-numpy kernels.

:data:`IMPLEMENTATIONS` exposes both sets so tests and benchmarks can call
either one directly.
"""

from __future__ import annotations

import logging
import os

import numpy as np

from .errors import UsageError

log = logging.getLogger(__name__)

EPS = float(np.finfo(np.float64).eps)
MAX_BISECT = 256

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_requested = os.environ.get("RABI2_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    log.warning("unknown RABI2_BACKEND=%r, using numba", _requested)
    _requested = "numba"
BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


# ---- pure numpy ---------------------------------------------------------

def _sturm_counts_np(d, e2, x, pivmin):
    """Number of eigenvalues below each shift in ``x`` (vectorized over shifts)."""
    q = d[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def bisect_np(d, e2, lo0, hi0, pivmin, abstol):
    m = d.shape[0]
    lo = np.full(m, lo0)
    hi = np.full(m, hi0)
    k = np.arange(m)
    active = np.ones(m, dtype=bool)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        width_ok = hi - lo <= 2.0 * EPS * np.maximum(np.abs(lo), np.abs(hi)) + abstol
        active &= ~((mid <= lo) | (mid >= hi) | width_ok)
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        c = _sturm_counts_np(d, e2, mid[idx], pivmin)
        below = c > k[idx]
        hi[idx[below]] = mid[idx[below]]
        lo[idx[~below]] = mid[idx[~below]]
    return 0.5 * (lo + hi)


def inverse_iteration_np(d, e, lam, x0, pivmin, tol, maxit):
    """Inverse iteration for all shifts at once; returns (vectors, iterations).

    ``iterations[j]`` is -1 when column j missed ``tol`` after ``maxit`` solves.
    """
    m = d.shape[0]
    k = lam.shape[0]
    # LU with partial pivoting of T - lam I, one factorization per column
    dd = d[:, None] - lam[None, :]
    dl = np.repeat(e[:, None], k, axis=1).astype(np.float64)
    du = dl.copy()
    du2 = np.zeros((max(m - 2, 0), k))
    piv = np.zeros((max(m - 1, 0), k), dtype=bool)
    for i in range(m - 1):
        swap = np.abs(dd[i]) < np.abs(dl[i])
        piv[i] = swap
        keep = ~swap
        safe = np.where(dd[i] != 0.0, dd[i], 1.0)
        fact_k = np.where(dd[i] != 0.0, dl[i] / safe, 0.0)
        safe_l = np.where(swap, dl[i], 1.0)
        fact_s = dd[i] / safe_l
        new_dd_next = np.where(keep, dd[i + 1] - fact_k * du[i], du[i] - fact_s * dd[i + 1])
        new_du = np.where(keep, du[i], dd[i + 1])
        new_ddi = np.where(keep, dd[i], dl[i])
        dl[i] = np.where(keep, fact_k, fact_s)
        if i < m - 2:
            du2[i] = np.where(keep, 0.0, du[i + 1])
            du[i + 1] = np.where(keep, du[i + 1], -fact_s * du[i + 1])
        dd[i] = new_ddi
        du[i] = new_du
        dd[i + 1] = new_dd_next
    dd = np.where(np.abs(dd) < pivmin, np.where(dd < 0, -pivmin, pivmin), dd)

    x = np.repeat(x0[:, None], k, axis=1).astype(np.float64)
    its = np.full(k, -1, dtype=np.int64)
    done = np.zeros(k, dtype=bool)
    for it in range(1, maxit + 1):
        b = x.copy()
        for i in range(m - 1):
            sw = piv[i]
            bi, bn = b[i].copy(), b[i + 1].copy()
            b[i] = np.where(sw, bn, bi)
            b[i + 1] = np.where(sw, bi - dl[i] * bn, bn - dl[i] * bi)
        b[m - 1] = b[m - 1] / dd[m - 1]
        if m > 1:
            b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / dd[m - 2]
        for i in range(m - 3, -1, -1):
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i]
        b /= np.sqrt((b * b).sum(axis=0))
        x = np.where(done[None, :], x, b)
        r = d[:, None] * x - lam[None, :] * x
        if m > 1:
            r[:-1] += e[:, None] * x[1:]
            r[1:] += e[:, None] * x[:-1]
        res = np.sqrt((r * r).sum(axis=0))
        newly = (~done) & (res <= tol)
        its[newly] = it
        done |= newly
        if done.all():
            break
    return x, its


def householder_np(a):
    """Reduce a symmetric matrix to tridiagonal form: a = Q T Q^T."""
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        sigma = np.sqrt(np.dot(x, x))
        if sigma == 0.0:
            continue
        alpha = -sigma if x[0] >= 0 else sigma
        v = x.copy()
        v[0] -= alpha
        v /= np.sqrt(np.dot(v, v))
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        w = p - np.dot(v, p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        qk = q[:, k + 1:]
        qk -= 2.0 * np.outer(qk @ v, v)
    return np.diag(a).copy(), np.diag(a, 1).copy(), q


# ---- numba --------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _sturm_count_nb(d, e2, x, pivmin):
        q = d[0] - x
        if abs(q) < pivmin:
            q = -pivmin
        count = 1 if q < 0 else 0
        for i in range(1, d.shape[0]):
            q = d[i] - x - e2[i - 1] / q
            if abs(q) < pivmin:
                q = -pivmin
            if q < 0:
                count += 1
        return count

    @njit(cache=True)
    def bisect_nb(d, e2, lo0, hi0, pivmin, abstol):
        m = d.shape[0]
        out = np.empty(m)
        for k in range(m):
            lo = lo0
            hi = hi0
            for _ in range(MAX_BISECT):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if hi - lo <= 2.0 * EPS * max(abs(lo), abs(hi)) + abstol:
                    break
                if _sturm_count_nb(d, e2, mid, pivmin) > k:
                    hi = mid
                else:
                    lo = mid
            out[k] = 0.5 * (lo + hi)
        return out

    @njit(cache=True)
    def inverse_iteration_nb(d, e, lam, x0, pivmin, tol, maxit):
        m = d.shape[0]
        k = lam.shape[0]
        z = np.empty((m, k))
        its = np.full(k, -1, dtype=np.int64)
        dd = np.empty(m)
        dl = np.empty(max(m - 1, 0))
        du = np.empty(max(m - 1, 0))
        du2 = np.zeros(max(m - 2, 0))
        piv = np.zeros(max(m - 1, 0), dtype=np.bool_)
        b = np.empty(m)
        x = np.empty(m)
        for j in range(k):
            for i in range(m):
                dd[i] = d[i] - lam[j]
            for i in range(m - 1):
                dl[i] = e[i]
                du[i] = e[i]
            for i in range(m - 2):
                du2[i] = 0.0
            for i in range(m - 1):
                if abs(dd[i]) >= abs(dl[i]):
                    piv[i] = False
                    fact = dl[i] / dd[i] if dd[i] != 0.0 else 0.0
                    dl[i] = fact
                    dd[i + 1] = dd[i + 1] - fact * du[i]
                else:
                    piv[i] = True
                    fact = dd[i] / dl[i]
                    dd[i] = dl[i]
                    dl[i] = fact
                    tmp = du[i]
                    du[i] = dd[i + 1]
                    dd[i + 1] = tmp - fact * dd[i + 1]
                    if i < m - 2:
                        du2[i] = du[i + 1]
                        du[i + 1] = -fact * du[i + 1]
            for i in range(m):
                if abs(dd[i]) < pivmin:
                    dd[i] = -pivmin if dd[i] < 0 else pivmin
            for i in range(m):
                x[i] = x0[i]
            for it in range(1, maxit + 1):
                for i in range(m):
                    b[i] = x[i]
                for i in range(m - 1):
                    if piv[i]:
                        tmp = b[i]
                        b[i] = b[i + 1]
                        b[i + 1] = tmp - dl[i] * b[i]
                    else:
                        b[i + 1] = b[i + 1] - dl[i] * b[i]
                b[m - 1] = b[m - 1] / dd[m - 1]
                if m > 1:
                    b[m - 2] = (b[m - 2] - du[m - 2] * b[m - 1]) / dd[m - 2]
                for i in range(m - 3, -1, -1):
                    b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i]
                nrm = 0.0
                for i in range(m):
                    nrm += b[i] * b[i]
                nrm = np.sqrt(nrm)
                for i in range(m):
                    x[i] = b[i] / nrm
                res = 0.0
                for i in range(m):
                    r = d[i] * x[i] - lam[j] * x[i]
                    if i + 1 < m:
                        r += e[i] * x[i + 1]
                    if i > 0:
                        r += e[i - 1] * x[i - 1]
                    res += r * r
                if np.sqrt(res) <= tol:
                    its[j] = it
                    break
            for i in range(m):
                z[i, j] = x[i]
        return z, its

    @njit(cache=True)
    def householder_nb(a):
        n = a.shape[0]
        a = a.copy()
        q = np.eye(n)
        v = np.empty(n)
        p = np.empty(n)
        for k in range(n - 2):
            sigma = 0.0
            for i in range(k + 1, n):
                sigma += a[i, k] * a[i, k]
            sigma = np.sqrt(sigma)
            if sigma == 0.0:
                continue
            alpha = -sigma if a[k + 1, k] >= 0 else sigma
            vn = 0.0
            for i in range(k + 1, n):
                v[i] = a[i, k]
            v[k + 1] -= alpha
            for i in range(k + 1, n):
                vn += v[i] * v[i]
            vn = np.sqrt(vn)
            for i in range(k + 1, n):
                v[i] /= vn
            vp = 0.0
            for i in range(k + 1, n):
                s = 0.0
                for jj in range(k + 1, n):
                    s += a[i, jj] * v[jj]
                p[i] = s
                vp += v[i] * s
            for i in range(k + 1, n):
                p[i] -= vp * v[i]
            for i in range(k + 1, n):
                for jj in range(k + 1, n):
                    a[i, jj] -= 2.0 * (v[i] * p[jj] + p[i] * v[jj])
            for i in range(k + 1, n):
                a[i, k] = 0.0
                a[k, i] = 0.0
            a[k + 1, k] = alpha
            a[k, k + 1] = alpha
            for i in range(n):
                s = 0.0
                for jj in range(k + 1, n):
                    s += q[i, jj] * v[jj]
                for jj in range(k + 1, n):
                    q[i, jj] -= 2.0 * s * v[jj]
        dg = np.empty(n)
        off = np.empty(max(n - 1, 0))
        for i in range(n):
            dg[i] = a[i, i]
        for i in range(n - 1):
            off[i] = a[i, i + 1]
        return dg, off, q


IMPLEMENTATIONS = {
    "numpy": {
        "bisect": bisect_np,
        "inverse_iteration": inverse_iteration_np,
        "householder": householder_np,
    },
}
if HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {
        "bisect": bisect_nb,
        "inverse_iteration": inverse_iteration_nb,
        "householder": householder_nb,
    }


def get(name: str, backend: str | None = None):
    """Kernel ``name`` from ``backend`` (default: the import-time selection)."""
    backend = backend or BACKEND
    if backend not in IMPLEMENTATIONS:
        raise UsageError(f"unknown backend {backend!r}; choose from {sorted(IMPLEMENTATIONS)}")
    return IMPLEMENTATIONS[backend][name]
