"""Banded QR least-squares per order and the full tangential-field decomposition.

Each order's interleaved system is barely overdetermined (two extra rows)
and pentadiagonal, so a QR factorization by plane rotations confined to the
band factors and solves in time linear in the system size; summing over
orders gives the O(n^2) total.  Rotations are stored so a factorization can
be reused across right-hand sides, and the two right-hand-side columns of
one order are solved against a single factorization.

The normal equations are never formed: squaring the system would square its
condition number, and one least-squares pass in float64 already meets the
error target.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import recurrences as rec
from .operators import _cscy_to_z_multi, build_A, build_order_system, z_to_cscy
from .spectra import HHDResult, ScalarSpectrum, TangentField

__all__ = [
    "BandedQRFactorization",
    "FactorCache",
    "factor_order",
    "factor_order_zero",
    "solve_order",
    "differentiate",
    "decompose",
    "decompose_timed",
    "decompose_order_zero",
]


def _givens_qr_band(widened, nrows, ncols, kl, ku_work):
    """Eliminate the subdiagonal band with adjacent-row plane rotations.

    ``widened`` is a ``(kl + ku_work + 1, ncols)`` array in LAPACK band
    layout, ``widened[ku_work + i - j, j] = M[i, j]``, with ``ku_work`` wide
    enough to hold the fill-in (``ku + kl``).  Columns are processed left to
    right, each column bottom-up, so the factor's diagonal comes out
    nonnegative.  Returns the packed R (top ``ku_work + 1`` band rows) and
    the rotation sequence.
    """
    h = kl + ku_work + 1
    hm1 = h - 1
    buf = widened.ravel(order="F").tolist()  # flat index j * h + (ku_work + i - j)
    if nrows - 1 - (ncols - 1) >= kl:
        counts = [kl] * ncols  # bottom edge never clips (barely overdetermined)
    else:
        counts = [min(nrows - 1, j + kl) - j for j in range(ncols)]
    rot_rows = np.empty(sum(counts), dtype=np.int64)
    rot_c = np.empty(len(rot_rows))
    rot_s = np.empty(len(rot_rows))
    t = 0
    sqrt = math.sqrt
    last_col = ncols - 1
    edge = max(0, ncols - ku_work)  # columns whose update span is clipped
    for j in range(ncols):
        base_j = j * hm1 + ku_work
        for i in range(j + counts[j], j, -1):
            pos = base_j + i
            b = buf[pos]
            if b == 0.0:
                rot_rows[t] = i
                rot_c[t] = 1.0
                rot_s[t] = 0.0
                t += 1
                continue
            a = buf[pos - 1]
            r = sqrt(a * a + b * b)
            c = a / r
            s = b / r
            buf[pos - 1] = r
            buf[pos] = 0.0
            if j < edge and ku_work == 4:
                # full-span update, unrolled (same rows, next column: offset hm1)
                i1 = pos + hm1
                x = buf[i1 - 1]
                y = buf[i1]
                buf[i1 - 1] = c * x + s * y
                buf[i1] = c * y - s * x
                i1 += hm1
                x = buf[i1 - 1]
                y = buf[i1]
                buf[i1 - 1] = c * x + s * y
                buf[i1] = c * y - s * x
                i1 += hm1
                x = buf[i1 - 1]
                y = buf[i1]
                buf[i1 - 1] = c * x + s * y
                buf[i1] = c * y - s * x
                i1 += hm1
                x = buf[i1 - 1]
                y = buf[i1]
                buf[i1 - 1] = c * x + s * y
                buf[i1] = c * y - s * x
            else:
                hi = j + ku_work
                if hi > last_col:
                    hi = last_col
                idx = pos
                for _ in range(j + 1, hi + 1):
                    idx += hm1
                    x = buf[idx - 1]
                    y = buf[idx]
                    buf[idx - 1] = c * x + s * y
                    buf[idx] = c * y - s * x
            rot_rows[t] = i
            rot_c[t] = c
            rot_s[t] = s
            t += 1
    rband = np.array(buf).reshape((ncols, h)).T[: ku_work + 1].copy()
    return rband, rot_rows, rot_c, rot_s


class BandedQRFactorization:
    """Packed R factor plus the rotation sequence of one per-order system.

    ``perm_rows``/``perm_cols`` carry the interleaving when the factored
    matrix is the shuffled block system; they are ``None`` for the separable
    ``m == 0`` system, which is factored as built.
    """

    def __init__(self, n, m, nrows, ncols, kl, ku_work, rband, rot_rows, rot_c, rot_s,
                 perm_rows=None, perm_cols=None):
        self.n = n
        self.m = m
        self.nrows = nrows
        self.ncols = ncols
        self.kl = kl
        self.ku_work = ku_work
        self.rband = rband
        self.rot_rows = rot_rows
        self.rot_c = rot_c
        self.rot_s = rot_s
        self.perm_rows = perm_rows
        self.perm_cols = perm_cols
        self._lists = None  # lazy flat views used by the solve loops

    @property
    def rotation_count(self):
        return len(self.rot_rows)

    def r_entry(self, i, j):
        """Entry ``(i, j)`` of the triangular factor (zero outside its band)."""
        if not (0 <= i < self.ncols and 0 <= j < self.ncols):
            raise IndexError((i, j))
        if i > j or j - i > self.ku_work:
            return 0.0
        return float(self.rband[self.ku_work + i - j, j])

    def r_dense(self):
        out = np.zeros((self.ncols, self.ncols))
        for d in range(self.ku_work + 1):
            for j in range(d, self.ncols):
                out[j - d, j] = self.rband[self.ku_work - d, j]
        return out

    def solve_shuffled(self, rhs):
        """Least-squares solve of the factored (already interleaved) system.

        ``rhs`` has shape ``(nrows, k)``; returns ``(x, residual)`` with
        ``x`` of shape ``(ncols, k)`` and the 2-norm of the combined
        residual over all columns.
        """
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape[0] != self.nrows:
            raise ValueError(
                f"rhs has {rhs.shape[0]} rows, factorization expects {self.nrows}"
            )
        if self._lists is None:
            self._lists = (
                self.rot_rows.tolist(),
                self.rot_c.tolist(),
                self.rot_s.tolist(),
                self.rband.ravel(order="F").tolist(),
            )
        rows, cs, sn, rb = self._lists
        cols = [rhs[:, k].tolist() for k in range(rhs.shape[1])]
        if len(cols) == 2:
            col0, col1 = cols
            for i, c, s in zip(rows, cs, sn):
                if s == 0.0:
                    continue
                im = i - 1
                x = col0[im]
                y = col0[i]
                col0[im] = c * x + s * y
                col0[i] = c * y - s * x
                x = col1[im]
                y = col1[i]
                col1[im] = c * x + s * y
                col1[i] = c * y - s * x
        else:
            for col in cols:
                for i, c, s in zip(rows, cs, sn):
                    if s == 0.0:
                        continue
                    x = col[i - 1]
                    y = col[i]
                    col[i - 1] = c * x + s * y
                    col[i] = c * y - s * x
        ncols = self.ncols
        ku = self.ku_work
        h2 = ku + 1  # rb flat index: j * h2 + (ku + i - j)
        xs = []
        res2 = 0.0
        for col in cols:
            x_out = [0.0] * ncols
            for i in range(ncols - 1, -1, -1):
                acc = col[i]
                hi = i + ku
                if hi > ncols - 1:
                    hi = ncols - 1
                base = ku + i
                for j in range(i + 1, hi + 1):
                    acc -= rb[j * h2 + base - j] * x_out[j]
                piv = rb[i * h2 + ku]
                if piv == 0.0:
                    raise ZeroDivisionError(f"zero pivot at column {i} (m={self.m})")
                x_out[i] = acc / piv
            for i in range(ncols, self.nrows):
                res2 += col[i] * col[i]
            xs.append(x_out)
        return np.array(xs).T, math.sqrt(res2)


def factor_order(n, m):
    """Banded QR of the interleaved pentadiagonal system for order ``m >= 1``."""
    if not 1 <= m <= n - 1:
        raise ValueError(f"factor_order: need 1 <= m <= n-1, got m={m}, n={n}")
    system = build_order_system(n, m)
    kl, ku = 2, 2
    ku_work = kl + ku
    nrows, ncols = system.shuffled.rows, system.shuffled.cols
    widened = np.zeros((kl + ku_work + 1, ncols))
    widened[ku_work - ku :] = system.shuffled.data
    rband, rot_rows, rot_c, rot_s = _givens_qr_band(widened, nrows, ncols, kl, ku_work)
    return BandedQRFactorization(
        n, m, nrows, ncols, kl, ku_work, rband, rot_rows, rot_c, rot_s,
        perm_rows=system.perm_rows, perm_cols=system.perm_cols,
    )


def factor_order_zero(n):
    """Banded QR of the separable colatitude block for the ``m == 0`` path."""
    a0 = build_A(n, 0)
    kl, ku = a0.lower_bw, a0.upper_bw
    ku_work = kl + ku
    widened = np.zeros((kl + ku_work + 1, a0.cols))
    widened[ku_work - ku :] = a0.data
    rband, rot_rows, rot_c, rot_s = _givens_qr_band(widened, a0.rows, a0.cols, kl, ku_work)
    return BandedQRFactorization(
        n, 0, a0.rows, a0.cols, kl, ku_work, rband, rot_rows, rot_c, rot_s
    )


class FactorCache:
    """Per-order factorizations for one truncation degree, built on demand.

    Populated once (single writer) and read-only afterwards; a warm cache
    makes repeated decompositions skip all factorization work.  Note that a
    full cache holds O(n^2) floats.
    """

    def __init__(self, n):
        self.n = n
        self._factors = {}
        self.factorizations_performed = 0

    def factorization(self, m):
        if m not in self._factors:
            self._factors[m] = factor_order(self.n, m) if m >= 1 else factor_order_zero(self.n)
            self.factorizations_performed += 1
        return self._factors[m]


def solve_order(fact, rhs):
    """Least-squares solve of one order's block system in natural degree order.

    ``rhs`` stacks the two block rows (length ``2(n+1-m)``) and may carry
    one or two columns.  The interleaving of the factored system is applied
    internally on the way in and inverted on the way out, so both ``rhs``
    and the returned solution columns are in natural degree order.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    if rhs.shape[0] != fact.nrows:
        raise ValueError(f"rhs rows {rhs.shape[0]} != system rows {fact.nrows}")
    if fact.perm_rows is not None:
        shuffled_rhs = np.empty_like(rhs)
        shuffled_rhs[fact.perm_rows] = rhs
    else:
        shuffled_rhs = rhs
    x, residual = fact.solve_shuffled(shuffled_rhs)
    if fact.perm_cols is not None:
        x = x[fact.perm_cols]
    if squeeze:
        x = x[:, 0]
    return x, residual


def decompose_order_zero(theta_slice, phi_slice, n, fact=None):
    """Separable ``m == 0`` solve: gradient and curl decouple completely.

    ``theta_slice``/``phi_slice`` are the order-zero csc-harmonic
    coefficients (degrees ``0..n``); returns the order-zero spheroidal and
    toroidal coefficients (degrees ``1..n-1``) and the combined residual
    norm.
    """
    theta_slice = np.asarray(theta_slice, dtype=np.float64)
    phi_slice = np.asarray(phi_slice, dtype=np.float64)
    if theta_slice.shape != (n + 1,) or phi_slice.shape != (n + 1,):
        raise ValueError("decompose_order_zero: slices must have length n + 1")
    if fact is None:
        fact = factor_order_zero(n)
    x, residual = solve_order(fact, np.column_stack([theta_slice, phi_slice]))
    return x[:, 0], x[:, 1], residual


def differentiate(s, t):
    """Tangential field of the potentials: ``grad(s) + e_r x grad(t)``.

    Both potentials must share a degree ``n_pot = n - 1``; their ``(0, 0)``
    coefficients are ignored since constants have no gradient.  The result
    is expressed in the tangential basis at truncation degree ``n``, which
    is exactly the range :func:`decompose` inverts.
    """
    if s.n_pot != t.n_pot:
        raise ValueError("differentiate: potentials must share a degree")
    if s.n_pot < 1:
        raise ValueError("differentiate: need potential degree >= 1")
    n = s.n_pot + 1
    out = TangentField.zeros(n)
    a0 = build_A(n, 0)
    w0 = np.vstack([a0.matvec(s.order_slice(0)[1:]), a0.matvec(t.order_slice(0)[1:])])
    z0 = _cscy_to_z_multi(w0, 0, n)
    out.theta.set_order_slice(0, z0[0])
    out.phi.set_order_slice(0, z0[1])
    for mu in range(1, n):
        a = build_A(n, mu)
        p = a.cols
        sp, sm = s.order_slice(mu), s.order_slice(-mu)
        tp, tm = t.order_slice(mu), t.order_slice(-mu)
        w = np.empty((4, p + 1))
        w[0] = a.matvec(sp)
        w[0, :p] -= mu * tm
        w[1] = a.matvec(sm)
        w[1, :p] += mu * tp
        w[2] = a.matvec(tp)
        w[2, :p] += mu * sm
        w[3] = a.matvec(tm)
        w[3, :p] -= mu * sp
        z = _cscy_to_z_multi(w, mu, n)
        out.theta.set_order_slice(mu, z[0])
        out.theta.set_order_slice(-mu, z[1])
        out.phi.set_order_slice(mu, z[2])
        out.phi.set_order_slice(-mu, z[3])
    return out


def _solve_one_order(field, mu, n, fact, result):
    """Convert, solve and write back a single order ``mu >= 1``."""
    zth_p = field.theta.order_slice(mu)
    zth_m = field.theta.order_slice(-mu)
    zph_p = field.phi.order_slice(mu)
    zph_m = field.phi.order_slice(-mu)
    wth_p = z_to_cscy(zth_p, mu, n)
    wth_m = z_to_cscy(zth_m, mu, n)
    wph_p = z_to_cscy(zph_p, mu, n)
    wph_m = z_to_cscy(zph_m, mu, n)
    rhs = np.column_stack(
        [np.concatenate([wth_p, -wph_m]), np.concatenate([wth_m, wph_p])]
    )
    x, residual = solve_order(fact, rhs)
    p = n - mu
    result.spheroidal.set_order_slice(mu, x[:p, 0])
    result.toroidal.set_order_slice(-mu, -x[p:, 0])
    result.spheroidal.set_order_slice(-mu, x[:p, 1])
    result.toroidal.set_order_slice(mu, x[p:, 1])
    result.residual_by_order[mu] = residual
    tail = rec.beta(n, mu)
    result.out_of_range_by_order[mu] = float(
        tail * math.sqrt(zth_p[-1] ** 2 + zth_m[-1] ** 2 + zph_p[-1] ** 2 + zph_m[-1] ** 2)
    )


def _decompose_impl(field, cache, threads, timed):
    n = field.n
    if n < 2:
        raise ValueError("decompose: need truncation degree n >= 2")
    result = HHDResult(ScalarSpectrum(n - 1), ScalarSpectrum(n - 1))
    pre_seconds = 0.0
    exe_seconds = 0.0

    def get_fact(mu):
        if cache is not None:
            return cache.factorization(mu)
        return factor_order(n, mu) if mu >= 1 else factor_order_zero(n)

    # m = 0: gradient and curl separate, two solves against one factorization
    t0 = time.perf_counter()
    fact0 = get_fact(0)
    t1 = time.perf_counter()
    zt0 = field.theta.order_slice(0)
    zp0 = field.phi.order_slice(0)
    vs0, vt0, res0 = decompose_order_zero(
        z_to_cscy(zt0, 0, n), z_to_cscy(zp0, 0, n), n, fact=fact0
    )
    result.spheroidal.order_slice(0)[1:] = vs0
    result.toroidal.order_slice(0)[1:] = vt0
    result.residual_by_order[0] = res0
    result.out_of_range_by_order[0] = float(
        rec.beta(n, 0) * math.hypot(zt0[-1], zp0[-1])
    )
    t2 = time.perf_counter()
    pre_seconds += t1 - t0
    exe_seconds += t2 - t1

    orders = range(1, n)
    if threads and threads > 1 and not timed:
        if cache is not None:
            for mu in orders:  # single writer populates the cache
                cache.factorization(mu)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda mu: _solve_one_order(field, mu, n, get_fact(mu), result), orders))
    else:
        for mu in orders:
            t0 = time.perf_counter()
            fact = get_fact(mu)
            t1 = time.perf_counter()
            _solve_one_order(field, mu, n, fact, result)
            t2 = time.perf_counter()
            pre_seconds += t1 - t0
            exe_seconds += t2 - t1

    for mu in (n, n + 1):
        norm2 = 0.0
        for comp in (field.theta, field.phi):
            for sign in (mu, -mu):
                norm2 += float(np.sum(comp.order_slice(sign) ** 2))
        result.out_of_range_by_order[mu] = math.sqrt(norm2)
    return result, pre_seconds, exe_seconds


def decompose(field, cache=None, threads=None):
    """Split a tangential field into spheroidal and toroidal potentials.

    Inverts the per-order block systems by banded least squares; the
    ``(0, 0)`` coefficients of both potentials are fixed to zero, which
    selects the minimum-norm representative.  Content the truncated model
    cannot represent (orders ``|m| >= n`` and the degree ``n+1`` tails) is
    reported in ``out_of_range_by_order`` rather than raised.

    Parameters
    ----------
    field: TangentField
        Tangential-basis coefficients of the two angular components.
    cache: FactorCache, optional
        Reused factorizations; with a warm cache no QR work is repeated.
    threads: int, optional
        Worker threads for the independent per-order solves.
    """
    if threads is None:
        threads = int(os.environ.get("HHD_THREADS", "1"))
    result, _, _ = _decompose_impl(field, cache, threads, timed=False)
    return result


def decompose_timed(field):
    """Like :func:`decompose`, returning (result, precompute_s, execute_s).

    Factorization time (system assembly and QR) and execution time
    (conversions, rotation application, triangular solves) are accumulated
    separately over the orders; no cache is used, so both phases are
    measured fresh.
    """
    return _decompose_impl(field, cache=None, threads=1, timed=True)
