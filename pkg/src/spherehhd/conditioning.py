"""Conditioning analysis of the per-order systems.

The normal matrix of one order's block system has the closed-form Cholesky
factor ``R`` with three nonzero diagonals (``d``, ``-e``, ``-f``), which
turns condition-number estimation into scalar inequalities:

* the 2-norm condition number of the block system equals that of ``R``;
* row/column-sum bounds on bidiagonal-like triangles bracket the extreme
  singular values for orders ``m >= 2``;
* for ``m == 1`` a block semi-separable representation of ``R^{-1}`` gives
  a Frobenius-norm bound that grows only logarithmically.

Dense singular-value and eigenvalue oracles (LAPACK via numpy) live here
and in the test suite only; the fast solver never touches them.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import recurrences as rec
from .operators import BandedMatrix, build_A, build_B

__all__ = [
    "CholeskyR",
    "ConditionReport",
    "build_R",
    "build_CD",
    "kappa_numeric",
    "kappa_bound",
    "qi_singular_bounds",
    "block_a",
    "block_b",
    "block_c",
    "block_a_inv",
    "inverse_norm_frobenius_bound",
    "inverse_norm_conjecture",
    "condition_trend",
]

DENSE_ORACLE_LIMIT = 512


@dataclass
class CholeskyR:
    """Closed-form upper-triangular Cholesky factor of one order's normal matrix.

    ``d``, ``e``, ``f`` hold the main, first and second superdiagonals (the
    off-diagonals enter with a minus sign); ``n`` is the matrix dimension.
    """

    n: int
    m: int
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray

    def to_dense(self):
        out = np.zeros((self.n, self.n))
        idx = np.arange(self.n)
        out[idx, idx] = self.d
        out[idx[:-1], idx[:-1] + 1] = -self.e
        out[idx[:-2], idx[:-2] + 2] = -self.f
        return out


def build_R(n, m):
    """Cholesky factor of size ``n`` for order ``m``, from the closed forms."""
    if n < 1 or m < 1:
        raise ValueError(f"build_R: need n >= 1 and m >= 1, got n={n}, m={m}")
    ell = np.arange(1, n + 1)
    return CholeskyR(
        n,
        m,
        np.atleast_1d(rec.chol_d(ell, m)),
        np.atleast_1d(rec.chol_e(ell[: n - 1], m)) if n > 1 else np.zeros(0),
        np.atleast_1d(rec.chol_f(ell[: n - 2], m)) if n > 2 else np.zeros(0),
    )


def _banded_from_dense(dense, lower_bw, upper_bw):
    rows, cols = dense.shape
    out = BandedMatrix(rows, cols, lower_bw, upper_bw)
    for off in range(-upper_bw, lower_bw + 1):
        lo = max(0, -off)
        hi = min(cols, rows - off)
        j = np.arange(lo, hi)
        out.data[upper_bw + off, lo:hi] = dense[j + off, j]
    check = out.toarray()
    if not np.array_equal(check, dense):
        raise AssertionError("matrix has entries outside the declared band")
    return out


def build_CD(n, m):
    """Normal-matrix blocks ``C = A'A + B'B`` and ``D = A'B + B'A``.

    ``C`` comes out pentadiagonal with exact zeros on the first sub- and
    superdiagonals, ``D`` tridiagonal with an exactly zero main diagonal;
    the constructor verifies both structures.
    """
    if not 1 <= m <= n - 1:
        raise ValueError(f"build_CD: need 1 <= m <= n-1, got m={m}, n={n}")
    a = build_A(n, m).toarray()
    b = build_B(n, m).toarray()
    c = a.T @ a + b.T @ b
    d = a.T @ b + b.T @ a
    return _banded_from_dense(c, 2, 2), _banded_from_dense(d, 1, 1)


def kappa_bound(n, m):
    """Proved upper bound on the 2-norm condition number of the order-``m`` factor.

    The ``m == 1`` branch grows like ``n log n``; for ``m >= 2`` the bound is
    the ratio of the singular-value brackets and is uniform in ``n/m``.
    """
    if n < 1 or m < 1:
        raise ValueError("kappa_bound: need n >= 1 and m >= 1")
    if m == 1:
        return (n + 2.5) * (4.0 * math.exp(1.0 + 7.0 * math.pi**2 / 8.0) * (2.0 + math.log(n)))
    return (n + m + 1.5) / (m - 1.5)


def qi_singular_bounds(n, m):
    """Row/column-sum brackets on the extreme singular values of the factor.

    Returns ``(sigma_max_upper, sigma_min_lower)``; the lower bound is only
    valid for ``m >= 2`` and is ``None`` at ``m == 1``.  Entries whose index
    drops below one contribute zero.
    """
    if n < 1 or m < 1:
        raise ValueError("qi_singular_bounds: need n >= 1 and m >= 1")
    ell = np.arange(1, n + 1)
    d = np.atleast_1d(rec.chol_d(ell, m))
    e = np.atleast_1d(rec.chol_e(ell, m))
    f = np.atleast_1d(rec.chol_f(ell, m))
    e_prev = np.concatenate([[0.0], e[:-1]])  # e_{l-1}
    f_prev2 = np.concatenate([[0.0, 0.0], f[:-2]])  # f_{l-2}
    sigma_max = max(np.max(d + e + f), np.max(d + e_prev + f_prev2))
    if m == 1:
        return float(sigma_max), None
    sigma_min = min(np.min(d - e - f), np.min(d - e_prev - f_prev2))
    return float(sigma_max), float(sigma_min)


@dataclass
class ConditionReport:
    """Dense condition numbers of one order's system next to the proved bounds."""

    n: int
    m: int
    kappa_R: float
    kappa_M: float
    bound: float
    sigma_max_bound: float = None
    sigma_min_bound: float = None


def kappa_numeric(n, m):
    """Dense-oracle condition numbers for truncation ``n`` and order ``m``.

    The block system is assembled densely and its singular values compared
    with those of the closed-form factor (of matching dimension ``n - m``);
    the report also carries the theorem bound evaluated at ``(n, m)`` and
    the singular-value brackets.  Refuses truncations beyond the dense
    oracle scale.
    """
    if n > DENSE_ORACLE_LIMIT:
        raise ValueError(f"kappa_numeric: dense oracle limited to n <= {DENSE_ORACLE_LIMIT}")
    if not 1 <= m <= n - 1:
        raise ValueError(f"kappa_numeric: need 1 <= m <= n-1, got m={m}, n={n}")
    r = build_R(n - m, m).to_dense()
    sv_r = np.linalg.svd(r, compute_uv=False)
    kappa_r = float(sv_r[0] / sv_r[-1])
    a = build_A(n, m).toarray()
    b = build_B(n, m).toarray()
    big = np.block([[a, b], [b, a]])
    sv_m = np.linalg.svd(big, compute_uv=False)
    kappa_m = float(sv_m[0] / sv_m[-1])
    sigma_max, sigma_min = qi_singular_bounds(n - m, m)
    return ConditionReport(
        n,
        m,
        kappa_R=kappa_r,
        kappa_M=kappa_m,
        bound=kappa_bound(n, m),
        sigma_max_bound=sigma_max,
        sigma_min_bound=sigma_min,
    )


def block_a(l, m=1):
    """Diagonal 2x2 block of the blocked factor (rows ``2l-1``, ``2l``)."""
    if l < 1:
        raise ValueError("block_a: need l >= 1")
    return np.array(
        [
            [rec.chol_d(2 * l - 1, m), -rec.chol_e(2 * l - 1, m)],
            [0.0, rec.chol_d(2 * l, m)],
        ]
    )


def block_b(l, m=1):
    """Superdiagonal 2x2 block of the blocked factor."""
    if l < 1:
        raise ValueError("block_b: need l >= 1")
    return -np.array(
        [
            [rec.chol_f(2 * l - 1, m), 0.0],
            [rec.chol_e(2 * l, m), rec.chol_f(2 * l, m)],
        ]
    )


def block_a_inv(l, m=1):
    """Closed-form inverse of the diagonal block."""
    d1 = rec.chol_d(2 * l - 1, m)
    d2 = rec.chol_d(2 * l, m)
    e1 = rec.chol_e(2 * l - 1, m)
    return np.array([[1.0 / d1, e1 / (d1 * d2)], [0.0, 1.0 / d2]])


def block_c(l, m=1):
    """Propagation block ``c_l = -a_l^{-1} b_l`` of the semi-separable inverse."""
    return -block_a_inv(l, m) @ block_b(l, m)


def inverse_norm_frobenius_bound(n):
    """Proved bound on ``||R^{-1}||_2`` for ``m == 1`` with ``n`` 2x2 blocks.

    Proved for the blocked dimension ``2n``; dense inverses of the
    constructed factors stay below it.
    """
    if n < 1:
        raise ValueError("inverse_norm_frobenius_bound: need n >= 1")
    return 4.0 * math.exp(1.0 + 7.0 * math.pi**2 / 8.0) * (2.0 + math.log(2 * n - 1))


def inverse_norm_conjecture(n):
    """Conjectured sharp estimate of ``||R^{-1}||_2`` at ``m == 1`` (reported, not proved)."""
    if n <= 1:
        raise ValueError("inverse_norm_conjecture: need n > 1")
    return (2.0 / math.pi) * math.log(n + 2.5)


def condition_trend(n, orders=None):
    """Dense ``kappa_2`` of the factor for each order at fixed truncation ``n``.

    Used to report the empirical monotone decrease of the condition number
    as the order grows toward ``n``; soft-checked, since the trend is an
    observation rather than a theorem.
    """
    if orders is None:
        orders = range(2, n)
    out = {}
    for m in orders:
        r = build_R(n - m, m).to_dense()
        sv = np.linalg.svd(r, compute_uv=False)
        out[m] = float(sv[0] / sv[-1])
    return out
