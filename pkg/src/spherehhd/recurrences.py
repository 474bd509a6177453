"""Closed-form coefficients for the degree recurrences and the Cholesky factor.

All couplings between the scalar bases on the sphere uncouple by absolute
order, and every nonzero matrix entry used by the decomposition and by the
conditioning analysis is one of the seven scalar functions below.  ``m`` is
always the absolute order (callers pass ``abs(m)``); ``l`` may be a scalar or
a numpy array of degrees.

Each formula is evaluated as written, products inside a single square root.
The arguments stay comfortably inside float64 range for any practical
truncation degree, so no logarithmic rescaling is done.
"""

import numpy as np

__all__ = [
    "alpha",
    "beta",
    "gamma",
    "delta",
    "chol_d",
    "chol_e",
    "chol_f",
]


def _as_degrees(l, minimum, name):
    arr = np.asarray(l, dtype=np.float64)
    if np.any(arr < minimum):
        raise ValueError(f"{name}: degree l must be >= {minimum}, got {l}")
    return arr


def _maybe_scalar(x, like):
    return float(x) if np.ndim(like) == 0 else x


def alpha(l, m):
    """Coupling of the tangential basis onto the lower-degree csc(theta) harmonic.

    Defined for ``l >= m >= 0`` with ``l >= 1``; always nonpositive, and zero
    exactly when ``l == m``.
    """
    if m < 0:
        raise ValueError("alpha: order m must be >= 0")
    la = _as_degrees(l, max(1, m), "alpha")
    out = -np.sqrt((la - m) * (la - m + 1) / ((2 * la - 1) * (2 * la + 1)))
    return _maybe_scalar(out, l)


def beta(l, m):
    """Coupling of the tangential basis onto the higher-degree csc(theta) harmonic.

    Defined for ``l >= 0``, ``m >= 0``; strictly positive once ``l + m >= 1``.
    """
    if m < 0:
        raise ValueError("beta: order m must be >= 0")
    la = _as_degrees(l, 0, "beta")
    out = np.sqrt((la + m) * (la + m + 1) / ((2 * la + 1) * (2 * la + 3)))
    return _maybe_scalar(out, l)


def gamma(l, m):
    """Lower-degree coefficient of the colatitude derivative of a harmonic.

    Defined for ``l >= m >= 0`` with ``l >= 1``; always nonpositive.
    """
    if m < 0:
        raise ValueError("gamma: order m must be >= 0")
    la = _as_degrees(l, max(1, m), "gamma")
    out = -(la + 1) * np.sqrt((la - m) * (la + m) / ((2 * la - 1) * (2 * la + 1)))
    return _maybe_scalar(out, l)


def delta(l, m):
    """Higher-degree coefficient of the colatitude derivative of a harmonic.

    Defined for ``l >= m >= 0``; zero only at ``l == 0``.
    """
    if m < 0:
        raise ValueError("delta: order m must be >= 0")
    la = _as_degrees(l, m, "delta")
    out = la * np.sqrt((la - m + 1) * (la + m + 1) / ((2 * la + 1) * (2 * la + 3)))
    return _maybe_scalar(out, l)


def chol_d(l, m):
    """Diagonal entry of the closed-form Cholesky factor of the normal matrix."""
    if m < 1:
        raise ValueError("chol_d: order m must be >= 1")
    la = _as_degrees(l, 1, "chol_d")
    out = (la + m - 1) * np.sqrt(
        (la + m + 1) * (la + 2 * m) * (la + 2 * m + 1)
        / ((la + m) * (2 * la + 2 * m - 1) * (2 * la + 2 * m + 1))
    )
    return _maybe_scalar(out, l)


def chol_e(l, m):
    """First superdiagonal magnitude of the closed-form Cholesky factor."""
    if m < 1:
        raise ValueError("chol_e: order m must be >= 1")
    la = _as_degrees(l, 1, "chol_e")
    out = np.sqrt(la * (la + 2 * m + 1) / ((la + m) * (la + m + 1)))
    return _maybe_scalar(out, l)


def chol_f(l, m):
    """Second superdiagonal magnitude of the closed-form Cholesky factor."""
    if m < 1:
        raise ValueError("chol_f: order m must be >= 1")
    la = _as_degrees(l, 1, "chol_f")
    out = (la + m + 2) * np.sqrt(
        la * (la + 1) * (la + m)
        / ((la + m + 1) * (2 * la + 2 * m + 1) * (2 * la + 2 * m + 3))
    )
    return _maybe_scalar(out, l)
