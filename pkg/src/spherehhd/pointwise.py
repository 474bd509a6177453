"""Slow pointwise evaluation and quadrature analysis, used as the ground truth.

Everything here is deliberately simple and O(n^3): direct Legendre
recurrences, explicit synthesis sums, and Gauss x trapezoid quadrature for
analysis.  The fast spectral pipeline is tested against this module, so the
implementations are kept independent of the per-order coupling
coefficients wherever an alternative route exists (the colatitude
derivative, for instance, uses the order-shift relation rather than the
degree-shift relation used by the operators).

Conventions: colatitude ``theta in [0, pi]``, longitude ``phi in [0, 2 pi)``,
azimuthal factor ``sqrt((2 - delta_{m,0}) / (2 pi)) * cos(m phi)`` for
``m >= 0`` and ``... * sin(-m phi)`` for ``m < 0``.  The normalized Legendre
functions carry the ``(-1)^{|m|}`` prefactor that cancels the
Condon-Shortley phase, so they are positive at ``l == m``, ``x -> 1^-``.
"""

from dataclasses import dataclass, field

import numpy as np

from .spectra import TangentField

__all__ = [
    "GridSpec",
    "legendre_norm",
    "legendre_table",
    "eval_Y",
    "eval_Z",
    "eval_gradY",
    "synthesize",
    "synthesize_from_potentials",
    "analyze_z",
]


def legendre_table(m, lmax, x):
    """Normalized associated Legendre functions of order ``m``, degrees ``m..lmax``.

    Parameters
    ----------
    m: nonnegative order
    lmax: highest degree (``>= m``)
    x: scalar or 1-D array of abscissae in ``[-1, 1]``

    Returns
    -------
    table: array of shape ``(lmax - m + 1,) + shape(x)``; row ``k`` holds
        degree ``m + k``.

    The recurrence is seeded at ``l == m`` with the closed product form and
    run upward in degree, which is stable for the L2-normalized functions.
    """
    if m < 0:
        raise ValueError("legendre_table: order m must be >= 0")
    if lmax < m:
        raise ValueError("legendre_table: need lmax >= m")
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("legendre_table: abscissae must lie in [-1, 1]")
    out = np.zeros((lmax - m + 1,) + x.shape)
    # seed: accumulate sin(theta) factors inside the product to avoid under/overflow
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    seed = np.full_like(x, np.sqrt(0.5))
    for k in range(1, m + 1):
        seed = seed * (np.sqrt((2 * k + 1) / (2.0 * k)) * s)
    out[0] = seed
    if lmax == m:
        return out

    def b(l):
        # off-diagonal entry of the Jacobi matrix: x P_l = b(l) P_{l+1} + b(l-1) P_{l-1}
        return np.sqrt(((l + 1.0) ** 2 - m * m) / ((2 * l + 1.0) * (2 * l + 3.0)))

    out[1] = x * out[0] / b(m)
    for l in range(m + 1, lmax):
        out[l - m + 1] = (x * out[l - m] - b(l - 1) * out[l - m - 1]) / b(l)
    return out


def legendre_norm(l, m, x):
    """Single normalized associated Legendre function ``P~_l^m(x)``."""
    if not 0 <= m <= l:
        raise ValueError("legendre_norm: need 0 <= m <= l")
    return legendre_table(m, l, x)[-1]


def _azimuthal(m, phi):
    phi = np.asarray(phi, dtype=np.float64)
    fac = np.sqrt((2.0 - (m == 0)) / (2.0 * np.pi))
    return fac * (np.cos(m * phi) if m >= 0 else np.sin(-m * phi))


def _azimuthal_deriv(m, phi):
    phi = np.asarray(phi, dtype=np.float64)
    fac = np.sqrt((2.0 - (m == 0)) / (2.0 * np.pi))
    return fac * (-m * np.sin(m * phi) if m >= 0 else -m * np.cos(-m * phi))


def eval_Y(l, m, theta, phi):
    """Real spherical harmonic of degree ``l`` and signed order ``m``."""
    if abs(m) > l:
        raise ValueError("eval_Y: need |m| <= l")
    return legendre_norm(l, abs(m), np.cos(theta)) * _azimuthal(m, phi)


def eval_Z(l, m, theta, phi):
    """Tangential-component basis function of degree ``l`` and signed order ``m``."""
    if l < abs(abs(m) - 1):
        raise ValueError("eval_Z: need l >= ||m| - 1|")
    return legendre_norm(l, abs(abs(m) - 1), np.cos(theta)) * _azimuthal(m, phi)


def _dtheta_legendre(l, m, x):
    """d/dtheta of the normalized Legendre function, via the order-shift relation."""
    if m == 0:
        if l == 0:
            return np.zeros(np.shape(x))
        return -np.sqrt(l * (l + 1.0)) * legendre_norm(l, 1, x)
    lo = 0.5 * np.sqrt((l + m) * (l - m + 1.0)) * legendre_norm(l, m - 1, x)
    hi = 0.0
    if l >= m + 1:
        hi = 0.5 * np.sqrt((l - m) * (l + m + 1.0)) * legendre_norm(l, m + 1, x)
    return lo - hi


def eval_gradY(l, m, theta, phi):
    """Surface-gradient components of a real spherical harmonic.

    Returns ``(theta_comp, phi_comp)`` where the gradient is
    ``theta_comp e_theta + phi_comp e_phi``; the phi component carries the
    ``csc(theta)`` factor.  ``theta`` must stay away from the poles.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(np.sin(theta) == 0.0):
        raise ValueError("eval_gradY: theta at a pole")
    if l == 0:
        z = np.zeros(np.broadcast(theta, np.asarray(phi)).shape)
        return z, z.copy()
    th_comp = _dtheta_legendre(l, abs(m), np.cos(theta)) * _azimuthal(m, phi)
    ph_comp = (
        legendre_norm(l, abs(m), np.cos(theta)) * _azimuthal_deriv(m, phi) / np.sin(theta)
    )
    return th_comp, ph_comp


@dataclass
class GridSpec:
    """Gauss-Legendre x uniform product grid on the sphere.

    ``theta`` nodes are ``arccos`` of the ``n_theta``-point Gauss-Legendre
    abscissae, so integrals against ``sin(theta) d theta`` become exact for
    polynomial integrands of degree ``<= 2 n_theta - 1``; ``phi`` nodes are
    uniform, and the rectangle rule is exact for trigonometric polynomials
    of order ``< n_phi``.
    """

    n_theta: int
    n_phi: int
    x: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 1:
            raise ValueError("GridSpec: grid sizes must be positive")
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        self.x = x
        self.weights = w
        self.theta = np.arccos(x)
        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi

    @classmethod
    def for_degree(cls, n):
        """Smallest comfortable grid resolving a degree-``n`` expansion.

        ``n_phi = 2 n + 4`` leaves headroom over the formal minimum
        ``2 n + 2``, which would alias the order ``n + 1`` cosine products.
        """
        return cls(n + 1, 2 * n + 4)

    def check_resolves(self, n):
        if self.n_theta < n + 1 or self.n_phi < 2 * n + 2:
            raise ValueError(
                f"grid ({self.n_theta}, {self.n_phi}) under-resolves degree n={n}"
            )


def _order_tables(n, grid, legendre_order):
    """Legendre tables per distinct order, cached for one grid."""
    cache = {}

    def get(mu):
        key = legendre_order(mu)
        if key not in cache:
            cache[key] = legendre_table(key, n, grid.x)
        return cache[key]

    return get


def synthesize(obj, grid):
    """Pointwise samples ``(V_theta, V_phi)`` of a tangential field on ``grid``.

    ``obj`` may be a :class:`TangentField` (summed directly in the
    tangential basis) or a ``(spheroidal, toroidal)`` pair of scalar
    spectra, which is routed through :func:`synthesize_from_potentials`.
    Arrays have shape ``(n_theta, n_phi)``.
    """
    if isinstance(obj, tuple):
        s, t = obj
        return synthesize_from_potentials(s, t, grid)
    field_ = obj
    n = field_.n
    grid.check_resolves(n)
    vth = np.zeros((grid.n_theta, grid.n_phi))
    vph = np.zeros((grid.n_theta, grid.n_phi))
    tables = _order_tables(n, grid, lambda mu: abs(mu - 1))
    for m in field_.theta.orders():
        mu = abs(m)
        tab = tables(mu)  # degrees ||m|-1| .. n
        az = _azimuthal(m, grid.phi)
        for comp, out in ((field_.theta, vth), (field_.phi, vph)):
            coeffs = comp.order_slice(m)
            if not np.any(coeffs):
                continue
            radial = coeffs @ tab  # (n_theta,)
            out += radial[:, None] * az[None, :]
    return vth, vph


def synthesize_from_potentials(s, t, grid):
    """Pointwise samples of ``grad(s) + e_r x grad(t)`` on ``grid``.

    This is the second synthesis route: it never touches the tangential
    basis, so agreement with ``synthesize(differentiate(s, t))`` exercises
    the whole spectral pipeline.
    """
    if s.n_pot != t.n_pot:
        raise ValueError("potentials must share a degree")
    grid.check_resolves(s.n_pot + 1)
    vth = np.zeros((grid.n_theta, grid.n_phi))
    vph = np.zeros((grid.n_theta, grid.n_phi))
    sin_th = np.sin(grid.theta)
    for m in s.orders():
        mu = abs(m)
        az = _azimuthal(m, grid.phi)
        daz = _azimuthal_deriv(m, grid.phi)
        for l in range(max(mu, 1), s.n_pot + 1):
            cs = s[l, m]
            ct = t[l, m]
            if cs == 0.0 and ct == 0.0:
                continue
            dth = _dtheta_legendre(l, mu, grid.x)
            pl = legendre_norm(l, mu, grid.x)
            grad_th = dth[:, None] * az[None, :]
            grad_ph = (pl / sin_th)[:, None] * daz[None, :]
            # e_r x grad has components (-grad_ph, grad_th)
            vth += cs * grad_th - ct * grad_ph
            vph += cs * grad_ph + ct * grad_th
    return vth, vph


def analyze_z(vtheta, vphi, grid, n):
    """Project pointwise samples onto the tangential basis by quadrature.

    Inverse of :func:`synthesize` for band-limited fields: coefficients are
    the surface inner products evaluated with Gauss x rectangle quadrature,
    exact for expansions of degree ``<= n`` on a grid that resolves them.
    """
    grid.check_resolves(n)
    vtheta = np.asarray(vtheta, dtype=np.float64)
    vphi = np.asarray(vphi, dtype=np.float64)
    if vtheta.shape != (grid.n_theta, grid.n_phi) or vphi.shape != vtheta.shape:
        raise ValueError("analyze_z: sample arrays do not match the grid")
    out = TangentField.zeros(n)
    scale = 2.0 * np.pi / grid.n_phi
    wx = grid.weights
    tables = _order_tables(n, grid, lambda mu: abs(mu - 1))
    for m in out.theta.orders():
        mu = abs(m)
        tab = tables(mu)  # degrees ||m|-1| .. n on grid.x
        az = _azimuthal(m, grid.phi)
        for samples, comp in ((vtheta, out.theta), (vphi, out.phi)):
            ring = samples @ az * scale  # (n_theta,)
            comp.set_order_slice(m, tab @ (wx * ring))
    return out
