"""Coefficient containers for spherical-harmonic and tangential-basis expansions.

Two triangular tables are used throughout:

* ``ScalarSpectrum`` -- expansion coefficients of a scalar field in the
  orthonormal spherical harmonics, degrees ``0..n_pot``, orders ``|m| <= l``.
* ``ZSpectrum`` -- expansion coefficients of one angular component of a
  tangential field in the complementary orthonormal basis, degrees
  ``||m|-1| <= l <= n`` with orders up to ``|m| = n + 1``.

Storage is order-major and degree-contiguous: for each signed order the run
of degrees is one contiguous block, so every per-order operation touches
contiguous memory.  Spectra are treated as immutable values once filled;
nothing in the library mutates a spectrum it did not create.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ScalarSpectrum",
    "ZSpectrum",
    "TangentField",
    "HHDResult",
    "new_scalar_spectrum",
    "new_z_spectrum",
    "random_spectrum",
    "relative_l2_error",
    "read_spectrum",
    "write_spectrum",
]


def signed_orders(max_order):
    """Canonical order sequence 0, +1, -1, +2, -2, ..."""
    yield 0
    for mu in range(1, max_order + 1):
        yield mu
        yield -mu


class _CoeffTable:
    """Shared machinery for the two triangular coefficient tables."""

    basis = None  # "Y" or "Z"

    def __init__(self, n, data=None):
        if n < 0:
            raise ValueError("truncation degree must be nonnegative")
        self.n = int(n)
        offsets = {}
        pos = 0
        for m in signed_orders(self.max_order()):
            lo = self.degree_start(m)
            if lo > self.n:
                continue
            offsets[m] = (pos, self.n - lo + 1)
            pos += self.n - lo + 1
        self._offsets = offsets
        self._size = pos
        if data is None:
            self._data = np.zeros(pos)
        else:
            data = np.asarray(data, dtype=np.float64)
            if data.shape != (pos,):
                raise ValueError(f"expected flat data of length {pos}, got {data.shape}")
            self._data = data

    # subclasses fix the index set
    def degree_start(self, m):
        raise NotImplementedError

    def max_order(self):
        raise NotImplementedError

    @property
    def size(self):
        return self._size

    def orders(self):
        return list(self._offsets)

    def order_slice(self, m):
        """Contiguous view of the coefficients of signed order ``m`` (ascending degree)."""
        if m not in self._offsets:
            raise ValueError(f"order {m} outside basis {self.basis} with n={self.n}")
        pos, count = self._offsets[m]
        return self._data[pos : pos + count]

    def set_order_slice(self, m, values):
        sl = self.order_slice(m)
        if len(values) != len(sl):
            raise ValueError(f"order {m}: expected {len(sl)} values, got {len(values)}")
        sl[:] = values

    def _check_index(self, l, m):
        if m not in self._offsets or not (self.degree_start(m) <= l <= self.n):
            raise ValueError(
                f"(l={l}, m={m}) outside the basis-{self.basis} index set for n={self.n}"
            )

    def __getitem__(self, lm):
        l, m = lm
        self._check_index(l, m)
        pos, _ = self._offsets[m]
        return float(self._data[pos + l - self.degree_start(m)])

    def __setitem__(self, lm, value):
        l, m = lm
        self._check_index(l, m)
        pos, _ = self._offsets[m]
        self._data[pos + l - self.degree_start(m)] = value

    def flat(self):
        """Flattened coefficient vector in canonical (order-major) order."""
        return self._data

    def norm(self):
        return float(np.linalg.norm(self._data))

    def copy(self):
        return type(self)(self.n, self._data.copy())

    def allclose(self, other, **kw):
        return self.n == other.n and np.allclose(self._data, other._data, **kw)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, {self._size} coefficients)"


class ScalarSpectrum(_CoeffTable):
    """Spherical-harmonic coefficients of a scalar field, degrees ``0..n_pot``."""

    basis = "Y"

    def degree_start(self, m):
        return abs(m)

    def max_order(self):
        return self.n

    @property
    def n_pot(self):
        return self.n


class ZSpectrum(_CoeffTable):
    """Tangential-basis coefficients of one angular field component.

    The index set is ``{(l, m): ||m|-1| <= l <= n, |m| <= n+1}``; the two
    extreme orders ``|m| in {n, n+1}`` are stored but can never be produced by
    differentiating a potential of degree ``<= n-1``.
    """

    basis = "Z"

    def degree_start(self, m):
        return abs(abs(m) - 1)

    def max_order(self):
        return self.n + 1


def new_scalar_spectrum(n_pot):
    """Zero-filled scalar spectrum with ``(n_pot + 1)**2`` coefficients."""
    return ScalarSpectrum(n_pot)


def new_z_spectrum(n):
    """Zero-filled tangential-component spectrum for truncation degree ``n``."""
    return ZSpectrum(n)


def random_spectrum(n_pot, seed):
    """Scalar spectrum with i.i.d. standard-normal coefficients.

    Uses the PCG64 generator, so results are reproducible across platforms
    for a fixed seed.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    spec = ScalarSpectrum(n_pot)
    spec._data[:] = rng.standard_normal(spec.size)
    return spec


def relative_l2_error(a, b):
    """Relative l2 error ``||a - b|| / ||b||`` over the coefficient vectors.

    Falls back to the absolute norm ``||a||`` when ``b`` is identically zero.
    """
    if type(a) is not type(b) or a.n != b.n:
        raise ValueError("relative_l2_error: spectra must share basis and degree")
    denom = np.linalg.norm(b.flat())
    diff = float(np.linalg.norm(a.flat() - b.flat()))
    if denom == 0.0:
        return diff
    return diff / float(denom)


@dataclass
class TangentField:
    """Pair of tangential-basis spectra for the e_theta and e_phi components."""

    theta: ZSpectrum
    phi: ZSpectrum

    def __post_init__(self):
        if self.theta.n != self.phi.n:
            raise ValueError("theta and phi components must share one truncation degree")

    @property
    def n(self):
        return self.theta.n

    def norm(self):
        return float(np.hypot(self.theta.norm(), self.phi.norm()))

    @classmethod
    def zeros(cls, n):
        return cls(ZSpectrum(n), ZSpectrum(n))


@dataclass
class HHDResult:
    """Output of the decomposition: potentials plus per-order diagnostics.

    ``residual_by_order`` holds the 2-norm of the least-squares residual of
    each per-order solve; ``out_of_range_by_order`` holds the norm of input
    content the truncated model cannot represent (the degree ``n+1`` tails
    and the whole orders ``|m| >= n``).  Both are reported, never folded
    together.
    """

    spheroidal: ScalarSpectrum
    toroidal: ScalarSpectrum
    residual_by_order: dict = field(default_factory=dict)
    out_of_range_by_order: dict = field(default_factory=dict)

    def total_residual(self):
        return float(np.sqrt(sum(v * v for v in self.residual_by_order.values())))

    def total_out_of_range(self):
        return float(np.sqrt(sum(v * v for v in self.out_of_range_by_order.values())))


_CLASS_BY_BASIS = {"Y": ScalarSpectrum, "Z": ZSpectrum}


def write_spectrum(spectrum, path):
    """Write a spectrum in the text coefficient format.

    Line 1 is ``# basis=<Y|Z> n=<int>``; each following line is ``l,m,value``
    with the value in 17-significant-digit scientific notation, rows in
    order-major order.  Missing rows denote zero, but the writer emits the
    full table.
    """
    lines = [f"# basis={spectrum.basis} n={spectrum.n}\n"]
    for m in spectrum.orders():
        lo = spectrum.degree_start(m)
        sl = spectrum.order_slice(m)
        for i, v in enumerate(sl):
            lines.append(f"{lo + i},{m},{v:.16e}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)


def read_spectrum(path):
    """Read a spectrum written by :func:`write_spectrum`.

    Returns a :class:`ScalarSpectrum` or :class:`ZSpectrum` depending on the
    header.  Raises ``ValueError`` on a malformed header, an index outside
    the basis triangle, or a non-finite value.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if (
            len(parts) != 3
            or parts[0] != "#"
            or not parts[1].startswith("basis=")
            or not parts[2].startswith("n=")
        ):
            raise ValueError(f"{path}: malformed header {header!r}")
        basis = parts[1][len("basis=") :]
        if basis not in _CLASS_BY_BASIS:
            raise ValueError(f"{path}: unknown basis {basis!r}")
        try:
            n = int(parts[2][len("n=") :])
        except ValueError:
            raise ValueError(f"{path}: malformed degree in header {header!r}") from None
        spec = _CLASS_BY_BASIS[basis](n)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'l,m,value'")
            try:
                l, m, value = int(fields[0]), int(fields[1]), float(fields[2])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
            if not np.isfinite(value):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            spec[l, m] = value  # raises ValueError outside the index set
    return spec
