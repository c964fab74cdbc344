"""Finite bivariate trigonometric polynomials.

A :class:`TrigPoly2` is a finite sum ``sum c[j, k] * exp(i*(j*xi1 + k*xi2))``.
Filters written in the usual wavelet convention
``m(xi) = (1/t) sum_k c_f(k) exp(-i <xi, k>)`` are stored with the key
``-k``, so evaluating the stored object reproduces ``m`` exactly.

Coefficients are held densely on their minimal bounding box, which keeps
products (2-D convolutions) cheap enough for large randomized checks.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Tuple

import numpy as np
from scipy.signal import convolve2d

PRUNE_TOL = 1e-15
EQUAL_TOL = 1e-12

Key = Tuple[int, int]


class TrigPoly2:
    """Immutable bivariate Laurent trigonometric polynomial.

    Parameters
    ----------
    coeffs : mapping of (j, k) -> complex, optional
        Nonzero coefficients. Absent keys are zero; entries with magnitude
        below ``PRUNE_TOL`` are dropped.
    """

    __slots__ = ("_arr", "_lo")

    def __init__(self, coeffs: Mapping[Key, complex] | None = None):
        arr = np.zeros((0, 0), dtype=complex)
        lo = (0, 0)
        if coeffs:
            keys = np.array([(int(j), int(k)) for j, k in coeffs], dtype=np.int64)
            lo = (int(keys[:, 0].min()), int(keys[:, 1].min()))
            hi = (int(keys[:, 0].max()), int(keys[:, 1].max()))
            arr = np.zeros((hi[0] - lo[0] + 1, hi[1] - lo[1] + 1), dtype=complex)
            for (j, k), c in coeffs.items():
                arr[int(j) - lo[0], int(k) - lo[1]] += complex(c)
        self._arr, self._lo = _trim(arr, lo)

    @classmethod
    def from_array(cls, arr, lo: Key = (0, 0)) -> "TrigPoly2":
        """Build from a dense coefficient block whose [0, 0] entry has key ``lo``."""
        p = cls.__new__(cls)
        p._arr, p._lo = _trim(np.array(arr, dtype=complex, copy=True), (int(lo[0]), int(lo[1])))
        return p

    @classmethod
    def constant(cls, c: complex) -> "TrigPoly2":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, j: int, k: int, c: complex = 1.0) -> "TrigPoly2":
        return cls({(j, k): c})

    @classmethod
    def filter(cls, coeffs: Mapping[Key, complex], t: int = 1) -> "TrigPoly2":
        """Filter ``(1/t) sum_k c(k) exp(-i <xi, k>)`` from its coefficients ``c``."""
        return cls({(-j, -k): c / t for (j, k), c in coeffs.items()})

    @classmethod
    def univariate(cls, values: Iterable[complex], axis: int = 1, start: int = 0) -> "TrigPoly2":
        """Polynomial in one variable: ``sum_n values[n] exp(-i (start + n) xi_axis)``."""
        vals = np.asarray(list(values), dtype=complex)
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        # negated frequencies: key -(start + n)
        keys = [-(start + n) for n in range(len(vals))]
        if axis == 1:
            return cls({(key, 0): v for key, v in zip(keys, vals)})
        return cls({(0, key): v for key, v in zip(keys, vals)})

    # -- structure -----------------------------------------------------

    @property
    def coeffs(self) -> dict:
        """Nonzero coefficients as a plain ``{(j, k): complex}`` dict."""
        out = {}
        for (a, b), c in np.ndenumerate(self._arr):
            if c != 0:
                out[(a + self._lo[0], b + self._lo[1])] = complex(c)
        return out

    @property
    def array(self) -> np.ndarray:
        return self._arr.copy()

    @property
    def lo(self) -> Key:
        return self._lo

    @property
    def hi(self) -> Key:
        return (self._lo[0] + self._arr.shape[0] - 1, self._lo[1] + self._arr.shape[1] - 1)

    def is_zero(self) -> bool:
        return self._arr.size == 0

    def __len__(self) -> int:
        return int(np.count_nonzero(self._arr))

    def __getitem__(self, key: Key) -> complex:
        a, b = key[0] - self._lo[0], key[1] - self._lo[1]
        if 0 <= a < self._arr.shape[0] and 0 <= b < self._arr.shape[1]:
            return complex(self._arr[a, b])
        return 0j

    def mass(self) -> float:
        """Sum of coefficient magnitudes (an upper bound for ``sup |p|``)."""
        return float(np.abs(self._arr).sum())

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.sqrt((np.abs(self._arr) ** 2).sum()))

    # -- evaluation ----------------------------------------------------

    def __call__(self, xi1, xi2):
        """Evaluate at points; ``xi1`` and ``xi2`` broadcast together."""
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        shape = np.broadcast_shapes(xi1.shape, xi2.shape)
        if self.is_zero():
            return np.zeros(shape, dtype=complex)
        j = np.arange(self._lo[0], self._lo[0] + self._arr.shape[0])
        k = np.arange(self._lo[1], self._lo[1] + self._arr.shape[1])
        x1 = np.broadcast_to(xi1, shape).reshape(-1)
        x2 = np.broadcast_to(xi2, shape).reshape(-1)
        e1 = np.exp(1j * np.multiply.outer(x1, j))
        e2 = np.exp(1j * np.multiply.outer(x2, k))
        vals = np.einsum("pj,jk,pk->p", e1, self._arr, e2)
        return vals.reshape(shape)

    def eval(self, xi) -> complex:
        """Evaluate at a single point ``xi = (xi1, xi2)``."""
        return complex(self(xi[0], xi[1]))

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = (min(self._lo[0], other._lo[0]), min(self._lo[1], other._lo[1]))
        hi = (max(self.hi[0], other.hi[0]), max(self.hi[1], other.hi[1]))
        arr = np.zeros((hi[0] - lo[0] + 1, hi[1] - lo[1] + 1), dtype=complex)
        for p in (self, other):
            a, b = p._lo[0] - lo[0], p._lo[1] - lo[1]
            arr[a : a + p._arr.shape[0], b : b + p._arr.shape[1]] += p._arr
        return TrigPoly2.from_array(arr, lo)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly2.from_array(-self._arr, self._lo)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return TrigPoly2.from_array(self._arr * other, self._lo)
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return TrigPoly2()
        arr = convolve2d(self._arr, other._arr)
        return TrigPoly2.from_array(arr, (self._lo[0] + other._lo[0], self._lo[1] + other._lo[1]))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return TrigPoly2.from_array(self._arr / c, self._lo)

    def conjugate(self) -> "TrigPoly2":
        """Pointwise complex conjugate: conjugate values and negate keys."""
        arr = np.conj(self._arr[::-1, ::-1])
        return TrigPoly2.from_array(arr, (-self.hi[0], -self.hi[1]))

    def substitute_scale(self, s1: int, s2: int) -> "TrigPoly2":
        """Return ``q`` with ``q(xi) = p(s1*xi1, s2*xi2)``."""
        return substitute_scale(self, s1, s2)

    def translate(self, shift) -> "TrigPoly2":
        """Return ``q`` with ``q(xi) = p(xi + shift)``."""
        return translate(self, shift)

    def allclose(self, other, tol: float = EQUAL_TOL) -> bool:
        return (self - _coerce(other)).max_abs() <= tol

    def max_abs(self) -> float:
        return float(np.abs(self._arr).max()) if self._arr.size else 0.0

    def __eq__(self, other):
        if not isinstance(other, (TrigPoly2, int, float, complex)):
            return NotImplemented
        return self.allclose(other)

    __hash__ = None

    def __repr__(self):
        terms = ", ".join(f"{k}: {v:.6g}" for k, v in sorted(self.coeffs.items()))
        return f"TrigPoly2({{{terms}}})"

    # -- text form -----------------------------------------------------

    def to_text(self) -> str:
        """One ``"j k re im"`` line per term, sorted by ``(j, k)``."""
        lines = [
            f"{j} {k} {c.real:.17g} {c.imag:.17g}" for (j, k), c in sorted(self.coeffs.items())
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "TrigPoly2":
        coeffs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: expected 'j k re im', got {line!r}")
            j, k = int(parts[0]), int(parts[1])
            coeffs[(j, k)] = coeffs.get((j, k), 0) + complex(float(parts[2]), float(parts[3]))
        return cls(coeffs)


def _coerce(x) -> TrigPoly2:
    if isinstance(x, TrigPoly2):
        return x
    if np.isscalar(x):
        return TrigPoly2.constant(x)
    raise TypeError(f"cannot combine TrigPoly2 with {type(x).__name__}")


def _trim(arr: np.ndarray, lo: Key):
    if arr.size:
        arr = np.where(np.abs(arr) < PRUNE_TOL, 0, arr)
    nz = np.argwhere(arr != 0) if arr.size else np.empty((0, 2), dtype=int)
    if len(nz) == 0:
        return np.zeros((0, 0), dtype=complex), (0, 0)
    a0, b0 = nz.min(axis=0)
    a1, b1 = nz.max(axis=0)
    return arr[a0 : a1 + 1, b0 : b1 + 1].copy(), (lo[0] + int(a0), lo[1] + int(b0))


def evaluate(p: TrigPoly2, xi) -> complex:
    return p.eval(xi)


def substitute_scale(p: TrigPoly2, s1: int, s2: int) -> TrigPoly2:
    if int(s1) < 1 or int(s2) < 1:
        raise ValueError("scale factors must be positive integers")
    s1, s2 = int(s1), int(s2)
    if p.is_zero():
        return p
    m, n = p._arr.shape
    arr = np.zeros(((m - 1) * s1 + 1, (n - 1) * s2 + 1), dtype=complex)
    arr[::s1, ::s2] = p._arr
    return TrigPoly2.from_array(arr, (p._lo[0] * s1, p._lo[1] * s2))


def translate(p: TrigPoly2, shift) -> TrigPoly2:
    if p.is_zero():
        return p
    j = np.arange(p._lo[0], p._lo[0] + p._arr.shape[0])
    k = np.arange(p._lo[1], p._lo[1] + p._arr.shape[1])
    phase = np.exp(1j * np.add.outer(j * float(shift[0]), k * float(shift[1])))
    return TrigPoly2.from_array(p._arr * phase, p._lo)


def multiply(p: TrigPoly2, q: TrigPoly2) -> TrigPoly2:
    return p * q


def conjugate(p: TrigPoly2) -> TrigPoly2:
    return p.conjugate()
