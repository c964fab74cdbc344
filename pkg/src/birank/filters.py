"""Filter matrices, unitarity tests and unitary completion.

Conventions
-----------
A filter for dilation ``T`` (``t = det T``) is a :class:`TrigPoly2` holding
``m_f(xi) = (1/t) sum_k c_f(k) exp(-i <xi, k>)``.  Filters for the Meyer
construction are not polynomials; everything below that only evaluates
filters accepts any callable ``m(xi1, xi2)`` that broadcasts over arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .lattice import DigitSet, DilationPair, FreqGrid, digits_for
from .trigpoly import TrigPoly2, translate

GS_SKIP_TOL = 1e-8
ISOMETRY_TOL = 1e-10

Filter = Callable[[np.ndarray, np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# filter matrices


@dataclass(frozen=True)
class FilterMatrix:
    """Matrix-valued function of ``xi`` with exact polynomial entries.

    ``form`` is ``"translation"`` (entry ``(l, i)`` is ``m_l(xi + 2 pi T^-1 d_i)``)
    or ``"coset"`` (entry ``(l, p)`` is the normalized coset sum ``mu_{l,p}``).
    """

    form: str
    entries: Tuple[Tuple[TrigPoly2, ...], ...]
    digits: DigitSet

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), self.digits.t

    def __call__(self, xi1, xi2) -> np.ndarray:
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        base = np.broadcast_shapes(xi1.shape, xi2.shape)
        out = np.empty(base + self.shape, dtype=complex)
        for l, row in enumerate(self.entries):
            for i, p in enumerate(row):
                out[..., l, i] = p(xi1, xi2)
        return out

    def sample(self, grid: FreqGrid) -> np.ndarray:
        """Values at every grid node, shape ``(n, n, rows, t)``."""
        x1, x2 = grid.mesh()
        return self(x1, x2)


def _check_rows(filters: Sequence[TrigPoly2], digits: DigitSet):
    if len(filters) == 0:
        raise ValueError("need at least one filter")
    if len(filters) > digits.t:
        raise ValueError(f"more filters than cosets ({len(filters)} > {digits.t})")


def translation_matrix(filters: Sequence[TrigPoly2], pair: DilationPair, exponents=(1, 1)) -> FilterMatrix:
    """Translation-form filter matrix ``[m_l(xi + 2 pi T^-1 d_i)]``."""
    digits = digits_for(pair, *exponents)
    _check_rows(filters, digits)
    shifts = digits.translation_shifts()
    rows = tuple(tuple(translate(f, s) for s in shifts) for f in filters)
    return FilterMatrix("translation", rows, digits)


def coset_matrix(filters: Sequence[TrigPoly2], pair: DilationPair, exponents=(1, 1)) -> FilterMatrix:
    """Coset filter matrix with entries
    ``mu_{l,p}(xi) = t^{-1/2} sum_k c_l(d_p + T k) exp(-i <xi, T k>)``.
    """
    digits = digits_for(pair, *exponents)
    _check_rows(filters, digits)
    t = digits.t
    p1, p2 = digits.moduli
    rows = []
    for f in filters:
        buckets = [dict() for _ in range(t)]
        for (j, k), c in f.coeffs.items():
            # stored key is -kappa and the stored value is c_f(kappa) / t
            kappa = (-j, -k)
            p = digits.index(kappa)
            d = digits[p]
            tk = (kappa[0] - d[0], kappa[1] - d[1])
            buckets[p][(-tk[0], -tk[1])] = c * t / np.sqrt(t)
        rows.append(tuple(TrigPoly2(b) for b in buckets))
    return FilterMatrix("coset", tuple(rows), digits)


def phase_matrix(digits: DigitSet, xi1, xi2) -> np.ndarray:
    """The unitary ``D(xi)`` with ``U = U' D``.

    ``D[p, i] = t^{-1/2} exp(-i <xi, d_p>) exp(-i <2 pi T^-1 d_i, d_p>)``.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    d = digits.as_array().astype(float)
    shifts = digits.translation_shifts()
    t = digits.t
    base = np.exp(-1j * (np.multiply.outer(xi1, d[:, 0]) + np.multiply.outer(xi2, d[:, 1])))
    const = np.exp(-1j * (d @ shifts.T))  # [p, i] = <d_p, shift_i>
    return base[..., :, None] * const / np.sqrt(t)


# ---------------------------------------------------------------------------
# unitarity


@dataclass(frozen=True)
class UnitarityReport:
    row_deviation: float
    col_deviation: float | None
    verdict: str

    def as_dict(self):
        return {"row_deviation": self.row_deviation, "col_deviation": self.col_deviation, "verdict": self.verdict}


def check_unitarity(M, grid: FreqGrid | None = None, tol: float = ISOMETRY_TOL) -> UnitarityReport:
    """Max entrywise deviations of ``M M^*`` and (when square) ``M^* M`` from ``I``.

    ``M`` is a :class:`FilterMatrix` (sampled on ``grid``), a single matrix,
    or a stack of matrices in the trailing two axes.
    """
    if isinstance(M, FilterMatrix):
        M = M.sample(grid if grid is not None else FreqGrid(64, np.pi))
    M = np.asarray(M)
    if M.ndim < 2:
        raise ValueError("expected a matrix or a stack of matrices")
    r, c = M.shape[-2:]
    MH = np.conj(np.swapaxes(M, -1, -2))
    row_dev = float(np.abs(M @ MH - np.eye(r)).max()) if M.size else 0.0
    col_dev = None
    if r == c:
        col_dev = float(np.abs(MH @ M - np.eye(c)).max())
    if col_dev is not None and row_dev <= tol and col_dev <= tol:
        verdict = "unitary"
    elif row_dev <= tol:
        verdict = "partial-isometry"
    else:
        verdict = "neither"
    return UnitarityReport(row_dev, col_dev, verdict)


# ---------------------------------------------------------------------------
# completion


def complete_constant(rows, skip_tol: float = GS_SKIP_TOL) -> np.ndarray:
    """Extend orthonormal rows to a square unitary by Gram-Schmidt.

    Candidates are the standard basis vectors in index order; a candidate
    whose residual norm falls below ``skip_tol`` is skipped.
    """
    rows = np.atleast_2d(np.asarray(rows))
    k, t = rows.shape
    dtype = complex if np.iscomplexobj(rows) else float
    gram = rows @ np.conj(rows.T)
    if np.abs(gram - np.eye(k)).max() > 1e-10:
        raise ValueError("input rows are not orthonormal")
    basis = [r.astype(dtype) for r in rows]
    for e in np.eye(t, dtype=dtype):
        if len(basis) == t:
            break
        v = e.copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for b in basis:
                v = v - np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv < skip_tol:
            continue
        basis.append(v / nv)
    return np.array(basis)


def complete_pointwise(M, tol: float = 1e-8) -> np.ndarray:
    """Append the fourth row to a stack of ``3 x 4`` partial isometries.

    The new row is the conjugate of the generalized cross product of the
    three rows, rotated so that its largest entry is real and positive
    (ties go to the lowest column index).
    """
    M = np.asarray(M, dtype=complex)
    if M.shape[-2:] != (3, 4):
        raise ValueError(f"expected trailing shape (3, 4), got {M.shape[-2:]}")
    dev = np.abs(M @ np.conj(np.swapaxes(M, -1, -2)) - np.eye(3)).max(axis=(-2, -1))
    bad = np.argwhere(dev > tol)
    if len(bad):
        shown = ", ".join(str(tuple(int(x) for x in b)) for b in bad[:10])
        raise ValueError(f"rows are not a partial isometry at {len(bad)} node(s): {shown}")
    w = np.empty(M.shape[:-2] + (4,), dtype=complex)
    cols = [0, 1, 2, 3]
    for j in range(4):
        keep = cols[:j] + cols[j + 1 :]
        w[..., j] = (-1) ** j * np.linalg.det(M[..., :, keep])
    w = np.conj(w)
    nrm = np.linalg.norm(w, axis=-1, keepdims=True)
    if np.any(nrm < tol):
        raise ValueError("rank-deficient node in pointwise completion")
    w = w / nrm
    mag = np.abs(w)
    top = mag.max(axis=-1, keepdims=True)
    lead = np.argmax(mag >= top - 1e-12, axis=-1)
    pivot = np.take_along_axis(w, lead[..., None], axis=-1)
    w = w * (np.conj(pivot) / np.abs(pivot))
    return np.concatenate([M, w[..., None, :]], axis=-2)


# ---------------------------------------------------------------------------
# dyadic formulas and the two filter identities


def detail_filters_dyadic(phiA: TrigPoly2, phiB: TrigPoly2):
    """``psiA = e^{-i xi1} conj(phiA(xi + (pi, 0)))`` and the B analogue."""
    psiA = TrigPoly2.monomial(-1, 0) * translate(phiA, (np.pi, 0.0)).conjugate()
    psiB = TrigPoly2.monomial(0, -1) * translate(phiB, (0.0, np.pi)).conjugate()
    return psiA, psiB


def intertwine_residual(phiA: TrigPoly2, phiB: TrigPoly2, pair: DilationPair) -> TrigPoly2:
    """``phiA(xi1, beta xi2) phiB(xi) - phiA(xi) phiB(alpha xi1, xi2)``."""
    return phiA.substitute_scale(1, pair.beta) * phiB - phiA * phiB.substitute_scale(pair.alpha, 1)


def commuting_lattice_residual(phiA: Filter, phiB: Filter, xi1, xi2):
    """Four-term orthogonality functional ``f`` of the A- and B-detail rows.

    With ``A[a, b; s1, s2] = phiA(s1 xi1 + a, s2 xi2 + b)`` (and ``B`` alike),
    ``f = A[pi,0;1,2] A[0,0;1,1] conj(B[0,0;1,1] B[0,pi;2,1])
        - A[0,0;1,2] A[pi,0;1,1] conj(B[pi,0;1,1] B[0,pi;2,1])
        - A[pi,0;1,2] A[0,pi;1,1] conj(B[0,pi;1,1] B[0,0;2,1])
        + A[0,0;1,2] A[pi,pi;1,1] conj(B[pi,pi;1,1] B[0,0;2,1])``.
    """
    x1 = np.asarray(xi1, dtype=float)
    x2 = np.asarray(xi2, dtype=float)
    pi = np.pi
    a12_p0 = phiA(x1 + pi, 2 * x2)
    a12_00 = phiA(x1, 2 * x2)
    a11_00 = phiA(x1, x2)
    a11_p0 = phiA(x1 + pi, x2)
    a11_0p = phiA(x1, x2 + pi)
    a11_pp = phiA(x1 + pi, x2 + pi)
    b11_00 = phiB(x1, x2)
    b11_p0 = phiB(x1 + pi, x2)
    b11_0p = phiB(x1, x2 + pi)
    b11_pp = phiB(x1 + pi, x2 + pi)
    b21_0p = phiB(2 * x1, x2 + pi)
    b21_00 = phiB(2 * x1, x2)
    return (
        a12_p0 * a11_00 * np.conj(b11_00 * b21_0p)
        - a12_00 * a11_p0 * np.conj(b11_p0 * b21_0p)
        - a12_p0 * a11_0p * np.conj(b11_0p * b21_00)
        + a12_00 * a11_pp * np.conj(b11_pp * b21_00)
    )


def tensor_filters(f1: TrigPoly2, f2: TrigPoly2):
    """Separable BMRA pair from a filter in ``xi1`` and a filter in ``xi2``."""
    if any(k != 0 for (_, k) in f1.coeffs):
        raise ValueError("first filter must depend on xi1 only")
    if any(j != 0 for (j, _) in f2.coeffs):
        raise ValueError("second filter must depend on xi2 only")
    return f1, f2


def lattice_cqf(angles, axis: int = 1) -> TrigPoly2:
    """Dyadic conjugate-mirror filter from a paraunitary rotation lattice.

    The polyphase row ``[E0(z), E1(z)]`` is the first row of
    ``R(a_K) L(z) ... L(z) R(a_0)`` with ``L(z) = diag(1, z)``; the filter is
    ``m(xi) = (E0(e^{-2 i xi}) + e^{-i xi} E1(e^{-2 i xi})) / sqrt(2)`` so that
    ``|m(xi)|^2 + |m(xi + pi)|^2 = 1``.  ``m(0) = 1`` when the angles sum
    to ``pi / 4``.
    """
    angles = list(angles)
    # polyphase matrix as polynomials in z: list of 2x2 coefficient arrays
    E = [np.eye(2)]
    for n, a in enumerate(angles):
        c, s = np.cos(a), np.sin(a)
        R = np.array([[c, s], [-s, c]])
        if n > 0:
            shifted = [np.zeros((2, 2)) for _ in range(len(E) + 1)]
            for deg, C in enumerate(E):
                shifted[deg][0] += C[0]
                shifted[deg + 1][1] += C[1]
            E = shifted
        E = [R @ C for C in E]
    h = np.zeros(2 * len(E))
    for deg, C in enumerate(E):
        h[2 * deg] = C[0, 0]
        h[2 * deg + 1] = C[0, 1]
    return TrigPoly2.univariate(h / np.sqrt(2), axis=axis)


def random_cqf(rng: np.random.Generator, order: int, axis: int = 1) -> TrigPoly2:
    """Random lowpass conjugate-mirror filter with ``order`` lattice stages."""
    angles = rng.uniform(-np.pi, np.pi, size=order)
    angles[-1] = np.pi / 4 - angles[:-1].sum()
    return lattice_cqf(angles, axis=axis)
