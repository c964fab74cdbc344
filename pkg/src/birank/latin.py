"""Biscaled Haar families with constant coset matrices.

A family for the pair ``(alpha, beta)`` is a set of ``alpha * beta``
coefficient grids over the tiles ``[0, 1/alpha] x [0, 1/beta] + (i/alpha, j/beta)``
of the unit square. Flattened in digit order (``i * beta + j``) the grids are
the rows of an orthogonal matrix: the scaling row, ``alpha - 1`` A-detail
rows, ``beta - 1`` B-detail rows and ``(alpha - 1)(beta - 1)`` wavelet rows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from importlib import resources
from math import gcd
from typing import List, Tuple

import numpy as np

from .filters import complete_constant
from .trigpoly import TrigPoly2

FIXTURE = "latin_family.csv"


@dataclass(frozen=True)
class HaarFamily:
    """Orthonormal coefficient grids of a biscaled Haar family.

    Every grid has shape ``(alpha, beta)`` and unit Euclidean norm. The
    L2-normalized function of a grid ``g`` is
    ``sqrt(alpha * beta) * sum g[i, j] chi_ij``.
    """

    alpha: int
    beta: int
    scaling: np.ndarray
    detail_a: Tuple[np.ndarray, ...]
    detail_b: Tuple[np.ndarray, ...]
    wavelets: Tuple[np.ndarray, ...]
    pinned: bool = field(default=False, compare=False)

    def __post_init__(self):
        shape = (self.alpha, self.beta)
        for g in self.grids:
            if g.shape != shape:
                raise ValueError(f"grid shape {g.shape} does not match {shape}")
        if len(self.detail_a) != self.alpha - 1 or len(self.detail_b) != self.beta - 1:
            raise ValueError("wrong number of detail grids")
        if len(self.wavelets) != (self.alpha - 1) * (self.beta - 1):
            raise ValueError("wrong number of wavelet grids")

    @property
    def grids(self) -> List[np.ndarray]:
        """All grids in band order: scaling, A-details, B-details, wavelets."""
        return [self.scaling, *self.detail_a, *self.detail_b, *self.wavelets]

    @property
    def names(self) -> List[str]:
        return (
            ["phi"]
            + [f"detail_a_{i + 1}" for i in range(len(self.detail_a))]
            + [f"detail_b_{j + 1}" for j in range(len(self.detail_b))]
            + [f"wavelet_{k + 1}" for k in range(len(self.wavelets))]
        )

    @property
    def matrix(self) -> np.ndarray:
        """The ``alpha*beta`` square family matrix, one flattened grid per row."""
        return np.array([g.reshape(-1) for g in self.grids])

    @property
    def separable_rows(self) -> np.ndarray:
        """The ``(alpha + beta - 1) x alpha*beta`` block of scaling and detail rows."""
        return self.matrix[: self.alpha + self.beta - 1]

    def function_coefficients(self, grid: np.ndarray) -> np.ndarray:
        """Tile coefficients of the L2-normalized function for ``grid``."""
        return np.sqrt(self.alpha * self.beta) * np.asarray(grid)

    def filters(self) -> List[TrigPoly2]:
        """Filters for ``T = AB`` of every family function, in band order.

        The coset matrix of these filters is the (constant) family matrix.
        """
        t = self.alpha * self.beta
        out = []
        for g in self.grids:
            c = self.function_coefficients(g)
            coeffs = {(i, j): c[i, j] for i in range(self.alpha) for j in range(self.beta) if c[i, j] != 0}
            out.append(TrigPoly2.filter(coeffs, t))
        return out

    @classmethod
    def from_matrix(cls, alpha: int, beta: int, M, pinned: bool = False) -> "HaarFamily":
        M = np.asarray(M, dtype=float)
        if M.shape != (alpha * beta, alpha * beta):
            raise ValueError(f"expected a {alpha * beta}x{alpha * beta} matrix, got {M.shape}")
        g = [row.reshape(alpha, beta).copy() for row in M]
        na, nb = alpha - 1, beta - 1
        return cls(
            alpha,
            beta,
            g[0],
            tuple(g[1 : 1 + na]),
            tuple(g[1 + na : 1 + na + nb]),
            tuple(g[1 + na + nb :]),
            pinned=pinned,
        )


def univariate_completion(n: int) -> np.ndarray:
    """Orthogonal ``n x n`` matrix with constant first row ``1/sqrt(n)``."""
    return complete_constant(np.full((1, n), 1 / np.sqrt(n)))


def separable_rows(UA: np.ndarray, UB: np.ndarray) -> np.ndarray:
    """Scaling row, A-detail rows and B-detail rows as Kronecker products."""
    rows = [np.kron(UA[0], UB[0])]
    rows += [np.kron(UA[i], UB[0]) for i in range(1, UA.shape[0])]
    rows += [np.kron(UA[0], UB[j]) for j in range(1, UB.shape[0])]
    return np.array(rows)


def haar_family(alpha: int, beta: int, pinned: bool = False) -> HaarFamily:
    """Complete the separable rows for ``(alpha, beta)`` to a full family.

    With ``pinned=True`` and ``alpha == beta == 3`` the shipped triadic
    family is returned instead of the generic completion.
    """
    for name, v in (("alpha", alpha), ("beta", beta)):
        if int(v) != v or v < 2:
            raise ValueError(f"{name} must be >= 2")
    if pinned and (alpha, beta) == (3, 3):
        return latin_square_family()
    rows = separable_rows(univariate_completion(alpha), univariate_completion(beta))
    return HaarFamily.from_matrix(alpha, beta, complete_constant(rows))


def read_family_csv(path) -> HaarFamily:
    """Read a family written as ``name,g00,g01,...`` rows in band order."""
    with open(path, newline="") as fh:
        return _parse_family_csv(fh)


def _parse_family_csv(fh) -> HaarFamily:
    reader = csv.reader(fh)
    header = next(reader)
    cols = header[1:]
    alpha = max(int(c[1]) for c in cols) + 1
    beta = len(cols) // alpha
    rows = [[float(x) for x in r[1:]] for r in reader if r]
    return HaarFamily.from_matrix(alpha, beta, np.array(rows), pinned=True)


def latin_square_family() -> HaarFamily:
    """The triadic family whose four wavelet grids are orthogonal Latin squares."""
    with resources.files("birank.data").joinpath(FIXTURE).open("r", newline="") as fh:
        return _parse_family_csv(fh)


# -- pretty printing ------------------------------------------------------


def _squarefree_split(n: int) -> Tuple[int, int]:
    """``n = outer**2 * inner`` with ``inner`` squarefree."""
    outer, inner = 1, n
    k = 2
    while k * k <= inner:
        while inner % (k * k) == 0:
            inner //= k * k
            outer *= k
        k += 1
    return outer, inner


def radical_factor(grid, max_den: int = 12, tol: float = 1e-9):
    """Write ``grid = (p * sqrt(r) / q) * V`` with ``V`` a coprime integer array.

    Returns ``(p, r, q, V)`` or ``None`` when no such small form is found.
    """
    g = np.asarray(grid, dtype=float)
    nz = g[np.abs(g) > tol]
    if nz.size == 0:
        return None
    base = np.abs(nz).min()
    fr = [Fraction(x / base).limit_denominator(max_den) for x in g.reshape(-1)]
    if any(abs(float(f) - x / base) > tol for f, x in zip(fr, g.reshape(-1))):
        return None
    den = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in fr), 1)
    ints = [int(f * den) for f in fr]
    common = reduce(gcd, (abs(v) for v in ints if v), 0)
    V = np.array(ints, dtype=np.int64).reshape(g.shape) // common
    scale = base * common / den
    sq = Fraction(scale * scale).limit_denominator(100000)
    if abs(float(sq) - scale * scale) > tol:
        return None
    # scale = sqrt(num / den) = sqrt(num * den) / den
    outer, inner = _squarefree_split(sq.numerator * sq.denominator)
    p, q = outer, sq.denominator
    k = gcd(p, q)
    return p // k, inner, q // k, V


def _latex_scale(p: int, r: int, q: int) -> str:
    num = ("" if p == 1 and r != 1 else str(p)) + (f"\\sqrt{{{r}}}" if r != 1 else "")
    if q == 1:
        return num
    return f"\\frac{{{num}}}{{{q}}}"


def latex_grid(name: str, grid) -> str:
    """``name = scale (sum of c_ij chi_ij)`` in radical notation."""
    fac = radical_factor(grid)
    if fac is None:
        terms = [f"{v:+.6g}\\chi_{{{i}{j}}}" for (i, j), v in np.ndenumerate(np.asarray(grid)) if v]
        return f"{name} = " + " ".join(terms)
    p, r, q, V = fac
    terms = []
    for (i, j), v in np.ndenumerate(V):
        if v == 0:
            continue
        sign = "-" if v < 0 else "+"
        mag = "" if abs(v) == 1 else str(abs(v))
        terms.append(f"{sign} {mag}\\chi_{{{i}{j}}}")
    body = " ".join(terms).lstrip("+ ")
    if body.startswith("- "):
        body = "-" + body[2:]
    return f"{name} = {_latex_scale(p, r, q)}\\left({body}\\right)"


def latex_family(fam: HaarFamily) -> str:
    return "\n".join(latex_grid(n, g) for n, g in zip(fam.names, fam.grids)) + "\n"


# -- verification ---------------------------------------------------------


def verify_family(fam: HaarFamily, tol: float = 1e-12, grid_n: int = 12) -> dict:
    """Named residuals for every structural property of a family."""
    from .filters import coset_matrix, phase_matrix, translation_matrix, check_unitarity
    from .lattice import DilationPair, FreqGrid

    M = fam.matrix
    k = fam.alpha + fam.beta - 1
    S = M[:k]
    wav = np.array([w.reshape(-1) for w in fam.wavelets])
    gram = wav @ wav.T
    off = gram - np.diag(np.diag(gram))
    da = [g - g.mean(axis=1, keepdims=True) for g in fam.detail_a]
    db = [g - g.mean(axis=0, keepdims=True) for g in fam.detail_b]
    sums = [np.abs(w.sum(axis=1)).max() for w in fam.wavelets] + [np.abs(w.sum(axis=0)).max() for w in fam.wavelets]

    pair = DilationPair(fam.alpha, fam.beta)
    grid = FreqGrid(grid_n, np.pi)
    F = fam.filters()
    U = translation_matrix(F, pair)
    C = coset_matrix(F, pair)
    x1, x2 = grid.mesh()
    fact = np.abs(U(x1, x2) - C(x1, x2) @ phase_matrix(U.digits, x1, x2)).max()
    uni = check_unitarity(U, grid)

    values = {
        "orthogonality": float(np.abs(M @ M.T - np.eye(len(M))).max()),
        "partial_isometry": float(np.abs(S @ S.T - np.eye(k)).max()),
        "wavelet_count": float(abs(len(fam.wavelets) - (fam.alpha - 1) * (fam.beta - 1))),
        "wavelet_pairwise_orthogonality": float(np.abs(off).max()) if off.size else 0.0,
        "wavelet_unit_norm": float(np.abs(np.diag(gram) - 1).max()),
        "wavelet_line_sums": float(max(sums)),
        "detail_a_factorizes": float(max(np.abs(g).max() for g in da)),
        "detail_b_factorizes": float(max(np.abs(g).max() for g in db)),
        "filter_matrix_unitary": float(max(uni.row_deviation, uni.col_deviation or 0.0)),
        "coset_factorization": float(fact),
    }
    checks = {name: {"value": v, "tol": tol, "passed": bool(v <= tol)} for name, v in values.items()}
    return {
        "schema": 1,
        "alpha": fam.alpha,
        "beta": fam.beta,
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }
