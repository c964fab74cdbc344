"""Rank-2 Meyer-type scaling functions and wavelets in the frequency domain.

The scaling function ``phi_hat`` (real, nonnegative) is determined by:

* ``1/(2 pi)`` on the central square ``(-2pi/3, 2pi/3)^2`` and ``0`` outside
  ``(-4pi/3, 4pi/3)^2``;
* free values on the four corner squares ``2pi/3 < |xi_1|, |xi_2| < 4pi/3``,
  subject to the partition of unity over ``2 pi Z^2``-translates and the
  product identity ``phi(xi) phi(xi - 2pi(1,1)) = phi(xi - 2pi(1,0)) phi(xi - 2pi(0,1))``;
* on the border strips, a quotient of corner values next to the corners
  and the dilation recursion ``phi(xi) = phi(2 xi_1, xi_2)`` (north/south)
  or ``phi(xi) = phi(xi_1, 2 xi_2)`` (east/west) closer to the axis.

All region tests run on exact integer coordinates: a point is stored as
``N = (N1, N2)`` with ``xi = (pi/3) * N / D``, so the breakpoints sit at
integer multiples of ``D`` and a translate by ``2 pi`` is a shift by ``6 D``.
A point whose evaluation lands exactly on a breakpoint is *unresolved*; its
value is taken from a point half a lattice step away and it is excluded
from sharp checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .filters import check_unitarity, commuting_lattice_residual, complete_pointwise
from .lattice import DilationPair, FreqGrid, digits_for
from .separability import nonseparability_score

TWO_PI = 2 * np.pi
CENTRAL_SQ = 1 / (4 * np.pi**2)  # (1/(2 pi))^2
HALF_SQ = 1 / (8 * np.pi**2)
MODES = ("piecewise", "triangular", "tensor", "custom")

# region tags
OUTSIDE, CENTRAL, CORNER, BORDER_I, BORDER_J, BREAKPOINT = range(6)
REGION_NAMES = {
    OUTSIDE: "outside",
    CENTRAL: "central",
    CORNER: "corner",
    BORDER_I: "border-quotient",
    BORDER_J: "border-recursion",
    BREAKPOINT: "breakpoint",
}

_MAX_NUDGE = 3


def solve_corner_values(a: float, d: float) -> Tuple[float, float]:
    """Squared corner values ``(b, c)`` with ``b + c = 1/(4 pi^2) - a - d``
    and ``b c = a d``, ``b >= c``."""
    if a < 0 or d < 0:
        raise ValueError("corner values must be nonnegative")
    if not a + d < HALF_SQ:
        raise ValueError(f"need a + d < 1/(8 pi^2) = {HALF_SQ:.6g}, got {a + d:.6g}")
    s = CENTRAL_SQ - a - d
    disc = s * s - 4 * a * d
    assert disc >= 0, "negative discriminant under a + d < 1/(8 pi^2)"
    r = np.sqrt(disc)
    b = 0.5 * (s + r)
    c = a * d / b if b > 0 else 0.0  # avoids cancellation in 0.5 * (s - r)
    return float(b), float(c)


@dataclass(frozen=True)
class MeyerCornerSpec:
    """Squared corner-square values of the profile.

    Each corner square is split into halves ``Xi0`` and ``Xi1``. In
    ``piecewise`` mode the split is the vertical midline (``Xi0`` on the
    left); ``triangular`` uses the anti-diagonal ``u + v < 0`` with ties
    sent to ``u < 0``. With ``u, v`` the offsets from the corner centre the
    squared values are

    =========  ======  ======
    corner      Xi0     Xi1
    =========  ======  ======
    NE          d       a
    SW          a       d
    SE          b       c
    NW          c       b
    =========  ======  ======

    ``tensor`` mode ignores ``a, d`` and uses ``theta(s1) theta(s2)`` for a
    one-dimensional profile with ``theta^2 = p`` next to the centre and
    ``1/(2 pi) - p`` at the outer half. ``custom`` calls ``corner_fn(N1, N2, D)``
    for squared values.
    """

    mode: str = "piecewise"
    a: float = 1 / (64 * np.pi**2)
    d: float = 1 / (64 * np.pi**2)
    b: Optional[float] = None
    c: Optional[float] = None
    p: float = 0.64 / TWO_PI
    corner_fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    validate: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "custom" and self.corner_fn is None:
            raise ValueError("custom mode needs corner_fn")
        if self.mode == "tensor":
            if not 0 < self.p < 1 / TWO_PI:
                raise ValueError("tensor mode needs 0 < p < 1/(2 pi)")
        elif self.mode != "custom" and self.validate:
            if not (self.a > 0 and self.d > 0):
                raise ValueError("a and d must be positive (zero makes the border quotient 0/0)")
            solve_corner_values(self.a, self.d)

    @cached_property
    def values(self) -> Tuple[float, float, float, float]:
        """``(a, b, c, d)`` in squared form."""
        if self.b is not None and self.c is not None:
            return self.a, self.b, self.c, self.d
        b, c = solve_corner_values(self.a, self.d)
        return self.a, (b if self.b is None else self.b), (c if self.c is None else self.c), self.d

    def to_dict(self) -> dict:
        out = {"mode": self.mode}
        if self.mode == "tensor":
            out["p"] = self.p
        elif self.mode != "custom":
            a, b, c, d = self.values
            out.update(a=a, b=b, c=c, d=d)
        return out

    # -- corner values in integer coordinates ---------------------------

    def corner_sq(self, N1, N2, D: int):
        """Squared values at corner-square points; returns ``(values, resolved)``."""
        if self.mode == "custom":
            vals = np.asarray(self.corner_fn(N1, N2, D), dtype=float)
            return vals, np.ones(vals.shape, dtype=bool)
        sx = np.sign(N1)
        sy = np.sign(N2)
        u = N1 - 3 * D * sx
        v = N2 - 3 * D * sy
        if self.mode == "tensor":
            return self._tensor_sq(sx, u) * self._tensor_sq(sy, v), (u != 0) & (v != 0)
        if self.mode == "piecewise":
            left = u < 0
            ok = u != 0
        else:
            w = u + v
            left = (w < 0) | ((w == 0) & (u < 0))
            ok = (u != 0) | (v != 0)
        a, b, c, d = self.values
        east = sx > 0
        north = sy > 0
        left_val = np.where(north, np.where(east, d, c), np.where(east, b, a))
        right_val = np.where(north, np.where(east, a, b), np.where(east, c, d))
        return np.where(left, left_val, right_val), ok

    def _tensor_sq(self, sgn, off):
        inner = self.p
        outer = 1 / TWO_PI - self.p
        near_centre = (off < 0) == (sgn > 0)
        return np.where(near_centre, inner, outer)


def tensor_profile_1d(p: float, s) -> np.ndarray:
    """One-dimensional squared profile matching ``tensor`` mode, at ``s = xi / (pi/3)``."""
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    out = np.where(a < 2, 1 / TWO_PI, 0.0)
    out = np.where((a > 2) & (a < 3), p, out)
    return np.where((a > 3) & (a < 4), 1 / TWO_PI - p, out)


class MeyerEvaluator:
    """Exact-region evaluation of ``phi_hat`` at integer lattice points."""

    def __init__(self, spec: MeyerCornerSpec):
        self.spec = spec

    def phi_sq(self, N1, N2, D: int, _depth: int = 0):
        """Squared ``phi_hat`` at ``(pi/3) * (N1, N2) / D``; returns ``(values, resolved, tags)``."""
        N1, N2 = np.broadcast_arrays(np.asarray(N1, dtype=np.int64), np.asarray(N2, dtype=np.int64))
        val = np.zeros(N1.shape)
        ok = np.ones(N1.shape, dtype=bool)
        tag = np.full(N1.shape, OUTSIDE, dtype=np.int8)
        a1, a2 = np.abs(N1), np.abs(N2)
        lo, hi = 2 * D, 4 * D

        on_line = (a1 == lo) | (a2 == lo) | (a1 == hi) | (a2 == hi)
        inside = (a1 < hi) & (a2 < hi) & ~on_line
        central = inside & (a1 < lo) & (a2 < lo)
        corner = inside & (a1 > lo) & (a2 > lo)
        ns = inside & (a1 < lo) & (a2 > lo)
        ew = inside & (a2 < lo) & (a1 > lo)

        val[central] = CENTRAL_SQ
        tag[central] = CENTRAL

        if corner.any():
            cv, cok = self.spec.corner_sq(N1[corner], N2[corner], D)
            val[corner] = cv
            ok[corner] = cok
            tag[corner] = CORNER

        for mask, axis in ((ns, 0), (ew, 1)):
            if mask.any():
                v, o, t = self._border(N1[mask], N2[mask], D, axis)
                val[mask], ok[mask], tag[mask] = v, o, t

        tag[on_line] = BREAKPOINT
        ok[on_line] = False

        bad = ~ok
        if bad.any() and _depth < _MAX_NUDGE:
            nv, _, _ = self.phi_sq(2 * N1[bad] + 1, 2 * N2[bad] + 1, 2 * D, _depth + 1)
            val[bad] = nv
        return val, ok, tag

    def _border(self, N1, N2, D, axis):
        """Border strips: ``axis=0`` is north/south (small ``|N1|``)."""
        near, far = (N1, N2) if axis == 0 else (N2, N1)
        m = near.copy()
        ok = m != 0
        tag = np.full(m.shape, BORDER_I, dtype=np.int8)
        # the recursion halves the distance to the I-rectangle each step
        while True:
            step = ok & (np.abs(m) < D)
            if not step.any():
                break
            m = np.where(step, 2 * m, m)
            tag[step] = BORDER_J
        ok &= np.abs(m) != D
        shift = 6 * D * np.sign(far)
        if axis == 0:
            t1, o1 = self.spec.corner_sq(2 * m, far, D)
            t2, o2 = self.spec.corner_sq(2 * m, far - shift, D)
        else:
            t1, o1 = self.spec.corner_sq(far, 2 * m, D)
            t2, o2 = self.spec.corner_sq(far - shift, 2 * m, D)
        den = t1 + t2
        ok &= o1 & o2 & (den > 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = np.where(den > 0, CENTRAL_SQ * t1 / np.where(den > 0, den, 1.0), 0.0)
        return val, ok, tag

    def phi(self, N1, N2, D):
        v, ok, _ = self.phi_sq(N1, N2, D)
        return np.sqrt(v), ok

    # -- refinement filters --------------------------------------------

    def filter(self, which: str, N1, N2, D: int):
        """Periodic filter ``m_A = phi(2 xi_1, xi_2) / phi(xi)`` (or ``m_B``) at
        integer points; returns ``(values, resolved)``."""
        N1, N2 = np.broadcast_arrays(np.asarray(N1, dtype=np.int64), np.asarray(N2, dtype=np.int64))
        P = 6 * D
        R1 = (N1 + 3 * D) % P - 3 * D
        R2 = (N2 + 3 * D) % P - 3 * D
        den, ok_d = self.phi(R1, R2, D)
        if which == "A":
            num, ok_n = self.phi(2 * R1, R2, D)
        elif which == "B":
            num, ok_n = self.phi(R1, 2 * R2, D)
        else:
            raise ValueError("which must be 'A' or 'B'")
        zero_den = den == 0
        if np.any(zero_den & (num != 0)):
            idx = np.argwhere(zero_den & (num != 0))[0]
            raise ZeroDivisionError(f"vanishing denominator at lattice point {tuple(int(x[tuple(idx)]) for x in (R1, R2))}/{D}")
        vals = np.where(zero_den, 0.0, num / np.where(zero_den, 1.0, den))
        return vals, ok_d & ok_n


@dataclass
class FreqProfile:
    """Sampled ``phi_hat`` on a frequency grid with region tags."""

    spec: MeyerCornerSpec
    grid: FreqGrid
    values: np.ndarray
    tags: np.ndarray
    resolved: np.ndarray
    D: int
    N: np.ndarray  # integer node coordinates along one axis

    @property
    def evaluator(self) -> MeyerEvaluator:
        return MeyerEvaluator(self.spec)

    def lattice(self, xi):
        """Integer lattice coordinates of float frequencies (must be lattice points)."""
        x = np.asarray(xi, dtype=float) * 3 * self.D / np.pi
        n = np.rint(x)
        if np.any(np.abs(x - n) > 1e-6):
            raise ValueError("frequency is not a lattice point of this profile")
        return n.astype(np.int64)

    def filter_callable(self, which: str) -> Callable:
        """Float-argument filter for use with the generic filter identities."""

        def m(xi1, xi2):
            vals, _ = self.evaluator.filter(which, self.lattice(xi1), self.lattice(xi2), self.D)
            return vals.astype(complex)

        return m


def _lattice_scale(grid: FreqGrid) -> Tuple[int, int]:
    k = grid.half_extent / (np.pi / 3)
    if abs(k - round(k)) > 1e-9 or round(k) < 1:
        raise ValueError("grid half-extent must be an integer multiple of pi/3")
    return int(round(k)), grid.n


def build_profile(spec: MeyerCornerSpec, grid: FreqGrid = FreqGrid(768)) -> FreqProfile:
    """Sample ``phi_hat`` on ``grid`` (half-extent a multiple of ``pi/3``)."""
    k, D = _lattice_scale(grid)
    N = grid.q * k
    N1, N2 = np.meshgrid(N, N, indexing="ij")
    sq, ok, tags = MeyerEvaluator(spec).phi_sq(N1, N2, D)
    return FreqProfile(spec, grid, np.sqrt(sq), tags, ok, D, N)


# -- verification -----------------------------------------------------------


def _cell_nodes(p: FreqProfile):
    """Nodes of the fundamental cell ``[-pi, pi)^2`` as integer meshes."""
    D = p.D
    n = p.N[(p.N >= -3 * D) & (p.N < 3 * D)]
    return np.meshgrid(n, n, indexing="ij")


def orthonormality_sum(p: FreqProfile) -> dict:
    """Max deviation of ``sum_k phi_hat(xi - 2 pi k)^2`` from ``1/(4 pi^2)``
    over resolved nodes of the fundamental cell."""
    ev = p.evaluator
    N1, N2 = _cell_nodes(p)
    S = np.zeros(N1.shape)
    ok = np.ones(N1.shape, dtype=bool)
    P = 6 * p.D
    for k1 in (-1, 0, 1):
        for k2 in (-1, 0, 1):
            v, o, _ = ev.phi_sq(N1 - P * k1, N2 - P * k2, p.D)
            S += v
            ok &= o
    dev = np.abs(S - CENTRAL_SQ)
    return {
        "max_deviation": float(dev[ok].max()) if ok.any() else 0.0,
        "resolved_fraction": float(ok.mean()),
        "nodes": int(ok.size),
    }


def corner_conditions(p: FreqProfile) -> dict:
    """Residuals of the partition-of-unity and product identities on
    north-east corner nodes and their translates."""
    ev = p.evaluator
    D = p.D
    n = p.N[(p.N > 2 * D) & (p.N < 4 * D)]
    N1, N2 = np.meshgrid(n, n, indexing="ij")
    P = 6 * D
    ne, o1, _ = ev.phi_sq(N1, N2, D)
    nw, o2, _ = ev.phi_sq(N1 - P, N2, D)
    se, o3, _ = ev.phi_sq(N1, N2 - P, D)
    sw, o4, _ = ev.phi_sq(N1 - P, N2 - P, D)
    ok = o1 & o2 & o3 & o4
    d_res = np.abs(ne + nw + se + sw - CENTRAL_SQ)
    g_res = np.abs(np.sqrt(ne * sw) - np.sqrt(nw * se))
    return {
        "partition_residual": float(d_res[ok].max()) if ok.any() else 0.0,
        "product_residual": float(g_res[ok].max()) if ok.any() else 0.0,
    }


def filter_quotient(p: FreqProfile, which: str = "A"):
    """Filter samples on the fundamental cell and the periodicity report.

    Periodicity compares ``phi(D_w xi) / phi(xi)`` computed at a node of the
    support with the same quotient at its representative in the cell.
    """
    ev = p.evaluator
    D = p.D
    N1c, N2c = _cell_nodes(p)
    cell_vals, cell_ok = ev.filter(which, N1c, N2c, D)

    N1, N2 = np.meshgrid(p.N, p.N, indexing="ij")
    den, ok_d = ev.phi(N1, N2, D)
    if which == "A":
        num, ok_n = ev.phi(2 * N1, N2, D)
    else:
        num, ok_n = ev.phi(N1, 2 * N2, D)
    pos = den > 0
    direct = np.where(pos, num / np.where(pos, den, 1.0), 0.0)
    red, ok_r = ev.filter(which, N1, N2, D)
    ok = pos & ok_d & ok_n & ok_r
    incons = np.abs(direct - red)
    # where phi(xi) = 0 the refinement equation still requires phi(D_w xi) = 0
    lost = ~pos & ok_n & (num != 0)
    return {
        "values": cell_vals,
        "resolved": cell_ok,
        "periodicity": float(incons[ok].max()) if ok.any() else 0.0,
        "unsupported_numerator": int(lost.sum()),
    }


def _lrect_nodes(p: FreqProfile):
    """Nodes of the four rectangles ``L_ij = (-2pi/3, -pi/3)^2 + pi (i, j)``."""
    D = p.D
    n0 = p.N[(p.N > -2 * D) & (p.N < -D)]
    pts = []
    for i in (0, 1):
        for j in (0, 1):
            a, b = np.meshgrid(n0 + 3 * D * i, n0 + 3 * D * j, indexing="ij")
            pts.append((a.reshape(-1), b.reshape(-1)))
    return np.concatenate([x for x, _ in pts]), np.concatenate([y for _, y in pts])


def _filters_resolved(p: FreqProfile, N1, N2, args) -> np.ndarray:
    ev = p.evaluator
    ok = np.ones(N1.shape, dtype=bool)
    for which, s1, s2, a1, a2 in args:
        _, o = ev.filter(which, s1 * N1 + a1, s2 * N2 + a2, p.D)
        ok &= o
    return ok


def lattice_residual(p: FreqProfile) -> dict:
    """Commuting-lattice functional ``f`` on the L-rectangle nodes."""
    D = p.D
    N1, N2 = _lrect_nodes(p)
    pi = 3 * D
    mA, mB = p.filter_callable("A"), p.filter_callable("B")
    scale = np.pi / (3 * D)
    f = commuting_lattice_residual(mA, mB, N1 * scale, N2 * scale)
    f_shift = commuting_lattice_residual(mA, mB, (N1 + pi) * scale, N2 * scale)
    args = [
        ("A", 1, 2, pi, 0), ("A", 1, 2, 0, 0), ("A", 1, 1, 0, 0), ("A", 1, 1, pi, 0),
        ("A", 1, 1, 0, pi), ("A", 1, 1, pi, pi), ("B", 1, 1, 0, 0), ("B", 1, 1, pi, 0),
        ("B", 1, 1, 0, pi), ("B", 1, 1, pi, pi), ("B", 2, 1, 0, pi), ("B", 2, 1, 0, 0),
    ]
    ok = _filters_resolved(p, N1, N2, args) & _filters_resolved(p, N1 + pi, N2, args)
    return {
        "max_abs": float(np.abs(f[ok]).max()) if ok.any() else 0.0,
        "antisymmetry": float(np.abs(f_shift + f)[ok].max()) if ok.any() else 0.0,
        "nodes": int(ok.sum()),
    }


def intertwining(p: FreqProfile) -> float:
    """Max of ``|m_A(xi_1, 2 xi_2) m_B(xi) - m_A(xi) m_B(2 xi_1, xi_2)|`` on the cell."""
    ev = p.evaluator
    D = p.D
    N1, N2 = _cell_nodes(p)
    a2, o1 = ev.filter("A", N1, 2 * N2, D)
    b1, o2 = ev.filter("B", N1, N2, D)
    a1, o3 = ev.filter("A", N1, N2, D)
    b2, o4 = ev.filter("B", 2 * N1, N2, D)
    ok = o1 & o2 & o3 & o4
    r = np.abs(a2 * b1 - a1 * b2)
    return float(r[ok].max()) if ok.any() else 0.0


def _symmetry(p: FreqProfile) -> float:
    """``max |phi_hat(-xi) - phi_hat(xi)|`` over nodes resolved at both points."""
    ok = p.resolved & p.resolved[::-1, ::-1]
    d = np.abs(p.values - p.values[::-1, ::-1])
    return float(d[ok].max()) if ok.any() else 0.0


def verify_bmra(p: FreqProfile, tol: float = 1e-9) -> dict:
    """Every identity the construction must satisfy, as named residuals."""
    s = orthonormality_sum(p)
    cc = corner_conditions(p)
    fa = filter_quotient(p, "A")
    fb = filter_quotient(p, "B")
    lat = lattice_residual(p)
    vals = p.values
    checks = {
        "bounds": float(max(0.0, -vals.min(), vals.max() - 1 / TWO_PI)),
        "partition": cc["partition_residual"],
        "product": cc["product_residual"],
        "orthonormality": s["max_deviation"],
        "periodicity_A": fa["periodicity"],
        "periodicity_B": fb["periodicity"],
        "refinement_support": float(fa["unsupported_numerator"] + fb["unsupported_numerator"]),
        "intertwining": intertwining(p),
        "commuting_lattice": lat["max_abs"],
        "commuting_lattice_antisymmetry": lat["antisymmetry"],
        "symmetry": _symmetry(p),
    }
    return {
        "schema": 1,
        "spec": p.spec.to_dict(),
        "grid": p.grid.n,
        "resolved_fraction": float(p.resolved.mean()),
        "residuals": checks,
        "tolerance": tol,
        "passed": bool(all(v <= tol for v in checks.values())),
    }


def translate_gram(p: FreqProfile, K: int = 3) -> np.ndarray:
    """Real part of ``<phi, phi(. - k)> = int phi_hat^2 exp(i <xi, k>)`` for
    ``|k|_inf <= K``, indexed ``[k1 + K, k2 + K]``."""
    x = p.grid.nodes
    k = np.arange(-K, K + 1)
    E = np.exp(1j * np.outer(k, x))
    G = E @ (p.values**2) @ E.T * p.grid.cell_area
    return G.real


def gram_error(G: np.ndarray) -> Tuple[float, float]:
    """``(|G_00 - 1|, max off-diagonal |G_k|)`` for a centred Gram array."""
    K = G.shape[0] // 2
    off = G.copy()
    off[K, K] = 0.0
    return float(abs(G[K, K] - 1)), float(np.abs(off).max())


def profile_nonseparability(p: FreqProfile) -> float:
    return nonseparability_score(p.values)


def tensor_reference(p: FreqProfile) -> np.ndarray:
    """Outer product of the one-dimensional profile for a tensor-mode spec."""
    if p.spec.mode != "tensor":
        raise ValueError("reference only defined for tensor mode")
    s = p.N / p.D
    t = np.sqrt(tensor_profile_1d(p.spec.p, s))
    return np.outer(t, t)


# -- wavelet ---------------------------------------------------------------


@dataclass
class WaveletSamples:
    """``psi_hat`` on the dilated grid plus the completed filter data."""

    profile: FreqProfile
    psi_hat: np.ndarray  # at xi = 2 * node
    m_psi: np.ndarray  # on fundamental-cell nodes
    unitarity: float
    partial_isometry: float
    resolved: np.ndarray  # on the quarter cell used for completion
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def nodes(self) -> np.ndarray:
        return 2 * self.profile.grid.nodes

    @property
    def cell_area(self) -> float:
        return 4 * self.profile.grid.cell_area

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.psi_hat) ** 2) * self.cell_area))

    def inner_with_translates(self, K: int = 2) -> np.ndarray:
        """``<psi, phi(. - k)>`` for ``|k|_inf <= K`` by frequency quadrature."""
        p = self.profile
        N = 2 * p.N
        N1, N2 = np.meshgrid(N, N, indexing="ij")
        phi2, _ = p.evaluator.phi(N1, N2, p.D)
        k = np.arange(-K, K + 1)
        E = np.exp(1j * np.outer(k, self.nodes))
        return E @ (self.psi_hat * phi2) @ E.T * self.cell_area

    def support_box(self, tol: float = 1e-14) -> float:
        """Largest ``|xi|_inf`` with ``|psi_hat| > tol``."""
        x = self.nodes
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        nz = np.abs(self.psi_hat) > tol
        return float(np.maximum(np.abs(X1), np.abs(X2))[nz].max()) if nz.any() else 0.0

    def central_max(self) -> float:
        """Max ``|psi_hat|`` on ``(-2pi/3, 2pi/3)^2``."""
        x = self.nodes
        inside = np.abs(x) < 2 * np.pi / 3
        return float(np.abs(self.psi_hat[np.ix_(inside, inside)]).max())

    def spatial(self, half_width: float = 8.0, n: int = 65) -> Tuple[np.ndarray, np.ndarray]:
        """``psi(x) = (1/2pi) int psi_hat(xi) exp(i <x, xi>) dxi`` on a square box."""
        x = np.linspace(-half_width, half_width, n)
        E = np.exp(1j * np.outer(x, self.nodes))
        return x, E @ self.psi_hat @ E.T * self.cell_area / TWO_PI


def filter_rows(ev: MeyerEvaluator, N1, N2, D: int):
    """The three known rows (scaling, A-detail, B-detail for ``AB = 2I``)
    at the four translates ``eta + pi d``; shape ``(..., 3, 4)``."""
    pi = 3 * D
    scale = np.pi / (3 * D)
    digits = digits_for(DilationPair(2, 2), 1, 1)
    out = np.empty(np.shape(N1) + (3, 4), dtype=complex)
    ok = np.ones(np.shape(N1), dtype=bool)
    for col, (d1, d2) in enumerate(digits):
        M1, M2 = N1 + pi * d1, N2 + pi * d2
        a_2, o1 = ev.filter("A", M1, 2 * M2, D)
        b, o2 = ev.filter("B", M1, M2, D)
        a, o3 = ev.filter("A", M1, M2, D)
        a_pi, o4 = ev.filter("A", M1 + pi, 2 * M2, D)
        b_pi, o5 = ev.filter("B", 2 * M1, M2 + pi, D)
        out[..., 0, col] = a_2 * b
        out[..., 1, col] = np.exp(-1j * M1 * scale) * np.conj(a_pi) * b
        out[..., 2, col] = np.exp(-1j * M2 * scale) * np.conj(b_pi) * a
        ok &= o1 & o2 & o3 & o4 & o5
    return out, ok


def synthesize_wavelet(p: FreqProfile, check: bool = True) -> WaveletSamples:
    """Complete the filter rows pointwise and form ``psi_hat(2 eta) = m_psi(eta) phi_hat(eta)``."""
    if check:
        rep = verify_bmra(p, tol=1e-6)
        if not rep["passed"]:
            failing = [k for k, v in rep["residuals"].items() if v > 1e-6]
            raise ValueError(f"profile fails BMRA checks: {', '.join(failing)}")
    D = p.D
    pi = 3 * D
    q = p.N[(p.N > 0) & (p.N < pi)]
    Q1, Q2 = np.meshgrid(q, q, indexing="ij")
    rows, ok = filter_rows(p.evaluator, Q1, Q2, D)
    # unresolved nodes: take every entry from one shared point half a step away
    bad = ~ok
    n1, n2, d = Q1[bad], Q2[bad], D
    for _ in range(_MAX_NUDGE):
        if not n1.size:
            break
        n1, n2, d = 2 * n1 + 1, 2 * n2 + 1, 2 * d
        r, o = filter_rows(p.evaluator, n1, n2, d)
        rows[bad] = r
        if o.all():
            break
    pis = check_unitarity(rows)
    full = complete_pointwise(rows)
    uni = check_unitarity(full)

    # m_psi on the cell: column (d1, d2) of the completed row holds m_psi(eta + pi d)
    cell = p.N[(p.N >= -pi) & (p.N < pi)]
    idx = {int(v): i for i, v in enumerate(cell)}
    m_psi = np.zeros((cell.size, cell.size), dtype=complex)
    digits = digits_for(DilationPair(2, 2), 1, 1)
    red = lambda x: (x + pi) % (2 * pi) - pi  # noqa: E731
    for col, (d1, d2) in enumerate(digits):
        i1 = np.array([idx[int(red(v + pi * d1))] for v in q])
        i2 = np.array([idx[int(red(v + pi * d2))] for v in q])
        m_psi[np.ix_(i1, i2)] = full[:, :, 3, col]

    # psi_hat at 2 * eta for every grid node eta
    i_all = np.array([idx[int(red(v))] for v in p.N])
    m_grid = m_psi[np.ix_(i_all, i_all)]
    psi_hat = m_grid * p.values
    return WaveletSamples(
        p,
        psi_hat,
        m_psi,
        unitarity=max(uni.row_deviation, uni.col_deviation or 0.0),
        partial_isometry=pis.row_deviation,
        resolved=ok,
    )


def wavelet_report(w: WaveletSamples, K: int = 2) -> dict:
    ip = w.inner_with_translates(K)
    return {
        "schema": 1,
        "unitarity": w.unitarity,
        "partial_isometry": w.partial_isometry,
        "norm": w.norm(),
        "max_inner_with_scaling_translates": float(np.abs(ip).max()),
        "support_radius": w.support_box(),
        "support_bound": 8 * np.pi / 3,
        "central_max": w.central_max(),
    }
