"""Separability: the intertwining constraint on polynomial filters and an
outer-product detector for sampled functions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .lattice import DilationPair
from .filters import intertwine_residual
from .trigpoly import TrigPoly2

SEPARABLE_TOL = 1e-10
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class SupportBox:
    """Minimal rectangle ``[L1, M1] x [L2, M2]`` holding the coefficients."""

    L1: int
    M1: int
    L2: int
    M2: int


def support_box(p: TrigPoly2) -> SupportBox:
    if p.is_zero():
        raise ValueError("zero polynomial has no support")
    (l1, l2), (m1, m2) = p.lo, p.hi
    return SupportBox(l1, m1, l2, m2)


def is_univariate(p: TrigPoly2, axis: int) -> bool:
    """True iff ``p`` depends on ``xi_axis`` alone (no shift in the other variable)."""
    box = support_box(p)
    if axis == 1:
        return box.L2 == box.M2 == 0
    if axis == 2:
        return box.L1 == box.M1 == 0
    raise ValueError("axis must be 1 or 2")


@dataclass
class IntertwiningVerdict:
    holds: bool  # the intertwining relation is satisfied
    residual: TrigPoly2
    conclusion_verified: Optional[bool]  # None when the relation fails

    @property
    def counterexample(self) -> bool:
        return self.holds and not self.conclusion_verified


def check_intertwining(a: TrigPoly2, b: TrigPoly2, alpha: int, beta: int, tol: float = RESIDUAL_TOL) -> IntertwiningVerdict:
    """Test ``a(xi_1, beta xi_2) b(xi) = a(xi) b(alpha xi_1, xi_2)`` and, when it
    holds, whether ``a`` is univariate in ``xi_1`` and ``b`` in ``xi_2``."""
    if a.is_zero() or b.is_zero():
        raise ValueError("polynomials must be nonzero")
    res = intertwine_residual(a, b, DilationPair(alpha, beta))
    holds = res.max_abs() <= tol
    concl = (is_univariate(a, 1) and is_univariate(b, 2)) if holds else None
    return IntertwiningVerdict(holds, res, concl)


# -- fuzzing ---------------------------------------------------------------


def _random_poly(rng: np.random.Generator, radius: int, kind: str) -> TrigPoly2:
    size = 2 * radius + 1
    while True:
        arr = np.zeros((size, size))
        if kind == "xi1":
            rows, cols = slice(None), slice(radius, radius + 1)
        elif kind == "xi2":
            rows, cols = slice(radius, radius + 1), slice(None)
        else:
            r0, r1 = np.sort(rng.integers(0, size, 2))
            c0, c1 = np.sort(rng.integers(0, size, 2))
            rows, cols = slice(r0, r1 + 1), slice(c0, c1 + 1)
        block = arr[rows, cols]
        vals = rng.integers(-3, 4, size=block.shape)
        vals[rng.random(block.shape) < 0.4] = 0
        arr[rows, cols] = vals
        if np.any(arr):
            return TrigPoly2.from_array(arr, (-radius, -radius))


_KINDS = ["xi1", "xi2", "any"]


def _fuzz_chunk(seed, trials: int, radius: int, pairs) -> dict:
    rng = np.random.default_rng(seed)
    out = {"trials": 0, "relation_holds": 0, "counterexamples": []}
    for _ in range(trials):
        alpha, beta = pairs[rng.integers(len(pairs))]
        ka, kb = rng.choice(_KINDS, 2)
        a = _random_poly(rng, radius, ka)
        b = _random_poly(rng, radius, kb)
        v = check_intertwining(a, b, alpha, beta)
        out["trials"] += 1
        if v.holds:
            out["relation_holds"] += 1
            if not v.conclusion_verified:
                out["counterexamples"].append((alpha, beta, a, b))
    return out


@dataclass
class FuzzReport:
    trials: int
    relation_holds: int
    counterexamples: List[tuple] = field(default_factory=list)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def as_dict(self) -> dict:
        return {
            "schema": 1,
            "trials": self.trials,
            "seed": self.seed,
            "relation_holds": self.relation_holds,
            "counterexamples": len(self.counterexamples),
            "passed": self.passed,
        }


def worker_count() -> int:
    env = os.environ.get("BIRANK_THREADS")
    cap = int(env) if env and env.isdigit() and int(env) > 0 else (os.cpu_count() or 1)
    return max(1, min(cap, 8))


def fuzz_intertwining(trials: int = 10_000, seed: int = 0, radius: int = 3, pairs=((2, 2), (2, 3), (3, 2), (3, 3)),
                 chunk: int = 500, workers: Optional[int] = None) -> FuzzReport:
    """Random integer-coefficient pairs supported in ``[-radius, radius]^2``.

    Supports mix univariate and rectangular shapes so that the relation holds
    for a good share of pairs. Chunks get independent child seeds, so the
    result does not depend on the number of workers.
    """
    sizes = [chunk] * (trials // chunk) + ([trials % chunk] if trials % chunk else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    workers = workers or worker_count()
    pairs = list(pairs)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda sz: _fuzz_chunk(sz[0], sz[1], radius, pairs), zip(seeds, sizes)))
    rep = FuzzReport(0, 0, seed=seed)
    for part in parts:
        rep.trials += part["trials"]
        rep.relation_holds += part["relation_holds"]
        rep.counterexamples.extend(part["counterexamples"])
    return rep


def dump_counterexamples(rep: FuzzReport, directory) -> List[str]:
    """Write each counterexample pair as two polynomial text files."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for n, (alpha, beta, a, b) in enumerate(rep.counterexamples):
        for name, p in (("a", a), ("b", b)):
            path = os.path.join(directory, f"pair{n:04d}_{alpha}x{beta}_{name}.txt")
            with open(path, "w") as fh:
                fh.write(p.to_text())
            paths.append(path)
    return paths


# -- outer-product detector ------------------------------------------------


def _unique_lines(X: np.ndarray, axis: int) -> np.ndarray:
    return np.unique(X, axis=axis)


def _subsample(X: np.ndarray, axis: int, cap: int) -> np.ndarray:
    n = X.shape[axis]
    if n <= cap:
        return X
    keep = set(np.linspace(0, n - 1, cap - 1).round().astype(int).tolist())
    # always keep the line holding the largest entry
    keep.add(int(np.unravel_index(np.abs(X).argmax(), X.shape)[axis]))
    return np.take(X, sorted(keep), axis=axis)


def nonseparability_score(samples, max_lines: int = 128, block: int = 2_000_000) -> float:
    """Largest ``|x_ik x_jl - x_il x_jk|`` divided by ``max |x|^2``.

    Zero exactly when the array is an outer product. Duplicate rows and
    columns cannot change the maximum, so they are removed first. When more
    than ``max_lines`` distinct rows (or columns) remain, an evenly spaced
    subset is searched, which gives a lower bound on the full maximum.
    """
    X = np.asarray(samples)
    if X.ndim != 2:
        raise ValueError("expected a 2-D array")
    top = np.abs(X).max() if X.size else 0.0
    if top == 0:
        return 0.0
    X = _unique_lines(_unique_lines(X / top, 0), 1)
    X = _subsample(_subsample(X, 0, max_lines), 1, max_lines)
    r, c = X.shape
    if r < 2 or c < 2:
        return 0.0
    best = 0.0
    per = max(1, block // (c * c))
    for i in range(r - 1):
        xi = X[i]
        for j0 in range(i + 1, r, per):
            Y = X[j0 : j0 + per]
            m = xi[None, :, None] * Y[:, None, :] - Y[:, :, None] * xi[None, None, :]
            best = max(best, float(np.abs(m).max()))
    return best


def separability_certificate(samples, tol: float = SEPARABLE_TOL) -> dict:
    score = nonseparability_score(samples)
    return {"separable": bool(score <= tol), "score": score}
