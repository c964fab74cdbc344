"""Discrete biscaled analysis and synthesis with a Haar family.

One level cuts an ``(alpha*M) x (beta*N)`` array into ``alpha x beta``
blocks, flattens each block in digit order and multiplies by the family
matrix, giving ``alpha*beta`` subbands of shape ``M x N``. The pyramid
recurses on the approximation band only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .latin import HaarFamily, haar_family


@dataclass
class SubbandLevel:
    """Detail bands of one level, each of shape ``(M, N)``."""

    detail_a: List[np.ndarray]
    detail_b: List[np.ndarray]
    wavelet: List[np.ndarray]

    @property
    def bands(self) -> List[np.ndarray]:
        return [*self.detail_a, *self.detail_b, *self.wavelet]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bands[0].shape


@dataclass
class SubbandTree:
    """Finest level first; ``approx`` is the coarsest approximation band."""

    alpha: int
    beta: int
    shape: Tuple[int, int]
    levels: List[SubbandLevel]
    approx: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def coefficient_count(self) -> int:
        return self.approx.size + sum(b.size for lv in self.levels for b in lv.bands)

    def energy(self) -> float:
        e = float(np.sum(self.approx**2))
        return e + sum(float(np.sum(b**2)) for lv in self.levels for b in lv.bands)

    def flatten(self) -> np.ndarray:
        """All coefficients as one vector: approximation, then coarsest to finest."""
        parts = [self.approx.reshape(-1)]
        for lv in reversed(self.levels):
            parts += [b.reshape(-1) for b in lv.bands]
        return np.concatenate(parts)

    @classmethod
    def unflatten(cls, vec, alpha: int, beta: int, shape, depth: int) -> "SubbandTree":
        vec = np.asarray(vec, dtype=float)
        shapes = level_shapes(shape, alpha, beta, depth)
        M, N = shapes[-1]
        pos = M * N
        approx = vec[:pos].reshape(M, N)
        levels = []
        na, nb = alpha - 1, beta - 1
        for M, N in reversed(shapes):
            k = alpha * beta - 1
            bands = [vec[pos + i * M * N : pos + (i + 1) * M * N].reshape(M, N) for i in range(k)]
            pos += k * M * N
            levels.append(SubbandLevel(bands[:na], bands[na : na + nb], bands[na + nb :]))
        if pos != vec.size:
            raise ValueError(f"coefficient vector has {vec.size} entries, expected {pos}")
        return cls(alpha, beta, tuple(shape), levels[::-1], approx)


def level_shapes(shape, alpha: int, beta: int, depth: int) -> List[Tuple[int, int]]:
    """Subband shape at each level, finest first; validates divisibility."""
    H, W = shape
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if H % alpha**depth or W % beta**depth:
        raise ValueError(
            f"shape {H}x{W} is not divisible by ({alpha}^{depth}, {beta}^{depth}) = "
            f"({alpha**depth}, {beta**depth})"
        )
    return [(H // alpha**k, W // beta**k) for k in range(1, depth + 1)]


def _forward_level(x: np.ndarray, M_fam: np.ndarray, alpha: int, beta: int) -> np.ndarray:
    H, W = x.shape
    M, N = H // alpha, W // beta
    blocks = x.reshape(M, alpha, N, beta).transpose(0, 2, 1, 3).reshape(M, N, alpha * beta)
    return np.moveaxis(blocks @ M_fam.T, -1, 0)  # (alpha*beta, M, N)


def _inverse_level(bands: np.ndarray, M_fam: np.ndarray, alpha: int, beta: int) -> np.ndarray:
    _, M, N = bands.shape
    blocks = np.moveaxis(bands, 0, -1) @ M_fam
    return blocks.reshape(M, N, alpha, beta).transpose(0, 2, 1, 3).reshape(M * alpha, N * beta)


def analyze(x, fam: HaarFamily, depth: int) -> SubbandTree:
    """Pyramid decomposition of ``x`` to ``depth`` levels."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2-D array")
    a, b = fam.alpha, fam.beta
    level_shapes(x.shape, a, b, depth)
    M_fam = fam.matrix
    na, nb = a - 1, b - 1
    levels = []
    cur = x
    for _ in range(depth):
        bands = _forward_level(cur, M_fam, a, b)
        levels.append(
            SubbandLevel(list(bands[1 : 1 + na]), list(bands[1 + na : 1 + na + nb]), list(bands[1 + na + nb :]))
        )
        cur = bands[0]
    return SubbandTree(a, b, x.shape, levels, cur)


def synthesize(tree: SubbandTree, fam: HaarFamily) -> np.ndarray:
    """Inverse of :func:`analyze`."""
    a, b = fam.alpha, fam.beta
    if (tree.alpha, tree.beta) != (a, b):
        raise ValueError(f"tree is for ({tree.alpha}, {tree.beta}), family is for ({a}, {b})")
    M_fam = fam.matrix
    cur = np.asarray(tree.approx, dtype=float)
    for lv in reversed(tree.levels):
        if lv.shape != cur.shape or len(lv.bands) != a * b - 1:
            raise ValueError(f"level shape {lv.shape} does not match approximation {cur.shape}")
        cur = _inverse_level(np.stack([cur, *lv.bands]), M_fam, a, b)
    return cur


def threshold(tree: SubbandTree, t: float) -> Tuple[SubbandTree, float]:
    """Zero detail coefficients with ``|c| <= t``; returns the new tree and
    the retained fraction of detail coefficients."""
    kept = total = 0
    levels = []
    for lv in tree.levels:
        new = []
        for band in lv.bands:
            mask = np.abs(band) > t
            kept += int(mask.sum())
            total += band.size
            new.append(np.where(mask, band, 0.0))
        na, nb = tree.alpha - 1, tree.beta - 1
        levels.append(SubbandLevel(new[:na], new[na : na + nb], new[na + nb :]))
    out = SubbandTree(tree.alpha, tree.beta, tree.shape, levels, tree.approx.copy(), dict(tree.meta))
    return out, (kept / total if total else 1.0)


class BiscaledHaarTransform(TransformerMixin, BaseEstimator):
    """Biscaled Haar pyramid as a scikit-learn transformer.

    Each sample is a flattened image of shape ``image_shape``; the output is
    the flattened coefficient vector (see :meth:`SubbandTree.flatten`).

    Parameters
    ----------
    alpha, beta : int
        Dilation factors along the first and second image axis.
    depth : int
        Number of pyramid levels.
    image_shape : tuple of int, optional
        Image height and width. If omitted, square images are assumed.
    pinned : bool
        Use the shipped triadic family when ``alpha == beta == 3``.
    """

    def __init__(self, alpha=3, beta=3, depth=1, image_shape=None, pinned=True):
        self.alpha = alpha
        self.beta = beta
        self.depth = depth
        self.image_shape = image_shape
        self.pinned = pinned

    def _resolve_shape(self, n_features):
        if self.image_shape is not None:
            H, W = (int(v) for v in self.image_shape)
            if H * W != n_features:
                raise ValueError(f"image_shape {H}x{W} does not match {n_features} features")
            return H, W
        s = int(round(np.sqrt(n_features)))
        if s * s != n_features:
            raise ValueError("image_shape is required for non-square images")
        return s, s

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.shape_ = self._resolve_shape(X.shape[1])
        self.family_ = haar_family(self.alpha, self.beta, pinned=self.pinned)
        level_shapes(self.shape_, self.alpha, self.beta, self.depth)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "family_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.array([analyze(row.reshape(self.shape_), self.family_, self.depth).flatten() for row in X])

    def inverse_transform(self, X):
        check_is_fitted(self, "family_")
        X = check_array(X, dtype=float)
        out = []
        for row in X:
            tree = SubbandTree.unflatten(row, self.alpha, self.beta, self.shape_, self.depth)
            out.append(synthesize(tree, self.family_).reshape(-1))
        return np.array(out)
