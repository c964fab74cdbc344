"""Dilation pairs, digit sets, cosets and frequency grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class DilationPair:
    """The commuting pair ``A = diag(alpha, 1)``, ``B = diag(1, beta)``."""

    alpha: int
    beta: int

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {v!r}")

    @property
    def A(self) -> np.ndarray:
        return np.diag([self.alpha, 1])

    @property
    def B(self) -> np.ndarray:
        return np.diag([1, self.beta])

    def T(self, m: int, n: int) -> np.ndarray:
        """Matrix of ``A**m B**n``."""
        return np.diag([self.alpha**m, self.beta**n])

    def det(self, m: int, n: int) -> int:
        return self.alpha**m * self.beta**n


_LABELS = {(1, 0): "A", (0, 1): "B", (1, 1): "AB"}


@dataclass(frozen=True)
class DigitSet:
    """Coset representatives of ``T Z^2`` for ``T = A**m B**n``, ``d_0 = 0``."""

    pair: DilationPair
    exponents: Tuple[int, int]
    digits: Tuple[Tuple[int, int], ...] = field(repr=False)

    @property
    def dilation(self) -> str:
        return _LABELS.get(self.exponents, f"A^{self.exponents[0]}B^{self.exponents[1]}")

    @property
    def moduli(self) -> Tuple[int, int]:
        m, n = self.exponents
        return self.pair.alpha**m, self.pair.beta**n

    @property
    def t(self) -> int:
        return len(self.digits)

    @property
    def T(self) -> np.ndarray:
        return self.pair.T(*self.exponents)

    def as_array(self) -> np.ndarray:
        return np.array(self.digits, dtype=np.int64).reshape(-1, 2)

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    def index(self, k) -> int:
        """Position of the coset containing the integer pair ``k``."""
        p1, p2 = self.moduli
        return int(k[0] % p1) * p2 + int(k[1] % p2)

    def translation_shifts(self) -> np.ndarray:
        """The frequency shifts ``2*pi*T^{-1} d_i`` as a ``(t, 2)`` array."""
        p1, p2 = self.moduli
        d = self.as_array().astype(float)
        return 2 * np.pi * d / np.array([p1, p2], dtype=float)


def digits_for(pair: DilationPair, m: int, n: int) -> DigitSet:
    """Lexicographic digit set ``{0..alpha^m-1} x {0..beta^n-1}`` for ``A^m B^n``."""
    if m < 0 or n < 0:
        raise ValueError("exponents must be nonnegative")
    if m == 0 and n == 0:
        raise ValueError("identity dilation has a single trivial coset")
    p1, p2 = pair.alpha**m, pair.beta**n
    digits = tuple((i, j) for i in range(p1) for j in range(p2))
    return DigitSet(pair, (m, n), digits)


def coset_index(pair: DilationPair, exponents: Tuple[int, int], k) -> int:
    """Index ``i`` with ``k`` in ``d_i + T Z^2``."""
    m, n = exponents
    p2 = pair.beta**n
    return int(k[0] % pair.alpha**m) * p2 + int(k[1] % p2)


@dataclass(frozen=True)
class FreqGrid:
    """Cell midpoints of the uniform ``n x n`` partition of ``[-L, L]^2``.

    Node ``i`` along an axis sits at ``q_i * L / n`` with the odd integer
    ``q_i = 2 i + 1 - n``; code that needs exact breakpoint arithmetic works
    with ``q`` rather than the float coordinate.
    """

    n: int = 256
    half_extent: float = 4 * np.pi / 3

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def h(self) -> float:
        return 2 * self.half_extent / self.n

    @cached_property
    def q(self) -> np.ndarray:
        return 2 * np.arange(self.n, dtype=np.int64) + 1 - self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.q * (self.half_extent / self.n)

    def mesh(self):
        """``(xi1, xi2)`` arrays of shape ``(n, n)``; axis 0 is ``xi1``."""
        return np.meshgrid(self.nodes, self.nodes, indexing="ij")

    @property
    def cell_area(self) -> float:
        return self.h**2
