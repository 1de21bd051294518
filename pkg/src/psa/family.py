"""Compositions of ``p`` and the refinement order on PSA types.

A type ``gamma = (gamma_1, ..., gamma_d)`` lists the multiplicities of the
distinct covariance eigenvalues, largest eigenvalue first. Types of dimension
``p`` are in bijection with subsets of the ``p - 1`` gaps between consecutive
eigenvalue indices, which is how they are enumerated here.
"""

from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from .errors import DataError, SelectionError

MAX_ENUMERATION_P = 25


@dataclass(frozen=True, order=True)
class Composition:
    """An ordered tuple of positive integers.

    Sorting compares the parts lexicographically. ``str`` gives the
    comma-joined form used in reports, e.g. ``"2,3"``.
    """

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(k) for k in self.parts)
        if not parts:
            raise DataError("a composition needs at least one part")
        if any(k < 1 for k in parts):
            raise DataError(f"composition parts must be positive, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text):
        """Build from ``"2,3"`` style text."""
        try:
            return cls(tuple(int(tok) for tok in str(text).split(",")))
        except ValueError as exc:
            raise DataError(f"cannot parse composition {text!r}: {exc}") from None

    @classmethod
    def full(cls, p):
        """The type ``(1, ..., 1)``: all eigenvalues distinct."""
        return cls((1,) * p)

    @classmethod
    def isotropic(cls, p):
        """The type ``(p,)``: one repeated eigenvalue."""
        return cls((p,))

    @classmethod
    def ppca(cls, p, q):
        """Probabilistic PCA with ``q`` principal directions, ``(1, ..., 1, p - q)``."""
        if not 0 <= q < p:
            raise DataError(f"need 0 <= q < p, got q={q}, p={p}")
        return cls((1,) * q + (p - q,))

    @classmethod
    def ippca(cls, p, q):
        """Isotropic PPCA, ``(q, p - q)``."""
        if not 0 < q < p:
            raise DataError(f"need 0 < q < p, got q={q}, p={p}")
        return cls((q, p - q))

    @property
    def p(self):
        return sum(self.parts)

    @property
    def d(self):
        return len(self.parts)

    @property
    def cuts(self):
        """Cut-point bitmask: bit ``i`` set when a block ends after index ``i + 1``."""
        mask, pos = 0, 0
        for k in self.parts[:-1]:
            pos += k
            mask |= 1 << (pos - 1)
        return mask

    @property
    def bounds(self):
        """Start offsets of each block, followed by ``p``."""
        return np.concatenate([[0], np.cumsum(self.parts)]).astype(int)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, k):
        return self.parts[k]

    def __str__(self):
        return ",".join(str(k) for k in self.parts)


def as_composition(gamma):
    if isinstance(gamma, Composition):
        return gamma
    if isinstance(gamma, str):
        return Composition.parse(gamma)
    return Composition(tuple(gamma))


def from_cuts(p, mask):
    """Inverse of :attr:`Composition.cuts`."""
    parts, run = [], 1
    for i in range(p - 1):
        if mask >> i & 1:
            parts.append(run)
            run = 1
        else:
            run += 1
    parts.append(run)
    return Composition(tuple(parts))


def phi(gamma):
    """Map each eigenvalue index to its block index.

    Indices are 1-based on both sides, so ``phi((2, 3))`` is
    ``array([1, 1, 2, 2, 2])``.
    """
    gamma = as_composition(gamma)
    return np.repeat(np.arange(1, gamma.d + 1), gamma.parts)


def is_refinement(coarse, fine):
    """True when ``fine`` splits each block of ``coarse`` into consecutive sub-blocks."""
    coarse, fine = as_composition(coarse), as_composition(fine)
    if coarse.p != fine.p:
        raise DataError(f"compositions of different integers: {coarse.p} vs {fine.p}")
    return coarse.cuts & ~fine.cuts == 0


def block_average(eigenvalues, gamma):
    """Replace each block of eigenvalues by its arithmetic mean."""
    gamma = as_composition(gamma)
    ell = np.asarray(eigenvalues, dtype=float)
    if ell.ndim != 1 or ell.shape[0] != gamma.p:
        raise DataError(f"need {gamma.p} eigenvalues for type {gamma}, got shape {ell.shape}")
    if np.any(np.diff(ell) > 0):
        raise DataError("eigenvalues must be sorted in non-increasing order")
    b = gamma.bounds
    return np.array([ell[b[k] : b[k + 1]].mean() for k in range(gamma.d)])


def _check_enumerable(p):
    if not 1 <= p <= MAX_ENUMERATION_P:
        raise SelectionError(
            f"exhaustive enumeration is limited to 1 <= p <= {MAX_ENUMERATION_P} "
            f"(p={p} gives 2^{p - 1} types); use the hierarchical, threshold "
            "or fixed-d strategy instead"
        )


def enumerate_types(p):
    """All ``2^(p-1)`` compositions of ``p``, ordered by cut-point bitmask."""
    _check_enumerable(p)
    return [from_cuts(p, mask) for mask in range(1 << (p - 1))]


def types_of_length(p, d):
    """Compositions of ``p`` with exactly ``d`` parts, lexicographic in their cut positions."""
    if not 1 <= d <= p:
        raise DataError(f"need 1 <= d <= p, got d={d}, p={p}")
    out = []
    for cut in combinations(range(1, p), d - 1):
        edges = (0,) + cut + (p,)
        out.append(Composition(tuple(b - a for a, b in zip(edges, edges[1:]))))
    return out


def count_types_of_length(p, d):
    return math.comb(p - 1, d - 1)


def splits(gamma):
    """Compositions covering ``gamma``: one block split into two."""
    gamma = as_composition(gamma)
    out = []
    for k, size in enumerate(gamma.parts):
        for a in range(1, size):
            out.append(Composition(gamma.parts[:k] + (a, size - a) + gamma.parts[k + 1 :]))
    return out


def hasse_edges(p):
    """Covering pairs ``(coarse, fine)`` of the refinement order on types of ``p``."""
    return [(g, f) for g in enumerate_types(p) for f in splits(g)]
