"""Multi-index combinatorics and coefficient tensors.

Sums written over a multi-index of length k are sums over ordered k-tuples
of base indices.  Internally symmetric data is keyed by the sorted tuple;
``tuple_multiplicity`` converts between the two conventions.  Coefficient
tensors store exact ordered index strings, so objects without clean
symmetry (the split-like intermediate coefficients are antisymmetric in a
leading block but not symmetric across it) are representable as-is.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .symexpr import Scalar


def multi_indices(n: int, k: int):
    """All sorted k-tuples over {1..n}; there are C(n+k-1, k) of them."""
    return list(itertools.combinations_with_replacement(range(1, n + 1), k))


def ordered_tuples(n: int, k: int):
    return itertools.product(range(1, n + 1), repeat=k)


def tuple_multiplicity(J) -> int:
    """Number of ordered tuples that sort to J."""
    count = math.factorial(len(J))
    for i in set(J):
        count //= math.factorial(tuple(J).count(i))
    return count


def sort_with_sign(block):
    """Sort an index block, tracking the permutation sign.

    Returns (sorted tuple, sign); sign is 0 when an index repeats.
    """
    block = list(block)
    sign = 1
    for i in range(1, len(block)):
        j = i
        while j > 0 and block[j - 1] > block[j]:
            block[j - 1], block[j] = block[j], block[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(block)):
        if block[i - 1] == block[i]:
            return tuple(block), 0
    return tuple(block), sign


def perm_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@dataclass
class CoefficientTensor:
    """A family of scalar coefficients keyed by (index string, sigma).

    ``rank`` is the common length of the index strings.  Lookup is exact;
    symmetrize/antisymmetrize build new tensors over the same key space.
    """

    n: int
    m: int
    rank: int
    data: dict = field(default_factory=dict)

    def get(self, idx, sigma: int) -> Scalar:
        return self.data.get((tuple(idx), sigma), Scalar.zero())

    def set(self, idx, sigma: int, value: Scalar) -> None:
        idx = tuple(idx)
        if len(idx) != self.rank:
            raise ValueError(f"index string {idx} has length != rank {self.rank}")
        if value.is_zero():
            self.data.pop((idx, sigma), None)
        else:
            self.data[(idx, sigma)] = value

    def add(self, idx, sigma: int, value: Scalar) -> None:
        self.set(idx, sigma, self.get(idx, sigma) + value)

    def map_entries(self, fn) -> "CoefficientTensor":
        out = CoefficientTensor(self.n, self.m, self.rank)
        for (idx, sigma), v in self.data.items():
            out.set(idx, sigma, fn(v))
        return out

    def __add__(self, other: "CoefficientTensor") -> "CoefficientTensor":
        out = CoefficientTensor(self.n, self.m, self.rank, dict(self.data))
        for (idx, sigma), v in other.data.items():
            out.add(idx, sigma, v)
        return out

    def __sub__(self, other: "CoefficientTensor") -> "CoefficientTensor":
        return self + other.map_entries(lambda v: -v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientTensor):
            return NotImplemented
        keys = set(self.data) | set(other.data)
        return all(self.get(idx, s) == other.get(idx, s) for idx, s in keys)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.data.values())


def _permuted(idx: tuple, positions, perm) -> tuple:
    out = list(idx)
    vals = [idx[p] for p in positions]
    for slot, p in enumerate(positions):
        out[p] = vals[perm[slot]]
    return tuple(out)


def _weighted_perm_sum(T: CoefficientTensor, positions, signed: bool) -> CoefficientTensor:
    positions = tuple(positions)
    weight = Scalar.from_fraction(Fraction(1, math.factorial(len(positions))))
    out = CoefficientTensor(T.n, T.m, T.rank)
    for (idx, sigma), v in T.data.items():
        for perm in itertools.permutations(range(len(positions))):
            factor = perm_sign(perm) if signed else 1
            out.add(_permuted(idx, positions, perm), sigma, weight * factor * v)
    return out


def antisymmetrize(T: CoefficientTensor, positions) -> CoefficientTensor:
    """Normalized antisymmetrizer: 1/k! times the signed permutation sum."""
    return _weighted_perm_sum(T, positions, signed=True)


def symmetrize(T: CoefficientTensor, positions) -> CoefficientTensor:
    """Normalized symmetrizer: 1/k! times the permutation sum."""
    return _weighted_perm_sum(T, positions, signed=False)
