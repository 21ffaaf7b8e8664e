"""Linear algebra over GF(2) on vectors indexed by a finite set of primes.

Vectors are Python int bitmasks: bit ``i`` is the ``i``-th smallest prime of
the universe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .arith import is_prime
from .errors import DomainError, SizeLimitError

MAX_FAMILY = 20
MAX_BRUTE_UNIVERSE = 24

PrimeSet = frozenset


@dataclass(frozen=True)
class PrimeUniverse:
    elements: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        els = tuple(int(p) for p in self.elements)
        if any(x >= y for x, y in zip(els, els[1:])):
            raise DomainError(f"universe must be strictly ascending: {els}")
        if any(not is_prime(p) for p in els):
            raise DomainError(f"universe must contain only primes: {els}")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(els)})

    @classmethod
    def of(cls, *primesets: Iterable[int]) -> "PrimeUniverse":
        return cls(tuple(sorted(set().union(*map(set, primesets)))))

    @property
    def n(self) -> int:
        return len(self.elements)

    def position(self, p: int) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise DomainError(f"prime {p} is not in the universe {self.elements}") from None

    def mask(self, primeset: Iterable[int]) -> int:
        out = 0
        for p in primeset:
            out |= 1 << self.position(p)
        return out


@dataclass(frozen=True)
class Gf2Vector:
    universe: PrimeUniverse
    mask: int

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i in range(self.universe.n) if self.mask >> i & 1)

    def is_zero(self) -> bool:
        return self.mask == 0

    def __xor__(self, other: "Gf2Vector") -> "Gf2Vector":
        if other.universe != self.universe:
            raise DomainError("vectors live in different universes")
        return Gf2Vector(self.universe, self.mask ^ other.mask)

    __add__ = __xor__


def vector_of(primeset: Iterable[int], universe: PrimeUniverse) -> Gf2Vector:
    return Gf2Vector(universe, universe.mask(primeset))


def mask_rank(masks: Iterable[int]) -> int:
    """Rank of int bitmasks via an XOR basis keyed by leading bit."""
    basis: dict[int, int] = {}
    for m in masks:
        while m:
            top = m.bit_length() - 1
            if top not in basis:
                basis[top] = m
                break
            m ^= basis[top]
    return len(basis)


def in_span(target: int, masks: Iterable[int]) -> bool:
    basis: dict[int, int] = {}
    for m in masks:
        while m:
            top = m.bit_length() - 1
            if top not in basis:
                basis[top] = m
                break
            m ^= basis[top]
    while target:
        top = target.bit_length() - 1
        if top not in basis:
            return False
        target ^= basis[top]
    return True


def _same_universe(vectors: Sequence[Gf2Vector]) -> None:
    if vectors and any(v.universe != vectors[0].universe for v in vectors):
        raise DomainError("vectors live in different universes")


def rank(vectors: Iterable[Gf2Vector]) -> int:
    vectors = list(vectors)
    _same_universe(vectors)
    return mask_rank(v.mask for v in vectors)


def is_independent_set(vectors: Iterable[Gf2Vector]) -> bool:
    """True iff the vectors are distinct, nonzero and linearly independent."""
    vectors = list(vectors)
    _same_universe(vectors)
    masks = [v.mask for v in vectors]
    if any(m == 0 for m in masks) or len(set(masks)) != len(masks):
        return False
    return mask_rank(masks) == len(masks)


def subset_tables(masks: Sequence[int], flags: Sequence[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """XOR, size parity and flag parity of every subset, indexed by subset bitmask."""
    xor = np.zeros(1, dtype=object if max(masks, default=0) >> 62 else np.int64)
    size = np.zeros(1, dtype=np.int8)
    flag = np.zeros(1, dtype=np.int8)
    for m, f in zip(masks, flags):
        xor = np.concatenate([xor, xor ^ m])
        size = np.concatenate([size, size ^ 1])
        flag = np.concatenate([flag, flag ^ f])
    return xor, size, flag


def symdiff_criterion(odd_family: Iterable[Iterable[int]], even_family: Iterable[Iterable[int]]) -> bool:
    """Decide whether some ``N`` meets every parity constraint, by symmetric differences.

    ``N`` must meet each set of ``odd_family`` in an odd number of points and
    each set of ``even_family`` in an even number. A solution exists iff for
    every odd-sized subfamily ``U`` of ``odd ∪ even ∪ {∅}`` either ``U`` holds
    an odd number of members from ``even ∪ {∅}`` or the repeated symmetric
    difference of ``U`` is nonempty. All such ``U`` are enumerated.
    """
    odd = {frozenset(x) for x in odd_family}
    even = {frozenset(x) for x in even_family}
    if frozenset() in odd:
        raise DomainError("the empty set cannot be required to meet N oddly")
    if odd & even:
        raise DomainError("odd and even families must be disjoint")
    members = sorted(odd | even | {frozenset()}, key=sorted)
    if len(members) > MAX_FAMILY + 1:
        raise SizeLimitError(f"family of {len(members) - 1} sets exceeds cap {MAX_FAMILY}")
    universe = PrimeUniverse.of(*members)
    masks = [universe.mask(x) for x in members]
    flags = [0 if x in odd else 1 for x in members]
    xor, size, flag = subset_tables(masks, flags)
    bad = (size == 1) & (flag == 0) & (xor == 0)
    return not bool(bad.any())


def solvable(odd_family: Iterable[Iterable[int]], even_family: Iterable[Iterable[int]]) -> bool:
    """Same question as symdiff_criterion, answered by Gaussian elimination.

    Each constraint is an affine equation ``<v(S), N> = parity``; the system is
    consistent iff the augmented vector ``(0, 1)`` is not in the row span.
    Overlapping families or ``∅`` in the odd family simply give False.
    """
    odd = {frozenset(x) for x in odd_family}
    even = {frozenset(x) for x in even_family}
    if odd & even or frozenset() in odd:
        return False
    universe = PrimeUniverse.of(*(odd | even))
    rows = [universe.mask(x) << 1 | 1 for x in odd] + [universe.mask(x) << 1 for x in even]
    return not in_span(1, rows)


def solution_count(
    odd_family: Iterable[Iterable[int]],
    even_family: Iterable[Iterable[int]],
    universe: PrimeUniverse,
    method: str = "auto",
) -> int:
    """Number of ``N ⊆ universe`` meeting the parity constraints.

    ``method="brute"`` enumerates all ``2**n`` candidates (n <= 24);
    ``method="dichotomy"`` returns 0 or ``2**(n-d)`` with the choice made by
    symdiff_criterion; ``"auto"`` picks brute force when it is allowed.
    """
    odd = [frozenset(x) for x in odd_family]
    even = [frozenset(x) for x in even_family]
    n = universe.n
    if method == "auto":
        method = "brute" if n <= MAX_BRUTE_UNIVERSE else "dichotomy"
    if method == "brute":
        if n > MAX_BRUTE_UNIVERSE:
            raise SizeLimitError(f"brute force over 2**{n} sets exceeds cap 2**{MAX_BRUTE_UNIVERSE}")
        return _kernels.parity_count(
            [universe.mask(x) for x in odd], [universe.mask(x) for x in even], n
        )
    if method != "dichotomy":
        raise DomainError(f"unknown method {method!r}")
    if set(odd) & set(even) or frozenset() in odd:
        return 0
    if not symdiff_criterion(odd, even):
        return 0
    d = mask_rank(universe.mask(x) for x in set(odd) | set(even))
    return 1 << (n - d)
