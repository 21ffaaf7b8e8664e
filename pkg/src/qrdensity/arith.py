"""Integer primitives: sieve, factorization, square-free parts, Legendre symbols."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import DomainError, ResourceLimitError

# default residue-table budget: 16 MiB of int8, i.e. p < 2**24
DEFAULT_MEMORY_MB = 16


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``bound``, ascending."""

    bound: int
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.primes.size)

    def __iter__(self) -> Iterator[int]:
        return (int(p) for p in self.primes)

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, (int, np.integer)):
            return False
        i = int(np.searchsorted(self.primes, n))
        return i < self.primes.size and int(self.primes[i]) == n

    def odd(self) -> np.ndarray:
        return self.primes[self.primes > 2]


def sieve_primes(bound: int) -> PrimeTable:
    if bound < 2:
        raise DomainError(f"sieve bound must be >= 2, got {bound}")
    mask = _kernels.sieve_mask(bound)
    return PrimeTable(bound=int(bound), primes=np.flatnonzero(mask).astype(np.int64))


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in sieve_primes(1 << 16).primes)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``n = prod(p**e)`` with primes strictly increasing."""

    n: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)


def factorize(n: int) -> Factorization:
    """Trial division against a cached prime table, then odd candidates past it."""
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    pairs = []
    rest = int(n)
    for p in _small_primes():
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            pairs.append((p, e))
    else:
        p = _small_primes()[-1] + 2
        while p * p <= rest:
            if rest % p == 0:
                e = 0
                while rest % p == 0:
                    rest //= p
                    e += 1
                pairs.append((p, e))
            p += 2
    if rest > 1:
        pairs.append((rest, 1))
    return Factorization(n=int(n), pairs=tuple(pairs))


def squarefree_part(n: int) -> int:
    """Product of the primes dividing ``n`` to odd multiplicity."""
    if n < 1:
        raise DomainError(f"squarefree_part needs n >= 1, got {n}")
    out = 1
    for p, e in factorize(n).pairs:
        if e & 1:
            out *= p
    return out


def pi_odd(z: int) -> frozenset[int]:
    """Primes dividing ``z`` to odd multiplicity; empty iff ``z`` is a square."""
    if z < 1:
        raise DomainError(f"pi_odd needs z >= 1, got {z}")
    return frozenset(p for p, e in factorize(z).pairs if e & 1)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise DomainError(f"modulus must be an odd prime, got {p}")


def legendre(z: int, p: int) -> int:
    """Legendre symbol ``(z/p)`` by Euler's criterion."""
    _check_odd_prime(p)
    r = pow(z % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def memory_budget_bytes() -> int:
    raw = os.environ.get("QRD_MEMORY_MB")
    mb = float(raw) if raw else DEFAULT_MEMORY_MB
    return int(mb * (1 << 20))


def residue_table(p: int) -> np.ndarray:
    """``table[z] = legendre(z, p)`` for ``z`` in ``[0, p)``, as int8.

    Built by squaring ``1 .. (p-1)/2``. Raises ResourceLimitError when the
    table would exceed ``QRD_MEMORY_MB``.
    """
    _check_odd_prime(p)
    if p > memory_budget_bytes():
        raise ResourceLimitError(
            f"residue table for p={p} needs {p} bytes, budget is {memory_budget_bytes()} "
            "(raise QRD_MEMORY_MB)"
        )
    return _kernels.residue_table(p)
