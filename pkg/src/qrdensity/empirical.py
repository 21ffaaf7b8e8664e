"""Brute-force verification by sieving primes and evaluating Legendre symbols."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import prod
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .arith import is_prime, legendre, residue_table, sieve_primes
from .errors import DomainError
from .tuples import KMaxFamily, StandardTuple, TupleStructure, build_structure, kmax_direct

DEFAULT_CHUNK = 1 << 16
MIN_BOUND = 100


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise DomainError(f"p must be an odd prime, got {p}")


def is_allowable(p: int, st: TupleStructure) -> bool:
    _check_odd_prime(p)
    return all(b % p for b in st.B)


def in_pi_plus(p: int, kmax: KMaxFamily, st: TupleStructure) -> bool:
    """chi_p(b_i) is constant on every K of K_max."""
    if not is_allowable(p, st):
        raise DomainError(f"p={p} divides an element of B={st.B}")
    chi = {i: legendre(st.b_of(i), p) for i in st.indices}
    return all(len({chi[i] for i in K}) == 1 for K in kmax.members)


def in_pi_plus_even_subsets(p: int, kmax: KMaxFamily, st: TupleStructure, max_k: int = 12) -> bool:
    """The signature definition: chi_p of every even-size product inside a K is 1."""
    if not is_allowable(p, st):
        raise DomainError(f"p={p} divides an element of B={st.B}")
    for K in kmax.members:
        idx = sorted(K)
        if len(idx) > max_k:
            raise DomainError(f"|K| = {len(idx)} too large for subset enumeration")
        for r in range(2, len(idx) + 1, 2):
            for I in combinations(idx, r):
                if legendre(prod(st.b_of(i) for i in I), p) != 1:
                    return False
    return True


def _chi_matrix(st: TupleStructure, primes: np.ndarray) -> np.ndarray:
    """``(k, len(primes))`` int8 array of chi_p(b_i)."""
    return np.stack([_kernels.legendre_prime(b, primes) for b in st.B])


def pi_plus_mask(primes: np.ndarray, kmax: KMaxFamily, st: TupleStructure) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks (allowable, in Pi_+) over an array of odd primes."""
    chi = _chi_matrix(st, primes)
    allowable = (chi != 0).all(axis=0)
    plus = allowable.copy()
    for K in kmax.members:
        idx = [i - 1 for i in sorted(K)]
        ref = chi[idx[0]]
        for j in idx[1:]:
            plus &= chi[j] == ref
    return allowable, plus


@dataclass(frozen=True)
class EmpiricalReport:
    prime_bound: int
    primes_considered: int
    allowable_count: int
    pi_plus_count: int
    theoretical_density: Fraction

    @property
    def pi_minus_count(self) -> int:
        return self.allowable_count - self.pi_plus_count

    @property
    def estimated_density(self) -> Fraction:
        return Fraction(self.pi_plus_count, self.allowable_count) if self.allowable_count else Fraction(0)

    @property
    def absolute_error(self) -> Fraction:
        return abs(self.estimated_density - self.theoretical_density)

    def to_dict(self) -> dict:
        return {
            "prime_bound": self.prime_bound,
            "primes_considered": self.primes_considered,
            "allowable_count": self.allowable_count,
            "pi_plus_count": self.pi_plus_count,
            "pi_minus_count": self.pi_minus_count,
            "estimated_density": str(self.estimated_density),
            "estimated_density_float": float(self.estimated_density),
            "theoretical_density": str(self.theoretical_density),
            "absolute_error": float(self.absolute_error),
        }


def _odd_primes(bound: int) -> np.ndarray:
    if bound < MIN_BOUND:
        raise DomainError(f"bound must be >= {MIN_BOUND}, got {bound}")
    return sieve_primes(bound).odd()


def empirical_density(
    t: StandardTuple,
    bound: int,
    theoretical: Fraction | None = None,
    chunk: int = DEFAULT_CHUNK,
) -> EmpiricalReport:
    """Count allowable and Pi_+ primes among the odd primes <= bound, chunk by chunk."""
    st = build_structure(t)
    kmax = kmax_direct(st)
    if theoretical is None:
        from .density import analyze

        theoretical = analyze(t).density_plus
    primes = _odd_primes(bound)
    allowable = plus = 0
    for lo in range(0, primes.size, chunk):
        a, p = pi_plus_mask(primes[lo : lo + chunk], kmax, st)
        allowable += int(a.sum())
        plus += int(p.sum())
    return EmpiricalReport(bound, int(primes.size), allowable, plus, theoretical)


def write_prime_csv(path, t: StandardTuple, bound: int) -> int:
    """One row per odd prime: p, allowable, in_pi_plus. Returns the row count."""
    st = build_structure(t)
    kmax = kmax_direct(st)
    primes = _odd_primes(bound)
    allowable, plus = pi_plus_mask(primes, kmax, st)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "allowable", "in_pi_plus"])
        for p, a, q in zip(primes.tolist(), allowable.tolist(), plus.tolist()):
            w.writerow([p, int(a), int(q)])
    return int(primes.size)


@dataclass(frozen=True)
class QCountReport:
    p: int
    epsilon: int
    q_count: int
    b: int
    kappa: int
    allowable: bool
    in_pi_plus: bool

    @property
    def predicted(self) -> Fraction:
        return Fraction(self.p, self.b * 2**self.kappa)

    @property
    def ratio(self) -> Fraction:
        return self.q_count / self.predicted

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "epsilon": self.epsilon,
            "q_count": self.q_count,
            "b": self.b,
            "kappa": self.kappa,
            "predicted": str(self.predicted),
            "ratio": float(self.ratio),
            "allowable": self.allowable,
            "in_pi_plus": self.in_pi_plus,
        }


def q_epsilon_count(p: int, t: StandardTuple, epsilon: int) -> QCountReport:
    """Number of n whose window union lies in [1, p-1] with every element of character ``epsilon``."""
    _check_odd_prime(p)
    if epsilon not in (1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon}")
    st = build_structure(t)
    kmax = kmax_direct(st)
    table = residue_table(p)
    s = t.s
    # largest n with a_j + b_j (n + s - 1) <= p - 1 for every j
    nmax = min((p - 1 - a) // b - (s - 1) for a, b in zip(t.a, t.b))
    count = _kernels.count_windows(table, t.a, t.b, s, nmax, epsilon)
    allowable = all(b % p for b in st.B)
    plus = allowable and in_pi_plus(p, kmax, st)
    return QCountReport(p, epsilon, count, max(st.B), len(st.S_all), allowable, plus)


def character_density_oracle(constraints: Sequence[tuple[int, int]], bound: int) -> Fraction:
    """Frequency of primes p <= bound, p dividing no z, with chi_p(z) = sign for every constraint."""
    for z, sign in constraints:
        if z < 1 or sign not in (1, -1):
            raise DomainError(f"bad constraint ({z}, {sign})")
    primes = _odd_primes(bound)
    ok = np.ones(primes.size, dtype=np.bool_)
    allowed = np.ones(primes.size, dtype=np.bool_)
    for z, sign in constraints:
        chi = _kernels.legendre_prime(z, primes)
        allowed &= chi != 0
        ok &= chi == sign
    n = int(allowed.sum())
    return Fraction(int((ok & allowed).sum()), n) if n else Fraction(0)


def largest_pi_plus_primes(t: StandardTuple, bound: int, count: int) -> list[int]:
    st = build_structure(t)
    kmax = kmax_direct(st)
    primes = _odd_primes(bound)
    _, plus = pi_plus_mask(primes, kmax, st)
    return [int(p) for p in primes[plus][-count:]]


def primes_in(bound: int) -> Iterable[int]:
    return (int(p) for p in _odd_primes(bound))
