from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrdensity.arith import (
    factorize,
    is_prime,
    is_square,
    legendre,
    pi_odd,
    residue_table,
    sieve_primes,
    squarefree_part,
)
from qrdensity.errors import DomainError, ResourceLimitError


def trial_division_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_sieve_small():
    assert list(sieve_primes(10)) == [2, 3, 5, 7]
    assert list(sieve_primes(2)) == [2]


def test_sieve_count_million(primes_1e6):
    assert len(primes_1e6) == 78498


def test_sieve_matches_trial_division():
    assert list(sieve_primes(5000)) == trial_division_primes(5000)


def test_sieve_rejects_small_bound():
    with pytest.raises(DomainError):
        sieve_primes(1)


def test_prime_table_membership():
    tbl = sieve_primes(100)
    assert 97 in tbl and 91 not in tbl and "x" not in tbl
    assert list(tbl.odd())[:3] == [3, 5, 7]


@pytest.mark.parametrize("n,expected", [(12, 3), (1, 1), (18, 2), (36, 1), (30, 30)])
def test_squarefree_part(n, expected):
    assert squarefree_part(n) == expected


@pytest.mark.parametrize("z,expected", [(12, {3}), (36, set()), (30, {2, 3, 5})])
def test_pi_odd(z, expected):
    assert pi_odd(z) == frozenset(expected)


@pytest.mark.parametrize("bad", [0, -4])
def test_squarefree_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        squarefree_part(bad)


def test_squarefree_invariants_exhaustive():
    for n in range(1, 10**4 + 1):
        q = squarefree_part(n)
        assert n % q == 0 and is_square(n // q)
        assert all(e == 1 for _, e in factorize(q).pairs)
        assert pi_odd(n) == frozenset(factorize(q).primes)


@given(st.integers(min_value=1, max_value=10**12))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert f.value == n
    assert all(is_prime(p) for p in f.primes)


def test_is_prime_agrees_with_sieve():
    tbl = set(sieve_primes(20000))
    assert all(is_prime(n) == (n in tbl) for n in range(20001))
    assert is_prime(2**61 - 1) and not is_prime(2**61 + 1)


@pytest.mark.parametrize("z,p,expected", [(1, 3, 1), (1, 101, 1), (2, 7, 1), (3, 7, -1), (14, 7, 0)])
def test_legendre_examples(z, p, expected):
    assert legendre(z, p) == expected


@pytest.mark.parametrize("p", [2, 9, 1, -3])
def test_legendre_rejects_bad_modulus(p):
    with pytest.raises(DomainError):
        legendre(1, p)


def test_legendre_matches_squares_below_1000():
    for p in sieve_primes(1000).odd().tolist():
        squares = {x * x % p for x in range(1, p)}
        assert all(legendre(z, p) == (1 if z in squares else -1) for z in range(1, p))


def test_legendre_multiplicative():
    rng = random.Random(7)
    primes = sieve_primes(10**5).odd().tolist()
    for _ in range(1000):
        p = rng.choice(primes)
        x, y = rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6)
        assert legendre(x * y, p) == legendre(x, p) * legendre(y, p)


def test_residue_table_examples():
    assert residue_table(3)[1:].tolist() == [1, -1]
    t7 = residue_table(7)
    assert {z for z in range(1, 7) if t7[z] == 1} == {1, 2, 4}


@given(st.sampled_from(sieve_primes(3000).odd().tolist()))
def test_residue_table_half_residues(p):
    t = residue_table(p)
    assert int((t[1:] == 1).sum()) == (p - 1) // 2
    assert t[0] == 0


def test_residue_table_budget(monkeypatch):
    monkeypatch.setenv("QRD_MEMORY_MB", "0.001")
    with pytest.raises(ResourceLimitError):
        residue_table(10007)
    monkeypatch.setenv("QRD_MEMORY_MB", "1")
    assert isinstance(residue_table(10007), np.ndarray)
