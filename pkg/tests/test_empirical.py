from __future__ import annotations

import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrdensity.arith import legendre, sieve_primes
from qrdensity.empirical import (
    character_density_oracle,
    empirical_density,
    in_pi_plus,
    in_pi_plus_even_subsets,
    is_allowable,
    largest_pi_plus_primes,
    pi_plus_mask,
    q_epsilon_count,
    write_prime_csv,
)
from qrdensity.errors import DomainError, ResourceLimitError
from qrdensity.tuples import StandardTuple, build_structure, kmax_direct, random_standard_tuple

REF = StandardTuple((1, 9), (2, 6), 2)
REF_ST = build_structure(REF)
REF_K = kmax_direct(REF_ST)


def test_is_allowable_examples():
    assert is_allowable(5, REF_ST)
    assert not is_allowable(3, REF_ST)
    with pytest.raises(DomainError):
        is_allowable(2, REF_ST)


def test_in_pi_plus_examples():
    assert in_pi_plus(11, REF_K, REF_ST)
    assert legendre(3, 11) == 1
    assert not in_pi_plus(5, REF_K, REF_ST)
    with pytest.raises(DomainError):
        in_pi_plus(3, REF_K, REF_ST)


def test_in_pi_plus_singletons_always():
    t = StandardTuple((0, 100), (2, 3), 3)
    st_ = build_structure(t)
    k = kmax_direct(st_)
    assert all(in_pi_plus(p, k, st_) for p in sieve_primes(500).odd().tolist() if is_allowable(p, st_))


def test_membership_two_definitions_agree():
    rng = random.Random(5)
    primes = sieve_primes(10**4).odd().tolist()
    for _ in range(40):
        t = random_standard_tuple(rng, m_max=4, s_max=4)
        st_ = build_structure(t)
        k = kmax_direct(st_)
        arr = np.array(primes, dtype=np.int64)
        allowable, plus = pi_plus_mask(arr, k, st_)
        for p, a, q in zip(primes, allowable.tolist(), plus.tolist()):
            assert a == is_allowable(p, st_)
            if a:
                assert q == in_pi_plus(p, k, st_) == in_pi_plus_even_subsets(p, k, st_)


def test_empirical_reference_million():
    rep = empirical_density(REF, 10**6)
    assert rep.theoretical_density == F(1, 2)
    assert rep.absolute_error < F(1, 100)
    assert rep.pi_plus_count <= rep.allowable_count <= rep.primes_considered
    assert rep.estimated_density == F(rep.pi_plus_count, rep.allowable_count)


def test_empirical_squares_exact():
    rep = empirical_density(StandardTuple((1, 2), (4, 9), 2), 10**4)
    assert rep.estimated_density == 1


def test_empirical_shared_label_million():
    rep = empirical_density(StandardTuple((2, 4), (1, 2), 2), 10**6)
    assert rep.absolute_error < F(1, 100)


def test_empirical_independent_of_chunking():
    a = empirical_density(REF, 50000, chunk=1000)
    b = empirical_density(REF, 50000, chunk=1 << 20)
    assert a == b


def test_empirical_stable_under_doubling():
    for t in (REF, StandardTuple((2, 4), (1, 2), 2)):
        a = empirical_density(t, 5 * 10**5).estimated_density
        b = empirical_density(t, 10**6).estimated_density
        assert abs(a - b) < F(1, 100)


def test_empirical_bound_check():
    with pytest.raises(DomainError):
        empirical_density(REF, 99)


def test_q_count_reference_prediction():
    rep = q_epsilon_count(1009, REF, 1)
    assert rep.b == 6 and rep.kappa == 3
    assert rep.predicted == F(1009, 48)


def test_q_count_small_prime_is_zero():
    assert q_epsilon_count(7, StandardTuple((10, 20), (1, 1), 2), 1).q_count == 0


def test_q_count_zero_outside_pi_plus():
    for p in sieve_primes(3000).odd().tolist():
        if not is_allowable(p, REF_ST) or in_pi_plus(p, REF_K, REF_ST):
            continue
        assert q_epsilon_count(p, REF, 1).q_count == 0
        assert q_epsilon_count(p, REF, -1).q_count == 0


def test_q_count_brute_force():
    t = StandardTuple((1, 2, 5), (2, 3, 2), 3)
    for p in (101, 103, 211):
        for eps in (1, -1):
            expected = 0
            n = 1
            while True:
                elems = {a + b * (n + i) for a, b in zip(t.a, t.b) for i in range(t.s)}
                if max(elems) > p - 1:
                    break
                expected += all(legendre(x, p) == eps for x in elems)
                n += 1
            assert q_epsilon_count(p, t, eps).q_count == expected


def test_q_count_domain_and_resource_errors(monkeypatch):
    with pytest.raises(DomainError):
        q_epsilon_count(9, REF, 1)
    with pytest.raises(DomainError):
        q_epsilon_count(11, REF, 0)
    monkeypatch.setenv("QRD_MEMORY_MB", "0.001")
    with pytest.raises(ResourceLimitError):
        q_epsilon_count(10007, REF, 1)


def test_q_count_ratio_near_million():
    for p in largest_pi_plus_primes(REF, 10**6, 5):
        rep = q_epsilon_count(p, REF, 1)
        assert rep.in_pi_plus
        assert 0.7 <= float(rep.ratio) <= 1.3


def test_character_oracle_examples():
    assert abs(character_density_oracle([(2, 1)], 10**6) - F(1, 2)) < F(1, 100)
    assert abs(character_density_oracle([(2, 1), (3, 1)], 10**6) - F(1, 4)) < F(1, 100)
    assert character_density_oracle([(1, 1)], 10**4) == 1
    with pytest.raises(DomainError):
        character_density_oracle([(2, 0)], 1000)


@given(st.integers(min_value=0, max_value=10**6))
def test_pi_plus_mask_counts_consistent(seed):
    t = random_standard_tuple(random.Random(seed), m_max=4)
    st_ = build_structure(t)
    allowable, plus = pi_plus_mask(sieve_primes(2000).odd(), kmax_direct(st_), st_)
    assert not (plus & ~allowable).any()


def test_csv_dump(tmp_path):
    path = tmp_path / "rows.csv"
    n = write_prime_csv(path, REF, 200)
    lines = path.read_text().splitlines()
    assert lines[0] == "p,allowable,in_pi_plus"
    assert len(lines) == n + 1
    assert lines[1] == "3,0,0" and lines[4] == "11,1,1"
