from __future__ import annotations

import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrdensity.arith import pi_odd
from qrdensity.errors import DomainError, InvalidTupleError
from qrdensity.tuples import (
    StandardTuple,
    build_structure,
    gaps_for_quotient_spec,
    generate_lemma38,
    generate_prime_mode,
    generator_from_mapping,
    is_admissible,
    kmax_direct,
    lemma38_identity_holds,
    membership_pattern,
    random_corpus,
    random_standard_tuple,
)

REF = StandardTuple((1, 9), (2, 6), 2)


def test_structure_reference():
    st_ = build_structure(REF)
    assert st_.B == (2, 6)
    assert st_.Q == (frozenset({F(1, 2)}), frozenset({F(3, 2)}))
    assert st_.S == (frozenset({F(1, 2), F(3, 2)}), frozenset({F(3, 2), F(5, 2)}))
    assert st_.sigma == (2, 6)


def test_structure_shared_label():
    st_ = build_structure(StandardTuple((2, 4), (1, 2), 2))
    assert st_.Q == (frozenset({2}), frozenset({2}))
    assert st_.S_of(1) == st_.S_of(2) == frozenset({2, 3})
    assert st_.sigma == (1, 2)


def test_structure_squares():
    assert build_structure(StandardTuple((0, 0), (4, 9), 3)).sigma == (1, 1)


def test_structure_groups_repeated_b_in_first_occurrence_order():
    st_ = build_structure(StandardTuple((5, 1, 3), (6, 2, 6), 2))
    assert st_.B == (6, 2)
    assert st_.A == ((3, 5), (1,))


def test_kmax_examples():
    assert kmax_direct(build_structure(REF)).as_lists() == [[1], [2], [1, 2]]
    assert kmax_direct(build_structure(StandardTuple((2, 4), (1, 2), 2))).as_lists() == [[1, 2]]


def test_kmax_disjoint_supports_gives_singletons():
    k = kmax_direct(build_structure(StandardTuple((0, 100), (1, 1), 3)))
    assert k.lambda_is_empty()


@pytest.mark.parametrize(
    "a,b,expected",
    [((1, 9), (2, 6), True), ((1, 2), (2, 4), False), ((1, 3), (2, 2), False)],
)
def test_is_admissible(a, b, expected):
    assert is_admissible(StandardTuple(a, b, 2)) is expected


@pytest.mark.parametrize(
    "a,b,s",
    [((1,), (2,), 2), ((1, 2), (2,), 2), ((1, 1), (2, 2), 2), ((-1, 2), (1, 2), 2), ((1, 2), (0, 2), 2), ((1, 2), (1, 2), 1)],
)
def test_invalid_tuples(a, b, s):
    with pytest.raises(InvalidTupleError):
        StandardTuple(a, b, s)


def test_invalid_tuple_is_domain_error():
    assert issubclass(InvalidTupleError, DomainError)


def test_json_roundtrip():
    assert StandardTuple.from_json(REF.to_json()) == REF
    with pytest.raises(InvalidTupleError):
        StandardTuple.from_json("[1, 2]")
    with pytest.raises(InvalidTupleError):
        StandardTuple.from_json('{"a": [1, 2]}')


def test_generate_reference():
    t = generate_lemma38((1,), (1, 2), (3,))
    assert (t.a, t.b) == ((1, 9), (2, 6))
    assert 9 * 2 - 1 * 6 == 12 == 1 * 2 * 6


def test_generate_rejects_bad_input():
    with pytest.raises(DomainError):
        generate_lemma38((), (1, 2), ())
    with pytest.raises(DomainError):
        generate_lemma38((1,), (1, 2), (1,))
    with pytest.raises(DomainError):
        generate_lemma38((0,), (1, 2), (3,))
    with pytest.raises(DomainError):
        generate_lemma38((1, 1), (1, 2), (3,))


def test_prime_mode_chain():
    t = generate_prime_mode((1, 1, 1, 1))
    sig = build_structure(t).sigma
    assert len(set(sig)) == len(sig)
    for x, y in zip(sig, sig[1:]):
        assert pi_odd(x) < pi_odd(y)


def test_gaps_at_least_s_have_no_overlap():
    from qrdensity.diagrams import quotient_diagram

    t = generate_prime_mode((3, 3, 3), s=3)
    assert len(quotient_diagram(build_structure(t))) == 0


@pytest.mark.parametrize(
    "blocks,s,expected",
    [([(1,)], 2, (1,)), ([(1,), (1,)], 2, (1, 2, 1)), ([(3, 2, 2)], 8, (3, 2, 2))],
)
def test_gaps_for_quotient_spec(blocks, s, expected):
    assert gaps_for_quotient_spec(blocks, s) == expected


def test_gaps_for_quotient_spec_rejects_splitting_gap():
    with pytest.raises(DomainError):
        gaps_for_quotient_spec([(2,)], 2)


def test_generator_from_mapping():
    t, gaps = generator_from_mapping({"gaps": [1], "seed": [1, 2], "multipliers": [3]})
    assert t == REF and gaps == (1,)
    t, _ = generator_from_mapping({"gaps": [1], "prime_mode": True})
    assert t == REF
    with pytest.raises(DomainError):
        generator_from_mapping({"gaps": [1]})


def test_identity_1000_constructions():
    rng = random.Random(3)
    for _ in range(1000):
        k = rng.randint(2, 8)
        gaps = [rng.randint(1, 10) for _ in range(k - 1)]
        mult = [rng.randint(2, 7) for _ in range(k - 1)]
        t = generate_lemma38(gaps, (rng.randint(0, 10), rng.randint(1, 10)), mult)
        assert lemma38_identity_holds(t, gaps)
        assert is_admissible(t)


@given(st.integers(min_value=0, max_value=10**6))
def test_kmax_patterns_are_witnessed(seed):
    t = random_standard_tuple(random.Random(seed))
    st_ = build_structure(t)
    fam = kmax_direct(st_)
    for K in fam.members:
        assert any(membership_pattern(st_, x) == K for x in st_.S_all)


@given(st.integers(min_value=0, max_value=10**6))
def test_build_structure_deterministic(seed):
    t = random_standard_tuple(random.Random(seed))
    assert build_structure(t) == build_structure(StandardTuple.from_json(t.to_json()))


def test_random_corpus_reproducible_and_in_range():
    c1, c2 = random_corpus(0, 50), random_corpus(0, 50)
    assert c1 == c2
    for t in c1:
        assert 2 <= t.m <= 5 and 2 <= t.s <= 6
        assert all(0 <= a <= 30 for a in t.a) and all(1 <= b <= 30 for b in t.b)
    assert json.loads(c1[0].to_json())["s"] == c1[0].s
