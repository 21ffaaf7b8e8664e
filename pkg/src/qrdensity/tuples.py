"""Standard 2m-tuples, their derived structure, K_max, and the recurrence generator."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .arith import is_prime, squarefree_part
from .errors import DomainError, InvalidTupleError

# exact rationals come from the stdlib
Rational = Fraction


@dataclass(frozen=True)
class StandardTuple:
    a: tuple[int, ...]
    b: tuple[int, ...]
    s: int

    def __post_init__(self):
        a = tuple(self.a)
        b = tuple(self.b)
        for name, seq in (("a", a), ("b", b)):
            if any(isinstance(x, bool) or not isinstance(x, int) for x in seq):
                raise InvalidTupleError(f"coordinates of {name} must be integers: {seq}")
        if isinstance(self.s, bool) or not isinstance(self.s, int):
            raise InvalidTupleError(f"s must be an integer, got {self.s!r}")
        if len(a) != len(b):
            raise InvalidTupleError(f"a and b must have equal length, got {len(a)} and {len(b)}")
        if len(a) < 2:
            raise InvalidTupleError(f"need m >= 2 coordinates, got {len(a)}")
        if any(x < 0 for x in a):
            raise InvalidTupleError(f"coordinates of a must be nonnegative: {a}")
        if any(x < 1 for x in b):
            raise InvalidTupleError(f"coordinates of b must be positive: {b}")
        pairs = list(zip(a, b))
        if len(set(pairs)) != len(pairs):
            raise InvalidTupleError(f"pairs (a_i, b_i) must be distinct: {pairs}")
        if self.s < 2:
            raise InvalidTupleError(f"s must be >= 2, got {self.s}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return len(self.a)

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "s": self.s}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_mapping(cls, data: Mapping) -> "StandardTuple":
        missing = {"a", "b", "s"} - set(data)
        if missing:
            raise InvalidTupleError(f"tuple object is missing keys: {sorted(missing)}")
        return cls(tuple(data["a"]), tuple(data["b"]), data["s"])

    @classmethod
    def from_json(cls, text: str) -> "StandardTuple":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidTupleError(f"malformed tuple JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidTupleError("tuple JSON must be an object")
        return cls.from_mapping(data)


@dataclass(frozen=True)
class TupleStructure:
    """Everything derived from a tuple. Indices are 1-based: ``B[i-1]`` is b_i."""

    tuple: StandardTuple
    B: tuple[int, ...]
    A: tuple[tuple[int, ...], ...]
    Q: tuple[frozenset, ...]
    sigma: tuple[int, ...]
    S: tuple[frozenset, ...]

    @property
    def k(self) -> int:
        return len(self.B)

    @property
    def s(self) -> int:
        return self.tuple.s

    @property
    def indices(self) -> range:
        return range(1, self.k + 1)

    def b_of(self, i: int) -> int:
        return self.B[i - 1]

    def sigma_of(self, i: int) -> int:
        return self.sigma[i - 1]

    def Q_of(self, i: int) -> frozenset:
        return self.Q[i - 1]

    def S_of(self, i: int) -> frozenset:
        return self.S[i - 1]

    @property
    def Q_all(self) -> frozenset:
        return frozenset().union(*self.Q)

    @property
    def S_all(self) -> frozenset:
        return frozenset().union(*self.S)

    def indices_with(self, q: Fraction) -> frozenset[int]:
        """The indices i with q in Q_i."""
        return frozenset(i for i in self.indices if q in self.Q[i - 1])


@dataclass(frozen=True)
class KMaxFamily:
    members: frozenset

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, K) -> bool:
        return frozenset(K) in self.members

    def sorted(self) -> list[frozenset]:
        return sorted(self.members, key=lambda K: (len(K), sorted(K)))

    def as_lists(self) -> list[list[int]]:
        return [sorted(K) for K in self.sorted()]

    def lambda_is_empty(self) -> bool:
        return all(len(K) < 2 for K in self.members)


def build_structure(t: StandardTuple) -> TupleStructure:
    B: list[int] = []
    A: dict[int, set[int]] = {}
    for a, b in zip(t.a, t.b):
        if b not in A:
            B.append(b)
            A[b] = set()
        A[b].add(a)
    Q = tuple(frozenset(Fraction(a, b) for a in A[b]) for b in B)
    S = tuple(frozenset(q + j for q in Qi for j in range(t.s)) for Qi in Q)
    return TupleStructure(
        tuple=t,
        B=tuple(B),
        A=tuple(tuple(sorted(A[b])) for b in B),
        Q=Q,
        sigma=tuple(squarefree_part(b) for b in B),
        S=S,
    )


def membership_pattern(st: TupleStructure, t: Fraction) -> frozenset[int]:
    return frozenset(i for i in st.indices if t in st.S[i - 1])


def kmax_direct(st: TupleStructure) -> KMaxFamily:
    """Distinct membership patterns over the candidate points of the union of the S_i."""
    return KMaxFamily(frozenset(membership_pattern(st, t) for t in st.S_all))


def is_admissible(t: StandardTuple) -> bool:
    if len(set(t.b)) != len(t.b) or len(t.b) < 2:
        return False
    return all(
        t.a[i] * t.b[j] - t.a[j] * t.b[i] != 0 for i, j in combinations(range(len(t.a)), 2)
    )


# ---------------------------------------------------------------------------
# generator


def _check_gaps(gaps: Sequence[int]) -> tuple[int, ...]:
    gaps = tuple(gaps)
    if not gaps:
        raise DomainError("need at least one gap (k >= 2)")
    if any(isinstance(g, bool) or not isinstance(g, int) or g < 1 for g in gaps):
        raise DomainError(f"gaps must be positive integers: {gaps}")
    return gaps


def generate_lemma38(
    gaps: Sequence[int],
    seed: tuple[int, int],
    multipliers: Sequence[int],
    s: int = 2,
) -> StandardTuple:
    """``a_{i+1} = t_i (a_i + d_i b_i)``, ``b_{i+1} = t_i b_i``."""
    gaps = _check_gaps(gaps)
    multipliers = tuple(multipliers)
    if len(multipliers) != len(gaps):
        raise DomainError(f"need {len(gaps)} multipliers, got {len(multipliers)}")
    if any(isinstance(t, bool) or not isinstance(t, int) or t < 2 for t in multipliers):
        raise DomainError(f"multipliers must be integers >= 2: {multipliers}")
    a1, b1 = seed
    if a1 < 0 or b1 < 1:
        raise DomainError(f"seed needs a1 >= 0 and b1 >= 1, got {seed}")
    a, b = [a1], [b1]
    for d, t in zip(gaps, multipliers):
        a.append(t * (a[-1] + d * b[-1]))
        b.append(t * b[-1])
    return StandardTuple(tuple(a), tuple(b), s)


def _primes_from(start: int):
    p = start
    while True:
        if is_prime(p):
            yield p
        p += 1


def generate_prime_mode(gaps: Sequence[int], s: int = 2, a1: int = 1) -> StandardTuple:
    """Recurrence with ``b_1 = 2`` and multipliers 3, 5, 7, ... (distinct primes)."""
    gaps = _check_gaps(gaps)
    gen = _primes_from(3)
    multipliers = [next(gen) for _ in gaps]
    return generate_lemma38(gaps, (a1, 2), multipliers, s)


def lemma38_identity_holds(t: StandardTuple, gaps: Sequence[int]) -> bool:
    """``a_i b_j - a_j b_i == (d_j + ... + d_{i-1}) b_i b_j`` for every i > j."""
    a, b = t.a, t.b
    for i in range(len(a)):
        for j in range(i):
            if a[i] * b[j] - a[j] * b[i] != sum(gaps[j:i]) * b[i] * b[j]:
                return False
    return True


def gaps_for_quotient_spec(block_gap_sequences: Sequence[Sequence[int]], s: int) -> tuple[int, ...]:
    """Concatenate per-block gap sequences with separator ``s`` between blocks."""
    out: list[int] = []
    for n, block in enumerate(block_gap_sequences):
        block = tuple(block)
        if not block:
            raise DomainError("each block needs at least 2 rows (one gap)")
        if any(g < 1 for g in block):
            raise DomainError(f"block gaps must be positive: {block}")
        if any(g >= s for g in block):
            raise DomainError(f"block gap >= s={s} would split the block: {block}")
        if n:
            out.append(s)
        out.extend(block)
    if not out:
        raise DomainError("need at least one block")
    return tuple(out)


def generator_from_mapping(data: Mapping) -> tuple[StandardTuple, tuple[int, ...]]:
    """Build from ``{"gaps","seed","multipliers"}`` or ``{"gaps","prime_mode":true}``; optional ``"s"``."""
    if "gaps" not in data:
        raise DomainError("generator object needs 'gaps'")
    gaps = _check_gaps(data["gaps"])
    s = data.get("s", 2)
    if data.get("prime_mode"):
        return generate_prime_mode(gaps, s=s), gaps
    if "seed" not in data or "multipliers" not in data:
        raise DomainError("generator object needs 'seed' and 'multipliers', or 'prime_mode': true")
    seed = tuple(data["seed"])
    if len(seed) != 2:
        raise DomainError(f"seed must be [a1, b1], got {data['seed']}")
    return generate_lemma38(gaps, seed, data["multipliers"], s=s), gaps


def random_standard_tuple(rng, m_max: int = 5, s_max: int = 6, a_max: int = 30, b_max: int = 30) -> StandardTuple:
    """Uniform-ish random tuple; ``rng`` is a ``random.Random``."""
    m = rng.randint(2, m_max)
    s = rng.randint(2, s_max)
    pairs: set[tuple[int, int]] = set()
    while len(pairs) < m:
        pairs.add((rng.randint(0, a_max), rng.randint(1, b_max)))
    ordered = list(pairs)
    rng.shuffle(ordered)
    return StandardTuple(tuple(p[0] for p in ordered), tuple(p[1] for p in ordered), s)


def random_corpus(seed: int = 0, count: int = 500, **kw) -> list[StandardTuple]:
    import random

    rng = random.Random(seed)
    return [random_standard_tuple(rng, **kw) for _ in range(count)]


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def sorted_fractions(xs: Iterable[Fraction]) -> list[Fraction]:
    return sorted(xs)
