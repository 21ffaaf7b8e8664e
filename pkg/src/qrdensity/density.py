"""Exact density of the prime set Pi_+(a, b).

The engine builds Lambda', Sigma and the two equivalence relations, then
evaluates the density several independent ways:

* ``signature_density``: the ground truth. A prime is in Pi_+ iff
  ``chi_p(b_i b_j) = 1`` for all i, j in a common K of K_max, so the density
  is ``2**-rank`` of the vectors ``v(pi_odd(sigma_i sigma_j))``.
* ``lemma32_density``: the partition sum over the family ``{S(I)}``.
* ``theorem37_density`` and ``eq312_density``: two closed forms valid when
  the sigma values on Sigma are distinct and multiplicatively independent.
* ``general_density``: the alpha/beta/omega formulas for the other tuples.

All densities are ``fractions.Fraction`` values with power-of-two
denominators. Indices are 1-based throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from . import gf2
from .arith import pi_odd
from .diagrams import (
    Column,
    CellDecomposition,
    essential_and_cells,
    is_essential,
    kmax_via_columns,
    quotient_diagram,
)
from .errors import ConsistencyError, SizeLimitError, WrongPathError
from .tuples import KMaxFamily, StandardTuple, TupleStructure, build_structure, is_admissible, kmax_direct

MAX_K = 20
MAX_SIGMA = 16
MAX_LAMBDA = 12

IndexSet = frozenset


# ---------------------------------------------------------------------------
# dyadic helpers


def to_dyadic(q: Fraction) -> tuple[int, int]:
    """``q == num / 2**log2_den``; raises if the denominator is not a power of two."""
    den = q.denominator
    if den & (den - 1):
        raise ConsistencyError(f"{q} is not a dyadic rational")
    return q.numerator, den.bit_length() - 1


def decimal_string(q: Fraction) -> str:
    """Exact terminating decimal expansion of a dyadic rational."""
    num, e = to_dyadic(q)
    sign = "-" if num < 0 else ""
    digits = str(abs(num) * 5**e)
    if e:
        digits = digits.rjust(e + 1, "0")
        whole, frac = digits[:-e], digits[-e:].rstrip("0")
    else:
        whole, frac = digits, ""
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def dyadic_dict(q: Fraction) -> dict:
    num, e = to_dyadic(q)
    return {"num": num, "log2_den": e, "fraction": str(q), "decimal": decimal_string(q)}


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


# ---------------------------------------------------------------------------
# Lambda'


@dataclass(frozen=True)
class Representative:
    I: tuple[int, ...]
    S: frozenset[int]
    Z: frozenset[int]

    def to_dict(self) -> dict:
        return {"I": list(self.I), "S": sorted(self.S), "Z": sorted(self.Z)}


@dataclass(frozen=True)
class LambdaPrime:
    representatives: tuple[Representative, ...]

    def __len__(self) -> int:
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)


def lambda_prime(kmax: KMaxFamily, st: TupleStructure) -> LambdaPrime:
    """One representative per distinct S(I) with |S(I)| >= 2, lexicographically smallest I."""
    best: dict[frozenset, tuple[int, ...]] = {}
    for K in kmax.sorted():
        if len(K) > MAX_K:
            raise SizeLimitError(f"|K| = {len(K)} exceeds cap {MAX_K}")
        idx = sorted(K)
        for r in range(2, len(idx) + 1, 2):
            for I in combinations(idx, r):
                S = frozenset(st.sigma_of(i) for i in I)
                if len(S) < 2:
                    continue
                cur = best.get(S)
                if cur is None or I < cur:
                    best[S] = I
    reps = []
    for S, I in best.items():
        first: dict[int, int] = {}
        for i in I:
            first.setdefault(st.sigma_of(i), i)
        reps.append(Representative(I, S, frozenset(first.values())))
    reps.sort(key=lambda r: r.I)
    return LambdaPrime(tuple(reps))


def sigma_set(lp: LambdaPrime) -> frozenset[int]:
    return frozenset().union(*(r.Z for r in lp))


def column_sigma_set(st: TupleStructure, columns: Iterable[Column]) -> frozenset[int]:
    """Union of K(C) over essential columns."""
    return frozenset().union(*(C.K for C in columns if is_essential(C, st)))


def _components(nodes: Iterable, edges: Iterable[tuple]) -> list[set]:
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    return [set(c) for c in nx.connected_components(g)]


def tilde_classes(Sigma: Iterable[int], essential: Iterable[Column]) -> list[frozenset[int]]:
    """Components of the graph on Sigma joining i, j when both lie in K(C) for an essential C."""
    Sigma = frozenset(Sigma)
    edges = []
    for C in essential:
        inside = sorted(C.K & Sigma)
        edges.extend(zip(inside, inside[1:]))
    comps = _components(sorted(Sigma), edges)
    return sorted((frozenset(c) for c in comps), key=min)


def simeq_classes(lp: LambdaPrime) -> list[tuple[Representative, ...]]:
    """Components of Lambda' under chains of nonempty pairwise intersections."""
    reps = list(lp)
    edges = [(a, b) for a, b in combinations(range(len(reps)), 2) if reps[a].Z & reps[b].Z]
    comps = _components(range(len(reps)), edges)
    out = [tuple(reps[i] for i in sorted(c)) for c in comps]
    return sorted(out, key=lambda cls: cls[0].I)


def phi(varpi: frozenset[int], lp: LambdaPrime) -> tuple[Representative, ...]:
    return tuple(r for r in lp if r.Z <= varpi)


@dataclass(frozen=True)
class Prop35Report:
    holds: bool
    tilde_count: int
    simeq_count: int
    failures: tuple[str, ...]


def check_proposition_35(
    classes: Sequence[frozenset[int]], lp: LambdaPrime, simeq: Sequence[tuple[Representative, ...]]
) -> Prop35Report:
    """Phi must send ~-classes bijectively onto simeq-classes, inverted by taking unions."""
    failures = []
    targets = {frozenset(c) for c in simeq}
    images = []
    for varpi in classes:
        img = frozenset(phi(varpi, lp))
        images.append(img)
        if img not in targets:
            failures.append(f"Phi({sorted(varpi)}) is not a simeq-class")
            continue
        union = frozenset().union(*(r.Z for r in img))
        if union != varpi:
            failures.append(f"union of Phi({sorted(varpi)}) is {sorted(union)}")
    if len(set(images)) != len(images):
        failures.append("Phi is not injective")
    if set(images) != targets:
        failures.append("Phi is not surjective")
    if len(classes) != len(simeq):
        failures.append(f"|Sigma/~| = {len(classes)} but |Lambda'/simeq| = {len(simeq)}")
    return Prop35Report(not failures, len(classes), len(simeq), tuple(failures))


# ---------------------------------------------------------------------------
# independence of the sigma values


def _sigma_universe(st: TupleStructure, Sigma: Iterable[int]) -> gf2.PrimeUniverse:
    return gf2.PrimeUniverse.of(*(pi_odd(st.sigma_of(i)) for i in Sigma))


def condition39(st: TupleStructure, Sigma: Iterable[int]) -> bool:
    """Distinct sigma on Sigma and the non-unit sigma vectors are independent."""
    Sigma = sorted(Sigma)
    values = [st.sigma_of(i) for i in Sigma]
    if len(set(values)) != len(values):
        return False
    uni = _sigma_universe(st, Sigma)
    vecs = [gf2.vector_of(pi_odd(v), uni) for v in values if v != 1]
    return gf2.is_independent_set(vecs)


def condition39_symdiff(st: TupleStructure, Sigma: Iterable[int]) -> bool:
    """Same condition phrased with prime sets: distinct, and no subfamily has empty symmetric difference."""
    Sigma = sorted(Sigma)
    if len(Sigma) > MAX_SIGMA:
        raise SizeLimitError(f"|Sigma| = {len(Sigma)} exceeds cap {MAX_SIGMA}")
    sets = [pi_odd(st.sigma_of(i)) for i in Sigma]
    if len(set(sets)) != len(sets):
        return False
    nonempty = [x for x in sets if x]
    if not nonempty:
        return True
    uni = gf2.PrimeUniverse.of(*nonempty)
    xor, _, _ = gf2.subset_tables([uni.mask(x) for x in nonempty], [0] * len(nonempty))
    return not bool((xor[1:] == 0).any())


# ---------------------------------------------------------------------------
# M1, epsilon, the closed forms and the partition sum


@dataclass(frozen=True)
class M1Info:
    M1: tuple[Representative, ...]
    M0: tuple[Representative, ...]
    i0: int | None
    varpi0: frozenset[int] | None
    phi_varpi0: tuple[Representative, ...] | None
    epsilon: int


def epsilon_and_m1(lp: LambdaPrime, classes: Sequence[frozenset[int]], st: TupleStructure) -> M1Info:
    M1 = tuple(r for r in lp if 1 in r.S)
    M0 = tuple(r for r in lp if 1 not in r.S)
    if not M1:
        return M1Info(M1, M0, None, None, None, 1)
    Sigma = sigma_set(lp)
    ones = sorted(i for i in Sigma if st.sigma_of(i) == 1)
    if len(ones) != 1:
        raise ConsistencyError(f"expected one index with sigma = 1 in Sigma, found {ones}")
    i0 = ones[0]
    varpi0 = next(c for c in classes if i0 in c)
    ph = phi(varpi0, lp)
    return M1Info(M1, M0, i0, varpi0, ph, int(set(M1) == set(ph)))


def theorem37_density(mu: int, sigma: int, m1_case: str) -> Fraction:
    """``m1_case`` is 'empty', 'phi' (M1 equals Phi(varpi0)) or 'other'."""
    if m1_case in ("empty", "phi"):
        return _pow2(mu - sigma)
    if m1_case == "other":
        return _pow2(1 - sigma) * (2**mu - 1)
    raise ValueError(f"unknown case {m1_case!r}")


def _m1_case(info: M1Info) -> str:
    if not info.M1:
        return "empty"
    return "phi" if info.epsilon else "other"


def _union_Z(reps: Iterable[Representative]) -> frozenset[int]:
    return frozenset().union(*(r.Z for r in reps))


def _two_block_partitions(items: Sequence) -> Iterable[tuple[tuple, tuple]]:
    """Unordered 2-block partitions; the first block always holds ``items[0]``."""
    n = len(items)
    if n < 2:
        return
    for mask in range(1 << (n - 1)):
        full = mask << 1 | 1
        if full == (1 << n) - 1:
            continue
        yield (
            tuple(items[i] for i in range(n) if full >> i & 1),
            tuple(items[i] for i in range(n) if not full >> i & 1),
        )


def _holds_310(M1: Sequence[Representative], P1: Sequence[Representative], P2: Sequence[Representative]) -> bool:
    return not (_union_Z(tuple(M1) + tuple(P1)) & _union_Z(P2))


def p_empty_brute(info: M1Info) -> int:
    """Partitions of M0 for which some labeling satisfies the Z-disjointness condition."""
    if len(info.M0) > MAX_LAMBDA:
        raise SizeLimitError(f"|M0| = {len(info.M0)} exceeds cap {MAX_LAMBDA}")
    return sum(
        1
        for A, B in _two_block_partitions(info.M0)
        if _holds_310(info.M1, A, B) or _holds_310(info.M1, B, A)
    )


def p_empty_closed(mu: int, info: M1Info) -> Fraction:
    if not info.M1:
        return _pow2(mu - 1) - 1
    if not info.epsilon:
        return _pow2(mu - 1) - 1
    return _pow2(mu - 2) - 1


@dataclass(frozen=True)
class Eq312Result:
    d: int
    d_expected: int
    epsilon: int
    epsilon_expected: int
    p_empty: Fraction
    density: Fraction

    @property
    def consistent(self) -> bool:
        return self.d == self.d_expected and self.epsilon == self.epsilon_expected


def sigma_rank(st: TupleStructure, Sigma: Iterable[int]) -> int:
    Sigma = sorted(Sigma)
    uni = _sigma_universe(st, Sigma)
    return gf2.mask_rank(uni.mask(pi_odd(st.sigma_of(i))) for i in Sigma)


def eq312_density(lp: LambdaPrime, classes: Sequence[frozenset[int]], st: TupleStructure) -> Eq312Result:
    """``2**-d (1 + eps + 2 |P_empty(M0, 2)|)`` with d by rank and eps by Z-disjointness."""
    Sigma = sigma_set(lp)
    if not condition39(st, Sigma):
        raise WrongPathError("sigma values on Sigma are not independent; use general_density")
    info = epsilon_and_m1(lp, classes, st)
    mu = len(classes)
    d = sigma_rank(st, Sigma)
    d_expected = len(Sigma) - (1 if info.M1 else 0)
    eps = int(not (_union_Z(info.M0) & _union_Z(info.M1)))
    pe = p_empty_closed(mu, info)
    return Eq312Result(d, d_expected, eps, info.epsilon, pe, _pow2(-d) * (1 + eps + 2 * pe))


def lemma32_density(family: Sequence[Iterable[int]]) -> Fraction:
    """Density of primes making every set of square-free integers all-residue or all-non-residue.

    When no set avoids 1 the all-positive and all-negative-on-M0 terms are the
    same set of primes, so it is counted once.
    """
    family = [frozenset(x) for x in family]
    if len(family) > MAX_LAMBDA:
        raise SizeLimitError(f"family of {len(family)} sets exceeds cap {MAX_LAMBDA}")
    if any(not x for x in family):
        raise ValueError("every set in the family must be nonempty")
    pis = [frozenset(pi_odd(z) for z in x) for x in family]
    M0 = [i for i, x in enumerate(family) if 1 not in x]
    M1 = [i for i, x in enumerate(family) if 1 in x]

    def sets(idx):
        return frozenset().union(*(pis[i] for i in idx)) if idx else frozenset()

    nonempty = [x for x in frozenset().union(*pis) if x]
    uni = gf2.PrimeUniverse.of(*nonempty)
    d = gf2.mask_rank(uni.mask(x) for x in nonempty)
    eps = int(bool(M0) and gf2.solvable(sets(M0), sets(M1)))
    count = 0
    for P1, P2 in _two_block_partitions(M0):
        count += gf2.solvable(sets(P2), sets(M1 + list(P1)))
        count += gf2.solvable(sets(P1), sets(M1 + list(P2)))
    return _pow2(-d) * (1 + eps + count)


def signature_density(kmax: KMaxFamily, st: TupleStructure) -> Fraction:
    """Exact density of Pi_+: ``2**-rank`` of ``v(pi_odd(sigma_i sigma_j))`` over i, j sharing a K."""
    all_primes = [pi_odd(st.sigma_of(i)) for i in st.indices]
    uni = gf2.PrimeUniverse.of(*all_primes)
    masks = []
    for K in kmax.members:
        idx = sorted(K)
        base = uni.mask(all_primes[idx[0] - 1])
        masks.extend(base ^ uni.mask(all_primes[j - 1]) for j in idx[1:])
    return _pow2(-gf2.mask_rank(masks))


# ---------------------------------------------------------------------------
# general case


@dataclass(frozen=True)
class GeneralParameters:
    mu: int
    d: int
    alpha: int
    beta: int | None
    omega: int | None
    m1_empty: bool
    m1_is_union: bool | None
    epsilon: int
    epsilon_direct: int
    p_empty_count: int
    p_empty_formula: Fraction


def _u_condition(family: Sequence[frozenset], T: frozenset, with_empty: bool, uni: gf2.PrimeUniverse) -> bool:
    """Is there an odd-size U of ``family`` (plus the empty set) meeting T evenly with empty symmetric difference?

    Each member x becomes ``(v(x), 1, [x in T])``; such a U exists iff
    ``(0, 1, 0)`` lies in their span.
    """
    members = set(family)
    if with_empty:
        members.add(frozenset())
    rows = []
    for x in members:
        in_t = x in T or (with_empty and not x)
        rows.append(uni.mask(x) << 2 | 0b10 | int(in_t))
    return gf2.in_span(0b10, rows)


def general_parameters(
    lp: LambdaPrime, classes: Sequence[frozenset[int]], st: TupleStructure
) -> GeneralParameters:
    reps = list(lp)
    if len(reps) > MAX_LAMBDA:
        raise SizeLimitError(f"|Lambda'| = {len(reps)} exceeds cap {MAX_LAMBDA}")
    Sigma = sigma_set(lp)
    if len(Sigma) > MAX_SIGMA:
        raise SizeLimitError(f"|Sigma| = {len(Sigma)} exceeds cap {MAX_SIGMA}")
    pis = {i: pi_odd(st.sigma_of(i)) for i in Sigma}
    uni = gf2.PrimeUniverse.of(*pis.values())
    family = sorted(set(pis.values()), key=sorted)
    mu = len(classes)
    d = gf2.mask_rank(uni.mask(x) for x in family)

    def script_S(group: Iterable[Representative]) -> frozenset:
        return frozenset(pis[i] for r in group for i in r.Z)

    M1 = tuple(r for r in reps if 1 in r.S)
    M0 = tuple(r for r in reps if 1 not in r.S)

    # alpha: partitions of Lambda' into unions of simeq-classes
    simeq = simeq_classes(lp)
    alpha = 0
    for U1, U2 in _two_block_partitions(simeq):
        P1 = tuple(r for c in U1 for r in c)
        P2 = tuple(r for c in U2 for r in c)
        if _u_condition(family, script_S(P1), True, uni) or _u_condition(family, script_S(P2), True, uni):
            alpha += 1

    eps_direct = int(gf2.solvable(script_S(M0), script_S(M1)))
    info = M1Info(M1, M0, None, None, None, 0)
    p_count = p_empty_brute(info)

    if not M1:
        return GeneralParameters(
            mu, d, alpha, None, None, True, None,
            eps_direct, eps_direct, p_count, _pow2(mu - 1) - 1,
        )

    beta = 0
    for A, B in _two_block_partitions(M0):
        hit = False
        for P1, P2 in ((A, B), (B, A)):
            if _holds_310(M1, P1, P2) and _u_condition(family, script_S(M1 + P1), False, uni):
                hit = True
        beta += hit

    omega_classes = [c for c in classes if set(phi(c, lp)) & set(M1)]
    omega = len(omega_classes)
    union_phi = {r for c in omega_classes for r in phi(c, lp)}
    is_union = set(M1) == union_phi
    eps = int(is_union and not _u_condition(family, script_S(M1), False, uni))
    if not is_union:
        pf = _pow2(mu - omega) - 1
    elif mu == omega:
        pf = Fraction(0)
    else:
        pf = _pow2(mu - omega - 1) - 1
    return GeneralParameters(mu, d, alpha, beta, omega, False, is_union, eps, eps_direct, p_count, pf)


def general_density(gp: GeneralParameters) -> Fraction:
    if gp.m1_empty:
        return _pow2(1 - gp.d) * (_pow2(gp.mu - 1) - gp.alpha)
    if not gp.m1_is_union:
        return _pow2(-gp.d) * (_pow2(gp.mu - gp.omega + 1) - 2 * gp.beta - 1)
    return _pow2(-gp.d) * (_pow2(gp.mu - gp.omega) - 2 * gp.beta + gp.epsilon - 1)


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class DensityAnalysis:
    tuple: StandardTuple
    B: tuple[int, ...]
    sigma: tuple[int, ...]
    kmax: KMaxFamily
    admissible: bool
    lambda_prime: LambdaPrime
    Sigma: frozenset[int]
    Sigma_columns: frozenset[int]
    classes: list[frozenset[int]]
    lambda_classes: list[tuple[Representative, ...]]
    proposition35: Prop35Report
    cells: CellDecomposition
    condition39: bool
    M1: tuple[Representative, ...] = ()
    i0: int | None = None
    varpi0: frozenset[int] | None = None
    phi_varpi0: tuple[Representative, ...] | None = None
    d: int = 0
    epsilon: int = 1
    alpha: int | None = None
    beta: int | None = None
    omega: int | None = None
    epsilon_direct: int | None = None
    eq312: Eq312Result | None = None
    theorem37: Fraction | None = None
    general: Fraction | None = None
    lemma32: Fraction | None = None
    density_plus: Fraction = Fraction(1)
    formula_density: Fraction = Fraction(1)
    formula_path: str = "all-squares"
    notes: list[str] = field(default_factory=list)

    @property
    def mu(self) -> int:
        return len(self.classes)

    @property
    def sigma_count(self) -> int:
        return len(self.Sigma)

    @property
    def density_minus(self) -> Fraction:
        return 1 - self.density_plus

    @property
    def formula_agrees(self) -> bool:
        return self.formula_density == self.density_plus

    def to_dict(self) -> dict:
        def reps(xs):
            return None if xs is None else [sorted(r.Z) for r in xs]

        return {
            "tuple": self.tuple.to_dict(),
            "B": list(self.B),
            "sigma": list(self.sigma),
            "admissible": self.admissible,
            "kmax": self.kmax.as_lists(),
            "lambda_prime": [r.to_dict() for r in self.lambda_prime],
            "Sigma": sorted(self.Sigma),
            "Sigma_columns": sorted(self.Sigma_columns),
            "sigma_count": self.sigma_count,
            "classes": [sorted(c) for c in self.classes],
            "mu": self.mu,
            "lambda_classes": [reps(c) for c in self.lambda_classes],
            "proposition35": {
                "holds": self.proposition35.holds,
                "failures": list(self.proposition35.failures),
            },
            "cells": [sorted(c.E) for c in self.cells.cells],
            "condition39": self.condition39,
            "M1": reps(self.M1),
            "i0": self.i0,
            "varpi0": None if self.varpi0 is None else sorted(self.varpi0),
            "phi_varpi0": reps(self.phi_varpi0),
            "d": self.d,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "beta": self.beta,
            "omega": self.omega,
            "epsilon_direct": self.epsilon_direct,
            "formula_path": self.formula_path,
            "formula_density": dyadic_dict(self.formula_density),
            "formula_agrees": self.formula_agrees,
            "lemma32_density": None if self.lemma32 is None else dyadic_dict(self.lemma32),
            "density": {"num": to_dyadic(self.density_plus)[0], "log2_den": to_dyadic(self.density_plus)[1]},
            "density_plus": dyadic_dict(self.density_plus),
            "density_minus": dyadic_dict(self.density_minus),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def analyze(t: StandardTuple, check: bool = False) -> DensityAnalysis:
    """Run the whole pipeline. With ``check`` every internal cross-check must pass."""
    st = build_structure(t)
    kd = kmax_direct(st)
    kc = kmax_via_columns(st)
    if kd != kc:
        raise ConsistencyError(f"K_max differs: direct {kd.as_lists()} vs columns {kc.as_lists()}")
    lp = lambda_prime(kd, st)
    Sigma = sigma_set(lp)
    qd = quotient_diagram(st)
    cols = [C for b in qd.blocks for C in b.columns]
    Sigma_cols = column_sigma_set(st, cols)
    # cells follow the column formula for Sigma; it differs from the Z(I) union
    # only when sigma values repeat
    cells = essential_and_cells(qd, st, Sigma_cols)
    essential = [C for C in cols if is_essential(C, st)]
    classes = tilde_classes(Sigma, essential)
    column_classes = tilde_classes(Sigma_cols, essential)
    simeq = simeq_classes(lp)
    p35 = check_proposition_35(classes, lp, simeq)
    cond = condition39(st, Sigma)
    truth = signature_density(kd, st)

    an = DensityAnalysis(
        tuple=t, B=st.B, sigma=st.sigma, kmax=kd, admissible=is_admissible(t),
        lambda_prime=lp, Sigma=Sigma, Sigma_columns=Sigma_cols, classes=classes,
        lambda_classes=simeq, proposition35=p35, cells=cells, condition39=cond,
        density_plus=truth,
    )
    if len(lp) <= MAX_LAMBDA:
        an.lemma32 = lemma32_density([r.S for r in lp]) if len(lp) else Fraction(1)
    else:
        an.notes.append(f"partition sum skipped: |Lambda'| = {len(lp)} exceeds {MAX_LAMBDA}")

    distinct_sigma = len(set(st.sigma)) == len(st.sigma)
    if Sigma != Sigma_cols:
        an.notes.append(f"Sigma from Z(I) {sorted(Sigma)} differs from column formula {sorted(Sigma_cols)}")
    if not p35.holds:
        an.notes.extend(p35.failures)

    if all(x == 1 for x in st.sigma):
        an.formula_path, an.formula_density = "all-squares", Fraction(1)
    elif not Sigma:
        an.formula_path, an.formula_density = "mu-zero", Fraction(1)
    else:
        an.d = sigma_rank(st, Sigma)
        if cond:
            info = epsilon_and_m1(lp, classes, st)
            an.M1, an.i0, an.varpi0, an.phi_varpi0 = info.M1, info.i0, info.varpi0, info.phi_varpi0
            an.epsilon = info.epsilon
            an.eq312 = eq312_density(lp, classes, st)
            an.theorem37 = theorem37_density(an.mu, len(Sigma), _m1_case(info))
            an.formula_path, an.formula_density = "theorem-3.7", an.theorem37
        else:
            an.M1 = tuple(r for r in lp if 1 in r.S)
            an.formula_path = "general"
        gp = general_parameters(lp, classes, st)
        an.alpha, an.beta, an.omega = gp.alpha, gp.beta, gp.omega
        an.epsilon_direct = gp.epsilon_direct
        an.general = general_density(gp)
        if not cond:
            an.epsilon = gp.epsilon
            an.formula_density = an.general
    if not an.formula_agrees:
        an.notes.append(
            f"{an.formula_path} formula gives {an.formula_density}, exact signature density is {truth}"
        )

    if check:
        problems = []
        if distinct_sigma and Sigma != Sigma_cols:
            problems.append("Sigma differs from the column formula with distinct sigma values")
        if not p35.holds:
            problems.append("class bijection check failed: " + "; ".join(p35.failures))
        if an.eq312 is not None:
            if not an.eq312.consistent:
                problems.append(f"d/epsilon mismatch in the partition formula: {an.eq312}")
            if an.eq312.density != an.theorem37:
                problems.append(f"closed form {an.theorem37} != partition formula {an.eq312.density}")
        if an.lemma32 is not None and an.lemma32 != truth:
            problems.append(f"partition sum {an.lemma32} != signature density {truth}")
        if an.admissible and sorted(map(sorted, (c.E for c in cells.cells))) != sorted(map(sorted, column_classes)):
            problems.append("cell label sets differ from the ~-classes")
        if problems:
            raise ConsistencyError("; ".join(problems))
    return an
