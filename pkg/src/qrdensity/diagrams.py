"""Overlap diagrams, block diagrams, columns, the quotient diagram and cells.

Rows are anchored at their rational labels: row ``r`` occupies the points
``r, r+1, ..., r+s-1`` of the line, so a column is keyed by the exact value
``t`` shared by all its entries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .tuples import KMaxFamily, TupleStructure, fraction_str


@dataclass(frozen=True)
class OverlapDiagram:
    s: int
    gaps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(self.gaps))
        if self.s < 2:
            raise DomainError(f"s must be >= 2, got {self.s}")
        if any(g < 1 for g in self.gaps):
            raise DomainError(f"gaps must be positive: {self.gaps}")

    @property
    def rows(self) -> int:
        return len(self.gaps) + 1

    def offsets(self) -> list[int]:
        out = [0]
        for g in self.gaps:
            out.append(out[-1] + g)
        return out

    def overlaps(self, i: int, j: int) -> bool:
        """Rows are 1-based; row i overlaps row j iff the gaps between them sum to <= s-1."""
        i, j = min(i, j), max(i, j)
        return sum(self.gaps[i - 1 : j - 1]) <= self.s - 1


def blocks_of(diagram: OverlapDiagram) -> list[tuple[int, int]]:
    """Row intervals ``[l, M+1]`` for each maximal run ``[l, M]`` of gaps <= s-1."""
    out = []
    run_start = None
    for r, g in enumerate(diagram.gaps, start=1):
        if g <= diagram.s - 1:
            if run_start is None:
                run_start = r
        elif run_start is not None:
            out.append((run_start, r))
            run_start = None
    if run_start is not None:
        out.append((run_start, len(diagram.gaps) + 1))
    return out


def r_partition(Q: Iterable[Fraction], s: int) -> list[tuple[Fraction, ...]]:
    """Split Q by integer-difference class, then cut each class where gaps exceed s-1."""
    Q = sorted(set(Q))
    if not Q:
        raise DomainError("Q must be nonempty")
    classes: dict[Fraction, list[Fraction]] = {}
    for q in Q:
        classes.setdefault(q - math.floor(q), []).append(q)
    out: list[tuple[Fraction, ...]] = []
    for members in classes.values():
        run = [members[0]]
        for q in members[1:]:
            if q - run[-1] <= s - 1:
                run.append(q)
            else:
                out.append(tuple(run))
                run = [q]
        out.append(tuple(run))
    out.sort(key=lambda R: R[0])
    return out


@dataclass(frozen=True)
class BlockDiagram:
    R: tuple[Fraction, ...]
    s: int

    def __post_init__(self):
        R = tuple(sorted(self.R))
        object.__setattr__(self, "R", R)
        if any(y - x > self.s - 1 for x, y in zip(R, R[1:])):
            raise DomainError(f"labels {R} do not form a single block for s={self.s}")

    @property
    def gaps(self) -> tuple[Fraction, ...]:
        return tuple(y - x for x, y in zip(self.R, self.R[1:]))

    def overlap_diagram(self) -> OverlapDiagram:
        return OverlapDiagram(self.s, tuple(int(g) for g in self.gaps))


@dataclass(frozen=True)
class Column:
    t: Fraction
    entries: tuple[tuple[Fraction, int], ...]
    K: frozenset[int]

    @property
    def theta(self) -> frozenset[Fraction]:
        return frozenset(label for label, _ in self.entries)


def columns_of(block: BlockDiagram, st: TupleStructure) -> list[Column]:
    s = block.s
    ts = sorted({r + j for r in block.R for j in range(s)})
    out = []
    for t in ts:
        entries = tuple((r, int(t - r)) for r in block.R if 0 <= t - r <= s - 1)
        theta = {r for r, _ in entries}
        K = frozenset(i for i in st.indices if st.Q_of(i) & theta)
        out.append(Column(t, entries, K))
    return out


def all_columns(st: TupleStructure) -> list[Column]:
    out = []
    for R in r_partition(st.Q_all, st.s):
        out.extend(columns_of(BlockDiagram(R, st.s), st))
    return out


def kmax_via_columns(st: TupleStructure) -> KMaxFamily:
    return KMaxFamily(frozenset(C.K for C in all_columns(st)))


@dataclass(frozen=True)
class QuotientBlock:
    diagram: BlockDiagram
    columns: tuple[Column, ...]
    D: frozenset[int]

    @property
    def labels(self) -> tuple[Fraction, ...]:
        return self.diagram.R


@dataclass(frozen=True)
class QuotientDiagram:
    s: int
    blocks: tuple[QuotientBlock, ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> dict:
        return {
            "blocks": [
                {
                    "labels": [fraction_str(r) for r in b.labels],
                    "columns": [{"t": fraction_str(C.t), "K": sorted(C.K)} for C in b.columns],
                }
                for b in self.blocks
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def quotient_diagram(st: TupleStructure) -> QuotientDiagram:
    blocks = []
    for R in r_partition(st.Q_all, st.s):
        bd = BlockDiagram(R, st.s)
        cols = columns_of(bd, st)
        if any(len(C.K) >= 2 for C in cols):
            D = frozenset(i for i in st.indices if st.Q_of(i) & set(R))
            blocks.append(QuotientBlock(bd, tuple(cols), D))
    return QuotientDiagram(st.s, tuple(blocks))


def is_essential(C: Column, st: TupleStructure) -> bool:
    return len({st.sigma_of(i) for i in C.K}) >= 2


@dataclass(frozen=True)
class Cell:
    columns: tuple[Column, ...]
    E: frozenset[int]


@dataclass(frozen=True)
class ReducedBlock:
    block_index: int
    cells: tuple[Cell, ...]
    # non-essential columns lying between consecutive cells
    separators: tuple[tuple[Column, ...], ...]


@dataclass(frozen=True)
class CellDecomposition:
    blocks: tuple[ReducedBlock, ...]

    @property
    def cells(self) -> list[Cell]:
        return [c for rb in self.blocks for c in rb.cells]

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    def essential_columns(self) -> list[Column]:
        return [C for c in self.cells for C in c.columns]


def _sigma_rows(st: TupleStructure, Sigma: frozenset[int]) -> frozenset[Fraction]:
    """Row labels q with some i in Sigma having q in Q_i."""
    return frozenset(q for i in Sigma for q in st.Q_of(i))


def essential_and_cells(qd: QuotientDiagram, st: TupleStructure, Sigma: Iterable[int]) -> CellDecomposition:
    """Drop non-essential columns and group the rest into cells.

    Adjacent essential columns stay in one cell iff some row labeled by an
    index of ``Sigma`` passes through both. Since rows are intervals of
    columns, checking adjacent pairs is enough.
    """
    rows = _sigma_rows(st, frozenset(Sigma))
    reduced = []
    for n, block in enumerate(qd.blocks):
        cols = list(block.columns)
        ess = [idx for idx, C in enumerate(cols) if is_essential(C, st)]
        if not ess:
            continue
        groups: list[list[int]] = [[ess[0]]]
        for prev, cur in zip(ess, ess[1:]):
            if cols[prev].theta & cols[cur].theta & rows:
                groups[-1].append(cur)
            else:
                groups.append([cur])
        cells = tuple(
            Cell(tuple(cols[i] for i in g), frozenset().union(*(cols[i].K for i in g))) for g in groups
        )
        seps = tuple(
            tuple(cols[i] for i in range(g[-1] + 1, h[0])) for g, h in zip(groups, groups[1:])
        )
        reduced.append(ReducedBlock(n, cells, seps))
    return CellDecomposition(tuple(reduced))


# ---------------------------------------------------------------------------
# rendering


def _grid(rows: Sequence[tuple[str, int]], s: int) -> list[str]:
    width = max(len(label) for label, _ in rows)
    lines = []
    for label, offset in rows:
        line = f"{label:>{width}} | " + "  " * offset + " ".join("." * s)
        lines.append(line.rstrip())
    return lines


def render_overlap(diagram: OverlapDiagram) -> str:
    rows = [(str(i + 1), off) for i, off in enumerate(diagram.offsets())]
    return "\n".join(_grid(rows, diagram.s)) + "\n"


def render_ascii(qd: QuotientDiagram) -> str:
    if not qd.blocks:
        return "(no blocks)\n"
    parts = []
    for n, block in enumerate(qd.blocks, start=1):
        r0 = block.labels[0]
        rows = [(fraction_str(r), int(r - r0)) for r in block.labels]
        parts.append(f"block {n}\n" + "\n".join(_grid(rows, qd.s)))
    return "\n\n".join(parts) + "\n"
