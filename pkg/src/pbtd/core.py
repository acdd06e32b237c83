"""Value types for tournament designs: pairs, permutations, grids, and the
split/assemble bridge between the n x (2n-1) form and Howell-pair form."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from .errors import (
    AlmostDisjointViolation,
    DomainMismatch,
    ShapeError,
    SharedColumnMismatch,
)


class UnorderedPair(NamedTuple):
    """A 2-subset {lo, hi} of the element universe, stored with lo < hi.

    Being a tuple subclass, pairs compare, hash and sort exactly like the
    underlying (lo, hi) tuples.
    """

    lo: int
    hi: int

    def __new__(cls, lo, hi):
        if not (0 <= lo < hi):
            raise ValueError(f"not a canonical pair: ({lo}, {hi})")
        return super().__new__(cls, lo, hi)

    @classmethod
    def of(cls, a, b):
        """Build a pair from two distinct elements in either order."""
        if a > b:
            a, b = b, a
        return cls(a, b)

    def __str__(self):
        return f"{self.lo},{self.hi}"


# A grid cell: an UnorderedPair, or None for an empty Howell cell.
Cell = Optional[UnorderedPair]
Rows = tuple  # tuple[tuple[Cell, ...], ...]


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0, ..., m-1}, given by its tuple of images."""

    images: tuple

    def __post_init__(self):
        m = len(self.images)
        if sorted(self.images) != list(range(m)):
            raise ValueError(f"not a bijection on 0..{m - 1}: {self.images}")
        object.__setattr__(self, "images", tuple(self.images))

    @classmethod
    def identity(cls, degree):
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree, cycles):
        """Build from disjoint cycles, e.g. from_cycles(6, [(0,1),(2,3,4)])."""
        images = list(range(degree))
        seen = set()
        for cycle in cycles:
            for x in cycle:
                if x in seen:
                    raise ValueError(f"element {x} repeated across cycles")
                seen.add(x)
            for i, x in enumerate(cycle):
                images[x] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, x):
        return self.images[x]

    def apply_pair(self, pair):
        return UnorderedPair.of(self.images[pair[0]], self.images[pair[1]])

    def compose(self, other):
        """self after other: (self.compose(other))(x) = self(other(x))."""
        if self.degree != other.degree:
            raise DomainMismatch(
                f"cannot compose degree {self.degree} with {other.degree}"
            )
        return Permutation(tuple(self.images[other.images[x]] for x in range(self.degree)))

    def inverse(self):
        inv = [0] * self.degree
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(tuple(inv))

    def power(self, k):
        """self applied k times (k >= 0)."""
        result = Permutation.identity(self.degree)
        for _ in range(k):
            result = self.compose(result)
        return result

    @property
    def order(self):
        """Smallest k >= 1 with self^k = identity."""
        result = 1
        seen = set()
        for start in range(self.degree):
            if start in seen:
                continue
            length = 0
            x = start
            while True:
                seen.add(x)
                x = self.images[x]
                length += 1
                if x == start:
                    break
            result = result * length // math.gcd(result, length)
        return result

    def is_identity(self):
        return all(y == x for x, y in enumerate(self.images))

    def __str__(self):
        return ",".join(str(x) for x in self.images)


def _coerce_cell(cell, v, allow_empty):
    if cell is None:
        if not allow_empty:
            raise ShapeError("empty cell where a pair is required")
        return None
    a, b = cell
    pair = cell if isinstance(cell, UnorderedPair) else UnorderedPair.of(a, b)
    if pair.hi >= v:
        raise ShapeError(f"element {pair.hi} out of range for universe size {v}")
    return pair


@dataclass(frozen=True)
class PBTDesign:
    """An n x (2n-1) arrangement of pairs of a 2n-set (no empty cells).

    Construction checks only shape and element range; the balance conditions
    are the verifier's job.
    """

    n: int
    cells: Rows

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ShapeError(f"side must be >= 1, got {n}")
        rows = tuple(self.cells)
        if len(rows) != n:
            raise ShapeError(f"expected {n} rows, got {len(rows)}")
        width = 2 * n - 1
        coerced = []
        for row in rows:
            row = tuple(row)
            if len(row) != width:
                raise ShapeError(f"expected {width} columns, got {len(row)}")
            coerced.append(tuple(_coerce_cell(c, 2 * n, allow_empty=False) for c in row))
        object.__setattr__(self, "cells", tuple(coerced))

    @classmethod
    def from_rows(cls, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows:
            raise ShapeError("no rows")
        return cls(len(rows), rows)

    @property
    def width(self):
        return 2 * self.n - 1

    @property
    def center_col(self):
        return self.n - 1

    def cell(self, r, c):
        return self.cells[r][c]

    def column(self, c):
        return tuple(self.cells[r][c] for r in range(self.n))


@dataclass(frozen=True)
class HowellGrid:
    """An s x s grid over a v-element universe; cells may be empty."""

    s: int
    v: int
    cells: Rows

    def __post_init__(self):
        if self.s < 1:
            raise ShapeError(f"side must be >= 1, got {self.s}")
        rows = tuple(self.cells)
        if len(rows) != self.s:
            raise ShapeError(f"expected {self.s} rows, got {len(rows)}")
        coerced = []
        for row in rows:
            row = tuple(row)
            if len(row) != self.s:
                raise ShapeError(f"grid is not square: row of length {len(row)}, side {self.s}")
            coerced.append(tuple(_coerce_cell(c, self.v, allow_empty=True) for c in row))
        object.__setattr__(self, "cells", tuple(coerced))

    def cell(self, r, c):
        return self.cells[r][c]

    def column(self, c):
        return tuple(self.cells[r][c] for r in range(self.s))

    def last_column(self):
        return self.column(self.s - 1)


Grid = Union[PBTDesign, HowellGrid, Sequence]


def grid_rows(g: Grid) -> Rows:
    """The cell rows of a design, Howell grid, or bare row sequence."""
    if isinstance(g, (PBTDesign, HowellGrid)):
        return g.cells
    return tuple(tuple(row) for row in g)


def all_pairs(v):
    """All C(v,2) pairs on {0..v-1} in lexicographic (lo, hi) order."""
    return [UnorderedPair(a, b) for a in range(v) for b in range(a + 1, v)]


def center_matching(n):
    """The canonical middle column: (0,1), (2,3), ..., (2n-2, 2n-1)."""
    return tuple(UnorderedPair(2 * i, 2 * i + 1) for i in range(n))


def pair_set(g: Grid):
    """Set of pairs in occupied cells; smaller than the occupied count iff
    some pair repeats."""
    return {cell for row in grid_rows(g) for cell in row if cell is not None}


def split(t: PBTDesign):
    """Split into (left, center, right): the first n-1 columns, the middle
    column, and the last n-1 columns. Concatenating restores the design."""
    n = t.n
    left = tuple(row[: n - 1] for row in t.cells)
    center = tuple((row[n - 1],) for row in t.cells)
    right = tuple(row[n:] for row in t.cells)
    return left, center, right


def split_howell_pair(t: PBTDesign):
    """The two Howell grids (left | center) and (right | center) whose shared
    last column is the design's middle column."""
    left, center, right = split(t)
    n, v = t.n, 2 * t.n
    h1 = HowellGrid(n, v, tuple(l + c for l, c in zip(left, center)))
    h2 = HowellGrid(n, v, tuple(r + c for r, c in zip(right, center)))
    return h1, h2


def assemble_from_howell_pair(h1: HowellGrid, h2: HowellGrid) -> PBTDesign:
    """Assemble an n x (2n-1) design from two Howell grids sharing their last
    column: h1's first n-1 columns, the shared column, then h2's first n-1
    columns in the same order.

    Raises SharedColumnMismatch if the last columns differ, and
    AlmostDisjointViolation if the pair sets overlap outside the shared
    column or fail to cover all pairs together.
    """
    n = h1.s
    if h2.s != n:
        raise ShapeError(f"side mismatch: {h1.s} vs {h2.s}")
    if h1.v != 2 * n or h2.v != 2 * n:
        raise ShapeError(f"universe must have 2n = {2 * n} elements")
    shared = h1.last_column()
    if shared != h2.last_column():
        raise SharedColumnMismatch("last columns differ")
    if any(cell is None for row in h1.cells for cell in row) or any(
        cell is None for row in h2.cells for cell in row
    ):
        raise ShapeError("assembly requires fully occupied grids")
    p1, p2 = pair_set(h1), pair_set(h2)
    overlap = (p1 & p2) - set(shared)
    if overlap:
        raise AlmostDisjointViolation(
            f"{len(overlap)} pairs shared outside the common column, e.g. {min(overlap)}"
        )
    missing = set(all_pairs(2 * n)) - (p1 | p2)
    if missing:
        raise AlmostDisjointViolation(f"{len(missing)} pairs covered by neither grid")
    rows = tuple(
        h1.cells[r][: n - 1] + (shared[r],) + h2.cells[r][: n - 1] for r in range(n)
    )
    return PBTDesign(n, rows)


def apply_element_permutation(g: Grid, p: Permutation):
    """Replace every pair {a, b} by {p(a), p(b)}; shape is unchanged."""
    if isinstance(g, PBTDesign):
        if p.degree != 2 * g.n:
            raise DomainMismatch(f"permutation degree {p.degree}, universe {2 * g.n}")
        return PBTDesign(g.n, _permute_rows_cells(g.cells, p))
    if isinstance(g, HowellGrid):
        if p.degree != g.v:
            raise DomainMismatch(f"permutation degree {p.degree}, universe {g.v}")
        return HowellGrid(g.s, g.v, _permute_rows_cells(g.cells, p))
    rows = grid_rows(g)
    top = max((cell[1] for row in rows for cell in row if cell is not None), default=-1)
    if top >= p.degree:
        raise DomainMismatch(f"permutation degree {p.degree} too small for element {top}")
    return _permute_rows_cells(rows, p)


def _permute_rows_cells(rows, p):
    return tuple(
        tuple(None if cell is None else p.apply_pair(cell) for cell in row)
        for row in rows
    )
