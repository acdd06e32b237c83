"""Exact condition checks for tournament designs and Howell grids, producing
reports that enumerate every violation with its coordinates."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    HowellGrid,
    PBTDesign,
    all_pairs,
    pair_set,
    split_howell_pair,
)
from .errors import ShapeError

# Condition identifiers, also used in --explain output and JSON reports.
PBTD_CONDITIONS = {
    "C0": "all C(2n,2) pairs on the 2n-set occur, each exactly once",
    "C1": "every element occurs in exactly one cell of each column",
    "C2": "every element occurs in at most two cells of each row",
    "C3": "each row's first n columns contain all 2n elements",
    "C4": "each row's last n columns contain all 2n elements",
}

HOWELL_CONDITIONS = {
    "H1": "every cell is empty or holds an unordered pair over the universe",
    "H2": "every element occurs exactly once in each row and each column",
    "H3": "no unordered pair occurs in more than one cell",
}

ALMOST_DISJOINT_CONDITIONS = {
    "SharedColumnMismatch": "the two grids' last columns are identical",
    "ExcessOverlap": "the pair sets intersect in exactly the shared column's pairs",
    "CoverageGap": "together the pair sets cover all C(2n,2) pairs",
}


@dataclass(frozen=True)
class Violation:
    """One violated condition, located by whichever coordinates apply."""

    condition: str
    row: Optional[int] = None
    column: Optional[int] = None
    element: Optional[int] = None
    pair: Optional[tuple] = None
    note: str = ""

    def __str__(self):
        where = []
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column {self.column}")
        if self.element is not None:
            where.append(f"element {self.element}")
        if self.pair is not None:
            where.append(f"pair {self.pair[0]},{self.pair[1]}")
        loc = " @ " + ", ".join(where) if where else ""
        note = f" ({self.note})" if self.note else ""
        return f"{self.condition}{loc}{note}"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a check: valid iff the violation list is empty."""

    violations: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))

    @property
    def valid(self):
        return not self.violations

    def conditions(self):
        return sorted({v.condition for v in self.violations})

    def to_dict(self):
        return {
            "valid": self.valid,
            "violations": [
                {
                    "condition": v.condition,
                    "row": v.row,
                    "column": v.column,
                    "element": v.element,
                    "pair": list(v.pair) if v.pair is not None else None,
                    "note": v.note,
                }
                for v in self.violations
            ],
        }

    def __str__(self):
        if self.valid:
            return "valid"
        lines = [f"invalid: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


def verify_pbtd(t: PBTDesign) -> VerificationReport:
    """Check conditions C0-C4 and report every violation."""
    n, v = t.n, 2 * t.n
    out = []

    pair_counts = Counter(cell for row in t.cells for cell in row)
    for pair, count in sorted(pair_counts.items()):
        if count > 1:
            out.append(
                Violation("C0", pair=pair, note=f"occurs {count} times, expected once")
            )

    for c in range(t.width):
        counts = Counter(e for r in range(n) for e in t.cells[r][c])
        for e in range(v):
            if counts[e] != 1:
                out.append(
                    Violation(
                        "C1",
                        column=c,
                        element=e,
                        note=f"occurs {counts[e]} times in column, expected once",
                    )
                )

    for r in range(n):
        counts = Counter(e for cell in t.cells[r] for e in cell)
        for e in range(v):
            if counts[e] > 2:
                out.append(
                    Violation(
                        "C2",
                        row=r,
                        element=e,
                        note=f"occurs {counts[e]} times in row, at most 2 allowed",
                    )
                )

    for cond, lo, hi in (("C3", 0, n), ("C4", n - 1, t.width)):
        for r in range(n):
            present = {e for cell in t.cells[r][lo:hi] for e in cell}
            for e in range(v):
                if e not in present:
                    section = "first" if cond == "C3" else "last"
                    out.append(
                        Violation(
                            cond,
                            row=r,
                            element=e,
                            note=f"missing from the {section} {n} columns",
                        )
                    )

    return VerificationReport(tuple(out))


def verify_howell(h: HowellGrid) -> VerificationReport:
    """Check conditions H1-H3 and report every violation."""
    if any(len(row) != h.s for row in h.cells):
        raise ShapeError("grid is not square")
    out = []

    # H1 is enforced structurally by HowellGrid/UnorderedPair construction;
    # nothing can reach this check with a malformed cell.

    for r in range(h.s):
        counts = Counter(e for cell in h.cells[r] if cell is not None for e in cell)
        for e in range(h.v):
            if counts[e] != 1:
                out.append(
                    Violation(
                        "H2",
                        row=r,
                        element=e,
                        note=f"occurs {counts[e]} times in row, expected once",
                    )
                )
    for c in range(h.s):
        counts = Counter(
            e for r in range(h.s) if h.cells[r][c] is not None for e in h.cells[r][c]
        )
        for e in range(h.v):
            if counts[e] != 1:
                out.append(
                    Violation(
                        "H2",
                        column=c,
                        element=e,
                        note=f"occurs {counts[e]} times in column, expected once",
                    )
                )

    pair_counts = Counter(cell for row in h.cells for cell in row if cell is not None)
    for pair, count in sorted(pair_counts.items()):
        if count > 1:
            out.append(
                Violation("H3", pair=pair, note=f"occurs {count} times, at most once allowed")
            )

    return VerificationReport(tuple(out))


def check_almost_disjoint(h1: HowellGrid, h2: HowellGrid) -> VerificationReport:
    """Check that two Howell grids overlap in exactly their shared last column
    and jointly cover all pairs of the universe."""
    if h1.s != h2.s or h1.v != h2.v:
        raise ShapeError(
            f"grids disagree in shape: {h1.s}x{h1.s}/{h1.v} vs {h2.s}x{h2.s}/{h2.v}"
        )
    out = []
    shared = h1.last_column()
    for r, (a, b) in enumerate(zip(shared, h2.last_column())):
        if a != b:
            out.append(
                Violation(
                    "SharedColumnMismatch",
                    row=r,
                    column=h1.s - 1,
                    note=f"{_cell_str(a)} vs {_cell_str(b)}",
                )
            )
    shared_pairs = {cell for cell in shared if cell is not None}
    p1, p2 = pair_set(h1), pair_set(h2)
    for pair in sorted((p1 & p2) - shared_pairs):
        out.append(Violation("ExcessOverlap", pair=pair, note="occurs in both grids"))
    for pair in sorted(set(all_pairs(h1.v)) - (p1 | p2)):
        out.append(Violation("CoverageGap", pair=pair, note="occurs in neither grid"))
    return VerificationReport(tuple(out))


def check_split_equivalence(t: PBTDesign) -> VerificationReport:
    """Cross-check: the design is valid iff its two halves (each taken with
    the middle column) are almost disjoint Howell grids. Runs both routes and
    reports each side's violations separately."""
    out = []
    direct = verify_pbtd(t)
    out.extend(_tagged(direct, "pbtd"))
    h1, h2 = split_howell_pair(t)
    out.extend(_tagged(verify_howell(h1), "left-howell"))
    out.extend(_tagged(verify_howell(h2), "right-howell"))
    out.extend(_tagged(check_almost_disjoint(h1, h2), "almost-disjoint"))
    return VerificationReport(tuple(out))


def _tagged(report, side):
    return [
        Violation(
            f"{side}:{v.condition}",
            row=v.row,
            column=v.column,
            element=v.element,
            pair=v.pair,
            note=v.note,
        )
        for v in report.violations
    ]


def _cell_str(cell):
    return "-" if cell is None else f"{cell[0]},{cell[1]}"
