"""Plain-text documents for designs, Howell grids, orbit templates and search
checkpoints.

Grammar: the first significant line is `KIND key=value ...`; each body line
holds cells separated by `|`; a grid cell is `a,b` with a < b, or `-` for an
empty Howell cell; template cells are `g<id>` (free) or `g<id>^<k>` (image);
`#` starts a comment line; whitespace around tokens is ignored; a blank line
ends a document.

Canonical serialization joins cells with ` | `, writes pairs as `a,b`, and is
byte-stable: parsing a canonical document and serializing it again reproduces
the input exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import Permutation, UnorderedPair
from .errors import ParseError, RangeError
from .symmetry import Free, Image, OrbitTemplate

KINDS = ("PBTD", "HOWELL", "TEMPLATE", "CHECKPOINT")

# canonical header key order per kind
_HEADER_KEYS = {
    "PBTD": ("n",),
    "HOWELL": ("s", "v"),
    "TEMPLATE": ("pi",),
    "CHECKPOINT": ("n", "mode", "depth", "symmetry", "seed"),
}

_INT_KEYS = {"n", "s", "v", "depth"}


@dataclass(frozen=True)
class DesignDocument:
    """A parsed document: kind, typed header fields, and body rows."""

    kind: str
    header: dict
    body: tuple

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(tuple(row) for row in self.body))

    def __eq__(self, other):
        if not isinstance(other, DesignDocument):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.header == other.header
            and self.body == other.body
        )

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.header.items())), self.body))


class CheckpointData(NamedTuple):
    """Search frontier: every prefix has `depth` assignments in decision order."""

    n: int
    mode: str
    depth: int
    symmetry: bool
    seed: Optional[int]
    prefixes: tuple


def parse(text: str) -> DesignDocument:
    """Parse exactly one document."""
    docs = parse_documents(text)
    if len(docs) != 1:
        raise ParseError(f"expected exactly one document, found {len(docs)}")
    return docs[0]


def parse_documents(text: str) -> list:
    """Parse a stream of blank-line-separated documents."""
    docs = []
    block, start_line = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            if block:
                docs.append(_parse_block(block, start_line))
                block, start_line = [], None
            continue
        if stripped.startswith("#"):
            continue
        if not block:
            start_line = lineno
        block.append((lineno, raw))
    if block:
        docs.append(_parse_block(block, start_line))
    return docs


def _parse_block(lines, start_line):
    header_line, header_raw = lines[0]
    tokens = header_raw.split()
    kind = tokens[0]
    if kind not in KINDS:
        raise ParseError(f"unknown document kind {kind!r}", line=header_line, column=1)
    header = {}
    for token in tokens[1:]:
        if "=" not in token:
            raise ParseError(f"bad header token {token!r}", line=header_line)
        key, value = token.split("=", 1)
        if key not in _HEADER_KEYS[kind]:
            raise ParseError(f"unknown header key {key!r} for {kind}", line=header_line)
        if key in header:
            raise ParseError(f"duplicate header key {key!r}", line=header_line)
        header[key] = _parse_header_value(kind, key, value, header_line)
    for key in _HEADER_KEYS[kind]:
        if key not in header:
            raise ParseError(f"{kind} header is missing {key}=", line=header_line)

    body_lines = lines[1:]
    if kind == "PBTD":
        return _grid_document(kind, header, body_lines, bound=2 * header["n"], allow_empty=False)
    if kind == "HOWELL":
        return _grid_document(kind, header, body_lines, bound=header["v"], allow_empty=True)
    if kind == "CHECKPOINT":
        return _grid_document(kind, header, body_lines, bound=2 * header["n"], allow_empty=False)
    return _template_document(header, body_lines)


def _parse_header_value(kind, key, value, lineno):
    if key in _INT_KEYS:
        try:
            n = int(value)
        except ValueError:
            raise ParseError(f"{key}= expects an integer, got {value!r}", line=lineno)
        if n < 0:
            raise ParseError(f"{key}= must be non-negative", line=lineno)
        return n
    if key == "pi":
        try:
            images = tuple(int(x) for x in value.split(","))
            return Permutation(images)
        except ValueError as exc:
            raise ParseError(f"bad pi= value: {exc}", line=lineno)
    if key == "mode":
        if value not in ("full", "template", "mate"):
            raise ParseError(f"mode= must be full, template or mate, got {value!r}", line=lineno)
        return value
    if key == "symmetry":
        if value not in ("on", "off"):
            raise ParseError(f"symmetry= must be on or off, got {value!r}", line=lineno)
        return value == "on"
    if key == "seed":
        if value == "-":
            return None
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"seed= expects an integer or -, got {value!r}", line=lineno)
    raise AssertionError(key)


def _split_cells(lineno, raw):
    """Yield (token, 1-based char column of token start) for each `|` field."""
    offset = 0
    for field in raw.split("|"):
        token = field.strip()
        if not token:
            raise ParseError("empty cell", line=lineno, column=offset + 1)
        yield token, offset + field.index(token) + 1
        offset += len(field) + 1


def _grid_document(kind, header, body_lines, bound, allow_empty):
    rows = []
    for lineno, raw in body_lines:
        row = []
        for token, col in _split_cells(lineno, raw):
            row.append(_parse_pair_cell(token, bound, allow_empty, lineno, col))
        rows.append(tuple(row))
    if not rows:
        raise ParseError(f"{kind} document has no body rows")

    if kind == "PBTD":
        n = header["n"]
        _require_shape(rows, n, 2 * n - 1, body_lines, f"PBTD n={n}")
    elif kind == "HOWELL":
        s = header["s"]
        _require_shape(rows, s, s, body_lines, f"HOWELL s={s}")
    else:  # CHECKPOINT: rectangular, depth columns
        depth = header["depth"]
        for (lineno, _), row in zip(body_lines, rows):
            if len(row) != depth:
                raise ParseError(
                    f"checkpoint prefix has {len(row)} cells, depth={depth}", line=lineno
                )
    return DesignDocument(kind, header, tuple(rows))


def _require_shape(rows, want_rows, want_cols, body_lines, what):
    if len(rows) != want_rows:
        raise ParseError(f"{what} needs {want_rows} body rows, found {len(rows)}")
    for (lineno, _), row in zip(body_lines, rows):
        if len(row) != want_cols:
            raise ParseError(f"{what} needs {want_cols} cells per row, found {len(row)}", line=lineno)


def _parse_pair_cell(token, bound, allow_empty, lineno, col):
    if token == "-":
        if not allow_empty:
            raise ParseError("empty cell not allowed here", line=lineno, column=col)
        return None
    m = re.fullmatch(r"(\d+)\s*,\s*(\d+)", token)
    if not m:
        raise ParseError(f"bad cell {token!r}", line=lineno, column=col)
    a, b = int(m.group(1)), int(m.group(2))
    if a >= b:
        raise RangeError(f"cell {token!r} needs a < b", line=lineno, column=col)
    if b >= bound:
        raise RangeError(
            f"element {b} out of range 0..{bound - 1}", line=lineno, column=col
        )
    return UnorderedPair(a, b)


_SLOT_RE = re.compile(r"g(\d+)(?:\^(\d+))?$")


def _template_document(header, body_lines):
    pi = header["pi"]
    rows = []
    free_ids = set()
    for lineno, raw in body_lines:
        row = []
        for token, col in _split_cells(lineno, raw):
            m = _SLOT_RE.match(token)
            if not m:
                raise ParseError(f"bad template slot {token!r}", line=lineno, column=col)
            gen = int(m.group(1))
            if m.group(2) is None:
                if gen in free_ids:
                    raise ParseError(f"generator g{gen} defined twice", line=lineno, column=col)
                free_ids.add(gen)
                row.append(Free(gen))
            else:
                row.append(Image(gen, int(m.group(2))))
        rows.append(tuple(row))
    if not rows:
        raise ParseError("TEMPLATE document has no body rows")
    width = len(rows[0])
    for (lineno, _), row in zip(body_lines, rows):
        if len(row) != width:
            raise ParseError("template rows differ in length", line=lineno)
    for row in rows:
        for slot in row:
            if isinstance(slot, Image) and slot.gen not in free_ids:
                raise ParseError(f"image slot references undefined generator g{slot.gen}")
    return DesignDocument("TEMPLATE", {"pi": pi}, tuple(rows))


def serialize(doc: DesignDocument) -> str:
    """Canonical text form; deterministic and round-trip stable."""
    parts = [doc.kind]
    for key in _HEADER_KEYS[doc.kind]:
        parts.append(f"{key}={_header_value_str(key, doc.header[key])}")
    lines = [" ".join(parts)]
    for row in doc.body:
        lines.append(" | ".join(_cell_str(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _header_value_str(key, value):
    if key == "pi":
        return str(value)
    if key == "symmetry":
        return "on" if value else "off"
    if key == "seed":
        return "-" if value is None else str(value)
    return str(value)


def _cell_str(cell):
    if cell is None:
        return "-"
    if isinstance(cell, Free):
        return f"g{cell.gen}"
    if isinstance(cell, Image):
        return f"g{cell.gen}^{cell.exp}"
    return f"{cell[0]},{cell[1]}"


# --- conversions between documents and domain objects ---


def document_from_pbtd(t) -> DesignDocument:
    return DesignDocument("PBTD", {"n": t.n}, t.cells)


def pbtd_from_document(doc: DesignDocument):
    from .core import PBTDesign

    if doc.kind != "PBTD":
        raise ParseError(f"expected a PBTD document, got {doc.kind}")
    return PBTDesign(doc.header["n"], doc.body)


def document_from_howell(h) -> DesignDocument:
    return DesignDocument("HOWELL", {"s": h.s, "v": h.v}, h.cells)


def howell_from_document(doc: DesignDocument):
    from .core import HowellGrid

    if doc.kind != "HOWELL":
        raise ParseError(f"expected a HOWELL document, got {doc.kind}")
    return HowellGrid(doc.header["s"], doc.header["v"], doc.body)


def document_from_template(tmpl: OrbitTemplate) -> DesignDocument:
    return DesignDocument("TEMPLATE", {"pi": tmpl.pi}, tmpl.slots)


def template_from_document(doc: DesignDocument) -> OrbitTemplate:
    if doc.kind != "TEMPLATE":
        raise ParseError(f"expected a TEMPLATE document, got {doc.kind}")
    return OrbitTemplate(doc.header["pi"], doc.body)


def document_from_checkpoint(data: CheckpointData) -> DesignDocument:
    header = {
        "n": data.n,
        "mode": data.mode,
        "depth": data.depth,
        "symmetry": data.symmetry,
        "seed": data.seed,
    }
    return DesignDocument("CHECKPOINT", header, data.prefixes)


def checkpoint_from_document(doc: DesignDocument) -> CheckpointData:
    if doc.kind != "CHECKPOINT":
        raise ParseError(f"expected a CHECKPOINT document, got {doc.kind}")
    h = doc.header
    return CheckpointData(h["n"], h["mode"], h["depth"], h["symmetry"], h["seed"], doc.body)
