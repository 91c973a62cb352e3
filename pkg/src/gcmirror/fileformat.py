"""Sectioned key-value structure files.

    [meta]
    n = 2
    periodic = false

    [semiflat]
    J12 = [["1", "0"], ["0", "1"]]
    ...

Matrices are JSON lists of polynomial strings; a value may continue on
indented lines.  ``#`` starts a comment.  Positions in error messages are
1-based and point into the original file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .gcs import GCStructure
from .grammar import ParseError, parse_poly
from .linalg import Mat
from .scalar import Context, PolyScalar, format_poly
from .semiflat import AdaptedBlocks, BraneDatum

SECTIONS = ("meta", "gcs", "semiflat", "kahler", "brane")
PRIMARY = ("gcs", "semiflat", "kahler")
BLOCK_KEYS = ("J12", "J13", "J22", "J31")
PARTNER_KEYS = ("Jp12", "Jp13", "Jp22", "Jp31")
GCS_KEYS = ("J1", "J2", "J3", "J4")


class FormatError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class Value:
    text: str
    line: int
    column: int


@dataclass
class RawFile:
    sections: dict[str, dict[str, Value]] = field(default_factory=dict)
    section_lines: dict[str, int] = field(default_factory=dict)


_SECTION = re.compile(r"^\[([A-Za-z]+)\]\s*$")
_KEY = re.compile(r"^([A-Za-z][A-Za-z0-9_']*)\s*=\s*(.*)$")


def _strip_comment(line: str) -> str:
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).rstrip()


def read_raw(text: str) -> RawFile:
    raw = RawFile()
    current: dict | None = None
    last: Value | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip_comment(line)
        if not body.strip():
            continue
        if body[0] in " \t" and last is not None:
            last.text += "\n" + body
            continue
        m = _SECTION.match(body)
        if m:
            name = m.group(1)
            if name not in SECTIONS:
                raise FormatError(f"unknown section [{name}]", lineno, 1)
            if name in raw.sections:
                raise FormatError(f"duplicate section [{name}]", lineno, 1)
            current = raw.sections[name] = {}
            raw.section_lines[name] = lineno
            last = None
            continue
        m = _KEY.match(body)
        if not m:
            raise FormatError("expected 'key = value' or '[section]'", lineno, 1)
        if current is None:
            raise FormatError("key outside of any section", lineno, 1)
        key = m.group(1)
        if key in current:
            raise FormatError(f"duplicate key {key!r}", lineno, 1)
        last = current[key] = Value(m.group(2), lineno, m.start(2) + 1)
    return raw


# -- value parsers -----------------------------------------------------------

def _position(v: Value, offset: int) -> tuple[int, int]:
    before = v.text[:offset]
    line = v.line + before.count("\n")
    if "\n" in before:
        return line, offset - before.rfind("\n")
    return line, v.column + offset


def _json(v: Value):
    try:
        return json.loads(v.text)
    except json.JSONDecodeError as exc:
        line, col = _position(v, exc.pos)
        raise FormatError(f"malformed list: {exc.msg}", line, col) from None


_STRING = re.compile(r'"((?:[^"\\]|\\.)*)"')


def parse_matrix(v: Value, ctx: Context, size: int, name: str) -> Mat:
    data = _json(v)
    if not (isinstance(data, list) and all(isinstance(r, list) for r in data)):
        raise FormatError(f"{name} must be a list of rows", v.line, v.column)
    if len(data) != size or any(len(r) != size for r in data):
        raise FormatError(f"{name} must be {size}x{size}", v.line, v.column)
    spots = [m.start(1) for m in _STRING.finditer(v.text)]
    flat = [x for r in data for x in r]
    if not all(isinstance(x, (str, int)) for x in flat):
        raise FormatError(f"{name} entries must be polynomial strings", v.line, v.column)
    out, k = [], 0
    for r in data:
        row = []
        for x in r:
            if isinstance(x, int):
                row.append(PolyScalar.const(ctx, x))
                continue
            try:
                row.append(parse_poly(x, ctx))
            except (ParseError, ValueError, KeyError) as exc:
                where = spots[k] if k < len(spots) else 0
                col_in = getattr(exc, "column", 1) - 1
                line, col = _position(v, where + col_in)
                msg = str(exc).split(": ", 1)[-1] if isinstance(exc, ParseError) else str(exc).strip("'\"")
                raise FormatError(f"{name}: {msg}", line, col) from None
            k += 1
        out.append(row)
    return Mat(out)


def parse_int(v: Value, name: str) -> int:
    try:
        return int(v.text.strip())
    except ValueError:
        raise FormatError(f"{name} must be an integer", v.line, v.column) from None


def parse_bool(v: Value, name: str) -> bool:
    t = v.text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise FormatError(f"{name} must be true or false", v.line, v.column)


def parse_points(v: Value, n: int) -> list[dict[str, Fraction]]:
    data = _json(v)
    if not isinstance(data, list) or any(not isinstance(p, list) or len(p) != n for p in data):
        raise FormatError(f"samples must be a list of points with {n} coordinates", v.line, v.column)
    try:
        return [{f"x{k + 1}": Fraction(str(q)) for k, q in enumerate(p)} for p in data]
    except (ValueError, ZeroDivisionError):
        raise FormatError("sample coordinates must be rational numbers", v.line, v.column) from None


def parse_index_list(v: Value, n: int, name: str) -> list[int]:
    data = _json(v)
    if not isinstance(data, list) or not all(isinstance(i, int) and 1 <= i <= n for i in data):
        raise FormatError(f"{name} must list indices between 1 and {n}", v.line, v.column)
    if len(set(data)) != len(data):
        raise FormatError(f"{name} repeats an index", v.line, v.column)
    return [i - 1 for i in data]


# -- structure files ---------------------------------------------------------

@dataclass
class StructureFile:
    ctx: Context
    kind: str
    gcs: GCStructure | None = None
    blocks: AdaptedBlocks | None = None
    partner: AdaptedBlocks | None = None
    samples: list[dict] | None = None
    brane: BraneDatum | None = None


def _expect_keys(sec: dict[str, Value], keys: Sequence[str], name: str, line: int):
    for k in keys:
        if k not in sec:
            raise FormatError(f"[{name}] is missing {k}", line, 1)
    for k, v in sec.items():
        if k not in keys:
            raise FormatError(f"[{name}] has unexpected key {k!r}", v.line, 1)


def _adapted(sec, keys, ctx, n) -> AdaptedBlocks:
    mats = [parse_matrix(sec[k], ctx, n, k) for k in keys]
    return AdaptedBlocks(ctx, *mats)


def loads(text: str) -> StructureFile:
    raw = read_raw(text)
    if "meta" not in raw.sections:
        raise FormatError("missing [meta] section", 1, 1)
    meta = raw.sections["meta"]
    if "n" not in meta:
        raise FormatError("[meta] is missing n", raw.section_lines["meta"], 1)
    n = parse_int(meta["n"], "n")
    if n < 1:
        raise FormatError("n must be positive", meta["n"].line, meta["n"].column)
    periodic = parse_bool(meta["periodic"], "periodic") if "periodic" in meta else False
    if "coordinates" in meta:
        v = meta["coordinates"]
        names = [s.strip() for s in v.text.split(",")]
        if names != [f"x{k + 1}" for k in range(n)]:
            raise FormatError(f"coordinates must be x1..x{n}", v.line, v.column)
    for k, v in meta.items():
        if k not in ("n", "periodic", "coordinates"):
            raise FormatError(f"[meta] has unexpected key {k!r}", v.line, 1)
    ctx = Context(n, periodic)
    primary = [s for s in PRIMARY if s in raw.sections]
    if len(primary) != 1:
        raise FormatError("exactly one of [gcs], [semiflat], [kahler] is required", 1, 1)
    kind = primary[0]
    sec, line = raw.sections[kind], raw.section_lines[kind]
    out = StructureFile(ctx, kind)
    if kind == "gcs":
        _expect_keys(sec, ("rank",) + GCS_KEYS, kind, line)
        m = parse_int(sec["rank"], "rank")
        if m < 1:
            raise FormatError("rank must be positive", sec["rank"].line, sec["rank"].column)
        out.gcs = GCStructure(ctx, *[parse_matrix(sec[k], ctx, m, k) for k in GCS_KEYS])
    elif kind == "semiflat":
        _expect_keys(sec, BLOCK_KEYS, kind, line)
        out.blocks = _adapted(sec, BLOCK_KEYS, ctx, n)
    else:
        has_samples = ("samples",) if "samples" in sec else ()
        _expect_keys(sec, BLOCK_KEYS + PARTNER_KEYS + has_samples, kind, line)
        out.blocks = _adapted(sec, BLOCK_KEYS, ctx, n)
        out.partner = _adapted(sec, PARTNER_KEYS, ctx, n)
        if has_samples:
            out.samples = parse_points(sec["samples"], n)
    if "brane" in raw.sections:
        if kind != "semiflat":
            raise FormatError("[brane] needs a [semiflat] structure", raw.section_lines["brane"], 1)
        b = raw.sections["brane"]
        _expect_keys(b, ("S", "W"), "brane", raw.section_lines["brane"])
        out.brane = BraneDatum.of(parse_index_list(b["S"], n, "S"), parse_index_list(b["W"], n, "W"))
    return out


def load(path: str) -> StructureFile:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# -- writing -----------------------------------------------------------------

def format_matrix(M: Mat) -> str:
    return json.dumps([[format_poly(a) for a in r] for r in M.rows])


def _q(x) -> str:
    return str(Fraction(x.re) if hasattr(x, "re") else Fraction(x))


def dumps(sf: StructureFile) -> str:
    lines = ["[meta]", f"n = {sf.ctx.n}", f"periodic = {'true' if sf.ctx.periodic else 'false'}", ""]
    if sf.kind == "gcs":
        lines += ["[gcs]", f"rank = {sf.gcs.m}"]
        lines += [f"{k} = {format_matrix(M)}" for k, M in zip(GCS_KEYS, sf.gcs.blocks())]
    elif sf.kind == "semiflat":
        lines += ["[semiflat]"]
        lines += [f"{k} = {format_matrix(M)}" for k, M in zip(BLOCK_KEYS, sf.blocks.blocks())]
    else:
        lines += ["[kahler]"]
        lines += [f"{k} = {format_matrix(M)}" for k, M in zip(BLOCK_KEYS, sf.blocks.blocks())]
        lines += [f"{k} = {format_matrix(M)}" for k, M in zip(PARTNER_KEYS, sf.partner.blocks())]
        if sf.samples is not None:
            pts = [[_q(p[f"x{k + 1}"]) for k in range(sf.ctx.n)] for p in sf.samples]
            lines.append("samples = " + json.dumps(pts))
    if sf.brane is not None:
        lines += ["", "[brane]", f"S = {json.dumps(sorted(i + 1 for i in sf.brane.S))}",
                  f"W = {json.dumps(sorted(i + 1 for i in sf.brane.W))}"]
    return "\n".join(lines) + "\n"
