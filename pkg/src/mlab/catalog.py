"""Group definition files, the bundled catalog, and the on-disk result cache.

File format (UTF-8, line oriented)::

    # comment
    group NAME
    tags TAG ...            (optional, right after the group line)
    perm (1 2 3)(4 5)       (one or more perm lines) ...
    end

or a multiplication table body ``table N`` followed by N rows of N
space-separated entries in ``0..N-1``; row g, column h holds the product of
g and h.  Element 0 must be the identity.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadPermutation,
    BadTable,
    CorruptCache,
    DuplicateName,
    GroupSyntaxError,
)

log = logging.getLogger(__name__)

ENCODING_VERSION = b"MLAB-TABLE-1"
ENGINE_VERSION = "1"
NAME_RE = re.compile(r"[A-Za-z0-9_.:^+\-]+")


def canonical_encoding(G) -> bytes:
    """Version-prefixed order + flattened multiplication table."""
    n = G.order
    body = np.asarray(G.mul, dtype=">u4").tobytes()
    return ENCODING_VERSION + n.to_bytes(4, "big") + body


# ---------------------------------------------------------------------------
# definitions


@dataclass(frozen=True)
class GroupDefinition:
    name: str
    kind: str  # "perm" or "table"
    perms: tuple = ()  # tuple of permutations, each a tuple of cycles
    rows: tuple = ()  # table rows
    tags: tuple = ()
    line: int = field(default=0, compare=False)
    source: str = field(default="", compare=False)

    @property
    def degree(self) -> int:
        return max((max(c) for p in self.perms for c in p), default=1)

    @property
    def order_hint(self) -> int | None:
        return len(self.rows) if self.kind == "table" else None

    def build(self, cap: int | None = None):
        from .groups import DEFAULT_CAP, build_group_from_perms, group_from_table, permutation_from_cycles

        if self.kind == "table":
            return group_from_table(self.rows, name=self.name)
        deg = self.degree
        gens = [permutation_from_cycles(p, deg) for p in self.perms]
        return build_group_from_perms(gens, self.name, cap=DEFAULT_CAP if cap is None else cap)


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.i = 0

    def next_content(self):
        """Next non-blank, non-comment line as (lineno, text), or None at EOF."""
        while self.i < len(self.lines):
            self.i += 1
            raw = self.lines[self.i - 1]
            s = raw.strip()
            if s and not s.startswith("#"):
                return self.i, raw
        return None


def _col(raw: str, pos: int) -> int:
    return pos + 1


def _parse_cycles(raw: str, start: int, lineno: int) -> tuple:
    """Cycles from raw[start:], columns reported 1-based against raw."""
    cycles = []
    seen = {}
    i = start
    n = len(raw)
    while i < n:
        ch = raw[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            break
        if ch != "(":
            raise GroupSyntaxError(f"expected '(' but found {ch!r}", lineno, _col(raw, i))
        j = raw.find(")", i)
        if j < 0:
            raise GroupSyntaxError("unclosed cycle", lineno, _col(raw, i))
        if "(" in raw[i + 1:j]:
            raise GroupSyntaxError("nested '('", lineno, _col(raw, raw.index("(", i + 1)))
        points = []
        for m in re.finditer(r"\S+", raw[i + 1:j]):
            tok, col = m.group(), i + 1 + m.start()
            if not tok.isdigit():
                raise GroupSyntaxError(f"cycle entry {tok!r} is not a positive integer", lineno, _col(raw, col))
            x = int(tok)
            if x < 1:
                raise GroupSyntaxError("points are numbered from 1", lineno, _col(raw, col))
            if x in seen:
                raise BadPermutation(f"point {x} appears twice", lineno, _col(raw, col))
            seen[x] = col
            points.append(x)
        if not points:
            raise GroupSyntaxError("empty cycle", lineno, _col(raw, i))
        cycles.append(tuple(points))
        i = j + 1
    if not cycles:
        raise GroupSyntaxError("perm needs at least one cycle", lineno, _col(raw, start))
    return tuple(cycles)


def _check_latin(rows, first_line: int, raw_rows):
    n = len(rows)
    full = set(range(n))
    for r, row in enumerate(rows):
        if set(row) != full:
            dup = next(c for c in range(n) if row.index(row[c]) != c)
            raise BadTable(f"row {r} repeats {row[dup]}", first_line + r, _token_col(raw_rows[r], dup))
    for c in range(n):
        col = [rows[r][c] for r in range(n)]
        if set(col) != full:
            dup = next(r for r in range(n) if col.index(col[r]) != r)
            raise BadTable(f"column {c} repeats {col[dup]}", first_line + dup, _token_col(raw_rows[dup], c))
    if list(rows[0]) != list(range(n)) or [row[0] for row in rows] != list(range(n)):
        raise BadTable("element 0 must be the identity", first_line, 1)


def _token_col(raw: str, k: int) -> int:
    m = list(re.finditer(r"\S+", raw))
    return m[k].start() + 1 if k < len(m) else len(raw) + 1


def parse_group_file(text: str, source: str = "") -> list[GroupDefinition]:
    """Parse a group file; errors carry 1-based line and column."""
    src = _Lines(text)
    defs: list[GroupDefinition] = []
    names: dict[str, int] = {}
    while True:
        item = src.next_content()
        if item is None:
            return defs
        lineno, raw = item
        words = raw.split()
        lead = len(raw) - len(raw.lstrip())
        if words[0] != "group":
            raise GroupSyntaxError(f"expected 'group', found {words[0]!r}", lineno, lead + 1)
        if len(words) != 2:
            raise GroupSyntaxError("usage: group NAME", lineno, lead + 1)
        name = words[1]
        name_col = raw.index(name, lead + 5) + 1
        if not NAME_RE.fullmatch(name):
            raise GroupSyntaxError(f"invalid group name {name!r}", lineno, name_col)
        if name in names:
            raise DuplicateName(f"group {name!r} already defined on line {names[name]}", lineno, name_col)
        names[name] = lineno
        defs.append(_parse_body(src, name, lineno, source))


def _parse_body(src: _Lines, name: str, start_line: int, source: str) -> GroupDefinition:
    tags: tuple = ()
    perms = []
    rows = None
    first = True
    while True:
        item = src.next_content()
        if item is None:
            raise GroupSyntaxError(f"group {name!r} is missing 'end'", start_line, 1)
        lineno, raw = item
        stripped = raw.lstrip()
        lead = len(raw) - len(stripped)
        word = stripped.split()[0]
        if word == "end":
            if stripped.split() != ["end"]:
                raise GroupSyntaxError("unexpected text after 'end'", lineno, lead + 4)
            if not perms and rows is None:
                raise GroupSyntaxError(f"group {name!r} has an empty body", lineno, lead + 1)
            if rows is not None:
                return GroupDefinition(name, "table", rows=rows, tags=tags, line=start_line, source=source)
            return GroupDefinition(name, "perm", perms=tuple(perms), tags=tags, line=start_line, source=source)
        if word == "tags":
            if not first:
                raise GroupSyntaxError("'tags' must follow the group line", lineno, lead + 1)
            tags = tuple(stripped.split()[1:])
        elif word == "perm":
            if rows is not None:
                raise GroupSyntaxError("cannot mix 'perm' and 'table'", lineno, lead + 1)
            perms.append(_parse_cycles(raw, lead + 4, lineno))
        elif word == "table":
            if perms or rows is not None:
                raise GroupSyntaxError("cannot mix 'perm' and 'table'", lineno, lead + 1)
            rows = _parse_table(src, raw, lineno, lead)
        else:
            raise GroupSyntaxError(f"unknown keyword {word!r}", lineno, lead + 1)
        first = False


def _parse_table(src: _Lines, raw: str, lineno: int, lead: int) -> tuple:
    parts = raw.split()
    if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
        raise GroupSyntaxError("usage: table N with N >= 1", lineno, lead + 1)
    n = int(parts[1])
    rows, raws = [], []
    first_line = None
    for r in range(n):
        item = src.next_content()
        if item is None:
            raise GroupSyntaxError(f"table ends after {r} of {n} rows", lineno, lead + 1)
        ln, row_raw = item
        first_line = ln if first_line is None else first_line
        toks = list(re.finditer(r"\S+", row_raw))
        if toks and toks[0].group() == "end":
            raise GroupSyntaxError(f"table ends after {r} of {n} rows", ln, toks[0].start() + 1)
        if len(toks) != n:
            raise GroupSyntaxError(f"row has {len(toks)} entries, expected {n}", ln, 1)
        row = []
        for m in toks:
            t = m.group()
            if not t.isdigit() or int(t) >= n:
                raise GroupSyntaxError(f"table entry {t!r} is not in 0..{n - 1}", ln, m.start() + 1)
            row.append(int(t))
        rows.append(tuple(row))
        raws.append(row_raw)
    # the rows of a table are consecutive content lines; report against the first
    _check_latin(rows, first_line, raws)
    return tuple(rows)


def serialize(defs) -> str:
    """Text that parses back to equal definitions."""
    out = []
    for d in defs:
        out.append(f"group {d.name}")
        if d.tags:
            out.append("tags " + " ".join(d.tags))
        if d.kind == "table":
            out.append(f"table {len(d.rows)}")
            out.extend(" ".join(map(str, row)) for row in d.rows)
        else:
            for p in d.perms:
                out.append("perm " + "".join("(" + " ".join(map(str, c)) + ")" for c in p))
        out.append("end")
        out.append("")
    return "\n".join(out)


def definition_from_table(G, name: str | None = None) -> GroupDefinition:
    rows = tuple(tuple(int(x) for x in r) for r in np.asarray(G.mul))
    return GroupDefinition(name or G.name, "table", rows=rows)


# ---------------------------------------------------------------------------
# catalogs


def bundled_catalog_dir() -> Path:
    return Path(__file__).resolve().parent / "data" / "catalog"


def load_catalog(path=None) -> list[GroupDefinition]:
    """Definitions from a file, or from every ``*.grp`` below a directory."""
    path = bundled_catalog_dir() if path is None else Path(path)
    if path.is_dir():
        files = sorted(path.rglob("*.grp"), key=lambda f: f.relative_to(path).as_posix())
    else:
        files = [path]
    defs = []
    names: dict[str, str] = {}
    for f in files:
        for d in parse_group_file(f.read_text(encoding="utf-8"), source=str(f)):
            if d.name in names:
                raise DuplicateName(f"group {d.name!r} defined in {names[d.name]} and {f}", d.line, 1)
            names[d.name] = str(f)
            defs.append(d)
    return defs


# ---------------------------------------------------------------------------
# result cache


def cache_dir() -> Path | None:
    d = os.environ.get("MLAB_CACHE_DIR")
    return Path(d) if d else None


@dataclass(frozen=True)
class CacheEntry:
    digest: str
    kind: str
    e: int
    payload: object
    engine_version: str = ENGINE_VERSION
    encoding: str = ""  # base64 of the full canonical encoding

    def to_json(self) -> str:
        return json.dumps(
            {
                "digest": self.digest,
                "kind": self.kind,
                "e": self.e,
                "payload": self.payload,
                "engine_version": self.engine_version,
                "encoding": self.encoding,
            },
            sort_keys=True,
        )


def cache_key(G, kind: str, e: int) -> tuple[str, str, int]:
    return hashlib.sha256(canonical_encoding(G)).hexdigest(), kind, int(e)


def _entry_path(root: Path, digest: str, kind: str, e: int) -> Path:
    return root / digest[:2] / f"{digest}-{kind}-{e}.json"


def cache_get(G, kind: str, e: int, root: Path | None = None):
    """Cached payload, or None on a miss or a stale engine version.

    Raises CorruptCache when a file exists but cannot be trusted.
    """
    root = root or cache_dir()
    if root is None:
        return None
    digest, kind, e = cache_key(G, kind, e)
    path = _entry_path(root, digest, kind, e)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CorruptCache(f"{path}: {exc}") from exc
    if not isinstance(data, dict) or "engine_version" not in data:
        raise CorruptCache(f"{path}: malformed entry")
    if data["engine_version"] != ENGINE_VERSION:
        return None
    want = base64.b64encode(canonical_encoding(G)).decode()
    if (data.get("digest"), data.get("kind"), data.get("e"), data.get("encoding")) != (digest, kind, e, want):
        raise CorruptCache(f"{path}: key mismatch")
    return data["payload"]


def cache_put(G, kind: str, e: int, payload, root: Path | None = None) -> Path | None:
    root = root or cache_dir()
    if root is None:
        return None
    digest, kind, e = cache_key(G, kind, e)
    entry = CacheEntry(digest, kind, e, payload, engine_version=ENGINE_VERSION, encoding=base64.b64encode(canonical_encoding(G)).decode())
    path = _entry_path(root, digest, kind, e)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(entry.to_json())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cached(G, kind: str, e: int, compute, root: Path | None = None):
    """Payload from the cache, computing and storing it on a miss.

    A corrupt entry is never used: it is logged, recomputed and overwritten.
    """
    try:
        hit = cache_get(G, kind, e, root)
    except CorruptCache as exc:
        log.warning("ignoring corrupt cache entry: %s", exc)
        hit = None
    if hit is not None:
        return hit
    payload = compute()
    cache_put(G, kind, e, payload, root)
    return payload


__all__ = [
    "CacheEntry",
    "ENCODING_VERSION",
    "ENGINE_VERSION",
    "GroupDefinition",
    "bundled_catalog_dir",
    "cache_get",
    "cache_key",
    "cache_put",
    "cached",
    "canonical_encoding",
    "definition_from_table",
    "load_catalog",
    "parse_group_file",
    "serialize",
]
