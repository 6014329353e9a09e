"""The m(k) table: generation, rendering, and cross-checks.

Two reference sources ship with the package: the corrected published table
(``data/published_table.csv``) and b-files for the four OEIS sequences that
carry its columns.  Network fetching of b-files is opt-in.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .formula import profile

# rows printed in bold in the published table (changed by the corrected alpha_k(2))
BOLD_ROWS = frozenset({14, 28, 56, 62, 70, 98, 112, 124, 140})

SEQUENCE_COLUMNS = {
    "A370252": "m",
    "A005729": "m_over_k",
    "A005730": "a",
    "A005731": "b",
}
COLUMNS = ("a", "b", "m_over_k", "m")

ENDPOINT_ENV = "MKWARING_OEIS_ENDPOINT"
DEFAULT_ENDPOINT = "https://oeis.org/{id}/b{num}.txt"

SEP = "·"


@dataclass(frozen=True)
class TableRow:
    k: int
    a: int
    a_factored: str
    b: int
    b_factored: str
    m_over_k: int
    m: int
    corrected: bool = False


def factored(parts: Sequence[int]) -> str:
    """"4·3=12" for several prime-power factors, bare "2" for one, "1" for none."""
    parts = [p for p in parts if p != 1]
    if not parts:
        return "1"
    if len(parts) == 1:
        return str(parts[0])
    total = 1
    for p in parts:
        total *= p
    return SEP.join(map(str, parts)) + f"={total}"


def parse_factored(text: str) -> int:
    text = text.strip()
    if "=" in text:
        lhs, rhs = text.split("=")
        value = int(rhs)
        prod = 1
        for part in lhs.split(SEP):
            prod *= int(part)
        if prod != value:
            raise ValueError(f"factored string {text!r} is inconsistent")
        return value
    return int(text)


def build_rows(k_from: int, k_to: int, legacy: bool = False) -> list[TableRow]:
    if k_from < 1 or k_to < k_from:
        raise ValueError(f"invalid range {k_from}..{k_to}")
    rows = []
    for k in range(k_from, k_to + 1):
        prof = profile(k, legacy=legacy)
        a_parts = [p**e for p, e in sorted(prof.alpha.items()) if e]
        b_parts = [p**e for p, e in sorted(prof.beta.items()) if e]
        rows.append(TableRow(
            k, prof.a, factored(a_parts), prof.b, factored(b_parts),
            prof.a * prof.b, prof.m, k in BOLD_ROWS,
        ))
    return rows


# ---------------------------------------------------------------------------
# rendering


def render(rows: Sequence[TableRow], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "a", "b", "m_over_k", "m", "corrected"])
        for r in rows:
            w.writerow([r.k, r.a, r.b, r.m_over_k, r.m, int(r.corrected)])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([
            {
                "k": str(r.k), "a": str(r.a), "a_factored": r.a_factored,
                "b": str(r.b), "b_factored": r.b_factored,
                "m_over_k": str(r.m_over_k), "m": str(r.m), "corrected": r.corrected,
            }
            for r in rows
        ], indent=2, ensure_ascii=False) + "\n"
    if fmt == "markdown":
        lines = ["| k | a(k) | b(k) | m(k)/k | m(k) |", "|---:|---:|---:|---:|---:|"]
        for r in rows:
            cells = [str(r.k), r.a_factored, r.b_factored, str(r.m_over_k), str(r.m)]
            if r.corrected:
                cells = [f"**{c}**" for c in cells]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# comparison against the published table


@dataclass
class ComparisonReport:
    source: str
    compared: int = 0
    mismatches: list = field(default_factory=list)  # (k, column, expected, got)
    missing: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.missing

    def lines(self) -> list[str]:
        out = [f"{self.source}: compared {self.compared} rows, "
               f"{len(self.mismatches)} mismatches, {len(self.missing)} missing"]
        for k, col, exp, got in self.mismatches:
            out.append(f"  k={k} {col}: expected {exp}, got {got}")
        if self.missing:
            out.append(f"  missing rows: {', '.join(map(str, self.missing))}")
        return out


@dataclass(frozen=True)
class FixtureRow:
    k: int
    a: str
    b: str
    m_over_k: int
    m: int
    bold: bool


def load_fixture() -> dict[int, FixtureRow]:
    text = resources.files("mkwaring").joinpath("data/published_table.csv").read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    out = {}
    for rec in csv.DictReader(lines):
        k = int(rec["k"])
        out[k] = FixtureRow(k, rec["a"], rec["b"], int(rec["m_over_k"]), int(rec["m"]), rec["bold"] == "1")
    return out


def compare_fixture(rows: Sequence[TableRow], fixture: Optional[dict[int, FixtureRow]] = None) -> ComparisonReport:
    fixture = load_fixture() if fixture is None else fixture
    report = ComparisonReport("published table")
    by_k = {r.k: r for r in rows}
    for k in sorted(fixture):
        exp = fixture[k]
        got = by_k.get(k)
        if got is None:
            report.missing.append(k)
            continue
        report.compared += 1
        expected = {
            "a": parse_factored(exp.a), "b": parse_factored(exp.b),
            "m_over_k": exp.m_over_k, "m": exp.m,
            "a_factored": exp.a, "b_factored": exp.b,
        }
        for col, val in expected.items():
            if getattr(got, col) != val:
                report.mismatches.append((k, col, val, getattr(got, col)))
    return report


# ---------------------------------------------------------------------------
# OEIS b-files


class BFileError(Exception):
    pass


class BFileParseError(BFileError):
    def __init__(self, path: str, lineno: int, line: str, why: str):
        super().__init__(f"{path}:{lineno}: {why}: {line!r}")
        self.lineno = lineno


class FetchError(BFileError):
    pass


class FetchTimeout(FetchError):
    pass


class MalformedResponse(FetchError):
    pass


@dataclass(frozen=True)
class BFile:
    sequence_id: str
    entries: tuple  # (index, value) pairs

    @property
    def offset(self) -> int:
        return self.entries[0][0] if self.entries else 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)


_A_NUMBER = re.compile(r"A(\d{6})")


def normalize_id(seq: str) -> str:
    m = re.fullmatch(r"[Aa]?(\d{1,6})", seq.strip())
    if not m:
        raise ValueError(f"not an OEIS A-number: {seq!r}")
    return f"A{int(m.group(1)):06d}"


def parse_bfile(text: str, sequence_id: str = "", source: str = "<string>") -> BFile:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            if not sequence_id:
                m = _A_NUMBER.search(line)
                if m:
                    sequence_id = m.group(0)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileParseError(source, lineno, raw, "expected '<index> <value>'")
        try:
            idx, val = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileParseError(source, lineno, raw, "non-integer field") from None
        if entries and idx != entries[-1][0] + 1:
            raise BFileParseError(source, lineno, raw, f"index {idx} does not follow {entries[-1][0]}")
        entries.append((idx, val))
    return BFile(sequence_id, tuple(entries))


def load_bfile(path: str | os.PathLike) -> BFile:
    path = Path(path)
    m = re.fullmatch(r"b(\d{6})\.txt", path.name)
    seq = f"A{m.group(1)}" if m else ""
    return parse_bfile(path.read_text(encoding="utf-8"), seq, str(path))


def bundled_bfile(seq: str) -> BFile:
    seq = normalize_id(seq)
    res = resources.files("mkwaring").joinpath(f"data/b{seq[1:]}.txt")
    if not res.is_file():
        raise FileNotFoundError(f"no bundled b-file for {seq}")
    return parse_bfile(res.read_text(encoding="utf-8"), seq, f"bundled b{seq[1:]}.txt")


_fetched: dict[tuple[str, str], BFile] = {}


def fetch_bfile(seq: str, endpoint: Optional[str] = None, cache_dir: Optional[str | os.PathLike] = None,
                timeout: float = 10.0) -> BFile:
    """Download a b-file.  Cached in memory and on disk; a run never downloads twice."""
    seq = normalize_id(seq)
    template = endpoint or os.environ.get(ENDPOINT_ENV, DEFAULT_ENDPOINT)
    url = template.format(id=seq, num=seq[1:])
    if (seq, url) in _fetched:
        return _fetched[(seq, url)]
    cache = Path(cache_dir) if cache_dir else Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "mkwaring"
    cached = cache / f"b{seq[1:]}.txt"
    if cached.is_file():
        bf = load_bfile(cached)
        _fetched[(seq, url)] = bf
        return bf
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            body = resp.read()
    except (socket.timeout, TimeoutError) as exc:
        raise FetchTimeout(f"timed out fetching {url}") from exc
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, (socket.timeout, TimeoutError)):
            raise FetchTimeout(f"timed out fetching {url}") from exc
        raise FetchError(f"cannot fetch {url}: {exc.reason}") from exc
    try:
        text = body.decode("utf-8")
        bf = parse_bfile(text, seq, url)
    except (UnicodeDecodeError, BFileParseError) as exc:
        raise MalformedResponse(f"malformed b-file from {url}: {exc}") from exc
    if not bf.entries:
        raise MalformedResponse(f"b-file from {url} has no entries")
    cache.mkdir(parents=True, exist_ok=True)
    cached.write_text(text, encoding="utf-8")
    _fetched[(seq, url)] = bf
    return bf


def compare_oeis(rows: Sequence[TableRow], bfile: BFile, column: Optional[str] = None) -> ComparisonReport:
    if column is None:
        column = SEQUENCE_COLUMNS[normalize_id(bfile.sequence_id)]
    if column not in COLUMNS:
        raise ValueError(f"column must be one of {COLUMNS}, got {column!r}")
    seq = bfile.as_dict()
    overlap = [r for r in rows if r.k in seq]
    if not overlap:
        raise ValueError(f"no overlap between table rows and {bfile.sequence_id}")
    report = ComparisonReport(f"{bfile.sequence_id} vs {column}", compared=len(overlap))
    for r in overlap:
        got = getattr(r, column)
        if got != seq[r.k]:
            report.mismatches.append((r.k, column, seq[r.k], got))
    return report
