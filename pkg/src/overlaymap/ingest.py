"""Parsers for Web of Science exports and their conversion to overlay vectors.

Two input dialects are supported; see ``docs/formats.md`` for the grammars.

* ``Analyze.txt``: per-category tallies. A data line is
  ``name <sep> count [<sep> percent [<sep> ...]]`` where ``<sep>`` is a TAB,
  or, for lines without TABs, a run of two or more spaces. Lines whose second
  column is not an integer (headers, footers, notes) are skipped.
* Tagged field records: ``XX value`` lines, three-space continuation lines,
  ``ER`` closing each record and an optional ``EF`` ending the file.
"""

from __future__ import annotations

import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .registry import CategoryRegistry


class ParseError(ValueError):
    pass


class IngestWarning(UserWarning):
    pass


_SPACES = re.compile(r" {2,}")
_INT = re.compile(r"[+-]?\d+")
_FILE_HEADER_TAGS = {"FN", "VR"}


def read_text(source: str | Path | bytes) -> str:
    """Decode an export as UTF-8 (BOM tolerated), falling back to Latin-1."""
    raw = source if isinstance(source, bytes) else Path(source).read_bytes()
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


@dataclass(frozen=True)
class AnalyzeRow:
    category_name: str
    record_count: int
    percent: float | None = None


@dataclass
class DocumentRecord:
    fields: dict[str, list[str]] = field(default_factory=dict)

    @property
    def subject_categories(self) -> list[str]:
        out: list[str] = []
        for value in self.fields.get("SC", []):
            for part in value.split(";"):
                part = part.strip()
                if part and part not in out:
                    out.append(part)
        return out

    @property
    def flagged(self) -> bool:
        """True when the record carries no subject category."""
        return not self.subject_categories


@dataclass
class OverlayVector:
    counts: np.ndarray
    total_documents: int
    label: str = ""
    year: int | None = None
    unmatched: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.counts = np.asarray(self.counts, dtype=np.float64)
        if self.counts.ndim != 1:
            raise ValueError("overlay counts must be one-dimensional")
        if np.any(self.counts < 0) or not np.all(np.isfinite(self.counts)):
            raise ValueError("overlay counts must be finite and nonnegative")

    @property
    def size(self) -> int:
        return self.counts.shape[0]

    def top(self, n: int = 5) -> list[tuple[int, float]]:
        order = sorted(range(self.size), key=lambda i: (-self.counts[i], i))
        return [(i, float(self.counts[i])) for i in order[:n] if self.counts[i] > 0]


def _split_columns(line: str) -> list[str]:
    if "\t" in line:
        return [c.strip() for c in line.split("\t")]
    return [c.strip() for c in _SPACES.split(line.strip())]


def _parse_percent(cell: str) -> float | None:
    cell = cell.replace("%", "").strip()
    try:
        return float(cell)
    except ValueError:
        return None


def parse_analyze_text(text: str) -> list[AnalyzeRow]:
    rows: list[AnalyzeRow] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = _split_columns(line)
        if len(cols) < 2 or not cols[0]:
            continue
        if not _INT.fullmatch(cols[1].replace(",", "")):
            continue
        count = int(cols[1].replace(",", ""))
        if count < 0:
            raise ParseError(f"line {lineno}: negative record count {count}")
        percent = _parse_percent(cols[2]) if len(cols) > 2 else None
        rows.append(AnalyzeRow(cols[0], count, percent))
    if not rows:
        raise ParseError("no data rows")
    return rows


def parse_analyze(source: str | Path | bytes) -> list[AnalyzeRow]:
    """Parse an ``Analyze.txt`` export into rows of (name, count, percent)."""
    return parse_analyze_text(read_text(source))


def parse_tagged_text(text: str) -> list[DocumentRecord]:
    records: list[DocumentRecord] = []
    current: DocumentRecord | None = None
    last_tag: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("   "):
            if current is None or last_tag is None:
                raise ParseError(f"line {lineno}: continuation line outside a field")
            current.fields[last_tag].append(line.strip())
            continue
        if len(line.rstrip()) < 2:
            raise ParseError(f"line {lineno}: tag line shorter than 2 characters")
        tag = line[:2]
        value = line[3:].strip() if len(line) > 2 else ""
        if len(line) > 2 and line[2] != " ":
            raise ParseError(f"line {lineno}: expected a 2-character tag followed by a space")
        if tag == "EF":
            break
        if tag == "ER":
            if current is not None:
                records.append(current)
            current, last_tag = None, None
            continue
        if current is None:
            if tag in _FILE_HEADER_TAGS:
                continue
            current = DocumentRecord()
        current.fields.setdefault(tag, []).append(value)
        last_tag = tag
    if current is not None:
        warnings.warn("last record is not terminated by ER; kept", IngestWarning, stacklevel=3)
        records.append(current)
    return records


def parse_tagged(source: str | Path | bytes) -> list[DocumentRecord]:
    """Parse a tagged-field export into records."""
    return parse_tagged_text(read_text(source))


def write_tagged(records: Iterable[DocumentRecord]) -> str:
    """Inverse of :func:`parse_tagged` for well-formed records."""
    out = ["FN Thomson Reuters Web of Science", "VR 1.0"]
    for rec in records:
        for tag, values in rec.fields.items():
            for k, v in enumerate(values):
                out.append(f"{tag} {v}" if k == 0 else f"   {v}")
        out.append("ER")
        out.append("")
    out.append("EF")
    return "\n".join(out) + "\n"


def overlay_from_rows(
    rows: Sequence[AnalyzeRow],
    registry: CategoryRegistry,
    label: str = "",
    year: int | None = None,
) -> OverlayVector:
    """Accumulate Analyze counts per registry category.

    ``total_documents`` is the sum of matched counts. Analyze credits a record
    once per category, so this over-counts multi-category records.
    """
    counts = np.zeros(registry.size)
    unmatched: Counter[str] = Counter()
    matched_any = False
    for row in rows:
        cid = registry.resolve(row.category_name)
        if cid is None:
            unmatched[row.category_name] += row.record_count
        else:
            counts[cid] += row.record_count
            matched_any = True
    if rows and not matched_any:
        raise ParseError(f"no category matched the registry: {sorted(unmatched)}")
    return OverlayVector(
        counts,
        total_documents=int(counts.sum()),
        label=label,
        year=year,
        unmatched=sorted(unmatched.items()),
    )


def overlay_from_records(
    records: Sequence[DocumentRecord],
    registry: CategoryRegistry,
    counting: str = "whole",
    label: str = "",
    year: int | None = None,
) -> OverlayVector:
    """Count records per category, whole (1 each) or fractional (1/k each)."""
    if counting not in ("whole", "fractional"):
        raise ValueError(f"counting must be 'whole' or 'fractional', got {counting!r}")
    # exact rationals so fractional totals conserve the record count
    acc = [Fraction(0)] * registry.size
    unmatched: Counter[str] = Counter()
    documents = 0
    for rec in records:
        ids: list[int] = []
        for raw in rec.subject_categories:
            cid = registry.resolve(raw)
            if cid is None:
                unmatched[raw] += 1
            elif cid not in ids:
                ids.append(cid)
        if not ids:
            continue
        documents += 1
        weight = Fraction(1) if counting == "whole" else Fraction(1, len(ids))
        for cid in ids:
            acc[cid] += weight
    return OverlayVector(
        np.array([float(c) for c in acc]),
        total_documents=documents,
        label=label,
        year=year,
        unmatched=sorted(unmatched.items()),
    )


def sniff_format(text: str) -> str:
    """Return ``"vec"``, ``"tagged"`` or ``"analyze"`` from the first content line."""
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.lower().startswith("*vertices"):
            return "vec"
        if re.match(r"^[A-Z][A-Z0-9] ", line):
            return "tagged"
        return "analyze"
    raise ParseError("input is empty")
