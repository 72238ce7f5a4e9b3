"""Corpus data model: ingestion, validation, and unit normalization.

A corpus is an ordered, immutable collection of embedding records with a
shared dimensionality. Vectors are normalized to unit Euclidean norm at
load time, so every downstream distance computation can assume unit
inputs. Record order is file order; all determinism guarantees key off
this order plus explicit seeds.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Literal

import numpy as np

__all__ = [
    "DataError",
    "EmbeddingRecord",
    "Corpus",
    "CorpusFormat",
    "normalize",
    "load_corpus",
    "save_corpus",
]

CorpusFormat = Literal["jsonl", "csv"]

# A vector whose norm is already within this tolerance of 1 is returned
# unchanged, which makes normalization idempotent and save/load round-trips
# bitwise exact.
UNIT_NORM_TOL = 1e-12


class DataError(Exception):
    """Malformed input file or inconsistent corpus data."""


def normalize(vector: Iterable[float] | np.ndarray) -> np.ndarray:
    """Scale a vector to unit Euclidean norm, preserving direction.

    Vectors whose norm is already within ``UNIT_NORM_TOL`` of 1 are
    returned as-is (same bits), so normalizing twice is a no-op.

    Raises:
        DataError: if the norm is zero or not finite.
    """
    v = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DataError("zero-norm vector")
    if not math.isfinite(norm):
        raise DataError("non-finite vector")
    if abs(norm - 1.0) <= UNIT_NORM_TOL:
        return v
    return v / norm


@dataclass(frozen=True)
class EmbeddingRecord:
    """One embedded text: identifier, unit vector, optional label and text."""

    id: str
    vector: np.ndarray
    label: str | None = None
    text: str | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and self.text == other.text
            and np.array_equal(self.vector, other.vector)
        )


@dataclass(frozen=True)
class Corpus:
    """Ordered, immutable collection of embedding records of one dimensionality."""

    records: tuple[EmbeddingRecord, ...]
    dim: int
    name: str

    @classmethod
    def from_records(cls, records: Iterable[EmbeddingRecord], name: str = "corpus") -> "Corpus":
        """Validate and normalize records into a Corpus.

        Enforces: non-empty corpus, uniform dimensionality, non-empty unique
        ids, normalizable vectors. Errors name the first offending record id.
        """
        normalized: list[EmbeddingRecord] = []
        seen: set[str] = set()
        dim: int | None = None
        for rec in records:
            if not rec.id:
                raise DataError("record with empty id")
            if rec.id in seen:
                raise DataError(f"duplicate id {rec.id!r}")
            seen.add(rec.id)
            vec = np.asarray(rec.vector, dtype=np.float64)
            if vec.ndim != 1 or vec.size < 1:
                raise DataError(f"vector at id {rec.id!r} is not a 1-d array of length >= 1")
            if dim is None:
                dim = int(vec.size)
            elif vec.size != dim:
                raise DataError(
                    f"dimension mismatch at id {rec.id!r}: got {vec.size}, expected {dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise DataError(f"non-finite vector at id {rec.id!r}")
            if float(np.linalg.norm(vec)) == 0.0:
                raise DataError(f"zero-norm vector at id {rec.id!r}")
            vec = normalize(vec) + 0.0  # canonicalize -0.0 so byte equality == value equality
            vec.setflags(write=False)
            normalized.append(EmbeddingRecord(rec.id, vec, rec.label, rec.text))
        if dim is None:
            raise DataError("empty corpus")
        return cls(records=tuple(normalized), dim=dim, name=name)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Records stacked into a read-only (len, dim) float64 array."""
        mat = np.vstack([r.vector for r in self.records])
        mat.setflags(write=False)
        return mat

    def subset(self, indices: Iterable[int], name: str | None = None) -> "Corpus":
        """New Corpus from a selection of record positions (order as given)."""
        recs = tuple(self.records[i] for i in indices)
        if not recs:
            raise DataError("empty corpus")
        return Corpus(records=recs, dim=self.dim, name=name or self.name)


def _record_from_json_line(line: str, lineno: int) -> EmbeddingRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON on line {lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise DataError(f"line {lineno} is not a JSON object")
    rec_id = obj.get("id")
    if not isinstance(rec_id, str) or not rec_id:
        raise DataError(f"missing or invalid 'id' on line {lineno}")
    vec = obj.get("vector")
    if not isinstance(vec, list) or not vec or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in vec
    ):
        raise DataError(f"missing or invalid 'vector' at id {rec_id!r}")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise DataError(f"invalid 'label' at id {rec_id!r}")
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise DataError(f"invalid 'text' at id {rec_id!r}")
    return EmbeddingRecord(rec_id, np.asarray(vec, dtype=np.float64), label, text)


def _records_from_csv(path: Path) -> list[EmbeddingRecord]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty corpus file: {path}") from None
        if len(header) < 3 or header[0] != "id" or header[1] != "label":
            raise DataError(f"bad CSV header in {path}: expected id,label,v0,...")
        records = []
        for row in reader:
            if not row:
                continue
            rec_id = row[0]
            label = row[1] if row[1] != "" else None
            try:
                vec = np.array([float(x) for x in row[2:]], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"non-numeric vector component at id {rec_id!r}") from exc
            records.append(EmbeddingRecord(rec_id, vec, label, None))
    return records


def load_corpus(path: str | Path, format: CorpusFormat = "jsonl", name: str | None = None) -> Corpus:
    """Load and validate a corpus file, normalizing every vector.

    JSONL lines carry ``{"id", "vector", "label"?, "text"?}``; CSV files
    carry a ``id,label,v0,...,v{k-1}`` header with an empty label cell
    meaning no label. Record order equals file order.

    Raises:
        DataError: missing file, parse failure, dimension mismatch,
            duplicate/empty ids, zero-norm or non-finite vectors, or an
            empty file. The message names the first offending record.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    if format == "jsonl":
        records = []
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                records.append(_record_from_json_line(line, lineno))
    elif format == "csv":
        records = _records_from_csv(path)
    else:
        raise ValueError(f"unknown corpus format: {format!r}")
    if not records:
        raise DataError(f"empty corpus file: {path}")
    return Corpus.from_records(records, name=name if name is not None else path.stem)


def save_corpus(corpus: Corpus, path: str | Path, format: CorpusFormat = "jsonl") -> None:
    """Write a corpus back to disk in the given wire format.

    Floats are written with shortest round-trip precision, so a
    save -> load cycle reproduces the corpus bitwise (vectors are already
    unit-norm and normalization skips them). The CSV format has no text
    column; text survives only in JSONL.
    """
    path = Path(path)
    if format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for rec in corpus.records:
                obj: dict = {"id": rec.id, "vector": [float(x) for x in rec.vector]}
                if rec.label is not None:
                    obj["label"] = rec.label
                if rec.text is not None:
                    obj["text"] = rec.text
                fh.write(json.dumps(obj) + "\n")
    elif format == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "label"] + [f"v{i}" for i in range(corpus.dim)])
            for rec in corpus.records:
                writer.writerow([rec.id, rec.label or ""] + [repr(float(x)) for x in rec.vector])
    else:
        raise ValueError(f"unknown corpus format: {format!r}")
