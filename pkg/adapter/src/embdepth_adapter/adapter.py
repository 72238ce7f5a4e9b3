"""Convert a JSONL text corpus into the embedding wire format.

Input lines carry ``{"id", "text", "label"?, "text_pair"?}``; output lines
carry ``{"id", "vector", "label"?, "text"?}``, the corpus format the depth
toolkit loads directly. Vectors are written raw (un-normalized); the
loader owns normalization. When a record has a ``text_pair``, the two
texts are joined with a separator declared in the sidecar metadata file
``<out>.meta.json`` (the wire format has no comment syntax, so metadata
cannot ride in the JSONL itself).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .backends import ModelError, resolve_backend

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
PAIR_SEPARATOR = " [SEP] "


class AdapterError(Exception):
    """Unreadable input, invalid records, or an unresolvable model."""


@dataclass(frozen=True)
class EmbedJob:
    input_path: Path
    output_path: Path
    model: str = DEFAULT_MODEL
    batch_size: int = 32

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise AdapterError(f"batch size must be >= 1, got {self.batch_size}")


def _read_records(path: Path) -> list[dict]:
    if not path.is_file():
        raise AdapterError(f"no such file: {path}")
    records = []
    problems = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                problems.append(f"line {lineno}: invalid JSON ({exc.msg})")
                continue
            rec_id = obj.get("id")
            if not isinstance(rec_id, str) or not rec_id:
                problems.append(f"line {lineno}: missing or empty id")
                continue
            if rec_id in seen:
                problems.append(f"record {rec_id!r}: duplicate id")
                continue
            seen.add(rec_id)
            text = obj.get("text")
            if not isinstance(text, str) or not text.strip():
                problems.append(f"record {rec_id!r}: empty text")
                continue
            pair = obj.get("text_pair")
            if pair is not None and (not isinstance(pair, str) or not pair.strip()):
                problems.append(f"record {rec_id!r}: empty text_pair")
                continue
            records.append(obj)
    if problems:
        raise AdapterError(
            "input validation failed for "
            f"{len(problems)} record(s):\n  " + "\n  ".join(problems)
        )
    if not records:
        raise AdapterError(f"no records in {path}")
    return records


def embed_corpus(job: EmbedJob) -> int:
    """Embed every input record and write the corpus wire format.

    Returns the number of records written. Ids, labels, and order are
    preserved exactly; byte-identical texts produce byte-identical
    vectors. All invalid records are reported together and fail the job
    before any inference runs.
    """
    records = _read_records(job.input_path)
    try:
        backend = resolve_backend(job.model)
    except ModelError as exc:
        raise AdapterError(str(exc)) from exc

    texts = []
    joined_pairs = False
    for obj in records:
        text = obj["text"]
        if obj.get("text_pair") is not None:
            text = text + PAIR_SEPARATOR + obj["text_pair"]
            joined_pairs = True
        texts.append(text)

    vectors = []
    for start in range(0, len(texts), job.batch_size):
        batch = backend.encode(texts[start : start + job.batch_size])
        vectors.extend(batch)

    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise AdapterError(f"model produced inconsistent dimensions: {sorted(dims)}")

    with job.output_path.open("w", encoding="utf-8") as fh:
        for obj, text, vector in zip(records, texts, vectors):
            out: dict = {"id": obj["id"], "vector": [float(x) for x in vector]}
            if obj.get("label") is not None:
                out["label"] = obj["label"]
            out["text"] = text
            fh.write(json.dumps(out) + "\n")

    meta = {
        "model": job.model,
        "dim": int(next(iter(dims))),
        "records": len(records),
        "pair_separator": PAIR_SEPARATOR if joined_pairs else None,
    }
    Path(str(job.output_path) + ".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    return len(records)
