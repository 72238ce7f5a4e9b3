"""Exemplar-ranking strategies for few-shot prompt selection.

Four strategies pick N exemplars from a labeled corpus: RAND (seeded
shuffle), LDM (label-proportional quotas over a seeded per-label shuffle),
DEEP (the N deepest records), and DLDM (label-proportional quotas filled
with each label's deepest records). Everything is deterministic given
(corpus, strategy, N, seed, distance kind).
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from .corpus import Corpus, DataError
from .depth import DistanceKind, depth_scores

__all__ = ["Strategy", "SelectionPlan", "allocate_quotas", "select"]

Strategy = Literal["RAND", "LDM", "DEEP", "DLDM"]


@dataclass(frozen=True)
class SelectionPlan:
    """Outcome of one selection run: the ordered exemplar ids plus provenance."""

    strategy: Strategy
    n_exemplars: int
    seed: int
    selected: list[str]
    per_label_quota: dict[str, int] | None = None

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            {
                "strategy": self.strategy,
                "n_exemplars": self.n_exemplars,
                "seed": self.seed,
                "selected": self.selected,
                "per_label_quota": self.per_label_quota,
            },
            indent=indent,
        )

    def records_jsonl(self, corpus: Corpus) -> str:
        """Selected records as JSONL of (id, label, text), in plan order."""
        by_id = {rec.id: rec for rec in corpus.records}
        lines = []
        for rec_id in self.selected:
            rec = by_id[rec_id]
            lines.append(json.dumps({"id": rec.id, "label": rec.label, "text": rec.text}))
        return "\n".join(lines) + ("\n" if lines else "")


def _label_stream(seed: int, label: str) -> np.random.Generator:
    # Sub-stream keyed by (seed, sha256(label)): adding or removing one
    # label never perturbs another label's shuffle.
    digest = int.from_bytes(hashlib.sha256(label.encode("utf-8")).digest()[:8], "big")
    return np.random.default_rng([seed, digest])


def allocate_quotas(label_counts: Mapping[str, int], n: int) -> dict[str, int]:
    """Apportion n exemplar slots proportionally to label frequencies.

    Largest-remainder apportionment over exact integer arithmetic: each
    label gets floor(n * count / total), and leftover slots go to the
    largest remainders, ties broken by larger label count then
    lexicographic label. If n exceeds the total available, quotas are
    capped at availability and a warning is emitted.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    counts = {label: int(c) for label, c in label_counts.items()}
    if any(c < 0 for c in counts.values()):
        raise ValueError("label counts must be >= 0")
    total = sum(counts.values())
    if total == 0:
        raise ValueError("at least one label must have a positive count")
    if n > total:
        warnings.warn(
            f"requested {n} exemplars but only {total} records are available; "
            "quotas capped at availability",
            stacklevel=2,
        )
        return dict(counts)
    quotas = {}
    remainders = []
    for label, c in counts.items():
        quotas[label] = (n * c) // total
        remainders.append(((n * c) % total, c, label))
    leftover = n - sum(quotas.values())
    remainders.sort(key=lambda t: (-t[0], -t[1], t[2]))
    for _, _, label in remainders[:leftover]:
        quotas[label] += 1
    return quotas


def _require_labels(corpus: Corpus) -> dict[str, list[int]]:
    """Record positions grouped by label, in corpus order; errors on gaps."""
    groups: dict[str, list[int]] = {}
    for i, rec in enumerate(corpus.records):
        if rec.label is None:
            raise DataError(f"record {rec.id!r} has no label (required by LDM/DLDM)")
        groups.setdefault(rec.label, []).append(i)
    return groups


def _round_robin(per_label: dict[str, list[str]], quotas: dict[str, int]) -> list[str]:
    # Visit labels in descending quota (ties lexicographic), taking one
    # exemplar per label per pass: a stated, reproducible prompt order.
    order = sorted(quotas, key=lambda lab: (-quotas[lab], lab))
    out: list[str] = []
    depth_idx = {lab: 0 for lab in order}
    remaining = sum(min(quotas[lab], len(per_label[lab])) for lab in order)
    while remaining > 0:
        for lab in order:
            i = depth_idx[lab]
            if i < min(quotas[lab], len(per_label[lab])):
                out.append(per_label[lab][i])
                depth_idx[lab] = i + 1
                remaining -= 1
    return out


def select(
    corpus: Corpus,
    strategy: Strategy,
    n: int,
    seed: int,
    kind: DistanceKind = "cosine",
    threads: int = 1,
) -> SelectionPlan:
    """Pick n exemplars from the corpus under the given strategy.

    RAND/DEEP emit their natural order (shuffle order, depth-descending);
    LDM/DLDM interleave labels round-robin over the quota order. If n
    exceeds the corpus size, everything is selected and a warning is
    emitted.
    """
    if strategy not in ("RAND", "LDM", "DEEP", "DLDM"):
        raise ValueError(f"unknown strategy: {strategy!r}")
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    size = len(corpus)
    if n > size:
        warnings.warn(
            f"requested {n} exemplars but corpus has {size} records; selecting all",
            stacklevel=2,
        )
    take = min(n, size)
    ids = corpus.ids

    if strategy == "RAND":
        rng = np.random.default_rng(seed)
        perm = rng.permutation(size)
        selected = [ids[i] for i in perm[:take]]
        return SelectionPlan(strategy, n, seed, selected)

    if strategy == "DEEP":
        report = depth_scores(corpus, kind, threads=threads)
        return SelectionPlan(strategy, n, seed, report.ordering[:take])

    groups = _require_labels(corpus)
    quotas = allocate_quotas({lab: len(v) for lab, v in groups.items()}, take)

    per_label: dict[str, list[str]] = {}
    if strategy == "LDM":
        for lab, positions in groups.items():
            rng = _label_stream(seed, lab)
            perm = rng.permutation(len(positions))
            per_label[lab] = [ids[positions[j]] for j in perm]
    else:  # DLDM
        report = depth_scores(corpus, kind, threads=threads)
        rank = {rec_id: r for r, rec_id in enumerate(report.ordering)}
        for lab, positions in groups.items():
            lab_ids = [ids[i] for i in positions]
            lab_ids.sort(key=lambda rec_id: rank[rec_id])
            per_label[lab] = lab_ids

    selected = _round_robin(per_label, quotas)
    return SelectionPlan(strategy, n, seed, selected, per_label_quota=quotas)
