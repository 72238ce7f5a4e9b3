"""Bounded angular distances and center-outward depth over embedding corpora.

The depth of a point x with respect to a corpus is ``2 - E[delta(x, H)]``
where H is uniform over the corpus and delta is either cosine distance
``1 - x.y`` or chord distance ``sqrt(2(1 - x.y))`` on unit vectors. Both
distances are bounded by [0, 2], so depths land in [0, 2] as well; the
corpus element of maximal depth is the depth median, and sorting by depth
descending yields a center-outward ranking.

Determinism contract: per-query dot products are computed with a fixed
shape-dependent kernel (no BLAS dispatch), and every per-query reduction
uses exact compensated summation (``math.fsum``). Results are therefore
bitwise identical across worker counts and invariant under corpus
permutation.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .corpus import Corpus

__all__ = [
    "DistanceKind",
    "DepthReport",
    "distance",
    "depth_scores",
    "depth_wrt",
]

DistanceKind = Literal["cosine", "chord"]

# Thresholds below which a pairwise distance is suspected to come from a
# bitwise-identical pair. Unit norms hold within 1e-12, so a self-pair's
# cosine distance is at most ~2e-12 and its chord distance at most ~2e-6.
# Candidates are verified with an exact array comparison before zeroing.
_DUP_CANDIDATE = {"cosine": 1e-11, "chord": 5e-6}


def _check_kind(kind: str) -> None:
    if kind not in ("cosine", "chord"):
        raise ValueError(f"unknown distance kind: {kind!r}")


def _row_dots(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    # einsum keeps a fixed per-row accumulation order, unlike BLAS matmul,
    # which is what makes depth bitwise stable under corpus permutation.
    return np.einsum("ij,j->i", matrix, q)


def _distance_row(matrix: np.ndarray, q: np.ndarray, kind: DistanceKind) -> np.ndarray:
    """Distances from query q to every row of matrix, in row order.

    Pairs that are bitwise identical get distance exactly 0: the numeric
    dot product of a unit vector with itself can differ from 1 by an ulp,
    which matters for chord (sqrt amplifies it to ~1e-8) and for the
    self-term of the depth definition.
    """
    dots = _row_dots(matrix, q)
    if kind == "cosine":
        dist = np.clip(1.0 - dots, 0.0, 2.0)
    else:
        dist = np.sqrt(np.clip(1.0 - dots, 0.0, 2.0) * 2.0)
        np.clip(dist, 0.0, 2.0, out=dist)
    candidates = np.nonzero(dist <= _DUP_CANDIDATE[kind])[0]
    for j in candidates:
        if np.array_equal(matrix[j], q):
            dist[j] = 0.0
    return dist


def distance(x, y, kind: DistanceKind = "cosine") -> float:
    """Bounded distance between two unit vectors.

    cosine: ``1 - x.y / (|x| |y|)``; chord: ``sqrt(2(1 - x.y))`` with the
    radicand clamped at 0 to absorb dot products that exceed 1 by rounding.
    Bitwise-identical inputs return exactly 0. Result lies in [0, 2].
    """
    _check_kind(kind)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if np.array_equal(x, y):
        return 0.0
    dot = float(np.einsum("i,i->", x, y))
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if kind == "cosine":
        return min(max(1.0 - dot / (nx * ny), 0.0), 2.0)
    return math.sqrt(min(max(1.0 - dot, 0.0), 2.0) * 2.0)


@dataclass(frozen=True)
class DepthReport:
    """Per-record depth scores with the induced center-outward ordering.

    ``ordering`` lists record ids by depth descending (ties broken by
    earliest corpus position), so reading it back-to-front walks from the
    outliers in toward the median. ``median_id`` is ``ordering[0]``.
    """

    corpus_name: str
    distance: DistanceKind
    scores: dict[str, float]
    ordering: list[str]
    median_id: str

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            {
                "corpus": self.corpus_name,
                "distance": self.distance,
                "median_id": self.median_id,
                "ordering": self.ordering,
                "scores": self.scores,
            },
            indent=indent,
        )

    def to_csv(self) -> str:
        """Rows ``id,depth,rank`` in rank order (rank 1 = deepest)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "depth", "rank"])
        for rank, rec_id in enumerate(self.ordering, start=1):
            writer.writerow([rec_id, repr(self.scores[rec_id]), rank])
        return buf.getvalue()


def _depth_values(
    reference: Corpus, queries: np.ndarray, kind: DistanceKind, threads: int
) -> np.ndarray:
    """Depth of each query row with respect to the reference corpus.

    Parallelism is across queries only; each query's expectation is an
    exact (fsum) reduction of its distance row, so outputs do not depend
    on the thread count.
    """
    matrix = reference.matrix
    m = len(reference)
    out = np.empty(queries.shape[0], dtype=np.float64)

    def fill(i: int) -> None:
        row = _distance_row(matrix, queries[i], kind)
        out[i] = 2.0 - math.fsum(row.tolist()) / m

    if threads <= 1 or queries.shape[0] < 2:
        for i in range(queries.shape[0]):
            fill(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(queries.shape[0])))
    return out


def depth_scores(corpus: Corpus, kind: DistanceKind = "cosine", threads: int = 1) -> DepthReport:
    """Depth of every corpus record with respect to the corpus itself.

    The expectation runs over all records including the query (the
    self-term contributes distance 0), which keeps this consistent with
    ``depth_wrt(corpus, corpus)``. The median is the maximal-depth record,
    ties broken by earliest corpus position.
    """
    _check_kind(kind)
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    values = _depth_values(corpus, corpus.matrix, kind, threads)
    ids = corpus.ids
    scores = {rec_id: float(v) for rec_id, v in zip(ids, values)}
    order = sorted(range(len(ids)), key=lambda i: (-values[i], i))
    ordering = [ids[i] for i in order]
    return DepthReport(
        corpus_name=corpus.name,
        distance=kind,
        scores=scores,
        ordering=ordering,
        median_id=ordering[0],
    )


def depth_wrt(
    queries: Corpus, reference: Corpus, kind: DistanceKind = "cosine", threads: int = 1
) -> dict[str, float]:
    """Depth of each query record with respect to a reference corpus.

    The expectation is over the reference only: queries are not added to
    it, so a query shares no self-term unless its vector is genuinely
    present in the reference.
    """
    _check_kind(kind)
    if len(reference) == 0:
        raise ValueError("empty reference corpus")
    if queries.dim != reference.dim:
        raise ValueError(
            f"dimension mismatch: queries dim {queries.dim}, reference dim {reference.dim}"
        )
    values = _depth_values(reference, queries.matrix, kind, threads)
    return {rec_id: float(v) for rec_id, v in zip(queries.ids, values)}
