"""Depth-induced two-sample statistics and paired classifier comparison.

Given a reference corpus F and a query corpus G, the per-query fraction
R(y, F) counts how much of F is no deeper than y; Q is the average of R
over the queries. Under the null F = G, the sample estimate of Q is
centered at 1/2 with variance ``(1/m + 1/n) / 12``, which yields a
one-sided Z test against the alternative Q < 1/2 (queries more outlying
than the reference). McNemar's test covers paired classifier comparisons
on discordant counts.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .corpus import Corpus
from .depth import DepthReport, DistanceKind, depth_scores, depth_wrt

__all__ = [
    "RankSumReport",
    "McNemarResult",
    "r_fraction",
    "q_estimate",
    "compare_corpora",
    "wilcoxon_test",
    "mcnemar",
]

# Smallest/largest p-values we report; keeps p in the open interval (0, 1)
# even when the normal tail underflows.
_P_MIN = 5e-324
_P_MAX = math.nextafter(1.0, 0.0)


def _phi(z: float) -> float:
    """Standard normal CDF via erfc; relative accuracy ~1e-15 for |z| <= 8."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


@dataclass(frozen=True)
class RankSumReport:
    """Two-sample comparison summary.

    ``w`` is the test statistic ``q_hat - 1/2`` (the value of Q under the
    null is 1/2) and ``z = w / sqrt((1/m + 1/n) / 12)``. ``med_ref_depth``
    is the depth of the reference's own median; ``med_query_depth`` the
    maximal query depth with respect to the reference. Both are None when
    the report comes from the bare ``wilcoxon_test`` arithmetic.
    """

    q_hat: float
    w: float
    z: float
    p_one_sided: float
    m: int
    n: int
    med_ref_depth: float | None = None
    med_query_depth: float | None = None
    distance: DistanceKind | None = None

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            {
                "q_hat": self.q_hat,
                "w": self.w,
                "z": self.z,
                "p_one_sided": self.p_one_sided,
                "m": self.m,
                "n": self.n,
                "med_ref_depth": self.med_ref_depth,
                "med_query_depth": self.med_query_depth,
                "distance": self.distance,
            },
            indent=indent,
        )

    def to_csv(self) -> str:
        """One-row summary: reference median depth, query median depth, Q, W, p."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["Med Human", "Med Synth", "Q", "W", "p"])
        writer.writerow(
            [
                "" if self.med_ref_depth is None else repr(self.med_ref_depth),
                "" if self.med_query_depth is None else repr(self.med_query_depth),
                repr(self.q_hat),
                repr(self.w),
                repr(self.p_one_sided),
            ]
        )
        return buf.getvalue()


class McNemarResult(NamedTuple):
    chi2: float
    p: float


def r_fraction(y_depth: float, ref_depths: Sequence[float] | np.ndarray) -> float:
    """Fraction of reference depths that are <= the query depth.

    Comparison is exact on the computed 64-bit values; ties count. A value
    of 0 marks a maximal outlier, 1 a query at least as deep as everything
    in the reference.
    """
    depths = np.asarray(ref_depths, dtype=np.float64)
    if depths.size == 0:
        raise ValueError("empty reference depths")
    return int(np.count_nonzero(depths <= y_depth)) / depths.size


def wilcoxon_test(q_hat: float, m: int, n: int) -> RankSumReport:
    """Z test of the null F = G against the alternative Q < 1/2.

    ``p_one_sided`` is the lower tail Phi(z); it is clamped into the open
    interval (0, 1) at the representable boundaries so extreme z values
    never report an exact 0 or 1.
    """
    if m < 1 or n < 1:
        raise ValueError(f"sample sizes must be >= 1, got m={m}, n={n}")
    if not 0.0 <= q_hat <= 1.0:
        raise ValueError(f"q_hat must lie in [0, 1], got {q_hat}")
    w = q_hat - 0.5
    z = w / math.sqrt((1.0 / m + 1.0 / n) / 12.0)
    p = min(max(_phi(z), _P_MIN), _P_MAX)
    return RankSumReport(q_hat=q_hat, w=w, z=z, p_one_sided=p, m=m, n=n)


def _loo_rank_value(depth: float | np.ndarray, m: int):
    # Depth recomputed as if the record's own zero self-distance were left
    # out of the expectation (mean over the other m-1 records).
    return 2.0 - m * (2.0 - depth) / (m - 1)


def compare_corpora(
    reference: Corpus,
    queries: Corpus,
    kind: DistanceKind = "cosine",
    threads: int = 1,
) -> tuple[RankSumReport, DepthReport, dict[str, float]]:
    """Full two-sample comparison, exposing the underlying depth values.

    The ranking that feeds Q compares like with like: each reference
    record ranks by its leave-one-out depth (its own zero self-distance
    excluded from the expectation), and a fresh query ranks by its plain
    depth over all m reference records. A query bitwise-identical to a
    reference record ranks exactly as that record does, which makes the
    identity q_estimate(F, F) = (m+1)/(2m) hold to the last bit while
    fresh same-distribution queries stay unbiased (mean Q near 1/2).
    Keeping the self-term inside the reference ranks instead would make
    every reference record look deeper than an equally distributed fresh
    query by E[delta]/m and drag the null mean of Q well below 1/2.

    Returns the populated RankSumReport together with the reference's
    DepthReport and the query depth map (both with respect to the
    reference), which the report path reuses for figures.
    """
    if len(reference) == 0 or len(queries) == 0:
        raise ValueError("both corpora must be non-empty")
    ref_report = depth_scores(reference, kind, threads=threads)
    query_depths = depth_wrt(queries, reference, kind, threads=threads)
    ref_values = np.array([ref_report.scores[i] for i in reference.ids], dtype=np.float64)
    m = len(reference)
    n = len(queries)
    if m == 1:
        ref_ranks = np.array([2.0])
    else:
        ref_ranks = _loo_rank_value(ref_values, m)
    ref_rows = {rec.vector.tobytes() for rec in reference.records}
    # Integer rank counts summed exactly, one final division: keeps the
    # identity law exact in 64-bit arithmetic.
    total = 0
    for rec in queries.records:
        d = query_depths[rec.id]
        if rec.vector.tobytes() in ref_rows:
            rank_value = 2.0 if m == 1 else _loo_rank_value(d, m)
        else:
            rank_value = d
        total += int(np.count_nonzero(ref_ranks <= rank_value))
    q_hat = total / (m * n)
    report = replace(
        wilcoxon_test(q_hat, m, n),
        med_ref_depth=ref_report.scores[ref_report.median_id],
        med_query_depth=max(query_depths.values()),
        distance=kind,
    )
    return report, ref_report, query_depths


def q_estimate(
    reference: Corpus,
    queries: Corpus,
    kind: DistanceKind = "cosine",
    threads: int = 1,
) -> RankSumReport:
    """Sample estimate of Q: the mean of R(y, F) over all queries y.

    Computed from the averaged-fractions definition (not combined-sample
    ranks, which diverges from it under ties), on the leave-one-out
    ranking basis described in compare_corpora. The returned report also
    carries the test statistics for the estimate.
    """
    report, _, _ = compare_corpora(reference, queries, kind, threads=threads)
    return report


def mcnemar(b: int, c: int) -> McNemarResult:
    """Continuity-corrected McNemar test on discordant pair counts.

    chi2 = (max(|b - c| - 1, 0))^2 / (b + c), with an upper-tail
    chi-square(1) p-value. Zero discordant pairs is a defined result
    (chi2 = 0, p = 1), not an error.
    """
    if b < 0 or c < 0:
        raise ValueError(f"discordant counts must be >= 0, got b={b}, c={c}")
    if b + c == 0:
        return McNemarResult(0.0, 1.0)
    chi2 = max(abs(b - c) - 1, 0) ** 2 / (b + c)
    # P(chi2_1 > x) = erfc(sqrt(x / 2))
    p = math.erfc(math.sqrt(chi2 / 2.0))
    return McNemarResult(chi2, p)
