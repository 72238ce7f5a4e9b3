"""Figure rendering for the CLI report path.

The statistical modules emit plot-ready tables only; these helpers turn
those tables into matplotlib figures written to files, opted into with
``--figure``. Rendering is headless (Agg) and safe without a display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from .depth import DepthReport
from .ranksum import RankSumReport
from .simulate import CalibrationReport, StudyResult


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_depth_histogram(report: DepthReport, path: str | Path) -> None:
    """Histogram of a corpus's depth scores, median marked."""
    plt = _pyplot()
    values = list(report.scores.values())
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(values, bins=min(40, max(5, len(values) // 5)), color="#4878a8", alpha=0.85)
    ax.axvline(report.scores[report.median_id], color="#c44e52", linestyle="--",
               label=f"median ({report.median_id})")
    ax.set_xlabel(f"depth ({report.distance})")
    ax.set_ylabel("count")
    ax.set_title(f"Depth distribution: {report.corpus_name}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_comparison_figure(
    ref_depths: Mapping[str, float],
    query_depths: Mapping[str, float],
    report: RankSumReport,
    path: str | Path,
    ref_label: str = "reference",
    query_label: str = "query",
) -> None:
    """Overlaid depth distributions of the two samples, both w.r.t. the reference."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = min(40, max(5, (len(ref_depths) + len(query_depths)) // 10))
    ax.hist(list(ref_depths.values()), bins=bins, alpha=0.6, label=ref_label,
            color="#4878a8", density=True)
    ax.hist(list(query_depths.values()), bins=bins, alpha=0.6, label=query_label,
            color="#e1812c", density=True)
    ax.set_xlabel(f"depth w.r.t. {ref_label} ({report.distance})")
    ax.set_ylabel("density")
    ax.set_title(f"Q = {report.q_hat:.4f}, p = {report.p_one_sided:.3g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_study_figure(result: StudyResult, path: str | Path) -> None:
    """Per-n spread of Q estimates (boxplots) against the full-population value."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    data = [list(r.q_values) for r in result.rows]
    ax.boxplot(data, tick_labels=[str(r.n) for r in result.rows])
    ax.axhline(result.truth_q, color="#c44e52", linestyle="--",
               label=f"full-population Q = {result.truth_q:.4f}")
    ax.set_xlabel("sample size n")
    ax.set_ylabel("Q estimate")
    ax.set_title("Q estimate spread vs sample size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_calibration_figure(report: CalibrationReport, path: str | Path) -> None:
    """Histogram of replicate Q estimates with the null mean marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(list(report.q_values), bins=min(40, max(5, report.replicates // 10)),
            color="#4878a8", alpha=0.85)
    ax.axvline(0.5, color="#c44e52", linestyle="--", label="null Q = 0.5")
    ax.set_xlabel("Q estimate")
    ax.set_ylabel("count")
    ax.set_title(
        f"m={report.m}, n={report.n}: mean={report.mean_q:.4f}, "
        f"std={report.std_q:.4f}, reject@{report.alpha:g}={report.rejection_rate:.3f}"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
