"""Center-outward depth statistics for corpora of embedding vectors.

Provides bounded angular distances, depth scores and depth medians,
a depth-induced rank-sum two-sample test, exemplar-selection strategies
for few-shot prompting, and Monte-Carlo calibration harnesses, plus a
CLI (``embdepth``) over JSONL/CSV vector files.
"""

from .corpus import Corpus, DataError, EmbeddingRecord, load_corpus, normalize, save_corpus
from .depth import DepthReport, DistanceKind, depth_scores, depth_wrt, distance
from .ranksum import (
    McNemarResult,
    RankSumReport,
    compare_corpora,
    mcnemar,
    q_estimate,
    r_fraction,
    wilcoxon_test,
)
from .selection import SelectionPlan, Strategy, allocate_quotas, select
from .simulate import (
    CalibrationReport,
    GeneratorSpec,
    StudyConfig,
    StudyResult,
    calibration_study,
    generate_population,
    null_calibration,
    sample_size_study,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "DataError",
    "EmbeddingRecord",
    "load_corpus",
    "normalize",
    "save_corpus",
    "DepthReport",
    "DistanceKind",
    "distance",
    "depth_scores",
    "depth_wrt",
    "RankSumReport",
    "McNemarResult",
    "r_fraction",
    "q_estimate",
    "compare_corpora",
    "wilcoxon_test",
    "mcnemar",
    "SelectionPlan",
    "Strategy",
    "allocate_quotas",
    "select",
    "GeneratorSpec",
    "StudyConfig",
    "StudyResult",
    "CalibrationReport",
    "generate_population",
    "sample_size_study",
    "null_calibration",
    "calibration_study",
    "__version__",
]
