"""Monte-Carlo harnesses: sample-size studies, null calibration, power checks.

Synthetic directional populations stand in for embedding corpora so the
distribution-generic claims behind the rank-sum test can be checked at
desk scale: that the null spread of the Q estimate matches
``(1/m + 1/n) / 12``, that rejection rates sit near the nominal level,
and that the spread of Q estimates shrinks as samples grow. Replicates
own independent seeded streams derived from (master seed, n, replicate),
so results are identical no matter how replicates are scheduled.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .corpus import Corpus, EmbeddingRecord, normalize
from .depth import DistanceKind
from .ranksum import q_estimate

__all__ = [
    "GeneratorSpec",
    "StudyConfig",
    "StudyRow",
    "StudyResult",
    "CalibrationReport",
    "generate_population",
    "sample_size_study",
    "null_calibration",
    "calibration_study",
]

Family = Literal["uniform-sphere", "concentrated"]


@dataclass(frozen=True)
class GeneratorSpec:
    """Synthetic directional population on the unit sphere in R^dim.

    uniform-sphere: i.i.d. standard normals, normalized. concentrated:
    the mean direction plus isotropic noise of scale 1/concentration,
    normalized; concentration 0 degenerates to uniform-sphere and
    concentration -> inf collapses every sample onto the mean direction.
    """

    dim: int
    family: Family = "uniform-sphere"
    concentration: float = 0.0
    mean_direction: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"generator dimension must be >= 2, got {self.dim}")
        if self.family not in ("uniform-sphere", "concentrated"):
            raise ValueError(f"unknown generator family: {self.family!r}")
        if self.concentration < 0:
            raise ValueError(f"concentration must be >= 0, got {self.concentration}")
        if self.family == "concentrated":
            mean = self.mean_direction
            if mean is None:
                mean = tuple([1.0] + [0.0] * (self.dim - 1))
            if len(mean) != self.dim:
                raise ValueError("mean_direction length must equal dim")
            unit = normalize(np.asarray(mean, dtype=np.float64))
            object.__setattr__(self, "mean_direction", tuple(float(x) for x in unit))

    def sample_matrix(self, size: int, seed) -> np.ndarray:
        """(size, dim) array of unit vectors, deterministic in seed."""
        if size < 1:
            raise ValueError(f"size must be >= 1, got {size}")
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal((size, self.dim))
        if self.family == "concentrated" and self.concentration > 0:
            scale = 0.0 if math.isinf(self.concentration) else 1.0 / self.concentration
            points = np.asarray(self.mean_direction) + scale * noise
        else:
            points = noise
        return points / np.linalg.norm(points, axis=1, keepdims=True)


def generate_population(
    spec: GeneratorSpec, size: int, seed, name: str = "population"
) -> Corpus:
    """Corpus of `size` synthetic unit vectors drawn from the generator."""
    matrix = spec.sample_matrix(size, seed)
    width = max(5, len(str(size - 1)))
    records = [
        EmbeddingRecord(id=f"{name}-{i:0{width}d}", vector=matrix[i]) for i in range(size)
    ]
    return Corpus.from_records(records, name=name)


@dataclass(frozen=True)
class StudyConfig:
    """Grid for a sample-size study: which n values, how many replicates."""

    sample_sizes: tuple[int, ...]
    replicates: int
    seed: int
    distance: DistanceKind = "cosine"
    generator: GeneratorSpec = field(default_factory=lambda: GeneratorSpec(dim=16))

    def __post_init__(self) -> None:
        if not self.sample_sizes:
            raise ValueError("sample_sizes must be non-empty")
        if any(n < 2 for n in self.sample_sizes):
            raise ValueError("every sample size must be >= 2")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")


@dataclass(frozen=True)
class StudyRow:
    n: int
    mean_q: float
    std_q: float
    q_values: tuple[float, ...]


@dataclass(frozen=True)
class StudyResult:
    """Per-n spread of Q estimates plus the full-population reference value."""

    rows: tuple[StudyRow, ...]
    truth_q: float
    distance: DistanceKind
    seed: int

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            {
                "truth_q": self.truth_q,
                "distance": self.distance,
                "seed": self.seed,
                "rows": [
                    {
                        "n": r.n,
                        "mean_q": r.mean_q,
                        "std_q": r.std_q,
                        "q_values": list(r.q_values),
                    }
                    for r in self.rows
                ],
            },
            indent=indent,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "mean_q", "std_q"])
        for r in self.rows:
            writer.writerow([r.n, repr(r.mean_q), repr(r.std_q)])
        return buf.getvalue()

    def raw_csv(self) -> str:
        """Companion table of every replicate's Q estimate."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "replicate", "q_hat"])
        for r in self.rows:
            for i, q in enumerate(r.q_values):
                writer.writerow([r.n, i, repr(q)])
        return buf.getvalue()


def _subsample(corpus: Corpus, n: int, rng: np.random.Generator) -> Corpus:
    """n records drawn without replacement, keeping population order."""
    if n > len(corpus):
        raise ValueError(f"sample size {n} exceeds population size {len(corpus)}")
    idx = np.sort(rng.choice(len(corpus), size=n, replace=False))
    return corpus.subset(int(i) for i in idx)


def _spread(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def sample_size_study(config: StudyConfig, pop_f: Corpus, pop_g: Corpus) -> StudyResult:
    """Spread of Q(F_n, G_n) estimates across sample sizes.

    For each n and replicate, draws fresh n-point samples (without
    replacement) from both populations and re-estimates Q; the
    full-population estimate serves as the reference truth.
    """
    max_n = max(config.sample_sizes)
    if max_n > len(pop_f) or max_n > len(pop_g):
        raise ValueError(
            f"max sample size {max_n} exceeds a population size "
            f"({len(pop_f)}, {len(pop_g)})"
        )
    truth = q_estimate(pop_f, pop_g, config.distance).q_hat
    rows = []
    for n in config.sample_sizes:
        qs = np.empty(config.replicates, dtype=np.float64)
        for rep in range(config.replicates):
            rng = np.random.default_rng([config.seed, n, rep])
            f_n = _subsample(pop_f, n, rng)
            g_n = _subsample(pop_g, n, rng)
            qs[rep] = q_estimate(f_n, g_n, config.distance).q_hat
        rows.append(
            StudyRow(
                n=n,
                mean_q=float(qs.mean()),
                std_q=_spread(qs),
                q_values=tuple(float(q) for q in qs),
            )
        )
    return StudyResult(
        rows=tuple(rows), truth_q=truth, distance=config.distance, seed=config.seed
    )


@dataclass(frozen=True)
class CalibrationReport:
    """Monte-Carlo behavior of the test under a fixed pair of generators."""

    m: int
    n: int
    replicates: int
    alpha: float
    seed: int
    distance: DistanceKind
    mean_q: float
    std_q: float
    rejection_rate: float
    q_values: tuple[float, ...]
    p_values: tuple[float, ...]

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            {
                "m": self.m,
                "n": self.n,
                "replicates": self.replicates,
                "alpha": self.alpha,
                "seed": self.seed,
                "distance": self.distance,
                "mean_q": self.mean_q,
                "std_q": self.std_q,
                "rejection_rate": self.rejection_rate,
                "theoretical_null_std": math.sqrt((1.0 / self.m + 1.0 / self.n) / 12.0),
            },
            indent=indent,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["replicate", "q_hat", "p_one_sided"])
        for i, (q, p) in enumerate(zip(self.q_values, self.p_values)):
            writer.writerow([i, repr(q), repr(p)])
        return buf.getvalue()


def calibration_study(
    gen_f: GeneratorSpec,
    gen_g: GeneratorSpec,
    m: int,
    n: int,
    replicates: int,
    alpha: float,
    seed: int,
    kind: DistanceKind = "cosine",
) -> CalibrationReport:
    """Replicated two-sample tests on freshly generated sample pairs.

    Each replicate draws an m-point sample from gen_f and an n-point
    sample from gen_g from independent derived streams, then records the
    Q estimate and p-value. With gen_f == gen_g this measures null
    calibration; with separated generators it measures power.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    if m < 1 or n < 1:
        raise ValueError(f"sample sizes must be >= 1, got m={m}, n={n}")
    qs = np.empty(replicates, dtype=np.float64)
    ps = np.empty(replicates, dtype=np.float64)
    for rep in range(replicates):
        f_sample = generate_population(gen_f, m, seed=[seed, rep, 0], name="f")
        g_sample = generate_population(gen_g, n, seed=[seed, rep, 1], name="g")
        report = q_estimate(f_sample, g_sample, kind)
        qs[rep] = report.q_hat
        ps[rep] = report.p_one_sided
    return CalibrationReport(
        m=m,
        n=n,
        replicates=replicates,
        alpha=alpha,
        seed=seed,
        distance=kind,
        mean_q=float(qs.mean()),
        std_q=_spread(qs),
        rejection_rate=float(np.count_nonzero(ps < alpha)) / replicates,
        q_values=tuple(float(q) for q in qs),
        p_values=tuple(float(p) for p in ps),
    )


def null_calibration(
    generator: GeneratorSpec,
    m: int,
    n: int,
    replicates: int,
    alpha: float,
    seed: int,
    kind: DistanceKind = "cosine",
) -> CalibrationReport:
    """Empirical check of the N(0, (1/m + 1/n)/12) null approximation.

    Both samples of every replicate come from the same generator, so the
    rejection rate should sit near alpha and the std of the Q estimates
    near the theoretical null value.
    """
    if replicates < 100:
        warnings.warn(
            f"{replicates} replicates gives noisy rejection rates; use >= 100",
            stacklevel=2,
        )
    return calibration_study(generator, generator, m, n, replicates, alpha, seed, kind)
