import sys
from pathlib import Path

import numpy as np
import pytest

from embdepth import Corpus, EmbeddingRecord

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def three_points() -> Corpus:
    """The two basis vectors plus the 45-degree direction; the latter is the median."""
    return Corpus.from_records(
        [
            EmbeddingRecord("a", np.array([1.0, 0.0])),
            EmbeddingRecord("b", np.array([0.0, 1.0])),
            EmbeddingRecord("c", np.array([0.70710678, 0.70710678])),
        ],
        name="three_points",
    )


def make_random_corpus(rng, m, k, labeled=False, name="rand") -> Corpus:
    vectors = rng.standard_normal((m, k))
    labels = ("A", "B", "C")
    records = []
    for i in range(m):
        label = labels[int(rng.integers(len(labels)))] if labeled else None
        records.append(EmbeddingRecord(f"r{i:05d}", vectors[i], label))
    return Corpus.from_records(records, name=name)
