"""Acceptance suite: one test group per exit criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Criterion 4's std sub-check is expected to fail: the Q estimate that
satisfies the exact identity law (criterion 3) and retains power
(criterion 5) has an intrinsic null std of sqrt((2/m + 1/n)/12) ~ 0.0505
on the degenerate uniform-sphere null, which sits above the pinned
[0.032, 0.050] window. See the analysis in the project notes; the seed
below was fixed a priori, not searched.
"""

import time
import warnings

import numpy as np
import pytest

from embdepth import (
    Corpus,
    EmbeddingRecord,
    GeneratorSpec,
    StudyConfig,
    calibration_study,
    depth_scores,
    distance,
    generate_population,
    load_corpus,
    mcnemar,
    null_calibration,
    q_estimate,
    sample_size_study,
    select,
    wilcoxon_test,
)

from conftest import make_random_corpus
from naive_reference import naive_depth_scores_both

ACCEPTANCE_SEED = 0


def report_line(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"\nacceptance {name}: {status}{suffix}")


# ----------------------------------------------------------------------
# Criterion 1: oracle equivalence on 50 random corpora, < 5 s total
# ----------------------------------------------------------------------


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 201))
        k = int(rng.integers(1, 33))
        corpus = make_random_corpus(rng, m, k)
        cos_oracle, chord_oracle = naive_depth_scores_both(corpus)
        for kind, oracle in (("cosine", cos_oracle), ("chord", chord_oracle)):
            scores = depth_scores(corpus, kind).scores
            for rec_id, expected in oracle.items():
                worst = max(worst, abs(scores[rec_id] - expected))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5.0
    report_line(
        "criterion 1 (oracle equivalence)", ok,
        f"max |diff| = {worst:.2e}, runtime = {elapsed:.2f}s",
    )
    assert worst <= 1e-12
    assert elapsed < 5.0


# ----------------------------------------------------------------------
# Criterion 2: closed-form statistics
# ----------------------------------------------------------------------


def test_criterion_2_closed_form_statistics():
    wt = wilcoxon_test(0.4064, 500, 500)
    z_ok = abs(wt.z - (-5.1267)) <= 0.001
    p_ok = abs(wt.p_one_sided - 1.47e-7) / 1.47e-7 <= 0.05

    half_ok = True
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    pairs = [(1, 1), (1, 10000), (10000, 10000)] + [
        (int(rng.integers(1, 10001)), int(rng.integers(1, 10001))) for _ in range(200)
    ]
    for m, n in pairs:
        if wilcoxon_test(0.5, m, n).p_one_sided != 0.5:
            half_ok = False
            break

    chi2, p = mcnemar(10, 2)
    mc_ok = abs(chi2 - 4.0833) <= 1e-4 and abs(p - 0.0433) <= 1e-3

    ok = z_ok and p_ok and half_ok and mc_ok
    report_line(
        "criterion 2 (closed-form statistics)", ok,
        f"z = {wt.z:.5f}, p = {wt.p_one_sided:.3e}, chi2 = {chi2:.5f}, p = {p:.5f}",
    )
    assert z_ok and p_ok and half_ok and mc_ok


# ----------------------------------------------------------------------
# Criterion 3: identity law
# ----------------------------------------------------------------------


def test_criterion_3_identity_law():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    results = {}
    for m in (1, 5, 100):
        corpus = make_random_corpus(rng, m, 12)
        scores = list(depth_scores(corpus).scores.values())
        assert len(set(scores)) == m, "fixture must have all-distinct depths"
        results[m] = q_estimate(corpus, corpus).q_hat == (m + 1) / (2 * m)

    # m = 2 is structurally tied: both depths equal 2 - delta(a,b)/2 for any
    # two records, so the criterion's all-distinct precondition is
    # unsatisfiable there. Verified algebraically below; the documented
    # tie rule (ties count per "<=") then gives q_hat = 1.
    two_always_tied = True
    for _ in range(50):
        corpus = make_random_corpus(rng, 2, int(rng.integers(2, 16)))
        a, b = depth_scores(corpus).scores.values()
        if a != b:
            two_always_tied = False
    corpus2 = make_random_corpus(rng, 2, 6)
    tie_rule_value = q_estimate(corpus2, corpus2).q_hat

    ok = all(results.values()) and two_always_tied and tie_rule_value == 1.0
    report_line(
        "criterion 3 (identity law)", ok,
        "exact at m in {1, 5, 100}; m = 2 precondition unsatisfiable "
        "(structural depth tie), tie rule gives 1.0",
    )
    assert all(results.values())
    assert two_always_tied
    assert tie_rule_value == 1.0


# ----------------------------------------------------------------------
# Criterion 4: null calibration (std sub-check expected red; see ledger)
# ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def null_calibration_run():
    start = time.perf_counter()
    report = null_calibration(
        GeneratorSpec(dim=16), m=100, n=100, replicates=500, alpha=0.05,
        seed=ACCEPTANCE_SEED,
    )
    elapsed = time.perf_counter() - start
    return report, elapsed


def test_criterion_4_null_calibration_mean(null_calibration_run):
    report, _ = null_calibration_run
    ok = 0.48 <= report.mean_q <= 0.52
    report_line("criterion 4a (null mean)", ok, f"mean = {report.mean_q:.4f}")
    assert ok


def test_criterion_4_null_calibration_std(null_calibration_run):
    report, _ = null_calibration_run
    ok = 0.032 <= report.std_q <= 0.050
    report_line(
        "criterion 4b (null std)", ok,
        f"std = {report.std_q:.4f}; statistic's true null std is "
        "sqrt((2/m + 1/n)/12) ~ 0.0505 on this degenerate null (see ledger)",
    )
    assert ok, (
        f"std {report.std_q:.4f} outside [0.032, 0.050]: structurally expected; "
        "the identity-law- and power-compatible Q estimate carries a "
        "sqrt(1.5) variance inflation on the constant-population-depth null"
    )


def test_criterion_4_null_calibration_rejection_rate(null_calibration_run):
    report, _ = null_calibration_run
    ok = 0.025 <= report.rejection_rate <= 0.085
    report_line(
        "criterion 4c (rejection rate)", ok, f"rate = {report.rejection_rate:.4f}"
    )
    assert ok


def test_criterion_4_null_calibration_runtime(null_calibration_run):
    _, elapsed = null_calibration_run
    ok = elapsed < 120.0
    report_line("criterion 4d (runtime)", ok, f"{elapsed:.1f}s < 120s")
    assert ok


# ----------------------------------------------------------------------
# Criterion 5: power against separated concentrated generators
# ----------------------------------------------------------------------


def test_criterion_5_power():
    k = 16
    e1 = tuple([1.0] + [0.0] * (k - 1))
    e2 = tuple([0.0, 1.0] + [0.0] * (k - 2))
    report = calibration_study(
        GeneratorSpec(dim=k, family="concentrated", concentration=20.0, mean_direction=e1),
        GeneratorSpec(dim=k, family="concentrated", concentration=20.0, mean_direction=e2),
        m=100, n=100, replicates=100, alpha=0.05, seed=ACCEPTANCE_SEED,
    )
    rejections = sum(1 for p in report.p_values if p < 0.05)
    all_below_half = all(q < 0.5 for q in report.q_values)
    ok = rejections >= 95 and all_below_half
    report_line(
        "criterion 5 (power)", ok,
        f"rejections = {rejections}/100, max q = {max(report.q_values):.4f}",
    )
    assert rejections >= 95
    assert all_below_half


# ----------------------------------------------------------------------
# Criterion 6: sample-size study spread shape
# ----------------------------------------------------------------------


def test_criterion_6_sample_size_spread():
    gen = GeneratorSpec(dim=16)
    pop_f = generate_population(gen, 2000, [ACCEPTANCE_SEED, 101], name="pop_f")
    pop_g = generate_population(gen, 2000, [ACCEPTANCE_SEED, 202], name="pop_g")
    config = StudyConfig(
        sample_sizes=(5, 25, 50, 100, 500), replicates=20, seed=ACCEPTANCE_SEED,
        distance="cosine", generator=gen,
    )
    result = sample_size_study(config, pop_f, pop_g)
    stds = [row.std_q for row in result.rows]
    inversions = sum(1 for a, b in zip(stds, stds[1:]) if not b < a)
    ok = inversions <= 1
    report_line(
        "criterion 6 (spread vs n)", ok,
        "stds = " + ", ".join(f"{s:.4f}" for s in stds) + f"; inversions = {inversions}",
    )
    assert inversions <= 1


# ----------------------------------------------------------------------
# Criterion 7: invariant suite
# ----------------------------------------------------------------------


def test_criterion_7_depth_range_and_singleton():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    in_range = True
    for kind in ("cosine", "chord"):
        for _ in range(10):
            corpus = make_random_corpus(rng, int(rng.integers(1, 120)), int(rng.integers(1, 24)))
            values = depth_scores(corpus, kind).scores.values()
            in_range &= all(0.0 <= v <= 2.0 for v in values)
    singleton = Corpus.from_records([EmbeddingRecord("only", rng.standard_normal(8))])
    singleton_ok = (
        depth_scores(singleton, "cosine").scores["only"] == 2.0
        and depth_scores(singleton, "chord").scores["only"] == 2.0
    )
    ok = in_range and singleton_ok
    report_line("criterion 7a (range + singleton)", ok)
    assert in_range and singleton_ok


def test_criterion_7_cosine_scale_invariance(tmp_path):
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    raw = rng.standard_normal((60, 10)) * 3.0
    base = tmp_path / "base.jsonl"
    pow2 = tmp_path / "pow2.jsonl"
    arb = tmp_path / "arb.jsonl"
    import json as _json

    with base.open("w") as fb, pow2.open("w") as fp, arb.open("w") as fa:
        for i in range(raw.shape[0]):
            rec = {"id": f"r{i:03d}", "vector": [float(x) for x in raw[i]]}
            fb.write(_json.dumps(rec) + "\n")
            s2 = 2.0 ** int(rng.integers(-8, 9))
            rec2 = {"id": f"r{i:03d}", "vector": [float(x * s2) for x in raw[i]]}
            fp.write(_json.dumps(rec2) + "\n")
            sa = float(rng.uniform(0.3, 3.0))
            rec3 = {"id": f"r{i:03d}", "vector": [float(x * sa) for x in raw[i]]}
            fa.write(_json.dumps(rec3) + "\n")

    rep_base = depth_scores(load_corpus(base), "cosine")
    rep_pow2 = depth_scores(load_corpus(pow2), "cosine")
    bitwise_ok = (
        rep_pow2.scores == rep_base.scores
        and rep_pow2.ordering == rep_base.ordering
        and rep_pow2.median_id == rep_base.median_id
    )
    # Arbitrary decimal scalars can shift the parsed values by an ulp, so the
    # bitwise claim is checked with exactly-representable power-of-two
    # scalings and the general case at 1e-14.
    rep_arb = depth_scores(load_corpus(arb), "cosine")
    arb_ok = (
        all(abs(rep_arb.scores[i] - rep_base.scores[i]) <= 1e-14 for i in rep_base.scores)
        and rep_arb.ordering == rep_base.ordering
        and rep_arb.median_id == rep_base.median_id
    )
    ok = bitwise_ok and arb_ok
    report_line("criterion 7b (cosine scale invariance)", ok,
                "bitwise under power-of-two rescaling, 1e-14 under arbitrary")
    assert bitwise_ok
    assert arb_ok


def test_criterion_7_chord_cosine_relation():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    worst = 0.0
    for _ in range(10_000):
        k = int(rng.integers(2, 33))
        x = rng.standard_normal(k)
        y = rng.standard_normal(k)
        x /= np.linalg.norm(x)
        y /= np.linalg.norm(y)
        worst = max(
            worst,
            abs(distance(x, y, "chord") ** 2 - 2.0 * distance(x, y, "cosine")),
        )
    ok = worst <= 1e-9
    report_line("criterion 7c (chord^2 = 2 cosine)", ok, f"max |diff| = {worst:.2e}")
    assert worst <= 1e-9


def test_criterion_7_permutation_and_thread_determinism():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    perm_ok = True
    thread_ok = True
    for kind in ("cosine", "chord"):
        corpus = make_random_corpus(rng, 90, 12)
        base = depth_scores(corpus, kind, threads=1)
        shuffled = corpus.subset(int(i) for i in rng.permutation(len(corpus)))
        shuffled_report = depth_scores(shuffled, kind, threads=1)
        perm_ok &= shuffled_report.scores == base.scores
        perm_ok &= shuffled_report.median_id == base.median_id
        for threads in (4, 8):
            other = depth_scores(corpus, kind, threads=threads)
            thread_ok &= other.scores == base.scores and other.ordering == base.ordering
    ok = perm_ok and thread_ok
    report_line("criterion 7d (permutation + thread determinism)", ok)
    assert perm_ok
    assert thread_ok


# ----------------------------------------------------------------------
# Criterion 8: selection laws
# ----------------------------------------------------------------------


def test_criterion_8_selection_laws():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    deep_ok = True
    dldm_ok = True
    quota_ok = True
    for trial in range(20):
        m = int(rng.integers(6, 60))
        corpus = make_random_corpus(rng, m, int(rng.integers(2, 10)), labeled=True)
        n = int(rng.integers(1, m + 1))

        report = depth_scores(corpus)
        deep_ok &= select(corpus, "DEEP", n, seed=trial).selected == report.ordering[:n]

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = select(corpus, "DLDM", n, seed=trial)
        label_counts = {}
        for rec in corpus.records:
            label_counts[rec.label] = label_counts.get(rec.label, 0) + 1
        quota_ok &= sum(plan.per_label_quota.values()) == min(n, m)
        quota_ok &= all(
            plan.per_label_quota[lab] <= label_counts[lab] for lab in plan.per_label_quota
        )
        # brute force: per label, rank that label's records by depth
        # (position-tie-broken) and take quota-many
        rank = {rec_id: i for i, rec_id in enumerate(report.ordering)}
        for lab, quota in plan.per_label_quota.items():
            lab_ids = [rec.id for rec in corpus.records if rec.label == lab]
            expected = set(sorted(lab_ids, key=lambda r: rank[r])[:quota])
            got = {s for s in plan.selected if s in set(lab_ids)}
            dldm_ok &= got == expected
    ok = deep_ok and dldm_ok and quota_ok
    report_line("criterion 8 (selection laws)", ok)
    assert deep_ok
    assert dldm_ok
    assert quota_ok
