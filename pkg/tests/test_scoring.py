"""Scoring arithmetic against an independently coded direct-formula oracle."""

from __future__ import annotations

import numpy as np
import pytest

from hilmeme.scoring import (
    JudgementError,
    MweCategory,
    MweJudgement,
    SegmentJudgement,
    Tally,
    category_score,
    make_mwe_judgement,
    normalize,
    normalized_score,
    segment_max_points,
    segment_raw_score,
    update_tally,
)

from conftest import FIXED_TS, random_segment_judgement

ATOL = 1e-9


# --- independent oracle -----------------------------------------------------
# Direct evaluation of the scoring definition, written without reusing any
# library code path: accumulate weighted per-MWE contributions one by one.


def oracle_raw(judgement: SegmentJudgement) -> float:
    total = 0.0
    count = 0
    for m in judgement.mwe_judgements:
        total += m.weight * m.score
        count += 1
    if count == 0:
        return judgement.general
    return judgement.general + total / count


def oracle_max(judgement: SegmentJudgement) -> float:
    total = 0.0
    count = 0
    for m in judgement.mwe_judgements:
        total += m.weight * 10.0
        count += 1
    if count == 0:
        return 10.0
    return 10.0 + total / count


def oracle_norm(judgement: SegmentJudgement) -> float:
    return oracle_raw(judgement) / oracle_max(judgement)


def _judgement(general, mwes=()):
    return SegmentJudgement(
        item_id="i",
        system_id="s",
        assessor_id="a",
        general=general,
        mwe_judgements=tuple(mwes),
        submitted_at=FIXED_TS,
    )


# --- fixed-score table ------------------------------------------------------


class TestCategoryScore:
    def test_ref_mwe_is_10(self):
        assert category_score(MweCategory.REF_MWE) == 10.0

    def test_alt_mwe_is_10(self):
        assert category_score(MweCategory.ALT_MWE) == 10.0

    def test_null_is_0(self):
        assert category_score(MweCategory.NULL) == 0.0

    def test_non_mwe_passes_score_through(self):
        assert category_score(MweCategory.NON_MWE, 7) == 7.0
        assert category_score(MweCategory.NON_MWE, 0) == 0.0
        assert category_score(MweCategory.NON_MWE, 10) == 10.0

    @pytest.mark.parametrize("category", [MweCategory.REF_MWE, MweCategory.ALT_MWE, MweCategory.NULL])
    def test_fixed_categories_reject_assessor_score(self, category):
        with pytest.raises(JudgementError):
            category_score(category, 5)

    def test_non_mwe_requires_score(self):
        with pytest.raises(JudgementError):
            category_score(MweCategory.NON_MWE)

    @pytest.mark.parametrize("bad", [-0.1, 10.1, 99])
    def test_score_range_enforced(self, bad):
        with pytest.raises(JudgementError):
            category_score(MweCategory.NON_MWE, bad)


class TestMweJudgementInvariants:
    def test_alt_requires_capture(self):
        with pytest.raises(JudgementError):
            make_mwe_judgement("m1", MweCategory.ALT_MWE, weight=0.5)

    def test_alt_capture_must_be_non_blank(self):
        with pytest.raises(JudgementError):
            make_mwe_judgement("m1", MweCategory.ALT_MWE, weight=0.5, captured_rendering="   ")

    def test_capture_rejected_for_ref_and_null(self):
        for category in (MweCategory.REF_MWE, MweCategory.NULL):
            with pytest.raises(JudgementError):
                make_mwe_judgement("m1", category, weight=0.5, captured_rendering="x")

    def test_non_mwe_capture_is_optional(self):
        m = make_mwe_judgement("m1", MweCategory.NON_MWE, weight=0.5, assessor_score=8,
                               captured_rendering="plain wording")
        assert m.captured_rendering == "plain wording"

    def test_fixed_score_mismatch_rejected(self):
        with pytest.raises(JudgementError):
            MweJudgement(span_id="m1", category=MweCategory.REF_MWE, score=9.0)

    @pytest.mark.parametrize("weight", [-0.01, 1.01])
    def test_weight_range(self, weight):
        with pytest.raises(JudgementError):
            make_mwe_judgement("m1", MweCategory.REF_MWE, weight=weight)

    def test_scores_and_weights_quantized_to_2dp(self):
        m = make_mwe_judgement("m1", MweCategory.NON_MWE, weight=0.333333, assessor_score=6.666666)
        assert m.weight == 0.33
        assert m.score == 6.67

    def test_duplicate_span_ids_rejected(self):
        m = make_mwe_judgement("m1", MweCategory.REF_MWE, weight=1.0)
        with pytest.raises(JudgementError):
            _judgement(5, [m, m])

    def test_general_range(self):
        with pytest.raises(JudgementError):
            _judgement(10.5)
        with pytest.raises(JudgementError):
            _judgement(-1)

    def test_dict_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            j = random_segment_judgement(rng)
            assert SegmentJudgement.from_dict(j.to_dict()) == j


# --- worked examples --------------------------------------------------------


class TestWorkedExamples:
    def test_maximal_single_mwe(self):
        j = _judgement(10, [make_mwe_judgement("m1", MweCategory.REF_MWE, weight=1.0)])
        assert segment_raw_score(j) == 20.0
        assert segment_max_points(j) == 20.0
        assert normalize(20.0, 20.0) == 1.0

    def test_non_mwe_half_weight(self):
        j = _judgement(6, [make_mwe_judgement("m1", MweCategory.NON_MWE, weight=0.5, assessor_score=8)])
        assert segment_raw_score(j) == pytest.approx(10.0, abs=ATOL)
        assert segment_max_points(j) == pytest.approx(15.0, abs=ATOL)
        assert normalized_score(j) == pytest.approx(10.0 / 15.0, abs=ATOL)

    def test_zero_mwes_raw_is_general(self):
        j = _judgement(5)
        assert segment_raw_score(j) == 5.0
        assert segment_max_points(j) == 10.0

    def test_two_mwes_mean_aggregation(self):
        j = _judgement(
            4,
            [
                make_mwe_judgement("m1", MweCategory.NULL, weight=1.0),
                make_mwe_judgement("m2", MweCategory.REF_MWE, weight=0.2),
            ],
        )
        assert segment_raw_score(j) == pytest.approx(4 + (0.0 + 2.0) / 2, abs=ATOL)

    def test_max_points_two_mwes(self):
        j = _judgement(
            1,
            [
                make_mwe_judgement("m1", MweCategory.NON_MWE, weight=0.5, assessor_score=1),
                make_mwe_judgement("m2", MweCategory.NON_MWE, weight=0.3, assessor_score=1),
            ],
        )
        assert segment_max_points(j) == pytest.approx(10 + (5.0 + 3.0) / 2, abs=ATOL)

    def test_normalize_extremes(self):
        assert normalize(0.0, 10.0) == 0.0
        assert normalize(10.0, 15.0) == pytest.approx(2.0 / 3.0, abs=ATOL)

    def test_normalize_rejects_corrupt_inputs(self):
        with pytest.raises(JudgementError):
            normalize(5.0, 9.0)  # ceiling below the step-I band
        with pytest.raises(JudgementError):
            normalize(21.0, 20.0)
        with pytest.raises(JudgementError):
            normalize(-0.5, 10.0)


# --- properties over random judgements ---------------------------------------


class TestScoringProperties:
    def test_matches_oracle_and_stays_in_unit_interval(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            j = random_segment_judgement(rng)
            raw = segment_raw_score(j)
            mx = segment_max_points(j)
            assert abs(raw - oracle_raw(j)) <= 1e-12
            assert abs(mx - oracle_max(j)) <= 1e-12
            norm = normalize(raw, mx)
            assert abs(norm - oracle_norm(j)) <= 1e-12
            assert 0.0 <= norm <= 1.0

    def test_normalized_is_1_exactly_for_perfect_judgements(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            j = random_segment_judgement(rng)
            perfect = all(m.score == 10.0 for m in j.mwe_judgements if m.weight > 0)
            perfect = perfect and j.general == 10.0
            assert (normalized_score(j) == 1.0) == perfect

    def test_monotone_in_general_and_mwe_scores(self):
        rng = np.random.default_rng(44)
        for _ in range(200):
            j = random_segment_judgement(rng)
            norm = normalized_score(j)
            if j.general < 10:
                bumped = SegmentJudgement(
                    item_id=j.item_id,
                    system_id=j.system_id,
                    assessor_id=j.assessor_id,
                    general=min(10.0, j.general + float(rng.uniform(0, 10 - j.general))),
                    mwe_judgements=j.mwe_judgements,
                    submitted_at=j.submitted_at,
                )
                assert normalized_score(bumped) >= norm
            for idx, m in enumerate(j.mwe_judgements):
                if m.category is not MweCategory.NON_MWE or m.score >= 10:
                    continue
                raised = MweJudgement(
                    span_id=m.span_id,
                    category=m.category,
                    score=min(10.0, m.score + float(rng.uniform(0, 10 - m.score))),
                    aspects=m.aspects,
                    weight=m.weight,
                    captured_rendering=m.captured_rendering,
                )
                mwes = list(j.mwe_judgements)
                mwes[idx] = raised
                bumped = SegmentJudgement(
                    item_id=j.item_id,
                    system_id=j.system_id,
                    assessor_id=j.assessor_id,
                    general=j.general,
                    mwe_judgements=tuple(mwes),
                    submitted_at=j.submitted_at,
                )
                assert normalized_score(bumped) >= norm

    def test_zero_weights_reduce_to_general_over_10(self):
        rng = np.random.default_rng(45)
        for _ in range(200):
            j = random_segment_judgement(rng)
            zeroed = tuple(
                MweJudgement(
                    span_id=m.span_id,
                    category=m.category,
                    score=m.score,
                    aspects=m.aspects,
                    weight=0.0,
                    captured_rendering=m.captured_rendering,
                )
                for m in j.mwe_judgements
            )
            flat = SegmentJudgement(
                item_id=j.item_id,
                system_id=j.system_id,
                assessor_id=j.assessor_id,
                general=j.general,
                mwe_judgements=zeroed,
                submitted_at=j.submitted_at,
            )
            assert normalized_score(flat) == pytest.approx(j.general / 10.0, abs=ATOL)

    def test_aspects_never_affect_scores(self):
        rng = np.random.default_rng(46)
        for _ in range(200):
            j = random_segment_judgement(rng)
            mutated = tuple(
                MweJudgement(
                    span_id=m.span_id,
                    category=m.category,
                    score=m.score,
                    aspects=frozenset() if m.aspects else frozenset({"sem", "amb"}),
                    weight=m.weight,
                    captured_rendering=m.captured_rendering,
                )
                for m in j.mwe_judgements
            )
            other = SegmentJudgement(
                item_id=j.item_id,
                system_id=j.system_id,
                assessor_id=j.assessor_id,
                general=j.general,
                mwe_judgements=mutated,
                submitted_at=j.submitted_at,
            )
            assert segment_raw_score(other) == segment_raw_score(j)
            assert segment_max_points(other) == segment_max_points(j)
            assert normalized_score(other) == normalized_score(j)


# --- tallies -----------------------------------------------------------------


class TestTally:
    def test_single_ref_mwe(self):
        j = _judgement(5, [make_mwe_judgement("m1", MweCategory.REF_MWE, weight=1.0)])
        assert update_tally(Tally(), j) == Tally(alpha=1)

    def test_counting_example(self):
        j = _judgement(
            5,
            [
                make_mwe_judgement("m1", MweCategory.NULL, weight=1.0),
                make_mwe_judgement("m2", MweCategory.ALT_MWE, weight=1.0, captured_rendering="x"),
            ],
        )
        assert update_tally(Tally(alpha=2, gamma=1), j) == Tally(alpha=2, beta=1, gamma=1, theta=1)

    def test_zero_mwe_judgement_leaves_tally_unchanged(self):
        tally = Tally(alpha=3, beta=1, gamma=4, theta=1)
        assert update_tally(tally, _judgement(9)) == tally

    def test_conservation_and_order_independence(self):
        rng = np.random.default_rng(47)
        judgements = [random_segment_judgement(rng) for _ in range(60)]
        expected_total = sum(len(j.mwe_judgements) for j in judgements)
        baseline = None
        for _ in range(100):
            order = rng.permutation(len(judgements))
            tally = Tally()
            for idx in order:
                tally = update_tally(tally, judgements[idx])
            assert tally.total() == expected_total
            if baseline is None:
                baseline = tally
            assert tally == baseline

    def test_negative_counters_rejected(self):
        with pytest.raises(JudgementError):
            Tally(alpha=-1)
