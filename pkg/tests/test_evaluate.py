"""Evaluation metrics: average precision, chatter leakage, constraint checks."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topical import (
    ConstraintSet,
    DataError,
    EvalReport,
    average_precision,
    calibrate,
    chatter_count,
    evaluate_predictions,
    median_aps,
    register_topics,
    violation_count,
)
from topical.evaluate import report_to_json, report_to_table


class TestAveragePrecision:
    def test_worked_example(self):
        # Positives at ranks 1 and 3: mean(1/1, 2/3) = 5/6.
        ap = average_precision([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
        assert ap == pytest.approx(5.0 / 6.0, abs=1e-9)
        assert ap == pytest.approx(0.833333, abs=1e-6)

    def test_perfect_ranking(self):
        assert average_precision([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_reversed_ranking_closed_form(self):
        # P positives under N negatives: AP = (1/P) * sum_j j / (N + j).
        scores = [0.9, 0.8, 0.7, 0.2, 0.1]
        labels = [0, 0, 0, 1, 1]
        expected = (1.0 / 4.0 + 2.0 / 5.0) / 2.0  # N=3, P=2 -> 0.325
        assert average_precision(scores, labels) == pytest.approx(expected, abs=1e-12)

    def test_single_positive_rank_k(self):
        # Lone positive at rank 3 -> AP = 1/3.
        ap = average_precision([0.9, 0.8, 0.7, 0.6], [0, 0, 1, 0])
        assert ap == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_ties_broken_by_original_index(self):
        assert average_precision([0.5, 0.5, 0.5], [0, 1, 0]) == 0.5
        assert average_precision([0.5, 0.5, 0.5], [1, 0, 0]) == 1.0
        assert average_precision([0.5, 0.5, 0.5], [0, 0, 1]) == pytest.approx(1 / 3)

    def test_monotone_transform_invariance(self):
        scores = np.array([0.11, 0.92, 0.5, 0.31, 0.77])
        labels = np.array([0, 1, 1, 0, 0])
        base = average_precision(scores, labels)
        assert average_precision(scores / 10 + 0.05, labels) == base
        assert average_precision(scores**3, labels) == base

    def test_no_positive_rejected(self):
        with pytest.raises(DataError, match="positive"):
            average_precision([0.4, 0.2], [0, 0])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DataError, match="equal-length"):
            average_precision([0.4, 0.2], [1])

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0, max_value=1, allow_nan=False),
                st.integers(min_value=0, max_value=1),
            ),
            min_size=1,
            max_size=30,
        ).filter(lambda rows: any(y for _, y in rows))
    )
    def test_bounded_and_positive(self, rows):
        scores = [s for s, _ in rows]
        labels = [y for _, y in rows]
        ap = average_precision(scores, labels)
        assert 0.0 < ap <= 1.0


class TestMedianAps:
    def test_even_count_averages_middle_pair(self):
        assert median_aps([0.2, 0.4, 0.6, 0.8]) == 0.5

    def test_odd_count_takes_middle(self):
        assert median_aps([0.9, 0.1, 0.3]) == 0.3

    def test_single_value(self):
        assert median_aps([0.7]) == 0.7

    def test_empty_rejected(self):
        with pytest.raises(DataError, match="empty"):
            median_aps([])


class TestChatterCount:
    def test_worked_example(self):
        preds = [[0.95, 0.1], [0.5, 0.91], [0.2, 0.3]]
        assert chatter_count(preds, 0.9) == 2

    def test_strictly_greater(self):
        assert chatter_count([[0.9, 0.9]], 0.9) == 0
        assert chatter_count([[0.9000001, 0.9]], 0.9) == 1

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(2)
        preds = rng.uniform(size=(20, 5))
        assert chatter_count(preds, 0.5) >= chatter_count(preds, 0.9)

    def test_single_row_vector_accepted(self):
        assert chatter_count([0.95, 0.1], 0.9) == 1

    @pytest.mark.parametrize("threshold", [0.0, 1.0, -0.5, 1.5])
    def test_threshold_bounds(self, threshold):
        with pytest.raises(DataError, match="threshold"):
            chatter_count([[0.5]], threshold)


class TestViolationCount:
    def test_inclusion_worked_example(self):
        # Sports (broader, index 0) at 0.4 with Cricket (narrower, index 1)
        # at 0.8: at threshold 0.5 the narrower fires without the broader.
        cs = ConstraintSet(inclusions=((0, 1),))
        out = violation_count([[0.4, 0.8]], cs, 0.5)
        assert out == {"inclusion": 1, "exclusion": 0}

    def test_inclusion_not_violated_when_broader_fires(self):
        cs = ConstraintSet(inclusions=((0, 1),))
        assert violation_count([[0.9, 0.8]], cs, 0.5)["inclusion"] == 0
        assert violation_count([[0.4, 0.3]], cs, 0.5)["inclusion"] == 0

    def test_exclusion_fires_on_joint_activation(self):
        cs = ConstraintSet(exclusions=((0, 1),))
        assert violation_count([[0.6, 0.7]], cs, 0.5)["exclusion"] == 1
        assert violation_count([[0.6, 0.3]], cs, 0.5)["exclusion"] == 0

    def test_strict_threshold_boundary(self):
        cs = ConstraintSet(inclusions=((0, 1),))
        assert violation_count([[0.5, 0.5]], cs, 0.5)["inclusion"] == 0
        assert violation_count([[0.5, 0.5000001]], cs, 0.5)["inclusion"] == 1

    def test_sums_over_documents_and_constraints(self):
        cs = ConstraintSet(inclusions=((0, 1),), exclusions=((2, 3),))
        preds = [
            [0.1, 0.9, 0.8, 0.8],  # one inclusion + one exclusion violation
            [0.1, 0.9, 0.1, 0.8],  # one inclusion violation
        ]
        assert violation_count(preds, cs, 0.5) == {"inclusion": 2, "exclusion": 1}

    def test_no_constraints(self):
        assert violation_count([[0.9]], ConstraintSet(), 0.5) == {
            "inclusion": 0,
            "exclusion": 0,
        }

    def test_out_of_range_index_rejected(self):
        cs = ConstraintSet(inclusions=((0, 5),))
        with pytest.raises(DataError, match="index 5"):
            violation_count([[0.5, 0.5]], cs, 0.5)


class TestCalibrationViolationInteraction:
    def test_exact_calibration_removes_inclusion_violations(self):
        # The calibrated broader-topic marginal always dominates the
        # narrower one, so inclusion violations vanish at every threshold.
        cs = ConstraintSet(inclusions=((0, 1),))
        raw = np.array([[0.4, 0.8], [0.05, 0.95], [0.3, 0.31]])
        calibrated = np.vstack([calibrate(row, cs) for row in raw])
        for t in (0.1, 0.3, 0.5, 0.7, 0.9):
            assert violation_count(calibrated, cs, t)["inclusion"] == 0

    def test_exclusion_pair_mass_bounded_after_calibration(self):
        # P(a) + P(b) <= 1 after calibrating an exclusion pair, so no
        # exclusion violation can survive at thresholds >= 0.5.
        cs = ConstraintSet(exclusions=((0, 1),))
        for pa, pb in [(0.8, 0.8), (0.99, 0.99), (0.6, 0.9)]:
            out = calibrate(np.array([pa, pb]), cs)
            assert out.sum() <= 1.0 + 1e-12
            assert violation_count([out], cs, 0.5)["exclusion"] == 0

    def test_low_threshold_exclusion_violations_can_appear(self):
        # Calibration is a global redistribution, not a per-constraint
        # clean-up: an exclusion tied to two inclusions can pull both
        # exclusion endpoints *up* past a low threshold.
        probs = np.array([0.28, 0.28, 0.29, 0.29])
        cs = ConstraintSet(inclusions=((0, 2), (1, 3)), exclusions=((0, 1),))
        before = violation_count([probs], cs, 0.3)
        assert before == {"inclusion": 0, "exclusion": 0}
        out = calibrate(probs, cs)
        assert out[0] == pytest.approx(0.43851, abs=5e-5)
        assert out[1] == pytest.approx(0.43851, abs=5e-5)
        assert out[2] == pytest.approx(0.39069, abs=5e-5)
        after = violation_count([out], cs, 0.3)
        assert after == {"inclusion": 0, "exclusion": 1}


@pytest.fixture
def abc_space():
    return register_topics(["A", "B", "C"])


class TestEvaluatePredictions:
    PREDS = np.array(
        [
            [0.95, 0.20, 0.10],
            [0.10, 0.80, 0.30],
            [0.92, 0.05, 0.20],
        ]
    )
    GOLD = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 0]])

    def test_full_report(self, abc_space):
        report = evaluate_predictions(self.PREDS, self.GOLD, abc_space)
        assert report.per_topic_ap == {"A": 1.0, "B": 1.0}
        assert report.median_aps == 1.0
        assert report.threshold == 0.9
        # The third row is chatter; its 0.92 leaks past the 0.9 threshold.
        assert report.chatter_count == 1
        assert report.violations == {"inclusion": 0, "exclusion": 0}

    def test_zero_positive_topic_excluded(self, abc_space):
        report = evaluate_predictions(self.PREDS, self.GOLD, abc_space)
        assert "C" not in report.per_topic_ap

    def test_chatter_rows_count_as_negatives_in_ap(self, abc_space):
        preds = self.PREDS.copy()
        preds[2, 0] = 0.99  # chatter now outranks the true positive for A
        report = evaluate_predictions(preds, self.GOLD, abc_space)
        assert report.per_topic_ap["A"] == 0.5

    def test_threshold_propagates(self, abc_space):
        report = evaluate_predictions(self.PREDS, self.GOLD, abc_space, threshold=0.5)
        assert report.threshold == 0.5
        # Chatter row entries above 0.5: just the 0.92.
        assert report.chatter_count == 1

    def test_constraints_checked_when_given(self, abc_space):
        cs = ConstraintSet(inclusions=((2, 0),))  # C broader than A
        report = evaluate_predictions(
            self.PREDS, self.GOLD, abc_space, constraints=cs, threshold=0.5
        )
        # Rows 1 and 3 have A firing without C.
        assert report.violations == {"inclusion": 2, "exclusion": 0}

    def test_all_chatter_rejected(self, abc_space):
        with pytest.raises(DataError, match="no topic"):
            evaluate_predictions(self.PREDS, np.zeros((3, 3)), abc_space)

    def test_shape_mismatch_rejected(self, abc_space):
        with pytest.raises(DataError, match="differ in shape"):
            evaluate_predictions(self.PREDS, self.GOLD[:2], abc_space)

    def test_space_size_mismatch_rejected(self):
        wide = register_topics(["A", "B", "C", "D"])
        with pytest.raises(DataError, match="columns"):
            evaluate_predictions(self.PREDS, self.GOLD, wide)

    def test_no_chatter_rows(self, abc_space):
        gold = np.array([[1, 0, 0], [0, 1, 0], [0, 1, 0]])
        report = evaluate_predictions(self.PREDS, gold, abc_space)
        assert report.chatter_count == 0


class TestReportWriters:
    @pytest.fixture
    def report(self):
        return EvalReport(
            per_topic_ap={"Sports": 0.75, "Music": 1.0},
            median_aps=0.875,
            chatter_count=3,
            threshold=0.9,
            violations={"inclusion": 1, "exclusion": 0},
        )

    def test_json_payload(self, report):
        payload = json.loads(report_to_json(report))
        assert payload["median_aps"] == 0.875
        assert payload["chatter_count"] == 3
        assert payload["threshold"] == 0.9
        assert payload["violations"] == {"inclusion": 1, "exclusion": 0}
        assert payload["per_topic_ap"] == {"Sports": 0.75, "Music": 1.0}
        assert payload["topics_scored"] == 2

    def test_json_deterministic(self, report):
        assert report_to_json(report) == report_to_json(report)

    def test_table_format(self, report):
        table = report_to_table(report)
        lines = table.splitlines()
        assert lines[0] == "topic\tap"
        assert "Sports\t0.750000" in lines
        assert "Music\t1.000000" in lines
        assert table.endswith("\n")
