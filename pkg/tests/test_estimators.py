"""Estimator wrappers: fit/predict surface, parameter plumbing, clone."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from topical import (
    ConstraintCalibrator,
    ConstraintSet,
    DataError,
    TopicClassifier,
    save_model,
)

from conftest import make_doc


def training_docs():
    return [
        make_doc("d1", "wicket bowler innings", "u1", gold_labels={"A"}),
        make_doc("d2", "bowler wicket again", "u2", gold_labels={"A"}),
        make_doc("d3", "dunk rebound court", "u3", gold_labels={"B"}),
        make_doc("d4", "rebound dunk layup", "u4", gold_labels={"B"}),
        make_doc("d5", "coffee first thing", "u5", gold_labels=set()),
    ]


def fitted_classifier(**overrides):
    params = dict(topics=["A", "B"], epochs=3, dim=2**10)
    params.update(overrides)
    return TopicClassifier(**params).fit(training_docs())


class TestTopicClassifier:
    def test_get_params_round_trip(self):
        clf = TopicClassifier(topics=["A"], epochs=2, dim=64, l2=0.5)
        params = clf.get_params()
        assert params["epochs"] == 2
        assert params["dim"] == 64
        assert params["l2"] == 0.5
        rebuilt = TopicClassifier(**params)
        assert rebuilt.get_params() == params

    def test_clone_preserves_params(self):
        clf = TopicClassifier(topics=["A", "B"], seed=9, use_author=False)
        cloned = clone(clf)
        assert cloned.get_params() == clf.get_params()

    def test_unfitted_prediction_rejected(self):
        clf = TopicClassifier(topics=["A"])
        with pytest.raises(NotFittedError):
            clf.predict_proba([make_doc()])

    def test_fit_sets_attributes(self):
        clf = fitted_classifier()
        assert clf.topics_ == ("A", "B")
        assert len(clf.loss_curve_) == 3
        assert clf.model_.dim == 2**10

    def test_fit_returns_self(self):
        clf = TopicClassifier(topics=["A", "B"], epochs=1, dim=64)
        assert clf.fit(training_docs()) is clf

    def test_predict_proba_shape_and_range(self):
        clf = fitted_classifier()
        proba = clf.predict_proba(training_docs())
        assert proba.shape == (5, 2)
        assert np.all((proba >= 0) & (proba <= 1))

    def test_predict_thresholds_proba(self):
        clf = fitted_classifier()
        docs = training_docs()
        proba = clf.predict_proba(docs)
        pred = clf.predict(docs)
        assert pred.dtype == np.int64
        assert np.array_equal(pred, (proba > 0.5).astype(np.int64))

    def test_decision_threshold_honored(self):
        low = fitted_classifier(decision_threshold=0.01)
        high = fitted_classifier(decision_threshold=0.99)
        docs = training_docs()
        assert low.predict(docs).sum() >= high.predict(docs).sum()

    def test_decision_function_is_logit_of_proba(self):
        clf = fitted_classifier()
        docs = training_docs()
        logits = clf.decision_function(docs)
        proba = clf.predict_proba(docs)
        np.testing.assert_allclose(1 / (1 + np.exp(-logits)), proba, atol=1e-12)

    def test_learns_separable_data(self):
        clf = fitted_classifier(epochs=5)
        docs = training_docs()
        proba = clf.predict_proba(docs)
        assert proba[0, 0] > proba[0, 1]  # "wicket" doc prefers topic A
        assert proba[2, 1] > proba[2, 0]  # "dunk" doc prefers topic B

    def test_explicit_y_overrides_document_labels(self):
        docs = training_docs()
        flipped = [{"B"}, {"B"}, {"A"}, {"A"}, set()]
        clf = TopicClassifier(topics=["A", "B"], epochs=5, dim=2**10)
        clf.fit(docs, y=flipped)
        proba = clf.predict_proba(docs)
        assert proba[0, 1] > proba[0, 0]  # wicket doc now labeled B
        # The input documents keep their original labels.
        assert docs[0].gold_labels == {"A"}

    def test_y_length_mismatch_rejected(self):
        clf = TopicClassifier(topics=["A", "B"], epochs=1, dim=64)
        with pytest.raises(DataError, match="entries"):
            clf.fit(training_docs(), y=[{"A"}])

    def test_weak_label_source(self):
        docs = [
            make_doc("d1", "wicket", weak_labels={"A"}),
            make_doc("d2", "dunk", weak_labels={"B"}),
        ]
        clf = TopicClassifier(
            topics=["A", "B"], epochs=3, dim=64, label_source="weak"
        )
        proba = clf.fit(docs).predict_proba(docs)
        assert proba[0, 0] > proba[0, 1]

    def test_corpus_input_accepted(self):
        from topical import Corpus

        corpus = Corpus(training_docs())
        clf = TopicClassifier(topics=["A", "B"], epochs=1, dim=64).fit(corpus)
        assert clf.predict_proba(corpus).shape == (5, 2)

    def test_non_document_input_rejected(self):
        clf = TopicClassifier(topics=["A"], epochs=1, dim=64)
        with pytest.raises(DataError, match="Document"):
            clf.fit(["just a string"])

    def test_score_is_median_ap(self):
        clf = fitted_classifier(epochs=5)
        score = clf.score(training_docs())
        assert score == 1.0  # separable data ranks perfectly

    def test_score_with_explicit_y(self):
        clf = fitted_classifier(epochs=5)
        docs = training_docs()
        y = [d.gold_labels for d in docs]
        assert clf.score(docs, y) == clf.score(docs)

    def test_init_model_from_path(self, tmp_path):
        first = fitted_classifier(epochs=2)
        path = tmp_path / "pre.bin"
        save_model(first.model_, path)
        tuned = TopicClassifier(
            topics=["A", "B"], epochs=1, dim=2**10, init_model=path
        ).fit(training_docs())
        assert tuned.loss_curve_[-1] < first.loss_curve_[0]

    def test_init_model_object(self):
        first = fitted_classifier(epochs=1)
        tuned = TopicClassifier(
            topics=["A", "B"], epochs=1, dim=2**10, init_model=first.model_
        ).fit(training_docs())
        assert not np.array_equal(
            tuned.model_.content_weights, first.model_.content_weights
        )

    def test_bad_init_model_rejected(self):
        clf = TopicClassifier(topics=["A", "B"], epochs=1, dim=64, init_model=42)
        with pytest.raises(DataError, match="init_model"):
            clf.fit(training_docs())

    def test_deterministic_across_fits(self):
        a = fitted_classifier(seed=5)
        b = fitted_classifier(seed=5)
        assert np.array_equal(a.model_.content_weights, b.model_.content_weights)


# Single-inclusion oracle (broader 0.3, narrower 0.9): enumeration gives
# Z = 2.75 and marginals (2.715/2.75, 2.7/2.75).
INCLUSION_ORACLE = (2.715 / 2.75, 2.7 / 2.75)


class TestConstraintCalibrator:
    def test_transform_applies_calibration_rowwise(self):
        cal = ConstraintCalibrator(constraints={"inclusions": [(0, 1)]})
        X = np.array([[0.3, 0.9], [0.3, 0.9]])
        out = cal.fit(X).transform(X)
        np.testing.assert_allclose(out[0], INCLUSION_ORACLE, atol=1e-12)
        np.testing.assert_allclose(out[1], INCLUSION_ORACLE, atol=1e-12)

    def test_fit_transform(self):
        cal = ConstraintCalibrator(constraints=ConstraintSet(inclusions=((0, 1),)))
        out = cal.fit_transform(np.array([[0.3, 0.9]]))
        np.testing.assert_allclose(out[0], INCLUSION_ORACLE, atol=1e-12)

    def test_none_constraints_is_identity(self):
        cal = ConstraintCalibrator()
        X = np.array([[0.12345, 0.9], [0.5, 0.001]])
        out = cal.fit(X).transform(X)
        assert np.array_equal(out, X)
        assert out is not X

    def test_unconstrained_columns_pass_through(self):
        cal = ConstraintCalibrator(constraints={"inclusions": [(0, 1)]})
        X = np.array([[0.3, 0.9, 0.123456789]])
        out = cal.fit(X).transform(X)
        assert out[0, 2] == X[0, 2]

    def test_dict_with_exclusions(self):
        cal = ConstraintCalibrator(constraints={"exclusions": [(0, 1)]})
        out = cal.fit_transform(np.array([[0.8, 0.8]]))
        np.testing.assert_allclose(out[0], [0.08 / 0.18, 0.08 / 0.18], atol=1e-12)

    def test_transform_before_fit_rejected(self):
        cal = ConstraintCalibrator()
        with pytest.raises(NotFittedError):
            cal.transform(np.array([[0.5]]))

    def test_column_count_mismatch_rejected(self):
        cal = ConstraintCalibrator().fit(np.array([[0.5, 0.5]]))
        with pytest.raises(DataError, match="columns"):
            cal.transform(np.array([[0.5, 0.5, 0.5]]))

    def test_constraint_index_out_of_range_rejected(self):
        cal = ConstraintCalibrator(constraints={"inclusions": [(0, 9)]})
        with pytest.raises(DataError, match="index 9"):
            cal.fit(np.array([[0.5, 0.5]]))

    def test_invalid_constraints_type_rejected(self):
        cal = ConstraintCalibrator(constraints="includes A B")
        with pytest.raises(DataError, match="ConstraintSet"):
            cal.fit(np.array([[0.5, 0.5]]))

    def test_bad_probability_rows_rejected(self):
        cal = ConstraintCalibrator(constraints={"inclusions": [(0, 1)]})
        cal.fit(np.array([[0.5, 0.5]]))
        with pytest.raises(DataError):
            cal.transform(np.array([[1.5, 0.5]]))

    def test_clone_and_get_params(self):
        cal = ConstraintCalibrator(
            constraints={"exclusions": [(0, 1)]}, damping=0.25, max_iters=50
        )
        cloned = clone(cal)
        assert cloned.get_params()["damping"] == 0.25
        assert cloned.get_params()["max_iters"] == 50

    def test_config_built_from_params(self):
        cal = ConstraintCalibrator(max_iters=7, tolerance=1e-5, damping=0.1)
        cal.fit(np.array([[0.5, 0.5]]))
        assert cal.config_.max_iters == 7
        assert cal.config_.tolerance == 1e-5
        assert cal.config_.damping == 0.1

    def test_empty_matrix_transform(self):
        cal = ConstraintCalibrator(constraints={"inclusions": [(0, 1)]})
        cal.fit(np.array([[0.5, 0.5]]))
        out = cal.transform(np.zeros((0, 2)))
        assert out.shape == (0, 2)
