"""
Tests for class rounding, accuracy and MAE metrics, and dataset summaries.
"""
import numpy as np
import pandas as pd
import pytest

from src.data import Dataset, EmotionLabel, FeatureSequence
from src.errors import ContractError, DimensionError, NumericError
from src.metrics import (
    METRIC_COLUMNS,
    REPORT_COLUMNS,
    acc4_overall,
    acc4_per_emotion,
    compute_metrics,
    label_class_distribution,
    length_summary,
    mae_overall,
    mae_per_emotion,
    round_class,
    round_classes,
    write_metrics_csv,
)


def _oracle_round(x):
    whole = int(np.floor(x))
    value = whole + 1 if x - whole >= 0.5 else whole
    return min(max(value, 0), 3)


def _oracle_accuracy(pred, truth):
    hits = 0
    for k in range(pred.shape[0]):
        for i in range(pred.shape[1]):
            hits += _oracle_round(pred[k, i]) == _oracle_round(truth[k, i])
    return hits / pred.size


class TestRounding:
    @pytest.mark.parametrize(
        "value,expected",
        [(2.3, 2), (0.5, 1), (1.0, 1), (-0.4, 0), (3.6, 3), (2.5, 3), (1.49, 1), (-7.0, 0), (12.0, 3)],
    )
    def test_half_up_with_clamp(self, value, expected):
        assert round_class(value) == expected

    @pytest.mark.parametrize("value", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, value):
        with pytest.raises(NumericError):
            round_class(value)

    def test_vectorized_matches_scalar(self):
        values = np.random.default_rng(0).uniform(-2, 5, size=500)
        assert round_classes(values).tolist() == [round_class(v) for v in values]

    def test_vectorized_rejects_nan(self):
        with pytest.raises(NumericError):
            round_classes(np.array([0.0, np.nan]))


class TestAccuracy:
    def test_identical(self):
        truth = np.random.default_rng(1).uniform(0, 3, size=(5, 6))
        assert acc4_overall(truth, truth) == 1.0

    def test_single_row_example(self):
        pred = np.array([[0.4, 1.6, 2.2, 0.1, 2.9, 0.7]])
        truth = np.array([[1, 2, 2, 0, 3, 1]], dtype=float)
        assert acc4_overall(pred, truth) == pytest.approx(5 / 6)

    def test_per_column_hand_case(self):
        truth = np.array([
            [0, 1, 2, 3, 0, 1],
            [1, 1, 1, 1, 1, 1],
            [3, 2, 1, 0, 3, 2],
        ], dtype=float)
        pred = truth.copy()
        pred[0, 0] = 1.2           # column 1: one miss
        pred[:, 3] += 0.2          # column 4: same classes
        pred[1, 5] = 2.6           # column 6: one miss
        pred[2, 5] = 0.4           # column 6: second miss
        expected = [2 / 3, 1.0, 1.0, 1.0, 1.0, 1 / 3]
        for j, value in enumerate(expected, start=1):
            assert acc4_per_emotion(pred, truth, j) == pytest.approx(value)

    def test_mean_of_columns_equals_overall(self):
        rng = np.random.default_rng(2)
        pred, truth = rng.uniform(-1, 4, size=(50, 6)), rng.uniform(0, 3, size=(50, 6))
        per_column = [acc4_per_emotion(pred, truth, j) for j in range(1, 7)]
        assert np.mean(per_column) == pytest.approx(acc4_overall(pred, truth))

    def test_class_preserving_perturbation(self):
        truth = np.full((4, 6), 2.0)
        pred = np.full((4, 6), 2.1)
        assert acc4_overall(pred, truth) == acc4_overall(pred + 0.3, truth) == 1.0

    @pytest.mark.parametrize("j", [0, 7, 2.0, True])
    def test_bad_column_index(self, j):
        x = np.zeros((2, 6))
        with pytest.raises(ContractError):
            acc4_per_emotion(x, x, j)


class TestMae:
    def test_zero_for_identical(self):
        x = np.random.default_rng(3).uniform(0, 3, size=(4, 6))
        assert mae_overall(x, x) == 0.0

    def test_constant_offset(self):
        truth = np.random.default_rng(4).uniform(0, 3, size=(4, 6))
        assert mae_overall(truth + 0.5, truth) == pytest.approx(0.5)
        assert mae_per_emotion(truth - 0.5, truth, 3) == pytest.approx(0.5)

    def test_raw_values_not_clamped(self):
        assert mae_overall(np.full((1, 6), -1.0), np.zeros((1, 6))) == 1.0

    def test_mean_of_columns_equals_overall(self):
        rng = np.random.default_rng(5)
        pred, truth = rng.normal(1.5, 1, size=(30, 6)), rng.uniform(0, 3, size=(30, 6))
        per_column = [mae_per_emotion(pred, truth, j) for j in range(1, 7)]
        assert np.mean(per_column) == pytest.approx(mae_overall(pred, truth))


class TestValidation:
    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            mae_overall(np.zeros((3, 6)), np.zeros((4, 6)))

    def test_wrong_column_count(self):
        with pytest.raises(DimensionError):
            acc4_overall(np.zeros((3, 5)), np.zeros((3, 5)))

    def test_empty(self):
        with pytest.raises(ContractError):
            compute_metrics(np.zeros((0, 6)), np.zeros((0, 6)))


class TestReport:
    def test_oracle_equivalence(self):
        """Every metric against a direct double-loop implementation on random matrices."""
        rng = np.random.default_rng(6)
        for _ in range(1000):
            n = int(rng.integers(1, 8))
            pred = rng.uniform(-1.0, 4.0, size=(n, 6))
            truth = rng.choice([0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0], size=(n, 6))
            report = compute_metrics(pred, truth)
            assert report.overall_acc4 == _oracle_accuracy(pred, truth)
            for j in range(6):
                column = _oracle_accuracy(pred[:, [j]], truth[:, [j]])
                assert report.acc4_per_emotion[j] == column
                assert report.mae_per_emotion[j] == pytest.approx(sum(abs(pred[k, j] - truth[k, j]) for k in range(n)) / n)
            assert report.overall_mae == pytest.approx(np.abs(pred - truth).sum() / pred.size)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(7)
        pred, truth = rng.uniform(0, 3, size=(20, 6)), rng.uniform(0, 3, size=(20, 6))
        order = rng.permutation(20)
        a = compute_metrics(pred, truth).as_dict()
        b = compute_metrics(pred[order], truth[order]).as_dict()
        assert a == pytest.approx(b)

    def test_bounds(self):
        rng = np.random.default_rng(8)
        report = compute_metrics(rng.normal(size=(10, 6)), rng.uniform(0, 3, size=(10, 6)))
        assert 0.0 <= report.overall_acc4 <= 1.0
        assert report.overall_mae >= 0.0

    def test_row_layout(self):
        x = np.ones((2, 6))
        row = compute_metrics(x, x).to_row("pretrained", 20, 1)
        assert list(row) == REPORT_COLUMNS
        assert len(REPORT_COLUMNS) == 17
        assert (row["model"], row["budget"], row["repeat"]) == ("pretrained", 20, 1)

    def test_csv_columns(self, tmp_path):
        x = np.ones((2, 6))
        path = write_metrics_csv([compute_metrics(x, x).to_row("baseline", 35, 0)], tmp_path / "m.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == REPORT_COLUMNS
        assert frame.loc[0, "acc4"] == 1.0
        assert set(METRIC_COLUMNS) <= set(frame.columns)


class TestDistribution:
    @pytest.fixture
    def dataset(self):
        seqs = tuple(FeatureSequence(f"s{i}", np.zeros((t, 2))) for i, t in enumerate((3, 8, 10)))
        labels = {
            "s0": EmotionLabel([0.0, 1.4, 2.5, 3.0, 0.0, 0.0]),
            "s1": EmotionLabel([0.6, 1.6, 2.4, 3.0, 0.0, 0.0]),
        }
        return Dataset(seqs, labels)

    def test_length_summary(self, dataset):
        summary = length_summary(dataset, mask_length=5)
        assert summary["samples"] == 3 and summary["labeled"] == 2
        assert (summary["t_min"], summary["t_max"], summary["short"]) == (3, 10, 1)
        assert summary["t_median"] == 8.0

    def test_class_counts(self, dataset):
        frame = label_class_distribution(dataset)
        assert frame.loc["happy"].tolist() == [1, 1, 0, 0]
        assert frame.loc["sad"].tolist() == [0, 1, 1, 0]
        assert frame.loc["anger"].tolist() == [0, 0, 1, 1]
        assert frame.loc["surprise"].tolist() == [0, 0, 0, 2]
        assert frame.to_numpy().sum() == 2 * 6
