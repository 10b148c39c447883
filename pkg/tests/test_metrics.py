import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhomlp.metrics import (
    NA,
    ConfusionCounts,
    MetricsReport,
    accuracy,
    evaluate_outputs,
    mse,
    rmse,
    sensitivity,
    specificity,
)


@pytest.mark.parametrize("counts,expected", [
    (ConfusionCounts(50, 40, 5, 5), 0.90),
    (ConfusionCounts(3, 7, 0, 0), 1.0),
    (ConfusionCounts(0, 0, 1, 1), 0.0),
])
def test_accuracy(counts, expected):
    assert accuracy(counts) == pytest.approx(expected, abs=1e-15)


def test_accuracy_empty_matrix():
    with pytest.raises(ValueError):
        accuracy(ConfusionCounts(0, 0, 0, 0))


def test_sensitivity_cases():
    assert sensitivity(ConfusionCounts(tp=9, tn=0, fp=0, fn=1)) == pytest.approx(0.9)
    assert sensitivity(ConfusionCounts(tp=4, tn=2, fp=1, fn=0)) == 1.0
    assert sensitivity(ConfusionCounts(tp=0, tn=5, fp=2, fn=0)) is None


def test_specificity_cases():
    assert specificity(ConfusionCounts(tp=0, tn=95, fp=5, fn=0)) == pytest.approx(0.95)
    assert specificity(ConfusionCounts(tp=1, tn=8, fp=0, fn=1)) == 1.0
    assert specificity(ConfusionCounts(tp=3, tn=0, fp=0, fn=1)) is None


@pytest.mark.parametrize("value", [-1, 1.5])
def test_counts_validation(value):
    with pytest.raises(ValueError):
        ConfusionCounts(value, 0, 0, 0)


def test_mse_rmse_examples():
    assert mse([0, 1, 1], [0, 1, 1]) == 0.0
    assert rmse([0, 1, 1], [0, 1, 1]) == 0.0
    assert mse([0.5, 0.5], [0, 1]) == 0.25
    assert rmse([0.5, 0.5], [0, 1]) == 0.5
    assert mse([0.9, 0.2, 0.6], [1, 0, 1]) == pytest.approx(0.07, abs=1e-15)
    assert rmse([0.9, 0.2, 0.6], [1, 0, 1]) == pytest.approx(0.264575, abs=5e-7)


@pytest.mark.parametrize("p,y", [([], []), ([0.1, 0.2], [1])])
def test_mse_input_errors(p, y):
    with pytest.raises(ValueError):
        mse(p, y)


def naive_counts(y_true, y_pred):
    tp = tn = fp = fn = 0
    for t, p in zip(y_true, y_pred):
        if t == 1 and p == 1:
            tp += 1
        elif t == 0 and p == 0:
            tn += 1
        elif t == 0:
            fp += 1
        else:
            fn += 1
    return tp, tn, fp, fn


def test_oracle_on_random_matrices():
    rng = np.random.default_rng(77)
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        y = rng.integers(0, 2, n)
        # dyadic outputs keep every squared residual and their sum exact
        out = rng.integers(0, 65, n) / 64.0
        report = evaluate_outputs(out, y)
        tp, tn, fp, fn = naive_counts(y.tolist(), [int(o >= 0.5) for o in out])
        assert report.counts == ConfusionCounts(tp, tn, fp, fn)
        assert report.accuracy == float(Fraction(tp + tn, n))
        assert report.sensitivity == (None if tp + fn == 0 else float(Fraction(tp, tp + fn)))
        assert report.specificity == (None if tn + fp == 0 else float(Fraction(tn, tn + fp)))
        sq = sum((Fraction(float(o)) - int(t)) ** 2 for o, t in zip(out, y))
        assert report.mse == float(sq / n)
        assert report.rmse == math.sqrt(float(sq / n))


residual_pairs = st.lists(st.tuples(st.floats(0, 1), st.integers(0, 1)), min_size=1, max_size=40)


@settings(max_examples=100, deadline=None)
@given(pairs=residual_pairs, seed=st.integers(0, 2**32 - 1))
def test_permutation_invariance(pairs, seed):
    out = np.array([p for p, _ in pairs])
    y = np.array([t for _, t in pairs])
    perm = np.random.default_rng(seed).permutation(len(pairs))
    a, b = evaluate_outputs(out, y), evaluate_outputs(out[perm], y[perm])
    assert a.counts == b.counts
    assert (a.accuracy, a.sensitivity, a.specificity) == (b.accuracy, b.sensitivity, b.specificity)
    assert a.mse == pytest.approx(b.mse, rel=1e-12, abs=1e-300)
    assert abs(a.rmse - math.sqrt(a.mse)) <= 1e-12


def test_report_csv_columns_and_na():
    report = evaluate_outputs([0.1, 0.2], [0, 0])
    text = report.to_csv("r1")
    header, row = text.strip().split("\n")
    assert header == "run,accuracy,sensitivity,specificity,mse,rmse"
    fields = row.split(",")
    assert fields[0] == "r1"
    assert fields[2] == NA
    assert float(fields[1]) == 1.0
    assert float(fields[4]) == report.mse


def test_report_json_round_trip():
    report = evaluate_outputs([0.9, 0.3, 0.6, 0.1], [1, 1, 0, 0])
    d = json.loads(report.to_json())
    assert MetricsReport.from_dict(d) == report
    assert "sensitivity=" in report.summary()
