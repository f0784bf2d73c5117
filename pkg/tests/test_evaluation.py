import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from citetree.domain import ClassLabel
from citetree.errors import DataError
from citetree.evaluation import (
    ConfusionMatrix,
    confusion_matrix,
    confusion_to_text,
    confusion_to_tsv,
    describe_groups,
    five_number_summary,
    groups_to_tsv,
    leave_one_out,
    random_baseline_error,
    repeated_holdout,
    scatter_export,
)
from citetree.ingest import Dataset, STANDARD_SCHEMA, SynthConfig, generate_synthetic
from citetree.tree import GrowthControl, grow_tree, summarize_tree
from conftest import boundary_duplicated, plant_config

H, M, L = ClassLabel.HIGH, ClassLabel.MEDIAN, ClassLabel.LOW
# classification summary of the reported tree, rows predicted, columns real (high, median, low)
REFERENCE_CONFUSION = ((21, 2, 3), (4, 92, 10), (2, 20, 151))


def test_reference_confusion_rates():
    cm = ConfusionMatrix.from_table(REFERENCE_CONFUSION)
    assert cm.total == 305
    assert [round(cm.predict_error_rate(c), 2) for c in (H, M, L)] == [0.19, 0.13, 0.13]
    assert [round(cm.misclassification_rate(c), 2) for c in (H, M, L)] == [0.22, 0.19, 0.08]
    # the off-diagonal cells sum to 41, one more than the reported 40
    assert cm.errors == 41
    assert cm.overall_error_rate == pytest.approx(41 / 305, abs=1e-15)


def test_from_table_layout():
    cm = ConfusionMatrix.from_table(REFERENCE_CONFUSION)
    assert cm.counts[H][L] == 3 and cm.counts[L][H] == 2 and cm.counts[M][M] == 92


def test_perfect_classifier():
    cm = ConfusionMatrix.from_predictions([0, 1, 2, 2], [0, 1, 2, 2])
    assert cm.errors == 0 and cm.overall_error_rate == 0.0
    assert all(cm.predict_error_rate(c) == 0.0 for c in ClassLabel)


def test_rates_undefined_for_empty_rows_and_columns():
    cm = ConfusionMatrix.from_predictions([0, 0], [0, 1])
    assert cm.predict_error_rate(H) is None
    assert cm.misclassification_rate(H) is None
    assert "N/A" in confusion_to_tsv(cm)


def test_bad_matrix_rejected():
    with pytest.raises(DataError):
        ConfusionMatrix(((1, 2), (3, 4)))
    with pytest.raises(DataError):
        ConfusionMatrix(((1, 0, 0), (0, -1, 0), (0, 0, 1)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=200))
def test_rate_consistency(pairs):
    pred, real = zip(*pairs)
    cm = ConfusionMatrix.from_predictions(pred, real)
    n = cm.total
    by_rows = math.fsum(cm.predict_error_rate(c) * sum(cm.counts[c])
                        for c in ClassLabel if sum(cm.counts[c]))
    col = lambda c: sum(cm.counts[p][c] for p in ClassLabel)
    by_cols = math.fsum(cm.misclassification_rate(c) * col(c) for c in ClassLabel if col(c))
    assert abs(by_rows / n - cm.overall_error_rate) <= 1e-12
    assert abs(by_cols / n - cm.overall_error_rate) <= 1e-12


def test_confusion_agrees_with_summary(noisy_corpus):
    t = grow_tree(noisy_corpus)
    cm = confusion_matrix(t, noisy_corpus)
    s = summarize_tree(t, noisy_corpus)
    assert cm.errors == s.misclassified
    assert cm.overall_error_rate == s.misclassification_error_rate


def test_confusion_text_layout():
    text = confusion_to_text(ConfusionMatrix.from_table(REFERENCE_CONFUSION))
    lines = text.splitlines()
    assert lines[0].split()[1:4] == ["high", "median", "low"]
    assert lines[1].split() == ["high", "21", "2", "3", "0.19"]
    assert lines[-1] == "Overall error rate: 0.1344 = 41 / 305"


def test_baselines():
    assert random_baseline_error(3) == pytest.approx(2 / 3, abs=1e-12)
    assert random_baseline_error(1) == 0.0
    assert random_baseline_error(2) == 0.5
    with pytest.raises(ValueError):
        random_baseline_error(0)


def test_holdout_on_plant_is_error_free(plant):
    assert boundary_duplicated(plant)
    r = repeated_holdout(plant, 1, 100, seed=1)
    assert r.trials == 100 and len(r.errors) == 100
    assert r.mean_test_error == 0.0
    assert r.baseline_error == pytest.approx(2 / 3)


def test_holdout_deterministic(noisy_corpus):
    a = repeated_holdout(noisy_corpus, 30, 8, seed=4)
    b = repeated_holdout(noisy_corpus, 30, 8, seed=4, workers=3)
    assert a == b
    assert a.to_tsv() == b.to_tsv()
    assert a != repeated_holdout(noisy_corpus, 30, 8, seed=5)


def test_holdout_argument_checks(plant):
    with pytest.raises(DataError):
        repeated_holdout(plant, 0, 5)
    with pytest.raises(DataError):
        repeated_holdout(plant, len(plant), 5)
    with pytest.raises(ValueError):
        repeated_holdout(plant, 5, 0)


def test_loo_on_plant(plant):
    assert boundary_duplicated(plant)
    r = leave_one_out(plant)
    assert r.protocol == "loo" and r.trials == len(plant)
    assert r.mean_test_error == 0.0


def test_loo_with_unique_boundary_value():
    # ref = 20 occurs once here; deleting it moves the midpoint to 20 and the row goes right
    d = generate_synthetic(plant_config(seed=11))
    assert not boundary_duplicated(d)
    r = leave_one_out(d)
    wrong = [i for i, e in enumerate(r.errors) if e]
    assert len(wrong) == 1 and d.column("ref")[wrong[0]] == 20


def test_loo_two_opposite_rows():
    d = Dataset(STANDARD_SCHEMA[:1], np.array([[1.0], [2.0]]), [L, H])
    assert leave_one_out(d).mean_test_error == 1.0


def test_loo_needs_two_rows():
    d = Dataset(STANDARD_SCHEMA[:1], np.array([[1.0]]), [L])
    with pytest.raises(DataError):
        leave_one_out(d)


def _small(seed, rows=50):
    return generate_synthetic(SynthConfig(rows=rows, seed=seed))


def test_loo_matches_exhaustive_mean():
    d = _small(6, rows=30)
    control = GrowthControl()
    wrong = 0
    for i in range(len(d)):
        keep = [k for k in range(len(d)) if k != i]
        t = grow_tree(d.take(keep), control)
        wrong += int(t.predict(d.X[i:i + 1])[0] != d.y[i])
    assert leave_one_out(d, control).mean_test_error == pytest.approx(wrong / len(d), abs=1e-15)


def test_holdout_of_one_converges_to_loo():
    d = _small(9)
    loo = leave_one_out(d).mean_test_error
    r = repeated_holdout(d, 1, 10_000, seed=2)
    assert abs(r.mean_test_error - loo) <= 3 * r.std_error


def test_five_number_even():
    assert five_number_summary(range(8)) == (0, 1.5, 3.5, 5.5, 7)


def test_five_number_odd_excludes_median():
    assert five_number_summary([1, 2, 3, 4, 5, 6, 7]) == (1, 2, 4, 6, 7)


def test_five_number_degenerate():
    assert five_number_summary([4, 4, 4]) == (4,) * 5
    assert five_number_summary([9]) == (9,) * 5
    with pytest.raises(ValueError):
        five_number_summary([])


@given(st.lists(st.integers(0, 100), min_size=1, max_size=60))
def test_five_number_ordered(values):
    s = five_number_summary(values)
    assert list(s) == sorted(s)
    assert s[0] == min(values) and s[-1] == max(values)


def test_groups_partition():
    d = _small(1, rows=120)
    authors = describe_groups(d, "authors")
    assert [g.label for g in authors] == ["single", "multi"]
    assert sum(g.n for g in authors) == len(d)
    collab = describe_groups(d, "collaboration")
    assert sum(g.n for g in collab) == int((d.column("aut") >= 2).sum())


def test_empty_group_reported():
    d = _small(1, rows=40)
    groups = describe_groups(d, lambda ds: ["a"] * len(ds), labels=("a", "b"))
    assert groups[1].n == 0 and groups[1].median is None
    assert groups_to_tsv(groups).splitlines()[2] == "b\t0\tNA\tNA\tNA\tNA\tNA"


def test_unknown_grouping():
    with pytest.raises(ValueError):
        describe_groups(_small(1, rows=5), "country")


def test_scatter():
    d = _small(2, rows=2)
    d = d.with_column(d.index_of("mcq"), np.array([0.1, 0.3]))
    s = scatter_export(d)
    assert s.mean_mcq == pytest.approx(0.2, abs=1e-15)
    assert len(s.rows) == 2
    assert s.to_tsv().splitlines()[1] == "mcq\tcitations\trt"


def test_scatter_empty():
    s = scatter_export(_small(2, rows=3).take([]))
    assert s.rows == () and s.mean_mcq is None
    assert "NA" in s.to_tsv()


def test_plant_config_available():
    # the shared plant rule maps ref > 20 to high, else low
    d = generate_synthetic(plant_config(rows=30, seed=1))
    assert set(np.unique(d.y)) <= {int(L), int(H)}
