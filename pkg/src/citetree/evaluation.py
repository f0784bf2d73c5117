"""Confusion matrices, holdout protocols and descriptive group summaries."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from .domain import ClassLabel, N_CLASSES
from .errors import DataError
from .ingest import Dataset
from .rng import make_rng, partial_shuffle
from .tree import GrowthControl, Tree, grow_tree

# display order of the classification summary: high, median, low
TABLE_ORDER = (ClassLabel.HIGH, ClassLabel.MEDIAN, ClassLabel.LOW)


def _rate(wrong: int, total: int) -> float | None:
    return wrong / total if total else None


@dataclass(frozen=True)
class ConfusionMatrix:
    """``counts[predicted][real]`` indexed by class value (low=0 .. high=2)."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        arr = np.asarray(self.counts)
        if arr.shape != (N_CLASSES, N_CLASSES) or (arr < 0).any():
            raise DataError("confusion matrix must be 3x3 with non-negative counts")

    @classmethod
    def from_predictions(cls, predicted, real) -> "ConfusionMatrix":
        m = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
        np.add.at(m, (np.asarray(predicted), np.asarray(real)), 1)
        return cls(tuple(tuple(int(v) for v in row) for row in m))

    @classmethod
    def from_table(cls, rows: Sequence[Sequence[int]]) -> "ConfusionMatrix":
        """Build from a matrix laid out high/median/low on both axes."""
        m = [[0] * N_CLASSES for _ in range(N_CLASSES)]
        for i, p in enumerate(TABLE_ORDER):
            for k, r in enumerate(TABLE_ORDER):
                m[p][r] = int(rows[i][k])
        return cls(tuple(tuple(r) for r in m))

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    @property
    def correct(self) -> int:
        return sum(self.counts[j][j] for j in range(N_CLASSES))

    @property
    def errors(self) -> int:
        return self.total - self.correct

    def predict_error_rate(self, predicted: ClassLabel) -> float | None:
        """Share of rows predicted as ``predicted`` whose real class differs."""
        row = self.counts[predicted]
        return _rate(sum(row) - row[predicted], sum(row))

    def misclassification_rate(self, real: ClassLabel) -> float | None:
        """Share of rows of real class ``real`` predicted as something else."""
        col = [self.counts[p][real] for p in range(N_CLASSES)]
        return _rate(sum(col) - col[real], sum(col))

    @property
    def overall_error_rate(self) -> float | None:
        return _rate(self.errors, self.total)


def confusion_matrix(t: Tree, d: Dataset) -> ConfusionMatrix:
    if len(d) == 0:
        raise DataError("confusion matrix needs a non-empty dataset")
    return ConfusionMatrix.from_predictions(t.predict(d.X), d.y)


def _fmt_rate(r: float | None, digits: int = 2) -> str:
    return "N/A" if r is None else f"{r:.{digits}f}"


def confusion_to_rows(cm: ConfusionMatrix) -> list[list[str]]:
    header = ["predicted\\real", *(c.token for c in TABLE_ORDER), "predict_error_rate"]
    rows = [header]
    for p in TABLE_ORDER:
        rows.append([p.token, *(str(cm.counts[p][r]) for r in TABLE_ORDER),
                     _fmt_rate(cm.predict_error_rate(p))])
    rows.append(["misclassification_rate", *(_fmt_rate(cm.misclassification_rate(r)) for r in TABLE_ORDER), "N/A"])
    return rows


def confusion_to_tsv(cm: ConfusionMatrix) -> str:
    lines = ["\t".join(r) for r in confusion_to_rows(cm)]
    lines.append(f"overall_error\t{cm.errors}/{cm.total}\t{_fmt_rate(cm.overall_error_rate, 4)}")
    return "\n".join(lines) + "\n"


def _aligned(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip()
            for r in rows]


def confusion_to_text(cm: ConfusionMatrix) -> str:
    lines = _aligned(confusion_to_rows(cm))
    lines.append(f"Overall error rate: {_fmt_rate(cm.overall_error_rate, 4)} = {cm.errors} / {cm.total}")
    return "\n".join(lines) + "\n"


# -- holdout protocols -----------------------------------------------------

@dataclass(frozen=True)
class HoldoutReport:
    trials: int
    holdout_size: int
    errors: tuple[float, ...]
    baseline_error: float
    protocol: str = "holdout"

    @property
    def mean_test_error(self) -> float:
        return math.fsum(self.errors) / len(self.errors)

    @property
    def std_error(self) -> float:
        if len(self.errors) < 2:
            return 0.0
        return float(np.std(self.errors, ddof=1) / math.sqrt(len(self.errors)))

    def to_tsv(self) -> str:
        return (
            "protocol\ttrials\tholdout_size\tmean_test_error\tstd_error\tbaseline_error\n"
            f"{self.protocol}\t{self.trials}\t{self.holdout_size}\t{self.mean_test_error:.4f}\t"
            f"{self.std_error:.4f}\t{self.baseline_error:.4f}\n"
        )

    def to_text(self) -> str:
        return (
            f"Protocol: {self.protocol} ({self.trials} trials, holdout size {self.holdout_size})\n"
            f"Average test error:  {self.mean_test_error:.4f} (s.e. {self.std_error:.4f})\n"
            f"Random guess error:  {self.baseline_error:.4f}\n"
        )


def random_baseline_error(J: int = N_CLASSES) -> float:
    """Expected error of a uniform random guess among ``J`` classes."""
    if J < 1:
        raise ValueError("J must be >= 1")
    return (J - 1) / J


def _holdout_error(d: Dataset, test: np.ndarray, control: GrowthControl) -> float:
    mask = np.ones(len(d), dtype=bool)
    mask[test] = False
    tree = grow_tree(d.take(np.flatnonzero(mask)), control)
    held = d.take(np.sort(test))
    return tree.error_count(held) / len(held)


def repeated_holdout(
    d: Dataset,
    holdout_size: int,
    trials: int,
    control: GrowthControl = GrowthControl(),
    seed: int = 0,
    workers: int = 1,
) -> HoldoutReport:
    """Average test error over random train/test divisions.

    Trial ``i`` draws its holdout from the stream ``(seed, i)``.  The training
    set keeps the original row order, so identical holdouts give identical
    trees and are evaluated once.
    """
    if holdout_size < 1 or holdout_size >= len(d):
        raise DataError(f"holdout size must lie in 1..{len(d) - 1}, got {holdout_size}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    draws = [tuple(sorted(partial_shuffle(len(d), holdout_size, make_rng(seed, i)).tolist()))
             for i in range(trials)]
    distinct = sorted(set(draws))

    def run(test):
        return _holdout_error(d, np.array(test, dtype=np.int64), control)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(run, distinct))
    else:
        values = [run(t) for t in distinct]
    by_draw = dict(zip(distinct, values))
    return HoldoutReport(trials, holdout_size, tuple(by_draw[t] for t in draws), random_baseline_error())


def leave_one_out(d: Dataset, control: GrowthControl = GrowthControl()) -> HoldoutReport:
    if len(d) < 2:
        raise DataError("leave-one-out needs at least two rows")
    errors = tuple(_holdout_error(d, np.array([i]), control) for i in range(len(d)))
    return HoldoutReport(len(d), 1, errors, random_baseline_error(), protocol="loo")


# -- descriptive summaries -------------------------------------------------

@dataclass(frozen=True)
class GroupSummary:
    label: str
    n: int
    min: float | None = None
    q1: float | None = None
    median: float | None = None
    q3: float | None = None
    max: float | None = None


def _median(v: Sequence[float]) -> float:
    m = len(v) // 2
    return float(v[m]) if len(v) % 2 else (v[m - 1] + v[m]) / 2.0


def five_number_summary(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    """Min, quartiles, max; quartiles are medians of the lower/upper halves.

    For odd ``n`` the overall median is excluded from both halves.
    """
    v = sorted(float(x) for x in values)
    if not v:
        raise ValueError("five-number summary of an empty sample")
    if len(v) == 1:
        return (v[0],) * 5
    half = len(v) // 2
    lower, upper = v[:half], v[len(v) - half:]
    return v[0], _median(lower), _median(v), _median(upper), v[-1]


def summarize_group(label: str, values: Sequence[float]) -> GroupSummary:
    if len(values) == 0:
        return GroupSummary(label, 0)
    return GroupSummary(label, len(values), *five_number_summary(values))


def _author_grouping(d: Dataset) -> list:
    return ["single" if a == 1 else "multi" for a in d.column("aut")]


def _collaboration_grouping(d: Dataset) -> list:
    return [None if a < 2 else ("local" if n == 1 else "international")
            for a, n in zip(d.column("aut"), d.column("nati"))]


GROUPINGS: dict[str, tuple[Callable[[Dataset], list], tuple[str, ...]]] = {
    "authors": (_author_grouping, ("single", "multi")),
    "collaboration": (_collaboration_grouping, ("local", "international")),
}


def describe_groups(
    d: Dataset,
    grouping: str | Callable[[Dataset], Sequence[Hashable | None]] = "authors",
    labels: Sequence[str] | None = None,
) -> list[GroupSummary]:
    """Five-number summaries of citation counts per group.

    ``grouping`` is ``"authors"`` (single vs multi-author), ``"collaboration"``
    (local vs international among papers with two or more authors) or a
    callable assigning each row a label, or None to leave it out.
    """
    if d.citations is None:
        raise DataError("dataset carries no citation counts")
    if isinstance(grouping, str):
        try:
            fn, default_labels = GROUPINGS[grouping]
        except KeyError:
            raise ValueError(f"unknown grouping {grouping!r}; use one of {sorted(GROUPINGS)}") from None
        labels = labels or default_labels
    else:
        fn = grouping
    assigned = list(fn(d))
    if len(assigned) != len(d):
        raise DataError("grouping must label every row")
    if labels is None:
        labels = sorted({str(g) for g in assigned if g is not None})
    out = []
    for label in labels:
        values = [int(c) for g, c in zip(assigned, d.citations) if g is not None and str(g) == label]
        out.append(summarize_group(label, values))
    return out


def _fmt_num(v: float | None) -> str:
    if v is None:
        return "NA"
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


def groups_to_tsv(groups: Sequence[GroupSummary]) -> str:
    lines = ["group\tn\tmin\tq1\tmedian\tq3\tmax"]
    for g in groups:
        lines.append("\t".join([g.label, str(g.n), *map(_fmt_num, (g.min, g.q1, g.median, g.q3, g.max))]))
    return "\n".join(lines) + "\n"


def groups_to_text(groups: Sequence[GroupSummary]) -> str:
    rows = [["group", "n", "min", "q1", "median", "q3", "max"]]
    rows += [[g.label, str(g.n), *map(_fmt_num, (g.min, g.q1, g.median, g.q3, g.max))] for g in groups]
    return "\n".join(_aligned(rows)) + "\n"


@dataclass(frozen=True)
class ScatterTable:
    rows: tuple[tuple[float, int, int], ...] = field(default_factory=tuple)
    mean_mcq: float | None = None

    def to_tsv(self) -> str:
        mean = "NA" if self.mean_mcq is None else repr(self.mean_mcq)
        lines = [f"# mean_mcq\t{mean}", "mcq\tcitations\trt"]
        lines += [f"{m!r}\t{c}\t{r}" for m, c, r in self.rows]
        return "\n".join(lines) + "\n"


def scatter_export(d: Dataset) -> ScatterTable:
    """(mcq, citations, rt) per row plus the sample mean of mcq."""
    if len(d) == 0:
        return ScatterTable()
    if d.citations is None:
        raise DataError("dataset carries no citation counts")
    mcq = d.column("mcq")
    rows = tuple((float(m), int(c), int(r)) for m, c, r in zip(mcq, d.citations, d.column("rt")))
    return ScatterTable(rows, math.fsum(mcq) / len(mcq))
