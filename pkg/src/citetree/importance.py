"""Predictor importance: deviance-drop accounting and shuffle importance."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DataError
from .ingest import Dataset
from .rng import make_rng
from .tree import Tree

DEFAULT_K = 1000

# (n, rng) -> permutation of range(n); tests substitute the identity
Permuter = Callable[[int, np.random.Generator], np.ndarray]


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(n)


def identity_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return np.arange(n)


@dataclass
class DevianceImportanceRow:
    predictor: str
    split_count: int
    total_drop: float
    rank_dev: int = 0

    @property
    def drop_per_split(self) -> float:
        return self.total_drop / self.split_count


@dataclass
class ShuffleImportanceRow:
    predictor: str
    gamma: float
    std_error: float
    K: int
    base_rate: float
    rank_mis: int = 0


@dataclass
class ImportanceTable:
    """Per-predictor importance, keyed by predictor name, in schema order."""

    schema_order: tuple[str, ...]
    deviance: dict[str, DevianceImportanceRow] = field(default_factory=dict)
    shuffle: dict[str, ShuffleImportanceRow] = field(default_factory=dict)

    @property
    def total_splits(self) -> int:
        return sum(r.split_count for r in self.deviance.values())

    @property
    def total_drop(self) -> float:
        return math.fsum(r.total_drop for r in self.deviance.values())

    @property
    def overall_drop_per_split(self) -> float | None:
        n = self.total_splits
        return self.total_drop / n if n else None

    def merged(self, other: "ImportanceTable") -> "ImportanceTable":
        return ImportanceTable(
            self.schema_order,
            {**self.deviance, **other.deviance},
            {**self.shuffle, **other.shuffle},
        )

    def predictors(self) -> list[str]:
        present = set(self.deviance) | set(self.shuffle)
        return [p for p in self.schema_order if p in present]


def deviance_importance(t: Tree) -> ImportanceTable:
    """Split counts and summed deviance drops per predictor.

    Predictors never used in a split are left out; a single-leaf tree gives
    an empty table.
    """
    table = ImportanceTable(t.names)
    for node in t.internal_nodes:
        name = node.rule.predictor
        row = table.deviance.setdefault(name, DevianceImportanceRow(name, 0, 0.0))
        row.split_count += 1
        row.total_drop += node.deviance_drop
    if table.deviance:
        _assign_ranks(table, "drop_per_split")
    return table


def average_increase(base_rate, trial_rates: Sequence) -> Fraction | float:
    """Mean of ``trial_rate - base_rate`` over the trials.

    Exact when the inputs are ``Fraction``s (or ints).
    """
    if not trial_rates:
        raise ValueError("need at least one trial")
    if isinstance(base_rate, (int, Fraction)) and all(isinstance(b, (int, Fraction)) for b in trial_rates):
        return sum((Fraction(b) - Fraction(base_rate) for b in trial_rates), Fraction(0)) / len(trial_rates)
    return math.fsum(b - base_rate for b in trial_rates) / len(trial_rates)


def _shuffle_trials(t: Tree, d: Dataset, j: int, K: int, seed: int, permuter: Permuter) -> np.ndarray:
    """Misclassified-row counts for K shuffles of column ``j``."""
    errors = np.empty(K, dtype=np.int64)
    X = d.X.copy()
    column = d.X[:, j]
    for k in range(K):
        perm = permuter(len(d), make_rng(seed, j, k))
        X[:, j] = column[perm]
        errors[k] = np.count_nonzero(t.predict(X) != d.y)
    return errors


def shuffle_importance(
    t: Tree,
    d: Dataset,
    K: int = DEFAULT_K,
    seed: int = 0,
    permuter: Permuter = random_permutation,
    workers: int = 1,
) -> ImportanceTable:
    """Average increase in misclassification rate when one column is shuffled.

    Trial ``k`` of predictor ``j`` draws from the stream ``(seed, j, k)``, so
    results do not depend on ``workers`` or on evaluation order.
    """
    if len(d) == 0:
        raise DataError("shuffle importance needs a non-empty evaluation set")
    if K < 1:
        raise ValueError("K must be >= 1")
    if d.names != t.names:
        raise DataError("evaluation set schema does not match the tree")
    N = len(d)
    base_errors = t.error_count(d)
    columns = list(range(len(d.schema)))

    def run(j):
        return _shuffle_trials(t, d, j, K, seed, permuter)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, columns))
    else:
        results = [run(j) for j in columns]

    table = ImportanceTable(t.names)
    for j, errors in zip(columns, results):
        diffs = (errors - base_errors) / N
        gamma = Fraction(int(errors.sum()) - K * base_errors, K * N)
        se = float(np.std(diffs, ddof=1) / math.sqrt(K)) if K > 1 else 0.0
        name = t.names[j]
        table.shuffle[name] = ShuffleImportanceRow(name, float(gamma), se, K, base_errors / N)
    _assign_ranks(table, "gamma")
    return table


_KEYS = {"drop_per_split": "deviance", "gamma": "shuffle"}


def _assign_ranks(table: ImportanceTable, key: str) -> None:
    for name, rank in rank_predictors(table, key):
        row = getattr(table, _KEYS[key])[name]
        if key == "gamma":
            row.rank_mis = rank
        else:
            row.rank_dev = rank


def rank_predictors(table: ImportanceTable, key: str) -> list[tuple[str, int]]:
    """``(predictor, rank)`` pairs, best first.

    Tied predictors share the smaller rank and keep schema order.
    """
    if key not in _KEYS:
        raise ValueError(f"unknown ranking key {key!r}; use one of {sorted(_KEYS)}")
    rows = getattr(table, _KEYS[key])
    if not rows:
        raise DataError(f"importance table has no {_KEYS[key]} rows to rank")
    order = {name: i for i, name in enumerate(table.schema_order)}
    names = sorted(rows, key=lambda n: (-getattr(rows[n], key), order[n]))
    ranked, prev, rank = [], None, 0
    for pos, name in enumerate(names, start=1):
        value = getattr(rows[name], key)
        if value != prev:
            rank = pos
            prev = value
        ranked.append((name, rank))
    return ranked


# -- emission --------------------------------------------------------------

_COLUMNS = ("predictor", "splits", "deviance_drop", "drop_per_split", "rank_dev",
            "increase_misc_rate", "rank_mis")


def _cells(table: ImportanceTable) -> list[list[str]]:
    dev_rank = dict(rank_predictors(table, "drop_per_split")) if table.deviance else {}
    mis_rank = dict(rank_predictors(table, "gamma")) if table.shuffle else {}
    dev_order = list(dev_rank)
    rest = [n for n in table.predictors() if n not in dev_rank]
    if mis_rank:
        rest.sort(key=lambda n: mis_rank[n])
    out = []
    for name in dev_order + rest:
        dev = table.deviance.get(name)
        shf = table.shuffle.get(name)
        out.append([
            name,
            str(dev.split_count) if dev else "0",
            f"{dev.total_drop:.1f}" if dev else "0.0",
            f"{dev.drop_per_split:.1f}" if dev else "",
            str(dev_rank[name]) if dev else "",
            f"{shf.gamma:.3f}" if shf else "",
            str(mis_rank[name]) if shf else "",
        ])
    per = table.overall_drop_per_split
    out.append(["Total", str(table.total_splits), f"{table.total_drop:.1f}",
                f"{per:.1f}" if per is not None else "", "", "", ""])
    return out


def importance_to_tsv(table: ImportanceTable) -> str:
    lines = ["\t".join(_COLUMNS)]
    lines += ["\t".join(row) for row in _cells(table)]
    return "\n".join(lines) + "\n"


def importance_to_text(table: ImportanceTable) -> str:
    rows = [list(_COLUMNS), *_cells(table)]
    widths = [max(len(r[i]) for r in rows) for i in range(len(_COLUMNS))]
    lines = []
    for i, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) if k == 0 else c.rjust(w)
                               for k, (c, w) in enumerate(zip(r, widths))).rstrip())
        if i == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines) + "\n"
