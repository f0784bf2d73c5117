"""Deviance-based classification tree.

Growth is greedy and exhaustive: at every node each predictor's candidate
splits are scanned and the one with the largest impurity decrease wins.

* numeric predictors: thresholds at midpoints between consecutive distinct
  values, rows with ``x < w`` go left;
* categorical predictors: every binary partition of the categories observed
  at the node.  The left subset is the side containing the smallest observed
  code; categories unseen at the node are routed right;
* binary predictors: ``x == 0`` goes left.

Ties in gain (within ``1e-9 * max(1, D_parent)``) are broken by schema order,
then by smaller threshold or lexicographically smaller subset.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .domain import ClassLabel, N_CLASSES, PREDICTOR_NAMES, PredictorVector
from .errors import (
    DataError,
    DegenerateTreeError,
    EmptyNodeError,
    SchemaError,
    TreeFormatError,
)
from .ingest import Dataset, Kind, Predictor, Schema, schema_names

FORMAT_TAG = "citetree-tree/1"
GAIN_TOL = 1e-9


# -- impurity --------------------------------------------------------------

class Impurity:
    """An impurity function on class-probability vectors.

    ``phi`` evaluates a single point of the simplex.  ``node_values`` gives the
    node-level quantity a split decreases, vectorised over the last axis of a
    count array.
    """

    name = "abstract"

    def phi(self, p: Sequence[float]) -> float:
        raise NotImplementedError

    def node_values(self, counts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


def _xlogx_ratio(counts: np.ndarray, n: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(counts > 0, counts * np.log(counts / n), 0.0)


class DevianceImpurity(Impurity):
    """``-2 n sum_j p_j ln p_j`` with ``n`` held fixed for ``phi``."""

    name = "deviance"

    def __init__(self, n: float = 1.0):
        self.n = n

    def phi(self, p):
        p = np.asarray(p, dtype=float)
        return float(-2.0 * self.n * _xlogx_ratio(p, np.ones_like(p)).sum())

    def node_values(self, counts):
        counts = np.asarray(counts, dtype=float)
        n = counts.sum(axis=-1, keepdims=True)
        return -2.0 * _xlogx_ratio(counts, n).sum(axis=-1)


class GiniImpurity(Impurity):
    """``1 - sum_j p_j^2``; node value is ``n_t`` times that."""

    name = "gini"

    def phi(self, p):
        p = np.asarray(p, dtype=float)
        return float(1.0 - np.sum(p * p))

    def node_values(self, counts):
        counts = np.asarray(counts, dtype=float)
        n = counts.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(n > 0, n - np.sum(counts * counts, axis=-1) / n, 0.0)


DEVIANCE = DevianceImpurity()
GINI = GiniImpurity()
IMPURITIES = {DEVIANCE.name: DEVIANCE, GINI.name: GINI}


@dataclass
class AxiomReport:
    max_at_uniform: bool
    min_at_vertices: bool
    symmetric: bool
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.max_at_uniform and self.min_at_vertices and self.symmetric


def check_impurity_axioms(
    f: Callable[[Sequence[float]], float] | Impurity,
    J: int,
    probe_points: Sequence[Sequence[float]],
    rng: np.random.Generator | None = None,
    n_permutations: int = 3,
    tol: float = 1e-12,
) -> AxiomReport:
    """Check the three impurity axioms on a set of probe points.

    (1) ``f(uniform) > f(p)`` for every non-uniform probe, (2) every vertex
    value is below ``f(p)`` for every non-vertex probe, (3) ``f`` is invariant
    under random permutations of each probe.
    """
    phi = f.phi if isinstance(f, Impurity) else f
    rng = rng if rng is not None else np.random.default_rng(0)
    uniform = np.full(J, 1.0 / J)
    vertices = np.eye(J)
    f_uniform = phi(uniform)
    f_vertices = [phi(v) for v in vertices]
    violations = []
    for p in probe_points:
        p = np.asarray(p, dtype=float)
        if p.shape != (J,) or np.any(p < -tol) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probe {p} is not on the {J}-simplex")
        fp = phi(p)
        if np.max(np.abs(p - uniform)) > tol and not f_uniform > fp:
            violations.append(f"(1) f(uniform)={f_uniform!r} not above f({p.tolist()})={fp!r}")
        if np.max(p) < 1.0 - tol:
            worst = max(f_vertices)
            if not worst < fp:
                violations.append(f"(2) vertex value {worst!r} not below f({p.tolist()})={fp!r}")
        for _ in range(n_permutations):
            q = p[rng.permutation(J)]
            fq = phi(q)
            if abs(fq - fp) > tol * max(1.0, abs(fp)):
                violations.append(f"(3) f({p.tolist()})={fp!r} != f({q.tolist()})={fq!r}")
    if max(f_vertices) - min(f_vertices) > tol * max(1.0, abs(f_vertices[0])):
        violations.append(f"(3) vertex values differ: {f_vertices}")
    return AxiomReport(
        max_at_uniform=not any(v.startswith("(1)") for v in violations),
        min_at_vertices=not any(v.startswith("(2)") for v in violations),
        symmetric=not any(v.startswith("(3)") for v in violations),
        violations=violations,
    )


def node_deviance(counts: Sequence[int]) -> float:
    """``-2 sum_j n_j ln(n_j / n)``; zero counts contribute nothing."""
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise DataError("class counts must be non-negative")
    n = sum(counts)
    if n == 0:
        raise EmptyNodeError("deviance of an empty node is undefined")
    d = -2.0 * math.fsum(c * math.log(c / n) for c in counts if c > 0)
    return d if d > 0.0 else 0.0


def residual_mean_deviance(leaf_deviances: Sequence[float], N: int) -> float:
    leaves = len(leaf_deviances)
    if N <= leaves:
        raise DegenerateTreeError(f"residual mean deviance needs N > leaves ({N} <= {leaves})")
    return math.fsum(leaf_deviances) / (N - leaves)


# -- tree structure --------------------------------------------------------

@dataclass(frozen=True)
class GrowthControl:
    mincut: int = 3
    minsize: int = 6
    min_relative_deviance: float = 0.01

    def __post_init__(self):
        if self.mincut < 1:
            raise ValueError("mincut must be >= 1")
        if self.minsize < 2:
            raise ValueError("minsize must be >= 2")
        if not 0.0 <= self.min_relative_deviance <= 1.0:
            raise ValueError("min_relative_deviance must lie in [0, 1]")


@dataclass(frozen=True)
class SplitRule:
    predictor: str
    kind: Kind
    threshold: float | None = None
    subset: frozenset[int] | None = None

    def goes_left(self, values: np.ndarray) -> np.ndarray:
        if self.kind is Kind.NUMERIC:
            return values < self.threshold
        if self.kind is Kind.CATEGORICAL:
            return np.isin(values, sorted(self.subset))
        return values == 0

    def describe(self) -> str:
        if self.kind is Kind.NUMERIC:
            return f"{self.predictor} < {self.threshold:g}"
        if self.kind is Kind.CATEGORICAL:
            return f"{self.predictor} in {{{','.join(map(str, sorted(self.subset)))}}}"
        return f"{self.predictor} == 0"


@dataclass
class TreeNode:
    node_id: int
    counts: tuple[int, ...]
    deviance: float
    assigned_class: ClassLabel
    rule: SplitRule | None = None
    left: TreeNode | None = None
    right: TreeNode | None = None

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def is_leaf(self) -> bool:
        return self.rule is None

    @property
    def is_pure(self) -> bool:
        return sum(1 for c in self.counts if c) <= 1

    @property
    def deviance_drop(self) -> float:
        if self.is_leaf:
            return 0.0
        return self.deviance - self.left.deviance - self.right.deviance

    def walk(self) -> Iterator[TreeNode]:
        """Pre-order traversal (node, left subtree, right subtree)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)


def majority_class(counts: Sequence[int]) -> ClassLabel:
    # argmax returns the first maximum, i.e. ties go to the lower class
    return ClassLabel(int(np.argmax(counts)))


@dataclass
class Tree:
    root: TreeNode
    schema: Schema
    control: GrowthControl = field(default_factory=GrowthControl)
    impurity: str = DEVIANCE.name

    @property
    def nodes(self) -> list[TreeNode]:
        return list(self.root.walk())

    @property
    def leaves(self) -> list[TreeNode]:
        return [n for n in self.root.walk() if n.is_leaf]

    @property
    def internal_nodes(self) -> list[TreeNode]:
        return [n for n in self.root.walk() if not n.is_leaf]

    @property
    def names(self) -> tuple[str, ...]:
        return schema_names(self.schema)

    def _check_width(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != len(self.schema):
            raise SchemaError(f"expected {len(self.schema)} predictors, got {X.shape[1]}")
        return X

    def _route(self, X, leaf_value: Callable[[TreeNode], int]) -> np.ndarray:
        X = self._check_width(X)
        out = np.empty(X.shape[0], dtype=np.int64)
        index = {name: j for j, name in enumerate(self.names)}
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if node.is_leaf:
                out[rows] = leaf_value(node)
                continue
            left = node.rule.goes_left(X[rows, index[node.rule.predictor]])
            stack.append((node.left, rows[left]))
            stack.append((node.right, rows[~left]))
        return out

    def apply(self, X) -> np.ndarray:
        """Node id of the leaf each row of ``X`` lands in."""
        return self._route(X, lambda leaf: leaf.node_id)

    def predict(self, X) -> np.ndarray:
        return self._route(X, lambda leaf: int(leaf.assigned_class))

    def error_count(self, d: Dataset) -> int:
        return int(np.count_nonzero(self.predict(d.X) != d.y))


def _as_row(t: Tree, x) -> np.ndarray:
    if isinstance(x, PredictorVector):
        if t.names != PREDICTOR_NAMES:
            raise SchemaError("predictor vector does not match the tree's schema")
        return np.array(x.as_tuple(), dtype=np.float64)
    if isinstance(x, Mapping):
        missing = [n for n in t.names if n not in x]
        if missing:
            raise SchemaError(f"missing predictor(s): {', '.join(missing)}")
        return np.array([float(x[n]) for n in t.names], dtype=np.float64)
    row = np.asarray(x, dtype=np.float64).reshape(-1)
    if row.shape[0] != len(t.schema):
        raise SchemaError(f"expected {len(t.schema)} predictors, got {row.shape[0]}")
    return row


def predict_class(t: Tree, x) -> ClassLabel:
    """Class of a single point (a PredictorVector, mapping or sequence)."""
    return ClassLabel(int(t.predict(_as_row(t, x))[0]))


# -- split search ----------------------------------------------------------

@lru_cache(maxsize=None)
def _partition_matrix(n_levels: int) -> np.ndarray:
    """Membership of the left side for every proper binary partition.

    Rows list subsets containing level 0, sorted lexicographically.
    """
    subsets = []
    rest = range(1, n_levels)
    for r in range(0, n_levels - 1):
        for combo in itertools.combinations(rest, r):
            subsets.append((0, *combo))
    subsets.sort()
    m = np.zeros((len(subsets), n_levels), dtype=np.float64)
    for i, s in enumerate(subsets):
        m[i, list(s)] = 1.0
    return m


def _one_hot(y: np.ndarray) -> np.ndarray:
    return np.eye(N_CLASSES, dtype=np.float64)[y]


@dataclass
class _Candidate:
    gain: float
    rule: SplitRule


def _numeric_candidates(x, y, parent, total, predictor, control, impurity):
    order = np.argsort(x, kind="stable")
    xs = x[order]
    left = np.cumsum(_one_hot(y[order]), axis=0)[:-1]
    n = xs.shape[0]
    n_left = np.arange(1, n)
    ok = (xs[1:] != xs[:-1]) & (n_left >= control.mincut) & (n - n_left >= control.mincut)
    if not ok.any():
        return None
    left = left[ok]
    gains = parent - impurity.node_values(left) - impurity.node_values(total - left)
    lo, hi = xs[:-1][ok], xs[1:][ok]
    thresholds = lo + (hi - lo) / 2.0
    thresholds = np.where(thresholds > lo, thresholds, hi)
    return gains, [SplitRule(predictor.name, Kind.NUMERIC, threshold=float(w)) for w in thresholds]


def _categorical_candidates(x, y, parent, total, predictor, control, impurity):
    codes, inverse = np.unique(x.astype(np.int64), return_inverse=True)
    if codes.shape[0] < 2:
        return None
    level_counts = np.zeros((codes.shape[0], N_CLASSES))
    np.add.at(level_counts, (inverse, y), 1.0)
    m = _partition_matrix(codes.shape[0])
    left = m @ level_counts
    n_left = left.sum(axis=1)
    n = x.shape[0]
    ok = (n_left >= control.mincut) & (n - n_left >= control.mincut)
    if not ok.any():
        return None
    left = left[ok]
    gains = parent - impurity.node_values(left) - impurity.node_values(total - left)
    rules = [
        SplitRule(predictor.name, Kind.CATEGORICAL, subset=frozenset(int(c) for c in codes[row > 0]))
        for row in m[ok]
    ]
    return gains, rules


def _binary_candidates(x, y, parent, total, predictor, control, impurity):
    is_left = x == 0
    n_left = int(is_left.sum())
    if min(n_left, x.shape[0] - n_left) < control.mincut:
        return None
    left = _one_hot(y[is_left]).sum(axis=0)
    gain = parent - impurity.node_values(left) - impurity.node_values(total - left)
    return np.array([float(gain)]), [SplitRule(predictor.name, Kind.BINARY)]


_SCANNERS = {
    Kind.NUMERIC: _numeric_candidates,
    Kind.CATEGORICAL: _categorical_candidates,
    Kind.BINARY: _binary_candidates,
}


def _search(X, y, schema, control, impurity) -> tuple[SplitRule, float] | None:
    total = _one_hot(y).sum(axis=0)
    parent = float(impurity.node_values(total))
    tol = GAIN_TOL * max(1.0, abs(parent))
    per_predictor = []
    for j, p in enumerate(schema):
        found = _SCANNERS[p.kind](X[:, j], y, parent, total, p, control, impurity)
        if found is not None:
            per_predictor.append(found)
    if not per_predictor:
        return None
    best = max(float(g.max()) for g, _ in per_predictor)
    if best <= tol:
        return None
    # candidates are generated in tie-break order within each predictor
    for gains, rules in per_predictor:
        eligible = np.flatnonzero(gains >= best - tol)
        if eligible.size:
            i = int(eligible[0])
            return rules[i], float(gains[i])
    raise AssertionError("unreachable")


def best_split(d: Dataset, control: GrowthControl = GrowthControl(),
               impurity: Impurity = DEVIANCE) -> tuple[SplitRule, float] | None:
    """Best admissible split of ``d`` and its impurity decrease, or None."""
    if len(d) < control.minsize:
        raise DataError(f"node has {len(d)} rows, below minsize {control.minsize}")
    if len(np.unique(d.y)) < 2:
        raise DataError("node is pure; nothing to split")
    return _search(d.X, d.y, d.schema, control, impurity)


# -- growth ----------------------------------------------------------------

def _counts(y: np.ndarray) -> tuple[int, ...]:
    return tuple(int(c) for c in np.bincount(y, minlength=N_CLASSES))


def grow_tree(d: Dataset, control: GrowthControl = GrowthControl(),
              impurity: Impurity = DEVIANCE) -> Tree:
    """Grow a tree greedily until every node meets a stopping condition.

    A node becomes a leaf when it is pure, has fewer than ``minsize`` rows,
    has deviance below ``min_relative_deviance`` times the root's, or admits
    no split with positive gain whose children both hold ``mincut`` rows.
    """
    if len(d) == 0:
        raise DataError("cannot grow a tree on an empty dataset")
    X, y = d.X, d.y
    root_counts = _counts(y)
    root_dev = node_deviance(root_counts)
    floor = control.min_relative_deviance * root_dev

    root = TreeNode(1, root_counts, root_dev, majority_class(root_counts))
    stack = [(root, np.arange(len(d)))]
    while stack:
        node, rows = stack.pop()
        if node.is_pure or node.n < control.minsize or node.deviance < floor:
            continue
        found = _search(X[rows], y[rows], d.schema, control, impurity)
        if found is None:
            continue
        rule, _ = found
        j = d.index_of(rule.predictor)
        mask = rule.goes_left(X[rows, j])
        children = []
        for offset, sub in ((0, rows[mask]), (1, rows[~mask])):
            c = _counts(y[sub])
            children.append(TreeNode(2 * node.node_id + offset, c, node_deviance(c), majority_class(c)))
            stack.append((children[-1], sub))
        node.rule = rule
        node.left, node.right = children
    return Tree(root, d.schema, control, impurity.name)


# -- summary ---------------------------------------------------------------

@dataclass(frozen=True)
class GrowthSummary:
    variables_used: tuple[str, ...]
    leaf_count: int
    leaf_deviance_sum: float
    residual_mean_deviance: float | None
    misclassified: int
    N: int

    @property
    def misclassification_error_rate(self) -> float:
        return self.misclassified / self.N if self.N else 0.0

    def to_text(self) -> str:
        used = " ".join(f'"{v}"' for v in self.variables_used) or "(none)"
        if self.residual_mean_deviance is None:
            rmd = "NaN"
        else:
            rmd = (f"{self.residual_mean_deviance:.4f} = {self.leaf_deviance_sum:.4g} / "
                   f"{self.N - self.leaf_count}")
        return (
            "Variables actually used in tree construction:\n"
            f"{used}\n"
            f"Number of terminal nodes:  {self.leaf_count}\n"
            f"Residual mean deviance:  {rmd}\n"
            f"Misclassification error rate: {self.misclassification_error_rate:.4f} = "
            f"{self.misclassified} / {self.N}\n"
        )


def summarize_tree(t: Tree, d: Dataset) -> GrowthSummary:
    """Fit statistics of ``t`` on ``d`` (normally its training set).

    Leaf deviances are recomputed from the class counts of ``d`` routed
    through the tree, so on the training set they equal the stored ones.
    """
    used: list[str] = []
    for node in t.root.walk():
        if not node.is_leaf and node.rule.predictor not in used:
            used.append(node.rule.predictor)
    leaves = t.leaves
    ids = t.apply(d.X) if len(d) else np.array([], dtype=np.int64)
    leaf_deviances = []
    for leaf in leaves:
        c = _counts(d.y[ids == leaf.node_id])
        leaf_deviances.append(node_deviance(c) if sum(c) else 0.0)
    N = len(d)
    rmd = residual_mean_deviance(leaf_deviances, N) if N > len(leaves) else None
    errors = t.error_count(d) if N else 0
    return GrowthSummary(tuple(used), len(leaves), math.fsum(leaf_deviances), rmd, errors, N)


# -- serialisation ---------------------------------------------------------

def _encode_node(node: TreeNode, schema_by_name) -> dict:
    out = {
        "id": node.node_id,
        "counts": list(node.counts),
        "deviance": node.deviance,
        "class": node.assigned_class.token,
    }
    if not node.is_leaf:
        rule = node.rule
        split = {"predictor": rule.predictor, "kind": rule.kind.value}
        if rule.kind is Kind.NUMERIC:
            split["threshold"] = rule.threshold
        elif rule.kind is Kind.CATEGORICAL:
            split["subset"] = sorted(rule.subset)
        out["split"] = split
        out["left"] = _encode_node(node.left, schema_by_name)
        out["right"] = _encode_node(node.right, schema_by_name)
    return out


def encode_tree(t: Tree) -> str:
    doc = {
        "format": FORMAT_TAG,
        "classes": [c.token for c in ClassLabel],
        "impurity": t.impurity,
        "control": {
            "mincut": t.control.mincut,
            "minsize": t.control.minsize,
            "min_relative_deviance": t.control.min_relative_deviance,
        },
        "schema": [
            {"name": p.name, "kind": p.kind.value, "integer": p.integer, "n_categories": p.n_categories}
            for p in t.schema
        ],
        "root": _encode_node(t.root, {p.name: p for p in t.schema}),
    }
    return json.dumps(doc, indent=1) + "\n"


def _require(obj: dict, key: str, kind, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise TreeFormatError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise TreeFormatError(f"{where}: field {key!r} has wrong type")
    return value


def _decode_node(obj, schema_by_name: dict[str, Predictor], node_id: int) -> TreeNode:
    where = f"node {node_id}"
    if _require(obj, "id", int, where) != node_id:
        raise TreeFormatError(f"{where}: unexpected id {obj['id']}")
    counts = _require(obj, "counts", list, where)
    if len(counts) != N_CLASSES or not all(isinstance(c, int) and c >= 0 for c in counts):
        raise TreeFormatError(f"{where}: counts must be {N_CLASSES} non-negative integers")
    deviance = _require(obj, "deviance", float, where)
    try:
        assigned = ClassLabel.from_token(_require(obj, "class", str, where))
    except DataError as exc:
        raise TreeFormatError(f"{where}: {exc}") from None
    node = TreeNode(node_id, tuple(counts), deviance, assigned)
    if "split" not in obj:
        if "left" in obj or "right" in obj:
            raise TreeFormatError(f"{where}: children without a split")
        return node
    split = _require(obj, "split", dict, where)
    name = _require(split, "predictor", str, where)
    if name not in schema_by_name:
        raise TreeFormatError(f"{where}: unknown predictor {name!r}")
    predictor = schema_by_name[name]
    kind_token = _require(split, "kind", str, where)
    if kind_token != predictor.kind.value:
        raise TreeFormatError(f"{where}: rule kind {kind_token!r} does not match {name!r} ({predictor.kind.value})")
    if predictor.kind is Kind.NUMERIC:
        w = _require(split, "threshold", float, where)
        if not math.isfinite(w):
            raise TreeFormatError(f"{where}: non-finite threshold")
        rule = SplitRule(name, Kind.NUMERIC, threshold=w)
    elif predictor.kind is Kind.CATEGORICAL:
        if "threshold" in split:
            raise TreeFormatError(f"{where}: threshold given for categorical predictor {name!r}")
        subset = _require(split, "subset", list, where)
        if not subset or not all(isinstance(c, int) and 0 <= c < predictor.n_categories for c in subset):
            raise TreeFormatError(f"{where}: invalid category subset {subset}")
        rule = SplitRule(name, Kind.CATEGORICAL, subset=frozenset(subset))
    else:
        if "threshold" in split:
            raise TreeFormatError(f"{where}: threshold given for binary predictor {name!r}")
        rule = SplitRule(name, Kind.BINARY)
    node.rule = rule
    node.left = _decode_node(_require(obj, "left", dict, where), schema_by_name, 2 * node_id)
    node.right = _decode_node(_require(obj, "right", dict, where), schema_by_name, 2 * node_id + 1)
    if tuple(a + b for a, b in zip(node.left.counts, node.right.counts)) != node.counts:
        raise TreeFormatError(f"{where}: children counts do not sum to the parent's")
    return node


def decode_tree(text: str) -> Tree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(
            f"malformed tree document at line {exc.lineno}, column {exc.colno} (char {exc.pos}): {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise TreeFormatError(f"not a tree document (expected format {FORMAT_TAG!r})")
    if doc.get("classes") != [c.token for c in ClassLabel]:
        raise TreeFormatError("unexpected class list")
    impurity = _require(doc, "impurity", str, "document")
    if impurity not in IMPURITIES:
        raise TreeFormatError(f"unknown impurity {impurity!r}")
    ctrl = _require(doc, "control", dict, "document")
    try:
        control = GrowthControl(
            _require(ctrl, "mincut", int, "control"),
            _require(ctrl, "minsize", int, "control"),
            _require(ctrl, "min_relative_deviance", float, "control"),
        )
    except ValueError as exc:
        raise TreeFormatError(f"control: {exc}") from None
    schema = []
    for i, entry in enumerate(_require(doc, "schema", list, "document")):
        where = f"schema entry {i}"
        try:
            kind = Kind(_require(entry, "kind", str, where))
            schema.append(Predictor(
                _require(entry, "name", str, where), kind,
                _require(entry, "integer", bool, where),
                _require(entry, "n_categories", int, where),
            ))
        except ValueError as exc:
            raise TreeFormatError(f"{where}: {exc}") from None
    schema_by_name = {p.name: p for p in schema}
    if len(schema_by_name) != len(schema):
        raise TreeFormatError("duplicate predictor names in schema")
    root = _decode_node(_require(doc, "root", dict, "document"), schema_by_name, 1)
    return Tree(root, tuple(schema), control, impurity)


def format_tree(t: Tree) -> str:
    """Indented listing in the style of R's ``print.tree``."""
    lines = ["node), split, n, deviance, yval, (yprob)", "      * denotes terminal node", ""]

    def visit(node: TreeNode, depth: int, label: str):
        probs = " ".join(f"{c / node.n:.4f}" for c in node.counts)
        star = " *" if node.is_leaf else ""
        lines.append(f"{'  ' * depth}{node.node_id}) {label} {node.n} {node.deviance:.3f} "
                     f"{node.assigned_class.token} ( {probs} ){star}")
        if not node.is_leaf:
            rule = node.rule.describe()
            visit(node.left, depth + 1, rule)
            visit(node.right, depth + 1, f"not({rule})")

    visit(t.root, 0, "root")
    return "\n".join(lines) + "\n"
