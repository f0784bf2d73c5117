"""Independent reference implementations used as test oracles.

Nothing here imports the package's numeric code: deviance is evaluated term
by term with ``math.log`` and the brute-force grower enumerates every split
explicitly over Python lists.
"""
import itertools
import math

import numpy as np

from citetree.domain import ClassLabel
from citetree.ingest import Dataset, Kind, Predictor


def direct_deviance(counts):
    n = sum(counts)
    return -2.0 * sum(c * math.log(c / n) for c in counts if c > 0)


def class_counts(labels):
    return tuple(sum(1 for y in labels if y == j) for j in range(3))


def _candidates(rows, schema, mincut):
    """Yield (predictor index, tie key, description, left rows, right rows)."""
    for j, p in enumerate(schema):
        values = sorted({x[j] for x, _ in rows})
        if p.kind is Kind.NUMERIC:
            for a, b in zip(values, values[1:]):
                w = (a + b) / 2.0
                left = [r for r in rows if r[0][j] < w]
                right = [r for r in rows if not r[0][j] < w]
                yield j, (w,), ("numeric", w), left, right
        elif p.kind is Kind.BINARY:
            if len(values) == 2:
                left = [r for r in rows if r[0][j] == 0]
                right = [r for r in rows if r[0][j] != 0]
                yield j, (), ("binary",), left, right
        else:
            first, rest = values[0], values[1:]
            for size in range(len(rest)):
                for combo in itertools.combinations(rest, size):
                    subset = (first, *combo)
                    left = [r for r in rows if r[0][j] in subset]
                    right = [r for r in rows if r[0][j] not in subset]
                    yield j, subset, ("categorical", frozenset(int(c) for c in subset)), left, right


def brute_force_best(rows, schema, mincut):
    parent = direct_deviance(class_counts([y for _, y in rows]))
    tol = 1e-9 * max(1.0, parent)
    scored = []
    for j, key, desc, left, right in _candidates(rows, schema, mincut):
        if len(left) < mincut or len(right) < mincut:
            continue
        gain = (parent - direct_deviance(class_counts([y for _, y in left]))
                - direct_deviance(class_counts([y for _, y in right])))
        scored.append((gain, j, key, desc, left, right))
    if not scored:
        return None
    best = max(s[0] for s in scored)
    if best <= tol:
        return None
    eligible = [s for s in scored if s[0] >= best - tol]
    return min(eligible, key=lambda s: (s[1], s[2]))


def brute_force_tree(d: Dataset, mincut, minsize, mindev):
    """Nested tuples ``(counts, class, rule, left, right)``.

    ``rule`` is None for a leaf, else ``(predictor name, description)``.
    """
    rows = [(tuple(float(v) for v in x), int(y)) for x, y in zip(d.X, d.y)]
    root_dev = direct_deviance(class_counts([y for _, y in rows]))

    def grow(node_rows):
        counts = class_counts([y for _, y in node_rows])
        label = max(range(3), key=lambda j: (counts[j], -j))
        dev = direct_deviance(counts)
        pure = sum(1 for c in counts if c) <= 1
        if pure or len(node_rows) < minsize or dev < mindev * root_dev:
            return (counts, label, None, None, None)
        found = brute_force_best(node_rows, d.schema, mincut)
        if found is None:
            return (counts, label, None, None, None)
        _, j, _, desc, left, right = found
        return (counts, label, (d.schema[j].name, desc), grow(left), grow(right))

    return grow(rows)


def tree_as_tuples(node):
    """Same shape as :func:`brute_force_tree`, from a package ``TreeNode``."""
    if node.is_leaf:
        return (node.counts, int(node.assigned_class), None, None, None)
    r = node.rule
    if r.kind is Kind.NUMERIC:
        desc = ("numeric", r.threshold)
    elif r.kind is Kind.BINARY:
        desc = ("binary",)
    else:
        desc = ("categorical", r.subset)
    return (node.counts, int(node.assigned_class), (r.predictor, desc),
            tree_as_tuples(node.left), tree_as_tuples(node.right))


def same_tree(a, b):
    if a[:2] != b[:2]:
        return False
    if (a[2] is None) != (b[2] is None):
        return False
    if a[2] is None:
        return True
    (na, da), (nb, db) = a[2], b[2]
    if na != nb or da[0] != db[0]:
        return False
    if da[0] == "numeric" and not math.isclose(da[1], db[1], rel_tol=1e-12, abs_tol=1e-12):
        return False
    if da[0] == "categorical" and da[1] != db[1]:
        return False
    return same_tree(a[3], b[3]) and same_tree(a[4], b[4])


def random_small_instance(rng: np.random.Generator):
    """<= 12 rows, <= 3 predictors, mixed kinds, heavy value ties."""
    n = int(rng.integers(2, 13))
    p = int(rng.integers(1, 4))
    schema, cols = [], []
    for j in range(p):
        kind = rng.choice(["numeric", "numeric", "categorical", "binary"])
        if kind == "numeric":
            schema.append(Predictor(f"x{j}", Kind.NUMERIC))
            cols.append(rng.integers(0, int(rng.integers(2, 8)), size=n).astype(float)
                        + (rng.random(n) * 0.5 if rng.random() < 0.3 else 0.0))
        elif kind == "categorical":
            k = int(rng.integers(2, 6))
            schema.append(Predictor(f"x{j}", Kind.CATEGORICAL, integer=True, n_categories=k))
            cols.append(rng.integers(0, k, size=n).astype(float))
        else:
            schema.append(Predictor(f"x{j}", Kind.BINARY, integer=True))
            cols.append(rng.integers(0, 2, size=n).astype(float))
    n_classes = int(rng.integers(1, 4))
    y = rng.integers(0, n_classes, size=n)
    control = dict(
        mincut=int(rng.integers(1, 4)),
        minsize=int(rng.integers(2, 7)),
        min_relative_deviance=float(rng.choice([0.0, 0.0, 0.01, 0.2])),
    )
    return Dataset(tuple(schema), np.column_stack(cols), y), control


def uniform_simplex(rng: np.random.Generator, J: int, n: int):
    return rng.dirichlet(np.ones(J), size=n)


LOW, MEDIAN, HIGH = ClassLabel.LOW, ClassLabel.MEDIAN, ClassLabel.HIGH
