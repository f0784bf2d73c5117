import numpy as np
import pytest

from citetree import domain
from citetree.ingest import (
    Dataset,
    STANDARD_SCHEMA,
    SynthConfig,
    generate_synthetic,
    parse_region,
)

# one representative citation range per level
_LEVEL_CITES = {0: (0, 0), 1: (1, 1), 2: (2, 5), 3: (6, 10), 4: (11, 30), 5: (31, 90)}


def population_with_levels(sizes: dict, seed: int = 0) -> Dataset:
    """Synthetic predictors with exactly ``sizes[level]`` rows per level."""
    n = sum(sizes.values())
    base = generate_synthetic(SynthConfig(rows=n, seed=seed))
    rng = np.random.default_rng(seed)
    cites = np.concatenate([
        rng.integers(_LEVEL_CITES[l][0], _LEVEL_CITES[l][1] + 1, size=k) for l, k in sorted(sizes.items())
    ])
    rng.shuffle(cites)
    y = [domain.class_of_citations(int(c)) for c in cites]
    return Dataset(STANDARD_SCHEMA, base.X, y, cites)


def plant_config(rows=200, seed=1, noise=0.0):
    return SynthConfig(rows=rows, seed=seed, regions=(parse_region("ref > 20 -> 0,0,1"),),
                       default=(1.0, 0.0, 0.0), noise=noise)


def boundary_duplicated(d: Dataset, name="ref", cut=20) -> bool:
    """Both values adjacent to the planted cut occur at least twice.

    Only then does every single deletion leave the learned midpoint on the
    correct side of the deleted row.
    """
    v = d.column(name)
    lo, hi = v[v <= cut].max(), v[v > cut].min()
    return (v == lo).sum() >= 2 and (v == hi).sum() >= 2


@pytest.fixture(scope="session")
def plant():
    return generate_synthetic(plant_config())


@pytest.fixture(scope="session")
def noisy_corpus():
    cfg = SynthConfig(
        rows=305, seed=3,
        regions=(parse_region("ref > 20 -> 0.2,0.3,0.5"),
                 parse_region("ref <= 20 & mcq > 0.3 -> 0.3,0.5,0.2")),
        default=(0.6, 0.3, 0.1), noise=0.1,
    )
    return generate_synthetic(cfg)
