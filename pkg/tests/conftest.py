from __future__ import annotations

import numpy as np
import pytest

from caliblab import Dataset, make_task


@pytest.fixture(scope="session")
def default_task():
    """The default binary task: dim 20, noise scale 2."""
    return make_task()


def random_dataset(rng: np.random.Generator, n: int, num_classes: int) -> Dataset:
    """Random dataset with labels loosely correlated with the probabilities."""
    if num_classes == 2:
        conf = rng.random(n)
        labels = (rng.random(n) < conf).astype(int)
        return Dataset.from_binary(conf, labels)
    raw = rng.random((n, num_classes)) ** 2
    probs = raw / raw.sum(axis=1, keepdims=True)
    cum = np.cumsum(probs, axis=1)
    labels = np.minimum((rng.random(n)[:, None] >= cum).sum(axis=1), num_classes - 1)
    return Dataset(probs, labels)
