"""Shared fixtures."""

import numpy as np
import pytest

from core.ratings import Observation, RatingMatrix

# Sparse 4 x 8 example: 9 observed ratings
EXAMPLE_RATINGS = [
    (0, 2, 3.0), (0, 5, 2.0),
    (1, 0, 1.0), (1, 3, 3.0), (1, 5, 5.0),
    (2, 1, 1.0),
    (3, 3, 5.0), (3, 5, 3.0), (3, 6, 1.0),
]


@pytest.fixture
def example_matrix() -> RatingMatrix:
    return RatingMatrix.from_observations(4, 8, (Observation(*r) for r in EXAMPLE_RATINGS))


def random_sparse_matrix(rng: np.random.Generator, n_users: int, n_items: int, density: float) -> RatingMatrix:
    mask = rng.random((n_users, n_items)) < density
    ratings = rng.integers(1, 6, size=(n_users, n_items)).astype(float)
    users, items = np.nonzero(mask)
    return RatingMatrix.from_observations(
        n_users, n_items, (Observation(int(i), int(j), ratings[i, j]) for i, j in zip(users, items))
    )
