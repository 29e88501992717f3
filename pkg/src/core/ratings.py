"""Sparse observed ratings R with the observation set S and its index lists."""

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from core.errors import DataError, DuplicateObservation, IndexOutOfRange
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Observation:
    """A (user, item, rating) triplet from the observation stream."""
    user: int
    item: int
    rating: float

    def __post_init__(self):
        if not math.isfinite(self.rating):
            raise DataError(f"Non-finite rating {self.rating} for ({self.user}, {self.item})")


class RatingMatrix:
    """Observed ratings of n_users x n_items, with J(i) / I(j) kept in sync.

    Ratings live in a map keyed by (user, item); missing cells are simply absent.
    A dense value/mask copy is maintained alongside for vectorised solvers.
    Single-writer: callers serialize mutation, reads may run concurrently.
    """

    def __init__(self, n_users: int = 0, n_items: int = 0):
        if n_users < 0 or n_items < 0:
            raise DataError(f"Negative dimensions: {n_users} x {n_items}")
        self._entries: dict[tuple[int, int], float] = {}
        self._user_items: list[list[int]] = [[] for _ in range(n_users)]
        self._item_users: list[list[int]] = [[] for _ in range(n_items)]
        self._values = np.zeros((n_users, n_items), dtype=np.float64)
        self._mask = np.zeros((n_users, n_items), dtype=bool)

    @classmethod
    def from_observations(
        cls, n_users: int, n_items: int, observations: Iterable[Observation]
    ) -> "RatingMatrix":
        matrix = cls(n_users, n_items)
        for obs in observations:
            matrix.insert_observation(obs)
        return matrix

    @property
    def n_users(self) -> int:
        return len(self._user_items)

    @property
    def n_items(self) -> int:
        return len(self._item_users)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_users, self.n_items

    @property
    def n_observed(self) -> int:
        return len(self._entries)

    def __len__(self) -> int:
        return self.n_observed

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self._entries

    def _check_user(self, i: int):
        if not 0 <= i < self.n_users:
            raise IndexOutOfRange(f"User index {i} out of range [0, {self.n_users})")

    def _check_item(self, j: int):
        if not 0 <= j < self.n_items:
            raise IndexOutOfRange(f"Item index {j} out of range [0, {self.n_items})")

    def add_user(self) -> int:
        """Append an empty user row and return its index."""
        self._user_items.append([])
        self._values = np.vstack([self._values, np.zeros((1, self.n_items))])
        self._mask = np.vstack([self._mask, np.zeros((1, self.n_items), dtype=bool)])
        return self.n_users - 1

    def add_item(self) -> int:
        """Append an empty item column and return its index."""
        self._item_users.append([])
        self._values = np.hstack([self._values, np.zeros((self.n_users, 1))])
        self._mask = np.hstack([self._mask, np.zeros((self.n_users, 1), dtype=bool)])
        return self.n_items - 1

    def insert_observation(self, obs: Observation) -> "RatingMatrix":
        """Record an observation, updating S, J(user) and I(item).

        Raises:
            IndexOutOfRange: If the user or item index exceeds the dimensions.
            DuplicateObservation: If (user, item) was already observed.
        """
        i, j = obs.user, obs.item
        self._check_user(i)
        self._check_item(j)
        if (i, j) in self._entries:
            raise DuplicateObservation(
                f"Rating for user {i}, item {j} already observed ({self._entries[(i, j)]})"
            )

        rating = float(obs.rating)
        self._entries[(i, j)] = rating
        bisect.insort(self._user_items[i], j)
        bisect.insort(self._item_users[j], i)
        self._values[i, j] = rating
        self._mask[i, j] = True
        return self

    def get(self, i: int, j: int, default: Optional[float] = None) -> Optional[float]:
        return self._entries.get((i, j), default)

    def items_of(self, i: int) -> tuple[int, ...]:
        """J(i), ascending."""
        self._check_user(i)
        return tuple(self._user_items[i])

    def users_of(self, j: int) -> tuple[int, ...]:
        """I(j), ascending."""
        self._check_item(j)
        return tuple(self._item_users[j])

    def row_ratings(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (J(i), R_{i,J(i)}) in ascending item order."""
        self._check_user(i)
        idx = np.asarray(self._user_items[i], dtype=np.intp)
        return idx, self._values[i, idx].copy()

    def column_ratings(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (I(j), R_{I(j),j}) in ascending user order."""
        self._check_item(j)
        idx = np.asarray(self._item_users[j], dtype=np.intp)
        return idx, self._values[idx, j].copy()

    def user_counts(self) -> np.ndarray:
        """#J(i) for every user."""
        return np.fromiter((len(x) for x in self._user_items), dtype=np.intp, count=self.n_users)

    def item_counts(self) -> np.ndarray:
        """#I(j) for every item."""
        return np.fromiter((len(x) for x in self._item_users), dtype=np.intp, count=self.n_items)

    def observed_mask(self) -> np.ndarray:
        """Read-only boolean view of S."""
        view = self._mask.view()
        view.flags.writeable = False
        return view

    def dense_values(self) -> np.ndarray:
        """Read-only dense view of R with zeros outside S."""
        view = self._values.view()
        view.flags.writeable = False
        return view

    def column_means(self) -> np.ndarray:
        """Observed mean of each item column (0 for unrated items)."""
        counts = self._mask.sum(axis=0)
        sums = self._values.sum(axis=0)
        return np.divide(sums, counts, out=np.zeros(self.n_items), where=counts > 0)

    def observations(self) -> Iterator[Observation]:
        for (i, j) in sorted(self._entries):
            yield Observation(i, j, self._entries[(i, j)])

    def copy(self) -> "RatingMatrix":
        return RatingMatrix.from_observations(self.n_users, self.n_items, self.observations())

    def __repr__(self) -> str:
        return f"RatingMatrix({self.n_users}x{self.n_items}, observed={self.n_observed})"
