"""UCB1 over items with rewards pooled across users (UCB.on.all.users)."""

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from policies.selection import Selection, argmax_selection, candidate_items


@dataclass
class UcbArmStats:
    """Pull counts t_j, reward sums and the global pull total t."""
    counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    sums: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float64))
    total: int = 0

    @classmethod
    def empty(cls, n_items: int) -> "UcbArmStats":
        return cls(np.zeros(n_items, dtype=np.int64), np.zeros(n_items, dtype=np.float64), 0)

    @property
    def n_items(self) -> int:
        return self.counts.shape[0]

    @property
    def means(self) -> np.ndarray:
        """Empirical mean reward per item (0 for untried items)."""
        return np.divide(self.sums, self.counts, out=np.zeros(self.n_items), where=self.counts > 0)

    def _grow(self, n_items: int):
        if n_items > self.n_items:
            extra = n_items - self.n_items
            self.counts = np.concatenate([self.counts, np.zeros(extra, dtype=np.int64)])
            self.sums = np.concatenate([self.sums, np.zeros(extra)])


def update_ucb(stats: UcbArmStats, item: int, reward: float) -> UcbArmStats:
    """Record one pull of `item`; updates t_j, the running mean and t in place."""
    stats._grow(item + 1)
    stats.counts[item] += 1
    stats.sums[item] += reward
    stats.total += 1
    return stats


def _lookup(values: np.ndarray, items: np.ndarray) -> np.ndarray:
    # Items beyond the tracked range have never been pulled
    out = np.zeros(items.shape, dtype=values.dtype)
    known = items < values.shape[0]
    out[known] = values[items[known]]
    return out


def ucb1_select(stats: UcbArmStats, allowed: Iterable[int]) -> Selection:
    """argmax_j mean_j + sqrt(2 ln t / t_j); untried items first, lowest index first.

    Raises:
        EmptyAllowedSet: If `allowed` is empty.
    """
    items = candidate_items(allowed)
    counts = _lookup(stats.counts, items)

    untried = items[counts == 0]
    if untried.size:
        return Selection(item=int(untried[0]), score=np.inf, exploit_term=0.0, bonus_term=np.inf)

    exploit = _lookup(stats.means, items)
    bonus = np.sqrt(2.0 * np.log(stats.total) / counts)
    return argmax_selection(items, exploit, bonus)
