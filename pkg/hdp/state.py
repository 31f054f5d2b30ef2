"""
Chinese restaurant franchise sampler state.

Instances (customers) of group j sit at tables t_ji; each table serves one
dish k_jt shared across groups. The state keeps the counts n_jt., m_jk, m_.k
and one set of sufficient statistics per dish, and keeps them consistent
through a small set of seat/unseat/attach/detach moves.
"""

import logging
from collections import Counter

import numpy as np

from bayes import GaussianSuffStats, stats_add, stats_remove
from osr_project.exceptions import SamplerStateError

from .likelihood import ConjugateLikelihood

logger = logging.getLogger(__name__)

# Dish statistics are recomputed from scratch after this many point moves.
REFRESH_INTERVAL = 10_000


def statistics_drift(running, fresh):
    """Largest relative difference between two sets of statistics over n, sum and scatter."""

    def relative(a, b):
        return float(np.max(np.abs(a - b), initial=0.0)) / max(
            1.0, float(np.max(np.abs(b), initial=0.0))
        )

    return max(
        relative(np.asarray(running.n, dtype=float), np.asarray(fresh.n, dtype=float)),
        relative(running.sum, fresh.sum),
        relative(running.scatter, fresh.scatter),
    )


class CRFState:
    """
    Mutable sampler state over a grouped dataset.

    ``groups`` is any object exposing ``groups`` (a list of (n_j, d) arrays)
    and ``d``. Table and dish ids are never reused, so a run is a pure
    function of its seed.
    """

    def __init__(self, groups, prior, conc, likelihood=None):
        self.groups = groups
        self.prior = prior
        self.conc = conc
        self.likelihood = (
            likelihood if likelihood is not None else ConjugateLikelihood(prior)
        )

        J = len(groups.groups)
        self.t = [np.full(len(x), -1, dtype=np.int64) for x in groups.groups]
        self.table_dish = [{} for _ in range(J)]
        self.n_table = [{} for _ in range(J)]
        self.m_group_dish = [{} for _ in range(J)]
        self.m_dish = {}
        self.dish_stats = {}

        self._next_table = [0] * J
        self._next_dish = 0
        self._moves_since_refresh = 0

    # -- read-only views -------------------------------------------------

    @property
    def J(self):
        return len(self.t)

    @property
    def K(self):
        return len(self.m_dish)

    @property
    def total_tables(self):
        return sum(self.m_dish.values())

    @property
    def dishes(self):
        return sorted(self.m_dish)

    def tables(self, j):
        return sorted(self.n_table[j])

    def point(self, j, i):
        return self.groups.groups[j][i]

    def dish_of(self, j, i):
        return self.table_dish[j][self.t[j][i]]

    def z(self, j):
        """Dish assignment of every instance of group j."""
        lookup = self.table_dish[j]
        return np.fromiter(
            (lookup[tt] for tt in self.t[j]), dtype=np.int64, count=len(self.t[j])
        )

    def table_members(self, j, tt):
        return np.flatnonzero(self.t[j] == tt)

    def table_stats(self, j, tt):
        return GaussianSuffStats.from_points(
            self.groups.groups[j][self.t[j] == tt], d=self.groups.d
        )

    def dish_counts(self, j):
        """Number of instances of group j on each dish."""
        return Counter(self.z(j).tolist())

    # -- moves -----------------------------------------------------------

    def _create_dish(self):
        dish = self._next_dish
        self._next_dish += 1
        self.m_dish[dish] = 0
        self.dish_stats[dish] = GaussianSuffStats.empty(self.groups.d)
        return dish

    def _drop_dish_if_orphaned(self, dish):
        if self.m_dish[dish] > 0:
            return
        stats = self.dish_stats.pop(dish)
        del self.m_dish[dish]
        self.likelihood.invalidate(dish)
        if stats.n != 0:
            raise SamplerStateError(
                f"Dish {dish} lost its last table but still holds {stats.n} points."
            )

    def _link(self, j, tt, dish):
        self.table_dish[j][tt] = dish
        self.m_dish[dish] += 1
        self.m_group_dish[j][dish] = self.m_group_dish[j].get(dish, 0) + 1

    def _unlink(self, j, tt):
        dish = self.table_dish[j].pop(tt)
        self.m_dish[dish] -= 1
        self.m_group_dish[j][dish] -= 1
        if self.m_group_dish[j][dish] == 0:
            del self.m_group_dish[j][dish]
        return dish

    def open_table(self, j, dish=None):
        """Open an empty table in group j serving ``dish`` (a new dish if None)."""
        if dish is None:
            dish = self._create_dish()
        tt = self._next_table[j]
        self._next_table[j] += 1
        self.n_table[j][tt] = 0
        self._link(j, tt, dish)
        return tt

    def seat(self, j, i, tt):
        x = self.point(j, i)
        dish = self.table_dish[j][tt]
        self.t[j][i] = tt
        self.n_table[j][tt] += 1
        self.dish_stats[dish] = stats_add(self.dish_stats[dish], x)
        self.likelihood.invalidate(dish)
        self._count_moves()

    def unseat(self, j, i):
        """Remove instance (j, i) from its table, closing the table if it empties."""
        tt = int(self.t[j][i])
        if tt < 0:
            raise SamplerStateError(f"Instance {(j, i)} is not seated.")
        dish = self.table_dish[j][tt]
        self.t[j][i] = -1
        self.n_table[j][tt] -= 1
        self.dish_stats[dish] = stats_remove(self.dish_stats[dish], self.point(j, i))
        self.likelihood.invalidate(dish)

        if self.n_table[j][tt] == 0:
            del self.n_table[j][tt]
            self._unlink(j, tt)
            self._drop_dish_if_orphaned(dish)
        self._count_moves()
        return tt, dish

    def detach_table(self, j, tt):
        """
        Take table (j, tt) off its dish, deleting the dish if orphaned.

        Returns the table's statistics; the table must be re-attached before
        any other move.
        """
        stats = self.table_stats(j, tt)
        dish = self._unlink(j, tt)
        self.dish_stats[dish] = self.dish_stats[dish].subtract(stats)
        self.likelihood.invalidate(dish)
        self._drop_dish_if_orphaned(dish)
        return stats

    def attach_table(self, j, tt, stats, dish=None):
        if dish is None:
            dish = self._create_dish()
        self._link(j, tt, dish)
        self.dish_stats[dish] = self.dish_stats[dish].merge(stats)
        self.likelihood.invalidate(dish)
        self._count_moves(stats.n)
        return dish

    # -- statistics hygiene ------------------------------------------------

    def _count_moves(self, n=1):
        self._moves_since_refresh += n

    def maybe_refresh(self):
        """Recompute dish statistics once enough moves have accumulated."""
        if self._moves_since_refresh >= REFRESH_INTERVAL:
            self.refresh_statistics()

    def recompute_dish_stats(self):
        """Dish statistics recomputed from the instances currently assigned."""
        d = self.groups.d
        stats = {k: GaussianSuffStats.empty(d) for k in self.m_dish}
        for j, x in enumerate(self.groups.groups):
            if len(x) == 0:
                continue
            z = self.z(j)
            for k in np.unique(z):
                stats[int(k)] = stats[int(k)].merge(
                    GaussianSuffStats.from_points(x[z == k], d=d)
                )
        return stats

    def refresh_statistics(self):
        """Replace the running dish statistics by a from-scratch recomputation."""
        fresh = self.recompute_dish_stats()
        drift = max(
            (statistics_drift(self.dish_stats[k], fresh[k]) for k in fresh), default=0.0
        )
        if drift > 1e-9:
            logger.warning(f"Dish statistics drifted by {drift:.3g} (relative); recomputed.")
        self.dish_stats = fresh
        self.likelihood.reset()
        self._moves_since_refresh = 0

    def check_invariants(self, atol=1e-9):
        """Raise SamplerStateError on the first violated count or statistics invariant."""
        m_dish = Counter()
        for j in range(self.J):
            if np.any(self.t[j] < 0):
                raise SamplerStateError(f"Group {j} has unseated instances.")
            occupancy = Counter(self.t[j].tolist())
            if dict(occupancy) != self.n_table[j]:
                raise SamplerStateError(f"Table counts of group {j} are inconsistent.")
            if set(self.n_table[j]) != set(self.table_dish[j]):
                raise SamplerStateError(f"Group {j} has tables without dishes.")
            if sum(self.n_table[j].values()) != len(self.t[j]):
                raise SamplerStateError(f"Group {j} table sizes do not sum to n_j.")
            m_jk = Counter(self.table_dish[j].values())
            if dict(m_jk) != self.m_group_dish[j]:
                raise SamplerStateError(f"Dish table counts of group {j} are inconsistent.")
            m_dish.update(m_jk)

        if dict(m_dish) != self.m_dish:
            raise SamplerStateError("Sum over groups of m_jk differs from m_.k.")
        if any(count < 1 for count in self.m_dish.values()):
            raise SamplerStateError("A dish without tables survived.")
        if set(self.dish_stats) != set(self.m_dish):
            raise SamplerStateError("Dish statistics do not match the live dishes.")

        fresh = self.recompute_dish_stats()
        for k, stats in fresh.items():
            if not self.dish_stats[k].allclose(stats, atol=atol):
                raise SamplerStateError(f"Statistics of dish {k} drifted from the data.")
        return True
