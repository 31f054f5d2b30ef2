"""
Turning a co-clustering into open-set decisions.

Each group's subclass table lists the dishes its instances sit on with their
proportions; subclasses below the pruning threshold are dropped from the
table (the instances keep their dishes). A test instance is labeled with the
known class whose pruned table holds its dish, or tagged unknown when no
known class holds it.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from osr_project.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

UNKNOWN_LABEL = -1


@dataclass(frozen=True)
class SubclassTable:
    """Subclass proportions of one group; ``label`` is None for the test batch."""

    group: int
    label: int | None
    size: int
    counts: dict
    kept: tuple

    @property
    def is_test(self):
        return self.label is None

    @property
    def proportions(self):
        if self.size == 0:
            return {}
        return {k: n / self.size for k, n in sorted(self.counts.items())}

    @property
    def pruned_proportions(self):
        proportions = self.proportions
        return {k: proportions[k] for k in self.kept}


def prune_subclasses(state, epsilon):
    """
    One subclass table per group, keeping subclasses whose proportion is at
    least ``epsilon``.
    """
    if not 0 <= epsilon < 1:
        raise InvalidInputError(f"epsilon must lie in [0, 1), got {epsilon}.")

    groups = state.groups
    tables = []
    for j in range(state.J):
        size = len(state.t[j])
        counts = dict(sorted(state.dish_counts(j).items())) if size else {}
        kept = tuple(k for k, n in counts.items() if n / size >= epsilon)
        label = groups.labels[j] if j < groups.n_known else None
        tables.append(
            SubclassTable(group=j, label=label, size=size, counts=counts, kept=kept)
        )
    return tables


@dataclass(frozen=True)
class Outcome:
    """Decision for one test instance; ``label`` is None for unknown."""

    label: int | None
    subclass: int
    ambiguous: bool = False

    @property
    def is_unknown(self):
        return self.label is None


@dataclass(frozen=True)
class OSRPrediction:
    outcomes: tuple
    tables: list
    delta: int

    def labels(self, unknown=UNKNOWN_LABEL):
        """Predicted class id per test instance, ``unknown`` for rejected ones."""
        return np.array(
            [unknown if o.is_unknown else o.label for o in self.outcomes],
            dtype=np.int64,
        )

    @property
    def known_tables(self):
        return [table for table in self.tables if not table.is_test]

    @property
    def test_table(self):
        return self.tables[-1]

    @property
    def unknown_subclasses(self):
        return sorted({o.subclass for o in self.outcomes if o.is_unknown})

    def test_summary(self):
        """
        Counts and instance shares of the test batch's surviving subclasses,
        split into subclasses seen in some known class and new ones.
        """
        test = self.test_table
        known_dishes = _known_dishes(self.known_tables)
        known = [k for k in test.kept if k in known_dishes]
        new = [k for k in test.kept if k not in known_dishes]
        total = sum(test.counts[k] for k in test.kept)

        def share(dishes):
            return sum(test.counts[k] for k in dishes) / total if total else 0.0

        return {
            "subclasses": len(test.kept),
            "known": len(known),
            "known_share": share(known),
            "new": len(new),
            "new_share": share(new),
        }


def _known_dishes(known_tables):
    return {k for table in known_tables for k in table.kept}


def _owners(known_tables):
    """Dish -> [(class id, training count)] over the pruned known tables."""
    owners = {}
    for table in known_tables:
        for k in table.kept:
            owners.setdefault(k, []).append((table.label, table.counts[k]))
    return owners


def predict(state, tables, groups=None):
    """
    Label every test instance from its dish.

    A dish held by several known classes goes to the class with the most
    training instances on it, ties to the lowest class id.
    """
    groups = groups if groups is not None else state.groups
    owners = _owners([t for t in tables if not t.is_test])

    resolved = {}
    for k, holders in owners.items():
        if len(holders) == 1:
            resolved[k] = (holders[0][0], False)
            continue
        label = min(holders, key=lambda holder: (-holder[1], holder[0]))[0]
        logger.info(
            f"Subclass {k} is shared by classes {[h[0] for h in holders]} "
            f"with training counts {[h[1] for h in holders]}; assigned to class {label}."
        )
        resolved[k] = (label, True)

    outcomes = []
    if len(groups.test_group):
        for k in state.z(groups.test_index).tolist():
            label, ambiguous = resolved.get(k, (None, False))
            outcomes.append(Outcome(label=label, subclass=k, ambiguous=ambiguous))

    return OSRPrediction(outcomes=tuple(outcomes), tables=tables, delta=0)


def round_unknown_estimate(n_unknown, n_known_subclasses, n_classes):
    """
    floor(n_unknown / (n_known_subclasses / n_classes) + 0.5), computed exactly.

    Returns 0 with a warning when no known subclass survived.
    """
    if n_classes < 1:
        raise InvalidInputError("Estimating unknown classes needs a known class.")
    if n_known_subclasses == 0:
        logger.warning("No known-class subclass survived pruning; estimating 0 unknown classes.")
        return 0
    return math.floor(Fraction(n_unknown * n_classes, n_known_subclasses) + Fraction(1, 2))


def estimate_unknown_count(tables):
    """
    Estimated number of unknown classes behind the discovered subclasses.

    Known subclasses are counted with multiplicity across classes; unknown
    ones are the test batch's surviving dishes held by no known class.
    """
    known_tables = [t for t in tables if not t.is_test]
    test_tables = [t for t in tables if t.is_test]
    known_dishes = _known_dishes(known_tables)

    n_unknown = sum(1 for t in test_tables for k in t.kept if k not in known_dishes)
    n_known_subclasses = sum(len(t.kept) for t in known_tables)
    return round_unknown_estimate(n_unknown, n_known_subclasses, len(known_tables))
