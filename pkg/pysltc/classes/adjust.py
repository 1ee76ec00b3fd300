import numpy as np


class AdjustmentVector():
    """
    Solution of the tour-based demand adjustment.

    :param x_star: continuous ridge solution per class.
    :param x_repaired: continuous solution after pinning infeasible removals.
    :param rounded: integer adjustment per class (clones if positive, removals if negative).
    :param pinned: boolean mask of classes pinned at minus their simulated count.
    """
    def __init__(self, x_star, x_repaired, rounded, pinned):
        self.x_star = np.asarray(x_star, dtype=float)
        self.x_repaired = np.asarray(x_repaired, dtype=float)
        self.rounded = np.asarray(rounded, dtype=np.int64)
        self.pinned = np.asarray(pinned, dtype=bool)

    def __len__(self):
        return len(self.rounded)

    def is_feasible(self, counts):
        return bool(np.all(self.rounded >= -np.asarray(counts)))


class TargetTours():
    """
    Adjusted tour set used as quasi-observed data.

    :param tours: list of NodeTour after cloning and removal.
    :param routes: dict tour id -> Route for every tour in the list.
    :param clone_log: dict source tour id -> list of new tour ids.
    :param removals: list of removed tour ids.
    """
    def __init__(self, tours, routes, clone_log, removals):
        self.tours = list(tours)
        self.routes = dict(routes)
        self.clone_log = dict(clone_log)
        self.removals = list(removals)

    @property
    def clone_count(self):
        return sum(len(v) for v in self.clone_log.values())

    def __len__(self):
        return len(self.tours)
