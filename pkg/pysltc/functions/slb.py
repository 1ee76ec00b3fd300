import logging
import numpy as np
import scipy.sparse as sp
from pysltc.errors import MissingRoute, DimensionMismatch
from pysltc.classes.slb import SlbClass, MappingMatrix
from pysltc.functions.network import crossings, screenline_owner

log = logging.getLogger("pysltc")


def tour_signature(route, screenlines):
    return tuple(crossings(route, screenlines))


def extract_classes(tours, routes, screenlines):
    """
    Aggregate routed node tours into unique SLB classes.

    Classes are keyed by the exact crossing sequence and sorted lexicographically by it.
    Tours crossing no screenline are unobservable and left out of the classes.

    :param tours: list of NodeTour.
    :param routes: dict tour id -> Route.
    :param screenlines: list of Screenline or dict link id -> screenline id.
    :return: tuple (list of SlbClass, sorted list of unobservable tour ids).
    """
    owner = screenline_owner(screenlines)
    members = dict()
    unobservable = []
    for tour in tours:
        try:
            route = routes[tour.id]
        except KeyError:
            raise MissingRoute("tour %s has no route" % tour.id)
        signature = tour_signature(route, owner)
        if signature:
            members.setdefault(signature, []).append(tour.id)
        else:
            unobservable.append(tour.id)
    classes = [SlbClass(s, members[s]) for s in sorted(members)]
    return classes, sorted(unobservable)


def assemble_matrix(classes, screenline_ids):
    """
    Binary mapping matrix: entry (l, k) is 1 when class l crosses screenline k at least once.

    :param classes: list of SlbClass in canonical order.
    :param screenline_ids: column order of screenlines.
    :return: MappingMatrix.
    """
    column = {s: k for k, s in enumerate(screenline_ids)}
    rows, cols = [], []
    for l, c in enumerate(classes):
        for s in sorted(c.crossed(), key=lambda s: column[s]):
            rows.append(l)
            cols.append(column[s])
    matrix = sp.csr_matrix((np.ones(len(rows)), (rows, cols)),
                           shape=(len(classes), len(screenline_ids)))
    return MappingMatrix(matrix, [c.signature for c in classes], screenline_ids)


def _matrix(A):
    return A.matrix if isinstance(A, MappingMatrix) else A


def simulated_counts(A, x):
    """
    Simulated screenline counts A^T x.

    :param A: MappingMatrix or sparse/dense |L| x |K| matrix.
    :param x: class counts, length |L|.
    :return: numpy array of length |K|.
    """
    A = _matrix(A)
    x = np.asarray(x, dtype=float)
    if x.shape != (A.shape[0],):
        raise DimensionMismatch("class vector length %s, matrix rows %s" % (x.shape[0] if x.ndim else 0,
                                                                           A.shape[0]))
    return np.asarray(A.T @ x, dtype=float).ravel()


def class_counts(classes):
    return np.array([c.count for c in classes], dtype=float)


def repeated_crossing_tours(classes):
    """
    Number of tours crossing some screenline more than once (binary matrix undercounts them).
    """
    return sum(c.count for c in classes if len(set(c.signature)) < len(c.signature))
