import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve
from pysltc.constants import STREAM_ADJUSTMENT
from pysltc.errors import DimensionMismatch, InfeasibleAdjustment
from pysltc.classes.adjust import AdjustmentVector, TargetTours
from pysltc.classes.slb import MappingMatrix
from pysltc.functions.tools import round_half_away, substream


def _matrix(A):
    return A.matrix if isinstance(A, MappingMatrix) else A


def _dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)


def gap_vector(observed, simulated):
    """
    Screenline gaps y = y^o - A^T x^o.
    """
    observed = np.asarray(observed, dtype=float)
    simulated = np.asarray(simulated, dtype=float)
    if observed.shape != simulated.shape:
        raise DimensionMismatch("observed and simulated counts differ in length")
    return observed - simulated


def ridge_solve(A, y, lam, method="push_through"):
    """
    Minimizer of (A^T x - y)^T (A^T x - y) + lam x^T x.

    The "push_through" method solves the |K| x |K| system x = A (A^T A + lam I)^-1 y, the
    "direct" method the |L| x |L| system x = (A A^T + lam I)^-1 A y. Both use Cholesky
    factorization.

    :param A: MappingMatrix or |L| x |K| matrix.
    :param y: gap vector of length |K|.
    :param lam: penalty (> 0).
    :param method: (optional) "push_through" or "direct", by default "push_through".
    :return: numpy array of length |L|.
    """
    if not lam > 0:
        raise ValueError("penalty parameter should be > 0")
    A = _matrix(A)
    y = np.asarray(y, dtype=float)
    if y.shape != (A.shape[1],):
        raise DimensionMismatch("gap vector length %s, matrix columns %s" % (len(y), A.shape[1]))
    if A.shape[0] == 0:
        return np.zeros(0)
    if method == "push_through":
        gram = _dense(A.T @ A) + lam * np.eye(A.shape[1])
        z = cho_solve(cho_factor(gram), y)
        return np.asarray(A @ z, dtype=float).ravel()
    if method == "direct":
        gram = _dense(A @ A.T) + lam * np.eye(A.shape[0])
        return cho_solve(cho_factor(gram), np.asarray(A @ y, dtype=float).ravel())
    raise ValueError("unsupported method %s" % method)


def first_order_residual(A, y, lam, x):
    """
    Infinity norm of (A A^T + lam I) x - A y.
    """
    A = _matrix(A)
    x = np.asarray(x, dtype=float)
    r = A @ (A.T @ x) + lam * x - A @ np.asarray(y, dtype=float)
    return float(np.max(np.abs(r))) if r.size else 0.0


def objective(A, y, lam, x):
    """
    J = (A^T x - y)^T (A^T x - y) + lam x^T x.
    """
    A = _matrix(A)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (A.shape[0],) or y.shape != (A.shape[1],):
        raise DimensionMismatch("objective dimensions do not agree with matrix %s" % (A.shape,))
    r = np.asarray(A.T @ x, dtype=float).ravel() - y
    return float(r @ r + lam * (x @ x))


def round_and_repair(A, y, lam, x_star, counts):
    """
    Round the continuous solution half away from zero and repair infeasible removals.

    Classes whose rounded removal exceeds their simulated count are pinned at minus that
    count; the pinned contribution moves into the gap and the remaining classes are
    re-solved. Repeats until feasible, the pinned set only grows.

    :param A: MappingMatrix or |L| x |K| matrix.
    :param y: gap vector.
    :param lam: penalty.
    :param x_star: continuous solution from ridge_solve.
    :param counts: simulated class counts x^o.
    :return: AdjustmentVector.
    """
    A = sp.csr_matrix(_matrix(A))
    y = np.asarray(y, dtype=float)
    counts = np.asarray(counts, dtype=float)
    x = np.array(x_star, dtype=float)
    if x.shape != counts.shape or x.shape != (A.shape[0],):
        raise DimensionMismatch("solution, counts and matrix rows differ in length")
    pinned = np.zeros(len(x), dtype=bool)
    while True:
        rounded = round_half_away(x)
        rounded[pinned] = -counts[pinned].astype(np.int64)
        violators = ~pinned & (rounded < -counts)
        if not violators.any():
            break
        pinned |= violators
        x[pinned] = -counts[pinned]
        fixed, free = np.flatnonzero(pinned), np.flatnonzero(~pinned)
        if len(free):
            residual_gap = y - np.asarray(A[fixed].T @ x[fixed], dtype=float).ravel()
            x[free] = ridge_solve(A[free], residual_gap, lam)
    return AdjustmentVector(x_star, x, rounded, pinned)


def apply_adjustment(tours, classes, adjustment, seed, routes=None, stream_key=()):
    """
    Clone or remove node tours class by class to obtain Target Tours.

    A positive value n clones n members sampled uniformly with replacement, a negative value
    -m removes m distinct members sampled uniformly without replacement. Every class uses
    its own random substream; new tour ids follow the largest existing id in class order.

    :param tours: list of NodeTour.
    :param classes: list of SlbClass in canonical order.
    :param adjustment: integer adjustment per class (AdjustmentVector or array).
    :param seed: seed of the adjustment.
    :param routes: (optional) dict tour id -> Route, carried over to clones.
    :return: TargetTours.
    """
    rounded = adjustment.rounded if isinstance(adjustment, AdjustmentVector) else \
        np.asarray(adjustment, dtype=np.int64)
    if len(rounded) != len(classes):
        raise DimensionMismatch("adjustment length %s, classes %s" % (len(rounded), len(classes)))
    by_id = {t.id: t for t in tours}
    routes = dict(routes or {})
    next_id = max(by_id) + 1 if by_id else 1
    clone_log, removed, clones = dict(), set(), []
    for l, (c, n) in enumerate(zip(classes, rounded)):
        n = int(n)
        if n == 0:
            continue
        if n < -c.count:
            raise InfeasibleAdjustment("class %s removes %s of %s tours" % (l, -n, c.count))
        rng = substream(seed, STREAM_ADJUSTMENT, *stream_key, l)
        if n > 0:
            for i in rng.integers(0, c.count, size=n):
                source = c.members[int(i)]
                clone = by_id[source].clone(next_id)
                clones.append(clone)
                clone_log.setdefault(source, []).append(next_id)
                if source in routes:
                    routes[next_id] = routes[source]
                next_id += 1
        else:
            for i in rng.choice(c.count, size=-n, replace=False):
                removed.add(c.members[int(i)])
    kept = [t for t in tours if t.id not in removed]
    for t in removed:
        routes.pop(t, None)
    return TargetTours(kept + clones, routes, clone_log, sorted(removed))
