import math
import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve
from pysltc.errors import EmptyInput, DimensionMismatch
from pysltc.classes.slb import MappingMatrix
from pysltc.functions.tools import compensated_sum


def metrics(observed, simulated):
    """
    Fit of simulated screenline counts.

    :param observed: observed counts.
    :param simulated: simulated counts, same order.
    :return: tuple (RMSE, MAE, MAE ratio). The ratio is nan when the mean observed count is 0.
    """
    observed = np.asarray(observed, dtype=float)
    simulated = np.asarray(simulated, dtype=float)
    if observed.shape != simulated.shape:
        raise DimensionMismatch("observed and simulated counts differ in length")
    if observed.size == 0:
        raise EmptyInput("no screenline counts")
    gap = simulated - observed
    n = observed.size
    rmse = math.sqrt(compensated_sum(gap * gap) / n)
    mae = compensated_sum(np.abs(gap)) / n
    mean = compensated_sum(observed) / n
    return rmse, mae, (mae / mean if mean > 0 else float("nan"))


def loocv_lambda(A, y, grid):
    """
    Leave-one-out cross-validation of the ridge penalty over screenlines.

    For every penalty and held-out screenline k the adjustment is solved without k and
    the fold error is a_k^T x - y_k. Ties go to the largest penalty.

    :param A: MappingMatrix or |L| x |K| matrix.
    :param y: gap vector.
    :param grid: candidate penalties (> 0).
    :return: tuple (chosen penalty, list of (penalty, CV-RMSE)).
    """
    grid = [float(v) for v in grid]
    if not grid or any(not v > 0 for v in grid):
        raise ValueError("penalty grid should be non-empty and strictly positive")
    A = A.matrix if isinstance(A, MappingMatrix) else A
    y = np.asarray(y, dtype=float)
    K = len(y)
    if K < 2:
        raise DimensionMismatch("cross-validation needs at least 2 screenlines")
    if A.shape[1] != K:
        raise DimensionMismatch("gap vector length %s, matrix columns %s" % (K, A.shape[1]))
    # a_k^T A_-k z only needs the screenline Gram matrix
    gram = A.T @ A
    gram = gram.toarray() if sp.issparse(gram) else np.asarray(gram, dtype=float)
    curve = []
    for lam in grid:
        errors = []
        for k in range(K):
            keep = np.array([i for i in range(K) if i != k])
            z = cho_solve(cho_factor(gram[np.ix_(keep, keep)] + lam * np.eye(K - 1)), y[keep])
            errors.append((float(gram[k, keep] @ z) - y[k]) ** 2)
        curve.append((lam, math.sqrt(compensated_sum(errors) / K)))
    best = min(v for _, v in curve)
    chosen = max(lam for lam, v in curve if v == best)
    return chosen, curve


def adjustment_slack(A, y, x_star, rounded):
    """
    Objective bound after rounding: ||y - A^T x_r||² <= ||y||² + slack with
    slack = ||A^T (x_r - x*)||² + 2 ||y - A^T x*|| ||A^T (x_r - x*)||.

    :return: dict with after, bound, slack and holds.
    """
    A = A.matrix if isinstance(A, MappingMatrix) else A
    y = np.asarray(y, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    rounded = np.asarray(rounded, dtype=float)
    shift = np.asarray(A.T @ (rounded - x_star), dtype=float).ravel()
    residual = y - np.asarray(A.T @ x_star, dtype=float).ravel()
    after = y - np.asarray(A.T @ rounded, dtype=float).ravel()
    slack = float(shift @ shift) + 2.0 * float(np.linalg.norm(residual)) * float(np.linalg.norm(shift))
    after = float(after @ after)
    bound = float(y @ y) + slack
    return {"after": after, "bound": bound, "slack": slack,
            "holds": after <= bound * (1 + 1e-9) + 1e-9}
