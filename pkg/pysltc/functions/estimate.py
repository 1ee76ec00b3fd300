import math
import logging
import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax
from pysltc.constants import *
from pysltc.errors import (ZeroInitialFrequency, InsufficientObservations, EmptyOriginRow,
                           NonConvergence, DimensionMismatch, NoCandidateSupplier)
from pysltc.classes.demand import GenerationParams, SupplierChoiceParams, ShipmentSizeParams
from pysltc.classes.estimate import ChoiceObservation, ChoiceData
from pysltc.functions.tools import substream, compensated_sum, epg_label
from pysltc.functions.demand import (utility_terms, utilities_from_terms, supplier_time,
                                     error_component_design, shipment_regressors)

log = logging.getLogger("pysltc")

# observations x draws x alternatives x components kept in memory per likelihood chunk
LIKELIHOOD_CHUNK = 2000000


# Quasi-observed shipments and contracts

def quasi_shipments(target, shipments):
    """
    QO shipment frequencies: f_hat = f * (daily QO instances) / (daily initial instances).

    Contracts without daily initial instances keep their frequency.

    :param target: TargetTours.
    :param shipments: list of Shipment with daily counts.
    :return: dict contract id -> f_hat.
    """
    served = dict()
    for t in target.tours:
        for s in t.shipment_ids():
            served[s] = served.get(s, 0) + 1
    f_hat = dict()
    for s in shipments:
        if s.daily_count == 0:
            f_hat[s.id] = s.frequency
        else:
            f_hat[s.id] = s.frequency * served.get(s.id, 0) / s.daily_count
    return f_hat


def quasi_contract_sizes(f, f_hat, x_size):
    """
    QO contract size x_hat = (f_hat / f) * x_size.

    :param f: initial frequency (number or array, > 0).
    :param f_hat: QO frequency.
    :param x_size: initial contract size.
    :return: float or numpy array.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ZeroInitialFrequency("initial shipment frequency should be > 0")
    x_hat = np.asarray(f_hat, dtype=float) / f * np.asarray(x_size, dtype=float)
    if x_hat.ndim == 0:
        return float(x_hat)
    return x_hat


def contract_sizes_from_shipments(shipments, f_hat):
    """
    :return: dict contract id -> QO contract size.
    """
    return {s.id: quasi_contract_sizes(s.frequency, f_hat[s.id], s.contract.size)
            for s in shipments}


def quasi_flows(establishments, contracts, x_hat):
    """
    Quasi production (QO contract sizes by supplier) and consumption (by receiver).

    :return: tuple (dict id -> production, dict id -> consumption), every establishment present.
    """
    production = {e.id: 0.0 for e in establishments}
    consumption = {e.id: 0.0 for e in establishments}
    for c in contracts:
        value = x_hat.get(c.id, 0.0)
        production[c.supplier] = production.get(c.supplier, 0.0) + value
        consumption[c.receiver] = consumption.get(c.receiver, 0.0) + value
    return production, consumption


# Linear blocks

def ols(X, y):
    """
    Ordinary least squares.

    :param X: n x p design matrix.
    :param y: n targets.
    :return: tuple (coefficients, R²).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch("design matrix %s does not match %s targets" % (X.shape, len(y)))
    coef = np.linalg.lstsq(X, y, rcond=None)[0]
    ss_res = float(np.sum((y - X @ coef) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return coef, r2


def _fit_block(X, y, minimum):
    if len(y) < minimum:
        raise InsufficientObservations("%s observations, at least %s required" % (len(y), minimum))
    return ols(X, y)


def fit_generation(establishments, production, consumption, previous, report=None):
    """
    Fit the production and consumption regressions per group.

    Groups with too few establishments keep their previous parameters and are flagged
    data-starved in the report.

    :param establishments: list of Establishment.
    :param production: dict id -> quasi production.
    :param consumption: dict id -> quasi consumption.
    :param previous: GenerationParams.
    :param report: (optional) EstimationReport.
    :return: GenerationParams.
    """
    prod = {g: v.copy() for g, v in previous.prod.items()}
    cons = {g: v.copy() for g, v in previous.cons.items()}
    members = dict()
    for e in sorted(establishments, key=lambda e: e.id):
        members.setdefault(e.group, []).append(e)
    for group in previous.groups:
        items = members.get(group, [])
        base = np.array([(1.0, e.floor_area, e.employment, e.floor_area * e.employment)
                         for e in items]).reshape(len(items), len(GENERATION_PROD_TERMS))
        y_prod = np.array([production.get(e.id, 0.0) for e in items])
        y_cons = np.array([consumption.get(e.id, 0.0) for e in items])
        blocks = (("production", prod, base, y_prod),
                  ("consumption", cons, np.column_stack([base, y_prod]), y_cons))
        for name, target, X, y in blocks:
            if group not in target:
                continue
            try:
                target[group], r2 = _fit_block(X, y, X.shape[1] + 1)
            except InsufficientObservations as err:
                log.warning("%s group %s data-starved: %s", name, group, err)
                if report is not None:
                    report.add(name, group, "data_starved", len(y))
                continue
            if report is not None:
                report.add(name, group, "ok", len(y), r2=r2)
    return GenerationParams(prod, cons)


def reestimate_generation(establishments, contracts, x_hat, previous, report=None):
    """
    Re-estimate Freight Generation parameters from QO contract sizes.

    :param establishments: list of Establishment.
    :param contracts: list of Contract with suppliers.
    :param x_hat: dict contract id -> QO contract size.
    :param previous: GenerationParams retained for data-starved groups.
    :return: GenerationParams.
    """
    production, consumption = quasi_flows(establishments, contracts, x_hat)
    return fit_generation(establishments, production, consumption, previous, report)


def reestimate_shipment_size(shipments, x_hat, by_id, distance_skim, densities, previous,
                             min_obs=MIN_SHIPMENT_SIZE_OBSERVATIONS, report=None):
    """
    OLS of ln s on (1, ln x_hat, ln x_dist, ln x_dense) per receiver group.

    Shipments with zero QO contract size are excluded.

    :return: ShipmentSizeParams.
    """
    rows = dict()
    for s in sorted(shipments, key=lambda s: s.id):
        value = x_hat.get(s.id, 0.0)
        if not value > 0:
            continue
        ln_dist, ln_dense = shipment_regressors(s.contract, by_id, distance_skim, densities)
        group = by_id[s.contract.receiver].group
        rows.setdefault(group, []).append((1.0, math.log(value), ln_dist, ln_dense,
                                           math.log(s.size)))
    params = {g: v.copy() for g, v in previous.params.items()}
    for group in previous.groups:
        data = np.array(rows.get(group, [])).reshape(-1, len(SHIPMENT_SIZE_TERMS) + 1)
        try:
            params[group], r2 = _fit_block(data[:, :-1], data[:, -1], min_obs)
        except InsufficientObservations as err:
            log.warning("shipment size group %s data-starved: %s", group, err)
            if report is not None:
                report.add("shipment_size", group, "data_starved", len(data))
            continue
        if report is not None:
            report.add("shipment_size", group, "ok", len(data), r2=r2)
    return ShipmentSizeParams(params)


# Supplier reassignment

def origin_distribution(contracts, f_hat, by_id, zones):
    """
    Origin zone probabilities of QO shipments per destination zone.

    :param contracts: list of Contract with suppliers.
    :param f_hat: dict contract id -> QO frequency.
    :param by_id: dict establishment id -> Establishment.
    :param zones: destination zone ids.
    :return: tuple (dict zone r -> dict zone k -> P_kr, list of empty destination zones).
    """
    q = dict()
    for c in contracts:
        value = f_hat.get(c.id, 0.0)
        if value > 0:
            r, k = by_id[c.receiver].zone, by_id[c.supplier].zone
            row = q.setdefault(r, dict())
            row[k] = row.get(k, 0.0) + value
    distribution, empty = dict(), []
    for r in sorted(set(zones) | set(q)):
        row = q.get(r)
        if not row:
            empty.append(r)
            continue
        total = compensated_sum(row[k] for k in sorted(row))
        distribution[r] = {k: row[k] / total for k in sorted(row)}
    return distribution, empty


def _zone_suppliers(establishments, flows):
    result = dict()
    for e in sorted(establishments, key=lambda e: e.id):
        if flows.production.get(e.id, 0.0) > 0:
            result.setdefault((e.zone, e.commodity), []).append(e)
    return result


def reassign_suppliers(contracts, distribution, establishments, flows, time_skim, params, seed,
                       stream_key=()):
    """
    Quasi-observed supplier of every contract in two steps: an origin zone from the origin
    distribution of the receiver zone, then a supplier within that zone from the logit
    probabilities renormalized over the zone's candidates with a fresh error component draw.

    Contracts without an origin row or without a candidate in the sampled zone keep their
    current supplier.

    :return: tuple (dict contract id -> supplier id, list of contract ids that fell back).
    """
    by_id = {e.id: e for e in establishments}
    pools = _zone_suppliers(establishments, flows)
    result, fallbacks = dict(), []
    for c in contracts:
        receiver = by_id[c.receiver]
        rng = substream(seed, STREAM_REASSIGNMENT, *stream_key, c.receiver, c.index)
        try:
            row = distribution.get(receiver.zone)
            if not row:
                raise EmptyOriginRow("no QO shipments to zone %s" % receiver.zone)
            origins = sorted(row)
            zone = origins[int(rng.choice(len(origins), p=np.array([row[k] for k in origins])))]
            candidates = [s for s in pools.get((zone, receiver.commodity), []) if s.id != receiver.id]
            if not candidates:
                raise NoCandidateSupplier("no %s supplier in zone %s" % (receiver.commodity, zone))
        except (EmptyOriginRow, NoCandidateSupplier) as err:
            log.debug("contract %s keeps supplier %s: %s", c.id, c.supplier, err)
            result[c.id] = c.supplier
            fallbacks.append(c.id)
            continue
        terms = utility_terms(receiver, candidates, params, time_skim, flows)
        p = softmax(utilities_from_terms(terms, c.size, rng.standard_normal(3)))
        result[c.id] = candidates[int(rng.choice(len(candidates), p=p))].id
    if fallbacks:
        log.info("%s contracts kept their current supplier", len(fallbacks))
    return result, fallbacks


def sample_choice_sets(contracts, suppliers, establishments, flows, seed,
                       size=CHOICE_SET_SIZE, stream_key=()):
    """
    Choice sets for supplier model estimation: the quasi-observed supplier plus up to
    size - 1 distinct same-epg suppliers sampled uniformly without replacement.

    :param contracts: list of Contract.
    :param suppliers: dict contract id -> quasi-observed supplier id.
    :param establishments: list of Establishment.
    :param flows: EstablishmentFlows (only producing establishments are alternatives).
    :param seed: master seed.
    :param size: (optional) choice set size, by default 50.
    :return: list of ChoiceObservation.
    """
    by_id = {e.id: e for e in establishments}
    pools = dict()
    for e in sorted(establishments, key=lambda e: e.id):
        if flows.production.get(e.id, 0.0) > 0:
            pools.setdefault((e.commodity, e.function), []).append(e.id)
    observations = []
    for c in contracts:
        if c.id not in suppliers:
            continue
        receiver, chosen = by_id[c.receiver], by_id[suppliers[c.id]]
        pool = [i for i in pools.get((receiver.commodity, chosen.function), [])
                if i != chosen.id and i != receiver.id]
        if len(pool) > size - 1:
            rng = substream(seed, STREAM_CHOICE_SET, *stream_key, c.receiver, c.index)
            pool = [pool[i] for i in rng.choice(len(pool), size - 1, replace=False)]
        observations.append(ChoiceObservation(c.id, epg_label(receiver.commodity, receiver.function,
                                                              chosen.function),
                                              [chosen.id] + pool, len(pool) + 1 < size))
    short = sum(o.short for o in observations)
    if short:
        log.info("%s choice sets have fewer than %s alternatives", short, size)
    return observations


def build_choice_data(observations, contracts, by_id, flows, time_skim):
    """
    Pad choice observations into arrays.

    :param observations: list of ChoiceObservation.
    :param contracts: dict contract id -> Contract (demand = contract size).
    :return: ChoiceData.
    """
    n = len(observations)
    width = max([len(o.alternatives) for o in observations] or [1])
    X = np.zeros((n, width, 4))
    E = np.zeros((n, width, 3))
    mask = np.zeros((n, width), dtype=bool)
    for i, o in enumerate(observations):
        receiver = by_id[contracts[o.contract].receiver]
        ln_demand = math.log(contracts[o.contract].size)
        for j, a in enumerate(o.alternatives):
            s = by_id[a]
            X[i, j] = (math.log(supplier_time(time_skim, s, receiver)),
                       math.log(flows.production[a]), ln_demand, 1.0)
            E[i, j] = error_component_design(s.function)
            mask[i, j] = True
    return ChoiceData(X, E, mask, np.zeros(n, dtype=np.int64))


# Simulated maximum likelihood

def estimation_draws(data, draws, seed, stream_key=()):
    """
    Fixed standard normal draws (observations with differing error components x draws x 3).
    """
    rng = substream(seed, STREAM_ESTIMATION, *stream_key)
    return rng.standard_normal((int(np.count_nonzero(~data.homogeneous)), int(draws), 3))


def simulated_log_likelihood(theta, data, draws=None):
    """
    Simulated log-likelihood of the error component logit and its gradient.

    Observations whose alternatives share the same error components reduce to plain logit
    and are evaluated in closed form; the others average the logit probability over draws.

    :param theta: (time, prod, demand, const, sigma_or, sigma_lf, sigma_dws).
    :param data: ChoiceData.
    :param draws: standard normal draws, heterogeneous observations x R x 3.
    :return: tuple (log-likelihood, gradient).
    """
    theta = np.asarray(theta, dtype=float)
    beta, sigma = theta[:4], theta[SUPPLIER_SIGMA_OFFSET:]
    grad = np.zeros(len(theta))
    terms = []
    V = np.where(data.mask, data.X @ beta, -np.inf)

    hom = np.flatnonzero(data.homogeneous)
    if len(hom):
        rows, chosen = np.arange(len(hom)), data.chosen[hom]
        Vh = V[hom]
        lse = logsumexp(Vh, axis=1)
        P = np.exp(Vh - lse[:, None])
        X = data.X[hom]
        terms.extend(Vh[rows, chosen] - lse)
        grad[:4] += (X[rows, chosen] - np.einsum("nj,njk->nk", P, X)).sum(axis=0)

    het = np.flatnonzero(~data.homogeneous)
    if len(het):
        if draws is None or draws.shape[0] != len(het):
            raise DimensionMismatch("draws do not match %s observations" % len(het))
        R = draws.shape[1]
        step = max(1, LIKELIHOOD_CHUNK // (R * data.X.shape[1] * 3))
        for start in range(0, len(het), step):
            idx = het[start:start + step]
            rows, chosen = np.arange(len(idx)), data.chosen[idx]
            Z = np.einsum("hjk,hrk->hrjk", data.E[idx], draws[start:start + step])
            U = V[idx][:, None, :] + Z @ sigma
            lse = logsumexp(U, axis=2)
            log_p = U[rows, :, chosen] - lse
            log_sum = logsumexp(log_p, axis=1)
            terms.extend(log_sum - math.log(R))
            w = np.exp(log_p - log_sum[:, None])
            P = np.exp(U - lse[..., None])
            X = data.X[idx]
            dX = X[rows, chosen][:, None, :] - np.einsum("hrj,hjk->hrk", P, X)
            dZ = Z[rows, :, chosen] - np.einsum("hrj,hrjk->hrk", P, Z)
            grad[:4] += np.einsum("hr,hrk->k", w, dX)
            grad[SUPPLIER_SIGMA_OFFSET:] += np.einsum("hr,hrk->k", w, dZ)
    return compensated_sum(terms), grad


def reestimate_supplier_model(data, previous, draws=DEFAULT_DRAWS, seed=0, gtol=ESTIMATION_GTOL,
                              min_obs=MIN_SUPPLIER_OBSERVATIONS, stream_key=(),
                              max_iter=ESTIMATION_MAX_ITER):
    """
    Simulated maximum likelihood estimate of one epg's supplier choice parameters.

    BFGS minimizes the mean negative simulated log-likelihood from the previous parameters.
    Sigma values are reported as absolute values.

    :param data: ChoiceData.
    :param previous: starting parameter vector (7 terms).
    :param draws: (optional) draws per observation, by default 100.
    :param seed: master seed of the estimation draws.
    :return: tuple (parameter vector, dict with log_likelihood, se, grad_norm, n_obs, draws,
             iterations).
    """
    n = len(data)
    if n < min_obs:
        raise InsufficientObservations("%s choice observations, at least %s required" %
                                       (n, min_obs))
    eta = estimation_draws(data, draws, seed, stream_key)

    def objective(theta):
        ll, g = simulated_log_likelihood(theta, data, eta)
        return -ll / n, -g / n

    result = minimize(objective, np.asarray(previous, dtype=float), jac=True, method="BFGS",
                      options={"gtol": gtol, "maxiter": max_iter})
    grad_norm = float(np.max(np.abs(result.jac)))
    if not (result.success or grad_norm <= gtol):
        raise NonConvergence("simulated likelihood did not converge: %s (gradient %s)" %
                             (result.message, grad_norm))
    theta = np.array(result.x, dtype=float)
    theta[SUPPLIER_SIGMA_OFFSET:] = np.abs(theta[SUPPLIER_SIGMA_OFFSET:])
    se = np.sqrt(np.clip(np.diag(result.hess_inv), 0, None) / n)
    return theta, {"log_likelihood": -float(result.fun) * n, "se": se, "grad_norm": grad_norm,
                   "n_obs": n, "draws": int(draws) if len(eta) else 0,
                   "iterations": int(result.nit)}


def reestimate_supplier_params(observations, contracts, by_id, flows, time_skim, previous, seed,
                               draws=DEFAULT_DRAWS, gtol=ESTIMATION_GTOL,
                               min_obs=MIN_SUPPLIER_OBSERVATIONS, report=None):
    """
    Re-estimate every epg of the supplier model from its choice observations.

    Epgs with too few observations or a failed optimization keep their previous parameters.

    :param observations: list of ChoiceObservation.
    :param contracts: dict contract id -> Contract.
    :param previous: SupplierChoiceParams.
    :return: SupplierChoiceParams.
    """
    grouped = dict()
    for o in observations:
        grouped.setdefault(o.epg, []).append(o)
    params = {k: v.copy() for k, v in previous.params.items()}
    for index, epg in enumerate(previous.epgs):
        items = grouped.get(epg, [])
        try:
            if len(items) < min_obs:
                raise InsufficientObservations("%s choice observations, at least %s required" %
                                               (len(items), min_obs))
            data = build_choice_data(items, contracts, by_id, flows, time_skim)
            theta, info = reestimate_supplier_model(data, previous[epg], draws, seed, gtol, min_obs,
                                                    (index,))
        except InsufficientObservations as err:
            log.warning("supplier epg %s data-starved: %s", epg, err)
            if report is not None:
                report.add("supplier", epg, "data_starved", len(items))
            continue
        except NonConvergence as err:
            log.warning("supplier epg %s: %s", epg, err)
            if report is not None:
                report.add("supplier", epg, "non_converged", len(items))
            continue
        params[epg] = theta
        if report is not None:
            report.add("supplier", epg, "ok", info["n_obs"], log_likelihood=info["log_likelihood"],
                       draws=info["draws"], grad_norm=info["grad_norm"])
    unknown = sorted(set(grouped) - set(params))
    if unknown:
        log.warning("choice observations for epgs without parameters: %s", unknown)
    return SupplierChoiceParams(params, previous.draws)
