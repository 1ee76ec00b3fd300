import numpy as np
from pysltc.functions.tools import write_table


class QuasiObservations():
    """
    Quasi-observed data derived from Target Tours.

    :param f_hat: dict contract id -> QO shipment frequency.
    :param x_hat: dict contract id -> QO contract size.
    :param production: dict establishment id -> quasi production.
    :param consumption: dict establishment id -> quasi consumption.
    :param origins: dict destination zone -> dict origin zone -> probability.
    :param empty_zones: destination zones without QO shipments.
    :param suppliers: dict contract id -> quasi-observed supplier id.
    :param choice_sets: list of ChoiceObservation.
    """
    def __init__(self, f_hat=None, x_hat=None, production=None, consumption=None, origins=None,
                 empty_zones=None, suppliers=None, choice_sets=None):
        self.f_hat = dict(f_hat or {})
        self.x_hat = dict(x_hat or {})
        self.production = dict(production or {})
        self.consumption = dict(consumption or {})
        self.origins = dict(origins or {})
        self.empty_zones = list(empty_zones or [])
        self.suppliers = dict(suppliers or {})
        self.choice_sets = list(choice_sets or [])


class ChoiceObservation():
    """
    Supplier choice of one contract: the quasi-observed supplier first, then sampled
    same-epg alternatives.
    """
    __slots__ = ("contract", "epg", "alternatives", "short")

    def __init__(self, contract, epg, alternatives, short=False):
        self.contract = contract
        self.epg = epg
        self.alternatives = list(alternatives)
        self.short = bool(short)

    @property
    def chosen(self):
        return self.alternatives[0]


class ChoiceData():
    """
    Padded arrays for simulated maximum likelihood.

    :param X: N x J x 4 attributes (ln time, ln prod, ln demand, 1).
    :param E: N x J x 3 error component indicators (or, lf, dws).
    :param mask: N x J availability.
    :param chosen: N chosen alternative positions.
    """
    def __init__(self, X, E, mask, chosen):
        self.X = np.asarray(X, dtype=float)
        self.E = np.asarray(E, dtype=float)
        self.mask = np.asarray(mask, dtype=bool)
        self.chosen = np.asarray(chosen, dtype=np.int64)
        self.X[~self.mask] = 0.0
        self.E[~self.mask] = 0.0
        first = self.E[np.arange(len(self.chosen)), self.chosen][:, None, :]
        same = np.all((self.E == first) | ~self.mask[:, :, None], axis=(1, 2))
        # error components cancel when every alternative shares them
        self.homogeneous = same

    def __len__(self):
        return len(self.chosen)

    def subset(self, index):
        return ChoiceData(self.X[index], self.E[index], self.mask[index], self.chosen[index])


class EstimationReport():
    """
    Fit diagnostics per parameter block and group.
    """
    COLUMNS = ("block", "group", "status", "n_obs", "r2", "log_likelihood", "draws", "grad_norm")

    def __init__(self):
        self.rows = []

    def add(self, block, group, status, n_obs, r2=None, log_likelihood=None, draws=None,
            grad_norm=None):
        self.rows.append({"block": block, "group": group, "status": status, "n_obs": int(n_obs),
                          "r2": r2, "log_likelihood": log_likelihood, "draws": draws,
                          "grad_norm": grad_norm})

    def status(self, block, group):
        for r in self.rows:
            if r["block"] == block and r["group"] == group:
                return r["status"]
        return None

    def flagged(self):
        return [r for r in self.rows if r["status"] != "ok"]

    def to_csv(self, path):
        return write_table(path, self.rows, self.COLUMNS)
