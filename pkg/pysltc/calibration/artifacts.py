import os
from scipy.io import mmwrite
from pysltc.functions.tools import write_table

SCATTER_COLUMNS = ("screenline_id", "observed", "simulated")
CONVERGENCE_COLUMNS = ("k", "rmse", "mae", "mae_ratio", "lambda")
LOOCV_COLUMNS = ("lambda", "cv_rmse")
SLB_CLASS_COLUMNS = ("class_index", "signature", "count", "member_tour_ids")
ADJUSTMENT_COLUMNS = ("class_index", "x_star", "rounded", "pinned_flag", "count", "x_repaired")
CONTRACT_COLUMNS = ("contract_id", "receiver", "supplier", "commodity", "epg", "size")
SHIPMENT_COLUMNS = ("shipment_id", "contract_id", "size", "frequency", "daily_count")
TOUR_COLUMNS = ("tour_id", "seq", "node_id", "shipment_ids")
ITERATION_COLUMNS = ("k", "tours", "slb_classes", "unobservable_tours", "repeated_crossings",
                     "pinned_classes", "clones", "removals", "slack", "slack_holds",
                     "ridge_residual")


class ArtifactWriter():
    """
    CSV and Matrix Market outputs of a calibration run, one file per artifact and iteration.

    :param directory: output directory, created when missing.
    """
    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def path(self, name, k=None):
        base, ext = os.path.splitext(name)
        return os.path.join(self.directory, "%s_%s%s" % (base, k, ext) if k is not None else name)

    def counts(self, name, screenline_ids, observed, simulated, k=None):
        return write_table(self.path(name, k),
                           [(s, float(o), float(v)) for s, o, v in zip(screenline_ids, observed, simulated)],
                           SCATTER_COLUMNS)

    def scatter(self, k, screenline_ids, observed, simulated):
        return self.counts("scatter.csv", screenline_ids, observed, simulated, k)

    def convergence(self, records):
        return write_table(self.path("convergence.csv"),
                           [(r.k, r.rmse, r.mae, r.mae_ratio, r.lam) for r in records],
                           CONVERGENCE_COLUMNS)

    def iterations(self, records):
        return write_table(self.path("iterations.csv"),
                           [r.diagnostics() for r in records if r.k > 1], ITERATION_COLUMNS)

    def loocv_curve(self, curve, k=None):
        return write_table(self.path("loocv_curve.csv", k), curve, LOOCV_COLUMNS)

    def slb_classes(self, k, classes):
        return write_table(self.path("slb_classes.csv", k),
                           [(l, "-".join(str(s) for s in c.signature), c.count,
                             " ".join(str(t) for t in c.members)) for l, c in enumerate(classes)],
                           SLB_CLASS_COLUMNS)

    def mapping_matrix(self, k, matrix):
        path = self.path("mapping_matrix.mtx", k)
        mmwrite(path, matrix.matrix, comment="SLB classes x screenlines %s" %
                " ".join(str(s) for s in matrix.screenline_ids))
        return path

    def adjustment(self, k, classes, adjustment):
        return write_table(self.path("adjustment.csv", k),
                           [(l, float(adjustment.x_star[l]), int(adjustment.rounded[l]),
                             int(adjustment.pinned[l]), c.count, float(adjustment.x_repaired[l]))
                            for l, c in enumerate(classes)],
                           ADJUSTMENT_COLUMNS)

    def target_tours(self, k, target):
        rows = []
        for t in sorted(target.tours, key=lambda t: t.id):
            rows.append((t.id, t.carrier, " ".join(str(n) for n in t.node_sequence()),
                         " ".join(str(s) for s in t.shipment_ids())))
        write_table(self.path("target_tours.csv", k), rows, ("tour_id", "carrier", "nodes", "shipments"))
        write_table(self.path("clone_log.csv", k),
                    [(source, clone) for source in sorted(target.clone_log)
                     for clone in target.clone_log[source]], ("source_tour", "clone_tour"))
        write_table(self.path("removal_log.csv", k), [(t,) for t in target.removals], ("tour_id",))

    def qo_shipments(self, k, shipments, f_hat, x_hat):
        return write_table(self.path("qo_shipments.csv", k),
                           [(s.id, s.contract.supplier, s.contract.receiver, s.size, s.frequency,
                             s.daily_count, f_hat[s.id], x_hat[s.id])
                            for s in sorted(shipments, key=lambda s: s.id)],
                           ("contract_id", "supplier", "receiver", "shipment_size", "frequency",
                            "daily_count", "qo_frequency", "qo_contract_size"))

    def origin_distribution(self, k, distribution):
        return write_table(self.path("origin_distribution.csv", k),
                           [(r, o, p) for r in sorted(distribution)
                            for o, p in sorted(distribution[r].items())],
                           ("destination_zone", "origin_zone", "probability"))

    def params(self, k, params):
        params.save(self.directory, "_%s" % k)

    def estimation_report(self, k, report):
        return report.to_csv(self.path("estimation_report.csv", k))

    def demand(self, run, k=None):
        """
        Simulated contracts, shipments and node tours of one run (contracts.csv, shipments.csv,
        tours.csv). Tour rows list the node sequence from depot to depot, one row per node with
        the shipments served there.
        """
        write_table(self.path("contracts.csv", k),
                    [(c.id, c.receiver, c.supplier, c.commodity, c.epg, c.size)
                     for c in sorted(run.contracts, key=lambda c: c.id)], CONTRACT_COLUMNS)
        write_table(self.path("shipments.csv", k),
                    [(s.id, s.contract.id, s.size, s.frequency, s.daily_count)
                     for s in sorted(run.shipments, key=lambda s: s.id)], SHIPMENT_COLUMNS)
        rows = []
        for t in sorted(run.tours, key=lambda t: t.id):
            stops = [(t.depot, [])] + t.stops + [(t.depot, [])]
            rows.extend((t.id, seq, node, " ".join(str(s) for s in shipments))
                        for seq, (node, shipments) in enumerate(stops))
        return write_table(self.path("tours.csv", k), rows, TOUR_COLUMNS)

    def best(self, record, params):
        write_table(self.path("best.csv"), [(record.k, record.rmse, record.mae, record.mae_ratio,
                                             record.lam)], CONVERGENCE_COLUMNS)
        params.save(self.directory, "_best")
