import os
import re
import logging
from pysltc.errors import EmptyInput, MissingInput
from pysltc.functions.tools import read_table

SCATTER_FILE = re.compile(r"^scatter_(\d+)\.csv$")


def _load(path, columns, dtypes):
    frame = read_table(path, columns, dtypes)
    if not len(frame):
        raise EmptyInput("%s has no rows" % path)
    return frame


def load_report_tables(directory):
    """
    Read and check every chart input before anything is rendered.

    :return: tuple (convergence frame, LOOCV frame or None, list of (k, scatter frame)).
    """
    convergence = _load(os.path.join(directory, "convergence.csv"),
                        ("k", "rmse", "mae", "mae_ratio", "lambda"),
                        {"k": "int", "rmse": "float", "mae": "float"})
    loocv = None
    path = os.path.join(directory, "loocv_curve.csv")
    if os.path.exists(path):
        loocv = _load(path, ("lambda", "cv_rmse"), {"lambda": "float", "cv_rmse": "float"})
    scatters = []
    for name in sorted(os.listdir(directory)):
        match = SCATTER_FILE.match(name)
        if match:
            scatters.append((int(match.group(1)),
                             _load(os.path.join(directory, name),
                                   ("screenline_id", "observed", "simulated"),
                                   {"screenline_id": "str", "observed": "float",
                                    "simulated": "float"})))
    scatters.sort(key=lambda item: item[0])
    return convergence, loocv, scatters


def render_report(directory, out_dir=None, logger=None):
    """
    Render SVG charts from calibration CSV outputs: observed vs simulated counts per
    iteration (scatter_<k>.svg), the first and last iterations overlaid
    (scatter_initial_final.svg, from two iterations on), RMSE and MAE per iteration
    (convergence.svg) and the cross-validation curve (loocv_curve.svg).

    :param directory: directory with convergence.csv, scatter_<k>.csv and loocv_curve.csv.
    :param out_dir: (optional) SVG directory, by default the input directory.
    :return: list of written SVG paths.
    """
    log = logger if logger is not None else logging.getLogger("pysltc")
    if not os.path.isdir(directory):
        raise MissingInput("report directory %s not found" % directory)
    convergence, loocv, scatters = load_report_tables(directory)
    out_dir = directory if out_dir is None else out_dir
    os.makedirs(out_dir, exist_ok=True)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "pysltc"
    written = []

    def save(fig, name):
        path = os.path.join(out_dir, name)
        fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
        plt.close(fig)
        written.append(path)

    for k, frame in scatters:
        observed = [float(v) for v in frame["observed"]]
        simulated = [float(v) for v in frame["simulated"]]
        top = max(observed + simulated + [1.0]) * 1.05
        fig, ax = plt.subplots(figsize=(5.5, 5.5))
        ax.plot([0, top], [0, top], color="grey", linewidth=1, linestyle="--")
        ax.scatter(observed, simulated, s=18)
        ax.set_xlim(0, top)
        ax.set_ylim(0, top)
        ax.set_xlabel("observed count (vehicles/day)")
        ax.set_ylabel("simulated count (vehicles/day)")
        ax.set_title("Screenline counts, iteration %s" % k)
        save(fig, "scatter_%s.svg" % k)

    if len(scatters) > 1:
        (k0, initial), (k1, final) = scatters[0], scatters[-1]
        top = max([float(v) for f in (initial, final) for c in ("observed", "simulated")
                   for v in f[c]] + [1.0]) * 1.05
        fig, ax = plt.subplots(figsize=(5.5, 5.5))
        ax.plot([0, top], [0, top], color="grey", linewidth=1, linestyle="--")
        ax.scatter([float(v) for v in initial["observed"]], [float(v) for v in initial["simulated"]],
                   s=18, marker="o", facecolors="none", edgecolors="tab:red",
                   label="initial (iteration %s)" % k0)
        ax.scatter([float(v) for v in final["observed"]], [float(v) for v in final["simulated"]],
                   s=18, marker="s", color="tab:blue", label="final (iteration %s)" % k1)
        ax.set_xlim(0, top)
        ax.set_ylim(0, top)
        ax.set_xlabel("observed count (vehicles/day)")
        ax.set_ylabel("simulated count (vehicles/day)")
        ax.legend(loc="upper left")
        ax.set_title("Screenline counts before and after calibration")
        save(fig, "scatter_initial_final.svg")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ks = [int(v) for v in convergence["k"]]
    ax.plot(ks, [float(v) for v in convergence["rmse"]], marker="o", label="RMSE")
    ax.plot(ks, [float(v) for v in convergence["mae"]], marker="s", label="MAE")
    ax.set_xlabel("iteration")
    ax.set_ylabel("vehicles/day")
    ax.set_xticks(ks)
    ax.legend()
    ax.set_title("Calibration convergence")
    save(fig, "convergence.svg")

    if loocv is not None:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot([float(v) for v in loocv["lambda"]], [float(v) for v in loocv["cv_rmse"]], marker="o")
        ax.set_xscale("log")
        ax.set_xlabel("penalty parameter")
        ax.set_ylabel("LOOCV RMSE")
        ax.set_title("Penalty cross-validation")
        save(fig, "loocv_curve.svg")
    log.info("Report: %s charts written to %s", len(written), out_dir)
    return written
