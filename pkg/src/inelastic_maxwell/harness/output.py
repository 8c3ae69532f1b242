import csv
import io
import math
from typing import Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..dynamics.paired import PairedRun
from ..moments.observables import write_moments_csv
from ..utils.io import atomic_open
from ..utils.logger import get_logger

logger = get_logger(__name__)

TIMESERIES_COLUMNS = ["tau", "w2", "bound", "theta_a", "theta_b", "m4_a", "m4_b"]

# Fixed ids keep SVG output byte-identical between runs
SVG_RC = {"svg.hashsalt": "inelastic-maxwell", "svg.fonttype": "none"}


def write_timeseries_csv(run: PairedRun, path: str) -> str:
    """
    Write one row per recorded time. ``bound`` is the W2 bound, the square
    root of the contraction right-hand side.
    """
    try:
        with atomic_open(path, "w") as f:
            writer = csv.writer(f)
            writer.writerow(TIMESERIES_COLUMNS)
            for r in run.records:
                writer.writerow(
                    [repr(float(v)) for v in (r.tau, r.w2, r.bound, r.theta_a, r.theta_b, r.m4_a, r.m4_b)]
                )
        logger.info(f"Time series written to {path}")
        return path
    except OSError as e:
        logger.error(f"Error writing time series to {path}: {e}")
        raise


def write_timeseries_svg(run: PairedRun, path: str, title: Optional[str] = None) -> str:
    """Line plot of the measured W2 and its bound against tau."""
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        try:
            ax.plot(run.taus, run.w2, color="tab:blue", marker="o", label="W2", gid="w2")
            ax.plot(run.taus, run.bounds, color="tab:red", linestyle="--", label="bound", gid="bound")
            ax.set_xlabel("tau")
            ax.set_ylabel("W2")
            ax.set_title(title or f"{run.family} contraction")
            ax.legend()
            buffer = io.StringIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    try:
        with atomic_open(path, "w") as f:
            f.write(buffer.getvalue())
        logger.info(f"Plot written to {path}")
        return path
    except OSError as e:
        logger.error(f"Error writing plot to {path}: {e}")
        raise


def write_paired_moments_csv(run: PairedRun, path: str) -> str:
    """Full moment states of both ensembles, columns prefixed a_ and b_."""
    rows = []
    for r in run.records:
        row = {"tau": r.tau}
        row.update({f"a_{k}": v for k, v in r.moments_a.to_row().items()})
        row.update({f"b_{k}": v for k, v in r.moments_b.to_row().items()})
        rows.append(row)
    return write_moments_csv(path, rows)


def emit_timeseries(run: PairedRun, csv_path: str,
                    svg_path: Optional[str] = None) -> Tuple[str, Optional[str]]:
    """
    Write the CSV time series and, when requested, the SVG plot.

    Args:
        run (PairedRun): Recorded paired run
        csv_path (str): CSV destination
        svg_path (str, optional): SVG destination

    Returns:
        Tuple[str, Optional[str]]: paths written
    """
    written_csv = write_timeseries_csv(run, csv_path)
    written_svg = write_timeseries_svg(run, svg_path) if svg_path else None
    if run.records and not all(math.isfinite(r.w2) for r in run.records):
        logger.warning("Time series contains non-finite distances")
    return written_csv, written_svg
