"""SVG trajectory plots for the planar-coordinate spaces"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Circle

from core.logger import log
from utils.geometry.metric_core import ClosedBall, SpaceKind
from utils.system.error_handler import handle_output_error
from utils.system.ui import print_success, print_warning

PLOTTABLE_KINDS = (SpaceKind.EUCLIDEAN, SpaceKind.POINCARE, SpaceKind.RIVER)


def plot_transcript_svg(transcript, path):
    """Lion and man paths; returns the path, or None when the space has no planar picture"""
    space = transcript.config.space
    if space.kind not in PLOTTABLE_KINDS:
        print_warning(f"No planar plot for the {space.kind.value} space, skipping SVG")
        return None

    lions = [p.coordinates() for p in transcript.lions]
    men = [p.coordinates() for p in transcript.men]

    # fixed salt and no date keep the SVG byte-stable
    with plt.rc_context({"svg.hashsalt": "geopursuit", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 6))
        if space.kind is SpaceKind.POINCARE:
            ax.add_patch(Circle((0, 0), 1.0, fill=False, color="k", linewidth=0.8))
        elif space.kind is SpaceKind.RIVER:
            ax.axhline(0.0, color="tab:blue", linewidth=0.8, alpha=0.5)
        if space.kind is SpaceKind.EUCLIDEAN and isinstance(space.domain, ClosedBall):
            c = space.domain.center
            ax.add_patch(Circle((c.x, c.y), space.domain.radius, fill=False, color="0.6", linestyle="--"))

        ax.plot([p[0] for p in lions], [p[1] for p in lions], "-o", color="tab:red", markersize=2, label="lion")
        ax.plot([p[0] for p in men], [p[1] for p in men], "-o", color="tab:green", markersize=2, label="man")
        ax.set_aspect("equal")
        ax.set_title(f"{space.kind.value}: {transcript.strategy_name}, D = {transcript.config.jump_bound:g}")
        ax.legend(loc="upper right")

        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            handle_output_error(e, path)
        finally:
            plt.close(fig)

    log.debug(f"Plotted {len(lions)} lion and {len(men)} man positions")
    print_success(f"Wrote {path}")
    return path
