"""Figure regeneration from projmean CLI output.

Every figure is a pure function of its input CSVs: fixed axes, fixed
Silverman bandwidths, Agg backend.  Nothing here imports the simulation
library; data arrives exclusively through the CLI's CSV and JSON
interfaces.
"""

from .figspec import FigureSpec, load_csv
from .kde import gaussian_kde, log_space_density, mode_concentration
from .render import render_curve_gallery, render_density

__all__ = [
    "FigureSpec",
    "load_csv",
    "gaussian_kde",
    "log_space_density",
    "mode_concentration",
    "render_curve_gallery",
    "render_density",
]
