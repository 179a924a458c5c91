"""Figure specifications and CSV ingestion."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CURVE_COLUMNS = ("t", "x", "y", "r", "speed", "arclength")
SIM_COLUMNS = ("replicate", "t_n", "m1", "m2")


def load_csv(path, expected_columns) -> dict[str, np.ndarray]:
    """Read one CLI CSV ('#' metadata lines skipped) and check its schema.

    Raises FileNotFoundError for a missing file and ValueError for an
    empty or schema-breaking one - a figure must never render silently
    from bad data.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"input CSV missing: {p}")
    header = None
    rows = []
    with open(p) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None or not rows:
        raise ValueError(f"CSV {p} holds no data rows")
    if tuple(header) != tuple(expected_columns):
        raise ValueError(
            f"CSV {p} columns {header} do not match expected {list(expected_columns)}"
        )
    data = np.asarray(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


@dataclass(frozen=True)
class FigureSpec:
    """What one figure consumes and where it goes.

    ``inputs`` maps a panel/series label to its CSV path; ``n_values``
    lists the sample sizes behind density panels (empty for galleries).
    """

    figure_id: str
    inputs: dict[str, str] = field(default_factory=dict)
    n_values: tuple[int, ...] = ()
    output: str = "figure.png"

    def validate(self, expected_columns) -> None:
        for label, path in self.inputs.items():
            load_csv(path, expected_columns)
