#!/usr/bin/env python3
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from projmean_figures.drivers import fig2

if __name__ == "__main__":
    sys.exit(fig2())
