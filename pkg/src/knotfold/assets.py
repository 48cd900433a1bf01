"""Bundled grid diagrams and their provenance.

The asset directory can be overridden with the KNOTFOLD_ASSETS environment
variable.  Each JSON file carries a ``provenance`` field recording how the
diagram was obtained.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .grid import GridDiagram

BUNDLED = {
    "overhand": "overhand.json",
    "figure8": "figure8.json",
    "figure-eight": "figure8.json",
    "carrick": "carrick.json",
}


def asset_dir() -> Path:
    override = os.environ.get("KNOTFOLD_ASSETS")
    if override:
        return Path(override)
    return Path(str(resources.files("knotfold") / "assets"))


def bundled_names() -> list[str]:
    return sorted({"overhand", "figure8", "carrick"})


def load_bundled(name: str) -> tuple[GridDiagram, str]:
    """Bundled diagram and its provenance string."""
    key = name.lower()
    if key not in BUNDLED:
        raise KeyError(
            f"unknown bundled knot {name!r}; available: {', '.join(bundled_names())}"
        )
    path = asset_dir() / BUNDLED[key]
    data = json.loads(path.read_text())
    return GridDiagram.from_json_dict(data), data.get("provenance", "")


def load_grid_file(path) -> GridDiagram:
    data = json.loads(Path(path).read_text())
    return GridDiagram.from_json_dict(data)
