"""File formats shared by the CLI: exact matrices as JSON.

A matrix is an array of row arrays whose entries are integers or "p/q"
strings; a point (or centre) file is an array of such matrices, one per
variable.  Values are never rendered as decimals.
"""

from __future__ import annotations

import json
from pathlib import Path

from .linalg import Mat, format_rat, rat
from .realization import mat_from_json, mat_to_json


def parse_matrix(obj) -> Mat:
    return Mat([[rat(str(x)) for x in row] for row in obj])


def load_matrix_tuple(path: str | Path) -> tuple[Mat, ...]:
    """Load a point/centre file: a JSON array of matrices."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "matrices" in data:
        data = data["matrices"]
    if not isinstance(data, list) or not data:
        raise ValueError(f"{path}: expected a non-empty JSON array of matrices")
    return tuple(parse_matrix(m) for m in data)


def dump_matrix_tuple(mats, path: str | Path) -> None:
    Path(path).write_text(json.dumps([mat_to_json(m) for m in mats]) + "\n")


def matrix_to_text(m: Mat) -> str:
    """Aligned plain-text rendering with exact entries."""
    cells = [[format_rat(x) for x in row] for row in m.data]
    if not cells or not cells[0]:
        return f"({m.rows}x{m.cols} empty matrix)"
    widths = [max(len(cells[i][j]) for i in range(m.rows)) for j in range(m.cols)]
    return "\n".join(
        "[ " + "  ".join(c.rjust(w) for c, w in zip(row, widths)) + " ]"
        for row in cells)
