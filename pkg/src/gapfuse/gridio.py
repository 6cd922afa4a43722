"""Plain-text raster format.

::

    RAINGRID 1 <width> <height> <cell_size_deg>
    <width values>      # row 0
    ...                 # height rows in total

Values are written in shortest round-trip decimal form, missing pixels as
``NA``, lines end in ``\\n`` and the file is ASCII. Any other reader that
produces a :class:`~gapfuse.grid.RainGrid` can stand in for this one.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Union

import numpy as np

from .grid import GridError, GridMeta, RainGrid

__all__ = ["FormatError", "MAGIC", "MISSING_TOKEN", "SUFFIX", "dumps", "loads", "read_grid", "write_grid", "atomic_write_text"]

MAGIC = "RAINGRID"
VERSION = "1"
MISSING_TOKEN = "NA"
SUFFIX = ".grid"

PathLike = Union[str, os.PathLike]


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips
    return repr(float(x))


def dumps(g: RainGrid) -> str:
    m = g.meta
    lines = [f"{MAGIC} {VERSION} {m.width} {m.height} {_fmt(m.cell_size_deg)}"]
    for row, ok in zip(g.values, g.valid):
        lines.append(" ".join(_fmt(v) if k else MISSING_TOKEN for v, k in zip(row, ok)))
    return "\n".join(lines) + "\n"


def loads(text: str) -> RainGrid:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty grid file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != MAGIC:
        raise FormatError(f"bad header {lines[0]!r}")
    if head[1] != VERSION:
        raise FormatError(f"unsupported format version {head[1]}")
    try:
        width, height, cell = int(head[2]), int(head[3]), float(head[4])
    except ValueError as exc:
        raise FormatError(f"bad header {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != height:
        raise FormatError(f"expected {height} rows, found {len(rows)}")
    values = np.zeros((height, width))
    valid = np.ones((height, width), dtype=bool)
    for i, row in enumerate(rows):
        toks = row.split(" ")
        if len(toks) != width:
            raise FormatError(f"row {i} has {len(toks)} values, expected {width}")
        for j, tok in enumerate(toks):
            if tok == MISSING_TOKEN:
                valid[i, j] = False
                continue
            try:
                values[i, j] = float(tok)
            except ValueError as exc:
                raise FormatError(f"row {i} column {j}: bad value {tok!r}") from exc
    try:
        return RainGrid(GridMeta(width, height, cell), values, valid)
    except GridError as exc:
        raise FormatError(str(exc)) from exc


def read_grid(path: PathLike) -> RainGrid:
    with open(path, "r", encoding="ascii", newline="") as fh:
        return loads(fh.read())


def atomic_write_text(path: PathLike, text: str, encoding: str = "ascii") -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_grid(path: PathLike, g: RainGrid) -> None:
    atomic_write_text(path, dumps(g))
