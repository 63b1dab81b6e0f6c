"""CSV loading with schema validation."""

from __future__ import annotations

import csv
import os


class SchemaError(ValueError):
    """A CSV input is missing columns or internally inconsistent."""


class ValidationError(ValueError):
    """The CSV data violates an invariant the figure relies on."""


def load_csv(path: str, required: tuple[str, ...]) -> dict[str, list]:
    """Load a header-row CSV into per-column lists.

    Numeric columns come back as floats, everything else as strings; a
    missing required column raises a SchemaError naming it.
    """
    if not os.path.exists(path):
        raise SchemaError(f"{path}: file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r}")
        cols: dict[str, list] = {h: [] for h in header}
        for row in reader:
            if not row:
                continue
            for h, val in zip(header, row):
                try:
                    cols[h].append(float(val))
                except ValueError:
                    cols[h].append(val)
    return cols


def save_figure(fig, out_path: str) -> list[str]:
    """Write PNG and SVG variants of the figure next to each other."""
    base, ext = os.path.splitext(out_path)
    if ext.lower() not in (".png", ".svg", ""):
        base = out_path
    png = base + ".png"
    svg = base + ".svg"
    os.makedirs(os.path.dirname(png) or ".", exist_ok=True)
    fig.savefig(png, dpi=180, bbox_inches="tight")
    fig.savefig(svg, bbox_inches="tight")
    return [png, svg]
