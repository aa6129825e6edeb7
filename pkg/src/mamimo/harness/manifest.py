"""Reproducibility manifests and CSV/JSON table output.

Every experiment writes its rows alongside a JSON manifest holding the fully
resolved parameters, the master seed, and model notes; re-running with the
manifest's parameters reproduces the table bitwise. Floats are rendered with
9 significant digits, '.' decimal separator, no locale dependence.
"""

import json
import os
import tempfile
import time


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path: str, columns: list[str], rows: list[dict], fmt: str = "csv"):
    """Write rows as CSV (stable column order) or a JSON record list."""
    for r in rows:
        missing = [c for c in columns if c not in r]
        if missing:
            raise ValueError(f"row is missing columns {missing}")
    if fmt == "csv":
        lines = [",".join(columns)]
        for r in rows:
            lines.append(",".join(format_value(r[c]) for c in columns))
        _atomic_write(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        records = [{c: r[c] for c in columns} for r in rows]
        _atomic_write(path, json.dumps(records, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def write_manifest(
    path: str,
    experiment: str,
    parameters: dict,
    seed: int,
    row_count: int,
    wall_clock_s: float,
    notes: dict | None = None,
):
    from .. import __version__

    doc = {
        "experiment": experiment,
        "tool": "mamimo",
        "version": __version__,
        "seed": seed,
        "parameters": parameters,
        "row_count": row_count,
        "wall_clock_s": round(wall_clock_s, 3),
        "created_unix": int(time.time()),
    }
    if notes:
        doc["notes"] = notes
    _atomic_write(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")
