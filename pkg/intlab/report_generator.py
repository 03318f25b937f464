"""
CSV and JSON result files with a provenance header.
"""

import csv
import json
import logging
import math
from numbers import Complex, Integral, Real
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import config_digest

logger = logging.getLogger(__name__)


def build_provenance(config, flags=(), seed=None):
    """
    Provenance record: config digest, versions, assumption flags and seed.

    No timestamps, so identical runs produce identical files.
    """
    return {
        "config_digest": config_digest(config),
        "intlab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "flags": ",".join(flags) if flags else "none",
        "seed": config.get("seed", 0) if seed is None else seed,
    }


def _is_complex(value):
    return isinstance(value, Complex) and not isinstance(value, Real)


def _format(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return "%.15g" % float(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return ";".join(_format(v) for v in value)
    return str(value)


def _columns(rows):
    """Ordered union of row keys; a column holding any complex value is split into _re/_im."""
    names, split = [], set()
    for row in rows:
        for key, value in row.items():
            if key not in names:
                names.append(key)
            if _is_complex(value):
                split.add(key)
    header = []
    for key in names:
        header.extend([f"{key}_re", f"{key}_im"] if key in split else [key])
    return names, split, header


def _flatten(row, names, split):
    out = []
    for key in names:
        value = row.get(key)
        if key in split:
            z = complex(value) if value is not None else complex("nan")
            out.extend([_format(z.real), _format(z.imag)])
        else:
            out.append(_format(value))
    return out


def jsonable(value):
    """Plain JSON types: complex as [re, im], non-finite floats as null."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, Integral):
        return int(value)
    if _is_complex(value):
        return [jsonable(complex(value).real), jsonable(complex(value).imag)]
    if isinstance(value, Real):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_results(rows, summary, out_dir, stem, provenance):
    """
    Write <stem>.csv and <stem>.json.

    Args:
        rows: List of dicts, one CSV row each
        summary: JSON-able record of headline numbers, checks and flags
        out_dir: Output directory (created if needed)
        stem: File name without extension
        provenance: Dict emitted as leading '# key: value' lines and in the JSON

    Returns:
        tuple: (csv path, json path), or None if writing failed
    """
    out = Path(out_dir)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    names, split, header = _columns(rows)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            for key, value in provenance.items():
                f.write(f"# {key}: {value}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(_flatten(row, names, split))
        payload = {"provenance": provenance, **summary}
        with open(json_path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(jsonable(payload), f, sort_keys=True, indent=2)
            f.write("\n")
        return csv_path, json_path
    except OSError as e:
        logger.error(f"Failed to write results to {out}: {e}")
        return None
