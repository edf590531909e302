"""CSV/JSON table output with a reproducible configuration hash.

Floats are written with ``repr`` (shortest round-trip form, '.' decimal, no
locale), so a table is a pure function of its configuration.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math

from . import __version__


def config_hash(config: dict) -> str:
    """SHA-256 (first 16 hex digits) of the canonical JSON of ``config`` plus the version."""
    payload = json.dumps({"version": __version__, **config}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return _cell(v.item())
    return str(v)


def _json_value(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def render_csv(columns, rows, chash) -> str:
    """Header, rows, and the trailing ``# config_hash=...`` comment line."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    buf.write(f"# config_hash={chash}\n")
    return buf.getvalue()


def render_json(obj, chash=None) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return _json_value(o)

    out = clean(obj)
    if chash is not None:
        out = {**out, "config_hash": chash}
    return json.dumps(out, indent=2, sort_keys=False) + "\n"


def render_table(columns, rows, chash, fmt="csv") -> str:
    if fmt == "json":
        return render_json({"columns": list(columns), "rows": [list(r) for r in rows]}, chash)
    return render_csv(columns, rows, chash)
