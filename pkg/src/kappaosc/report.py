"""Report serialization: JSON/CSV with 17 significant digits and a fixed header."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import __version__

BRANCH_FORMULAS = {
    "inverted": "E = (n+1)((n+2)k/2 - 1), prefactor (1-k r^2)^(1/2 - 1/(2k))",
    "mirror": "E = -(n+1)((n+2)k/2 - 1)",
    "conjugate": "E = (n+1)(1 + n k/2), prefactor (1-k r^2)^(1/(2k))",
}


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = f"{x:.17g}"
    # keep floats recognisable as floats in JSON
    if all(c not in s for c in ".eE"):
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def branch_status(resolved: Optional[str] = None, how: str = "not adjudicated in this run") -> dict:
    return {"candidates": BRANCH_FORMULAS, "resolved": resolved, "resolved_by": how,
            "n": "n = 2 N_r + mu, energies in units of hbar*alpha/sqrt(m)"}


def header(command: str, args: Mapping[str, Any], config: Optional[Mapping[str, str]] = None,
           seed: Optional[int] = None) -> dict:
    return {"tool": "kappaosc", "version": __version__, "command": command,
            "args": dict(sorted(args.items())), "config_file": dict(config or {}), "seed": seed}


def csv_text(header_row: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header_row)
    for row in rows:
        w.writerow([fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def parse_config(text: str) -> dict:
    """Plain key=value lines; '#' starts a comment, blank lines are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out
