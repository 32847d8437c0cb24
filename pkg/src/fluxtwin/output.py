"""Deterministic CSV/JSON emission with 17-significant-digit floats."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Mapping, Sequence

import numpy as np


def fmt(x) -> str:
    return format(float(x), ".17g")


def _to_plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _encode(obj, indent: int | None, level: int) -> str:
    if indent is None:
        return _compact(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _compact(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_compact(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ",".join(_compact(v) for v in obj) + "]"
    return _encode(obj, 0, 0)


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(_to_plain(obj), indent, 0) + "\n"


def dumps_csv(columns: Sequence[str], rows: Iterable[Sequence], meta: Mapping | None = None) -> str:
    """CSV text preceded by a single ``#`` metadata line."""
    buf = io.StringIO()
    if meta is not None:
        buf.write("# " + _compact(_to_plain(meta)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def phase_record(z: complex) -> dict:
    """A unit complex number with its phase in radians and in turns."""
    ph = math.atan2(z.imag, z.real)
    turns = (ph / (2.0 * math.pi)) % 1.0
    return {
        "re": z.real,
        "im": z.imag,
        "abs": abs(z),
        "phase_rad": ph,
        "phase_turns": 0.0 if turns >= 1.0 else turns,
    }
