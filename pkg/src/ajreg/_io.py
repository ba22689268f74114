"""Serialization helpers shared by the CLI and the experiment harness."""
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np


def fmt(x):
    """Format a float with 17 significant digits (exact round-trip)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    text = format(x, ".17g")
    # keep integral values (and -0.0) recognizably floating point
    return text if any(c in text for c in ".en") else text + ".0"


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _iterencode(o, indent, sort_keys, level=0):
    # json.dumps would use repr() for floats; every number here carries 17 digits.
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(o, dict):
        if not o:
            yield "{}"
            return
        items = sorted(o.items()) if sort_keys else o.items()
        yield "{"
        first = True
        for k, v in items:
            if not first:
                yield sep
            first = False
            yield pad + json.dumps(k) + ": "
            yield from _iterencode(v, indent, sort_keys, level + 1)
        yield end + "}"
    elif isinstance(o, list):
        if not o:
            yield "[]"
            return
        if len(o) <= 8 and all(isinstance(v, int) for v in o):
            # index tuples stay on one line
            yield "[" + ", ".join(json.dumps(v) for v in o) + "]"
            return
        yield "["
        for i, v in enumerate(o):
            if i:
                yield sep
            yield pad
            yield from _iterencode(v, indent, sort_keys, level + 1)
        yield end + "]"
    elif isinstance(o, float):
        s = fmt(o)
        yield {"nan": "NaN", "inf": "Infinity", "-inf": "-Infinity"}.get(s, s)
    else:
        yield json.dumps(o)


def dumps(obj, indent=2):
    """JSON-encode ``obj`` (numpy-aware) with 17-significant-digit floats."""
    return "".join(_iterencode(_to_jsonable(obj), indent, False)) + "\n"


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a temporary file and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    atomic_write_text(path, dumps(obj))


def csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"
