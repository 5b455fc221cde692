"""JSON and CSV output for reports.

Floats are written with 17 significant digits, which round-trips every
IEEE double.  Non-finite floats have no JSON spelling; they are written as
``null`` and reported through the ``warnings`` list passed to :func:`dumps`.
"""

import csv
import io
import json
import math
import os
import tempfile
from importlib import resources

import numpy as np

__all__ = [
    "to_jsonable",
    "dumps",
    "write_atomic",
    "load_schema",
    "validate",
    "emit_strip_csv",
    "rows_to_csv",
]


def _float_token(x):
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def to_jsonable(obj):
    """Convert numpy and complex values to plain JSON types (complex -> ``[re, im]``)."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def _emit(obj, out, indent, level, path, warnings):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(_float_token(obj))
        else:
            out.append("null")
            if warnings is not None:
                warnings.append(f"non-finite value {obj} at {path or '$'} written as null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v, out, indent, level + 1, f"{path}.{k}", warnings)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj) and len(obj) <= 4:
            out.append("[")
            for i, v in enumerate(obj):
                _emit(v, out, indent, level, f"{path}[{i}]", warnings)
                if i < len(obj) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, indent, level + 1, f"{path}[{i}]", warnings)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__} at {path or '$'}")


def dumps(obj, indent=2, warnings=None):
    """Serialise ``obj`` (after :func:`to_jsonable`) with 17-digit floats.

    Paths of non-finite floats are appended to ``warnings`` when given.
    """
    out = []
    _emit(to_jsonable(obj), out, indent, 0, "", warnings)
    return "".join(out) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_schema(name):
    """Bundled JSON schema ``name`` (``measure``, ``system`` or ``report``)."""
    ref = resources.files("carleson_admit").joinpath("schemas", f"{name}.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def validate(doc, name):
    """Validate ``doc`` against a bundled schema; raises ``jsonschema.ValidationError``."""
    import jsonschema

    jsonschema.validate(doc, load_schema(name), cls=jsonschema.Draft202012Validator)


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_float_token(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _weight_fn(weights, alpha=None):
    if callable(weights):
        return weights
    if weights in (None, "unit"):
        return lambda n: 1.0
    if weights == "n_squared":
        return lambda n: float(n) ** 2
    if weights == "n_pow":
        return lambda n: float(n) ** (2.0 / alpha)
    raise ValueError(f"unknown weights {weights!r}")


def emit_strip_csv(table, weights="unit", alpha=None):
    """CSV text with rows ``n, C, weighted, cumulative`` sorted by ``n``.

    ``table`` is an :class:`~carleson_admit.measure.IntensityTable` or a
    mapping ``n -> C``; ``weights`` is ``"unit"``, ``"n_squared"``,
    ``"n_pow"`` (with ``alpha``) or a callable ``n -> weight``.
    """
    items = sorted(table) if not isinstance(table, dict) else sorted(table.items())
    wfun = _weight_fn(weights, alpha)
    rows, acc = [], []
    for n, c in items:
        v = wfun(n) * c
        acc.append(v)
        rows.append([int(n), float(c), float(v), math.fsum(acc)])
    return rows_to_csv(["n", "C", "weighted", "cumulative"], rows)
