"""JSON helpers: complex numbers as ``[re, im]`` pairs, deterministic output.

``dumps`` writes floats with 17 significant digits and keeps dict insertion
order, so an identical report always serializes to identical bytes.
"""
import json
import math
from numbers import Integral, Real

import numpy as np


def parse_complex(x) -> complex:
    """A number or an ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex number must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, bool) or not isinstance(x, Real):
        raise ValueError(f"not a number: {x!r}")
    return complex(float(x))


def parse_complex_array(x) -> np.ndarray:
    """Nested lists whose leaves are ``[re, im]`` pairs."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("complex arrays must have [re, im] pairs at the leaves")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_complex_matrix(x) -> np.ndarray:
    m = parse_complex_array(x)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square complex matrix, got shape {m.shape}")
    return m


def encode_complex(x):
    """Complex scalar/array to nested ``[re, im]`` lists."""
    arr = np.asarray(x, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} cannot be written to JSON")
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def _is_leaf(x):
    return isinstance(x, (str, bool, Real, complex, np.generic)) or x is None


def _scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, (Integral, np.integer)):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return f"[{_fmt_float(x.real)}, {_fmt_float(x.imag)}]"
    return _fmt_float(float(x))


def _write(obj, level, indent, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: ")
            _write(v, level + 1, indent, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if all(_is_leaf(v) or (isinstance(v, (list, tuple)) and all(_is_leaf(u) for u in v)
                               and len(v) <= 3) for v in obj):
            parts = []
            for v in obj:
                if isinstance(v, (list, tuple)):
                    parts.append("[" + ", ".join(_scalar(u) for u in v) + "]")
                else:
                    parts.append(_scalar(v))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _write(v, level + 1, indent, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(_scalar(obj))


def dumps(obj, indent=2) -> str:
    out = []
    _write(obj, 0, indent, out)
    return "".join(out) + "\n"
