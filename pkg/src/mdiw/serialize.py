"""Deterministic JSON/CSV rendering and matrix encoding for the CLI.

Floats are written with 17 significant digits so serialized doubles
round-trip exactly and repeated runs produce byte-identical artifacts.
Complex matrices travel as nested row-major arrays of [re, im] pairs.
"""

from __future__ import annotations

import numpy as np


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj, indent: int = 0) -> str:
    """Render a JSON document with fixed float formatting and key order."""
    return _render(obj, indent, 0) + "\n"


def _render(obj, indent: int, depth: int) -> str:
    pad = " " * (indent * (depth + 1))
    close_pad = " " * (indent * depth)
    nl = "\n" if indent else ""
    sep = "," + (nl + pad if indent else " ")
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return _escape(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sep.join(
            f"{_escape(str(k))}: {_render(v, indent, depth + 1)}" for k, v in obj.items()
        )
        return "{" + nl + pad + items + nl + close_pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = sep.join(_render(v, indent, depth + 1) for v in seq)
        return "[" + nl + pad + items + nl + close_pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def matrix_to_json(m: np.ndarray) -> list:
    """Complex matrix to nested row-major [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`."""
    rows = []
    for row in data:
        rows.append([complex(float(z[0]), float(z[1])) for z in row])
    m = np.array(rows, dtype=complex)
    if m.ndim != 2:
        raise ValueError("matrix JSON must be a nested list of [re, im] pairs")
    return m
