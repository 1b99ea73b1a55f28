"""JSON helpers shared by the MUB and state file formats.

Complex numbers are stored as ``[re, im]`` pairs and floats are written
with 17 significant digits so that files round-trip bit-exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ParseError


def _dump(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _dump(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _dump(v, out)
        out.append("]")
    elif isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        out.append(json.dumps(bool(obj) if isinstance(obj, np.bool_) else obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            out.append(json.dumps(None) if math.isnan(x) else ('"inf"' if x > 0 else '"-inf"'))
        else:
            out.append(format(x, ".17g"))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Serialize plain data to JSON text, floats with 17 significant digits."""
    out: list[str] = []
    _dump(obj, out)
    return "".join(out)


def complex_to_pairs(a: np.ndarray):
    """Nested [re, im] lists for a complex array of any rank."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_to_pairs(x) for x in a]


def pairs_to_complex(data, shape: tuple[int, ...], what: str) -> np.ndarray:
    """Inverse of :func:`complex_to_pairs` with shape checking."""
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: ragged or non-numeric complex array") from exc
    if arr.shape != tuple(shape) + (2,):
        raise ParseError(f"{what}: expected shape {tuple(shape)} of [re, im] pairs, got {arr.shape[:-1] if arr.ndim else arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{what}: non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def loads(content) -> dict:
    if isinstance(content, (bytes, bytearray)):
        try:
            content = content.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("file is not valid UTF-8") from exc
    try:
        obj = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    return obj
