"""Canonical JSON serialization and instance hashing.

Every float is rendered with 17 significant digits (the round-trip-safe
amount for IEEE doubles), keys keep their construction order, and
separators are fixed, so the CLI and the HTTP service emit
byte-identical bodies for identical inputs and test fixtures can be
compared as plain strings.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .model import Instance


def format_float(x: float) -> str:
    """Shortest 17-significant-digit decimal; always carries a float marker."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} has no canonical JSON form")
    s = format(x, ".17g")
    if s.lstrip("+-").replace(".", "", 1).isdigit() and "." not in s:
        s += ".0"
    return s


def _encode(obj) -> str:
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}:{_encode(v)}" for k, v in obj.items())
        return "{" + ",".join(items) + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot canonically serialize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    return _encode(obj)


def instance_to_dict(instance: Instance) -> dict:
    """Schema-ordered plain dict: categories, q, p, w."""
    return {
        "categories": list(instance.categories),
        "q": [float(x) for x in instance.q],
        "p": [float(x) for x in instance.p],
        "w": [float(x) for x in instance.w],
    }


def instance_digest(instance: Instance) -> str:
    """SHA-256 of the canonical instance JSON, post-normalization.

    Request/response cache validation key: two requests shipping the same
    numbers (after PMF renormalization) hash identically regardless of
    their original formatting.
    """
    payload = canonical_dumps(instance_to_dict(instance))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()
