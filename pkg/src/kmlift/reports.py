"""Structured report emission: one canonical JSON form (sorted keys, exact
rationals as "num/den" strings, cyclotomic numbers as level + coefficient
list) mirrored by an aligned-column text rendering.  Reruns with the same
configuration produce byte-identical files; timings live only in the run
manifest."""

from __future__ import annotations

import json
import os
from fractions import Fraction

from .exactalg import CycloNum


def serialize_value(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, CycloNum):
        return v.serialize()
    if isinstance(v, dict):
        return {k: serialize_value(x) for k, x in sorted(v.items())}
    if isinstance(v, (list, tuple)):
        return [serialize_value(x) for x in v]
    return v


def write_report(data: dict, path: str):
    """Canonical JSON + aligned text mirror (path gets .json / .txt)."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    payload = serialize_value(data)
    with open(path + ".json", "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(path + ".txt", "w") as fh:
        fh.write(render_text(payload))
    return path + ".json"


def render_text(payload, indent=0) -> str:
    pad = "  " * indent
    if isinstance(payload, dict):
        if not payload:
            return pad + "(empty)\n"
        width = max(len(str(k)) for k in payload)
        out = []
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)):
                out.append(f"{pad}{k}:\n" + render_text(v, indent + 1))
            else:
                out.append(f"{pad}{str(k).ljust(width)} : {v}\n")
        return "".join(out)
    if isinstance(payload, list):
        if not payload:
            return pad + "(none)\n"
        return "".join(
            render_text(v, indent + 1) if isinstance(v, (dict, list))
            else f"{pad}- {v}\n" for v in payload)
    return f"{pad}{payload}\n"


def manifest(config: dict, stages: list, constants: dict, errata: list) -> dict:
    from . import __version__
    return {
        "config": config,
        "version": __version__,
        "stages": stages,            # (name, seconds) pairs; excluded from diffs
        "fitted_constants": constants,
        "adjudicated_errata": errata,
    }
