"""Deterministic JSON serialization helpers."""

from __future__ import annotations

import json

from . import __version__


def _clean(x: float, digits: int = 12) -> float:
    return round(float(x), digits) + 0.0


def complex_pair(v) -> list[float]:
    z = complex(v)
    return [_clean(z.real), _clean(z.imag)]


def dumps(obj) -> str:
    """Byte-stable JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def envelope(command: str, canonical_input: dict, result) -> dict:
    return {"tool": "magk", "version": __version__, "command": command,
            "input": canonical_input, "result": result}
