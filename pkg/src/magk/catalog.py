"""Loading group, action and model specs from the shipped catalog or from files.

A group spec is a JSON object::

    {"name": "d4-h",
     "recipe": {"kind": "semidirect", "m": 4, "k": 2, "action": 3, "phi": "on_h"},
     "twist": {"cocycle": [[1, 1], [1, -1]]}}          # optional

``recipe.kind`` is ``"semidirect"`` or ``"table"`` (with ``mul`` and
``phi``). Leaving ``phi`` out gives a plain finite group, which is what the
torus commands expect for unitary actions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .errors import NotGraded, SchemaError
from .groups import (CentralExtensionZ2, FiniteGroup, FiniteMagneticGroup, build_from_table,
                     build_semidirect, central_extension_z2, semidirect_table)

__all__ = ["GroupEntry", "catalog_names", "load_json", "group_spec", "build_group",
           "load_group", "load_action_spec", "load_model_spec"]

KINDS = ("groups", "actions", "models")


def _catalog_dir(kind: str):
    return resources.files("magk") / "catalog" / kind


def catalog_names(kind: str = "groups") -> list[str]:
    if kind not in KINDS:
        raise ValueError(f"unknown catalog kind {kind!r}")
    return sorted(p.name[:-5] for p in _catalog_dir(kind).iterdir() if p.name.endswith(".json"))


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError("input file not found", pointer="", path=str(path)) from None
    except json.JSONDecodeError as exc:
        raise SchemaError("input is not valid JSON", pointer="", path=str(path),
                          line=exc.lineno, column=exc.colno) from None


def _lookup(kind: str, name_or_path: str) -> Any:
    """Catalog entry by name, or a JSON file by path."""
    entry = _catalog_dir(kind) / f"{name_or_path}.json"
    if entry.is_file():
        return json.loads(entry.read_text(encoding="utf-8"))
    if Path(name_or_path).is_file():
        return load_json(name_or_path)
    raise SchemaError(f"no {kind[:-1]} named {name_or_path!r} in the catalog and no such file",
                      pointer="", name=name_or_path)


def group_spec(name_or_path: str) -> dict:
    spec = _lookup("groups", name_or_path)
    if not isinstance(spec, dict) or not isinstance(spec.get("recipe"), dict):
        raise SchemaError("group spec needs a 'recipe' object", pointer="/recipe")
    return spec


def _int_field(recipe: dict, key: str) -> int:
    value = recipe.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"recipe.{key} must be an integer", pointer=f"/recipe/{key}")
    return value


def build_group(spec: dict) -> FiniteGroup:
    recipe = spec["recipe"]
    kind = recipe.get("kind")
    name = spec.get("name")
    phi = recipe.get("phi")
    if kind == "semidirect":
        m, k, a = (_int_field(recipe, f) for f in ("m", "k", "action"))
        if m < 1 or k < 1:
            raise SchemaError("m and k must be positive", pointer="/recipe")
        if phi is None:
            return FiniteGroup(semidirect_table(m, k, a), name=name)
        if not (isinstance(phi, str) or isinstance(phi, list)):
            raise SchemaError("phi must be a recipe keyword or a list", pointer="/recipe/phi")
        return build_semidirect(m, k, a, phi, name=name)
    if kind == "table":
        mul = recipe.get("mul")
        if not isinstance(mul, list) or not mul:
            raise SchemaError("recipe.mul must be a square table", pointer="/recipe/mul")
        arr = np.asarray(mul)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.dtype.kind not in "iu":
            raise SchemaError("recipe.mul must be a square integer table", pointer="/recipe/mul")
        if phi is None:
            return FiniteGroup(arr, name=name)
        return build_from_table(arr, phi, name=name)
    raise SchemaError("recipe.kind must be 'semidirect' or 'table'", pointer="/recipe/kind")


@dataclass(frozen=True, eq=False)
class GroupEntry:
    name: str
    spec: dict
    group: FiniteGroup
    extension: CentralExtensionZ2 | None

    @property
    def magnetic(self) -> FiniteMagneticGroup:
        if not isinstance(self.group, FiniteMagneticGroup):
            raise NotGraded("group spec has no phi; a magnetic group is required",
                            pointer="/recipe/phi")
        return self.group


def load_group(name_or_path: str, twist: str | None = None) -> GroupEntry:
    """Build a group, optionally with a twist.

    ``twist`` is ``"builtin"`` (the spec's own ``twist`` field) or a path to
    a JSON file holding ``{"cocycle": [[...]]}``.
    """
    spec = group_spec(name_or_path)
    group = build_group(spec)
    ext = None
    if twist is not None:
        if twist == "builtin":
            tw = spec.get("twist")
            if tw is None:
                raise SchemaError("group spec has no builtin twist", pointer="/twist")
        else:
            tw = load_json(twist)
        if not isinstance(tw, dict) or "cocycle" not in tw:
            raise SchemaError("twist needs a 'cocycle' table", pointer="/twist/cocycle")
        base = GroupEntry(spec.get("name", name_or_path), spec, group, None).magnetic
        try:
            cocycle = np.asarray(tw["cocycle"], dtype=np.int64)
        except (TypeError, ValueError):
            raise SchemaError("cocycle must be an integer table", pointer="/twist/cocycle") from None
        ext = central_extension_z2(base, cocycle)
    return GroupEntry(spec.get("name", name_or_path), spec, group, ext)


def load_action_spec(name_or_path: str) -> dict:
    spec = _lookup("actions", name_or_path)
    if not isinstance(spec, dict):
        raise SchemaError("action spec must be an object", pointer="/")
    return spec


def load_model_spec(name_or_path: str) -> dict:
    spec = _lookup("models", name_or_path)
    if not isinstance(spec, dict):
        raise SchemaError("model spec must be an object", pointer="/")
    return spec
