"""The builtin example corpus shipped as JSON data files."""
from __future__ import annotations

import json
from importlib import resources

from . import errors
from .complex_core import FilteredComplex, build_complex
from .perversity import EquivalenceDeclaration, Perversity, equivalence_from_dict, perversity_from_dict

KINDS = ("complexes", "perversities", "equivalences")


def _folder(kind: str):
    return resources.files("ihcalc").joinpath("data", kind)


def names(kind: str = "complexes") -> list[str]:
    return sorted(p.name[: -len(".json")] for p in _folder(kind).iterdir() if p.name.endswith(".json"))


def raw(kind: str, name: str) -> dict:
    stem = name[:-5] if name.endswith(".json") else name
    entry = _folder(kind).joinpath(stem + ".json")
    if not entry.is_file():
        raise errors.ParseError(f"no builtin {kind[:-1] if kind != 'complexes' else 'complex'} named {stem!r}")
    return json.loads(entry.read_text(encoding="utf-8"))


def complex_named(name: str) -> FilteredComplex:
    return build_complex(raw("complexes", name))


def perversity_named(name: str, X: FilteredComplex) -> Perversity:
    return perversity_from_dict(X, raw("perversities", name))


def equivalence_named(name: str) -> EquivalenceDeclaration:
    return equivalence_from_dict(raw("equivalences", name))
