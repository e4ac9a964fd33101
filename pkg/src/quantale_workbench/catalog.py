"""Named example structures shipped as JSON files in ``data/``.

The file stem is the entry name.  Modules refer to their quantales by name;
references are resolved through the catalog itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import UnknownName

KINDS = ("lattice", "quantale", "module", "bimodule")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    payload: dict
    note: str


def _data_dir():
    return resources.files(__package__) / "data"


@lru_cache(maxsize=None)
def _entries() -> dict[str, CatalogEntry]:
    out = {}
    for item in _data_dir().iterdir():
        if not item.name.endswith(".json"):
            continue
        payload = json.loads(item.read_text(encoding="utf-8"))
        name = item.name[: -len(".json")]
        out[name] = CatalogEntry(name, payload["kind"], payload, payload.get("note", ""))
    return out


def entry(name: str) -> CatalogEntry:
    try:
        return _entries()[name]
    except KeyError:
        raise UnknownName(f"no catalog entry named {name!r}") from None


def names(kind: str | None = None) -> list[str]:
    """Entry names in sorted order, optionally restricted to one kind."""
    if kind is not None and kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    return sorted(n for n, e in _entries().items() if kind is None or e.kind == kind)


@lru_cache(maxsize=None)
def load(name: str):
    """Validated structure for a catalog entry."""
    from .serialize import parse_obj

    e = entry(name)
    text = (_data_dir() / f"{name}.json").read_text(encoding="utf-8")
    return parse_obj(e.payload, load, text)
