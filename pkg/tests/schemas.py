"""JSON Schema validators for the shipped v1 schemas."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

BASE = "https://quantale-workbench.invalid/schema/v1/"


@lru_cache(maxsize=None)
def registry() -> Registry:
    folder = resources.files("quantale_workbench") / "schema" / "v1"
    res = []
    for item in folder.iterdir():
        if item.name.endswith(".json"):
            doc = json.loads(item.read_text(encoding="utf-8"))
            res.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(res)


def validator(name: str) -> Draft202012Validator:
    schema = registry().contents(BASE + name + ".json")
    return Draft202012Validator(schema, registry=registry())


def check(name: str, doc) -> None:
    validator(name).validate(doc)
