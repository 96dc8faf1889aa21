"""JSON Schema documents for every file format the tool reads or writes."""

from __future__ import annotations

import functools
import json
from importlib import resources

import jsonschema

from ..errors import DocumentError

SCHEMA_NAMES = ("specification", "model", "catalog", "report")


@functools.lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(name)
    text = resources.files(__package__).joinpath(f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_document(document, name: str) -> None:
    """Raise :class:`DocumentError` unless ``document`` matches schema ``name``."""
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise DocumentError("SCHEMA_MISMATCH", f"{name} document at {where}: {first.message}")
