"""Bundled ``.roc`` workspaces for the Electro Tech and Geneva studies."""

from __future__ import annotations

from importlib import resources

NAMES = ("electro_tech", "geneva", "cases")


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.roc")


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str):
    from ..dsl import parse

    return parse(text(name))
