"""Small helpers used by several modules."""

from __future__ import annotations

import re
from dataclasses import dataclass

_DIGITS = re.compile(r"(\d+)")
_SPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class Violation:
    code: str
    element: str
    message: str

    def __str__(self):
        return f"{self.code} [{self.element}]: {self.message}"


def natural_key(ident: str):
    """Sort key that orders ``t2`` before ``t10``."""
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in _DIGITS.split(ident) if p)


def collapse(text: str) -> str:
    return _SPACE.sub(" ", text).strip()


def normalize_label(text: str) -> str:
    """Canonical key for a state label: lowercase, single spaces, outer parentheses removed."""
    s = collapse(text).lower()
    while _wrapped(s):
        s = s[1:-1].strip()
    return s


def _wrapped(s: str) -> bool:
    if len(s) < 2 or s[0] != "(" or s[-1] != ")":
        return False
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and i != len(s) - 1:
                return False
    return depth == 0


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)
