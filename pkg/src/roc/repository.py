"""File-backed case repository: one canonical ``.roc`` file of case blocks."""

from __future__ import annotations

import os
import tempfile
from dataclasses import replace
from pathlib import Path

from .cbr import DEFAULT_WEIGHTS, Case, SimilarityWeights, retrieve
from .dsl import Workspace, parse, print_workspace
from .errors import CaseError, UnknownIdError

ENV_VAR = "ROC_REPO"


class Repository:
    def __init__(self, path, weights: SimilarityWeights = DEFAULT_WEIGHTS):
        self.path = Path(path)
        self.weights = weights
        self._ws = self._read()

    @classmethod
    def from_env(cls, path=None, **kw) -> "Repository":
        path = path or os.environ.get(ENV_VAR)
        if not path:
            raise CaseError(f"no repository given; pass a path or set {ENV_VAR}")
        return cls(path, **kw)

    def _read(self) -> Workspace:
        if not self.path.exists():
            return Workspace()
        return parse(self.path.read_text(encoding="utf-8"))

    def reload(self) -> None:
        self._ws = self._read()

    @property
    def cases(self) -> list[Case]:
        return [self._ws.cases[k] for k in sorted(self._ws.cases)]

    def __len__(self):
        return len(self._ws.cases)

    def __contains__(self, case_id):
        return case_id in self._ws.cases

    def get(self, case_id: str) -> Case:
        if case_id not in self._ws.cases:
            raise UnknownIdError("case", case_id)
        return self._ws.cases[case_id]

    def retrieve(self, query: Case, k: int = 5):
        return retrieve(self.cases, query, k, self.weights)

    def retain(self, case: Case) -> None:
        """Add a solved case and rewrite the file; the repository is unchanged on error."""
        if case.id in self._ws.cases:
            raise CaseError(f"case id {case.id!r} is already in {self.path}")
        if not case.asis_fragments or not case.tobe_fragments:
            raise CaseError(f"case {case.id!r} is unsolved: retained cases need As-Is and To-Be fragments")
        if not case.component_map:
            raise CaseError(f"case {case.id!r} has no component map")
        ws = replace(self._ws, cases={**self._ws.cases, case.id: case})
        _atomic_write(self.path, print_workspace(ws))
        self._ws = ws


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name, dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
