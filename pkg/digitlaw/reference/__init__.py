"""Pinned printed values used by ``digitlaw limits`` and the acceptance tests."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import yaml
from pydantic import BaseModel, Field


class WorkedExample(BaseModel):
    n: int
    p: int
    d: int
    value: float


class FigureValue(BaseModel):
    d: int
    p: int
    value: float
    tolerance: float = Field(gt=0)


class Erratum(BaseModel):
    """A printed cell that disagrees with the value it was computed from."""

    d: int = Field(ge=0, le=9)
    column: str
    printed: float
    corrected: float
    reason: str


class TableTargets(BaseModel):
    p: int = Field(ge=2)
    tolerance: float = Field(gt=0)
    window: int | None = None
    rows: dict[int, dict[str, float]]
    errata: list[Erratum] = Field(default_factory=list)

    def erratum(self, d: int, column: str) -> Erratum | None:
        for entry in self.errata:
            if entry.d == d and entry.column == column:
                return entry
        return None

    def printed(self, d: int, column: str) -> float | None:
        """The value as published, misprints included."""
        return self.rows.get(d, {}).get(column)

    def target(self, d: int, column: str) -> float | None:
        """The value to check against: the published one unless an erratum corrects it."""
        entry = self.erratum(d, column)
        if entry is not None:
            return entry.corrected
        return self.printed(d, column)


class ReferenceTables(BaseModel):
    worked_examples: list[WorkedExample]
    figure_central: FigureValue
    alpha: list[TableTargets]
    alpha_sub: list[TableTargets]
    central: list[TableTargets]

    def find(self, kind: str, p: int, window: int | None = None) -> TableTargets | None:
        """Targets for a limit table kind (``alpha``, ``alpha-sub``, ``central``, ``hill``)."""
        if kind == "alpha":
            candidates = self.alpha
        elif kind == "alpha-sub":
            candidates = [t for t in self.alpha_sub if window is None or t.window == window]
        elif kind in ("central", "hill"):
            candidates = self.central
        else:
            return None
        for table in candidates:
            if table.p == p:
                return table
        return None


@lru_cache(maxsize=1)
def load_tables() -> ReferenceTables:
    text = resources.files(__package__).joinpath("tables.yaml").read_text(encoding="utf-8")
    return ReferenceTables.model_validate(yaml.safe_load(text))
