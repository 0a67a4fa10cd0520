"""Request and response documents for the HTTP surface.

Every model rejects unknown fields so a typo in a scenario or a request
never silently degrades into defaults.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RunRequest(StrictModel):
    """Execute one scenario: either an inline document or a bundled name."""

    scenario: Optional[dict] = None
    name: Optional[str] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.scenario is None) == (self.name is None):
            raise ValueError("provide exactly one of 'scenario' or 'name'")
        return self


class RunResponse(StrictModel):
    outcome: str
    last_step: int
    config_digest: str
    decisions: dict[int, str]
    decided_rounds: dict[int, int]
    crashed: dict[int, int]
    blacklists: dict[int, list[int]]
    exposed: list[int]
    utilities: dict[int, float]
    trace: str


class SweepRequest(StrictModel):
    max_n: int = 8
    property: str = "ktCrashRobustness"
    baiting: bool = False
    protocol: str = "base"
    valuation: str = "default"
    seeds: list[int] = Field(default_factory=lambda: [0])
    quorum_delta: int = 0
    cap: Optional[int] = None
    force: bool = False
    threads: Optional[int] = None


class SweepRow(StrictModel):
    n: int
    k: int
    t: int
    r: int
    property: str
    verdict: str
    witness_id: str = Field(alias="witness-id")
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class SweepResponse(StrictModel):
    csv: str
    rows: list[SweepRow]
    witnesses: dict[str, dict]


class CheckTheoremRequest(StrictModel):
    name: str
    max_n: int = 8
    quorum_delta: int = 0
    seeds: list[int] = Field(default_factory=lambda: [0])
    threads: Optional[int] = None


class CellReport(StrictModel):
    cell: dict
    expected: str
    actual: str
    ok: bool
    note: str = ""
    witness_id: str = Field(default="", alias="witness-id")
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class CheckTheoremResponse(StrictModel):
    suite: str
    passed: bool
    cells: list[CellReport]
    witnesses: dict[str, dict]


class ReplayRequest(StrictModel):
    trace: str


class ReplayResponse(StrictModel):
    ok: bool
    outcome: str
    steps: int
    config_digest: str


class HealthResponse(StrictModel):
    status: str
    scenarios: list[str]


class ErrorBody(StrictModel):
    error: str
    detail: str
