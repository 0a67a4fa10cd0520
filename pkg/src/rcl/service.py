"""HTTP surface over the simulator: run, sweep, suite checks, replay.

Thin by design: every endpoint parses a strict request model, calls the
corresponding library function, and serializes the result.  Domain
errors map to stable HTTP codes via their ``code`` attribute so clients
can branch without string matching.
"""

from __future__ import annotations

from dataclasses import replace

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .analysis import assign_utilities
from .corpus import corpus_names, load_scenario
from .engine import replay, run, write_trace
from .errors import RclError
from .model import ScenarioConfig
from .schemas import (
    CheckTheoremRequest,
    CheckTheoremResponse,
    CellReport,
    HealthResponse,
    ReplayRequest,
    ReplayResponse,
    RunRequest,
    RunResponse,
    SweepRequest,
    SweepResponse,
    SweepRow,
)
from .suites import check_theorem, sweep

# HTTP status per domain error code; anything unlisted is a 422 because
# it signals a rejected input rather than a server fault
_STATUS = {
    "cap_exceeded": 413,
    "replay_divergence": 409,
}


def _scenario_of(req: RunRequest) -> ScenarioConfig:
    if req.name is not None:
        cfg = load_scenario(req.name)
    else:
        cfg = ScenarioConfig.from_wire(req.scenario)
    if req.seed is not None and req.seed != cfg.seed:
        cfg = replace(cfg, seed=req.seed)
        cfg.validate()
    return cfg


def create_app() -> FastAPI:
    app = FastAPI(title="consensus-game simulator", docs_url=None, redoc_url=None)

    @app.exception_handler(RclError)
    async def domain_error(request: Request, exc: RclError):
        return JSONResponse(
            status_code=_STATUS.get(exc.code, 422),
            content={"error": exc.code, "detail": str(exc)},
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", scenarios=corpus_names())

    @app.post("/run", response_model=RunResponse)
    def run_endpoint(req: RunRequest) -> RunResponse:
        cfg = _scenario_of(req)
        result = run(cfg)
        utilities = assign_utilities(result, cfg.utility)
        return RunResponse(
            outcome=result.outcome,
            last_step=result.last_step,
            config_digest=cfg.digest(),
            decisions=dict(result.decisions),
            decided_rounds=dict(result.decided_rounds),
            crashed=dict(result.crashed),
            blacklists={p: sorted(b) for p, b in result.blacklists.items()},
            exposed=sorted({proof.culprit for _, _, proof in result.exposures}),
            utilities=utilities,
            trace=write_trace(result),
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(req: SweepRequest) -> SweepResponse:
        result = sweep(
            max_n=req.max_n,
            property_name=req.property,
            baiting=req.baiting,
            protocol=req.protocol,
            valuation_name=req.valuation,
            seeds=tuple(req.seeds),
            quorum_delta=req.quorum_delta,
            cap=req.cap,
            force=req.force,
            threads=req.threads,
        )
        return SweepResponse(
            csv=result.to_csv(),
            rows=[SweepRow(**row) for row in result.rows],
            witnesses={wid: cfg.to_wire() for wid, cfg in result.registry.items()},
        )

    @app.post("/check-theorem", response_model=CheckTheoremResponse)
    def check_endpoint(req: CheckTheoremRequest) -> CheckTheoremResponse:
        result = check_theorem(
            req.name,
            max_n=req.max_n,
            quorum_delta=req.quorum_delta,
            seeds=tuple(req.seeds),
            threads=req.threads,
        )
        return CheckTheoremResponse(
            suite=result.name,
            passed=result.passed,
            cells=[CellReport(**c.to_wire()) for c in result.cells],
            witnesses={
                wid: cfg.to_wire() for wid, cfg in result.registry().items()
            },
        )

    @app.post("/replay", response_model=ReplayResponse)
    def replay_endpoint(req: ReplayRequest) -> ReplayResponse:
        result = replay(req.trace)
        return ReplayResponse(
            ok=True,
            outcome=result.outcome,
            steps=len(result.records),
            config_digest=result.cfg.digest(),
        )

    return app


app = create_app()
