"""Deterministic execution loop and trace replay.

One step: the scheduler releases due messages to the player whose turn it
is, the player ingests the batch and then moves.  Within a batch,
exposures land first, then relays, proposals, votes and decisions, with
digests breaking ties; every ordering choice is fixed so a run is a pure
function of its configuration.

Traces are JSON lines: a header with the full configuration, one record
per step that saw traffic, and a footer with the verdict.  Replaying a
trace re-executes the header configuration and demands a bit-identical
record stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InvalidTrace, ReplayDivergence
from .model import (
    Decide,
    DefaultMove,
    Expose,
    Malformed,
    Propose,
    Relay,
    ScenarioConfig,
    SignatureScheme,
    SignedMessage,
    Vote,
    canonical_json,
)
from .protocol import PlayerState, ProtocolParams
from .scheduler import Scheduler, chosen_player
from .strategies import BaitBehavior, build_behavior, extract_plan, is_deviating

KIND_PRIORITY = {
    Expose: 0,
    Relay: 1,
    Propose: 2,
    Vote: 3,
    Decide: 4,
    DefaultMove: 5,
    Malformed: 5,
}

AGREEMENT = "Agreement"
DISAGREEMENT = "Disagreement"
NON_TERMINATION = "NonTermination"


def batch_key(msg: SignedMessage) -> tuple:
    return (KIND_PRIORITY[type(msg.body)], msg.digest)


@dataclass(frozen=True)
class TraceRecord:
    step: int
    chosen: int
    delivered: tuple
    emitted: tuple  # ((digest, recipients), ...)
    state: str
    crashed: bool

    def to_wire(self) -> dict:
        return {
            "kind": "step",
            "step": self.step,
            "chosen": self.chosen,
            "delivered": list(self.delivered),
            "emitted": [[d, list(r)] for d, r in self.emitted],
            "state": self.state,
            "crashed": self.crashed,
        }

    @staticmethod
    def from_wire(doc: dict) -> "TraceRecord":
        try:
            return TraceRecord(
                step=int(doc["step"]),
                chosen=int(doc["chosen"]),
                delivered=tuple(doc["delivered"]),
                emitted=tuple((d, tuple(r)) for d, r in doc["emitted"]),
                state=str(doc["state"]),
                crashed=bool(doc["crashed"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidTrace(f"malformed step record: {exc}") from exc


@dataclass
class RunResult:
    cfg: ScenarioConfig
    outcome: str
    decisions: dict  # player -> value for every player that decided
    decided_rounds: dict
    crashed: dict  # player -> crash step
    exposures: list  # (step, exposer, proof)
    blacklists: dict  # player -> frozenset of excluded players
    deviating: frozenset
    records: list = field(default_factory=list)
    last_step: int = 0
    emissions: list = field(default_factory=list)  # (digest, recipient, sent_at)
    deliveries: list = field(default_factory=list)  # (digest, recipient, step)

    def non_deviating(self) -> list:
        return [p for p in self.cfg.players if p not in self.deviating]


def classify(cfg: ScenarioConfig, decisions: dict, crashed: dict, deviating) -> str:
    """Disagreement beats NonTermination beats Agreement.

    Crashed players that decided before crashing count: a decision is a
    decision.  Deviating players' decisions never count against anyone.
    """
    honest = [p for p in cfg.players if p not in deviating]
    values = {decisions[p] for p in honest if p in decisions}
    if len(values) > 1:
        return DISAGREEMENT
    if any(p not in decisions and p not in crashed for p in honest):
        return NON_TERMINATION
    return AGREEMENT


def run(cfg: ScenarioConfig) -> RunResult:
    cfg.validate()
    scheme = SignatureScheme(cfg.seed)
    params = ProtocolParams(
        n=cfg.n,
        quorum_r=cfg.quorum_r,
        max_rounds=cfg.max_rounds,
        round_window=cfg.round_window,
        punishment=cfg.baiting or cfg.protocol == "hardened",
    )
    states = {
        p: PlayerState(p, params, scheme, scheme.signer(p), cfg.values[p])
        for p in cfg.players
    }
    plan = extract_plan(cfg, scheme)
    behaviors = {
        p: build_behavior(cfg, p, states[p], scheme, plan) for p in cfg.players
    }
    deviating = frozenset(
        p for p in cfg.players if is_deviating(cfg.role_of(p).strategy)
    )
    honest = [p for p in cfg.players if p not in deviating]
    baiters = [b for b in behaviors.values() if isinstance(b, BaitBehavior)]

    scheduler = Scheduler(cfg)
    registry: dict[str, SignedMessage] = {}
    crashed: dict = {}
    exposures: list = []
    records: list = []
    emissions: list = []
    deliveries: list = []
    last_step = 0
    # with punishment on, deadline-held evidence plus one relay hop must
    # still land after the last decision, so the exit waits two delivery
    # bounds plus a rotation of turn slack
    grace = 2 * cfg.delta + 2 * cfg.n if params.punishment else 0
    settled_at = None

    for step in range(cfg.horizon):
        who = chosen_player(step, cfg.n)
        behavior = behaviors[who]
        if who in crashed:
            continue
        last_step = step
        due = scheduler.due(step)
        batch = sorted((registry[d] for d in due), key=batch_key)
        if batch:
            behavior.deliver(batch, step)
            deliveries.extend((m.digest, who, step) for m in batch)
        emitted = behavior.turn(step)
        was_crash = behavior.crashed
        for msg, recipients in emitted:
            registry.setdefault(msg.digest, msg)
            if isinstance(msg.body, Expose):
                exposures.append((step, who, msg.body.proof))
            for recipient in recipients:
                emissions.append((msg.digest, recipient, step))
                if recipient != who and recipient not in crashed:
                    scheduler.submit(msg.digest, who, recipient, step)
        if was_crash:
            crashed[who] = step
            scheduler.drop_for(who)
        if batch or emitted or was_crash:
            records.append(
                TraceRecord(
                    step=step,
                    chosen=who,
                    delivered=tuple(m.digest for m in batch),
                    emitted=tuple((m.digest, tuple(r)) for m, r in emitted),
                    state=states[who].digest(),
                    crashed=was_crash,
                )
            )
        settled = all(
            states[p].decided is not None or p in crashed for p in honest
        ) and all(b.revealed for b in baiters)
        if settled and settled_at is None:
            settled_at = step
        if settled and step >= (settled_at or 0) + grace:
            break

    decisions = {
        p: states[p].decided for p in cfg.players if states[p].decided is not None
    }
    decided_rounds = {
        p: states[p].decided_round
        for p in cfg.players
        if states[p].decided is not None
    }
    outcome = classify(cfg, decisions, crashed, deviating)
    blacklists = {p: frozenset(states[p].excluded) for p in cfg.players}
    return RunResult(
        cfg=cfg,
        outcome=outcome,
        decisions=decisions,
        decided_rounds=decided_rounds,
        crashed=crashed,
        exposures=exposures,
        blacklists=blacklists,
        deviating=deviating,
        records=records,
        last_step=last_step,
        emissions=emissions,
        deliveries=deliveries,
    )


# ---------------------------------------------------------------------------
# traces


def write_trace(result: RunResult) -> str:
    lines = [
        canonical_json({"kind": "header", "format": 1, "config": result.cfg.to_wire()})
    ]
    lines.extend(canonical_json(r.to_wire()) for r in result.records)
    lines.append(
        canonical_json(
            {
                "kind": "footer",
                "outcome": result.outcome,
                "decisions": {str(p): v for p, v in sorted(result.decisions.items())},
                "last_step": result.last_step,
            }
        )
    )
    return "\n".join(lines) + "\n"


def parse_trace(text: str):
    """Split a trace into (config, records, footer); InvalidTrace on garbage."""
    docs = []
    for i, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            docs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise InvalidTrace(f"line {i + 1} is not JSON: {exc}") from exc
    if not docs or docs[0].get("kind") != "header":
        raise InvalidTrace("trace does not start with a header record")
    if docs[0].get("format") != 1:
        raise InvalidTrace(f"unsupported trace format {docs[0].get('format')!r}")
    if docs[-1].get("kind") != "footer":
        raise InvalidTrace("trace does not end with a footer record")
    cfg = ScenarioConfig.from_wire(docs[0].get("config", {}))
    records = [TraceRecord.from_wire(d) for d in docs[1:-1] if d.get("kind") == "step"]
    if len(records) != len(docs) - 2:
        raise InvalidTrace("unexpected record kind between header and footer")
    return cfg, records, docs[-1]


def replay(text: str) -> RunResult:
    """Re-execute a trace's configuration and demand identical records."""
    cfg, records, footer = parse_trace(text)
    result = run(cfg)
    if len(result.records) != len(records):
        raise ReplayDivergence(
            f"recorded {len(records)} step records, replay produced {len(result.records)}"
        )
    for old, new in zip(records, result.records):
        if old != new:
            raise ReplayDivergence(
                f"step {old.step}: recorded {old.to_wire()} but replay produced {new.to_wire()}"
            )
    if footer.get("outcome") != result.outcome:
        raise ReplayDivergence(
            f"recorded outcome {footer.get('outcome')}, replay produced {result.outcome}"
        )
    recorded = {int(p): v for p, v in footer.get("decisions", {}).items()}
    if recorded != result.decisions:
        raise ReplayDivergence("recorded decisions differ from replayed decisions")
    return result
