"""Message scheduling under a private delivery bound.

The scheduler owns the network.  Time advances in steps; at step s the
player s mod n takes its turn, so the steps congruent to j mod n are
exactly player j's turns.  A message to j is therefore released on one of
j's turns, no earlier than the first turn after it was sent and no later
than the last turn within the delivery bound.  Policies pick the slot
inside that window and nothing else, which keeps the bound and the
fairness guarantee true for every policy by construction.

Deliveries are per (message digest, recipient): a pair is delivered at
most once no matter how many times it is re-sent.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import ConstraintUnsatisfiable, InvalidTrace
from .model import (
    PartitionSpec,
    PlayerId,
    PolicySpec,
    RandomSpec,
    RoundRobinSpec,
    ScenarioConfig,
)


def chosen_player(step: int, n: int) -> PlayerId:
    return step % n


def earliest_slot(sent_at: int, recipient: PlayerId, n: int) -> int:
    """First turn of recipient strictly after sent_at."""
    return sent_at + 1 + ((recipient - sent_at - 1) % n)


def deadline_slot(sent_at: int, recipient: PlayerId, n: int, delta: int) -> int:
    """Last turn of recipient at or before sent_at + delta."""
    return sent_at + delta - ((sent_at + delta - recipient) % n)


@dataclass(frozen=True)
class PendingMessage:
    digest: str
    sender: PlayerId
    recipient: PlayerId
    sent_at: int
    release: int


class Scheduler:
    def __init__(self, cfg: ScenarioConfig):
        self.n = cfg.n
        self.delta = cfg.delta
        self.policy = cfg.policy
        self._pool: dict[tuple, PendingMessage] = {}
        self._done: set = set()

    def submit(self, digest: str, sender: PlayerId, recipient: PlayerId, sent_at: int) -> None:
        key = (digest, recipient)
        if key in self._pool or key in self._done:
            return
        lo = earliest_slot(sent_at, recipient, self.n)
        hi = deadline_slot(sent_at, recipient, self.n, self.delta)
        if hi < lo:
            # cannot happen while delta >= n, which config validation enforces
            raise ConstraintUnsatisfiable(
                f"no slot for recipient {recipient} in ({sent_at}, {sent_at + self.delta}]"
            )
        release = _release_slot(self.policy, sender, recipient, digest, sent_at, lo, hi, self.n)
        self._pool[key] = PendingMessage(digest, sender, recipient, sent_at, release)

    def due(self, step: int) -> list:
        """Digests released to the chosen player at this step, sorted."""
        who = chosen_player(step, self.n)
        ready = [
            key
            for key, p in self._pool.items()
            if p.recipient == who and p.release <= step
        ]
        for key in ready:
            del self._pool[key]
            self._done.add(key)
        return sorted(digest for digest, _ in ready)

    def drop_for(self, player: PlayerId) -> None:
        """Discard undelivered traffic toward a permanently crashed player."""
        for key in [k for k, p in self._pool.items() if p.recipient == player]:
            del self._pool[key]

    def pending_toward(self, players) -> bool:
        targets = set(players)
        return any(p.recipient in targets for p in self._pool.values())

    def pending_count(self) -> int:
        return len(self._pool)


def _release_slot(
    policy: PolicySpec,
    sender: PlayerId,
    recipient: PlayerId,
    digest: str,
    sent_at: int,
    lo: int,
    hi: int,
    n: int,
) -> int:
    if isinstance(policy, RoundRobinSpec):
        return lo
    if isinstance(policy, PartitionSpec):
        a, b = set(policy.group_a), set(policy.group_b)
        cross = (sender in a and recipient in b) or (sender in b and recipient in a)
        return hi if cross else lo
    if isinstance(policy, RandomSpec):
        slots = (hi - lo) // n + 1
        h = hashlib.sha256(f"{policy.seed}|{digest}|{recipient}|{sent_at}".encode()).digest()
        return lo + n * (int.from_bytes(h[:8], "big") % slots)
    raise ConstraintUnsatisfiable(f"unknown policy {policy!r}")


def validate_schedule(
    cfg: ScenarioConfig,
    emissions: list,
    deliveries: list,
    crash_steps: dict,
    last_step: int,
) -> None:
    """Check a finished run's delivery pattern against the network contract.

    emissions: (digest, recipient, sent_at) tuples, possibly repeated.
    deliveries: (digest, recipient, step) tuples.
    crash_steps: player -> step of permanent silence, for players that crashed.
    Raises InvalidTrace on any violation.
    """
    n, delta = cfg.n, cfg.delta
    first_sent: dict[tuple, int] = {}
    for digest, recipient, sent_at in emissions:
        key = (digest, recipient)
        if key not in first_sent or sent_at < first_sent[key]:
            first_sent[key] = sent_at
    seen: dict[tuple, int] = {}
    for digest, recipient, step in deliveries:
        key = (digest, recipient)
        if key in seen:
            raise InvalidTrace(f"duplicate delivery of {digest} to {recipient}")
        seen[key] = step
        if key not in first_sent:
            raise InvalidTrace(f"delivery of never-sent {digest} to {recipient}")
        sent = first_sent[key]
        if not sent < step <= sent + delta:
            raise InvalidTrace(
                f"{digest} to {recipient}: sent {sent}, delivered {step}, bound {delta}"
            )
        if chosen_player(step, n) != recipient:
            raise InvalidTrace(f"{digest} delivered to {recipient} off its turn at {step}")
    for key, sent in first_sent.items():
        if key in seen:
            continue
        digest, recipient = key
        deadline = deadline_slot(sent, recipient, n, delta)
        if deadline > last_step:
            continue  # run ended before the bound came due
        crashed = crash_steps.get(recipient)
        if crashed is not None and crashed <= deadline:
            continue  # recipient was gone; nothing owed
        raise InvalidTrace(f"{digest} to live {recipient} never delivered by {deadline}")


def validate_fairness(cfg: ScenarioConfig, chosen: list) -> None:
    """Every player takes a turn inside every fairness window of the run."""
    w = cfg.fairness_window
    for start in range(0, max(0, len(chosen) - w + 1)):
        window = set(chosen[start : start + w])
        missing = set(cfg.players) - window
        if missing:
            raise InvalidTrace(
                f"players {sorted(missing)} starved in window starting at {start}"
            )
