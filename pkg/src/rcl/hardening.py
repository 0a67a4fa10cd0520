"""Hardened wrapper around the base protocol.

The wrapper adds three things to a player that otherwise follows the base
rules: it screens incoming traffic (signatures checked, malformed bodies
dropped, blacklisted senders cut off), it mines everything it sees for
equivocation evidence and excludes convicted players, and it re-relays
every original message it receives so that split-world traffic reaches
both worlds.  One relay hop per original per player is enough for any two
recipients of conflicting messages to convict the sender, and the per
player dedup keeps total traffic bounded.
"""

from __future__ import annotations

from .model import (
    Decide,
    DefaultMove,
    EquivocationProof,
    Expose,
    Malformed,
    PlayerId,
    Propose,
    Relay,
    SignatureScheme,
    SignedMessage,
    Vote,
    detect_equivocation,
    valid_proof,
)
from .protocol import PlayerState


class ExtensionState:
    """Evidence tables and relay bookkeeping for one hardened player."""

    def __init__(self, player: PlayerId, scheme: SignatureScheme, relay_budget: int):
        self.player = player
        self.scheme = scheme
        self.relay_budget = relay_budget
        self.proofs: dict[PlayerId, EquivocationProof] = {}
        self.evidence: dict = {}  # (round, kind, sender) -> value -> SignedMessage
        self.relayed: set = set()
        self.relay_queue: list = []
        self.announce_queue: list = []  # fresh convictions awaiting broadcast

    def blacklist(self) -> list:
        return sorted(self.proofs)


def blacklist_of(ext: ExtensionState) -> list:
    return ext.blacklist()


def harden_ingest(ext: ExtensionState, state: PlayerState, msgs: list, now: int) -> None:
    """Screen, mine and forward one delivered batch, in delivery order."""
    for msg in msgs:
        if not ext.scheme.verify(msg):
            continue
        if isinstance(msg.body, (Malformed, DefaultMove)):
            continue
        if msg.sender in state.excluded:
            continue
        if isinstance(msg.body, Relay):
            inner = msg.body.inner
            if not ext.scheme.verify(inner):
                continue
            _mine(ext, state, inner)
            _enqueue_relay(ext, inner)
            if inner.sender not in state.excluded:
                state.ingest(inner, now)
            continue
        _mine(ext, state, msg)
        _enqueue_relay(ext, msg)
        if isinstance(msg.body, Expose) and valid_proof(ext.scheme, msg.body.proof):
            _convict(ext, state, msg.body.proof)
        state.ingest(msg, now)


def harden_act(ext: ExtensionState, state: PlayerState, now: int) -> list:
    """The base protocol turn plus this turn's share of the relay queue.

    Fresh convictions are announced once so the slash lands publicly;
    a blacklist alone would leave equivocation unpunished."""
    out = state.act(now)
    others = tuple(p for p in range(state.params.n) if p != state.player)
    for proof in ext.announce_queue:
        out.append((state.signer.sign(Expose(proof)), others))
    ext.announce_queue = []
    ext.relay_queue.sort(key=lambda m: m.digest)
    burst, ext.relay_queue = ext.relay_queue[: ext.relay_budget], ext.relay_queue[ext.relay_budget:]
    for inner in burst:
        out.append((state.signer.sign(Relay(inner)), others))
    return out


def _enqueue_relay(ext: ExtensionState, original: SignedMessage) -> None:
    if original.sender == ext.player:
        return
    if original.digest in ext.relayed:
        return
    ext.relayed.add(original.digest)
    ext.relay_queue.append(original)


def _mine(ext: ExtensionState, state: PlayerState, msg: SignedMessage) -> None:
    """Recursively extract statements and look for conflicting pairs."""
    body = msg.body
    if isinstance(body, (Vote, Propose)):
        kind = "vote" if isinstance(body, Vote) else "propose"
        key = (body.round, kind, msg.sender)
        table = ext.evidence.setdefault(key, {})
        if body.value not in table:
            for prior in list(table.values()):
                proof = detect_equivocation(ext.scheme, prior, msg)
                if proof is not None:
                    _convict(ext, state, proof)
                    break
            table[body.value] = msg
    elif isinstance(body, Decide):
        for vote in body.justification:
            if ext.scheme.verify(vote):
                _mine(ext, state, vote)
    elif isinstance(body, Expose):
        if ext.scheme.verify(body.proof.first):
            _mine(ext, state, body.proof.first)
        if ext.scheme.verify(body.proof.second):
            _mine(ext, state, body.proof.second)
    elif isinstance(body, Relay):
        if ext.scheme.verify(body.inner):
            _mine(ext, state, body.inner)


def _convict(ext: ExtensionState, state: PlayerState, proof: EquivocationProof) -> None:
    if proof.culprit in ext.proofs:
        return
    ext.proofs[proof.culprit] = proof
    ext.announce_queue.append(proof)
    state.apply_exclusion(proof.culprit)
