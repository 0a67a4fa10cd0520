"""Rotating-leader one-shot agreement with quorum certificates.

Round arithmetic is driven by the global clock: round(now) = now divided
by the round window, and the leader of round rho is player rho mod n.  A
window of 12n steps gives a proposal time to reach every player, every
vote time to circulate back, and a resulting decision time to spread,
all inside the round it belongs to.  Self-decision therefore only ever
counts votes of the current round; decisions travel across rounds only
as certificates, which anyone can verify from signatures alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InvalidBudget, NoImmuneQuorum
from .model import (
    Decide,
    Expose,
    MessageBody,
    PlayerId,
    Propose,
    SignatureScheme,
    SignedMessage,
    Signer,
    Vote,
    digest_of,
    valid_proof,
)


@dataclass(frozen=True)
class ProtocolParams:
    n: int
    quorum_r: int
    max_rounds: int
    round_window: int
    punishment: bool = False

    def leader(self, rho: int) -> PlayerId:
        return rho % self.n

    def round_of(self, now: int) -> int:
        return now // self.round_window


def default_params(n: int, quorum_r: int, *, punishment: bool = False) -> ProtocolParams:
    return ProtocolParams(n, quorum_r, n, 12 * n, punishment)


def cft_params(n: int, t: int) -> ProtocolParams:
    """Largest quorum that t crashes cannot block: r = n - t.

    Safety needs two quorums to intersect, i.e. 2r > n, which fails as
    soon as 2t >= n.
    """
    if n < 2 or t < 0:
        raise InvalidBudget(f"bad sizes n={n} t={t}")
    if 2 * t >= n:
        raise InvalidBudget(f"crash budget t={t} too large for n={n}: need 2t < n")
    return default_params(n, n - t)


def immune_params(n: int, s: int) -> ProtocolParams:
    """Smallest quorum that s deviators can neither fork nor block.

    Needs (n + s) / 2 < r so two quorums overlap in a non-deviator, and
    r <= n - s so the non-deviators alone can still reach r.  The window
    is nonempty exactly when n > 3s.
    """
    if n < 2 or s < 0:
        raise NoImmuneQuorum(f"bad sizes n={n} s={s}")
    lo = (n + s) // 2 + 1
    hi = n - s
    if lo > hi:
        raise NoImmuneQuorum(f"no quorum survives s={s} deviators among n={n}: need n > 3s")
    return default_params(n, lo, punishment=True)


def check_decision(
    scheme: SignatureScheme, value: str, justification: tuple, quorum_r: int
) -> Optional[int]:
    """Validate a decision certificate; return its round, or None.

    A certificate is a quorum of verified votes from distinct senders,
    all for the decided value in one round.  Validation is purely
    cryptographic so certificates keep working after their signers are
    excluded; that is what lets a decision outrun a blacklist.
    """
    senders = set()
    rounds = set()
    for msg in justification:
        if not isinstance(msg.body, Vote):
            return None
        if msg.body.value != value:
            return None
        if not scheme.verify(msg):
            return None
        senders.add(msg.sender)
        rounds.add(msg.body.round)
    if len(rounds) != 1 or len(senders) < quorum_r:
        return None
    return rounds.pop()


class PlayerState:
    """Protocol-visible state of one player."""

    def __init__(
        self,
        player: PlayerId,
        params: ProtocolParams,
        scheme: SignatureScheme,
        signer: Signer,
        my_value: str,
    ):
        self.player = player
        self.params = params
        self.scheme = scheme
        self.signer = signer
        self.my_value = my_value
        self.decided: Optional[str] = None
        self.decided_round: Optional[int] = None
        self.decision_cert: tuple = ()
        self.decide_sent = False
        self.proposals: dict = {}  # round -> sender -> SignedMessage
        self.votes: dict = {}  # (round, value) -> sender -> SignedMessage
        self.voted: set = set()
        self.proposed: set = set()
        self.excluded: set = set()

    # -- ingestion ---------------------------------------------------------

    def ingest(self, msg: SignedMessage, now: int) -> None:
        if not self.scheme.verify(msg):
            return
        body = msg.body
        if isinstance(body, Propose):
            if msg.sender in self.excluded:
                return
            self.proposals.setdefault(body.round, {}).setdefault(msg.sender, msg)
        elif isinstance(body, Vote):
            if msg.sender in self.excluded:
                return
            self.votes.setdefault((body.round, body.value), {}).setdefault(msg.sender, msg)
        elif isinstance(body, Decide):
            # a player whose own view already holds a quorum prefers it
            # over a foreign certificate arriving in the same batch
            if self.decided is None:
                self._try_self_decide(self.params.round_of(now))
            self.try_adopt(body)
        elif isinstance(body, Expose):
            if self.params.punishment and valid_proof(self.scheme, body.proof):
                self.apply_exclusion(body.proof.culprit)
        # Relay is unwrapped by the hardening layer; Malformed and
        # DefaultMove carry no protocol meaning here.

    def try_adopt(self, body: Decide) -> bool:
        if self.decided is not None:
            return False
        rho = check_decision(self.scheme, body.value, body.justification, self.params.quorum_r)
        if rho is None:
            return False
        self._decide(body.value, rho, body.justification)
        return True

    def apply_exclusion(self, culprit: PlayerId) -> None:
        """Blacklist culprit; undecided players also void its recorded words."""
        self.excluded.add(culprit)
        if self.decided is not None:
            return
        for table in self.proposals.values():
            table.pop(culprit, None)
        for table in self.votes.values():
            table.pop(culprit, None)

    # -- acting ------------------------------------------------------------

    def act(self, now: int):
        """One protocol turn; returns (message, recipients) emissions."""
        out = []
        if self.decided is not None:
            self._flush_decide(out)
            return out
        rho = self.params.round_of(now)
        if rho >= self.params.max_rounds:
            return out
        self._try_self_decide(rho)
        if self.decided is not None:
            self._flush_decide(out)
            return out
        if self.params.leader(rho) == self.player and rho not in self.proposed:
            self.proposed.add(rho)
            msg = self.signer.sign(Propose(rho, self.my_value))
            self.proposals.setdefault(rho, {}).setdefault(self.player, msg)
            out.append((msg, self._others()))
        if rho not in self.voted:
            prop = self._current_proposal(rho)
            if prop is not None:
                self.voted.add(rho)
                msg = self.signer.sign(Vote(rho, prop.body.value))
                self.votes.setdefault((rho, prop.body.value), {}).setdefault(self.player, msg)
                out.append((msg, self._others()))
        self._try_self_decide(rho)
        if self.decided is not None:
            self._flush_decide(out)
        return out

    def _current_proposal(self, rho: int) -> Optional[SignedMessage]:
        leader = self.params.leader(rho)
        if leader in self.excluded:
            return None
        return self.proposals.get(rho, {}).get(leader)

    def _try_self_decide(self, rho: int) -> None:
        candidates = []
        for (round_, value), table in self.votes.items():
            if round_ != rho or len(table) < self.params.quorum_r:
                continue
            candidates.append(value)
        if not candidates:
            return
        value = min(candidates)  # deterministic when equivocators fork the round
        table = self.votes[(rho, value)]
        cert = tuple(table[s] for s in sorted(table)[: self.params.quorum_r])
        self._decide(value, rho, cert)

    def _decide(self, value: str, rho: int, cert: tuple) -> None:
        self.decided = value
        self.decided_round = rho
        self.decision_cert = cert
        self.decide_sent = False

    def _flush_decide(self, out: list) -> None:
        if not self.decide_sent:
            self.decide_sent = True
            msg = self.signer.sign(Decide(self.decided, self.decision_cert))
            out.append((msg, self._others()))

    def _others(self) -> tuple:
        return tuple(p for p in range(self.params.n) if p != self.player)

    # -- inspection --------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "player": self.player,
            "decided": self.decided,
            "decided_round": self.decided_round,
            "decide_sent": self.decide_sent,
            "voted": sorted(self.voted),
            "proposed": sorted(self.proposed),
            "excluded": sorted(self.excluded),
            "proposals": sorted(
                (rho, sender, m.body.value)
                for rho, table in self.proposals.items()
                for sender, m in table.items()
            ),
            "votes": sorted(
                (rho, value, sender)
                for (rho, value), table in self.votes.items()
                for sender in table
            ),
        }

    def digest(self) -> str:
        return digest_of(self.snapshot())
