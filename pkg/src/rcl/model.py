"""Core domain model: players, payoffs, messages, signatures, scenarios.

Everything here is plain data with a canonical JSON wire form.  Canonical
encoding matters twice: message digests (and therefore signatures and trace
records) are computed over it, and replay equality is digest equality, so
the encoding must be stable across processes.  Dicts are emitted with
sorted keys and no whitespace; sets never appear on the wire, only sorted
tuples.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .errors import ScenarioError

PlayerId = int


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest_of(obj) -> str:
    """64-bit content digest of a wire object, hex encoded."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


class RoleKind(str, Enum):
    CORRECT = "correct"
    RATIONAL = "rational"
    CRASH = "crash"
    BYZANTINE = "byzantine"


# ---------------------------------------------------------------------------
# payoffs


@dataclass(frozen=True)
class UtilityParams:
    """Payoff constants for one valuation.

    The ordering bait_reward > disagree_gain > agree > 0 > nonterm_penalty
    (and victim_penalty < 0, slash < victim_penalty) is what the analysis
    verdicts rely on; construction rejects any table that breaks it so a
    bad valuation cannot silently flip a report.
    """

    agree: float = 1.0
    disagree_gain: float = 10.0
    nonterm_penalty: float = -1.0
    victim_penalty: float = -5.0
    correct_follow: float = 1.0
    bait_reward: float = 12.0
    slash: float = -20.0

    def __post_init__(self):
        ok = (
            self.bait_reward > self.disagree_gain > self.agree > 0.0
            and self.nonterm_penalty < 0.0
            and self.victim_penalty < 0.0
            and self.slash < self.victim_penalty
            and self.correct_follow > 0.0
        )
        if not ok:
            raise ScenarioError(f"utility ordering violated: {self}")


VALUATIONS = {
    "default": UtilityParams(),
    "alternate": UtilityParams(
        agree=2.0,
        disagree_gain=50.0,
        nonterm_penalty=-2.0,
        victim_penalty=-7.0,
        correct_follow=3.0,
        bait_reward=55.0,
        slash=-80.0,
    ),
}


def valuation(name: str) -> UtilityParams:
    try:
        return VALUATIONS[name]
    except KeyError:
        raise ScenarioError(f"unknown valuation {name!r}") from None


# ---------------------------------------------------------------------------
# message bodies


@dataclass(frozen=True)
class Propose:
    round: int
    value: str


@dataclass(frozen=True)
class Vote:
    round: int
    value: str


@dataclass(frozen=True)
class Decide:
    value: str
    justification: tuple  # tuple[SignedMessage, ...], quorum of votes


@dataclass(frozen=True)
class Expose:
    proof: "EquivocationProof"


@dataclass(frozen=True)
class Relay:
    inner: "SignedMessage"


@dataclass(frozen=True)
class DefaultMove:
    pass


@dataclass(frozen=True)
class Malformed:
    blob: str


MessageBody = Union[Propose, Vote, Decide, Expose, Relay, DefaultMove, Malformed]

_BODY_TAGS = {
    Propose: "propose",
    Vote: "vote",
    Decide: "decide",
    Expose: "expose",
    Relay: "relay",
    DefaultMove: "default",
    Malformed: "malformed",
}


def body_to_wire(body: MessageBody) -> dict:
    tag = _BODY_TAGS[type(body)]
    if isinstance(body, (Propose, Vote)):
        return {"t": tag, "round": body.round, "value": body.value}
    if isinstance(body, Decide):
        return {
            "t": tag,
            "value": body.value,
            "justification": [message_to_wire(m) for m in body.justification],
        }
    if isinstance(body, Expose):
        return {"t": tag, "proof": proof_to_wire(body.proof)}
    if isinstance(body, Relay):
        return {"t": tag, "inner": message_to_wire(body.inner)}
    if isinstance(body, Malformed):
        return {"t": tag, "blob": body.blob}
    return {"t": tag}


def body_from_wire(obj: dict) -> MessageBody:
    tag = obj["t"]
    if tag == "propose":
        return Propose(int(obj["round"]), str(obj["value"]))
    if tag == "vote":
        return Vote(int(obj["round"]), str(obj["value"]))
    if tag == "decide":
        return Decide(
            str(obj["value"]),
            tuple(message_from_wire(m) for m in obj["justification"]),
        )
    if tag == "expose":
        return Expose(proof_from_wire(obj["proof"]))
    if tag == "relay":
        return Relay(message_from_wire(obj["inner"]))
    if tag == "default":
        return DefaultMove()
    if tag == "malformed":
        return Malformed(str(obj["blob"]))
    raise ScenarioError(f"unknown body tag {tag!r}")


@dataclass(frozen=True)
class SignedMessage:
    sender: PlayerId
    body: MessageBody
    signature: str
    digest: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.digest:
            wire = {
                "sender": self.sender,
                "body": body_to_wire(self.body),
                "sig": self.signature,
            }
            object.__setattr__(self, "digest", digest_of(wire))


def message_to_wire(msg: SignedMessage) -> dict:
    return {
        "sender": msg.sender,
        "body": body_to_wire(msg.body),
        "sig": msg.signature,
    }


def message_from_wire(obj: dict) -> SignedMessage:
    return SignedMessage(int(obj["sender"]), body_from_wire(obj["body"]), str(obj["sig"]))


@dataclass(frozen=True)
class EquivocationProof:
    """Two verifying messages from one sender, same round and kind,
    carrying different values."""

    culprit: PlayerId
    first: SignedMessage
    second: SignedMessage


def proof_to_wire(proof: EquivocationProof) -> dict:
    return {
        "culprit": proof.culprit,
        "first": message_to_wire(proof.first),
        "second": message_to_wire(proof.second),
    }


def proof_from_wire(obj: dict) -> EquivocationProof:
    return EquivocationProof(
        int(obj["culprit"]),
        message_from_wire(obj["first"]),
        message_from_wire(obj["second"]),
    )


# ---------------------------------------------------------------------------
# signatures

class SignatureScheme:
    """Idealized per-run signature table.

    Keys are derived from the run seed; a signature is a keyed digest of the
    canonical body, so signing is deterministic, verification is exact and
    forgery inside the simulation is impossible without the signer's key.
    Strategies only ever receive a Signer bound to their own player id.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._keys: dict[PlayerId, str] = {}

    def _key(self, player: PlayerId) -> str:
        key = self._keys.get(player)
        if key is None:
            key = hashlib.sha256(f"sk|{self.seed}|{player}".encode()).hexdigest()
            self._keys[player] = key
        return key

    def sign(self, player: PlayerId, body: MessageBody) -> SignedMessage:
        payload = self._key(player) + canonical_json(body_to_wire(body))
        sig = hashlib.sha256(payload.encode()).hexdigest()
        return SignedMessage(player, body, sig)

    def verify(self, msg: SignedMessage) -> bool:
        payload = self._key(msg.sender) + canonical_json(body_to_wire(msg.body))
        return msg.signature == hashlib.sha256(payload.encode()).hexdigest()

    def signer(self, player: PlayerId) -> "Signer":
        return Signer(self, player)


class Signer:
    """Signing capability restricted to one player."""

    def __init__(self, scheme: SignatureScheme, player: PlayerId):
        self._scheme = scheme
        self.player = player

    def sign(self, body: MessageBody) -> SignedMessage:
        return self._scheme.sign(self.player, body)


def detect_equivocation(
    scheme: SignatureScheme, a: SignedMessage, b: SignedMessage
) -> Optional[EquivocationProof]:
    """Return a proof when a and b convict their common sender, else None."""
    if a.sender != b.sender:
        return None
    if not (scheme.verify(a) and scheme.verify(b)):
        return None
    pair = (a.body, b.body)
    same_kind = all(isinstance(x, Vote) for x in pair) or all(
        isinstance(x, Propose) for x in pair
    )
    if not same_kind:
        return None
    if a.body.round != b.body.round or a.body.value == b.body.value:
        return None
    first, second = sorted((a, b), key=lambda m: m.digest)
    return EquivocationProof(a.sender, first, second)


def valid_proof(scheme: SignatureScheme, proof: EquivocationProof) -> bool:
    got = detect_equivocation(scheme, proof.first, proof.second)
    return got is not None and got.culprit == proof.culprit


# ---------------------------------------------------------------------------
# strategy declarations (data only; behavior lives in strategies.py)


@dataclass(frozen=True)
class CorrectSpec:
    kind = "correct"


@dataclass(frozen=True)
class RationalFollowSpec:
    kind = "rational_follow"


@dataclass(frozen=True)
class CrashSpec:
    """Follow the protocol until the window round reaches `round`, emit that
    turn's messages only to `final`, then stay silent.  round=None never
    crashes."""

    round: Optional[int] = None
    final: tuple = ()
    kind = "crash"


@dataclass(frozen=True)
class DisagreeSpec:
    """Split-world attack: value_a goes to group_a, value_b to group_b
    (coalition members always see both).  Fires in the first round led by a
    coalition member; afterwards the player falls back to correct play."""

    group_a: tuple
    group_b: tuple
    value_a: str
    value_b: str
    kind = "disagree"


@dataclass(frozen=True)
class BaitSpec:
    """Defect from the coalition: broadcast proofs built from the plan's
    pre-signed votes at `reveal_round`, play correct otherwise."""

    reveal_round: int = 0
    kind = "bait"


@dataclass(frozen=True)
class PunishSpec:
    """Correct play plus broadcasting any equivocation proof it collects."""

    kind = "punish"


@dataclass(frozen=True)
class ByzSpec:
    """One of the six scripted Byzantine deviations.

    1 split-world disagreement, 2 permanent silence, 3 honest content to a
    fixed subset only, 4 malformed traffic, 5 sustained vote splitting,
    6 one-round vote splitting.
    """

    deviation: int
    group_a: tuple = ()
    group_b: tuple = ()
    value_a: str = ""
    value_b: str = ""
    subset: tuple = ()
    kind = "byzantine"

    def __post_init__(self):
        if self.deviation not in range(1, 7):
            raise ScenarioError(f"unknown deviation {self.deviation}")


StrategySpec = Union[
    CorrectSpec, RationalFollowSpec, CrashSpec, DisagreeSpec, BaitSpec, PunishSpec, ByzSpec
]

_ROLE_FOR_SPEC = {
    CorrectSpec: RoleKind.CORRECT,
    PunishSpec: RoleKind.CORRECT,
    RationalFollowSpec: RoleKind.RATIONAL,
    DisagreeSpec: RoleKind.RATIONAL,
    BaitSpec: RoleKind.RATIONAL,
    CrashSpec: RoleKind.CRASH,
    ByzSpec: RoleKind.BYZANTINE,
}


def strategy_to_wire(spec: StrategySpec) -> dict:
    if isinstance(spec, CrashSpec):
        return {
            "kind": spec.kind,
            "round": spec.round,
            "final": sorted(spec.final),
        }
    if isinstance(spec, DisagreeSpec):
        return {
            "kind": spec.kind,
            "group_a": sorted(spec.group_a),
            "group_b": sorted(spec.group_b),
            "value_a": spec.value_a,
            "value_b": spec.value_b,
        }
    if isinstance(spec, BaitSpec):
        return {"kind": spec.kind, "reveal_round": spec.reveal_round}
    if isinstance(spec, ByzSpec):
        return {
            "kind": spec.kind,
            "deviation": spec.deviation,
            "group_a": sorted(spec.group_a),
            "group_b": sorted(spec.group_b),
            "value_a": spec.value_a,
            "value_b": spec.value_b,
            "subset": sorted(spec.subset),
        }
    return {"kind": spec.kind}


def strategy_from_wire(obj: dict) -> StrategySpec:
    kind = obj.get("kind")
    if kind == "correct":
        return CorrectSpec()
    if kind == "rational_follow":
        return RationalFollowSpec()
    if kind == "crash":
        rnd = obj.get("round")
        return CrashSpec(None if rnd is None else int(rnd), tuple(obj.get("final", ())))
    if kind == "disagree":
        return DisagreeSpec(
            tuple(obj["group_a"]),
            tuple(obj["group_b"]),
            str(obj["value_a"]),
            str(obj["value_b"]),
        )
    if kind == "bait":
        return BaitSpec(int(obj.get("reveal_round", 0)))
    if kind == "punish":
        return PunishSpec()
    if kind == "byzantine":
        return ByzSpec(
            int(obj["deviation"]),
            tuple(obj.get("group_a", ())),
            tuple(obj.get("group_b", ())),
            str(obj.get("value_a", "")),
            str(obj.get("value_b", "")),
            tuple(obj.get("subset", ())),
        )
    raise ScenarioError(f"unknown strategy kind {kind!r}")


# ---------------------------------------------------------------------------
# scheduler policy declarations


@dataclass(frozen=True)
class RoundRobinSpec:
    kind = "round_robin"


@dataclass(frozen=True)
class PartitionSpec:
    """Hold messages crossing the group_a / group_b boundary until their
    deadline slot; everything else is released at the earliest slot."""

    group_a: tuple
    group_b: tuple
    kind = "partition"


@dataclass(frozen=True)
class RandomSpec:
    seed: int = 0
    kind = "random"


PolicySpec = Union[RoundRobinSpec, PartitionSpec, RandomSpec]


def policy_to_wire(spec: PolicySpec) -> dict:
    if isinstance(spec, PartitionSpec):
        return {
            "kind": spec.kind,
            "group_a": sorted(spec.group_a),
            "group_b": sorted(spec.group_b),
        }
    if isinstance(spec, RandomSpec):
        return {"kind": spec.kind, "seed": spec.seed}
    return {"kind": spec.kind}


def policy_from_wire(obj: dict) -> PolicySpec:
    kind = obj.get("kind")
    if kind == "round_robin":
        return RoundRobinSpec()
    if kind == "partition":
        return PartitionSpec(tuple(obj["group_a"]), tuple(obj["group_b"]))
    if kind == "random":
        return RandomSpec(int(obj.get("seed", 0)))
    raise ScenarioError(f"unknown policy kind {kind!r}")


# ---------------------------------------------------------------------------
# scenario


@dataclass(frozen=True)
class RoleSpec:
    player: PlayerId
    role: RoleKind
    strategy: StrategySpec


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    seed: int
    k: int
    t: int
    quorum_r: int
    delta: int
    fairness_window: int
    round_window: int
    max_rounds: int
    horizon: int
    relay_budget: int
    protocol: str  # "base" or "hardened"
    baiting: bool
    valuation: str
    values: tuple
    roles: tuple  # tuple[RoleSpec, ...] indexed by player
    coalition: tuple
    policy: PolicySpec

    @property
    def players(self) -> range:
        return range(self.n)

    @property
    def utility(self) -> UtilityParams:
        return valuation(self.valuation)

    def role_of(self, player: PlayerId) -> RoleSpec:
        return self.roles[player]

    def players_of_kind(self, kind: RoleKind) -> list:
        return [r.player for r in self.roles if r.role == kind]

    def validate(self) -> None:
        c = self
        if c.n < 2:
            raise ScenarioError("need at least two players")
        if not 1 <= c.quorum_r <= c.n:
            raise ScenarioError(f"quorum {c.quorum_r} outside 1..{c.n}")
        if c.delta < c.n:
            raise ScenarioError("delivery bound must be at least n for slotting")
        if c.fairness_window < c.n:
            raise ScenarioError("fairness window shorter than one rotation")
        if c.round_window < c.n:
            raise ScenarioError("round window shorter than one rotation")
        if c.horizon < c.max_rounds * c.n:
            raise ScenarioError("horizon too short for the round budget")
        if len(c.values) != c.n or len(c.roles) != c.n:
            raise ScenarioError("values/roles must cover every player exactly once")
        for i, role in enumerate(c.roles):
            if role.player != i:
                raise ScenarioError("roles must be listed in player order")
            expected = _ROLE_FOR_SPEC[type(role.strategy)]
            if role.role != expected:
                raise ScenarioError(
                    f"player {i}: strategy {role.strategy.kind} requires role {expected.value}"
                )
        kinds = {kind: len(self.players_of_kind(kind)) for kind in RoleKind}
        if kinds[RoleKind.RATIONAL] > c.k:
            raise ScenarioError("more rational players than the k budget")
        if kinds[RoleKind.CRASH] > c.t:
            raise ScenarioError("more crash players than the t budget")
        if kinds[RoleKind.BYZANTINE] > c.t:
            raise ScenarioError("more byzantine players than the t budget")
        rational = set(self.players_of_kind(RoleKind.RATIONAL))
        if not set(c.coalition) <= rational:
            raise ScenarioError("coalition must consist of rational players")
        if c.protocol not in ("base", "hardened"):
            raise ScenarioError(f"unknown protocol {c.protocol!r}")
        valuation(c.valuation)  # raises on unknown name
        for group in _policy_groups(c.policy):
            if not set(group) <= set(c.players):
                raise ScenarioError("policy group mentions unknown players")

    def to_wire(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "k": self.k,
            "t": self.t,
            "quorum_r": self.quorum_r,
            "delta": self.delta,
            "fairness_window": self.fairness_window,
            "round_window": self.round_window,
            "max_rounds": self.max_rounds,
            "horizon": self.horizon,
            "relay_budget": self.relay_budget,
            "protocol": self.protocol,
            "baiting": self.baiting,
            "valuation": self.valuation,
            "values": list(self.values),
            "roles": [
                {
                    "player": r.player,
                    "role": r.role.value,
                    "strategy": strategy_to_wire(r.strategy),
                }
                for r in self.roles
            ],
            "coalition": sorted(self.coalition),
            "policy": policy_to_wire(self.policy),
        }

    @staticmethod
    def from_wire(obj: dict) -> "ScenarioConfig":
        try:
            roles = tuple(
                RoleSpec(
                    int(r["player"]),
                    RoleKind(r["role"]),
                    strategy_from_wire(r["strategy"]),
                )
                for r in obj["roles"]
            )
            cfg = ScenarioConfig(
                n=int(obj["n"]),
                seed=int(obj["seed"]),
                k=int(obj["k"]),
                t=int(obj["t"]),
                quorum_r=int(obj["quorum_r"]),
                delta=int(obj["delta"]),
                fairness_window=int(obj["fairness_window"]),
                round_window=int(obj["round_window"]),
                max_rounds=int(obj["max_rounds"]),
                horizon=int(obj["horizon"]),
                relay_budget=int(obj["relay_budget"]),
                protocol=str(obj["protocol"]),
                baiting=bool(obj["baiting"]),
                valuation=str(obj["valuation"]),
                values=tuple(str(v) for v in obj["values"]),
                roles=roles,
                coalition=tuple(int(p) for p in obj["coalition"]),
                policy=policy_from_wire(obj["policy"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad scenario document: {exc}") from exc
        cfg.validate()
        return cfg

    def digest(self) -> str:
        return digest_of(self.to_wire())


def _policy_groups(policy: PolicySpec):
    if isinstance(policy, PartitionSpec):
        return [policy.group_a, policy.group_b]
    return []


def make_config(
    n: int,
    quorum_r: int,
    *,
    seed: int = 0,
    k: int = 0,
    t: int = 0,
    strategies: Optional[dict] = None,
    coalition: tuple = (),
    policy: PolicySpec = RoundRobinSpec(),
    protocol: str = "base",
    baiting: bool = False,
    valuation_name: str = "default",
    values: Optional[tuple] = None,
    delta: Optional[int] = None,
    round_window: Optional[int] = None,
    max_rounds: Optional[int] = None,
    horizon: Optional[int] = None,
) -> ScenarioConfig:
    """Build a validated scenario with the standard derived defaults.

    delta defaults to 4n, the fairness window to 2n, the round window to
    12n (a round must fit two delivery bounds plus slack so that every
    propose and vote circulates before anyone times out), the horizon to
    max_rounds * round_window.
    """
    strategies = dict(strategies or {})
    delta = 4 * n if delta is None else delta
    round_window = 12 * n if round_window is None else round_window
    max_rounds = n if max_rounds is None else max_rounds
    horizon = max_rounds * round_window if horizon is None else horizon
    roles = []
    for player in range(n):
        spec = strategies.get(player, CorrectSpec())
        roles.append(RoleSpec(player, _ROLE_FOR_SPEC[type(spec)], spec))
    cfg = ScenarioConfig(
        n=n,
        seed=seed,
        k=k,
        t=t,
        quorum_r=quorum_r,
        delta=delta,
        fairness_window=2 * n,
        round_window=round_window,
        max_rounds=max_rounds,
        horizon=horizon,
        relay_budget=delta + 2 * n,
        protocol=protocol,
        baiting=baiting,
        valuation=valuation_name,
        values=values if values is not None else tuple(f"v{i}" for i in range(n)),
        roles=tuple(roles),
        coalition=tuple(sorted(coalition)),
        policy=policy,
    )
    cfg.validate()
    return cfg
