"""Player behaviors: honest, crashing, rational and Byzantine.

A behavior owns a protocol state and answers two calls from the engine:
deliver(msgs, now) for an incoming batch and turn(now) for the player's
move, returning (message, recipients) emissions.  Deviating behaviors
reuse the honest machinery and bend only what their deviation needs, so
every attack here is the minimal departure from the protocol that
achieves its effect.

The coalition attack follows the classic shape: the members pick the
first round one of them leads, split the correct players into two sides,
and send each side a different proposal and matching votes.  Each side
plus the members reaches the quorum on its own value.  Coalition
planning is cheap talk: members exchange signed conflicting votes up
front, which is exactly the evidence a defector can later expose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import NoEvidence, ScenarioError
from .hardening import ExtensionState, harden_act, harden_ingest
from .model import (
    BaitSpec,
    ByzSpec,
    CorrectSpec,
    CrashSpec,
    Decide,
    DisagreeSpec,
    EquivocationProof,
    Expose,
    Malformed,
    PlayerId,
    Propose,
    PunishSpec,
    RationalFollowSpec,
    ScenarioConfig,
    SignatureScheme,
    SignedMessage,
    UtilityParams,
    Vote,
    detect_equivocation,
)
from .protocol import PlayerState

DEVIATING_KINDS = {"disagree", "bait", "byzantine"}


def is_deviating(spec) -> bool:
    return spec.kind in DEVIATING_KINDS


# ---------------------------------------------------------------------------
# attack geometry


def disagree_partition(n: int, k: int, t: int, correct: list) -> Optional[tuple]:
    """Split the correct players so both halves plus the coalition reach
    the quorum n - t.  Balanced split, lower indices to side A, extra
    member to A on odd counts.  None when no split works."""
    players = sorted(correct)
    if len(players) < 2:
        return None
    half = (len(players) + 1) // 2
    a, b = tuple(players[:half]), tuple(players[half:])
    if k + len(a) >= n - t and k + len(b) >= n - t:
        return (a, b)
    return None


@dataclass(frozen=True)
class CoalitionPlan:
    """Runtime view of the declared coalition attack."""

    members: tuple  # rational players that will equivocate
    baiters: tuple  # rational players that will defect and expose
    allies: tuple  # crash players assisting the plan
    round: int
    value_a: str
    value_b: str
    group_a: tuple
    group_b: tuple
    pre_signed: tuple  # conflicting votes shared during planning

    def conflicting_pairs(self) -> dict:
        """member -> (vote for value_a, vote for value_b)"""
        by_member: dict = {}
        for msg in self.pre_signed:
            if isinstance(msg.body, Vote) and msg.body.round == self.round:
                slot = by_member.setdefault(msg.sender, {})
                slot[msg.body.value] = msg
        pairs = {}
        for member, slot in by_member.items():
            if self.value_a in slot and self.value_b in slot:
                pairs[member] = (slot[self.value_a], slot[self.value_b])
        return pairs


def extract_plan(cfg: ScenarioConfig, scheme: SignatureScheme) -> Optional[CoalitionPlan]:
    """Read the coalition attack out of the scenario roles, if any."""
    members = []
    baiters = []
    allies = []
    disagree: Optional[DisagreeSpec] = None
    for role in cfg.roles:
        spec = role.strategy
        if isinstance(spec, DisagreeSpec):
            members.append(role.player)
            if disagree is None:
                disagree = spec
            elif spec != disagree:
                raise ScenarioError("coalition members declare conflicting attack plans")
        elif isinstance(spec, BaitSpec):
            baiters.append(role.player)
        elif isinstance(spec, CrashSpec) and role.player in cfg.coalition:
            allies.append(role.player)
    if disagree is not None:
        # split-world helpers that mirror the coalition's plan co-sign it
        for role in cfg.roles:
            spec = role.strategy
            if (
                isinstance(spec, ByzSpec)
                and spec.deviation == 1
                and tuple(spec.group_a) == tuple(disagree.group_a)
                and tuple(spec.group_b) == tuple(disagree.group_b)
                and (spec.value_a, spec.value_b) == (disagree.value_a, disagree.value_b)
            ):
                members.append(role.player)
    if disagree is None and not baiters:
        return None
    if disagree is None:
        # defectors whose coalition never pre-signed anything
        return CoalitionPlan(
            (), tuple(sorted(baiters)), tuple(allies), min(cfg.coalition or (0,)),
            "", "", (), (), (),
        )
    rho = min(members + baiters)
    pre_signed = []
    for member in sorted(members):
        pre_signed.append(scheme.sign(member, Vote(rho, disagree.value_a)))
        pre_signed.append(scheme.sign(member, Vote(rho, disagree.value_b)))
    return CoalitionPlan(
        tuple(sorted(members)),
        tuple(sorted(baiters)),
        tuple(sorted(allies)),
        rho,
        disagree.value_a,
        disagree.value_b,
        tuple(disagree.group_a),
        tuple(disagree.group_b),
        tuple(pre_signed),
    )


def punish_effect(events: list, utility: UtilityParams) -> dict:
    """Utility adjustments from exposure events, in event order.

    events: (exposer, EquivocationProof) pairs.  The first valid exposure
    of each culprit slashes it once and rewards that exposer; repeats of
    an already-punished culprit change nothing.
    """
    adjustments: dict = {}
    slashed: set = set()
    for exposer, proof in events:
        if proof.culprit in slashed:
            continue
        slashed.add(proof.culprit)
        adjustments[proof.culprit] = adjustments.get(proof.culprit, 0.0) + utility.slash
        adjustments[exposer] = adjustments.get(exposer, 0.0) + utility.bait_reward
    return adjustments


# ---------------------------------------------------------------------------
# behaviors


class Behavior:
    crashed = False

    def deliver(self, msgs: list, now: int) -> None:
        raise NotImplementedError

    def turn(self, now: int) -> list:
        raise NotImplementedError


class CorrectBehavior(Behavior):
    def __init__(self, state: PlayerState, ext: Optional[ExtensionState] = None):
        self.state = state
        self.ext = ext

    def deliver(self, msgs, now):
        if self.ext is not None:
            harden_ingest(self.ext, self.state, msgs, now)
        else:
            for msg in msgs:
                self.state.ingest(msg, now)

    def turn(self, now):
        if self.ext is not None:
            return harden_act(self.ext, self.state, now)
        return self.state.act(now)


class PunishBehavior(CorrectBehavior):
    """Correct play plus broadcasting a proof for each culprit it catches.

    Under the hardened wrapper the extension already mines and announces,
    so the private miner only runs for base-protocol configurations."""

    def __init__(self, state, ext=None):
        super().__init__(state, ext)
        self._mined = ExtensionState(state.player, state.scheme, relay_budget=0)
        self._accused: set = set()

    def deliver(self, msgs, now):
        if self.ext is None:
            for msg in msgs:
                if self.state.scheme.verify(msg):
                    from .hardening import _mine

                    _mine(self._mined, self.state, msg)
        super().deliver(msgs, now)

    def turn(self, now):
        if self.ext is not None:
            return super().turn(now)
        out = []
        others = tuple(p for p in range(self.state.params.n) if p != self.state.player)
        for culprit in sorted(self._mined.proofs):
            if culprit not in self._accused:
                self._accused.add(culprit)
                out.append((self.state.signer.sign(Expose(self._mined.proofs[culprit])), others))
        return out + super().turn(now)


class CrashBehavior(Behavior):
    """Correct until the crash round; the crash turn's emissions reach only
    final_recipients; silent afterwards.  round None never crashes."""

    def __init__(self, inner: Behavior, state: PlayerState, crash_round, final):
        self.inner = inner
        self.state = state
        self.crash_round = crash_round
        self.final = set(final)
        self.crashed = False

    def deliver(self, msgs, now):
        if not self.crashed:
            self.inner.deliver(msgs, now)

    def turn(self, now):
        if self.crashed:
            return []
        if self.crash_round is None or self.state.params.round_of(now) < self.crash_round:
            return self.inner.turn(now)
        out = []
        for msg, recipients in self.inner.turn(now):
            kept = tuple(p for p in recipients if p in self.final)
            if kept:
                out.append((msg, kept))
        self.crashed = True
        return out


class FollowBehavior(CorrectBehavior):
    pass


def split_emissions(state: PlayerState, plan: CoalitionPlan) -> list:
    """The coalition move: one proposal and one vote per side, members
    hearing both halves."""
    me = state.player
    everyone = set(plan.members) | set(plan.baiters)
    side_a = tuple(sorted((set(plan.group_a) | everyone) - {me}))
    side_b = tuple(sorted((set(plan.group_b) | everyone) - {me}))
    out = []
    if state.params.leader(plan.round) == me:
        out.append((state.signer.sign(Propose(plan.round, plan.value_a)), side_a))
        out.append((state.signer.sign(Propose(plan.round, plan.value_b)), side_b))
        state.proposed.add(plan.round)
    out.append((state.scheme.sign(me, Vote(plan.round, plan.value_a)), side_a))
    out.append((state.scheme.sign(me, Vote(plan.round, plan.value_b)), side_b))
    state.voted.add(plan.round)
    return out


class DisagreeBehavior(Behavior):
    """Coalition member: equivocate at the plan round, then play correct
    with decision broadcasts suppressed."""

    def __init__(self, state: PlayerState, plan: CoalitionPlan):
        self.state = state
        self.plan = plan
        self.attacked = False

    def deliver(self, msgs, now):
        for msg in msgs:
            self.state.ingest(msg, now)

    def turn(self, now):
        rho = self.state.params.round_of(now)
        if rho < self.plan.round:
            return self.state.act(now)
        if not self.attacked:
            self.attacked = True
            return split_emissions(self.state, self.plan)
        out = self.state.act(now)
        return [(m, r) for m, r in out if not isinstance(m.body, Decide)]


class BaitBehavior(Behavior):
    """Defecting member: follows the coalition outwardly, then reveals the
    plan's signed conflicts at reveal_round, claiming the reward instead
    of the fork.  A reveal after decisions have landed is too late to
    stop anything; that is what the timing requirement is about."""

    def __init__(self, state: PlayerState, plan: CoalitionPlan, reveal_round: int, expose_cap: int):
        pairs = plan.conflicting_pairs()
        self.targets = [c for c in sorted(pairs) if c != state.player]
        if not self.targets:
            raise NoEvidence("plan holds no conflicting pair signed by another member")
        self.state = state
        self.plan = plan
        self.reveal_round = reveal_round
        self.pairs = pairs
        rank = sorted(plan.baiters).index(state.player) if state.player in plan.baiters else 0
        width = max(1, len(plan.baiters))
        capped = self.targets[: max(0, expose_cap)]
        self.assigned = [c for i, c in enumerate(capped) if i % width == rank]
        self.revealed = False
        self.attacked = False

    def deliver(self, msgs, now):
        for msg in msgs:
            self.state.ingest(msg, now)

    def turn(self, now):
        rho = self.state.params.round_of(now)
        if rho < self.reveal_round:
            if rho < self.plan.round:
                return self.state.act(now)
            if not self.attacked:
                self.attacked = True
                return split_emissions(self.state, self.plan)
            out = self.state.act(now)
            return [(m, r) for m, r in out if not isinstance(m.body, Decide)]
        out = []
        if not self.revealed:
            self.revealed = True
            others = tuple(p for p in range(self.state.params.n) if p != self.state.player)
            for culprit in self.assigned:
                first, second = self.pairs[culprit]
                proof = detect_equivocation(self.state.scheme, first, second)
                self.state.apply_exclusion(culprit)
                out.append((self.state.signer.sign(Expose(proof)), others))
        return out + self.state.act(now)


class SilentBehavior(Behavior):
    """Deviation 2: never sends anything."""

    def deliver(self, msgs, now):
        pass

    def turn(self, now):
        return []


class SubsetBehavior(CorrectBehavior):
    """Deviation 3: honest content, but only a fixed subset ever hears it."""

    def __init__(self, state, subset):
        super().__init__(state)
        self.subset = set(subset)

    def turn(self, now):
        out = []
        for msg, recipients in super().turn(now):
            kept = tuple(p for p in recipients if p in self.subset)
            if kept:
                out.append((msg, kept))
        return out


class MalformedBehavior(Behavior):
    """Deviation 4: floods garbage that parses as no protocol step."""

    def __init__(self, state: PlayerState):
        self.state = state

    def deliver(self, msgs, now):
        pass

    def turn(self, now):
        others = tuple(p for p in range(self.state.params.n) if p != self.state.player)
        return [(self.state.signer.sign(Malformed(f"junk{now}")), others)]


class SplitVoteBehavior(Behavior):
    """Deviations 5 and 6: equivocating votes that keep both sides short
    of the quorum.  D5 splits every round; D6 poisons only round zero and
    goes quiet."""

    def __init__(self, state: PlayerState, spec: ByzSpec):
        self.state = state
        self.spec = spec
        self.done: set = set()

    def deliver(self, msgs, now):
        pass

    def turn(self, now):
        rho = self.state.params.round_of(now)
        if rho >= self.state.params.max_rounds or rho in self.done:
            return []
        if self.spec.deviation == 6 and rho > 0:
            return []
        self.done.add(rho)
        spec, state = self.spec, self.state
        side_a = tuple(sorted(spec.group_a))
        side_b = tuple(sorted(spec.group_b))
        out = []
        if state.params.leader(rho) == state.player:
            out.append((state.signer.sign(Propose(rho, spec.value_a)), side_a))
            out.append((state.signer.sign(Propose(rho, spec.value_b)), side_b))
        out.append((state.signer.sign(Vote(rho, spec.value_a)), side_a))
        out.append((state.signer.sign(Vote(rho, spec.value_b)), side_b))
        return out


def build_behavior(
    cfg: ScenarioConfig,
    player: PlayerId,
    state: PlayerState,
    scheme: SignatureScheme,
    plan: Optional[CoalitionPlan],
) -> Behavior:
    spec = cfg.role_of(player).strategy
    hardened = cfg.protocol == "hardened"
    ext = ExtensionState(player, scheme, cfg.relay_budget) if hardened else None
    if isinstance(spec, CorrectSpec):
        return CorrectBehavior(state, ext)
    if isinstance(spec, PunishSpec):
        return PunishBehavior(state, ext)
    if isinstance(spec, RationalFollowSpec):
        return FollowBehavior(state, ext)
    if isinstance(spec, CrashSpec):
        return CrashBehavior(CorrectBehavior(state, ext), state, spec.round, spec.final)
    if isinstance(spec, DisagreeSpec):
        if plan is None:
            raise ScenarioError("disagree role without an extractable plan")
        return DisagreeBehavior(state, plan)
    if isinstance(spec, BaitSpec):
        if plan is None:
            raise ScenarioError("bait role without an extractable plan")
        return BaitBehavior(state, plan, spec.reveal_round, expose_cap=cfg.t)
    if isinstance(spec, ByzSpec):
        if spec.deviation == 1:
            if plan is not None and player in plan.members:
                return DisagreeBehavior(state, plan)
            attack = CoalitionPlan(
                (player,), (), (), _first_led_round(cfg, player),
                spec.value_a, spec.value_b, tuple(spec.group_a), tuple(spec.group_b), (),
            )
            return DisagreeBehavior(state, attack)
        if spec.deviation == 2:
            return SilentBehavior()
        if spec.deviation == 3:
            return SubsetBehavior(state, spec.subset)
        if spec.deviation == 4:
            return MalformedBehavior(state)
        return SplitVoteBehavior(state, spec)
    raise ScenarioError(f"no behavior for {spec!r}")


def _first_led_round(cfg: ScenarioConfig, player: PlayerId) -> int:
    for rho in range(cfg.max_rounds):
        if rho % cfg.n == player:
            return rho
    return 0
