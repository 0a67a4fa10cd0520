"""Utility assignment, equilibrium falsifiers and bound calculators.

Every check here is a falsifier over an explicit finite menu of deviation
plans, scheduler policies and seeds.  NoViolationFound is always relative
to the stated menu, never a proof; ViolationFound carries a witness
configuration that replays to the claimed gap.  The gap threshold is
exact (strictly greater) because idealized signatures leave no epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .engine import AGREEMENT, DISAGREEMENT, RunResult, run
from .errors import NotApplicable, PreconditionFailed
from .model import (
    BaitSpec,
    ByzSpec,
    CrashSpec,
    DisagreeSpec,
    PartitionSpec,
    PolicySpec,
    RationalFollowSpec,
    RoleKind,
    RoundRobinSpec,
    ScenarioConfig,
    UtilityParams,
    make_config,
    valuation,
)
from .strategies import disagree_partition, punish_effect

VIOLATION = "ViolationFound"
NO_VIOLATION = "NoViolationFound"


def _valuation_of(name_or_params) -> UtilityParams:
    if isinstance(name_or_params, UtilityParams):
        return name_or_params
    return valuation(name_or_params)


def _valuation_label(name_or_params) -> str:
    # configs carry a registered name on the wire; ad-hoc tables fall
    # back to default there because verdicts are valuation-independent
    return name_or_params if isinstance(name_or_params, str) else "default"


# ---------------------------------------------------------------------------
# utilities


def _exposure_events(result: RunResult) -> list:
    return [(exposer, proof) for _, exposer, proof in result.exposures]


def assign_utilities(result: RunResult, utility: UtilityParams) -> dict:
    """Utility of every utility-bearing player for a finished run.

    Byzantine players carry no utility and are absent from the vector.
    Crash-role players did not follow the protocol to the end and get 0.
    Correct players are paid a constant for following.  Rational players
    are outcome-sensitive; the declared coalition is who a disagreement
    is credited to.  Punishment adjustments land on top.
    """
    coalition = set(result.cfg.coalition)
    vector: dict = {}
    for role in result.cfg.roles:
        if role.role is RoleKind.BYZANTINE:
            continue
        if role.role is RoleKind.CRASH:
            vector[role.player] = 0.0
        elif role.role is RoleKind.CORRECT:
            vector[role.player] = utility.correct_follow
        elif result.outcome == AGREEMENT:
            vector[role.player] = utility.agree
        elif result.outcome == DISAGREEMENT:
            if role.player in coalition:
                vector[role.player] = utility.disagree_gain
            else:
                vector[role.player] = utility.victim_penalty
        else:
            vector[role.player] = utility.nonterm_penalty
    for player, delta in punish_effect(_exposure_events(result), utility).items():
        if player in vector:
            vector[player] += delta
    return vector


def probe_utilities(result: RunResult, utility: UtilityParams) -> dict:
    """Outcome-sensitive valuation of every non-faulty player.

    Immunity checks compare what a player would feel about the outcome,
    so correct players are valued by the rational rules here instead of
    their constant follow reward.
    """
    coalition = set(result.cfg.coalition)
    vector: dict = {}
    for role in result.cfg.roles:
        if role.role in (RoleKind.BYZANTINE, RoleKind.CRASH):
            continue
        if result.outcome == AGREEMENT:
            vector[role.player] = utility.agree
        elif result.outcome == DISAGREEMENT:
            if role.player in coalition:
                vector[role.player] = utility.disagree_gain
            else:
                vector[role.player] = utility.victim_penalty
        else:
            vector[role.player] = utility.nonterm_penalty
    for player, delta in punish_effect(_exposure_events(result), utility).items():
        if player in vector:
            vector[player] += delta
    return vector


# ---------------------------------------------------------------------------
# bound calculators


def feasible_disagreement(n: int, k: int, t: int) -> bool:
    return k + 2 * t >= n


def min_baiters(n: int, k: int, t: int) -> int:
    """Smallest m with m > (k - n)/2 + t and 0 < m <= k."""
    if not feasible_disagreement(n, k, t):
        raise NotApplicable(f"no disagreement to defuse at n={n} k={k} t={t}")
    m = math.floor((k - n) / 2 + t) + 1
    if m < 1:
        m = 1
    if m > k:
        raise NotApplicable(
            f"defusing needs {m} defectors but the coalition only has {k}"
        )
    return m


def map_robust_to_crash_robust(k: int, t: int) -> tuple:
    return (k + t, t)


def map_immune_to_crash_robust(t_prime: int, t: int) -> tuple:
    return (t, t_prime + t)


def map_crash_robust_to_robust(k: int, t: int, *, baiting: bool = False) -> tuple:
    if baiting:
        raise PreconditionFailed(
            "source protocol admits a crash-baiting strategy; translation not applicable"
        )
    if k < t:
        raise PreconditionFailed(f"translation needs k >= t, got k={k} t={t}")
    return (k - t, t)


def map_crash_robust_to_immune(k: int, t: int, *, baiting: bool = False) -> tuple:
    if baiting:
        raise PreconditionFailed(
            "source protocol admits a crash-baiting strategy; translation not applicable"
        )
    if t < k:
        raise PreconditionFailed(f"translation needs t >= k, got k={k} t={t}")
    return (t - k, k)


# ---------------------------------------------------------------------------
# menus


@dataclass(frozen=True)
class Deviation:
    """One menu entry: a role overlay plus the coalition it declares."""

    name: str
    strategies: dict
    coalition: tuple = ()
    policy: Optional[PolicySpec] = None
    defectors: int = 0  # members playing the bait strategy


def attack_sides(n: int, quorum_r: int, members: int) -> Optional[tuple]:
    """Partition of the non-members so both halves plus the coalition
    reach quorum_r; None when the attack arithmetic fails."""
    if members < 1:
        return None
    targets = list(range(members, n))
    return disagree_partition(n, members, n - quorum_r, targets)


def equivocation_deviation(
    n: int, quorum_r: int, members: int, *, defectors: int = 0, reveal_round: int = 0
) -> Optional[Deviation]:
    """The two-quorum split: members equivocate, side A is starved to the
    delivery bound while the members travel with side B.  With defectors,
    the last ones expose the plan instead of completing it."""
    sides = attack_sides(n, quorum_r, members)
    if sides is None:
        return None
    a, b = sides
    coalition = tuple(range(members))
    strategies: dict = {}
    for p in coalition:
        if p < members - defectors:
            strategies[p] = DisagreeSpec(a, b, "valA", "valB")
        elif defectors < members:
            strategies[p] = BaitSpec(reveal_round=reveal_round)
        else:
            strategies[p] = RationalFollowSpec()
    policy = PartitionSpec(tuple(sorted(coalition + b)), a)
    label = f"split-{members}" if not defectors else f"split-{members}-defect-{defectors}"
    return Deviation(label, strategies, coalition, policy, defectors)


def joint_deviation(
    n: int, quorum_r: int, k: int, t_byz: int
) -> Optional[Deviation]:
    """Split with Byzantine co-signers: k rationals and t_byz helpers all
    sign both quorums, so the attack arithmetic runs on k + t_byz."""
    if t_byz < 1:
        return equivocation_deviation(n, quorum_r, k)
    signers = k + t_byz
    if k < 1:
        return None
    targets = list(range(signers, n))
    sides = disagree_partition(n, signers, n - quorum_r, targets)
    if sides is None:
        return None
    a, b = sides
    strategies: dict = {}
    for p in range(k):
        strategies[p] = DisagreeSpec(a, b, "valA", "valB")
    for p in range(k, signers):
        strategies[p] = ByzSpec(1, a, b, "valA", "valB", ())
    policy = PartitionSpec(tuple(sorted(tuple(range(signers)) + b)), a)
    return Deviation(
        f"joint-split-{k}+{t_byz}", strategies, tuple(range(k)), policy
    )


def clique_deviation(n: int, quorum_r: int, t: int) -> Optional[Deviation]:
    """Quorum-sized crash clique: circulate votes internally, decide,
    vanish.  Exists only when the budget covers a whole quorum."""
    if quorum_r > t or n - quorum_r < 1:
        return None
    clique = tuple(range(quorum_r))
    return Deviation(
        f"clique-{quorum_r}", {p: CrashSpec(0, clique) for p in clique}
    )


def crash_menu(n: int, quorum_r: int, t: int) -> list:
    """Standard crash patterns: silent prefixes (taking leaders down),
    silent suffixes, partial sends toward survivors, and the clique."""
    menu = []
    for j in range(1, t + 1):
        menu.append(
            Deviation(f"silent-first-{j}", {p: CrashSpec(0, ()) for p in range(j)})
        )
        menu.append(
            Deviation(
                f"silent-last-{j}", {p: CrashSpec(0, ()) for p in range(n - j, n)}
            )
        )
        survivors = tuple(range(j, n))
        menu.append(
            Deviation(
                f"partial-first-{j}",
                {p: CrashSpec(0, survivors) for p in range(j)},
            )
        )
    clique = clique_deviation(n, quorum_r, t)
    if clique is not None:
        menu.append(clique)
    return menu


def byz_menu(n: int, quorum_r: int, t: int, *, offset: int = 0) -> list:
    """Byzantine patterns for robustness/immunity menus: split-world,
    silence, and sustained vote splitting by t players starting at
    offset."""
    if t < 1:
        return []
    culprits = tuple(range(offset, offset + t))
    others = [p for p in range(n) if p not in culprits]
    half = (len(others) + 1) // 2
    a, b = tuple(others[:half]), tuple(others[half:])
    menu = []
    for deviation, label in ((1, "split-world"), (2, "silent"), (5, "vote-split")):
        menu.append(
            Deviation(
                f"byz-{label}-{t}",
                {p: ByzSpec(deviation, a, b, "valA", "valB", ()) for p in culprits},
            )
        )
    return menu


# ---------------------------------------------------------------------------
# reports


@dataclass
class EquilibriumReport:
    property: str
    verdict: str
    menu: str
    mode: str
    witness: Optional[ScenarioConfig] = None
    witness_outcome: Optional[str] = None
    details: dict = field(default_factory=dict)

    @property
    def witness_id(self) -> str:
        return self.witness.digest() if self.witness is not None else ""

    def to_wire(self) -> dict:
        doc = {
            "property": self.property,
            "verdict": self.verdict,
            "menu": self.menu,
            "mode": self.mode,
            "details": dict(self.details),
        }
        if self.witness is not None:
            doc["witness"] = self.witness.to_wire()
            doc["witness-id"] = self.witness_id
            doc["witness-outcome"] = self.witness_outcome
        return doc


def _build(
    n: int,
    quorum_r: int,
    k: int,
    t: int,
    deviation: Optional[Deviation],
    *,
    protocol: str,
    baiting: bool,
    valuation_name: str,
    seed: int,
) -> ScenarioConfig:
    strategies = dict(deviation.strategies) if deviation else {}
    coalition = deviation.coalition if deviation else ()
    policy = deviation.policy if deviation and deviation.policy else RoundRobinSpec()
    return make_config(
        n,
        quorum_r,
        seed=seed,
        k=k,
        t=t,
        strategies=strategies,
        coalition=coalition,
        policy=policy,
        protocol=protocol,
        baiting=baiting,
        valuation_name=_valuation_label(valuation_name),
    )


def _follow_baseline(dev: Deviation) -> Deviation:
    """The comparison run: coalition members follow, allies keep crashing."""
    strategies = {}
    for p, spec in dev.strategies.items():
        if isinstance(spec, (DisagreeSpec, BaitSpec, RationalFollowSpec)):
            strategies[p] = RationalFollowSpec()
        else:
            strategies[p] = spec
    return Deviation(dev.name + "-baseline", strategies, dev.coalition, dev.policy)


# ---------------------------------------------------------------------------
# checkers


def check_k_resilience(
    n: int,
    quorum_r: int,
    k: int,
    *,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
) -> EquilibriumReport:
    """Strong-form resilience: a violation needs every coalition member
    strictly above its all-follow utility.  No faulty players in play."""
    u = _valuation_of(valuation_name)
    menu = [d for m in range(1, k + 1) for d in [equivocation_deviation(n, quorum_r, m)] if d]
    label = f"plans={[d.name for d in menu]} policies=[partition,round-robin] seeds={list(seeds)}"
    for dev in menu:
        for policy in (dev.policy, RoundRobinSpec()):
            for seed in seeds:
                trial = Deviation(dev.name, dev.strategies, dev.coalition, policy)
                cfg = _build(
                    n, quorum_r, k, 0, trial,
                    protocol=protocol, baiting=False,
                    valuation_name=valuation_name, seed=seed,
                )
                base_cfg = _build(
                    n, quorum_r, k, 0, _follow_baseline(trial),
                    protocol=protocol, baiting=False,
                    valuation_name=valuation_name, seed=seed,
                )
                result = run(cfg)
                baseline = assign_utilities(run(base_cfg), u)
                gained = assign_utilities(result, u)
                if all(gained[p] > baseline[p] for p in dev.coalition):
                    return EquilibriumReport(
                        "kResilience", VIOLATION, label, "strong",
                        witness=cfg, witness_outcome=result.outcome,
                        details={"plan": dev.name, "seed": seed},
                    )
    return EquilibriumReport("kResilience", NO_VIOLATION, label, "strong")


def check_t_crash_immunity(
    n: int,
    quorum_r: int,
    t: int,
    *,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
) -> EquilibriumReport:
    """A violation is any crash pattern that costs some non-faulty player
    utility against the all-correct run (threshold exactly zero)."""
    u = _valuation_of(valuation_name)
    menu = crash_menu(n, quorum_r, t)
    label = f"patterns={[d.name for d in menu]} seeds={list(seeds)}"
    for seed in seeds:
        plain = _build(
            n, quorum_r, 0, t, None,
            protocol=protocol, baiting=False,
            valuation_name=valuation_name, seed=seed,
        )
        baseline = probe_utilities(run(plain), u)
        for dev in menu:
            cfg = _build(
                n, quorum_r, 0, t, dev,
                protocol=protocol, baiting=False,
                valuation_name=valuation_name, seed=seed,
            )
            result = run(cfg)
            probes = probe_utilities(result, u)
            if any(probes[p] < baseline[p] for p in probes):
                return EquilibriumReport(
                    "tCrashImmunity", VIOLATION, label, "any-nonfaulty",
                    witness=cfg, witness_outcome=result.outcome,
                    details={"pattern": dev.name, "seed": seed},
                )
    return EquilibriumReport("tCrashImmunity", NO_VIOLATION, label, "any-nonfaulty")


def _defeated_by_baiting(
    n: int,
    quorum_r: int,
    k: int,
    t: int,
    dev: Deviation,
    *,
    protocol: str,
    valuation_name: str,
    seed: int,
) -> bool:
    """A plan is defused when the minimum defector count fits in the
    coalition and the defection run ends in Agreement."""
    try:
        m = min_baiters(n, k, t)
    except NotApplicable:
        return False
    defect = equivocation_deviation(n, quorum_r, len(dev.coalition), defectors=m)
    if defect is None:
        return False
    cfg = _build(
        n, quorum_r, k, t, defect,
        protocol=protocol, baiting=True,
        valuation_name=valuation_name, seed=seed,
    )
    return run(cfg).outcome == AGREEMENT


def check_crash_robustness(
    n: int,
    quorum_r: int,
    k: int,
    t: int,
    *,
    baiting: bool = False,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
) -> EquilibriumReport:
    """Combined budget: plans of up to k rationals with up to t crash
    allies.  Existential over coalition members per the definition.  The
    comparison holds the crash behavior fixed on both sides, so plain
    crash damage cancels out and only coalition gain counts; a pure
    crash budget (k = 0) has no coalition and delegates to the immunity
    comparison instead.  With baiting enabled a plan only counts if no
    affordable defection defuses it."""
    u = _valuation_of(valuation_name)
    details: dict = {}
    dev = equivocation_deviation(n, quorum_r, k) if k >= 1 else None
    immunity = None
    if k == 0:
        immunity = check_t_crash_immunity(
            n, quorum_r, t,
            protocol=protocol, valuation_name=valuation_name, seeds=seeds,
        )
        label = (
            f"crash-delegation[{immunity.menu}]"
            f" baiting={'on' if baiting else 'off'}"
        )
    else:
        label = (
            f"plans=[{dev.name if dev else ''}]"
            f" baiting={'on' if baiting else 'off'}"
        )
    if dev is not None:
        for seed in seeds:
            cfg = _build(
                n, quorum_r, k, t, dev,
                protocol=protocol, baiting=baiting,
                valuation_name=valuation_name, seed=seed,
            )
            base_cfg = _build(
                n, quorum_r, k, t, _follow_baseline(dev),
                protocol=protocol, baiting=baiting,
                valuation_name=valuation_name, seed=seed,
            )
            result = run(cfg)
            gained = assign_utilities(result, u)
            baseline = assign_utilities(run(base_cfg), u)
            improved = [p for p in dev.coalition if gained[p] > baseline[p]]
            if improved:
                if baiting and _defeated_by_baiting(
                    n, quorum_r, k, t, dev,
                    protocol=protocol, valuation_name=valuation_name, seed=seed,
                ):
                    details["defused"] = dev.name
                    details["effective_baiting"] = check_effective_baiting(
                        n, quorum_r, k, t,
                        protocol=protocol, valuation_name=valuation_name, seeds=seeds,
                    )
                    continue
                return EquilibriumReport(
                    "ktCrashRobustness", VIOLATION, label, "existential",
                    witness=cfg, witness_outcome=result.outcome,
                    details={"plan": dev.name, "seed": seed, "improved": improved},
                )
    if immunity is not None and immunity.verdict == VIOLATION:
        return EquilibriumReport(
            "ktCrashRobustness", VIOLATION, label, "existential",
            witness=immunity.witness, witness_outcome=immunity.witness_outcome,
            details=dict(immunity.details, delegated="crash-immunity"),
        )
    return EquilibriumReport(
        "ktCrashRobustness", NO_VIOLATION, label, "existential", details=details
    )


def check_kt_robustness(
    n: int,
    quorum_r: int,
    k: int,
    t: int,
    *,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
) -> EquilibriumReport:
    """Robustness against k rationals plus t Byzantine allies.

    Coalition gain is measured with the Byzantine behavior fixed on both
    sides of the comparison, so a pure Byzantine budget (k = 0) has
    nothing to compare and delegates to the immunity-style probe over
    the deviation menu instead."""
    u = _valuation_of(valuation_name)
    plans = []
    if k >= 1:
        plans = [
            d
            for d in (
                equivocation_deviation(n, quorum_r, k),
                joint_deviation(n, quorum_r, k, t),
            )
            if d is not None
        ]
    byz = byz_menu(n, quorum_r, t, offset=k) if k == 0 else []
    label = (
        f"plans={[d.name for d in plans]} byz={[d.name for d in byz]}"
        f" seeds={list(seeds)}"
    )
    for dev in plans:
        for seed in seeds:
            cfg = _build(
                n, quorum_r, k, t, dev,
                protocol=protocol, baiting=False,
                valuation_name=valuation_name, seed=seed,
            )
            result = run(cfg)
            gained = assign_utilities(result, u)
            baseline = assign_utilities(
                run(
                    _build(
                        n, quorum_r, k, t, _follow_baseline(dev),
                        protocol=protocol, baiting=False,
                        valuation_name=valuation_name, seed=seed,
                    )
                ),
                u,
            )
            improved = [p for p in dev.coalition if gained[p] > baseline[p]]
            if improved:
                return EquilibriumReport(
                    "ktRobustness", VIOLATION, label, "existential",
                    witness=cfg, witness_outcome=result.outcome,
                    details={"plan": dev.name, "seed": seed, "improved": improved},
                )
    for seed in seeds if byz else ():
        plain = _build(
            n, quorum_r, k, t, None,
            protocol=protocol, baiting=False,
            valuation_name=valuation_name, seed=seed,
        )
        baseline = probe_utilities(run(plain), u)
        for pattern in byz:
            cfg = _build(
                n, quorum_r, k, t, pattern,
                protocol=protocol, baiting=False,
                valuation_name=valuation_name, seed=seed,
            )
            result = run(cfg)
            probes = probe_utilities(result, u)
            if any(probes[p] < baseline[p] for p in probes):
                return EquilibriumReport(
                    "ktRobustness", VIOLATION, label, "existential",
                    witness=cfg, witness_outcome=result.outcome,
                    details={"pattern": pattern.name, "seed": seed},
                )
    return EquilibriumReport("ktRobustness", NO_VIOLATION, label, "existential")


def check_tt_immunity(
    n: int,
    quorum_r: int,
    t_crash: int,
    t_byz: int,
    *,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
) -> EquilibriumReport:
    """Immunity against t_crash crash players and t_byz Byzantine players
    acting together; non-faulty probes must not fall below all-correct."""
    u = _valuation_of(valuation_name)
    byz = byz_menu(n, quorum_r, t_byz, offset=0) or [Deviation("no-byz", {})]
    crash_side = [Deviation("no-crash", {})]
    for j in range(1, t_crash + 1):
        crash_side.append(
            Deviation(f"silent-last-{j}", {p: CrashSpec(0, ()) for p in range(n - j, n)})
        )
    label = (
        f"byz={[d.name for d in byz]} x crash={[d.name for d in crash_side]}"
        f" seeds={list(seeds)}"
    )
    for seed in seeds:
        plain = _build(
            n, quorum_r, 0, 0, None,
            protocol=protocol, baiting=False,
            valuation_name=valuation_name, seed=seed,
        )
        baseline = probe_utilities(run(plain), u)
        for b_dev in byz:
            for c_dev in crash_side:
                merged = dict(b_dev.strategies)
                if set(merged) & set(c_dev.strategies):
                    continue
                merged.update(c_dev.strategies)
                if not merged:
                    continue
                dev = Deviation(f"{b_dev.name}+{c_dev.name}", merged)
                cfg = _build(
                    n, quorum_r, 0, t_crash + t_byz, dev,
                    protocol=protocol, baiting=False,
                    valuation_name=valuation_name, seed=seed,
                )
                result = run(cfg)
                probes = probe_utilities(result, u)
                if any(probes[p] < baseline[p] for p in probes):
                    return EquilibriumReport(
                        "ttImmunity", VIOLATION, label, "any-nonfaulty",
                        witness=cfg, witness_outcome=result.outcome,
                        details={"pattern": dev.name, "seed": seed},
                    )
    return EquilibriumReport("ttImmunity", NO_VIOLATION, label, "any-nonfaulty")


# ---------------------------------------------------------------------------
# baiting checks


def check_effective_baiting(
    n: int,
    quorum_r: int,
    k: int,
    t: int,
    *,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
    reveal_rounds: tuple = (0,),
) -> bool:
    """True iff every run that plays the baiting strategy (any affordable
    defector count, any listed reveal round) ends in Agreement.  A late
    reveal that lets the split complete makes this false.  Vacuously true
    when no baiter fits the coalition."""
    try:
        m_min = min_baiters(n, k, t)
    except NotApplicable:
        return True
    for m in range(m_min, k + 1):
        for reveal in reveal_rounds:
            dev = equivocation_deviation(
                n, quorum_r, k, defectors=m, reveal_round=reveal
            )
            if dev is None:
                continue
            for seed in seeds:
                cfg = _build(
                    n, quorum_r, k, t, dev,
                    protocol=protocol, baiting=True,
                    valuation_name=valuation_name, seed=seed,
                )
                if run(cfg).outcome != AGREEMENT:
                    return False
    return True


def check_strong_baiting(
    n: int,
    quorum_r: int,
    k: int,
    t: int,
    *,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
) -> bool:
    """True iff the coalition collectively loses by being baited: the sum
    of coalition utilities under the defection run never beats the sum
    under all-follow."""
    u = _valuation_of(valuation_name)
    try:
        m_min = min_baiters(n, k, t)
    except NotApplicable:
        return True
    dev = equivocation_deviation(n, quorum_r, k, defectors=m_min)
    if dev is None:
        return True
    for seed in seeds:
        cfg = _build(
            n, quorum_r, k, t, dev,
            protocol=protocol, baiting=True,
            valuation_name=valuation_name, seed=seed,
        )
        baited = assign_utilities(run(cfg), u)
        follow_cfg = _build(
            n, quorum_r, k, t, _follow_baseline(dev),
            protocol=protocol, baiting=True,
            valuation_name=valuation_name, seed=seed,
        )
        followed = assign_utilities(run(follow_cfg), u)
        if sum(baited[p] for p in dev.coalition) > sum(followed[p] for p in dev.coalition):
            return False
    return True
