"""Bundled scenario corpus: the worked examples as runnable files.

Every scenario has a builder that constructs it from first principles and
a frozen JSON file under ``scenarios/``.  The files are the reproduction
package; ``regenerate`` rewrites them from the builders so a test can
diff the committed bytes against the code.
"""

from __future__ import annotations

import json
from pathlib import Path

from .analysis import equivocation_deviation
from .errors import ScenarioError
from .model import (
    ByzSpec,
    CrashSpec,
    DisagreeSpec,
    PartitionSpec,
    ScenarioConfig,
    make_config,
)
from .protocol import immune_params

SCENARIO_DIR = Path(__file__).resolve().parent / "scenarios"


def _all_correct() -> ScenarioConfig:
    """Four correct players, no budgets: the baseline agreement run."""
    return make_config(4, 3)


def _corollary1() -> ScenarioConfig:
    # one rational equivocator beats the crash-tolerant quorum n - t = 3
    dev = equivocation_deviation(5, 3, 1)
    return make_config(
        5, 3, k=1, t=2,
        strategies=dict(dev.strategies),
        coalition=dev.coalition,
        policy=dev.policy,
    )


def _lemma2_attack() -> ScenarioConfig:
    """Combined attack the tightened quorum absorbs: two rational
    equivocators split the correct pool, one player is silent from the
    start and another crashes a round later.  Survivors agree anyway and
    both equivocators end up blacklisted and slashed."""
    params = immune_params(7, 2)
    a, b = (4,), (5, 6)
    strategies = {
        0: DisagreeSpec(a, b, "valA", "valB"),
        1: DisagreeSpec(a, b, "valA", "valB"),
        2: CrashSpec(0, ()),
        3: CrashSpec(1, ()),
    }
    return make_config(
        7, params.quorum_r, k=2, t=2,
        strategies=strategies, coalition=(0, 1),
        policy=PartitionSpec(tuple(sorted((0, 1) + b)), a),
        protocol="hardened",
    )


def _baiting_escape() -> ScenarioConfig:
    # split-2 with one defector: the baiter reveals in round 0, collects
    # the reward, and the remaining member eats the slash
    dev = equivocation_deviation(4, 3, 2, defectors=1)
    return make_config(
        4, 3, k=2, t=1,
        strategies=dict(dev.strategies),
        coalition=dev.coalition,
        policy=dev.policy,
        baiting=True,
    )


def _scripted(deviation: int) -> ScenarioConfig:
    """One scripted deviation by player 0 at n = 4 under the hardened
    protocol with its tightened quorum."""
    params = immune_params(4, 1)
    spec = ByzSpec(deviation, (1, 2), (3,), "valA", "valB", (1, 2))
    return make_config(
        4, params.quorum_r, t=1,
        strategies={0: spec},
        protocol="hardened",
    )


BUILDERS = {
    "all-correct": _all_correct,
    "corollary1": _corollary1,
    "lemma2-attack": _lemma2_attack,
    "baiting-escape": _baiting_escape,
    "d1": lambda: _scripted(1),
    "d2": lambda: _scripted(2),
    "d3": lambda: _scripted(3),
    "d4": lambda: _scripted(4),
    "d5": lambda: _scripted(5),
    "d6": lambda: _scripted(6),
}


def corpus_names() -> list:
    return list(BUILDERS)


def build_scenario(name: str) -> ScenarioConfig:
    if name not in BUILDERS:
        raise ScenarioError(
            f"unknown scenario {name!r}; choose from {', '.join(BUILDERS)}"
        )
    return BUILDERS[name]()


def scenario_path(name: str) -> Path:
    if name not in BUILDERS:
        raise ScenarioError(
            f"unknown scenario {name!r}; choose from {', '.join(BUILDERS)}"
        )
    return SCENARIO_DIR / f"{name}.json"


def render(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_wire(), indent=2, sort_keys=True) + "\n"


def load_scenario(name: str) -> ScenarioConfig:
    text = scenario_path(name).read_text()
    return ScenarioConfig.from_wire(json.loads(text))


def load_all() -> dict:
    return {name: load_scenario(name) for name in BUILDERS}


def regenerate(target: Path = SCENARIO_DIR) -> list:
    """Rewrite every scenario file from its builder; returns the paths."""
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, builder in BUILDERS.items():
        path = target / f"{name}.json"
        path.write_text(render(builder()))
        written.append(path)
    return written
