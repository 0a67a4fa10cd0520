"""Named invariant suites and the cell sweep machinery.

Each suite pins one executable claim to a finite grid of cells and
reports every cell with its expected and observed verdict.  A suite
passes only if every cell matches; failing cells carry replayable
witness configurations.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .analysis import (
    NO_VIOLATION,
    VIOLATION,
    check_crash_robustness,
    check_effective_baiting,
    check_k_resilience,
    check_kt_robustness,
    check_t_crash_immunity,
    check_tt_immunity,
    feasible_disagreement,
    map_crash_robust_to_immune,
    map_crash_robust_to_robust,
    map_immune_to_crash_robust,
    map_robust_to_crash_robust,
    min_baiters,
    _build,
)
from .engine import AGREEMENT, run
from .errors import CapExceeded, NotApplicable, ScenarioError
from .model import ByzSpec, ScenarioConfig
from .protocol import immune_params

CSV_HEADER = "n,k,t,r,property,verdict,witness-id"

PROPERTIES = (
    "kResilience",
    "tCrashImmunity",
    "ktCrashRobustness",
    "ktRobustness",
    "ttImmunity",
)

THEOREMS = (
    "thm1",
    "cor1",
    "lem2",
    "thm2",
    "thm3",
    "lem3",
    "thm4",
    "thm5",
    "thm6",
)


def thread_count(threads: Optional[int] = None) -> int:
    if threads is not None:
        return max(1, threads)
    raw = os.environ.get("RCL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _fan_out(tasks: list, worker: Callable, threads: Optional[int]) -> list:
    """Run worker over tasks, returning results in task order regardless
    of scheduling; single-threaded when no fan-out is requested."""
    count = thread_count(threads)
    if count == 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(worker, tasks))


@dataclass
class CellOutcome:
    cell: dict
    expected: str
    actual: str
    ok: bool
    witness: Optional[ScenarioConfig] = None
    note: str = ""

    @property
    def witness_id(self) -> str:
        return self.witness.digest() if self.witness is not None else ""

    def to_wire(self) -> dict:
        doc = {
            "cell": dict(self.cell),
            "expected": self.expected,
            "actual": self.actual,
            "ok": self.ok,
        }
        if self.note:
            doc["note"] = self.note
        if self.witness is not None:
            doc["witness-id"] = self.witness_id
        return doc


@dataclass
class SuiteResult:
    name: str
    cells: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.cells)

    def failures(self) -> list:
        return [c for c in self.cells if not c.ok]

    def registry(self) -> dict:
        out = {}
        for c in self.cells:
            if c.witness is not None:
                out[c.witness_id] = c.witness
        return out

    def to_wire(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "cells": [c.to_wire() for c in self.cells],
        }


# ---------------------------------------------------------------------------
# sweep


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)  # dicts keyed by CSV columns
    registry: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            lines.append(
                ",".join(
                    str(row[col]) for col in ("n", "k", "t", "r", "property", "verdict", "witness-id")
                )
            )
        return "\n".join(lines) + "\n"


def boundary_cells(max_n: int = 8, quorum_delta: int = 0, min_n: int = 3) -> list:
    """The budget boundary grid: every (n, k, t) with k + t < n, quorum
    n - t shifted by the sabotage knob."""
    cells = []
    for n in range(min_n, max_n + 1):
        for k in range(0, n):
            for t in range(0, n - k):
                r = n - t - quorum_delta
                if 1 <= r <= n:
                    cells.append((n, k, t, r))
    return cells


def run_property(
    prop: str,
    n: int,
    k: int,
    t: int,
    r: int,
    *,
    baiting: bool = False,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
):
    """Dispatch one property check for a sweep cell.  For ttImmunity the
    k column carries the crash budget and t the Byzantine budget."""
    if prop == "kResilience":
        return check_k_resilience(
            n, r, k, protocol=protocol, valuation_name=valuation_name, seeds=seeds
        )
    if prop == "tCrashImmunity":
        return check_t_crash_immunity(
            n, r, t, protocol=protocol, valuation_name=valuation_name, seeds=seeds
        )
    if prop == "ktCrashRobustness":
        return check_crash_robustness(
            n, r, k, t,
            baiting=baiting, protocol=protocol,
            valuation_name=valuation_name, seeds=seeds,
        )
    if prop == "ktRobustness":
        return check_kt_robustness(
            n, r, k, t, protocol=protocol, valuation_name=valuation_name, seeds=seeds
        )
    if prop == "ttImmunity":
        return check_tt_immunity(
            n, r, k, t, protocol=protocol, valuation_name=valuation_name, seeds=seeds
        )
    raise ScenarioError(f"unknown property {prop!r}")


def sweep(
    *,
    max_n: int = 8,
    property_name: str = "ktCrashRobustness",
    baiting: bool = False,
    protocol: str = "base",
    valuation_name: str = "default",
    seeds: tuple = (0,),
    quorum_delta: int = 0,
    cap: Optional[int] = None,
    force: bool = False,
    threads: Optional[int] = None,
) -> SweepResult:
    if property_name not in PROPERTIES:
        raise ScenarioError(f"unknown property {property_name!r}")
    cells = boundary_cells(max_n, quorum_delta)
    if cap is not None and len(cells) > cap and not force:
        raise CapExceeded(
            f"sweep would cover {len(cells)} cells, above the cap of {cap}"
        )

    def one(cell):
        n, k, t, r = cell
        report = run_property(
            property_name, n, k, t, r,
            baiting=baiting, protocol=protocol,
            valuation_name=valuation_name, seeds=seeds,
        )
        return cell, report

    result = SweepResult()
    for cell, report in _fan_out(cells, one, threads):
        n, k, t, r = cell
        result.rows.append(
            {
                "n": n,
                "k": k,
                "t": t,
                "r": r,
                "property": report.property,
                "verdict": report.verdict,
                "witness-id": report.witness_id,
            }
        )
        if report.witness is not None:
            result.registry[report.witness_id] = report.witness
    return result


# ---------------------------------------------------------------------------
# suites


def _cell(report, expected: str, cell: dict, note: str = "") -> CellOutcome:
    return CellOutcome(
        cell=cell,
        expected=expected,
        actual=report.verdict,
        ok=report.verdict == expected,
        witness=report.witness,
        note=note,
    )


def suite_thm1(
    *,
    max_n: int = 8,
    quorum_delta: int = 0,
    seeds: tuple = (0,),
    threads: Optional[int] = None,
) -> SuiteResult:
    """Boundary sweep: a violation exists exactly when k + 2t reaches n.

    The sabotage knob shrinks the quorum below n - t; the counting bound
    then misses the extra tolerance and cells just under the boundary
    must start failing."""
    result = SuiteResult("thm1" if quorum_delta == 0 else f"thm1(delta={quorum_delta})")

    def one(cell):
        n, k, t, r = cell
        report = check_crash_robustness(n, r, k, t, seeds=seeds)
        expected = VIOLATION if feasible_disagreement(n, k, t) else NO_VIOLATION
        return _cell(report, expected, {"n": n, "k": k, "t": t, "r": r})

    result.cells = _fan_out(boundary_cells(max_n, quorum_delta), one, threads)
    return result


def suite_cor1(*, seeds: tuple = (0,), **_: object) -> SuiteResult:
    """A single rational player beats the crash-tolerant quorum choice
    n - t = 3 at n = 5, and cannot beat the stricter choice 4."""
    result = SuiteResult("cor1")
    report = check_crash_robustness(5, 3, 1, 2, seeds=seeds)
    result.cells.append(_cell(report, VIOLATION, {"n": 5, "k": 1, "t": 2, "r": 3}))
    if report.witness_outcome is not None:
        result.cells.append(
            CellOutcome(
                cell={"n": 5, "k": 1, "t": 2, "r": 3, "check": "witness-outcome"},
                expected="Disagreement",
                actual=report.witness_outcome,
                ok=report.witness_outcome == "Disagreement",
                witness=report.witness,
            )
        )
    report = check_crash_robustness(5, 4, 1, 1, seeds=seeds)
    result.cells.append(_cell(report, NO_VIOLATION, {"n": 5, "k": 1, "t": 1, "r": 4}))
    return result


def _immune_cells(max_n: int) -> list:
    cells = []
    for n in range(4, max_n + 1):
        for s in range(1, n):
            if n > 3 * s:
                cells.append((n, s))
    return cells


def suite_lem2(
    *, max_n: int = 8, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """A quorum immune to s equivocators is also robust to s rationals
    colluding with s crash players."""
    result = SuiteResult("lem2")

    def one(cell):
        n, s = cell
        params = immune_params(n, s)
        report = check_crash_robustness(
            n, params.quorum_r, s, s, protocol="hardened", seeds=seeds
        )
        return _cell(report, NO_VIOLATION, {"n": n, "k": s, "t": s, "r": params.quorum_r})

    result.cells = _fan_out(_immune_cells(max_n), one, threads)
    return result


def suite_thm2(
    *, max_n: int = 8, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """Carry-over: wherever the hardened protocol shrugs off k rationals
    with t Byzantine allies, it also shrugs off k + t rationals with t
    crash allies over the same menus."""
    result = SuiteResult("thm2")
    tasks = []
    for n, s in _immune_cells(max_n):
        params = immune_params(n, s)
        for k in range(1, 3):
            if k + s < n:
                tasks.append((n, k, s, params.quorum_r))

    def one(task):
        n, k, t, r = task
        antecedent = check_kt_robustness(n, r, k, t, protocol="hardened", seeds=seeds)
        cell = {"n": n, "k": k, "t": t, "r": r}
        if antecedent.verdict != NO_VIOLATION:
            return CellOutcome(cell, "vacuous", "vacuous", True, note="antecedent failed")
        ck, ct = map_robust_to_crash_robust(k, t)
        consequent = check_crash_robustness(
            n, r, ck, ct, protocol="hardened", seeds=seeds
        )
        return _cell(consequent, NO_VIOLATION, dict(cell, mapped_k=ck, mapped_t=ct))

    result.cells = _fan_out(tasks, one, threads)
    return result


def suite_thm3(
    *, max_n: int = 9, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """Immunity to t_prime crashes plus t Byzantine players carries to
    crash-robustness at (t, t_prime + t)."""
    result = SuiteResult("thm3")
    tasks = []
    for t_prime, t in ((1, 1), (2, 1), (1, 2)):
        for n in range(4, max_n + 1):
            quorum = (n + t) // 2 + 1
            if quorum <= n - t - t_prime:
                tasks.append((n, t_prime, t, quorum))

    def one(task):
        n, t_prime, t, r = task
        antecedent = check_tt_immunity(n, r, t_prime, t, protocol="hardened", seeds=seeds)
        cell = {"n": n, "k": t_prime, "t": t, "r": r}
        if antecedent.verdict != NO_VIOLATION:
            return CellOutcome(cell, NO_VIOLATION, antecedent.verdict, False,
                               witness=antecedent.witness, note="immunity broke")
        ck, ct = map_immune_to_crash_robust(t_prime, t)
        consequent = check_crash_robustness(
            n, r, ck, ct, protocol="hardened", seeds=seeds
        )
        return _cell(consequent, NO_VIOLATION, dict(cell, mapped_k=ck, mapped_t=ct))

    result.cells = _fan_out(tasks, one, threads)
    return result


def _scripted_byz(deviation: int, n: int, s: int) -> dict:
    others = list(range(s, n))
    half = (len(others) + 1) // 2
    a, b = tuple(others[:half]), tuple(others[half:])
    subset = tuple(others[:-1]) if len(others) > 1 else tuple(others)
    return {
        p: ByzSpec(deviation, a, b, "valA", "valB", subset) for p in range(s)
    }


def suite_lem3(
    *, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """The hardened protocol rides out all six scripted deviations by s
    players: agreement holds, convictions are exact, and nobody correct
    is ever accused."""
    result = SuiteResult("lem3")
    tasks = []
    for n, s in ((4, 1), (7, 2)):
        params = immune_params(n, s)
        for deviation in range(1, 7):
            for seed in seeds:
                tasks.append((n, s, params.quorum_r, deviation, seed))

    def one(task):
        n, s, r, deviation, seed = task
        from .analysis import Deviation

        dev = Deviation(f"byz-d{deviation}-{s}", _scripted_byz(deviation, n, s))
        cfg = _build(
            n, r, 0, s, dev,
            protocol="hardened", baiting=False, valuation_name="default", seed=seed,
        )
        res = run(cfg)
        culprits = set(range(s))
        correct = [p for p in range(s, n)]
        agreed = (
            res.outcome == AGREEMENT
            and len({res.decisions[p] for p in correct}) == 1
        )
        # silence, withheld sends and junk leave no signed conflict, so
        # only the equivocating scripts may convict anyone
        expected_blacklist = culprits if deviation in (1, 5, 6) else set()
        lists_ok = all(
            set(res.blacklists[p]) == expected_blacklist for p in correct
        )
        no_false = all(
            not (set(res.blacklists[p]) - culprits) for p in range(n)
        )
        ok = agreed and lists_ok and no_false
        return CellOutcome(
            cell={"n": n, "k": 0, "t": s, "r": r, "deviation": deviation, "seed": seed},
            expected="Agreement+exact-blacklists",
            actual=res.outcome if agreed else f"{res.outcome}/blacklists",
            ok=ok,
            witness=None if ok else cfg,
        )

    result.cells = _fan_out(tasks, one, threads)
    return result


def _robust_sources(max_n: int, need_t_le_k: bool) -> list:
    """Source cells (n, k, t) where the boundary protocol at n - t has no
    feasible attack, filtered by which translation applies."""
    cells = []
    for n in range(4, max_n + 1):
        for k in range(1, n):
            for t in range(0, n - k):
                if feasible_disagreement(n, k, t):
                    continue
                s = min(k, t)
                if s < 1 or n <= 3 * s:
                    continue
                if need_t_le_k and t > k:
                    continue
                if not need_t_le_k and t < k:
                    continue
                cells.append((n, k, t))
    return cells


def suite_thm4(
    *, max_n: int = 8, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """Crash-robust sources with k >= t translate to the hardened
    protocol keeping k - t rationals honest against t Byzantine allies."""
    result = SuiteResult("thm4")

    def one(cell):
        n, k, t = cell
        antecedent = check_crash_robustness(n, n - t, k, t, seeds=seeds)
        info = {"n": n, "k": k, "t": t, "r": n - t}
        if antecedent.verdict != NO_VIOLATION:
            return CellOutcome(info, NO_VIOLATION, antecedent.verdict, False,
                               witness=antecedent.witness, note="source not robust")
        rk, rt = map_crash_robust_to_robust(k, t)
        params = immune_params(n, min(k, t))
        consequent = check_kt_robustness(
            n, params.quorum_r, rk, rt, protocol="hardened", seeds=seeds
        )
        return _cell(
            consequent, NO_VIOLATION,
            dict(info, mapped_k=rk, mapped_t=rt, hardened_r=params.quorum_r),
        )

    result.cells = _fan_out(_robust_sources(max_n, need_t_le_k=True), one, threads)
    return result


def suite_thm5(
    *, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """With the defection strategy available, cells the bound condemns
    are defused on the boundary protocol and stay defused after
    hardening: the same baiting strategy works in both worlds.

    Cells need k >= t like the no-baiting translation, and must leave
    the post-defection coalition inside the hardened exclusion margin
    (k - m <= t), otherwise convicting the remaining equivocators
    starves the quorum itself."""
    result = SuiteResult("thm5")
    tasks = [(4, 2, 1), (7, 3, 2), (10, 4, 3)]

    def one(cell):
        n, k, t = cell
        try:
            min_baiters(n, k, t)
        except NotApplicable:
            return CellOutcome(
                {"n": n, "k": k, "t": t}, "applicable", "not-applicable", False
            )
        base = check_crash_robustness(n, n - t, k, t, baiting=True, seeds=seeds)
        params = immune_params(n, min(k, t))
        hardened = check_crash_robustness(
            n, params.quorum_r, k, t,
            baiting=True, protocol="hardened", seeds=seeds,
        )
        baiting_ok = check_effective_baiting(
            n, n - t, k, t, seeds=seeds
        ) and check_effective_baiting(
            n, params.quorum_r, k, t, protocol="hardened", seeds=seeds
        )
        ok = (
            base.verdict == NO_VIOLATION
            and hardened.verdict == NO_VIOLATION
            and baiting_ok
        )
        return CellOutcome(
            cell={"n": n, "k": k, "t": t, "r": n - t, "hardened_r": params.quorum_r},
            expected=f"{NO_VIOLATION}+effective",
            actual=f"{base.verdict}/{hardened.verdict}/baiting={baiting_ok}",
            ok=ok,
            witness=base.witness or hardened.witness,
        )

    result.cells = _fan_out(tasks, one, threads)
    return result


def suite_thm6(
    *, max_n: int = 8, seeds: tuple = (0,), threads: Optional[int] = None, **_: object
) -> SuiteResult:
    """Crash-robust sources with t >= k translate to immunity against
    t - k crashes plus k Byzantine players at the widest safe quorum."""
    result = SuiteResult("thm6")

    def one(cell):
        n, k, t = cell
        antecedent = check_crash_robustness(n, n - t, k, t, seeds=seeds)
        info = {"n": n, "k": k, "t": t, "r": n - t}
        if antecedent.verdict != NO_VIOLATION:
            return CellOutcome(info, NO_VIOLATION, antecedent.verdict, False,
                               witness=antecedent.witness, note="source not robust")
        ip, ib = map_crash_robust_to_immune(k, t)
        consequent = check_tt_immunity(
            n, n - t, ip, ib, protocol="hardened", seeds=seeds
        )
        return _cell(
            consequent, NO_VIOLATION,
            dict(info, immune_crash=ip, immune_byz=ib),
        )

    result.cells = _fan_out(_robust_sources(max_n, need_t_le_k=False), one, threads)
    return result


_SUITES = {
    "thm1": suite_thm1,
    "cor1": suite_cor1,
    "lem2": suite_lem2,
    "thm2": suite_thm2,
    "thm3": suite_thm3,
    "lem3": suite_lem3,
    "thm4": suite_thm4,
    "thm5": suite_thm5,
    "thm6": suite_thm6,
}


def check_theorem(
    name: str,
    *,
    max_n: int = 8,
    quorum_delta: int = 0,
    seeds: tuple = (0,),
    threads: Optional[int] = None,
) -> SuiteResult:
    if name not in _SUITES:
        raise ScenarioError(f"unknown suite {name!r}; choose from {', '.join(THEOREMS)}")
    kwargs: dict = {"seeds": seeds, "threads": threads}
    if name == "thm1":
        kwargs.update(max_n=max_n, quorum_delta=quorum_delta)
    elif name in ("lem2", "thm2", "thm3", "thm4", "thm6"):
        kwargs.update(max_n=max_n)
    return _SUITES[name](**kwargs)
