"""Acceptance gate: eight executable criteria with pinned budgets.

Each criterion prints exactly one ``ACCEPTANCE criterion-N PASS/FAIL``
line on the real stdout, then asserts.  Oracles needed for a criterion
are implemented inside this file, independent of the library code they
check.
"""

import sys
import time

import pytest
from click.testing import CliRunner

from rcl.analysis import (
    NO_VIOLATION,
    VIOLATION,
    assign_utilities,
    check_crash_robustness,
    check_effective_baiting,
    map_crash_robust_to_immune,
    map_crash_robust_to_robust,
    map_immune_to_crash_robust,
    map_robust_to_crash_robust,
    min_baiters,
)
from rcl.cli import main as cli_main
from rcl.engine import AGREEMENT, DISAGREEMENT, run, write_trace
from rcl.errors import NoImmuneQuorum, NotApplicable, PreconditionFailed
from rcl.model import ByzSpec, make_config, valuation
from rcl.protocol import immune_params
from rcl.suites import boundary_cells, sweep


def _gate(criterion, body, capsys):
    """Run one criterion body, print its verdict line, re-raise failures.

    The verdict line goes to the real terminal, outside the capture, so
    it lands in piped output exactly once per criterion."""
    failure = None
    try:
        body()
    except BaseException as exc:
        failure = exc
    line = f"ACCEPTANCE criterion-{criterion} {'FAIL' if failure else 'PASS'}"
    with capsys.disabled():
        sys.stdout.write(f"\n{line}\n")
        sys.stdout.flush()
    if failure is not None:
        raise failure


# -- criterion 1: budget boundary ------------------------------------------


def test_criterion_1_boundary(capsys):
    def body():
        t0 = time.perf_counter()
        result = sweep(max_n=8, threads=1)
        cells = boundary_cells(8)
        assert len(result.rows) == len(cells) == 116
        for row in result.rows:
            # independent restatement of the counting bound
            expected = (
                VIOLATION if row["k"] + 2 * row["t"] >= row["n"] else NO_VIOLATION
            )
            assert row["verdict"] == expected, row
            if expected == VIOLATION:
                assert row["witness-id"], row
                witness = result.registry[row["witness-id"]]
                assert run(witness).outcome == DISAGREEMENT
            else:
                assert row["witness-id"] == ""
        assert time.perf_counter() - t0 < 120.0

    _gate(1, body, capsys)


# -- criterion 2: one equivocator at the crash-tolerant quorum -------------


def test_criterion_2_single_equivocator(capsys):
    def body():
        t0 = time.perf_counter()
        hit = check_crash_robustness(5, 3, 1, 2)
        assert hit.verdict == VIOLATION
        result = run(hit.witness)
        assert result.outcome == DISAGREEMENT
        u = assign_utilities(result, valuation("default"))
        member = hit.witness.coalition[0]
        assert u[member] == 10.0  # the disagreement payoff g
        assert u[member] > 1.0  # strictly above u_agree
        safe = check_crash_robustness(5, 4, 1, 1)
        assert safe.verdict == NO_VIOLATION
        assert time.perf_counter() - t0 < 1.0

    _gate(2, body, capsys)


# -- criterion 3: baiting escape -------------------------------------------


def _brute_defectors(n, k, t):
    """Smallest defector count that defeats every two-quorum split, by
    enumeration over defection sizes and side partitions.  A side drawn
    from the n - k outsiders may be empty; the remaining k - m members
    co-sign both quorums.  None when no m <= k suffices."""
    r = n - t
    pool = n - k
    for m in range(0, k + 1):
        signers = k - m
        splittable = any(
            a + signers >= r and b + signers >= r
            for a in range(pool + 1)
            for b in range(pool + 1 - a)
        )
        if not splittable:
            return max(m, 1)
    return None


def test_criterion_3_baiting_escape(capsys):
    def body():
        t0 = time.perf_counter()
        feasible = [
            (n, k, t, r)
            for (n, k, t, r) in boundary_cells(8)
            if k + 2 * t >= n
        ]
        assert feasible
        flipped = 0
        for n, k, t, r in feasible:
            brute = _brute_defectors(n, k, t)
            try:
                m = min_baiters(n, k, t)
            except NotApplicable:
                assert brute is None, (n, k, t, brute)
                continue
            assert m == brute, (n, k, t, m, brute)
            assert 1 <= m <= k
            report = check_crash_robustness(n, r, k, t, baiting=True)
            assert report.verdict == NO_VIOLATION, (n, k, t)
            assert check_effective_baiting(n, r, k, t) is True, (n, k, t)
            flipped += 1
        assert flipped == 27
        assert time.perf_counter() - t0 < 120.0

    _gate(3, body, capsys)


# -- criterion 4: quorum window --------------------------------------------


def test_criterion_4_quorum_window(capsys):
    def body():
        t0 = time.perf_counter()
        for n in range(2, 31):
            for s in range(0, 11):
                # a quorum r works iff any two quorums overlap in more
                # than s players and the n - s live ones can reach it
                valid = [
                    r for r in range(1, n + 1) if 2 * r - n > s and r <= n - s
                ]
                try:
                    params = immune_params(n, s)
                except NoImmuneQuorum:
                    assert not valid, (n, s)
                    assert n <= 3 * s, (n, s)
                    continue
                assert valid, (n, s)
                assert n > 3 * s, (n, s)
                assert params.quorum_r == min(valid), (n, s)
        params = immune_params(7, 2)
        combined = check_crash_robustness(7, params.quorum_r, 2, 2)
        assert combined.verdict == NO_VIOLATION
        assert time.perf_counter() - t0 < 60.0

    _gate(4, body, capsys)


# -- criterion 5: scripted deviations under the extension ------------------


def test_criterion_5_deviation_tolerance(capsys):
    def body():
        t0 = time.perf_counter()
        for n, s in ((4, 1), (7, 2)):
            params = immune_params(n, s)
            others = list(range(s, n))
            half = (len(others) + 1) // 2
            a, b = tuple(others[:half]), tuple(others[half:])
            subset = tuple(others[:-1])
            for deviation in range(1, 7):
                strategies = {
                    p: ByzSpec(deviation, a, b, "valA", "valB", subset)
                    for p in range(s)
                }
                cfg = make_config(
                    n, params.quorum_r, t=s,
                    strategies=strategies, protocol="hardened",
                )
                result = run(cfg)
                assert result.outcome == AGREEMENT, (n, deviation)
                decided = {result.decisions[p] for p in others}
                assert len(decided) == 1, (n, deviation)
                # only the equivocating scripts leave signed conflicts
                culprits = set(range(s)) if deviation in (1, 5, 6) else set()
                for p in others:
                    assert set(result.blacklists[p]) == culprits, (n, deviation)
            clean = run(make_config(n, params.quorum_r, protocol="hardened"))
            assert clean.outcome == AGREEMENT
            assert all(not clean.blacklists[p] for p in range(n))
        assert time.perf_counter() - t0 < 60.0

    _gate(5, body, capsys)


# -- criterion 6: budget translation calculators ---------------------------


# hand-derived entries, small corner of each table
_ROBUST_TO_CRASH = {(0, 0): (0, 0), (1, 0): (1, 0), (0, 1): (1, 1),
                    (1, 1): (2, 1), (2, 1): (3, 1), (1, 2): (3, 2),
                    (3, 2): (5, 2)}
_IMMUNE_TO_CRASH = {(0, 0): (0, 0), (1, 0): (0, 1), (0, 1): (1, 1),
                    (1, 1): (1, 2), (2, 1): (1, 3), (1, 2): (2, 3)}
_CRASH_TO_ROBUST = {(0, 0): (0, 0), (1, 0): (1, 0), (1, 1): (0, 1),
                    (2, 1): (1, 1), (3, 1): (2, 1), (3, 2): (1, 2)}
_CRASH_TO_IMMUNE = {(0, 0): (0, 0), (0, 1): (1, 0), (1, 1): (0, 1),
                    (1, 2): (1, 1), (1, 3): (2, 1), (2, 3): (1, 2)}


def test_criterion_6_mapping_calculators(capsys):
    def body():
        t0 = time.perf_counter()
        for args, expected in _ROBUST_TO_CRASH.items():
            assert map_robust_to_crash_robust(*args) == expected
        for args, expected in _IMMUNE_TO_CRASH.items():
            assert map_immune_to_crash_robust(*args) == expected
        for args, expected in _CRASH_TO_ROBUST.items():
            assert map_crash_robust_to_robust(*args) == expected
        for args, expected in _CRASH_TO_IMMUNE.items():
            assert map_crash_robust_to_immune(*args) == expected
        for k in range(0, 11):
            for t in range(0, 11):
                assert map_robust_to_crash_robust(k, t) == (k + t, t)
                assert map_immune_to_crash_robust(k, t) == (t, k + t)
                if k >= t:
                    assert map_crash_robust_to_robust(k, t) == (k - t, t)
                    # budget round trip is the identity
                    assert map_robust_to_crash_robust(k - t, t) == (k, t)
                else:
                    with pytest.raises(PreconditionFailed):
                        map_crash_robust_to_robust(k, t)
                if t >= k:
                    assert map_crash_robust_to_immune(k, t) == (t - k, k)
                    assert map_immune_to_crash_robust(t - k, k) == (k, t)
                else:
                    with pytest.raises(PreconditionFailed):
                        map_crash_robust_to_immune(k, t)
                with pytest.raises(PreconditionFailed):
                    map_crash_robust_to_robust(max(k, t), min(k, t), baiting=True)
                with pytest.raises(PreconditionFailed):
                    map_crash_robust_to_immune(min(k, t), max(k, t), baiting=True)
        assert time.perf_counter() - t0 < 1.0

    _gate(6, body, capsys)


# -- criterion 7: valuation independence -----------------------------------


def test_criterion_7_valuation_independence(capsys):
    def body():
        alt = sweep(max_n=8, valuation_name="alternate", threads=1)
        for row in alt.rows:
            expected = (
                VIOLATION if row["k"] + 2 * row["t"] >= row["n"] else NO_VIOLATION
            )
            assert row["verdict"] == expected, row
        hit = check_crash_robustness(5, 3, 1, 2, valuation_name="alternate")
        assert hit.verdict == VIOLATION
        safe = check_crash_robustness(5, 4, 1, 1, valuation_name="alternate")
        assert safe.verdict == NO_VIOLATION
        for n, k, t, r in boundary_cells(8):
            if k + 2 * t < n:
                continue
            try:
                min_baiters(n, k, t)
            except NotApplicable:
                continue
            report = check_crash_robustness(
                n, r, k, t, baiting=True, valuation_name="alternate"
            )
            assert report.verdict == NO_VIOLATION, (n, k, t)
            assert check_effective_baiting(
                n, r, k, t, valuation_name="alternate"
            ) is True, (n, k, t)

    _gate(7, body, capsys)


# -- criterion 8: witness determinism --------------------------------------


def test_criterion_8_witness_replay(tmp_path, capsys):
    def body():
        witnesses = {}
        for name in ("default", "alternate"):
            witnesses.update(sweep(max_n=8, valuation_name=name).registry)
        hit = check_crash_robustness(5, 3, 1, 2)
        witnesses[hit.witness.digest()] = hit.witness
        assert len(witnesses) > 50
        runner = CliRunner()
        for digest, cfg in witnesses.items():
            text = write_trace(run(cfg))
            assert write_trace(run(cfg)) == text  # bit-identical rerun
            path = tmp_path / f"{digest}.trace"
            path.write_text(text)
            outcome = runner.invoke(cli_main, ["replay", str(path)])
            assert outcome.exit_code == 0, (digest, outcome.output)
            assert outcome.output.startswith("OK ")

    _gate(8, body, capsys)
