import pytest

from rcl.analysis import NO_VIOLATION, VIOLATION, Deviation, feasible_disagreement
from rcl.engine import AGREEMENT, replay, run, write_trace
from rcl.errors import CapExceeded, ScenarioError
from rcl.model import ByzSpec, make_config
from rcl.protocol import immune_params
from rcl.suites import (
    CSV_HEADER,
    PROPERTIES,
    THEOREMS,
    boundary_cells,
    check_theorem,
    run_property,
    sweep,
    thread_count,
)


class TestSuites:
    @pytest.mark.parametrize("name", THEOREMS)
    def test_every_suite_passes(self, name):
        result = check_theorem(name)
        assert result.passed, [c.to_wire() for c in result.failures()]
        assert result.cells

    def test_unknown_suite_rejected(self):
        with pytest.raises(ScenarioError):
            check_theorem("thm99")

    def test_boundary_exactness(self):
        """Every boundary cell's verdict matches the counting threshold,
        and both verdicts actually occur across the grid."""
        result = check_theorem("thm1", max_n=6)
        verdicts = set()
        for cell in result.cells:
            n, k, t = cell.cell["n"], cell.cell["k"], cell.cell["t"]
            expected = VIOLATION if feasible_disagreement(n, k, t) else NO_VIOLATION
            assert cell.expected == expected
            assert cell.actual == expected
            verdicts.add(cell.actual)
        assert verdicts == {VIOLATION, NO_VIOLATION}

    def test_shrunken_quorum_breaks_boundary(self):
        # negative control: one notch of sabotage must produce witnessed
        # failures just under the threshold
        result = check_theorem("thm1", max_n=6, quorum_delta=1)
        assert not result.passed
        failures = result.failures()
        assert failures
        witnessed = [c for c in failures if c.witness is not None]
        assert witnessed
        for cell in witnessed:
            assert cell.witness_id == cell.witness.digest()
            assert result.registry()[cell.witness_id] is cell.witness

    def test_failure_witness_replays(self):
        result = check_theorem("thm1", max_n=5, quorum_delta=1)
        cfg = next(c.witness for c in result.failures() if c.witness is not None)
        first = run(cfg)
        again = replay(write_trace(first))
        assert again.outcome == first.outcome
        assert write_trace(again) == write_trace(first)

    def test_wire_form(self):
        result = check_theorem("cor1")
        doc = result.to_wire()
        assert doc["suite"] == "cor1"
        assert doc["passed"] is True
        assert all(set(c) >= {"cell", "expected", "actual", "ok"} for c in doc["cells"])


class TestLemma3Convictions:
    def test_suite_convicts_exactly(self):
        result = check_theorem("lem3")
        assert result.passed
        deviations = {c.cell["deviation"] for c in result.cells}
        assert deviations == {1, 2, 3, 4, 5, 6}

    def test_equivocator_blacklisted_by_hand(self):
        """Out-of-band check that the suite's conviction claim is real:
        a lone split-world sender at n = 4 ends up on every correct
        player's blacklist and agreement still lands."""
        params = immune_params(4, 1)
        dev = Deviation(
            "byz-d1-1", {0: ByzSpec(1, (1, 2), (3,), "valA", "valB", ())}
        )
        cfg = make_config(
            4, params.quorum_r,
            t=1,
            strategies=dev.strategies,
            protocol="hardened",
        )
        res = run(cfg)
        assert res.outcome == AGREEMENT
        for p in (1, 2, 3):
            assert set(res.blacklists[p]) == {0}

    def test_silent_byzantine_never_accused(self):
        params = immune_params(4, 1)
        dev = Deviation(
            "byz-d2-1", {0: ByzSpec(2, (1, 2), (3,), "valA", "valB", ())}
        )
        cfg = make_config(
            4, params.quorum_r,
            t=1,
            strategies=dev.strategies,
            protocol="hardened",
        )
        res = run(cfg)
        assert res.outcome == AGREEMENT
        for p in (1, 2, 3):
            assert set(res.blacklists[p]) == set()


class TestSweep:
    def test_csv_header(self):
        result = sweep(max_n=4)
        lines = result.to_csv().splitlines()
        assert lines[0] == "n,k,t,r,property,verdict,witness-id"
        assert lines[0] == CSV_HEADER
        assert len(lines) == len(result.rows) + 1

    def test_rows_cover_boundary_grid(self):
        result = sweep(max_n=5)
        cells = boundary_cells(5)
        assert len(result.rows) == len(cells)
        got = [(r["n"], r["k"], r["t"], r["r"]) for r in result.rows]
        assert got == cells

    def test_verdict_columns_match_feasibility(self):
        result = sweep(max_n=5)
        for row in result.rows:
            expected = (
                VIOLATION
                if feasible_disagreement(row["n"], row["k"], row["t"])
                else NO_VIOLATION
            )
            assert row["verdict"] == expected
            if row["verdict"] == VIOLATION:
                assert row["witness-id"]
            else:
                assert row["witness-id"] == ""

    def test_cap_without_force(self):
        with pytest.raises(CapExceeded):
            sweep(max_n=8, cap=10)

    def test_cap_with_force(self):
        result = sweep(max_n=4, cap=1, force=True)
        assert len(result.rows) == len(boundary_cells(4))

    def test_registry_witnesses_replay(self):
        result = sweep(max_n=5)
        assert result.registry
        for row in result.rows:
            if row["witness-id"]:
                assert row["witness-id"] in result.registry
        # each distinct witness replays bit-identically
        for wid, cfg in result.registry.items():
            assert cfg.digest() == wid
            first = run(cfg)
            again = replay(write_trace(first))
            assert write_trace(again) == write_trace(first)

    def test_unknown_property_rejected(self):
        with pytest.raises(ScenarioError):
            sweep(max_n=4, property_name="ktTypo")
        with pytest.raises(ScenarioError):
            run_property("ktTypo", 4, 1, 1, 3)

    @pytest.mark.parametrize("prop", PROPERTIES)
    def test_each_property_dispatches(self, prop):
        report = run_property(prop, 4, 1, 1, 3)
        assert report.property == prop
        assert report.verdict in (VIOLATION, NO_VIOLATION)


class TestFanOut:
    def test_threaded_sweep_is_deterministic(self):
        serial = sweep(max_n=5, property_name="ktCrashRobustness", threads=1)
        fanned = sweep(max_n=5, property_name="ktCrashRobustness", threads=2)
        assert fanned.to_csv() == serial.to_csv()
        assert set(fanned.registry) == set(serial.registry)

    def test_threaded_suite_is_deterministic(self):
        serial = check_theorem("thm1", max_n=6, threads=1)
        fanned = check_theorem("thm1", max_n=6, threads=3)
        assert [c.to_wire() for c in fanned.cells] == [
            c.to_wire() for c in serial.cells
        ]

    def test_thread_count_sources(self, monkeypatch):
        monkeypatch.delenv("RCL_THREADS", raising=False)
        assert thread_count() == 1
        assert thread_count(4) == 4
        assert thread_count(0) == 1
        monkeypatch.setenv("RCL_THREADS", "3")
        assert thread_count() == 3
        assert thread_count(2) == 2
        monkeypatch.setenv("RCL_THREADS", "junk")
        assert thread_count() == 1
