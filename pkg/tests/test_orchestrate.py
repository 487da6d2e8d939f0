import json
import os
import threading
import time

import pytest

from pyth2color.cnf import emit, encode, split
from pyth2color.orchestrate import PoolConfig, QueueBridge, job_queue_bridge, run_campaign
from pyth2color.solver import SolveResult, Verdict, solve
from pyth2color.split import choose_bfs, choose_random


def cubes_for(sys, specials):
    doc, table = encode(sys)
    return split(doc, table, specials)


def delayed_job(sat_index, cubes, delay=0.4):
    """Cube ``sat_index`` answers SAT quickly; every other cube idles until stopped."""
    docs = {id(doc): i for i, (_, doc) in enumerate(cubes)}
    calls = []

    def job(doc, stop):
        i = docs[id(doc)]
        calls.append(i)
        if i == sat_index:
            time.sleep(0.05)
            return solve(doc)
        if stop.wait(delay):
            return SolveResult(Verdict.INDETERMINATE, diagnostics="cancelled")
        return SolveResult(Verdict.UNSAT)

    return job, calls


def test_first_sat_stops_the_rest(pyth):
    cubes = cubes_for(pyth(100), choose_bfs(pyth(100), 3).specials)
    job, _ = delayed_job(2, cubes)
    t0 = time.perf_counter()
    res = run_campaign(cubes, PoolConfig(pool_size=4, solver=job))
    elapsed = time.perf_counter() - t0
    assert res.outcome is Verdict.SAT and res.winner == 2
    assert cubes[2][1].satisfied_by(res.model)
    assert elapsed < 7 * 0.4  # sequential would idle through seven slow cubes
    kinds = [e["event"] for e in res.events]
    assert "stop" in kinds and "cancelled" in kinds
    stop_at = kinds.index("stop")
    assert "start" not in kinds[stop_at:]
    assert res.summary()["winning_cube"] == [[v, val] for v, val in cubes[2][0].assignments]


def test_no_launch_after_stop(pyth):
    cubes = cubes_for(pyth(100), choose_bfs(pyth(100), 3).specials)
    job, calls = delayed_job(0, cubes, delay=5)
    res = run_campaign(cubes, PoolConfig(pool_size=2, solver=job))
    assert res.outcome is Verdict.SAT and res.winner == 0
    assert sorted(calls) == [0, 1]
    skipped = [e["cube"] for e in res.events if e["event"] == "skipped"]
    assert skipped == list(range(2, 8))
    assert sorted(res.unresolved) == list(range(1, 8))


def test_fano_split_is_unsat(fano):
    cubes = cubes_for(fano, [1, 2])
    res = run_campaign(cubes, PoolConfig(pool_size=4))
    assert res.outcome is Verdict.UNSAT and res.model is None
    assert [r.verdict for r in res.records] == [Verdict.UNSAT] * 4
    assert sum(e["event"] == "finish" for e in res.events) == 4


@pytest.mark.parametrize("pool", [1, 3])
def test_pool_size_caps_concurrency(pyth, pool):
    cubes = cubes_for(pyth(60), [3, 5])
    live = [0]
    peak = [0]
    lock = threading.Lock()

    def job(doc, stop):
        with lock:
            live[0] += 1
            peak[0] = max(peak[0], live[0])
        time.sleep(0.05)
        try:
            return SolveResult(Verdict.UNSAT)
        finally:
            with lock:
                live[0] -= 1

    res = run_campaign(cubes, PoolConfig(pool_size=pool, solver=job))
    assert res.outcome is Verdict.UNSAT
    assert peak[0] <= pool


def test_serial_pool_matches_parallel(pyth):
    cubes = cubes_for(pyth(200), choose_bfs(pyth(200), 2).specials)
    a = run_campaign(cubes, PoolConfig(pool_size=1))
    b = run_campaign(cubes, PoolConfig(pool_size=4))
    assert a.outcome is b.outcome is Verdict.SAT


def test_verdicts_match_direct_solve(pyth):
    checked = 0
    for n in range(5, 61, 5):
        sys = pyth(n)
        if not sys.edges:
            continue
        doc, table = encode(sys)
        direct = solve(doc).verdict
        plans = [choose_bfs(sys, m).specials for m in range(1, min(3, len(sys.vertices)) + 1)]
        plans += [choose_random(sys, m, seed=n).specials for m in range(1, min(3, len(sys.vertices)) + 1)]
        for specials in plans:
            res = run_campaign(split(doc, table, specials), PoolConfig(pool_size=3))
            assert res.outcome is direct
            checked += 1
    assert checked >= 40


def test_worker_crash_is_contained(pyth):
    cubes = cubes_for(pyth(60), [3, 5])
    first = id(cubes[0][1])

    def job(doc, stop):
        if id(doc) == first:
            raise RuntimeError("boom")
        return SolveResult(Verdict.UNSAT)

    res = run_campaign(cubes, PoolConfig(pool_size=2, solver=job))
    assert res.outcome is Verdict.INDETERMINATE
    assert res.records[0].verdict is Verdict.INDETERMINATE
    assert "boom" in res.records[0].diagnostics
    assert res.unresolved == [0]
    assert all(r.verdict is Verdict.UNSAT for r in res.records[1:])


def test_lying_job_is_not_trusted(fano):
    cubes = cubes_for(fano, [1])
    res = run_campaign(cubes, PoolConfig(solver=lambda doc, stop: SolveResult(Verdict.SAT, model=tuple(range(1, 8)))))
    assert res.outcome is Verdict.INDETERMINATE
    assert all("does not satisfy" in r.diagnostics for r in res.records)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        PoolConfig(pool_size=0)
    with pytest.raises(Exception):
        PoolConfig(solver=str(tmp_path / "missing-solver"))
    with pytest.raises(ValueError):
        run_campaign([], PoolConfig())


def test_event_log_is_jsonl(fano, tmp_path):
    res = run_campaign(cubes_for(fano, [1]), PoolConfig(pool_size=2))
    path = tmp_path / "events.jsonl"
    res.write_log(path)
    lines = [json.loads(l) for l in open(path)]
    assert lines == res.events and {e["event"] for e in lines} >= {"start", "finish"}


# -- file-polling bridge ---------------------------------------------------------


def test_bridge_stub_sat(pyth, stub_solver, tmp_path):
    cubes = cubes_for(pyth(100), [3, 5])
    bridge = job_queue_bridge(tmp_path / "jobs", poll=0.05, pool_size=2, timeout=60)
    scripts = bridge.write_jobs(cubes, [stub_solver("slow")])
    assert [os.path.basename(s) for s in scripts] == [f"cube_{i}.sh" for i in range(4)]
    assert open(tmp_path / "jobs" / "cube_1.cnf").read() == emit(cubes[1][1])
    res = bridge.run()
    assert res.outcome is Verdict.SAT
    assert cubes[res.winner][1].satisfied_by(res.model)
    starts = [e for e in res.events if e["event"] == "start"]
    assert len(starts) <= 4


def test_bridge_garbage_output(fano, stub_solver, tmp_path):
    bridge = QueueBridge(tmp_path / "jobs", poll=0.05, pool_size=2, timeout=60)
    bridge.write_jobs(cubes_for(fano, [1]), [stub_solver("garbage")])
    res = bridge.run()
    assert res.outcome is Verdict.INDETERMINATE
    assert all(r.verdict is Verdict.INDETERMINATE for r in res.records)


def test_bridge_unsat(fano, stub_solver, tmp_path):
    bridge = QueueBridge(tmp_path / "jobs", poll=0.05, pool_size=2, timeout=60)
    bridge.write_jobs(cubes_for(fano, [1, 2]), [stub_solver()])
    assert bridge.run().outcome is Verdict.UNSAT


def test_bridge_empty_dir_times_out(tmp_path):
    (tmp_path / "jobs").mkdir()
    t0 = time.perf_counter()
    res = QueueBridge(tmp_path / "jobs", poll=0.05, timeout=0.3).run()
    assert res.outcome is Verdict.INDETERMINATE and res.records == []
    assert 0.25 <= time.perf_counter() - t0 < 5


def test_bridge_timeout_kills_jobs(fano, stub_solver, tmp_path):
    bridge = QueueBridge(tmp_path / "jobs", poll=0.05, pool_size=2, timeout=1.0)
    bridge.write_jobs(cubes_for(fano, [1]), [stub_solver("sleep")])
    t0 = time.perf_counter()
    res = bridge.run()
    assert time.perf_counter() - t0 < 10
    assert res.outcome is Verdict.INDETERMINATE
    assert {r.diagnostics for r in res.records} == {"timeout"}
