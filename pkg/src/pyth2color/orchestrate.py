"""Run cube documents on a bounded worker pool, stopping everything at the first SAT."""

from __future__ import annotations

import json
import os
import re
import shlex
import signal
import subprocess
import threading
import time
from collections import deque
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cnf import CnfDocument, Cube, emit, parse
from .solver import SolveResult, Verdict, solve, solve_external
from .solver.external import interpret_output, resolve_solver

Job = Callable[[CnfDocument, threading.Event], SolveResult]


@dataclass(frozen=True)
class PoolConfig:
    """``solver`` is ``"embedded"``, a path to a DIMACS solver binary, or a ``Job`` callable."""

    pool_size: int = 10
    max_conflicts: int | None = None
    time_limit: float | None = None
    solver: str | Job = "embedded"
    solver_args: tuple[str, ...] = ()
    seed: int = 0
    check_every: int = 1000

    def __post_init__(self):
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        if isinstance(self.solver, str) and self.solver != "embedded":
            resolve_solver(self.solver)

    def job(self) -> Job:
        if callable(self.solver):
            return self.solver
        if self.solver == "embedded":
            return lambda doc, stop: solve(
                doc,
                max_conflicts=self.max_conflicts,
                time_limit=self.time_limit,
                seed=self.seed,
                stop=stop,
                check_every=self.check_every,
            )
        path = self.solver
        return lambda doc, stop: solve_external(
            doc, path, self.solver_args, timeout=self.time_limit, stop=stop
        )


@dataclass
class CubeRecord:
    index: int
    cube: Cube
    verdict: Verdict | None = None
    started: float | None = None
    finished: float | None = None
    stats: dict = field(default_factory=dict)
    diagnostics: str = ""

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "cube": [[v, val] for v, val in self.cube.assignments],
            "verdict": self.verdict.value if self.verdict else None,
            "started": self.started,
            "finished": self.finished,
            "stats": self.stats,
            "diagnostics": self.diagnostics,
        }


@dataclass
class CampaignResult:
    outcome: Verdict
    model: tuple[int, ...] | None
    winner: int | None
    records: list[CubeRecord]
    events: list[dict]

    @property
    def unresolved(self) -> list[int]:
        return [r.index for r in self.records if r.verdict is not Verdict.UNSAT and r.index != self.winner]

    def write_log(self, path: str | os.PathLike) -> None:
        with open(path, "w") as f:
            for ev in self.events:
                f.write(json.dumps(ev) + "\n")

    def summary(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "winner": self.winner,
            "winning_cube": self.records[self.winner].as_dict()["cube"] if self.winner is not None else None,
            "unresolved": self.unresolved if self.outcome is Verdict.INDETERMINATE else [],
            "cubes": [r.as_dict() for r in self.records],
        }


def _outcome(records: list[CubeRecord], winner: int | None) -> Verdict:
    if winner is not None:
        return Verdict.SAT
    if all(r.verdict is Verdict.UNSAT for r in records):
        return Verdict.UNSAT
    return Verdict.INDETERMINATE


def run_campaign(cubes: Sequence[tuple[Cube, CnfDocument]], config: PoolConfig) -> CampaignResult:
    """Solve cube documents with at most ``pool_size`` in flight.

    The first SAT answer (with a model checked against its cube document)
    sets the shared stop flag; no further jobs start and running ones are
    asked to stop. Records come back ordered by cube index.
    """
    if not cubes:
        raise ValueError("no cubes to run")
    job = config.job()
    stop = threading.Event()
    t0 = time.perf_counter()
    events: list[dict] = []
    records = [CubeRecord(i, cube) for i, (cube, _) in enumerate(cubes)]

    def log(event: str, index: int | None = None, **extra) -> None:
        events.append({"t": round(time.perf_counter() - t0, 6), "event": event, "cube": index, **extra})

    def run_one(i: int) -> SolveResult:
        try:
            return job(cubes[i][1], stop)
        except Exception as exc:  # worker crash: record and keep going
            return SolveResult(Verdict.INDETERMINATE, diagnostics=f"worker crashed: {exc!r}")

    pending = deque(range(len(cubes)))
    in_flight = {}
    winner = None
    model = None
    with ThreadPoolExecutor(max_workers=config.pool_size) as ex:

        def launch():
            while pending and len(in_flight) < config.pool_size and not stop.is_set():
                i = pending.popleft()
                records[i].started = time.perf_counter() - t0
                log("start", i)
                in_flight[ex.submit(run_one, i)] = i

        launch()
        while in_flight:
            done, _ = wait(in_flight, return_when=FIRST_COMPLETED)
            for fut in sorted(done, key=in_flight.get):
                i = in_flight.pop(fut)
                res = fut.result()
                rec = records[i]
                rec.finished = time.perf_counter() - t0
                rec.stats = res.stats.as_dict()
                rec.diagnostics = res.diagnostics
                rec.verdict = res.verdict
                if res.verdict is Verdict.SAT and not cubes[i][1].satisfied_by(res.model):
                    rec.verdict = Verdict.INDETERMINATE
                    rec.diagnostics = "model does not satisfy the cube document"
                log("cancelled" if res.diagnostics == "cancelled" else "finish", i, verdict=rec.verdict.value)
                if rec.verdict is Verdict.SAT and winner is None:
                    winner, model = i, res.model
                    stop.set()
                    log("stop", i)
            launch()
    for i in pending:
        records[i].verdict = Verdict.INDETERMINATE
        records[i].diagnostics = "not started"
        log("skipped", i)
    return CampaignResult(_outcome(records, winner), model, winner, records, events)


# -- file-polling bridge -----------------------------------------------------

LAUNCHER_TEMPLATE = """#!/bin/sh
# cube {index}: {label}
cd "$(dirname "$0")" || exit 1
{solver} cube_{index}.cnf > cube_{index}.out.part 2> cube_{index}.err
mv cube_{index}.out.part cube_{index}.out
"""

_CUBE_FILE = re.compile(r"cube_(\d+)\.cnf$")


class QueueBridge:
    """Drive a campaign through files, the way a batch queue would.

    Each cube gets ``cube_<i>.cnf`` and a launcher ``cube_<i>.sh``; a job is
    finished once ``cube_<i>.out`` exists (written via rename, so it is
    never seen half-written). ``launcher`` is the command prefix used to
    start a script, ``sh`` locally or a queue submission command elsewhere.
    """

    def __init__(
        self,
        scripts_dir: str | os.PathLike,
        poll: float = 0.1,
        pool_size: int = 10,
        timeout: float | None = None,
        launcher: Sequence[str] = ("sh",),
    ):
        self.dir = os.fspath(scripts_dir)
        self.poll = poll
        self.pool_size = pool_size
        self.timeout = timeout
        self.launcher = list(launcher)

    def write_jobs(self, cubes: Sequence[tuple[Cube, CnfDocument]], solver_cmd: Sequence[str]) -> list[str]:
        os.makedirs(self.dir, exist_ok=True)
        scripts = []
        for i, (cube, doc) in enumerate(cubes):
            with open(os.path.join(self.dir, f"cube_{i}.cnf"), "w") as f:
                f.write(emit(doc))
            script = os.path.join(self.dir, f"cube_{i}.sh")
            text = LAUNCHER_TEMPLATE.format(
                index=i, label=cube.label(), solver=" ".join(shlex.quote(s) for s in solver_cmd)
            )
            tmp = script + ".tmp"
            with open(tmp, "w") as f:
                f.write(text)
            os.chmod(tmp, 0o755)
            os.replace(tmp, script)
            scripts.append(script)
        return scripts

    def _jobs(self) -> list[int]:
        found = []
        for name in os.listdir(self.dir) if os.path.isdir(self.dir) else ():
            m = _CUBE_FILE.match(name)
            if m and os.path.exists(os.path.join(self.dir, f"cube_{m.group(1)}.sh")):
                found.append(int(m.group(1)))
        return sorted(found)

    def _kill(self, proc: subprocess.Popen) -> None:
        if proc.poll() is None:
            try:
                os.killpg(proc.pid, signal.SIGTERM)
            except ProcessLookupError:
                pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            os.killpg(proc.pid, signal.SIGKILL)
            proc.wait()

    def run(self) -> CampaignResult:
        t0 = time.perf_counter()
        events: list[dict] = []

        def log(event, index=None, **extra):
            events.append({"t": round(time.perf_counter() - t0, 6), "event": event, "cube": index, **extra})

        indices = self._jobs()
        docs = {}
        records = []
        for i in indices:
            with open(os.path.join(self.dir, f"cube_{i}.cnf")) as f:
                docs[i] = parse(f.read())
            records.append(CubeRecord(i, Cube()))
        by_index = {r.index: r for r in records}
        pending = deque(indices)
        running: dict[int, subprocess.Popen] = {}
        winner = model = None

        while True:
            while pending and len(running) < self.pool_size and winner is None:
                i = pending.popleft()
                by_index[i].started = time.perf_counter() - t0
                log("start", i)
                running[i] = subprocess.Popen(
                    [*self.launcher, os.path.join(self.dir, f"cube_{i}.sh")],
                    stdout=subprocess.DEVNULL,
                    stderr=subprocess.DEVNULL,
                    start_new_session=True,
                )
            for i in list(running):
                out_path = os.path.join(self.dir, f"cube_{i}.out")
                proc = running[i]
                if os.path.exists(out_path):
                    with open(out_path, errors="replace") as f:
                        text = f.read()
                    verdict, mdl, diag = interpret_output(docs[i], text, proc.poll())
                elif proc.poll() is not None and self.launcher == ["sh"]:
                    verdict, mdl, diag = Verdict.INDETERMINATE, None, f"launcher exited {proc.returncode} without output"
                else:
                    continue
                self._kill(proc)
                del running[i]
                rec = by_index[i]
                rec.finished = time.perf_counter() - t0
                rec.verdict, rec.diagnostics = verdict, diag
                log("finish", i, verdict=verdict.value)
                if verdict is Verdict.SAT and winner is None:
                    winner, model = i, mdl
                    log("stop", i)
            if winner is not None:
                for i, proc in running.items():
                    self._kill(proc)
                    by_index[i].verdict = Verdict.INDETERMINATE
                    by_index[i].diagnostics = "cancelled"
                    by_index[i].finished = time.perf_counter() - t0
                    log("cancelled", i)
                running.clear()
                break
            if not running and not pending:
                if records or self.timeout is None:
                    break
            if self.timeout is not None and time.perf_counter() - t0 >= self.timeout:
                for i, proc in running.items():
                    self._kill(proc)
                    by_index[i].verdict = Verdict.INDETERMINATE
                    by_index[i].diagnostics = "timeout"
                    log("timeout", i)
                running.clear()
                break
            time.sleep(self.poll)

        for i in pending:
            by_index[i].verdict = Verdict.INDETERMINATE
            by_index[i].diagnostics = "not started"
            log("skipped", i)
        if not records:
            return CampaignResult(Verdict.INDETERMINATE, None, None, [], events)
        # records are positional; winner is reported as a position in that list
        pos = {r.index: k for k, r in enumerate(records)}
        win = pos[winner] if winner is not None else None
        return CampaignResult(_outcome(records, win), model, win, records, events)


def job_queue_bridge(
    scripts_dir: str | os.PathLike,
    poll: float = 0.1,
    pool_size: int = 10,
    timeout: float | None = None,
    launcher: Sequence[str] = ("sh",),
) -> QueueBridge:
    return QueueBridge(scripts_dir, poll=poll, pool_size=pool_size, timeout=timeout, launcher=launcher)
