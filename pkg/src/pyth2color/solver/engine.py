"""Embedded CDCL solver: Python driver around the array kernel."""

from __future__ import annotations

import enum
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from ..cnf import CnfDocument
from . import _kernel as K


class Verdict(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    restarts: int = 0
    learned: int = 0
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {
            "decisions": self.decisions,
            "propagations": self.propagations,
            "conflicts": self.conflicts,
            "restarts": self.restarts,
            "learned": self.learned,
            "elapsed": self.elapsed,
        }


@dataclass(frozen=True)
class SolveResult:
    verdict: Verdict
    model: tuple[int, ...] | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    diagnostics: str = ""

    @property
    def is_sat(self) -> bool:
        return self.verdict is Verdict.SAT


class ModelError(AssertionError):
    """A SAT claim whose model falsifies some clause."""


def check_model(doc: CnfDocument, model) -> None:
    if not doc.satisfied_by(model):
        raise ModelError("model does not satisfy every clause")


def _to_lit(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


class Solver:
    """One embedded solver instance. Not shared between threads.

    ``check_every`` is the number of conflicts between polls of the stop
    flag, the clock and the conflict budget; it bounds cancellation latency.
    """

    def __init__(self, doc: CnfDocument, seed: int = 0, check_every: int = 1000, search=None):
        self.doc = doc
        self.seed = seed
        self.check_every = max(1, int(check_every))
        self._search = search if search is not None else K.search
        self._setup()

    def _setup(self) -> None:
        n = self.doc.var_count
        self.n = n
        self.trivial: str | None = None
        self.ist = K.new_ist()
        self.fst = K.new_fst()
        long_clauses: list[list[int]] = []
        units: list[int] = []
        for clause in self.doc.clauses:
            lits = set()
            taut = False
            for x in clause:
                lit = _to_lit(x)
                if lit ^ 1 in lits:
                    taut = True
                    break
                lits.add(lit)
            if taut:
                continue
            if not lits:
                self.trivial = "empty clause"
                return
            if len(lits) == 1:
                units.append(lits.pop())
            else:
                long_clauses.append(sorted(lits))

        m = len(long_clauses)
        total = sum(len(c) for c in long_clauses)
        cap_cl = max(64, 2 * m)
        cap_lits = max(total + 4 * (n + 1), 2 * total)
        self.lits = np.zeros(cap_lits, dtype=np.int64)
        self.start = np.zeros(cap_cl, dtype=np.int64)
        self.length = np.zeros(cap_cl, dtype=np.int64)
        self.w_head = np.full(max(2 * n, 1), -1, dtype=np.int64)
        self.w_next = np.full(2 * cap_cl, -1, dtype=np.int64)
        self.assign = np.full(n, -1, dtype=np.int64)
        self.level = np.zeros(n, dtype=np.int64)
        self.reason = np.full(n, -1, dtype=np.int64)
        self.phase = np.full(n, -1, dtype=np.int64)
        self.seen = np.zeros(n, dtype=np.int64)
        self.trail = np.zeros(max(n, 1), dtype=np.int64)
        self.trail_lim = np.zeros(n + 1, dtype=np.int64)
        self.heap = np.zeros(max(n, 1), dtype=np.int64)
        self.pos = np.full(n, -1, dtype=np.int64)
        self.learnt = np.zeros(n + 1, dtype=np.int64)
        self.fst[K.VAR_INC] = 1.0
        self.fst[K.RESTART_INTERVAL] = 100.0
        self.ist[K.NEXT_RESTART] = 100
        rng = np.random.default_rng(self.seed)
        self.act = rng.random(n) * 1e-3 if n else np.zeros(0)

        used = 0
        for c, lits in enumerate(long_clauses):
            self.start[c] = used
            self.length[c] = len(lits)
            self.lits[used : used + len(lits)] = lits
            used += len(lits)
            K.attach(self.lits, self.start, self.w_head, self.w_next, c)
        self.ist[K.N_CLAUSES] = m
        self.ist[K.LITS_USED] = used

        for lit in units:
            val = self.assign[lit >> 1]
            if val >= 0:
                if val != 1 - (lit & 1):
                    self.trivial = "conflicting unit clauses"
                    return
                continue
            K.enqueue(self.assign, self.level, self.reason, self.trail, self.ist, lit, -1)

        size = 0
        for v in range(n):
            if self.assign[v] < 0:
                size = K.heap_insert(self.heap, self.pos, self.act, size, v)
        self.ist[K.HEAP_SIZE] = size

    def _grow(self) -> None:
        if self.ist[K.N_CLAUSES] >= self.start.shape[0]:
            cap = 2 * self.start.shape[0]
            self.start = np.concatenate([self.start, np.zeros(cap - self.start.shape[0], np.int64)])
            self.length = np.concatenate([self.length, np.zeros(cap - self.length.shape[0], np.int64)])
            self.w_next = np.concatenate([self.w_next, np.full(2 * cap - self.w_next.shape[0], -1, np.int64)])
        if self.ist[K.LITS_USED] + self.n + 1 > self.lits.shape[0]:
            cap = 2 * self.lits.shape[0] + self.n + 1
            self.lits = np.concatenate([self.lits, np.zeros(cap - self.lits.shape[0], np.int64)])

    def stats(self, elapsed: float) -> SolveStats:
        ist = self.ist
        return SolveStats(
            decisions=int(ist[K.DECISIONS]),
            propagations=int(ist[K.PROPAGATIONS]),
            conflicts=int(ist[K.CONFLICTS]),
            restarts=int(ist[K.RESTARTS]),
            learned=int(ist[K.LEARNED]),
            elapsed=elapsed,
        )

    def run(
        self,
        max_conflicts: int | None = None,
        time_limit: float | None = None,
        stop: threading.Event | None = None,
    ) -> SolveResult:
        t0 = time.perf_counter()
        if self.trivial is not None:
            return SolveResult(Verdict.UNSAT, None, self.stats(0.0), self.trivial)
        while True:
            if stop is not None and stop.is_set():
                return SolveResult(
                    Verdict.INDETERMINATE, None, self.stats(time.perf_counter() - t0), "cancelled"
                )
            elapsed = time.perf_counter() - t0
            if time_limit is not None and elapsed >= time_limit:
                return SolveResult(Verdict.INDETERMINATE, None, self.stats(elapsed), "time limit")
            conflicts = int(self.ist[K.CONFLICTS])
            if max_conflicts is not None and conflicts >= max_conflicts:
                return SolveResult(Verdict.INDETERMINATE, None, self.stats(elapsed), "conflict limit")
            target = conflicts + self.check_every
            if max_conflicts is not None:
                target = min(target, max_conflicts)
            code = self._search(
                self.lits, self.start, self.length, self.w_head, self.w_next,
                self.assign, self.level, self.reason, self.phase, self.seen,
                self.trail, self.trail_lim, self.act, self.heap, self.pos, self.learnt,
                self.ist, self.fst, target,
            )
            if code == K.NEED_SPACE:
                self._grow()
            elif code == K.SAT:
                model = tuple(
                    (v + 1) if self.assign[v] == 1 else -(v + 1) for v in range(self.n)
                )
                check_model(self.doc, model)
                return SolveResult(Verdict.SAT, model, self.stats(time.perf_counter() - t0))
            elif code == K.UNSAT:
                return SolveResult(Verdict.UNSAT, None, self.stats(time.perf_counter() - t0))


def solve(
    doc: CnfDocument,
    max_conflicts: int | None = None,
    time_limit: float | None = None,
    seed: int = 0,
    stop: threading.Event | None = None,
    check_every: int = 1000,
) -> SolveResult:
    """Decide ``doc`` with the embedded solver.

    Budget exhaustion or a set ``stop`` event yields ``INDETERMINATE``,
    never UNSAT.
    """
    return Solver(doc, seed=seed, check_every=check_every).run(
        max_conflicts=max_conflicts, time_limit=time_limit, stop=stop
    )
