"""Choosing cube-split vertices and gauging how evenly they divide the work."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cnf import encode, split as split_cnf
from .hypergraph import TripleSystem, bfs_levels, build, vertex_distances
from .solver import Verdict, solve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitPlan:
    specials: tuple[int, ...]
    method: str
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        return len(self.specials)

    def as_dict(self) -> dict:
        return {"specials": list(self.specials), "method": self.method, "m": self.m, "notes": self.notes}


def choose_bfs(sys: TripleSystem, m: int) -> SplitPlan:
    """Pick specials far apart in the hypergraph, starting from the smallest triple.

    The first special comes from the seed triple, the second from the
    deepest BFS level; later ones maximise their minimum distance to those
    already chosen. Ties go to the smaller integer.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not sys.edges:
        raise ValueError("cannot split an empty system")
    seed = sys.edges[0]
    levels = bfs_levels(sys, seed)
    deepest = levels.levels[-1]
    deep_verts = sorted({v for e in deepest for v in e})
    dist = {v: vertex_distances(sys, v) for v in seed}

    def reach(d, v):
        return d.get(v, math.inf)

    first = min(seed, key=lambda v: (-min(reach(dist[v], w) for w in deep_verts), v))
    chosen = [first]
    dists = [dist[first]]
    component = sorted(dist[first])
    if m > len(component):
        raise ValueError(f"m={m} exceeds the {len(component)} vertices reachable from the seed")
    if len(levels.levels) == 1:
        log.warning("system has a single BFS level; specials share an edge")

    pool = deep_verts
    while len(chosen) < m:
        candidates = [v for v in pool if v not in chosen] or [v for v in component if v not in chosen]
        best = min(candidates, key=lambda v: (-min(reach(d, v) for d in dists), v))
        chosen.append(best)
        dists.append(vertex_distances(sys, best))
        pool = component

    pairwise = {
        f"{u}-{v}": reach(dists[i], v) for i, u in enumerate(chosen) for v in chosen[i + 1 :]
    }
    notes = {"seed": list(seed), "level_sizes": levels.sizes, "pairwise_distance": pairwise}
    return SplitPlan(tuple(chosen), "bfs", notes)


def choose_random(sys: TripleSystem, m: int, seed: int = 0) -> SplitPlan:
    verts = [v for v in sys.vertices if sys.degree(v) > 0]
    if m < 1 or m > len(verts):
        raise ValueError(f"m={m} must lie in 1..{len(verts)}")
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(verts), size=m, replace=False)
    return SplitPlan(tuple(verts[i] for i in picks), "random", {"seed": seed})


@dataclass(frozen=True)
class IndependenceReport:
    specials: tuple[int, ...]
    means: tuple[float, ...]
    variance: float
    trials: int
    completed_trials: tuple[int, ...]
    incomplete: dict
    removal_fraction: float
    metric: str
    records: tuple[tuple[str, int, float], ...]

    def as_dict(self) -> dict:
        return {
            "specials": list(self.specials),
            "means": list(self.means),
            "variance": self.variance,
            "trials": self.trials,
            "completed_trials": list(self.completed_trials),
            "incomplete": {str(k): v for k, v in self.incomplete.items()},
            "removal_fraction": self.removal_fraction,
            "metric": self.metric,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["assignment", "trial", "cost"])
            w.writerows(self.records)


def _trial_cubes(sys: TripleSystem, specials: Sequence[int], fraction: float, rng: np.random.Generator):
    k = int(round(fraction * len(sys.edges)))
    drop = set(rng.choice(len(sys.edges), size=k, replace=False).tolist()) if k else set()
    reduced = build(e for i, e in enumerate(sys.edges) if i not in drop)
    doc, table = encode(reduced)
    missing = [v for v in specials if v not in table.forward]
    if missing:
        return None, f"special vertices {missing} vanished after edge removal"
    return split_cnf(doc, table, specials), None


def independence_score(
    sys: TripleSystem,
    plan: SplitPlan,
    trials: int = 10,
    removal_fraction: float = 0.1,
    cost_metric: str = "decisions",
    seed: int = 0,
    solver_seed: int = 0,
    max_conflicts: int | None = None,
    workers: int = 1,
) -> IndependenceReport:
    """Mean solve cost per truth assignment of the specials, and the variance of those means.

    Every trial deletes a fresh random ``removal_fraction`` of the edges and
    solves all 2^m cubes of that one reduced system. Trial RNG streams are
    spawned from ``seed`` so serial and threaded runs agree.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= removal_fraction < 1:
        raise ValueError("removal_fraction must lie in [0, 1)")
    if cost_metric not in ("decisions", "time"):
        raise ValueError("cost_metric must be 'decisions' or 'time'")

    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]
    incomplete: dict[int, str] = {}
    jobs = []
    for t, rng in enumerate(streams):
        cubes, why = _trial_cubes(sys, plan.specials, removal_fraction, rng)
        if cubes is None:
            incomplete[t] = why
            continue
        for ci, (cube, doc) in enumerate(cubes):
            jobs.append((t, ci, cube, doc))

    def run(job):
        t, ci, cube, doc = job
        return solve(doc, max_conflicts=max_conflicts, seed=solver_seed)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    n_cubes = 2**plan.m
    costs = np.full((trials, n_cubes), np.nan)
    labels = [""] * n_cubes
    for (t, ci, cube, _), res in zip(jobs, results):
        labels[ci] = cube.label()
        if res.verdict is Verdict.INDETERMINATE:
            incomplete.setdefault(t, f"cube {cube.label()} indeterminate: {res.diagnostics}")
            continue
        costs[t, ci] = res.stats.decisions if cost_metric == "decisions" else res.stats.elapsed

    done = [t for t in range(trials) if t not in incomplete]
    records = tuple(
        (labels[ci], t, float(costs[t, ci])) for t in done for ci in range(n_cubes)
    )
    if done:
        means = costs[done].mean(axis=0)
        variance = float(np.var(means, ddof=1))
    else:
        means = np.full(n_cubes, np.nan)
        variance = math.nan
    return IndependenceReport(
        specials=plan.specials,
        means=tuple(float(x) for x in means),
        variance=variance,
        trials=trials,
        completed_trials=tuple(done),
        incomplete=incomplete,
        removal_fraction=removal_fraction,
        metric=cost_metric,
        records=records,
    )
