"""Triple systems: degrees, links, pendant peeling with restoration, BFS levels."""

from __future__ import annotations

import csv
import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

Edge = tuple[int, int, int]
Coloring = dict[int, bool]


def _edge(t: Iterable[int]) -> Edge:
    e = tuple(sorted(int(x) for x in t))
    if len(e) != 3 or len(set(e)) != 3:
        raise ValueError(f"edge {t!r} is not a 3-set")
    return e  # type: ignore[return-value]


@dataclass(frozen=True)
class TripleSystem:
    """Vertex set plus a set of 3-element edges, ordered by integer value.

    Edges are stored sorted within themselves and lexicographically as a
    whole. ``vertices`` may contain isolated points.
    """

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    linear: bool

    def __len__(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> dict[int, list[int]]:
        inc: dict[int, list[int]] = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return inc

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def degree(self, v: int) -> int:
        return len(self.incidence.get(v, ()))

    def has_vertex(self, v: int) -> bool:
        return v in self.incidence


def _is_linear(edges: Iterable[Edge]) -> bool:
    owner: dict[tuple[int, int], Edge] = {}
    for e in edges:
        for pair in ((e[0], e[1]), (e[0], e[2]), (e[1], e[2])):
            if pair in owner and owner[pair] != e:
                return False
            owner[pair] = e
    return True


def build(triples: Iterable[Iterable[int]], vertices: Iterable[int] = ()) -> TripleSystem:
    """Build a system from triples; extra ``vertices`` are added as isolated points."""
    edges = tuple(sorted({_edge(t) for t in triples}))
    verts = {v for e in edges for v in e}
    verts.update(int(v) for v in vertices)
    return TripleSystem(tuple(sorted(verts)), edges, _is_linear(edges))


def subsystem(sys: TripleSystem, edges: Iterable[Edge]) -> TripleSystem:
    """Edge-induced subsystem (vertices are those touched by ``edges``)."""
    return build(edges)


@dataclass(frozen=True)
class LinkGraph:
    center: int
    pairs: frozenset[tuple[int, int]]


def link(sys: TripleSystem, v: int) -> LinkGraph:
    if not sys.has_vertex(v):
        raise KeyError(f"vertex {v} not in system")
    pairs = set()
    for i in sys.incidence[v]:
        a, b = (x for x in sys.edges[i] if x != v)
        pairs.add((a, b))
    return LinkGraph(v, frozenset(pairs))


# -- pendant removal ---------------------------------------------------------


@dataclass(frozen=True)
class ReductionTrace:
    """Removed pendant edges in removal order, each with its degree-1 vertices at that moment."""

    removed: tuple[tuple[Edge, frozenset[int]], ...] = ()

    def __len__(self) -> int:
        return len(self.removed)

    @property
    def edges(self) -> list[Edge]:
        return [e for e, _ in self.removed]


def remove_pendants(sys: TripleSystem) -> tuple[TripleSystem, ReductionTrace]:
    """Peel pendant edges until none remain.

    Each pass scans the surviving edges in lexicographic order and drops any
    edge holding a vertex of current degree 1; degrees update immediately.
    Passes repeat until one removes nothing.
    """
    degree = {v: sys.degree(v) for v in sys.vertices}
    alive = list(sys.edges)
    removed: list[tuple[Edge, frozenset[int]]] = []
    changed = True
    while changed:
        changed = False
        keep = []
        for e in alive:
            ones = frozenset(v for v in e if degree[v] == 1)
            if ones:
                removed.append((e, ones))
                for v in e:
                    degree[v] -= 1
                changed = True
            else:
                keep.append(e)
        alive = keep
    return build(alive), ReductionTrace(tuple(removed))


def monochromatic_edges(edges: Iterable[Edge], coloring: Mapping[int, bool]) -> list[Edge]:
    bad = []
    for e in edges:
        colors = {coloring.get(v) for v in e}
        if None in colors or len(colors) == 1:
            bad.append(e)
    return bad


def restore_coloring(
    trace: ReductionTrace, coloring: Mapping[int, bool], reduced: TripleSystem | None = None
) -> Coloring:
    """Extend a coloring of the reduced system back over the peeled edges.

    Edges come back in reverse removal order. The smallest degree-1 vertex of
    each edge takes the opposite of the first already-colored vertex (or
    False when none is colored); other degree-1 vertices take True.
    """
    if reduced is not None:
        bad = monochromatic_edges(reduced.edges, coloring)
        if bad:
            raise ValueError(f"coloring is not proper on the reduced system, e.g. {bad[0]}")
    out = dict(coloring)
    for e, free in reversed(trace.removed):
        fixed = [v for v in e if v not in free]
        for v in fixed:
            if v not in out:
                raise ValueError(f"vertex {v} of restored edge {e} has no color")
        anchor = out[fixed[0]] if fixed else True
        first, *rest = sorted(free)
        out[first] = not anchor
        for v in rest:
            out[v] = True
    return out


# -- distances ---------------------------------------------------------------


@dataclass(frozen=True)
class BfsLevels:
    seed: Edge
    levels: tuple[tuple[Edge, ...], ...]
    unreachable: tuple[Edge, ...] = field(default=())

    @property
    def sizes(self) -> list[int]:
        return [len(lv) for lv in self.levels]

    def level_of(self) -> dict[Edge, int]:
        return {e: i for i, lv in enumerate(self.levels) for e in lv}


def bfs_levels(sys: TripleSystem, seed: Iterable[int]) -> BfsLevels:
    """Breadth-first levels of the triple-intersection graph starting from ``seed``."""
    seed_e = _edge(seed)
    index = {e: i for i, e in enumerate(sys.edges)}
    if seed_e not in index:
        raise KeyError(f"seed {seed_e} is not an edge of the system")
    inc = sys.incidence
    depth = {index[seed_e]: 0}
    levels = [[index[seed_e]]]
    frontier = levels[0]
    while frontier:
        nxt = []
        for i in frontier:
            for v in sys.edges[i]:
                for j in inc[v]:
                    if j not in depth:
                        depth[j] = len(levels)
                        nxt.append(j)
        if nxt:
            levels.append(nxt)
        frontier = nxt
    lv = tuple(tuple(sorted(sys.edges[i] for i in level)) for level in levels)
    unreachable = tuple(e for i, e in enumerate(sys.edges) if i not in depth)
    return BfsLevels(seed_e, lv, unreachable)


def write_level_csv(levels: BfsLevels, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["level", "count"])
        for i, n in enumerate(levels.sizes):
            w.writerow([i, n])


def vertex_distances(sys: TripleSystem, u: int) -> dict[int, int]:
    """Distances from ``u`` in the vertex/edge incidence graph, one step per shared edge."""
    if not sys.has_vertex(u):
        raise KeyError(f"vertex {u} not in system")
    inc = sys.incidence
    dist = {u: 0}
    seen_edges: set[int] = set()
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for i in inc[x]:
            if i in seen_edges:
                continue
            seen_edges.add(i)
            for y in sys.edges[i]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
    return dist


def vertex_distance(sys: TripleSystem, u: int, v: int) -> float:
    if not sys.has_vertex(v):
        raise KeyError(f"vertex {v} not in system")
    return vertex_distances(sys, u).get(v, math.inf)
