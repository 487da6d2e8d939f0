"""Ordered triple-system structure: sum properties, bicycles, Steiner subsystems."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from ._accel import kernel
from .hypergraph import Edge, TripleSystem, build, link


@dataclass(frozen=True)
class SumPropertyReport:
    holds: bool
    witness: tuple[Edge, Edge] | None = None

    def as_dict(self) -> dict:
        return {"holds": self.holds, "witness": [list(e) for e in self.witness] if self.witness else None}


def _edge_array(sys: TripleSystem) -> np.ndarray:
    if not sys.edges:
        return np.zeros((0, 3), dtype=np.int64)
    return np.asarray(sys.edges, dtype=np.int64)


@kernel
def _sum_witness(E):
    m = E.shape[0]
    for i in range(m):
        for j in range(m):
            if E[i, 0] <= E[j, 0] and E[i, 1] < E[j, 1] and not E[i, 2] < E[j, 2]:
                return i, j
    return -1, -1


@kernel
def _upper_witness(E):
    m = E.shape[0]
    for i in range(m):
        for j in range(m):
            if E[i, 0] == E[j, 0] and E[i, 1] > E[j, 1] and not E[i, 2] > E[j, 2]:
                return i, j
    return -1, -1


@kernel
def _lower_witness(E):
    m = E.shape[0]
    for i in range(m):
        for j in range(m):
            if E[i, 2] == E[j, 2] and E[i, 0] > E[j, 0] and not E[i, 1] < E[j, 1]:
                return i, j
    return -1, -1


def _report(sys: TripleSystem, fn) -> SumPropertyReport:
    i, j = fn(_edge_array(sys))
    if i < 0:
        return SumPropertyReport(True)
    return SumPropertyReport(False, (sys.edges[i], sys.edges[j]))


def check_sum_property(sys: TripleSystem) -> SumPropertyReport:
    """``(a <= a') and (b < b')`` implies ``c < c'``, each edge read ascending as (a, b, c)."""
    return _report(sys, _sum_witness)


def check_upper_sum_property(sys: TripleSystem) -> SumPropertyReport:
    """For edges sharing their minimum: ``b > b'`` implies ``c > c'``."""
    return _report(sys, _upper_witness)


def check_lower_sum_property(sys: TripleSystem) -> SumPropertyReport:
    """For edges sharing their maximum: ``a > a'`` implies ``b < b'``."""
    return _report(sys, _lower_witness)


def _is_matching(pairs) -> bool:
    seen: set[int] = set()
    for p, q in pairs:
        if p in seen or q in seen:
            return False
        seen.update((p, q))
    return True


def _nests(outer, inner) -> bool:
    return outer[0] < inner[0] < inner[1] < outer[1]


def upper_sum_via_links(sys: TripleSystem) -> bool:
    """Link pairs lying above each vertex form a non-nesting matching."""
    for x in sys.vertices:
        pairs = [p for p in link(sys, x).pairs if p[0] > x]
        if not _is_matching(pairs):
            return False
        for e, f in itertools.combinations(pairs, 2):
            if _nests(e, f) or _nests(f, e):
                return False
    return True


def lower_sum_via_links(sys: TripleSystem) -> bool:
    """Link pairs lying below each vertex form a fully nested matching."""
    for x in sys.vertices:
        pairs = [p for p in link(sys, x).pairs if p[1] < x]
        if not _is_matching(pairs):
            return False
        for e, f in itertools.combinations(pairs, 2):
            if not (_nests(e, f) or _nests(f, e)):
                return False
    return True


# -- bicycles ----------------------------------------------------------------


@dataclass(frozen=True)
class Bicycle:
    """k-bicycle: antipode ``a`` on rim pairs (2j, 2j+1), antipode ``b`` on (2j-1, 2j)."""

    k: int
    antipodes: tuple[int, int]
    rim: tuple[int, ...]

    def edges(self) -> list[Edge]:
        a, b = self.antipodes
        r, n = self.rim, len(self.rim)
        out = []
        for j in range(self.k):
            out.append(tuple(sorted((a, r[2 * j], r[2 * j + 1]))))
            out.append(tuple(sorted((b, r[(2 * j - 1) % n], r[2 * j]))))
        return sorted(out)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.rim) | frozenset(self.antipodes)

    def validate(self) -> None:
        if self.k < 2:
            raise ValueError("bicycle needs k >= 2")
        if len(self.rim) != 2 * self.k:
            raise ValueError("rim length must be 2k")
        if len(self.vertices) != 2 * self.k + 2:
            raise ValueError("bicycle vertices are not distinct")
        if len(set(self.edges())) != 2 * self.k:
            raise ValueError("bicycle edges are not distinct")

    def canonical(self) -> "Bicycle":
        """Smallest antipode first, rim rotated/reflected to its lexicographic minimum."""
        a, b = self.antipodes
        r = self.rim
        n = len(r)
        if a > b:
            # Shifting the rim by one swaps which antipode owns the even pairs.
            a, b = b, a
            r = r[1:] + r[:1]
        apair = {}
        for j in range(self.k):
            apair[r[2 * j]] = r[2 * j + 1]
            apair[r[2 * j + 1]] = r[2 * j]
        best = None
        for i in range(n):
            for step in (1, -1):
                cand = tuple(r[(i + step * t) % n] for t in range(n))
                if apair.get(cand[0]) == cand[1] and (best is None or cand < best):
                    best = cand
        return Bicycle(self.k, (a, b), best)

    def as_dict(self) -> dict:
        return {"k": self.k, "antipodes": list(self.antipodes), "rim": list(self.rim), "edges": [list(e) for e in self.edges()]}


def _alternating_cycles(apairs: dict[int, list[int]], bpairs: dict[int, list[int]], max_len: int):
    """Simple cycles alternating a-pair, b-pair steps, length even and in [4, max_len].

    Each cycle is reported starting at its smallest vertex with an a-step first,
    once per traversal direction.
    """
    found = []
    for s in sorted(apairs):
        path = [s]
        on_path = {s}

        def extend(use_a: bool):
            u = path[-1]
            nbrs = (apairs if use_a else bpairs).get(u, ())
            for w in nbrs:
                if w == s and not use_a and len(path) >= 4:
                    found.append(tuple(path))
                    continue
                if w in on_path or w < s or len(path) >= max_len:
                    continue
                path.append(w)
                on_path.add(w)
                extend(not use_a)
                path.pop()
                on_path.discard(w)

        extend(True)
    return found


def find_bicycles(sys: TripleSystem, max_k: int) -> list[Bicycle]:
    """Every k-bicycle with 2 <= k <= max_k, one per (antipodes, edge set), canonical and sorted."""
    if max_k < 2:
        raise ValueError("max_k must be at least 2")
    links = {x: link(sys, x).pairs for x in sys.vertices if sys.degree(x) >= 2}
    verts = {x: {v for p in ps for v in p} for x, ps in links.items()}
    out: set[Bicycle] = set()
    for a, b in itertools.combinations(sorted(links), 2):
        common = (verts[a] & verts[b]) - {a, b}
        if len(common) < 4:
            continue
        apairs: dict[int, list[int]] = {}
        bpairs: dict[int, list[int]] = {}
        for pairs, adj in ((links[a], apairs), (links[b], bpairs)):
            for p, q in pairs:
                if p in common and q in common:
                    adj.setdefault(p, []).append(q)
                    adj.setdefault(q, []).append(p)
        for cyc in _alternating_cycles(apairs, bpairs, 2 * max_k):
            bike = Bicycle(len(cyc) // 2, (a, b), cyc)
            try:
                bike.validate()
            except ValueError:
                continue
            out.add(bike.canonical())
    return sorted(out, key=lambda bk: (bk.k, bk.antipodes, bk.rim))


def check_bicycle_antipode_theorem(sys: TripleSystem, bicycles: Iterable[Bicycle]) -> bool:
    """True iff no bicycle has its two largest vertices as its antipodes."""
    for bike in bicycles:
        top_two = set(sorted(bike.vertices)[-2:])
        if top_two == set(bike.antipodes):
            return False
    return True


# -- Steiner triple systems --------------------------------------------------


def is_steiner(sys: TripleSystem) -> bool:
    cover: dict[tuple[int, int], int] = {}
    for e in sys.edges:
        for p in itertools.combinations(e, 2):
            cover[p] = cover.get(p, 0) + 1
    return all(cover.get(p, 0) == 1 for p in itertools.combinations(sys.vertices, 2))


def find_bicycle_in_sts(sts: TripleSystem, v: int, w: int) -> Bicycle:
    """A bicycle with antipodes ``v`` and ``w`` inside a Steiner triple system.

    The links of ``v`` and ``w``, minus the edge through both, are perfect
    matchings on the remaining points; their union splits into even cycles,
    and the cycle through the smallest remaining point is returned.
    """
    if len(sts.vertices) < 7:
        raise ValueError("need a nontrivial Steiner triple system (at least 7 points)")
    if not is_steiner(sts):
        raise ValueError("input is not a Steiner triple system")
    if v == w or not sts.has_vertex(v) or not sts.has_vertex(w):
        raise ValueError("antipodes must be two distinct points of the system")
    z = next(x for e in sts.edges if v in e and w in e for x in e if x not in (v, w))
    skip = {v, w, z}
    m1 = {}
    for p, q in link(sts, v).pairs:
        if p not in skip:
            m1[p], m1[q] = q, p
    m2 = {}
    for p, q in link(sts, w).pairs:
        if p not in skip:
            m2[p], m2[q] = q, p
    start = min(m1)
    rim = [start]
    use_m1 = True
    while True:
        nxt = (m1 if use_m1 else m2)[rim[-1]]
        use_m1 = not use_m1
        if nxt == start:
            break
        rim.append(nxt)
    bike = Bicycle(len(rim) // 2, (v, w), tuple(rim))
    bike.validate()
    return bike


def find_sub_sts(
    sys: TripleSystem, order: int, time_limit: float | None = None
) -> TripleSystem | None:
    """Backtracking search for an embedded Steiner triple system on ``order`` points.

    Orders other than 7 and 9 need an explicit ``time_limit``; exceeding it
    raises ``TimeoutError``.
    """
    if order % 6 not in (1, 3) or order < 7:
        raise ValueError("Steiner triple systems exist only for orders 1 or 3 mod 6 (>= 7 here)")
    if order not in (7, 9) and time_limit is None:
        raise ValueError("orders beyond 9 require a time_limit")
    deadline = None if time_limit is None else time.monotonic() + time_limit
    need_deg = (order - 1) // 2
    deg = {x: sys.degree(x) for x in sys.vertices}
    by_pair: dict[tuple[int, int], list[Edge]] = {}
    for e in sys.edges:
        for p in itertools.combinations(e, 2):
            by_pair.setdefault(p, []).append(e)

    def search(x0: int, S: set[int], covered: set[tuple[int, int]], chosen: list[Edge]):
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutError("sub-STS search exceeded its time limit")
        verts = sorted(S)
        open_pairs = [p for p in itertools.combinations(verts, 2) if p not in covered]
        if not open_pairs:
            if len(S) == order:
                return list(chosen)
            options = [
                e for e in sys.edges
                if x0 in e and not (set(e) - {x0}) & S and min(e) == x0 and len(S) + 2 <= order
            ]
            return _branch(x0, S, covered, chosen, options)
        best = None
        for p, q in open_pairs:
            opts = []
            for e in by_pair.get((p, q), ()):
                (w,) = [x for x in e if x not in (p, q)]
                if w < x0 or deg[w] < need_deg:
                    continue
                if w not in S and len(S) >= order:
                    continue
                if w in S and (tuple(sorted((p, w))) in covered or tuple(sorted((q, w))) in covered):
                    continue
                opts.append(e)
            if best is None or len(opts) < len(best):
                best = opts
                if not opts:
                    return None
        return _branch(x0, S, covered, chosen, best)

    def _branch(x0, S, covered, chosen, options):
        for e in options:
            new_pairs = {tuple(sorted(p)) for p in itertools.combinations(e, 2)}
            if new_pairs & covered:
                continue
            res = search(x0, S | set(e), covered | new_pairs, chosen + [e])
            if res is not None:
                return res
        return None

    for x0 in sys.vertices:
        if deg[x0] < need_deg:
            continue
        res = search(x0, {x0}, set(), [])
        if res is not None:
            return build(res)
    return None


# -- fixtures ----------------------------------------------------------------


def fano_plane() -> TripleSystem:
    return build([(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)])


def affine_plane_sts9() -> TripleSystem:
    """AG(2,3): the 12 lines of the 3x3 grid over Z_3, points numbered 1..9."""
    lines = set()
    for x, y in itertools.product(range(3), repeat=2):
        for dx, dy in ((0, 1), (1, 0), (1, 1), (1, 2)):
            pts = tuple(sorted(3 * ((x + t * dx) % 3) + (y + t * dy) % 3 + 1 for t in range(3)))
            lines.add(pts)
    return build(lines)


def hexagon() -> TripleSystem:
    """The 3-bicycle on points a,b,d,e,f,g,h,i, numbered 1..8 in that order."""
    num = {ch: i for i, ch in enumerate("abdefghi", start=1)}
    return build([tuple(num[c] for c in word) for word in ("afh", "aei", "adg", "beh", "bdi", "bfg")])


def schur_system(n: int) -> TripleSystem:
    """Schur triples (a, b, a+b) with a < b and a + b <= n."""
    return build((a, b, a + b) for a in range(1, n + 1) for b in range(a + 1, n - a + 1))


def is_bipartite_coloring(sys: TripleSystem, coloring: Mapping[int, bool]) -> bool:
    """Every edge fully colored and not monochromatic."""
    for e in sys.edges:
        colors = [coloring.get(v) for v in e]
        if None in colors or len(set(colors)) == 1:
            return False
    return True
