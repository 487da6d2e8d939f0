"""Two-coloring as CNF: remap, encode, cube splitting, DIMACS text, model decoding.

The DIMACS dialect written here matches the plain form used for the triple
files: comment lines first, a ``p cnf`` header, one clause per line with a
terminating ``0``. Cube constraints are written as tripled unit clauses
(``x x x 0``), which keeps every clause at width three.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .hypergraph import Coloring, TripleSystem


class DimacsError(ValueError):
    pass


@dataclass(frozen=True)
class RemapTable:
    """Order-preserving bijection from original integers to variables ``1..n``."""

    forward: Mapping[int, int]
    backward: Mapping[int, int]

    @classmethod
    def from_vertices(cls, vertices: Iterable[int]) -> "RemapTable":
        fwd = {v: i for i, v in enumerate(sorted(set(vertices)), start=1)}
        return cls(fwd, {i: v for v, i in fwd.items()})

    def __len__(self) -> int:
        return len(self.forward)

    def to_json(self) -> dict[str, int]:
        return {str(k): v for k, v in self.forward.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "RemapTable":
        fwd = {int(k): int(v) for k, v in data.items()}
        if sorted(fwd.values()) != list(range(1, len(fwd) + 1)):
            raise ValueError("remap values must be exactly 1..n")
        return cls(fwd, {i: v for v, i in fwd.items()})


@dataclass(frozen=True)
class CnfDocument:
    var_count: int
    clauses: tuple[tuple[int, ...], ...]
    comments: tuple[str, ...] = ()

    def __post_init__(self):
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.var_count:
                    raise DimacsError(f"literal {lit} outside 1..{self.var_count}")

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def with_clauses(self, extra: Iterable[Sequence[int]]) -> "CnfDocument":
        return CnfDocument(
            self.var_count, self.clauses + tuple(tuple(c) for c in extra), self.comments
        )

    def satisfied_by(self, model: Iterable[int]) -> bool:
        true_lits = set(model)
        return all(any(lit in true_lits for lit in c) for c in self.clauses)


@dataclass(frozen=True)
class Cube:
    assignments: tuple[tuple[int, bool], ...] = field(default=())

    def label(self) -> str:
        return "".join("1" if val else "0" for _, val in self.assignments)


def encode(sys: TripleSystem, bound: int | None = None) -> tuple[CnfDocument, RemapTable]:
    """Each edge {i,j,k} yields ``(i j k)`` then ``(-i -j -k)``, edges in lexicographic order."""
    table = RemapTable.from_vertices(v for e in sys.edges for v in e)
    f = table.forward
    clauses = []
    for e in sys.edges:
        lits = tuple(f[v] for v in e)
        clauses.append(lits)
        clauses.append(tuple(-x for x in lits))
    if bound is None:
        bound = max(sys.vertices, default=0)
    return CnfDocument(len(table), tuple(clauses), (str(bound),)), table


def cube_units(cube: Cube, table: RemapTable) -> list[tuple[int, int, int]]:
    units = []
    for vertex, value in cube.assignments:
        if vertex not in table.forward:
            raise KeyError(f"special vertex {vertex} does not occur in the formula")
        x = table.forward[vertex] if value else -table.forward[vertex]
        units.append((x, x, x))
    return units


def all_cubes(specials: Sequence[int]) -> list[Cube]:
    """All 2^m sign patterns, index bits read most-significant first (bit 1 = True)."""
    m = len(specials)
    if m < 1:
        raise ValueError("need at least one special vertex")
    if len(set(specials)) != m:
        raise ValueError("special vertices must be distinct")
    return [
        Cube(tuple((v, bool((i >> (m - 1 - j)) & 1)) for j, v in enumerate(specials)))
        for i in range(2**m)
    ]


def split(
    doc: CnfDocument, table: RemapTable, specials: Sequence[int]
) -> list[tuple[Cube, CnfDocument]]:
    out = []
    for cube in all_cubes(specials):
        out.append((cube, doc.with_clauses(cube_units(cube, table))))
    return out


# -- DIMACS text -------------------------------------------------------------


def emit(doc: CnfDocument) -> str:
    lines = [f"c {c}" if c else "c" for c in doc.comments]
    lines.append(f"p cnf {doc.var_count} {doc.clause_count}")
    for clause in doc.clauses:
        lines.append(" ".join(map(str, clause + (0,))))
    return "\n".join(lines) + "\n"


def parse(text: str) -> CnfDocument:
    """Parse DIMACS CNF. CRLF line ends are accepted; clauses may span lines."""
    comments: list[str] = []
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            if header is None or not current:
                comments.append(raw[2:] if raw.startswith("c ") else raw[1:].strip())
                continue
            raise DimacsError(f"line {lineno}: comment inside a clause")
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise DimacsError(f"line {lineno}: literal {lit} exceeds {header[0]} variables")
            else:
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is missing its 0 terminator")
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfDocument(header[0], tuple(clauses), tuple(comments))


# -- models ------------------------------------------------------------------


def decode_model(model: Iterable[int], table: RemapTable) -> Coloring:
    signs: dict[int, bool] = {}
    for lit in model:
        if lit != 0:
            signs[abs(lit)] = lit > 0
    missing = [i for i in table.backward if i not in signs]
    if missing:
        raise ValueError(f"model leaves {len(missing)} variables unset, e.g. {missing[0]}")
    return {orig: signs[var] for orig, var in table.forward.items()}


def encode_model(coloring: Mapping[int, bool], table: RemapTable) -> list[int]:
    return [var if coloring[orig] else -var for orig, var in table.forward.items()]


def parse_solver_output(text: str) -> tuple[str, list[int] | None]:
    """Read SAT-competition output: an ``s`` status line and optional ``v`` lines.

    Returns ``(status, model)`` where status is ``"SAT"``, ``"UNSAT"`` or
    ``"UNKNOWN"``; the model is ``None`` unless the status is SAT.
    """
    status = None
    model: list[int] = []
    terminated = False
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = "SAT"
            elif word == "UNSATISFIABLE":
                status = "UNSAT"
            else:
                status = "UNKNOWN"
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                lit = int(tok)
                if lit == 0:
                    terminated = True
                else:
                    model.append(lit)
    if status is None:
        raise ValueError("solver output has no 's' status line")
    if status == "SAT":
        if not terminated:
            raise ValueError("model lines are not terminated by 0")
        return status, model
    return status, None
