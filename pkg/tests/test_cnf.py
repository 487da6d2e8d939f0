import pytest

from oracles import truth_table
from pyth2color.cnf import (
    CnfDocument,
    Cube,
    DimacsError,
    RemapTable,
    all_cubes,
    decode_model,
    emit,
    encode,
    parse,
    parse_solver_output,
    split,
)
from pyth2color.hypergraph import build
from pyth2color.solver import solve
from pyth2color.triples import enumerate_triples
from pyth2color.verify import verify

N10_CNF = "c 10\np cnf 6 4\n1 2 3 0\n-1 -2 -3 0\n4 5 6 0\n-4 -5 -6 0\n"
N10_SPLIT_CNF = "c 10\np cnf 6 6\n1 2 3 0\n-1 -2 -3 0\n4 5 6 0\n-4 -5 -6 0\n1 1 1 0\n-2 -2 -2 0\n"


@pytest.fixture
def n10():
    return encode(build(enumerate_triples(10)), 10)


def test_encode_n10_golden(n10):
    doc, table = n10
    assert dict(table.forward) == {3: 1, 4: 2, 5: 3, 6: 4, 8: 5, 10: 6}
    assert emit(doc) == N10_CNF


def test_encode_empty():
    doc, table = encode(build([]), 0)
    assert emit(doc) == "c 0\np cnf 0 0\n"
    assert len(table) == 0


def test_encode_fano(fano):
    doc, _ = encode(fano)
    assert (doc.var_count, doc.clause_count) == (7, 14)
    assert not truth_table(doc.var_count, doc.clauses)


def test_clause_order_and_count(pyth):
    s = pyth(200)
    doc, table = encode(s, 200)
    assert doc.clause_count == 2 * len(s)
    for k, e in enumerate(s.edges):
        lits = tuple(table.forward[v] for v in e)
        assert doc.clauses[2 * k] == lits
        assert doc.clauses[2 * k + 1] == tuple(-x for x in lits)


def test_remap_order_preserving(pyth):
    _, table = encode(pyth(500))
    items = sorted(table.forward.items())
    assert [v for _, v in items] == list(range(1, len(items) + 1))
    assert all(table.backward[v] == k for k, v in items)


def test_split_golden(n10):
    doc, table = n10
    cubes = split(doc, table, [3, 4])
    assert [c.assignments for c, _ in cubes] == [
        ((3, False), (4, False)),
        ((3, False), (4, True)),
        ((3, True), (4, False)),
        ((3, True), (4, True)),
    ]
    cube, cdoc = cubes[2]
    assert emit(cdoc) == N10_SPLIT_CNF
    for _, d in cubes:
        assert d.var_count == doc.var_count
        assert d.clause_count == doc.clause_count + 2


def test_split_m1_partitions_models(n10):
    doc, table = n10
    (c0, d0), (c1, d1) = split(doc, table, [5])
    assert c0.assignments == ((5, False),) and c1.assignments == ((5, True),)
    # every model of the original satisfies exactly one of the two cubes
    import itertools

    for bits in itertools.product((False, True), repeat=6):
        model = [i + 1 if b else -(i + 1) for i, b in enumerate(bits)]
        if doc.satisfied_by(model):
            assert d0.satisfied_by(model) != d1.satisfied_by(model)


def test_split_union_property(pyth):
    doc, table = encode(pyth(100), 100)
    specials = [5, 25, 65]
    verdicts = [solve(d).is_sat for _, d in split(doc, table, specials)]
    assert solve(doc).is_sat == any(verdicts)


def test_split_rejects_unknown_special(n10):
    doc, table = n10
    with pytest.raises(KeyError):
        split(doc, table, [7])
    with pytest.raises(ValueError):
        all_cubes([])


def test_tripled_units_equisatisfiable(n10):
    doc, table = n10
    for _, cdoc in split(doc, table, [3, 4, 5]):
        plain = CnfDocument(
            cdoc.var_count,
            tuple(c if len(set(c)) > 1 else (c[0],) for c in cdoc.clauses),
        )
        assert solve(cdoc).verdict == solve(plain).verdict
        assert truth_table(cdoc.var_count, cdoc.clauses) == solve(cdoc).is_sat
    # forcing 3, 4, 5 all True is refuted
    _, last = split(doc, table, [3, 4, 5])[-1]
    assert not solve(last).is_sat


@pytest.mark.parametrize("text", [N10_CNF, N10_SPLIT_CNF])
def test_round_trip_bytes(text):
    assert emit(parse(text)) == text


def test_parse_emit_round_trip_documents(pyth):
    doc, _ = encode(pyth(300), 300)
    assert parse(emit(doc)) == doc


def test_parse_crlf_normalised():
    text = N10_CNF.replace("\n", "\r\n")
    assert emit(parse(text)) == N10_CNF


@pytest.mark.parametrize(
    "text",
    [
        "c 10\np cnf 6 4\n1 2 7 0\n-1 -2 -3 0\n4 5 6 0\n-4 -5 -6 0\n",
        "p cnf 6\n1 0\n",
        "p dnf 6 1\n1 0\n",
        "p cnf 3 1\n1 2 3\n",
        "p cnf 3 2\n1 2 3 0\n",
        "1 2 3 0\n",
        "p cnf 3 1\n1 x 3 0\n",
        "",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(DimacsError):
        parse(text)


def test_parse_accepts_plain_units_and_multiline():
    doc = parse("c x\np cnf 3 2\n1\n2 0 -3 0\n")
    assert doc.clauses == ((1, 2), (-3,))


def test_decode_model_n10(n10):
    doc, table = n10
    col = decode_model([1, -2, 3, -4, 5, -6], table)
    assert col == {3: True, 4: False, 5: True, 6: False, 8: True, 10: False}
    for v in (1, 2, 7, 9):
        assert v not in col
    with pytest.raises(ValueError):
        decode_model([1, 2], table)


def test_decode_then_verify(pyth):
    doc, table = encode(pyth(400), 400)
    res = solve(doc)
    assert res.is_sat
    assert verify(400, decode_model(res.model, table)) == []


def test_remap_json_round_trip(n10):
    _, table = n10
    assert table.to_json() == {"3": 1, "4": 2, "5": 3, "6": 4, "8": 5, "10": 6}
    assert RemapTable.from_json(table.to_json()) == table
    with pytest.raises(ValueError):
        RemapTable.from_json({"3": 1, "4": 3})


def test_solver_output_parsing():
    assert parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n") == ("SAT", [1, -2, 3])
    assert parse_solver_output("s UNSATISFIABLE\n") == ("UNSAT", None)
    assert parse_solver_output("s UNKNOWN\n") == ("UNKNOWN", None)
    with pytest.raises(ValueError):
        parse_solver_output("garbage")
    with pytest.raises(ValueError):
        parse_solver_output("s SATISFIABLE\nv 1 2\n")


def test_cube_label():
    assert Cube(((3, True), (4, False))).label() == "10"
