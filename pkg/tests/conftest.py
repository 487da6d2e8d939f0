import os
import stat
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from pyth2color.hypergraph import build  # noqa: E402
from pyth2color.structure import affine_plane_sts9, fano_plane  # noqa: E402
from pyth2color.triples import enumerate_triples  # noqa: E402


@pytest.fixture(scope="session")
def fano():
    return fano_plane()


@pytest.fixture(scope="session")
def sts9():
    return affine_plane_sts9()


@pytest.fixture(scope="session")
def pyth():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = build(enumerate_triples(n))
        return cache[n]

    return get


STUB = """#!{python}
import sys
sys.path.insert(0, {src!r})
from pyth2color.cnf import parse
from pyth2color.solver import solve
doc = parse(open(sys.argv[-1]).read())
mode = {mode!r}
if mode == "sleep":
    import time; time.sleep(30)
if mode == "slow":
    import time; time.sleep(0.5)
if mode == "garbage":
    print("hello"); sys.exit(3)
if mode == "liar":
    print("s SATISFIABLE"); print("v " + " ".join(str(-(i+1)) for i in range(doc.var_count)) + " 0"); sys.exit(10)
r = solve(doc)
if r.is_sat:
    print("s SATISFIABLE")
    print("v " + " ".join(map(str, r.model)) + " 0")
    sys.exit(10)
print("s UNSATISFIABLE")
sys.exit(20)
"""


@pytest.fixture
def stub_solver(tmp_path):
    src = os.path.join(os.path.dirname(__file__), "..", "src")

    def make(mode="solve"):
        path = tmp_path / f"stub_{mode}.py"
        path.write_text(STUB.format(python=sys.executable, src=os.path.abspath(src), mode=mode))
        path.chmod(path.stat().st_mode | stat.S_IEXEC)
        return str(path)

    return make


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
