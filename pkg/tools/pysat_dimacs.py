#!/usr/bin/env python3
"""Minimal DIMACS solver front-end over python-sat, usable as PYTH2COLOR_SOLVER.

    pysat_dimacs.py [backend] formula.cnf

Prints competition-style ``s``/``v`` lines and exits 10 (SAT) or 20 (UNSAT).
The backend defaults to CaDiCaL; any python-sat solver name works.
"""

import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main(argv):
    if not argv:
        print("usage: pysat_dimacs.py [backend] formula.cnf", file=sys.stderr)
        return 1
    backend = argv[0] if len(argv) > 1 else "cadical195"
    cnf = CNF(from_file=argv[-1])
    with Solver(name=backend, bootstrap_with=cnf.clauses) as s:
        if s.solve():
            print("s SATISFIABLE")
            print("v " + " ".join(map(str, s.get_model())) + " 0")
            return 10
        print("s UNSATISFIABLE")
        return 20


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
