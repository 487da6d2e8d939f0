"""Adapter for external DIMACS solvers following SAT-competition output conventions."""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import threading
import time
from typing import Sequence

from ..cnf import CnfDocument, emit, parse_solver_output
from .engine import SolveResult, SolveStats, Verdict


class ExternalSolverError(RuntimeError):
    """The solver binary is missing or not executable."""


def resolve_solver(path: str) -> str:
    found = shutil.which(path) if os.sep not in path else path
    if not found or not os.path.isfile(found) or not os.access(found, os.X_OK):
        raise ExternalSolverError(f"solver binary not found or not executable: {path}")
    return found


def interpret_output(doc: CnfDocument, out: str, returncode: int | None) -> tuple[Verdict, tuple[int, ...] | None, str]:
    try:
        status, model = parse_solver_output(out)
    except ValueError as exc:
        return Verdict.INDETERMINATE, None, f"unparseable output (exit {returncode}): {exc}"
    if status == "UNSAT":
        return Verdict.UNSAT, None, ""
    if status != "SAT":
        return Verdict.INDETERMINATE, None, f"solver reported {status} (exit {returncode})"
    if not doc.satisfied_by(model):
        return Verdict.INDETERMINATE, None, "solver model falsifies a clause; rejected"
    # Fill variables the solver left out; any value works for them.
    given = {abs(x) for x in model}
    full = tuple(sorted(set(model) | {-v for v in range(1, doc.var_count + 1) if v not in given}, key=abs))
    return Verdict.SAT, full, ""


def solve_external(
    doc: CnfDocument,
    solver_path: str,
    args: Sequence[str] = (),
    timeout: float | None = None,
    stop: threading.Event | None = None,
    poll: float = 0.05,
) -> SolveResult:
    """Write ``doc`` to a temp file, run ``solver_path *args file`` and read its verdict."""
    binary = resolve_solver(solver_path)
    if timeout is not None and timeout <= 0:
        return SolveResult(Verdict.INDETERMINATE, diagnostics="timeout before start")
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="pyth2color-") as tmp:
        path = os.path.join(tmp, "input.cnf")
        with open(path, "w") as f:
            f.write(emit(doc))
        proc = subprocess.Popen(
            [binary, *args, path], stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True
        )
        out = err = ""
        while True:
            try:
                out, err = proc.communicate(timeout=poll)
                break
            except subprocess.TimeoutExpired:
                elapsed = time.perf_counter() - t0
                reason = None
                if stop is not None and stop.is_set():
                    reason = "cancelled"
                elif timeout is not None and elapsed >= timeout:
                    reason = "timeout"
                if reason:
                    proc.terminate()
                    try:
                        proc.communicate(timeout=5)
                    except subprocess.TimeoutExpired:
                        proc.kill()
                        proc.communicate()
                    return SolveResult(
                        Verdict.INDETERMINATE, stats=SolveStats(elapsed=elapsed), diagnostics=reason
                    )
    elapsed = time.perf_counter() - t0
    verdict, model, diag = interpret_output(doc, out, proc.returncode)
    if diag and err.strip():
        diag += f"; stderr: {err.strip()[-500:]}"
    return SolveResult(verdict, model, SolveStats(elapsed=elapsed), diag)
