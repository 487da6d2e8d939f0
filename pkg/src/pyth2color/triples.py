"""Pythagorean triple enumeration (Dickson's parameterisation) and triple-list files."""

from __future__ import annotations

import json
import math
import os
from typing import Iterable, NamedTuple

import numpy as np

from ._accel import kernel


class Triple(NamedTuple):
    """An ascending Pythagorean triple ``a < b < c`` with ``a*a + b*b == c*c``."""

    a: int
    b: int
    c: int

    @classmethod
    def checked(cls, a: int, b: int, c: int) -> "Triple":
        a, b, c = int(a), int(b), int(c)
        if not (0 < a < b < c):
            raise ValueError(f"triple {(a, b, c)} is not strictly ascending and positive")
        if a * a + b * b != c * c:
            raise ValueError(f"triple {(a, b, c)} does not satisfy a^2 + b^2 = c^2")
        return cls(a, b, c)


@kernel
def _isqrt(v):
    r = int(math.sqrt(v))
    while r * r > v:
        r -= 1
    while (r + 1) * (r + 1) <= v:
        r += 1
    return r


@kernel
def _dickson_kernel(bound, out):
    """Walk Dickson parameters (s, t), s <= t, writing triples into ``out``.

    Returns the number of triples found. When ``out`` has too few rows the
    count is still exact, only the first ``len(out)`` rows are written, so a
    caller can size a buffer with one pass and fill it with a second.
    """
    n = 0
    cap = out.shape[0]
    for s in range(1, bound + 1):
        if 2 * s + 1 > bound:
            break
        for t in range(s, bound - s + 1):
            v = 2 * s * t
            r = _isqrt(v)
            if r * r != v:
                continue
            z = r + s + t
            # z grows with t, so nothing further along this row fits.
            if z > bound:
                break
            if n < cap:
                out[n, 0] = r + s
                out[n, 1] = r + t
                out[n, 2] = z
            n += 1
    return n


def _dickson_array(bound: int) -> np.ndarray:
    if bound < 5:
        return np.zeros((0, 3), dtype=np.int64)
    buf = np.zeros((max(16, 2 * bound), 3), dtype=np.int64)
    n = _dickson_kernel(bound, buf)
    if n > buf.shape[0]:
        buf = np.zeros((n, 3), dtype=np.int64)
        _dickson_kernel(bound, buf)
    return buf[:n]


def enumerate_triples(bound: int) -> list[Triple]:
    """All Pythagorean triples with hypotenuse ``c <= bound``, lexicographically sorted."""
    rows = _dickson_array(int(bound))
    seen = {(int(a), int(b), int(c)) for a, b, c in rows}
    return [Triple(*t) for t in sorted(seen)]


def enumerate_primitive(bound: int) -> list[Triple]:
    return [t for t in enumerate_triples(bound) if math.gcd(t.a, t.b, t.c) == 1]


def triples_from_rows(rows: Iterable[Iterable[int]]) -> list[Triple]:
    out = []
    for row in rows:
        row = list(row)
        if len(row) != 3:
            raise ValueError(f"expected 3 integers per triple, got {row!r}")
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise ValueError(f"non-integer entry in {row!r}")
        out.append(Triple.checked(*row))
    return out


def save_triples(triples: Iterable[Iterable[int]], path: str | os.PathLike) -> None:
    with open(path, "w") as f:
        json.dump([list(map(int, t)) for t in triples], f)


def load_triples(path: str | os.PathLike) -> list[Triple]:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a JSON triple list ({exc})") from exc
    if not isinstance(data, list):
        raise ValueError(f"{path}: top level must be an array of triples")
    return triples_from_rows(data)
