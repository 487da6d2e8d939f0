"""Independent coloring verification and the column-grid pixmap renderer."""

from __future__ import annotations

import enum
import json
import math
import os
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .structure import is_bipartite_coloring
from .triples import Triple

__all__ = [
    "Violation",
    "ViolationReason",
    "euclid_triples",
    "is_bipartite_coloring",
    "verify",
    "render",
    "to_ppm",
    "write_ppm",
    "GREY",
    "BLACK",
    "WHITE",
    "PAD",
]


class ViolationReason(str, enum.Enum):
    MONOCHROMATIC = "MONOCHROMATIC"
    UNCOLORED_VERTEX = "UNCOLORED_VERTEX"


@dataclass(frozen=True)
class Violation:
    triple: Triple
    reason: ViolationReason

    def as_dict(self) -> dict:
        return {"triple": list(self.triple), "reason": self.reason.value}


def euclid_triples(bound: int) -> list[Triple]:
    """Triples with c <= bound from Euclid's formula k(m^2-n^2, 2mn, m^2+n^2).

    Kept separate from the Dickson walk used to build formulas so that a
    generation bug cannot certify its own output.
    """
    out = set()
    m = 2
    while m * m + 1 <= bound:
        for n in range(1, m):
            if (m - n) % 2 == 0 or math.gcd(m, n) != 1:
                continue
            c = m * m + n * n
            if c > bound:
                break
            a, b = m * m - n * n, 2 * m * n
            a, b = min(a, b), max(a, b)
            for k in range(1, bound // c + 1):
                out.add(Triple(k * a, k * b, k * c))
        m += 1
    return sorted(out)


def verify(bound: int, coloring: Mapping[int, bool]) -> list[Violation]:
    """Every triple with all entries <= bound that is monochromatic or not fully colored."""
    bad = []
    for t in euclid_triples(bound):
        colors = [coloring.get(v) for v in t]
        if None in colors:
            bad.append(Violation(t, ViolationReason.UNCOLORED_VERTEX))
        elif colors[0] == colors[1] == colors[2]:
            bad.append(Violation(t, ViolationReason.MONOCHROMATIC))
    return bad


def violations_json(violations: list[Violation]) -> str:
    return json.dumps([v.as_dict() for v in violations])


# -- rendering ---------------------------------------------------------------

GREY = (128, 128, 128)
BLACK = (0, 0, 0)
WHITE = (255, 255, 255)
# Cells past ``bound`` in the last column; distinct from the three meaningful colors.
PAD = (255, 0, 255)


def default_height(bound: int) -> int:
    return max(1, math.isqrt(max(bound, 1) - 1) + 1)


def render(bound: int, coloring: Mapping[int, bool], columns_height: int | None = None) -> np.ndarray:
    """RGB image, one pixel per integer 1..bound, filled column by column from the lower left.

    Integer n sits in column (n-1) // h at row (n-1) % h counted from the
    bottom. False is grey, True black; integers in no triple <= bound are
    white whatever the coloring says.
    """
    h = default_height(bound) if columns_height is None else int(columns_height)
    if h < 1:
        raise ValueError("columns_height must be >= 1")
    width = max(1, -(-bound // h))
    img = np.empty((h, width, 3), dtype=np.uint8)
    img[:] = PAD
    in_triple = {v for t in euclid_triples(bound) for v in t}
    for n in range(1, bound + 1):
        col, row = divmod(n - 1, h)
        if n not in in_triple:
            color = WHITE
        else:
            val = coloring.get(n)
            color = WHITE if val is None else (BLACK if val else GREY)
        img[h - 1 - row, col] = color
    return img


def to_ppm(img: np.ndarray) -> bytes:
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def write_ppm(path: str | os.PathLike, img: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(to_ppm(img))


def read_ppm(data: bytes) -> np.ndarray:
    m = re.match(rb"P6\s+(\d+)\s+(\d+)\s+255\s", data)
    if m is None:
        raise ValueError("not an 8-bit P6 pixmap")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=m.end()).reshape(h, w, 3)


def count_colors(img: np.ndarray) -> dict[str, int]:
    flat = img.reshape(-1, 3)
    return {
        name: int(np.all(flat == np.array(rgb, dtype=np.uint8), axis=1).sum())
        for name, rgb in (("grey", GREY), ("black", BLACK), ("white", WHITE), ("pad", PAD))
    }
