"""Toroidal binary grids: patterns, Moore neighborhoods, symmetries, text I/O."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Window order shared by neighborhoods and templates: center first, then the
# eight outer cells row-major over the 3x3 window.
MOORE_OFFSETS = (
    (0, 0),
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

#: The eight rotation/reflection operations accepted by :func:`transform`.
SYMMETRY_OPS = (
    "identity",
    "rotate90", "rotate180", "rotate270",
    "reflect_h", "reflect_v",
    "transpose", "antitranspose",
)


class PatternError(ValueError):
    """Raised for malformed pattern data or text."""


@dataclass(frozen=True)
class Coord:
    """Grid coordinate. Use :meth:`reduced` to wrap raw indices onto a torus."""

    i: int
    j: int

    @classmethod
    def reduced(cls, i: int, j: int, n: int) -> "Coord":
        return cls(i % n, j % n)


@dataclass(frozen=True)
class Pattern:
    """An n x n binary grid with cyclic boundaries, stored row-major."""

    n: int
    cells: tuple[int, ...]

    def __post_init__(self):
        if self.n < 3:
            raise PatternError(f"side length must be >= 3, got {self.n}")
        if len(self.cells) != self.n * self.n:
            raise PatternError(
                f"expected {self.n * self.n} cells, got {len(self.cells)}")
        if any(v not in (0, 1) for v in self.cells):
            raise PatternError("cell values must be 0 or 1")

    @classmethod
    def from_rows(cls, rows) -> "Pattern":
        rows = [list(r) for r in rows]
        return cls(len(rows), tuple(int(v) for row in rows for v in row))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Pattern":
        arr = np.asarray(arr)
        return cls(arr.shape[0], tuple(int(v) for v in arr.reshape(-1)))

    @classmethod
    def zeros(cls, n: int) -> "Pattern":
        return cls(n, (0,) * (n * n))

    def to_array(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.uint8).reshape(self.n, self.n)

    def at(self, i: int, j: int) -> int:
        """Cell value with toroidal wrap."""
        return self.cells[(i % self.n) * self.n + (j % self.n)]

    def __getitem__(self, ij) -> int:
        return self.at(*ij)

    @property
    def ones(self) -> int:
        return sum(self.cells)

    def rows(self) -> list[str]:
        n = self.n
        return ["".join(str(v) for v in self.cells[i * n:(i + 1) * n])
                for i in range(n)]


@dataclass(frozen=True)
class NeighborhoodConfig:
    """The nine cell values of a 3x3 window, center first then row-major."""

    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != 9:
            raise PatternError("neighborhood must have exactly 9 values")
        if any(v not in (0, 1) for v in self.values):
            raise PatternError("neighborhood values must be 0 or 1")

    @property
    def center(self) -> int:
        return self.values[0]

    @property
    def outer(self) -> tuple[int, ...]:
        return self.values[1:]


def moore_neighborhood(p: Pattern, c: Coord) -> NeighborhoodConfig:
    """Read the 3x3 window around c with wrap; the center is value 0."""
    return NeighborhoodConfig(
        tuple(p.at(c.i + di, c.j + dj) for di, dj in MOORE_OFFSETS))


@lru_cache(maxsize=None)
def window_indices(n: int) -> np.ndarray:
    """(n*n, 9) flat indices of each cell's 3x3 window, MOORE_OFFSETS order."""
    idx = np.empty((n * n, 9), dtype=np.intp)
    for i in range(n):
        for j in range(n):
            for k, (di, dj) in enumerate(MOORE_OFFSETS):
                idx[i * n + j, k] = ((i + di) % n) * n + (j + dj) % n
    idx.setflags(write=False)
    return idx


def _apply_symmetry(arr: np.ndarray, op: str) -> np.ndarray:
    if op == "identity":
        return arr
    if op == "rotate90":  # clockwise
        return np.rot90(arr, -1)
    if op == "rotate180":
        return np.rot90(arr, 2)
    if op == "rotate270":
        return np.rot90(arr, 1)
    if op == "reflect_h":  # mirror against the horizontal center line
        return arr[::-1]
    if op == "reflect_v":  # mirror against the vertical center line
        return arr[:, ::-1]
    if op == "transpose":
        return arr.T
    if op == "antitranspose":
        return arr[::-1, ::-1].T
    raise ValueError(f"unknown symmetry op {op!r}")


def transform(p: Pattern, op: str, di: int = 0, dj: int = 0) -> Pattern:
    """Apply a symmetry operation or a cyclic shift.

    op is one of SYMMETRY_OPS or "shift"; di/dj are used by "shift" only.
    """
    if op == "shift":
        arr = np.roll(np.roll(p.to_array(), di, axis=0), dj, axis=1)
        return Pattern.from_array(arr)
    return Pattern.from_array(_apply_symmetry(p.to_array(), op))


def symmetry_images(arr: np.ndarray) -> list[np.ndarray]:
    """All eight rotation/reflection images of a square array."""
    return [_apply_symmetry(arr, op) for op in SYMMETRY_OPS]


def parse(text: str) -> Pattern:
    """Parse lines of '0'/'1' characters into a Pattern."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 3:
        raise PatternError(f"need at least 3 rows, got {len(lines)}")
    n = len(lines[0])
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if len(line) != n:
            raise PatternError(
                f"line {lineno}: expected {n} characters, got {len(line)}")
        row = []
        for ch in line:
            if ch not in "01":
                raise PatternError(f"line {lineno}: illegal character {ch!r}")
            row.append(int(ch))
        rows.append(row)
    if len(rows) != n:
        raise PatternError(f"expected {n} rows for width {n}, got {len(rows)}")
    if n < 3:
        raise PatternError(f"side length must be >= 3, got {n}")
    return Pattern.from_rows(rows)


def serialize(p: Pattern) -> str:
    return "\n".join(p.rows()) + "\n"
