"""Integer sparse matrices in coordinate form."""

from __future__ import annotations

import hashlib
import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping


@dataclass(frozen=True)
class ExactSparseMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for i, j, x in self.entries:
            if x == 0:
                raise ValueError("explicit zero entry")
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError(f"entry ({i}, {j}) outside a {self.rows}x{self.cols} matrix")
            if (i, j) in seen:
                raise ValueError(f"duplicate entry ({i}, {j})")
            seen.add((i, j))

    @classmethod
    def from_dict(cls, rows: int, cols: int, values: Mapping[tuple[int, int], int]) -> "ExactSparseMatrix":
        return cls(rows, cols, tuple(sorted((i, j, x) for (i, j), x in values.items() if x)))

    @classmethod
    def from_columns(cls, rows: int, columns: Iterable[Mapping[int, int]]) -> "ExactSparseMatrix":
        values = {}
        cols = 0
        for j, col in enumerate(columns):
            cols = j + 1
            for i, x in col.items():
                if x:
                    values[(i, j)] = x
        return cls.from_dict(rows, cols, values)

    @classmethod
    def from_dense(cls, dense: list[list[int]]) -> "ExactSparseMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls.from_dict(rows, cols, {(i, j): x for i, row in enumerate(dense) for j, x in enumerate(row)})

    @classmethod
    def identity(cls, n: int) -> "ExactSparseMatrix":
        return cls(n, n, tuple((i, i, 1) for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "ExactSparseMatrix":
        return cls(rows, cols, ())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, j, x in self.entries:
            out[i][j] = x
        return out

    def row_dicts(self) -> list[dict[int, int]]:
        out = [dict() for _ in range(self.rows)]
        for i, j, x in self.entries:
            out[i][j] = x
        return out

    def col_dicts(self) -> list[dict[int, int]]:
        out = [dict() for _ in range(self.cols)]
        for i, j, x in self.entries:
            out[j][i] = x
        return out

    def transpose(self) -> "ExactSparseMatrix":
        return ExactSparseMatrix(self.cols, self.rows, tuple(sorted((j, i, x) for i, j, x in self.entries)))

    T = property(transpose)

    def __matmul__(self, other: "ExactSparseMatrix") -> "ExactSparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        rows_b = other.row_dicts()
        acc: dict[tuple[int, int], int] = defaultdict(int)
        for i, k, x in self.entries:
            for j, y in rows_b[k].items():
                acc[(i, j)] += x * y
        return ExactSparseMatrix.from_dict(self.rows, other.cols, acc)

    def __add__(self, other: "ExactSparseMatrix") -> "ExactSparseMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "ExactSparseMatrix") -> "ExactSparseMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "ExactSparseMatrix":
        return ExactSparseMatrix(self.rows, self.cols, tuple((i, j, -x) for i, j, x in self.entries))

    def scale(self, factor: int) -> "ExactSparseMatrix":
        if factor == 0:
            return ExactSparseMatrix.zero(self.rows, self.cols)
        return ExactSparseMatrix(self.rows, self.cols, tuple((i, j, factor * x) for i, j, x in self.entries))

    def _combine(self, other: "ExactSparseMatrix", sign: int) -> "ExactSparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        acc: dict[tuple[int, int], int] = defaultdict(int)
        for i, j, x in self.entries:
            acc[(i, j)] += x
        for i, j, x in other.entries:
            acc[(i, j)] += sign * x
        return ExactSparseMatrix.from_dict(self.rows, self.cols, acc)

    def checksum(self) -> str:
        return hashlib.sha256(self.to_coordinate_text().encode()).hexdigest()

    def to_coordinate_text(self) -> str:
        """``rows cols nnz`` header then one 1-indexed ``i j value`` line per entry."""
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        lines.extend(f"{i + 1} {j + 1} {x}" for i, j, x in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_coordinate_text(cls, text: str) -> "ExactSparseMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols, nnz = map(int, lines[0].split())
        body = [tuple(map(int, ln.split())) for ln in lines[1:]]
        if len(body) != nnz:
            raise ValueError(f"header announces {nnz} entries, found {len(body)}")
        return cls.from_dict(rows, cols, {(i - 1, j - 1): x for i, j, x in body})


def block(blocks: list[list[ExactSparseMatrix | None]], row_sizes: list[int], col_sizes: list[int]) -> ExactSparseMatrix:
    """Assemble a block matrix; ``None`` stands for a zero block."""
    entries = []
    r0 = 0
    for bi, brow in enumerate(blocks):
        c0 = 0
        for bj, m in enumerate(brow):
            if m is not None:
                if m.shape != (row_sizes[bi], col_sizes[bj]):
                    raise ValueError(f"block ({bi}, {bj}) has shape {m.shape}")
                entries.extend((r0 + i, c0 + j, x) for i, j, x in m.entries)
            c0 += col_sizes[bj]
        r0 += row_sizes[bi]
    return ExactSparseMatrix(sum(row_sizes), sum(col_sizes), tuple(sorted(entries)))


def write_matrix(m: ExactSparseMatrix, path, metadata: dict) -> Path:
    """Write the coordinate file and a JSON sidecar next to it."""
    path = Path(path)
    path.write_text(m.to_coordinate_text())
    meta = dict(metadata)
    meta["shape"] = [m.rows, m.cols]
    meta["checksum"] = m.checksum()
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def read_matrix(path) -> tuple[ExactSparseMatrix, dict]:
    path = Path(path)
    m = ExactSparseMatrix.from_coordinate_text(path.read_text())
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    return m, meta
