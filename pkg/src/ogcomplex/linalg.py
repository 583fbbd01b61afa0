"""Exact ranks: sparse elimination modulo a prime and a fraction-free rational oracle."""

from __future__ import annotations

import heapq

from ogcomplex.errors import ResourceLimitExceeded
from ogcomplex.sparse import ExactSparseMatrix

DEFAULT_PRIMES = (2147483647, 2147483629)
RATIONAL_LIMIT = 500 * 500


def rank_mod_p(m: ExactSparseMatrix, prime: int = DEFAULT_PRIMES[0]) -> int:
    """Rank over GF(prime) by sparse elimination.

    Pivot rows are taken shortest first; within a row the pivot column is the
    one with the fewest remaining entries.  Ties break on index, so the run
    is deterministic.
    """
    if prime <= 1 << 20:
        raise ValueError("prime must exceed 2^20")
    # work on the side with fewer lines
    if m.cols < m.rows:
        m = m.transpose()
    rows: dict[int, dict[int, int]] = {}
    for i, j, x in m.entries:
        x %= prime
        if x:
            rows.setdefault(i, {})[j] = x
    col_rows: dict[int, set[int]] = {}
    for i, row in rows.items():
        for j in row:
            col_rows.setdefault(j, set()).add(i)
    heap = [(len(row), i) for i, row in rows.items()]
    heapq.heapify(heap)
    rank = 0
    while heap:
        size, r = heapq.heappop(heap)
        row = rows.get(r)
        if row is None or len(row) != size:
            continue
        del rows[r]
        pc = min(row, key=lambda c: (len(col_rows[c]), c))
        inv = pow(row[pc], prime - 2, prime)
        for c in row:
            col_rows[c].discard(r)
        rank += 1
        for t in sorted(col_rows.pop(pc)):
            target = rows[t]
            factor = target[pc] * inv % prime
            for c, x in row.items():
                y = (target.get(c, 0) - factor * x) % prime
                if y:
                    if c not in target:
                        col_rows[c].add(t)
                    target[c] = y
                elif c in target:
                    del target[c]
                    if c != pc:
                        col_rows[c].discard(t)
            if target:
                heapq.heappush(heap, (len(target), t))
            else:
                del rows[t]
    return rank


def rational_rank(m: ExactSparseMatrix, limit: int = RATIONAL_LIMIT) -> int:
    """Exact rank over the rationals by Bareiss elimination on integers."""
    if m.rows * m.cols > limit:
        raise ResourceLimitExceeded(f"{m.rows}x{m.cols} exceeds the rational oracle limit")
    a = m.to_dense()
    if m.rows > m.cols:
        a = [list(col) for col in zip(*a)] if a else []
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for r in range(rank + 1, nrows):
            q = a[r][c]
            row = a[r]
            top = a[rank]
            for k in range(c, ncols):
                row[k] = (p * row[k] - q * top[k]) // prev
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank
