"""Betti numbers, multi-prime rank agreement, and quasi-isomorphism certificates.

Complexes are indexed by vertex count inside one loop order: the
differential ``D[k]`` maps the ``k``-vertex slice to the ``(k-1)``-vertex
slice.  Homology at ``k`` is ``dim C_k - rank D[k] - rank D[k+1]``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from ogcomplex.basis import ALL, FULL, MINUS, PLUS, SKELETON1, BasisSlice, enumerate_basis, flavor_name, get_basis
from ogcomplex.complexes import Grading, differential_matrix
from ogcomplex.errors import IncompleteRange, NotAChainMap, PrimeDisagreement, ResourceLimitExceeded
from ogcomplex.linalg import DEFAULT_PRIMES, rank_mod_p, rational_rank
from ogcomplex.sparse import ExactSparseMatrix, block

__all__ = [
    "BettiTable",
    "ChainComplex",
    "betti",
    "complex_for_loop_order",
    "euler_check",
    "rank",
    "rank_mod_p",
    "rational_rank",
    "slice_dimension",
    "verify_quasi_iso",
]


def rank(m: ExactSparseMatrix, primes: Sequence[int] = DEFAULT_PRIMES) -> int:
    """Rank agreed on by every prime; disagreement escalates to the rational oracle."""
    if m.is_zero():
        return 0
    ranks = {rank_mod_p(m, p) for p in primes}
    if len(ranks) == 1:
        return ranks.pop()
    try:
        return rational_rank(m)
    except ResourceLimitExceeded as exc:
        raise PrimeDisagreement(f"ranks {sorted(ranks)} differ and the matrix is too large for the oracle") from exc


def _part_slice(d, v, e, flavor, cache_dir) -> BasisSlice:
    if v < 1 or e < 0:
        return BasisSlice(d, v, e, flavor, ())
    if not isinstance(flavor, str):
        return enumerate_basis(d, v, e, flavor)
    return get_basis(d, v, e, flavor, cache_dir)


def slice_dimension(d: int, v: int, e: int, flavor=FULL, part: str = ALL, cache_dir=None) -> int:
    s = _part_slice(d, v, e, flavor, cache_dir)
    if part == ALL or not len(s):
        return len(s)
    from ogcomplex.involution import split_basis

    split = split_basis(s)
    return len(split.plus) if part == PLUS else len(split.minus)


@lru_cache(maxsize=4096)
def _cached_matrix(d, v, e, flavor, part) -> ExactSparseMatrix:
    return differential_matrix(d, v, e, flavor, part)


def matrix(d: int, v: int, e: int, flavor=FULL, part: str = ALL, cache_dir=None) -> ExactSparseMatrix:
    if v < 1 or e < 0:
        return ExactSparseMatrix.zero(0, slice_dimension(d, v, e, flavor, part, cache_dir))
    if cache_dir is None:
        return _cached_matrix(d, v, e, flavor, part)
    return differential_matrix(d, v, e, flavor, part, cache_dir)


@lru_cache(maxsize=4096)
def _cached_rank(d, v, e, flavor, part, primes) -> int:
    return rank(matrix(d, v, e, flavor, part), primes)


def betti(
    d: int, v: int, e: int, flavor=FULL, part: str = ALL, *, primes: Sequence[int] = DEFAULT_PRIMES, cache_dir=None
) -> int:
    dim = slice_dimension(d, v, e, flavor, part, cache_dir)
    if not dim:
        return 0
    primes = tuple(primes)
    if cache_dir is None:
        r_out = _cached_rank(d, v, e, flavor, part, primes)
        r_in = _cached_rank(d, v + 1, e + 1, flavor, part, primes)
    else:
        r_out = rank(matrix(d, v, e, flavor, part, cache_dir), primes)
        r_in = rank(matrix(d, v + 1, e + 1, flavor, part, cache_dir), primes)
    out = dim - r_out - r_in
    assert 0 <= out <= dim
    return out


@dataclass
class BettiTable:
    """``(d, v, e, flavor, part) -> (dim, betti)``."""

    entries: dict = field(default_factory=dict)

    def add(self, d, v, e, flavor, part, dim, value) -> None:
        self.entries[(d, v, e, flavor_name(flavor), part)] = (dim, value)

    def betti(self, d, v, e, flavor, part) -> int:
        return self.entries[(d, v, e, flavor_name(flavor), part)][1]

    def rows(self) -> list[dict]:
        out = []
        for key in sorted(self.entries):
            d, v, e, flavor, part = key
            dim, value = self.entries[key]
            g = Grading(d, v, e)
            out.append(
                {
                    "d": d,
                    "v": v,
                    "e": e,
                    "flavor": flavor,
                    "part": part,
                    "loop_order": g.loop_order,
                    "degree_OG": g.degree_og,
                    "degree_OGC": g.degree_ogc,
                    "dim": dim,
                    "betti": value,
                }
            )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["d", "v", "e", "flavor", "part", "dim", "betti"])
        for r in self.rows():
            writer.writerow([r["d"], r["v"], r["e"], r["flavor"], r["part"], r["dim"], r["betti"]])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.rows(), indent=2, sort_keys=True) + "\n"


def loop_order_range(b: int, flavor, max_v: int | None) -> range:
    if flavor == SKELETON1:
        return range(1, 5 * (b - 1) + 1)
    if max_v is None:
        raise IncompleteRange("the full complex is infinite in each loop order; give max_v")
    return range(1, max_v + 1)


def betti_table(
    d: int, b: int, flavor=FULL, parts: Sequence[str] = (ALL,), max_v: int | None = None, cache_dir=None
) -> BettiTable:
    table = BettiTable()
    for v in loop_order_range(b, flavor, max_v):
        e = v + b - 1
        for part in parts:
            dim = slice_dimension(d, v, e, flavor, part, cache_dir)
            if dim:
                table.add(d, v, e, flavor, part, dim, betti(d, v, e, flavor, part, cache_dir=cache_dir))
    return table


def euler_check(d: int, loop_order: int, flavor=SKELETON1, part: str = ALL, cache_dir=None) -> bool:
    """Alternating sums of dimensions and of Betti numbers agree."""
    if flavor != SKELETON1 or loop_order < 2:
        raise IncompleteRange("only the reduced complex covers a loop order completely")
    dims = bettis = 0
    for v in loop_order_range(loop_order, flavor, None):
        e = v + loop_order - 1
        sign = -1 if Grading(d, v, e).degree_og % 2 else 1
        dim = slice_dimension(d, v, e, flavor, part, cache_dir)
        if dim:
            dims += sign * dim
            bettis += sign * betti(d, v, e, flavor, part, cache_dir=cache_dir)
    return dims == bettis


@dataclass
class ChainComplex:
    """Finite window of a complex: ``dims[k]`` and ``diff[k]: C_k -> C_{k-1}``."""

    dims: dict[int, int]
    diff: dict[int, ExactSparseMatrix]

    def d(self, k: int) -> ExactSparseMatrix:
        if k in self.diff:
            return self.diff[k]
        return ExactSparseMatrix.zero(self.dims.get(k - 1, 0), self.dims.get(k, 0))


def complex_for_loop_order(d: int, b: int, flavor, part: str, degrees: Sequence[int], cache_dir=None) -> ChainComplex:
    """Slices ``v in degrees`` plus the differential out of ``max(degrees) + 1``."""
    ks = sorted(set(degrees) | {max(degrees) + 1})
    dims = {k: slice_dimension(d, k, k + b - 1, flavor, part, cache_dir) for k in ks}
    dims[min(ks) - 1] = slice_dimension(d, min(ks) - 1, min(ks) + b - 2, flavor, part, cache_dir)
    diff = {k: matrix(d, k, k + b - 1, flavor, part, cache_dir) for k in ks}
    return ChainComplex(dims, diff)


def _homology(c: ChainComplex, k: int, primes) -> tuple[int, int, int]:
    ra = rank(c.d(k), primes)
    rb = rank(c.d(k + 1), primes)
    return c.dims.get(k, 0) - ra - rb, ra, rb


def verify_quasi_iso(
    f: Mapping[int, ExactSparseMatrix],
    source: ChainComplex,
    target: ChainComplex,
    degrees: Sequence[int],
    *,
    primes: Sequence[int] = DEFAULT_PRIMES,
    report: dict | None = None,
) -> bool:
    """Decide whether ``f`` induces isomorphisms on homology in every listed degree.

    ``f[k]`` maps ``C_k(source) -> C_k(target)``; the chain-map identity is
    checked first in every degree of the window.  Each degree needs the
    differential out of ``k + 1`` on both sides.
    """
    primes = tuple(primes)

    def fmap(k):
        if k in f:
            return f[k]
        return ExactSparseMatrix.zero(target.dims.get(k, 0), source.dims.get(k, 0))

    for k in degrees:
        for kk in (k, k + 1):
            lhs = target.d(kk) @ fmap(kk)
            rhs = fmap(kk - 1) @ source.d(kk)
            if not (lhs - rhs).is_zero():
                raise NotAChainMap(f"f does not commute with the differentials at degree {kk}")
    ok = True
    for k in degrees:
        hs, ra, _ = _homology(source, k, primes)
        ht, _, rb = _homology(target, k, primes)
        a = source.d(k)
        b_tgt = target.d(k + 1)
        fk = fmap(k)
        n_tgt, n_src, n_y = fk.rows, fk.cols, b_tgt.cols
        m = block([[fk, b_tgt], [a, None]], [n_tgt, a.rows], [n_src, n_y])
        induced = rank(m, primes) - ra - rb
        if report is not None:
            report[k] = {"source": hs, "target": ht, "induced_rank": induced}
        if not (hs == ht == induced):
            ok = False
    return ok
