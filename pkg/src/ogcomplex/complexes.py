"""Edge contraction, the differential, its matrices and the bigrading.

Sign convention for contracting edge ``a = (t, h)`` of a labeled graph with
``n`` vertices and ``m`` edges: relabel so that ``a`` is the last edge and
``h`` the last vertex, keeping the relative order of everything else; the
contraction of that representative carries sign ``+``.  Moving ``a`` to the
end costs ``(-1)^(m-1-a)``, moving ``h`` costs ``(-1)^(n-1-h)``, and only the
permutation that matters for the parity of ``d`` contributes.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ogcomplex.basis import FULL, SKELETON1, ALL, BasisSlice, get_basis
from ogcomplex.errors import EdgeOutOfRange, MissingBasis
from ogcomplex.graphs import (
    ZERO,
    GraphClass,
    LabeledGraph,
    SignedClass,
    canonical_search,
    has_directed_cycle,
)
from ogcomplex.sparse import ExactSparseMatrix


@dataclass(frozen=True)
class Grading:
    d: int
    v: int
    e: int

    @property
    def loop_order(self) -> int:
        return self.e - self.v + 1

    @property
    def degree_og(self) -> int:
        return (self.d - 1) * self.e - self.d * (self.v - 1)

    @property
    def degree_ogc(self) -> int:
        return -self.degree_og


def grade(d: int, v: int, e: int) -> dict:
    g = Grading(d, v, e)
    return {"loop_order": g.loop_order, "degree_OG": g.degree_og, "degree_OGC": g.degree_ogc}


@dataclass
class Chain:
    """A formal integer combination of canonical graphs in one slice."""

    d: int
    terms: dict = field(default_factory=dict)

    def add(self, graph: LabeledGraph, coefficient: int) -> None:
        if not coefficient:
            return
        x = self.terms.get(graph, 0) + coefficient
        if x:
            self.terms[graph] = x
        else:
            self.terms.pop(graph, None)

    def add_signed(self, sc, factor: int = 1) -> None:
        if sc is not ZERO:
            self.add(sc.cls.canonical, factor * sc.coefficient)

    def __iadd__(self, other: "Chain") -> "Chain":
        for g, x in other.terms.items():
            self.add(g, x)
        return self

    def scaled(self, factor: int) -> "Chain":
        return Chain(self.d, {g: factor * x for g, x in self.terms.items()} if factor else {})

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, Chain) and self.d == other.d and self.terms == other.terms

    def vector(self, slice_: BasisSlice) -> dict[int, int]:
        idx = slice_.index()
        out = {}
        for g, x in self.terms.items():
            if g not in idx:
                raise MissingBasis(f"{g} is not in the ({slice_.v}, {slice_.e}) basis")
            out[idx[g]] = x
        return out


def _has_passing_vertex(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    ins = [0] * n
    outs = [0] * n
    for t, h in edges:
        outs[t] += 1
        ins[h] += 1
    return any(ins[x] == 1 and outs[x] == 1 for x in range(n))


def contract_labeled(g: LabeledGraph, a: int, d: int) -> tuple[LabeledGraph, int] | None:
    """Contract edge ``a`` of a labeled graph; ``None`` when the result is declared zero."""
    if not 0 <= a < len(g.edges):
        raise EdgeOutOfRange(f"edge {a} not in 0..{len(g.edges) - 1}")
    t, h = g.edges[a]
    n = g.n
    if d % 2:
        sign = -1 if (n - 1 - h) % 2 else 1
    else:
        sign = -1 if (len(g.edges) - 1 - a) % 2 else 1
    tt = t - 1 if t > h else t

    def lab(x: int) -> int:
        if x == h:
            return tt
        return x - 1 if x > h else x

    edges = tuple((lab(x), lab(y)) for i, (x, y) in enumerate(g.edges) if i != a)
    if any(x == y for x, y in edges):
        return None
    if _has_passing_vertex(n - 1, edges) or has_directed_cycle(n - 1, edges):
        return None
    return LabeledGraph(n - 1, edges), sign


def contract_edge(c, edge_label: int, d: int):
    """Contract one edge of a class representative; returns ``ZERO`` or a :class:`SignedClass`."""
    if isinstance(c, SignedClass):
        g, coeff = c.cls.canonical, c.coefficient
    elif isinstance(c, GraphClass):
        g, coeff = c.canonical, 1
    else:
        g, coeff = c, 1
    out = contract_labeled(g, edge_label, d)
    if out is None:
        return ZERO
    h, sign = out
    res = canonical_search(h)
    if res.zero(d % 2):
        return ZERO
    return SignedClass(GraphClass(res.graph, d % 2), coeff * sign * res.sign(d % 2))


def differential_labeled(g: LabeledGraph, d: int) -> Chain:
    out = Chain(d)
    for a in range(len(g.edges)):
        out.add_signed(contract_edge(g, a, d))
    return out


def differential(c, d: int) -> Chain:
    """Sum of all edge contractions of a class (or a :class:`Chain`)."""
    if isinstance(c, Chain):
        out = Chain(d)
        for g, x in c.terms.items():
            out += differential_labeled(g, d).scaled(x)
        return out
    g = c.canonical if isinstance(c, GraphClass) else c
    return differential_labeled(g, d)


def matrix_of(images: Iterable[Chain], target: BasisSlice) -> ExactSparseMatrix:
    return ExactSparseMatrix.from_columns(len(target), (ch.vector(target) for ch in images))


def full_differential_matrix(d: int, v: int, e: int, cache_dir=None) -> ExactSparseMatrix:
    src = get_basis(d, v, e, FULL, cache_dir)
    tgt = get_basis(d, v - 1, e - 1, FULL, cache_dir) if v > 1 and e > 0 else BasisSlice(d, v - 1, e - 1, FULL, ())
    return matrix_of((differential(c, d) for c in src.classes), tgt)


def differential_matrix(d: int, v: int, e: int, flavor=FULL, part: str = ALL, cache_dir=None) -> ExactSparseMatrix:
    """Matrix of the differential from slice ``(v, e)`` to ``(v-1, e-1)``.

    Columns follow the source basis and rows the target basis; for the
    eigenparts both are the eigenbases from :mod:`ogcomplex.involution`.
    """
    if part != ALL:
        from ogcomplex.involution import eigen_differential_matrix

        return eigen_differential_matrix(d, v, e, flavor, part, cache_dir=cache_dir)
    if flavor == FULL:
        return full_differential_matrix(d, v, e, cache_dir)
    if flavor == SKELETON1:
        from ogcomplex.skeleton import skeleton_differential_matrix

        return skeleton_differential_matrix(d, v, e, cache_dir=cache_dir)
    from ogcomplex.proofcheck import phi_differential_matrix

    return phi_differential_matrix(flavor, d, v, e)


def dual_matrix(m: ExactSparseMatrix) -> ExactSparseMatrix:
    """The differential of the dual complex: the transpose."""
    return m.transpose()


def chain_from_vector(vec: Mapping[int, int], slice_: BasisSlice) -> Chain:
    out = Chain(slice_.d)
    for i, x in vec.items():
        out.add(slice_.classes[i].canonical, x)
    return out


def square_is_zero(d: int, v: int, e: int, flavor=FULL, part: str = ALL, cache_dir=None) -> bool:
    a = differential_matrix(d, v, e, flavor, part, cache_dir)
    b = differential_matrix(d, v - 1, e - 1, flavor, part, cache_dir)
    return (b @ a).is_zero()


def accumulate(pairs: Iterable[tuple[LabeledGraph, int]], d: int) -> Chain:
    acc: dict = defaultdict(int)
    for g, x in pairs:
        acc[g] += x
    return Chain(d, {g: x for g, x in acc.items() if x})
