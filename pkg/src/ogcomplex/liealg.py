"""Insertion bracket on the dual complex and its one-dimensional extension.

The bracket is the usual graph-complex one: ``x o y`` sums, over the
vertices ``p`` of ``x``, the graphs obtained by replacing ``p`` with a copy
of ``y`` and reattaching the edges that met ``p`` to vertices of ``y`` in all
ways.  Results that are not admissible are dropped.

Labeled convention: the surviving vertices of ``x`` keep their order and the
vertices of ``y`` follow; the edges of ``x`` keep their positions and those
of ``y`` follow.  For odd ``d`` the sign ``(-1)^(n_x - 1 - p)`` moves ``p`` to
the end before it is replaced.  Degrees are the dual-complex degrees
``d(v-1) - (d-1)e``, and ``[x, y] = x o y - (-1)^{|x||y|} y o x``.

This convention is taken from the wider graph-complex literature; it is
validated here by the Jacobi identity, the derivation property of the
vertex-splitting differential and compatibility with the reversal involution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from ogcomplex.basis import enumerate_basis
from ogcomplex.complexes import Chain, Grading, full_differential_matrix, matrix_of
from ogcomplex.graphs import LabeledGraph, canonical_search, check_admissible
from ogcomplex.involution import iota_full_graph
from ogcomplex.sparse import ExactSparseMatrix

EDGE = LabeledGraph(2, ((0, 1),))


def degree(g: LabeledGraph, d: int) -> int:
    return Grading(d, g.n, len(g.edges)).degree_ogc


def _chain_degree(c: Chain) -> int | None:
    degs = {degree(g, c.d) for g in c.terms}
    if len(degs) > 1:
        raise ValueError("chain is not homogeneous")
    return degs.pop() if degs else None


def insert_labeled(x: LabeledGraph, y: LabeledGraph, d: int, *, admissible_only: bool = True):
    """Labeled terms ``(graph, sign)`` of ``x o y``."""
    n1, n2 = x.n, y.n
    out = []
    for p in range(n1):
        ends = [(k, side) for k, edge in enumerate(x.edges) for side in (0, 1) if edge[side] == p]
        sign = -1 if d % 2 and (n1 - 1 - p) % 2 else 1

        def lab(q: int) -> int:
            return q if q < p else q - 1

        base = [[lab(t) if t != p else None, lab(h) if h != p else None] for t, h in x.edges]
        tail = [(t + n1 - 1, h + n1 - 1) for t, h in y.edges]
        for choice in itertools.product(range(n2), repeat=len(ends)):
            edges = [list(e) for e in base]
            for (k, side), target in zip(ends, choice):
                edges[k][side] = target + n1 - 1
            g = LabeledGraph(n1 + n2 - 1, tuple(tuple(e) for e in edges) + tuple(tail))
            if any(t == h for t, h in g.edges):
                continue
            if admissible_only and not check_admissible(g):
                continue
            out.append((g, sign))
    return out


def _collect(terms, d: int) -> Chain:
    out = Chain(d)
    for g, s in terms:
        res = canonical_search(g)
        if not res.zero(d % 2):
            out.add(res.graph, s * res.sign(d % 2))
    return out


def insert(x, y, d: int) -> Chain:
    """Pre-Lie composition ``x o y`` of two classes or chains."""
    xs = x.terms.items() if isinstance(x, Chain) else [(_graph(x), 1)]
    ys = y.terms.items() if isinstance(y, Chain) else [(_graph(y), 1)]
    out = Chain(d)
    for gx, a in xs:
        for gy, b in ys:
            out += _collect(insert_labeled(gx, gy, d), d).scaled(a * b)
    return out


def _graph(c) -> LabeledGraph:
    return c if isinstance(c, LabeledGraph) else c.canonical


def _as_chain(c, d: int) -> Chain:
    if isinstance(c, Chain):
        return c
    return Chain(d, {_graph(c): 1})


def bracket(x, y, d: int) -> Chain:
    """Graded commutator of the insertion."""
    cx, cy = _as_chain(x, d), _as_chain(y, d)
    if cx.is_zero() or cy.is_zero():
        return Chain(d)
    out = Chain(d)
    for gx, a in cx.terms.items():
        for gy, b in cy.terms.items():
            koszul = -1 if (degree(gx, d) * degree(gy, d)) % 2 else 1
            out += _collect(insert_labeled(gx, gy, d), d).scaled(a * b)
            out += _collect(insert_labeled(gy, gx, d), d).scaled(-koszul * a * b)
    return out


def split_differential(c, d: int) -> Chain:
    """Vertex splitting: insert a single directed edge at every vertex."""
    out = Chain(d)
    for g, a in _as_chain(c, d).terms.items():
        out += _collect(insert_labeled(g, EDGE, d), d).scaled(a)
    return out


def iota_chain(c, d: int) -> Chain:
    out = Chain(d)
    for g, a in _as_chain(c, d).terms.items():
        img = iota_full_graph(g, d)
        if img is not None:
            out.add(img[0], a * img[1])
    return out


@dataclass
class ExtElement:
    """``scalar * 1 + body`` where ``1`` is the graph without vertices and edges."""

    scalar: Fraction = Fraction(0)
    body: Chain = field(default_factory=lambda: Chain(3))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtElement)
            and self.scalar == other.scalar
            and self.body.terms == other.body.terms
        )


def _unit_action(c: Chain) -> Chain:
    out = Chain(c.d)
    for g, a in c.terms.items():
        out.add(g, 2 * (g.n - len(g.edges)) * a)
    return out


def ext_bracket(a: ExtElement, b: ExtElement, d: int) -> ExtElement:
    """``[1,1] = 0`` and ``[1, G] = 2(#V - #E) G``, bilinear with the body bracket."""
    body = bracket(a.body, b.body, d)
    if a.scalar:
        body += _scale_fraction(_unit_action(b.body), a.scalar)
    if b.scalar:
        body += _scale_fraction(_unit_action(a.body), -b.scalar)
    return ExtElement(Fraction(0), body)


def _scale_fraction(c: Chain, q: Fraction) -> Chain:
    q = Fraction(q)
    if q.denominator != 1:
        raise ValueError("body chains carry integer coefficients")
    return c.scaled(int(q))


def jacobi_defect(x, y, z, d: int) -> Chain:
    """``[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]]``; zero when Jacobi holds."""
    cx, cy, cz = (_as_chain(t, d) for t in (x, y, z))
    dx, dy = _chain_degree(cx), _chain_degree(cy)
    sign = -1 if (dx or 0) * (dy or 0) % 2 else 1
    out = bracket(cx, bracket(cy, cz, d), d)
    out += bracket(bracket(cx, cy, d), cz, d).scaled(-1)
    out += bracket(cy, bracket(cx, cz, d), d).scaled(-sign)
    return out


def derivation_defect(x, y, d: int) -> Chain:
    """``D[x,y] - [x,Dy] - (-1)^{|y|} [Dx,y]`` for the splitting differential ``D``.

    ``D`` is right bracketing with the single edge, so it is a derivation
    from the right.
    """
    cx, cy = _as_chain(x, d), _as_chain(y, d)
    dy = _chain_degree(cy) or 0
    out = split_differential(bracket(cx, cy, d), d)
    out += bracket(cx, split_differential(cy, d), d).scaled(-1)
    out += bracket(split_differential(cx, d), cy, d).scaled(-1 if dy % 2 == 0 else 1)
    return out


def split_matrix(d: int, v: int, e: int) -> ExactSparseMatrix:
    """Matrix of the splitting differential from the ``(v, e)`` slice to ``(v+1, e+1)``."""
    src, tgt = enumerate_basis(d, v, e), enumerate_basis(d, v + 1, e + 1)
    return matrix_of((split_differential(c.canonical, d) for c in src.classes), tgt)


def transpose_check(d: int, v: int, e: int) -> bool:
    """``A_tgt S = D^T A_src`` where ``D`` contracts ``(v+1, e+1) -> (v, e)``.

    ``A`` is the diagonal of automorphism group orders, so splitting is the
    contraction differential transposed for the pairing ``<G, G> = |Aut G|``.
    """
    src, tgt = enumerate_basis(d, v, e), enumerate_basis(d, v + 1, e + 1)
    s = split_matrix(d, v, e)
    contraction = full_differential_matrix(d, v + 1, e + 1)
    a_src = _aut_diagonal(src)
    a_tgt = _aut_diagonal(tgt)
    return ((a_tgt @ s) - (contraction.transpose() @ a_src)).is_zero()


def _aut_diagonal(s) -> ExactSparseMatrix:
    n = len(s.classes)
    return ExactSparseMatrix.from_dict(
        n, n, {(i, i): canonical_search(c.canonical).group_size for i, c in enumerate(s.classes)}
    )


def iota_defect(x, y, d: int) -> Chain:
    """``iota[x,y] - [iota x, iota y]``."""
    out = iota_chain(bracket(x, y, d), d)
    out += bracket(iota_chain(x, d), iota_chain(y, d), d).scaled(-1)
    return out


def unit_jacobi_defect(x, y, d: int) -> Chain:
    """Failure of ``[1, -]`` to be a derivation of the body bracket.

    With the unit rule as stated this equals ``-2[x, y]``: the bracket lands
    in ``v_x + v_y - 1`` vertices, so ``#V - #E`` is not additive.
    """
    one = ExtElement(Fraction(1), Chain(d))
    ex, ey = ExtElement(Fraction(0), _as_chain(x, d)), ExtElement(Fraction(0), _as_chain(y, d))
    lhs = ext_bracket(one, ExtElement(Fraction(0), bracket(x, y, d)), d).body
    a = ext_bracket(ext_bracket(one, ex, d), ey, d).body
    b = ext_bracket(ex, ext_bracket(one, ey, d), d).body
    out = Chain(d)
    out += lhs
    out += a.scaled(-1)
    out += b.scaled(-1)
    return out
