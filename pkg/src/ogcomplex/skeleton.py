"""Skeleton graphs, the reduced skeleton complex and its expansion into full graphs.

A reduced skeleton graph has skeleton vertices ``0..k-1`` and typed edges:
``Ed`` (a plain edge tail -> head), ``dE`` (a plain edge head -> tail) and
``Ess``, half the difference of the two-edge chain with a middle sink and the
one with a middle source.  ``EE`` only occurs in the proof complexes.

Labeled expansion convention.  Skeleton edges are expanded in order; a plain
edge becomes one edge, an ``Ess`` edge ``(a, b)`` becomes the consecutive
pair ``a -> m, b -> m`` where the middle vertex ``m`` is numbered after all
skeleton vertices, in the order of the ``Ess`` edges.  The resulting
*all-sink graph* determines the element completely: its integral expansion
replaces every sink pair by ``sink pair - source pair``, and the true element
is that expansion divided by ``2^s`` for ``s`` Ess edges.

All-sink graphs are also how the reduced complex is enumerated and stored
(flavor ``skeleton1`` in :mod:`ogcomplex.basis`).  Signs of the differential
and of the involution are not chosen here: they are read off from the full
complex through the expansion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ogcomplex.basis import FULL, SKELETON1, BasisSlice, get_basis
from ogcomplex.complexes import Chain, differential_labeled
from ogcomplex.cores import decorated_graph
from ogcomplex.errors import ContainsEE, NotAChainMap, UnsupportedLoopOrder
from ogcomplex.graphs import LabeledGraph, canonical_search
from ogcomplex.involution import full_iota_sign
from ogcomplex.sparse import ExactSparseMatrix

ED, DE, ESS, EE = "Ed", "dE", "Ess", "EE"
_SYMBOL = {ED: ">", DE: "<", ESS: "S", EE: "E"}
_TYPE = {v: k for k, v in _SYMBOL.items()}


@dataclass(frozen=True)
class SkeletonGraph:
    vertex_count: int
    edges: tuple[tuple[int, int, str], ...]

    @property
    def ess_count(self) -> int:
        return sum(1 for e in self.edges if e[2] == ESS)

    def valences(self) -> list[int]:
        val = [0] * self.vertex_count
        for a, b, _ in self.edges:
            val[a] += 1
            val[b] += 1
        return val

    def to_text(self) -> str:
        lines = [f"{self.vertex_count} {len(self.edges)}"]
        lines += [f"{a + 1} {b + 1} {_SYMBOL[t]}" for a, b, t in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SkeletonGraph":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        k, m = int(lines[0][0]), int(lines[0][1])
        if len(lines) - 1 != m:
            raise ValueError(f"expected {m} edge lines, found {len(lines) - 1}")
        edges = tuple((int(a) - 1, int(b) - 1, _TYPE[t]) for a, b, t in lines[1:])
        return cls(k, edges)


def to_all_sink(s: SkeletonGraph) -> LabeledGraph:
    """The labeled all-sink graph of a reduced skeleton graph."""
    edges = []
    mid = s.vertex_count
    for a, b, t in s.edges:
        if t == ED:
            edges.append((a, b))
        elif t == DE:
            edges.append((b, a))
        elif t == ESS:
            edges.append((a, mid))
            edges.append((b, mid))
            mid += 1
        else:
            raise ContainsEE("EE edges have no expansion")
    return LabeledGraph(mid, tuple(edges))


def sink_middles(g: LabeledGraph) -> list[int]:
    return [x for x, (i, o) in enumerate(g.valences()) if i == 2 and o == 0]


def from_all_sink(g: LabeledGraph, d: int) -> tuple[SkeletonGraph, int]:
    """Skeleton graph ``s`` and sign with ``to_all_sink(s) = sign * g`` as classes."""
    mids = set(sink_middles(g))
    skel = [x for x in range(g.n) if x not in mids]
    pos = {x: i for i, x in enumerate(skel)}
    incoming: dict[int, list[int]] = {m: [] for m in mids}
    typed = []
    for t, h in g.edges:
        if h in mids:
            incoming[h].append(t)
            if len(incoming[h]) == 2:
                a, b = incoming[h]
                typed.append((pos[a], pos[b], ESS))
        else:
            typed.append((pos[t], pos[h], ED))
    s = SkeletonGraph(len(skel), tuple(typed))
    a = canonical_search(to_all_sink(s))
    b = canonical_search(g)
    if a.graph != b.graph:
        raise ValueError("graph is not an all-sink graph")
    return s, a.sign(d % 2) * b.sign(d % 2)


def expand_labeled(g: LabeledGraph) -> list[tuple[LabeledGraph, int]]:
    """Integral expansion of an all-sink graph: every subset of sink pairs flipped to sources."""
    mids = sink_middles(g)
    out = []
    for r in range(len(mids) + 1):
        for flip in itertools.combinations(mids, r):
            fl = set(flip)
            edges = tuple((h, t) if h in fl else (t, h) for t, h in g.edges)
            out.append((LabeledGraph(g.n, edges), -1 if r % 2 else 1))
    return out


@dataclass(frozen=True)
class Expansion:
    """``chain / 2**exponent`` as an element of the full complex."""

    chain: Chain
    exponent: int


def expand(s, d: int) -> Expansion:
    g = to_all_sink(s) if isinstance(s, SkeletonGraph) else s
    out = Chain(d)
    for h, x in expand_labeled(g):
        res = canonical_search(h)
        if not res.zero(d % 2):
            out.add(res.graph, x * res.sign(d % 2))
    return Expansion(out, len(sink_middles(g)))


@lru_cache(maxsize=None)
def _expansion_column(g: LabeledGraph, d: int) -> tuple:
    return tuple(expand(g, d).chain.terms.items())


def _slice(d, v, e, flavor, cache_dir):
    if v < 1 or e < 0:
        return BasisSlice(d, v, e, flavor, ())
    return get_basis(d, v, e, flavor, cache_dir)


def inclusion_matrix(d: int, v: int, e: int, cache_dir=None) -> ExactSparseMatrix:
    """Integral expansions of the reduced basis written in the full basis."""
    src = _slice(d, v, e, SKELETON1, cache_dir)
    tgt = _slice(d, v, e, FULL, cache_dir)
    idx = tgt.index()
    cols = []
    for c in src.classes:
        cols.append({idx[g]: x for g, x in _expansion_column(c.canonical, d)})
    return ExactSparseMatrix.from_columns(len(tgt), cols)


def _reduced_image(g: LabeledGraph, d: int, target: BasisSlice) -> dict[int, int]:
    """Coordinates of the full differential of the expansion of ``g`` in the target reduced basis."""
    image = Chain(d)
    for h, x in expand_labeled(g):
        image += differential_labeled(h, d).scaled(x)
    idx = target.index()
    col = {idx[h]: x for h, x in image.terms.items() if h in idx}
    rebuilt = Chain(d)
    for i, x in col.items():
        for h, y in _expansion_column(target.classes[i].canonical, d):
            rebuilt.add(h, x * y)
    if rebuilt.terms != image.terms:
        raise NotAChainMap(f"differential of {g} leaves the reduced complex")
    return col


def skeleton_differential_matrix(d: int, v: int, e: int, cache_dir=None) -> ExactSparseMatrix:
    """Differential of the reduced complex in the integral normalization.

    Entry ``(j, i)`` is the coefficient of expansion ``j`` in the full
    differential of expansion ``i``.  Rescaling basis vectors by powers of 2
    turns it into the differential in the half-integral normalization, so
    ranks and homology agree.
    """
    src = _slice(d, v, e, SKELETON1, cache_dir)
    tgt = _slice(d, v - 1, e - 1, SKELETON1, cache_dir)
    return ExactSparseMatrix.from_columns(len(tgt), (_reduced_image(c.canonical, d, tgt) for c in src.classes))


def split_by_ess(m: ExactSparseMatrix, src: BasisSlice, tgt: BasisSlice) -> tuple[ExactSparseMatrix, ExactSparseMatrix]:
    """Core part (keeps the Ess count) and edge part (lowers it by one)."""
    s_src = [len(sink_middles(c.canonical)) for c in src.classes]
    s_tgt = [len(sink_middles(c.canonical)) for c in tgt.classes]
    core = {(i, j): x for i, j, x in m.entries if s_tgt[i] == s_src[j]}
    edge = {(i, j): x for i, j, x in m.entries if s_tgt[i] == s_src[j] - 1}
    if len(core) + len(edge) != m.nnz:
        raise NotAChainMap("differential changes the Ess count by more than one")
    return ExactSparseMatrix.from_dict(m.rows, m.cols, core), ExactSparseMatrix.from_dict(m.rows, m.cols, edge)


def skeleton_differential(s, d: int) -> dict[str, Chain]:
    """Core and edge differential of one reduced graph, in the half-integral normalization.

    Chains are expressed in all-sink graphs; a term with ``s'`` Ess edges
    stands for its own half-integral element.
    """
    g = to_all_sink(s) if isinstance(s, SkeletonGraph) else s
    res = canonical_search(g)
    sign = res.sign(d % 2)
    k = len(sink_middles(g))
    v, e = g.n, len(g.edges)
    tgt = _slice(d, v - 1, e - 1, SKELETON1, None)
    col = _reduced_image(res.graph, d, tgt)
    core, edge = Chain(d), Chain(d)
    for i, x in col.items():
        h = tgt.classes[i].canonical
        kk = len(sink_middles(h))
        if kk == k:
            core.add(h, sign * x)
        else:
            if x % 2:
                raise NotAChainMap("odd coefficient in the edge differential")
            edge.add(h, sign * x // 2)
    return {"core": core, "edge": edge}


def iota_skeleton_graph(g: LabeledGraph, d: int) -> tuple[LabeledGraph, int] | None:
    """Involution on the reduced complex: reverse plain edges, keep sink pairs.

    The sign is the full-complex sign times ``(-1)^s``, which is what makes
    the expansion commute with the involution.
    """
    mids = set(sink_middles(g))
    edges = tuple((t, h) if h in mids else (h, t) for t, h in g.edges)
    res = canonical_search(LabeledGraph(g.n, edges))
    if res.zero(d % 2):
        return None
    sign = full_iota_sign(d, g.n, len(g.edges)) * (-1) ** len(mids)
    return res.graph, sign * res.sign(d % 2)


def o1_basis_by_loop_order(d: int, b: int, cache_dir=None) -> list[BasisSlice]:
    """Every nonempty reduced slice of loop order ``b``."""
    if b == 1:
        raise UnsupportedLoopOrder("loop order 1 has no vertex of valence >= 3")
    if b < 1:
        raise ValueError("loop order must be positive")
    out = []
    for v in range(1, 5 * (b - 1) + 1):
        s = get_basis(d, v, v + b - 1, SKELETON1, cache_dir)
        if len(s):
            out.append(s)
    return out


# long-chain encoding ------------------------------------------------------


def skeleton_encoding(g: LabeledGraph) -> tuple[int, tuple, tuple]:
    """Encode a graph of loop order >= 2 as a core multigraph with chain words.

    Returns ``(k, pairs, words)`` where skeleton vertices keep their relative
    order and each word lists edge directions along the chain from its first
    endpoint (1 = pointing away from it).
    """
    val = [i + o for i, o in g.valences()]
    core = [x for x in range(g.n) if val[x] >= 3]
    if not core:
        raise UnsupportedLoopOrder("no vertex of valence >= 3")
    pos = {x: i for i, x in enumerate(core)}
    adj: dict[int, list[tuple[int, int]]] = {x: [] for x in range(g.n)}
    for idx, (t, h) in enumerate(g.edges):
        adj[t].append((idx, h))
        adj[h].append((idx, t))
    used = set()
    pairs, words = [], []
    for start in core:
        for idx, _ in adj[start]:
            if idx in used:
                continue
            word = []
            cur, edge = start, idx
            while True:
                used.add(edge)
                t, h = g.edges[edge]
                nxt = h if t == cur else t
                word.append(1 if t == cur else 0)
                if val[nxt] >= 3:
                    break
                cur = nxt
                edge = next(i for i, _ in adj[cur] if i not in used)
            pairs.append((pos[start], pos[nxt]))
            words.append(tuple(word))
    return len(core), tuple(pairs), tuple(words)


def skeleton_decoding(k: int, pairs, words) -> LabeledGraph:
    return decorated_graph(k, pairs, words)


def encoding_round_trip(g: LabeledGraph) -> bool:
    k, pairs, words = skeleton_encoding(g)
    return canonical_search(skeleton_decoding(k, pairs, words)).graph == canonical_search(g).graph



def inclusion_part_matrix(d: int, v: int, e: int, part: str, cache_dir=None) -> ExactSparseMatrix:
    """The inclusion restricted to one eigenpart, in the eigenbases of both sides."""
    from ogcomplex.basis import ALL
    from ogcomplex.involution import restrict, split_basis

    m = inclusion_matrix(d, v, e, cache_dir)
    if part == ALL:
        return m
    src = split_basis(_slice(d, v, e, SKELETON1, cache_dir))
    tgt = split_basis(_slice(d, v, e, FULL, cache_dir))
    return restrict(m, src, tgt, part)


def skeleton_quasi_iso(d: int, b: int, part: str, max_v: int, cache_dir=None, report: dict | None = None) -> bool:
    """Certify the inclusion of the reduced complex on vertex counts ``1..max_v``.

    The full complex is unbounded in each loop order, so the certificate is
    for this window; it needs full slices up to ``max_v + 1``.
    """
    from ogcomplex.homology import complex_for_loop_order, verify_quasi_iso

    degrees = list(range(1, max_v + 1))
    src = complex_for_loop_order(d, b, SKELETON1, part, degrees, cache_dir)
    tgt = complex_for_loop_order(d, b, FULL, part, degrees, cache_dir)
    f = {k: inclusion_part_matrix(d, k, k + b - 1, part, cache_dir) for k in range(0, max_v + 2)}
    return verify_quasi_iso(f, src, tgt, degrees, report=report)
