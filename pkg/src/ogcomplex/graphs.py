"""Directed multigraphs, admissibility, and canonical labeling with signs.

Vertices and edges are 0-indexed inside Python; the text and JSON formats
(:func:`to_text`, :func:`to_json`) use 1-indexed labels.

Every sign in the package comes from :func:`canonicalize`.  A labeled graph
``g`` equals ``coefficient * canonical`` in the space of coinvariants, where
the coefficient is the sign of the edge permutation (``d`` even) or of the
vertex permutation (``d`` odd) carrying ``g`` to its canonical labeling.
"""

from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from ogcomplex.errors import InadmissibleInput, OutOfRangeEndpoint, SelfLoop

Edge = tuple[int, int]


@dataclass(frozen=True, slots=True)
class LabeledGraph:
    """A directed multigraph on vertices ``0..n-1``; edge order is the edge labeling."""

    n: int
    edges: tuple[Edge, ...]

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def loop_order(self) -> int:
        return len(self.edges) - self.n + 1

    def valences(self) -> list[tuple[int, int]]:
        """(in-valence, out-valence) per vertex."""
        ins = [0] * self.n
        outs = [0] * self.n
        for t, h in self.edges:
            outs[t] += 1
            ins[h] += 1
        return list(zip(ins, outs))

    def sort_key(self) -> tuple:
        return (self.n, len(self.edges), self.edges)


@dataclass(frozen=True)
class AdmissibilityRules:
    min_valence: int = 2
    forbid_passing: bool = True
    forbid_directed_cycles: bool = True
    require_connected: bool = True

    def as_dict(self) -> dict:
        return {
            "min_valence": self.min_valence,
            "forbid_passing": self.forbid_passing,
            "forbid_directed_cycles": self.forbid_directed_cycles,
            "require_connected": self.require_connected,
        }


DEFAULT_RULES = AdmissibilityRules()

NONZERO = "Nonzero"
ZERO_BY_ODD_AUTOMORPHISM = "ZeroByOddAutomorphism"


@dataclass(frozen=True, slots=True)
class GraphClass:
    canonical: LabeledGraph
    parity: int
    status: str = NONZERO

    @property
    def v(self) -> int:
        return self.canonical.n

    @property
    def e(self) -> int:
        return len(self.canonical.edges)


@dataclass(frozen=True, slots=True)
class SignedClass:
    cls: GraphClass
    coefficient: int


class _Zero:
    """The zero value returned when a class is killed by an odd automorphism."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ZERO"

    def __bool__(self) -> bool:
        return False


ZERO = _Zero()


@dataclass(frozen=True)
class Violation:
    reason: str

    def __bool__(self) -> bool:
        return False


class _Ok:
    def __repr__(self) -> str:
        return "OK"

    def __bool__(self) -> bool:
        return True


OK = _Ok()


def new_graph(vertex_count: int, edges: Iterable[Sequence[int]]) -> LabeledGraph:
    if vertex_count < 1:
        raise OutOfRangeEndpoint(f"vertex_count must be >= 1, got {vertex_count}")
    out = []
    for pair in edges:
        t, h = int(pair[0]), int(pair[1])
        if not (0 <= t < vertex_count and 0 <= h < vertex_count):
            raise OutOfRangeEndpoint(f"edge {(t, h)} outside 0..{vertex_count - 1}")
        if t == h:
            raise SelfLoop(f"self-loop at vertex {t}")
        out.append((t, h))
    return LabeledGraph(vertex_count, tuple(out))


def reverse_all(g: LabeledGraph) -> LabeledGraph:
    return LabeledGraph(g.n, tuple((h, t) for t, h in g.edges))


def is_connected(n: int, edges: Sequence[Edge]) -> bool:
    if n == 0:
        return True
    adj = [[] for _ in range(n)]
    for t, h in edges:
        adj[t].append(h)
        adj[h].append(t)
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                queue.append(y)
    return count == n


def has_directed_cycle(n: int, edges: Sequence[Edge]) -> bool:
    indeg = [0] * n
    out = [[] for _ in range(n)]
    for t, h in edges:
        if t == h:
            return True
        out[t].append(h)
        indeg[h] += 1
    stack = [x for x in range(n) if indeg[x] == 0]
    removed = 0
    while stack:
        x = stack.pop()
        removed += 1
        for y in out[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                stack.append(y)
    return removed != n


def check_admissible(g: LabeledGraph, rules: AdmissibilityRules = DEFAULT_RULES):
    """Return ``OK`` or a falsy :class:`Violation` naming the first failed rule."""
    if rules.require_connected and not is_connected(g.n, g.edges):
        return Violation("disconnected")
    if rules.forbid_directed_cycles and has_directed_cycle(g.n, g.edges):
        return Violation("directed cycle")
    valences = g.valences()
    if rules.forbid_passing:
        for x, (i, o) in enumerate(valences):
            if i == 1 and o == 1:
                return Violation(f"passing vertex at {x}")
    for x, (i, o) in enumerate(valences):
        if i + o < rules.min_valence:
            return Violation(f"vertex {x} has valence {i + o} < {rules.min_valence}")
    return OK


def perm_sign(p: Sequence[int]) -> int:
    """Sign of the permutation ``i -> p[i]``."""
    n = len(p)
    seen = bytearray(n)
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = 1
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# canonical labeling


def _ranks(keys: list) -> list[int]:
    index = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [index[k] for k in keys]


def _refine(colors: list[int], out_adj, in_adj) -> list[int]:
    # equitable refinement; cell order is derived from signatures only
    count = len(set(colors))
    n = len(colors)
    while True:
        sigs = [
            (
                colors[v],
                tuple(sorted([colors[w] for w in out_adj[v]])),
                tuple(sorted([colors[u] for u in in_adj[v]])),
            )
            for v in range(n)
        ]
        colors = _ranks(sigs)
        new_count = colors and max(colors) + 1
        if new_count == count:
            return colors
        count = new_count


@dataclass(frozen=True, slots=True)
class CanonResult:
    """Parity-independent outcome of the canonical search on a labeled graph.

    ``relabel[v]`` is the canonical label of input vertex ``v``; ``vertex_sign``
    and ``edge_sign`` are the signs of the vertex and edge permutations carrying
    the input to ``graph``.
    """

    graph: LabeledGraph
    relabel: tuple[int, ...]
    vertex_sign: int
    edge_sign: int
    group_size: int
    odd_vertex_automorphism: bool
    odd_edge_automorphism: bool

    def zero(self, parity: int) -> bool:
        return self.odd_vertex_automorphism if parity % 2 else self.odd_edge_automorphism

    def sign(self, parity: int) -> int:
        return self.vertex_sign if parity % 2 else self.edge_sign


def _edge_perm(edges: Sequence[Edge], lab: Sequence[int]) -> tuple[tuple[Edge, ...], list[int]]:
    relabeled = [(lab[t], lab[h]) for t, h in edges]
    order = sorted(range(len(relabeled)), key=lambda i: (relabeled[i], i))
    tau = [0] * len(order)
    for pos, i in enumerate(order):
        tau[i] = pos
    return tuple(relabeled[i] for i in order), tau


@lru_cache(maxsize=400_000)
def _canon_sorted(n: int, edges: tuple[Edge, ...]) -> CanonResult:
    out_adj = [[] for _ in range(n)]
    in_adj = [[] for _ in range(n)]
    for t, h in edges:
        out_adj[t].append(h)
        in_adj[h].append(t)
    start = _ranks([(len(in_adj[v]), len(out_adj[v])) for v in range(n)])

    best_key = None
    best_leaves: list[list[int]] = []
    stack = [start]
    while stack:
        colors = _refine(stack.pop(), out_adj, in_adj)
        if max(colors) + 1 == n:
            key = tuple(sorted((colors[t], colors[h]) for t, h in edges))
            if best_key is None or key < best_key:
                best_key = key
                best_leaves = [colors]
            elif key == best_key:
                best_leaves.append(colors)
            continue
        sizes = [0] * n
        for c in colors:
            sizes[c] += 1
        target = next(c for c in range(n) if sizes[c] > 1)
        members = [v for v in range(n) if colors[v] == target]
        for u in reversed(members):
            stack.append(_ranks([(c, 0 if v == u else 1) for v, c in enumerate(colors)]))

    lab0 = best_leaves[0]
    graph_edges, tau0 = _edge_perm(edges, lab0)
    vsign0 = perm_sign(lab0)
    esign0 = perm_sign(tau0)
    parallel = len(set(edges)) != len(edges)
    bundle_factor = 1
    for mult in Counter(edges).values():
        bundle_factor *= math.factorial(mult)
    odd_v = False
    odd_e = parallel
    for lab in best_leaves[1:]:
        if perm_sign(lab) != vsign0:
            odd_v = True
        if not parallel and perm_sign(_edge_perm(edges, lab)[1]) != esign0:
            odd_e = True
    return CanonResult(
        graph=LabeledGraph(n, graph_edges),
        relabel=tuple(lab0),
        vertex_sign=vsign0,
        edge_sign=esign0,
        group_size=len(best_leaves) * bundle_factor,
        odd_vertex_automorphism=odd_v,
        odd_edge_automorphism=odd_e,
    )


def canonical_search(g: LabeledGraph) -> CanonResult:
    """Run the canonical search, presorting edges so equal graphs share cache entries."""
    edges = g.edges
    order = sorted(range(len(edges)), key=lambda i: (edges[i], i))
    sorted_edges = tuple(edges[i] for i in order)
    res = _canon_sorted(g.n, sorted_edges)
    if sorted_edges == edges:
        return res
    # g = sgn(rho) * g_sorted for the edge relabeling rho
    rho = [0] * len(order)
    for pos, i in enumerate(order):
        rho[i] = pos
    s = perm_sign(rho)
    if s == 1:
        return res
    return CanonResult(
        graph=res.graph,
        relabel=res.relabel,
        vertex_sign=res.vertex_sign,
        edge_sign=-res.edge_sign,
        group_size=res.group_size,
        odd_vertex_automorphism=res.odd_vertex_automorphism,
        odd_edge_automorphism=res.odd_edge_automorphism,
    )


def canonicalize(g: LabeledGraph, parity: int, *, check: bool = True):
    """Return ``ZERO`` or the :class:`SignedClass` with ``g = coefficient * class``."""
    if check:
        verdict = check_admissible(g)
        if not verdict:
            raise InadmissibleInput(verdict.reason)
    res = canonical_search(g)
    parity %= 2
    if res.zero(parity):
        return ZERO
    return SignedClass(GraphClass(res.graph, parity), res.sign(parity))


def automorphism_report(g: LabeledGraph, parity: int) -> dict:
    verdict = check_admissible(g)
    if not verdict:
        raise InadmissibleInput(verdict.reason)
    res = canonical_search(g)
    return {"group_size": res.group_size, "has_odd_automorphism": res.zero(parity % 2)}


def relabel(g: LabeledGraph, vertex_perm: Sequence[int], edge_perm: Sequence[int]) -> LabeledGraph:
    """Apply ``v -> vertex_perm[v]`` and move edge ``i`` to position ``edge_perm[i]``."""
    edges: list = [None] * len(g.edges)
    for i, (t, h) in enumerate(g.edges):
        edges[edge_perm[i]] = (vertex_perm[t], vertex_perm[h])
    return LabeledGraph(g.n, tuple(edges))


# ---------------------------------------------------------------------------
# text and JSON formats (1-indexed)


def to_text(g: LabeledGraph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines.extend(f"{t + 1} {h + 1}" for t, h in g.edges)
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> list[LabeledGraph]:
    """Parse one or more records of the ``v e`` / ``tail head`` format."""
    tokens = [int(tok) for tok in text.split()]
    graphs = []
    pos = 0
    while pos < len(tokens):
        v, e = tokens[pos], tokens[pos + 1]
        pos += 2
        pairs = [(tokens[pos + 2 * i] - 1, tokens[pos + 2 * i + 1] - 1) for i in range(e)]
        pos += 2 * e
        graphs.append(new_graph(v, pairs))
    return graphs


def to_json(g: LabeledGraph) -> dict:
    return {"v": g.n, "edges": [[t + 1, h + 1] for t, h in g.edges]}


def from_json(obj: dict | str) -> LabeledGraph:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return new_graph(obj["v"], [(t - 1, h - 1) for t, h in obj["edges"]])
