"""Finite machine check of the acyclicity argument for the minus part.

For a fixed core graph (an undirected multigraph with labeled vertices and
edges) the complex ``OPhi_i`` is spanned by type assignments: the tree
edges ``a_1..a_i`` have type ``EE``; every other edge is ``Ed`` (stored
direction, lower label to higher label), ``dE`` (the opposite) or ``Ess``.
Assignments with a cycle are excluded, where a cycle may run along ``EE``
edges in either direction.  Only the edge differential acts.

Types are single characters: ``>`` (Ed), ``<`` (dE), ``S`` (Ess), ``E`` (EE).

Signs come from the labeled expansion convention of
:mod:`ogcomplex.skeleton`: changing the ``Ess`` edge at position ``k``
carries ``(-1)^w`` where ``w`` counts later edges of odd weight.  For even
``d`` plain and ``EE`` edges have odd weight (one original edge each); for
odd ``d`` ``Ess`` edges do (one middle vertex each).
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from ogcomplex.basis import MINUS, PLUS, BasisSlice, CorePhi
from ogcomplex.cores import core_graphs
from ogcomplex.errors import Disconnected, NotAChainMap, ResourceLimitExceeded, WrongStage
from ogcomplex.graphs import LabeledGraph, is_connected
from ogcomplex.linalg import DEFAULT_PRIMES
from ogcomplex.sparse import ExactSparseMatrix

PLAIN_FWD, PLAIN_BWD, ESS, TREE = ">", "<", "S", "E"
DEFAULT_ASSIGNMENT_CAP = 200_000


@dataclass(frozen=True)
class CoreGraph:
    """Connected loopless multigraph; each edge is stored as ``(low, high)``."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a core graph needs a vertex")
        for x, y in self.edges:
            if not (0 <= x < y < self.n):
                raise ValueError(f"edge ({x}, {y}) must satisfy 0 <= low < high < n")
        if not is_connected(self.n, self.edges):
            raise Disconnected("core graph is not connected")

    @classmethod
    def from_graph(cls, g: LabeledGraph) -> "CoreGraph":
        return cls(g.n, tuple((min(t, h), max(t, h)) for t, h in g.edges))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "CoreGraph":
        return cls(n, tuple((min(a, b), max(a, b)) for a, b in pairs))


@dataclass(frozen=True)
class TreeOrder:
    edges: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class PhiClass:
    canonical: tuple[str, ...]

    @property
    def ess(self) -> int:
        return self.canonical.count(ESS)


def choose_tree_order(core: CoreGraph) -> TreeOrder:
    """Breadth-first spanning tree from vertex 0, scanning edges by label."""
    if not is_connected(core.n, core.edges):
        raise Disconnected("core graph is not connected")
    seen = {0}
    order = []
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for idx, (a, b) in enumerate(core.edges):
            if x not in (a, b):
                continue
            y = b if a == x else a
            if y not in seen:
                seen.add(y)
                order.append(idx)
                queue.append(y)
    return TreeOrder(tuple(order))


def tree_prefixes_ok(core: CoreGraph, order: TreeOrder) -> bool:
    """Every prefix is a tree: connected with one edge fewer than its vertices."""
    for i in range(1, len(order.edges) + 1):
        sub = [core.edges[a] for a in order.edges[:i]]
        verts = sorted({x for e in sub for x in e})
        if len(verts) != i + 1:
            return False
        pos = {x: k for k, x in enumerate(verts)}
        if not is_connected(len(verts), [(pos[a], pos[b]) for a, b in sub]):
            return False
    return len(order.edges) == core.n - 1


def has_cycle(core: CoreGraph, types: Sequence[str]) -> bool:
    """Directed cycle after collapsing the components spanned by ``EE`` edges."""
    parent = list(range(core.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (a, b), t in zip(core.edges, types):
        if t == TREE:
            ra, rb = find(a), find(b)
            if ra == rb:
                return True
            parent[ra] = rb
    arcs = []
    for (a, b), t in zip(core.edges, types):
        if t == PLAIN_FWD:
            arcs.append((find(a), find(b)))
        elif t == PLAIN_BWD:
            arcs.append((find(b), find(a)))
    if any(x == y for x, y in arcs):
        return True
    indeg = {x: 0 for x in range(core.n)}
    out: dict[int, list[int]] = {x: [] for x in range(core.n)}
    for x, y in arcs:
        out[x].append(y)
        indeg[y] += 1
    stack = [x for x in range(core.n) if indeg[x] == 0]
    removed = 0
    while stack:
        x = stack.pop()
        removed += 1
        for y in out[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                stack.append(y)
    return removed != core.n


def _flavor(core: CoreGraph, stage: int) -> CorePhi:
    return CorePhi(core, stage)


@lru_cache(maxsize=None)
def _assignments(core: CoreGraph, stage: int, order: TreeOrder) -> tuple[tuple[str, ...], ...]:
    tree = set(order.edges[:stage])
    free = [k for k in range(len(core.edges)) if k not in tree]
    if 3 ** len(free) > DEFAULT_ASSIGNMENT_CAP:
        raise ResourceLimitExceeded(f"{3 ** len(free)} assignments exceed the cap")
    out = []
    for choice in itertools.product((PLAIN_FWD, PLAIN_BWD, ESS), repeat=len(free)):
        types = [TREE] * len(core.edges)
        for k, t in zip(free, choice):
            types[k] = t
        if not has_cycle(core, types):
            out.append(tuple(types))
    return tuple(sorted(out))


def phi_basis(core, stage: int, d: int, *, v: int | None = None, e: int | None = None, order: TreeOrder | None = None):
    """Basis of ``OPhi_stage``.

    With ``v`` and ``e`` given, only the slice with ``v - n`` Ess edges is
    returned (``v`` and ``e`` count vertices and edges of the expanded graphs).
    """
    core = core if isinstance(core, CoreGraph) else CoreGraph.from_graph(core)
    if not 0 <= stage <= core.n - 1:
        raise WrongStage(f"stage must lie in 0..{core.n - 1}")
    order = order or choose_tree_order(core)
    classes = [PhiClass(t) for t in _assignments(core, stage, order)]
    flavor = _flavor(core, stage)
    if v is None:
        return BasisSlice(d, -1, -1, flavor, tuple(classes))
    s = v - core.n
    if e is not None and e != len(core.edges) + s:
        return BasisSlice(d, v, e, flavor, ())
    return BasisSlice(d, v, len(core.edges) + s, flavor, tuple(c for c in classes if c.ess == s))


def _weight(t: str, d: int) -> int:
    if d % 2:
        return 1 if t == ESS else 0
    return 0 if t == ESS else 1


def edge_differential(types: Sequence[str], core: CoreGraph, d: int) -> dict[tuple[str, ...], int]:
    out: dict[tuple[str, ...], int] = {}
    weights = [_weight(t, d) for t in types]
    for k, t in enumerate(types):
        if t != ESS:
            continue
        sign = -1 if sum(weights[k + 1 :]) % 2 else 1
        for new, coeff in ((PLAIN_FWD, 1), (PLAIN_BWD, 1 if d % 2 else -1)):
            img = list(types)
            img[k] = new
            img = tuple(img)
            if has_cycle(core, img):
                continue
            out[img] = out.get(img, 0) + sign * coeff
    return {k: x for k, x in out.items() if x}


def phi_differential_matrix(flavor: CorePhi, d: int, v: int, e: int) -> ExactSparseMatrix:
    core = flavor.core
    src = phi_basis(core, flavor.stage, d, v=v, e=e)
    tgt = phi_basis(core, flavor.stage, d, v=v - 1, e=e - 1)
    idx = tgt.index()
    cols = []
    for c in src.classes:
        cols.append({idx[t]: x for t, x in edge_differential(c.canonical, core, d).items()})
    return ExactSparseMatrix.from_columns(len(tgt), cols)


def iota_phi(types: Sequence[str], core: CoreGraph, d: int) -> tuple[tuple[str, ...], int]:
    """Reverse plain edges, keep Ess and EE; sign from the reversal table."""
    swap = {PLAIN_FWD: PLAIN_BWD, PLAIN_BWD: PLAIN_FWD}
    img = tuple(swap.get(t, t) for t in types)
    plain = sum(1 for t in types if t in swap)
    tree = types.count(TREE)
    count = plain + tree if d % 2 == 0 else tree
    sign = -1 if (core.n + count) % 2 == 0 else 1
    return img, sign


def phi_iota_images(slice_: BasisSlice) -> list[tuple[int, int]]:
    idx = slice_.index()
    out = []
    for c in slice_.classes:
        img, sign = iota_phi(c.canonical, slice_.flavor.core, slice_.d)
        out.append((idx[img], sign))
    return out


def phi_split(slice_: BasisSlice):
    from ogcomplex.involution import split_from_images

    return split_from_images(phi_iota_images(slice_))


def f_map(i: int, c, d: int, core: CoreGraph, order: TreeOrder | None = None) -> dict[tuple[str, ...], int]:
    """Image of a stage ``i-1`` assignment under ``f_i``: Ess -> 0, Ed -> EE, dE -> (-1)^d EE."""
    order = order or choose_tree_order(core)
    types = c.canonical if isinstance(c, PhiClass) else tuple(c)
    if not 1 <= i <= len(order.edges):
        raise WrongStage(f"f_i needs 1 <= i <= {len(order.edges)}")
    a = order.edges[i - 1]
    if any(types[x] != TREE for x in order.edges[: i - 1]) or types[a] == TREE:
        raise WrongStage(f"assignment is not in stage {i - 1}")
    t = types[a]
    if t == ESS:
        return {}
    img = list(types)
    img[a] = TREE
    img = tuple(img)
    if has_cycle(core, img):
        return {}
    return {img: 1 if t == PLAIN_FWD or d % 2 == 0 else -1}


def _f_matrix(core, order, i, d, v, e) -> ExactSparseMatrix:
    src = phi_basis(core, i - 1, d, v=v, e=e, order=order)
    tgt = phi_basis(core, i, d, v=v, e=e, order=order)
    idx = tgt.index()
    cols = [{idx[t]: x for t, x in f_map(i, c, d, core, order).items()} for c in src.classes]
    return ExactSparseMatrix.from_columns(len(tgt), cols)


def _part_complex(core, order, stage, d, part):
    """Stage complex indexed by expanded vertex count, restricted to an eigenpart."""
    from ogcomplex.homology import ChainComplex
    from ogcomplex.involution import restrict

    ks = range(core.n - 1, core.n + len(core.edges) + 2)
    dims, diff, splits = {}, {}, {}
    for k in ks:
        s = phi_basis(core, stage, d, v=k, e=k - core.n + len(core.edges), order=order)
        splits[k] = phi_split(s)
        dims[k] = len(s) if part is None else len(splits[k].part(part)[0])
    for k in ks:
        if k - 1 not in splits:
            continue
        m = _phi_matrix(core, order, stage, d, k)
        diff[k] = m if part is None else restrict(m, splits[k], splits[k - 1], part)
    return ChainComplex(dims, diff), splits


def _phi_matrix(core, order, stage, d, k) -> ExactSparseMatrix:
    e = k - core.n + len(core.edges)
    src = phi_basis(core, stage, d, v=k, e=e, order=order)
    tgt = phi_basis(core, stage, d, v=k - 1, e=e - 1, order=order)
    idx = tgt.index()
    cols = [{idx[t]: x for t, x in edge_differential(c.canonical, core, d).items()} for c in src.classes]
    return ExactSparseMatrix.from_columns(len(tgt), cols)


def verify_phi_chain(core, d: int) -> dict:
    """Exact check of every step of the acyclicity argument for one core."""
    from ogcomplex.homology import _homology, verify_quasi_iso
    from ogcomplex.involution import restrict

    core = core if isinstance(core, CoreGraph) else CoreGraph.from_graph(core)
    order = choose_tree_order(core)
    degrees = list(range(core.n, core.n + len(core.edges) + 1))
    stages = []
    verdicts = {
        "tree_order_valid": tree_prefixes_ok(core, order),
        "differential_squares_to_zero": True,
        "iota_commutes": True,
        "f_chain_maps": True,
        "f_minus_quasi_isos": True,
        "terminal_minus_zero": False,
        "minus_acyclic": True,
    }
    complexes = {}
    for i in range(core.n):
        full, splits = _part_complex(core, order, i, d, None)
        minus, _ = _part_complex(core, order, i, d, MINUS)
        complexes[i] = (full, minus, splits)
        for k in degrees:
            if not (full.d(k - 1) @ full.d(k)).is_zero():
                verdicts["differential_squares_to_zero"] = False
            src = phi_basis(core, i, d, v=k, order=order)
            tgt = phi_basis(core, i, d, v=k - 1, order=order)
            if len(src):
                from ogcomplex.involution import iota_matrix_from_images

                a = iota_matrix_from_images(phi_iota_images(src))
                b = iota_matrix_from_images(phi_iota_images(tgt)) if len(tgt) else ExactSparseMatrix.zero(0, 0)
                m = full.d(k)
                if not (m @ a - b @ m).is_zero():
                    verdicts["iota_commutes"] = False
        betti_minus = {k: _homology(minus, k, DEFAULT_PRIMES)[0] for k in degrees}
        stages.append(
            {
                "i": i,
                "dims": {str(k): full.dims[k] for k in degrees if full.dims[k]},
                "dims_minus": {str(k): minus.dims[k] for k in degrees if minus.dims[k]},
                "betti_minus": {str(k): x for k, x in betti_minus.items() if x},
            }
        )
        if i == 0 and any(betti_minus.values()):
            verdicts["minus_acyclic"] = False
    for i in range(1, core.n):
        full_src, minus_src, split_src = complexes[i - 1]
        full_tgt, minus_tgt, split_tgt = complexes[i]
        f_full, f_minus = {}, {}
        for k in range(core.n - 1, core.n + len(core.edges) + 2):
            e = k - core.n + len(core.edges)
            f_full[k] = _f_matrix(core, order, i, d, k, e)
        try:
            for k in degrees:
                for kk in (k, k + 1):
                    if not (full_tgt.d(kk) @ f_full[kk] - f_full[kk - 1] @ full_src.d(kk)).is_zero():
                        raise ValueError
            for k, m in f_full.items():
                f_minus[k] = restrict(m, split_src[k], split_tgt[k], MINUS)
        except (ValueError, NotAChainMap):
            verdicts["f_chain_maps"] = False
            verdicts["f_minus_quasi_isos"] = False
            continue
        if not verify_quasi_iso(f_minus, minus_src, minus_tgt, degrees, primes=DEFAULT_PRIMES):
            verdicts["f_minus_quasi_isos"] = False
    last = phi_basis(core, core.n - 1, d, order=order)
    if len(last) == 1:
        img, sign = iota_phi(last.classes[0].canonical, core, d)
        verdicts["terminal_minus_zero"] = img == last.classes[0].canonical and sign == 1
    return {
        "core": {"n": core.n, "edges": [[a + 1, b + 1] for a, b in core.edges]},
        "d": d,
        "tree_order": [a + 1 for a in order.edges],
        "stages": stages,
        "verdicts": verdicts,
        "passed": all(verdicts.values()),
    }


def core_sweep(max_vertices: int = 4, max_edges: int = 7, min_valence: int = 1) -> list[CoreGraph]:
    """Connected loopless multigraphs up to isomorphism, at least two vertices."""
    out = []
    for k in range(2, max_vertices + 1):
        for m in range(k - 1, max_edges + 1):
            for pairs in core_graphs(k, m, min_valence, False):
                out.append(CoreGraph.from_pairs(k, pairs))
    return out


def sweep_report(d: int, max_vertices: int = 4, max_edges: int = 7) -> dict:
    records = [verify_phi_chain(core, d) for core in core_sweep(max_vertices, max_edges)]
    return {"d": d, "cores": len(records), "passed": all(r["passed"] for r in records), "records": records}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


FIGURE_CORE = CoreGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 3)))
THETA_CORE = CoreGraph(2, ((0, 1), (0, 1), (0, 1)))


def projection_check(core, d: int) -> bool:
    """Compare stage 0 with the reduced complex through the quotient map.

    Each assignment is sent to its class in the reduced complex (half-integral
    normalization).  The map must intertwine the edge differentials and the
    involutions; this ties the sign tables used here to the ones transported
    from the full complex.  Requires every core vertex to be at least trivalent.
    """
    from ogcomplex.basis import SKELETON1, get_basis
    from ogcomplex.graphs import canonical_search
    from ogcomplex.involution import iota_matrix
    from ogcomplex.skeleton import DE, ED, ESS as SK_ESS, SkeletonGraph, skeleton_differential_matrix, split_by_ess, to_all_sink

    core = core if isinstance(core, CoreGraph) else CoreGraph.from_graph(core)
    kinds = {PLAIN_FWD: ED, PLAIN_BWD: DE, ESS: SK_ESS}
    cache: dict = {}

    def reduced(v, e):
        if (v, e) not in cache:
            cache[(v, e)] = get_basis(d, v, e, SKELETON1) if v >= 1 else None
        return cache[(v, e)]

    def project(types):
        s = types.count(ESS)
        sk = SkeletonGraph(core.n, tuple((a, b, kinds[t]) for (a, b), t in zip(core.edges, types)))
        res = canonical_search(to_all_sink(sk))
        if res.zero(d % 2):
            return None
        slice_ = reduced(core.n + s, len(core.edges) + s)
        return slice_.index()[res.graph], res.sign(d % 2), slice_

    edge_parts: dict = {}
    iotas: dict = {}
    for types in _assignments(core, 0, choose_tree_order(core)):
        p = project(types)
        lhs: dict = {}
        for img, x in edge_differential(types, core, d).items():
            q = project(img)
            if q is not None:
                lhs[q[0]] = lhs.get(q[0], 0) + 2 * x * q[1]
        lhs = {k: x for k, x in lhs.items() if x}
        if p is None:
            if lhs:
                return False
            continue
        i, sign, src = p
        key = (src.v, src.e)
        if key not in edge_parts:
            tgt = reduced(src.v - 1, src.e - 1)
            m = skeleton_differential_matrix(d, src.v, src.e)
            edge_parts[key] = split_by_ess(m, src, tgt)[1].col_dicts() if tgt is not None else [{}] * len(src)
            iotas[key] = iota_matrix(src).col_dicts()
        rhs = {k: sign * x for k, x in edge_parts[key][i].items()}
        if lhs != rhs:
            return False
        img, s_iota = iota_phi(types, core, d)
        q = project(img)
        want = {k: sign * x for k, x in iotas[key][i].items()}
        if q is None or {q[0]: s_iota * q[1]} != want:
            return False
    return True
