"""The direction-reversing involution and the split into its eigenparts.

The split is generic: it only needs, for every basis index ``i``, the image
``iota(i) = sign * j``.  Fixed classes (``j == i``) go wholly to one side;
a two-element orbit ``{i, j}`` with ``i < j`` contributes ``i + sign*j`` to
the plus part and ``i - sign*j`` to the minus part.  All coefficients stay
in ``{1, -1}``.

Matrices in the eigenbasis are read off from representative coefficients:
every eigenvector has a distinguished basis index (the fixed class, or the
smaller class of its orbit) with coefficient ``1``, and no other eigenvector
of the same part uses that index.  The result is then checked exactly
against ``D @ S_src == S_tgt @ D_part``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

from ogcomplex.basis import FULL, MINUS, PLUS, SKELETON1, BasisSlice, get_basis
from ogcomplex.errors import NotAChainMap
from ogcomplex.graphs import ZERO, GraphClass, LabeledGraph, SignedClass, canonical_search, reverse_all
from ogcomplex.sparse import ExactSparseMatrix

Vector = tuple[tuple[int, int], ...]


def full_iota_sign(d: int, v: int, e: int) -> int:
    exponent = (e + v + 1) if d % 2 == 0 else (v + 1)
    return -1 if exponent % 2 else 1


def iota_full_graph(g: LabeledGraph, d: int) -> tuple[LabeledGraph, int] | None:
    """Image of a labeled graph as ``(canonical graph, sign)``, or ``None`` for zero."""
    res = canonical_search(reverse_all(g))
    if res.zero(d % 2):
        return None
    return res.graph, full_iota_sign(d, g.n, len(g.edges)) * res.sign(d % 2)


def iota(c, d: int, flavor=FULL):
    """Apply the involution to a class; returns ``ZERO`` or a :class:`SignedClass`."""
    if isinstance(c, SignedClass):
        g, coeff = c.cls.canonical, c.coefficient
    elif isinstance(c, GraphClass):
        g, coeff = c.canonical, 1
    else:
        g, coeff = c, 1
    if flavor == FULL:
        out = iota_full_graph(g, d)
    elif flavor == SKELETON1:
        from ogcomplex.skeleton import iota_skeleton_graph

        out = iota_skeleton_graph(g, d)
    else:
        raise ValueError("use ogcomplex.proofcheck for the proof-complex flavor")
    if out is None:
        return ZERO
    return SignedClass(GraphClass(out[0], d % 2), coeff * out[1])


@dataclass(frozen=True)
class EigenSplit:
    plus: tuple[Vector, ...]
    minus: tuple[Vector, ...]
    plus_reps: tuple[int, ...]
    minus_reps: tuple[int, ...]
    size: int

    def part(self, name: str) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
        if name == PLUS:
            return self.plus, self.plus_reps
        if name == MINUS:
            return self.minus, self.minus_reps
        raise ValueError(f"unknown part {name!r}")

    def matrix(self, name: str) -> ExactSparseMatrix:
        """Columns are the eigenvectors written in the original basis."""
        vecs, _ = self.part(name)
        return ExactSparseMatrix.from_columns(self.size, (dict(v) for v in vecs))

    def to_json(self) -> str:
        doc = {
            "size": self.size,
            "plus": [[[i + 1, x] for i, x in v] for v in self.plus],
            "minus": [[[i + 1, x] for i, x in v] for v in self.minus],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def chains(self, name: str, slice_: BasisSlice):
        from ogcomplex.complexes import chain_from_vector

        vecs, _ = self.part(name)
        return [chain_from_vector(dict(v), slice_) for v in vecs]


def split_from_images(images: Sequence[tuple[int, int]]) -> EigenSplit:
    """Build the split from ``images[i] = (j, sign)`` with ``iota(i) = sign * j``."""
    n = len(images)
    fixed_plus, fixed_minus, pairs = [], [], []
    for i, (j, s) in enumerate(images):
        back = images[j]
        if back[0] != i or back[1] * s != 1:
            raise ValueError(f"map is not an involution at index {i}")
        if j == i:
            (fixed_plus if s == 1 else fixed_minus).append(i)
        elif i < j:
            pairs.append((i, j, s))
    plus = [((i, 1),) for i in fixed_plus] + [((i, 1), (j, s)) for i, j, s in pairs]
    minus = [((i, 1),) for i in fixed_minus] + [((i, 1), (j, -s)) for i, j, s in pairs]
    plus_reps = fixed_plus + [i for i, _, _ in pairs]
    minus_reps = fixed_minus + [i for i, _, _ in pairs]
    return EigenSplit(tuple(plus), tuple(minus), tuple(plus_reps), tuple(minus_reps), n)


def iota_images(slice_: BasisSlice, iota_graph: Callable) -> list[tuple[int, int]]:
    idx = slice_.index()
    out = []
    for c in slice_.classes:
        img = iota_graph(c.canonical, slice_.d)
        if img is None:
            raise ValueError(f"involution sends a basis class to zero: {c}")
        out.append((idx[img[0]], img[1]))
    return out


def _iota_graph_for(flavor) -> Callable:
    if flavor == FULL:
        return iota_full_graph
    if flavor == SKELETON1:
        from ogcomplex.skeleton import iota_skeleton_graph

        return iota_skeleton_graph
    raise ValueError(f"no graph involution for {flavor!r}")


def split_basis(slice_: BasisSlice, d: int | None = None) -> EigenSplit:
    if d is not None and d != slice_.d:
        raise ValueError("d does not match the slice")
    if not isinstance(slice_.flavor, str):
        from ogcomplex.proofcheck import phi_split

        return phi_split(slice_)
    return split_from_images(iota_images(slice_, _iota_graph_for(slice_.flavor)))


def iota_matrix_from_images(images: Sequence[tuple[int, int]]) -> ExactSparseMatrix:
    n = len(images)
    return ExactSparseMatrix.from_dict(n, n, {(j, i): s for i, (j, s) in enumerate(images)})


def iota_matrix(slice_: BasisSlice) -> ExactSparseMatrix:
    if not isinstance(slice_.flavor, str):
        from ogcomplex.proofcheck import phi_iota_images

        return iota_matrix_from_images(phi_iota_images(slice_))
    return iota_matrix_from_images(iota_images(slice_, _iota_graph_for(slice_.flavor)))


def restrict(
    m: ExactSparseMatrix, src: EigenSplit, tgt: EigenSplit, part: str, *, check: bool = True
) -> ExactSparseMatrix:
    """Express ``m`` (source basis -> target basis) on one eigenpart.

    Raises :class:`NotAChainMap` when ``m`` does not map the source part into
    the target part.
    """
    src_vecs, _ = src.part(part)
    tgt_vecs, tgt_reps = tgt.part(part)
    rep_pos = {r: k for k, r in enumerate(tgt_reps)}
    cols = m.col_dicts()
    out_cols = []
    for vec in src_vecs:
        image: dict[int, int] = {}
        for i, x in vec:
            for r, y in cols[i].items():
                image[r] = image.get(r, 0) + x * y
        col = {}
        for r, y in image.items():
            if y and r in rep_pos:
                col[rep_pos[r]] = y
        if check:
            rebuilt: dict[int, int] = {}
            for k, y in col.items():
                for r, z in tgt_vecs[k]:
                    rebuilt[r] = rebuilt.get(r, 0) + y * z
            if {r: y for r, y in image.items() if y} != {r: y for r, y in rebuilt.items() if y}:
                raise NotAChainMap(f"image of a {part} vector leaves the {part} part")
        out_cols.append(col)
    return ExactSparseMatrix.from_columns(len(tgt_vecs), out_cols)


def eigen_differential_matrix(d: int, v: int, e: int, flavor=FULL, part: str = PLUS, cache_dir=None) -> ExactSparseMatrix:
    from ogcomplex.complexes import differential_matrix

    m = differential_matrix(d, v, e, flavor, cache_dir=cache_dir)
    src = split_basis(_slice(d, v, e, flavor, cache_dir))
    tgt = split_basis(_slice(d, v - 1, e - 1, flavor, cache_dir))
    return restrict(m, src, tgt, part)


def _slice(d, v, e, flavor, cache_dir) -> BasisSlice:
    if not isinstance(flavor, str):
        from ogcomplex.basis import enumerate_basis

        return enumerate_basis(d, v, e, flavor)
    if v < 1 or e < 0:
        return BasisSlice(d, v, e, flavor, ())
    return get_basis(d, v, e, flavor, cache_dir)


def minus_relation_check(c, d: int) -> bool:
    """True iff the class is fixed by reversal with the sign that puts it in the minus part."""
    g = c.canonical if isinstance(c, GraphClass) else c
    res = canonical_search(reverse_all(g))
    if res.graph != g or res.zero(d % 2):
        return False
    want = (-1) ** ((len(g.edges) + g.n) if d % 2 == 0 else g.n)
    return res.sign(d % 2) == want


def commutes_with_differential(d: int, v: int, e: int, flavor=FULL, cache_dir=None) -> bool:
    """``iota @ D == D @ iota`` as exact matrices."""
    from ogcomplex.complexes import differential_matrix

    m = differential_matrix(d, v, e, flavor, cache_dir=cache_dir)
    a = iota_matrix(_slice(d, v, e, flavor, cache_dir))
    b = iota_matrix(_slice(d, v - 1, e - 1, flavor, cache_dir))
    return (m @ a - b @ m).is_zero()


def is_involution(slice_: BasisSlice) -> bool:
    a = iota_matrix(slice_)
    return (a @ a - ExactSparseMatrix.identity(len(slice_))).is_zero()
