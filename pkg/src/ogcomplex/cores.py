"""Undirected core multigraphs and their decoration by alternating chains.

A graph of loop order >= 2 is determined by its skeleton: the multigraph on
the vertices of valence >= 3 whose edges are maximal chains through
2-valent vertices.  Since a passing vertex is forbidden, every chain
alternates direction, so a chain is fully described by a *word*: the tuple
of edge directions read from one end (1 = pointing away from that end).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator, Sequence

from ogcomplex.errors import ResourceLimitExceeded
from ogcomplex.graphs import LabeledGraph, canonical_search, is_connected

Pair = tuple[int, int]
Word = tuple[int, ...]


def flip_word(word: Word) -> Word:
    """The same chain read from the other end."""
    return tuple(1 - b for b in reversed(word))


def chain_words(internal: int) -> tuple[Word, Word]:
    first = tuple((r + 1) % 2 for r in range(internal + 1))
    return first, tuple(1 - b for b in first)


def _encode(k: int, pairs: Sequence[Pair]) -> LabeledGraph:
    # incidence digraph: one extra vertex per edge pointing at both ends
    edges = []
    for idx, (i, j) in enumerate(pairs):
        w = k + idx
        edges.append((w, i))
        edges.append((w, j))
    return LabeledGraph(k + len(pairs), tuple(edges))


def core_key(k: int, pairs: Sequence[Pair]) -> tuple:
    """Isomorphism invariant of an undirected loop-allowing multigraph."""
    return canonical_search(_encode(k, pairs)).graph.edges


def _frozen_ok(deg: list[int], first_open: int, min_valence: int) -> bool:
    for x in range(first_open):
        if deg[x] < min_valence:
            return False
        if x and deg[x] > deg[x - 1]:
            return False
    floor = deg[first_open - 1]
    return all(deg[y] <= floor for y in range(first_open, len(deg)))


@lru_cache(maxsize=None)
def core_graphs(k: int, m: int, min_valence: int = 3, allow_loops: bool = True) -> tuple[tuple[Pair, ...], ...]:
    """Connected multigraphs on ``k`` vertices with ``m`` edges, one per isomorphism class.

    Candidates are generated with nonincreasing degree sequences, which every
    class admits, then deduplicated by :func:`core_key`.
    """
    if k < 1 or m < 0:
        return ()
    pairs = [(i, j) for i in range(k) for j in range(i, k) if allow_loops or i != j]
    found: dict[tuple, tuple[Pair, ...]] = {}
    deg = [0] * k
    chosen: list[Pair] = []

    def deficit() -> int:
        return sum(max(0, min_valence - x) for x in deg)

    def rec(start: int, remaining: int) -> None:
        if remaining == 0:
            if any(deg[x] < deg[x + 1] for x in range(k - 1)):
                return
            if deficit() or not is_connected(k, chosen):
                return
            key = core_key(k, chosen)
            if key not in found:
                found[key] = tuple(chosen)
            return
        if deficit() > 2 * remaining:
            return
        for idx in range(start, len(pairs)):
            i, j = pairs[idx]
            # vertices below i can no longer gain edges
            if i > 0 and not _frozen_ok(deg, i, min_valence):
                continue
            deg[i] += 1
            deg[j] += 1
            chosen.append((i, j))
            rec(idx, remaining - 1)
            chosen.pop()
            deg[i] -= 1
            deg[j] -= 1

    rec(0, m)
    return tuple(found[key] for key in sorted(found))


@lru_cache(maxsize=None)
def core_automorphisms(k: int, pairs: tuple[Pair, ...]) -> tuple[tuple[int, ...], ...]:
    target = sorted(pairs)
    auts = []
    for perm in itertools.permutations(range(k)):
        image = sorted(tuple(sorted((perm[i], perm[j]))) for i, j in pairs)
        if image == target:
            auts.append(perm)
    return tuple(auts)


def _normalized(i: int, j: int, word: Word) -> tuple:
    if i < j:
        return (i, j, word)
    if i > j:
        return (j, i, flip_word(word))
    return (i, i, min(word, flip_word(word)))


def decoration_key(pairs: Sequence[Pair], words: Sequence[Word], auts) -> tuple:
    best = None
    for perm in auts:
        key = tuple(sorted(_normalized(perm[i], perm[j], w) for (i, j), w in zip(pairs, words)))
        if best is None or key < best:
            best = key
    return best


def decorated_graph(k: int, pairs: Sequence[Pair], words: Sequence[Word]) -> LabeledGraph:
    """Full graph: core vertices ``0..k-1`` then chain-internal vertices in edge order."""
    edges = []
    nxt = k
    for (i, j), word in zip(pairs, words):
        path = [i] + list(range(nxt, nxt + len(word) - 1)) + [j]
        nxt += len(word) - 1
        for r, bit in enumerate(word):
            a, b = path[r], path[r + 1]
            edges.append((a, b) if bit else (b, a))
    return LabeledGraph(nxt, tuple(edges))


def _compositions(total: int, parts: int, minima: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    lo = minima[0]
    rest_min = sum(minima[1:])
    for first in range(lo, total - rest_min + 1):
        for tail in _compositions(total - first, parts - 1, minima[1:]):
            yield (first,) + tail


def _acyclic_direct(k: int, pairs: Sequence[Pair], words: Sequence[Word]) -> bool:
    # only single-edge chains can carry directed paths between core vertices
    direct = []
    for (i, j), w in zip(pairs, words):
        if len(w) == 1:
            if i == j:
                return False
            direct.append((i, j) if w[0] else (j, i))
    indeg = [0] * k
    out = [[] for _ in range(k)]
    for a, b in direct:
        out[a].append(b)
        indeg[b] += 1
    stack = [x for x in range(k) if indeg[x] == 0]
    seen = 0
    while stack:
        x = stack.pop()
        seen += 1
        for y in out[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                stack.append(y)
    return seen == k


def decorations(
    k: int,
    pairs: tuple[Pair, ...],
    internal: int,
    *,
    sink_only: bool = False,
    cap: int | None = None,
) -> Iterator[LabeledGraph]:
    """All pairwise non-isomorphic acyclic decorations of one core.

    With ``sink_only`` every chain is a single edge or an edge pair meeting at
    a 2-valent sink, which is the shape of the reduced skeleton complex.
    """
    auts = core_automorphisms(k, pairs)
    minima = [1 if i == j else 0 for i, j in pairs]
    seen: set = set()
    produced = 0
    for lengths in _compositions(internal, len(pairs), minima):
        if sink_only and any(x > 1 for x in lengths):
            continue
        options = []
        for x in lengths:
            if sink_only and x == 1:
                options.append(((1, 0),))
            else:
                options.append(chain_words(x))
        for words in itertools.product(*options):
            produced += 1
            if cap is not None and produced > cap:
                raise ResourceLimitExceeded(f"more than {cap} decorated candidates")
            if not _acyclic_direct(k, pairs, words):
                continue
            key = decoration_key(pairs, words, auts)
            if key in seen:
                continue
            seen.add(key)
            yield decorated_graph(k, pairs, words)
