"""Bases of the bigraded slices, a brute-force oracle, and an on-disk cache.

Full slices of loop order >= 2 are produced by decorating core multigraphs
with alternating chains (see :mod:`ogcomplex.cores`); loop order 1 consists of
the alternating polygons.  The ``skeleton1`` flavor keeps only decorations in
which every chain is a single edge or a pair of edges meeting at a 2-valent
sink.  Those graphs are the images of reduced skeleton graphs and are the
working representation of that complex throughout the package.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable

from filelock import FileLock

from ogcomplex.cores import core_graphs, decorations
from ogcomplex.errors import CorruptCache, ResourceLimitExceeded, VersionMismatch
from ogcomplex.graphs import (
    DEFAULT_RULES,
    GraphClass,
    LabeledGraph,
    canonical_search,
    check_admissible,
    perm_sign,
)

FORMAT_VERSION = 1
FULL = "full"
SKELETON1 = "skeleton1"
ALL, PLUS, MINUS = "all", "plus", "minus"

DEFAULT_CANDIDATE_CAP = 2_000_000


@dataclass(frozen=True)
class CorePhi:
    """Proof-complex flavor: graphs over a fixed core at a given stage."""

    core: Any
    stage: int

    @property
    def name(self) -> str:
        digest = hashlib.sha256(repr(self.core).encode()).hexdigest()[:12]
        return f"corephi-{digest}-{self.stage}"


def flavor_name(flavor) -> str:
    return flavor if isinstance(flavor, str) else flavor.name


@dataclass(frozen=True)
class BasisSlice:
    d: int
    v: int
    e: int
    flavor: Any
    classes: tuple
    part: str = ALL
    format_version: int = FORMAT_VERSION
    _index: dict = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    def index(self) -> dict:
        """Map from canonical representative to position."""
        if self._index is None:
            object.__setattr__(self, "_index", {c.canonical: i for i, c in enumerate(self.classes)})
        return self._index

    @property
    def graphs(self) -> list[LabeledGraph]:
        return [c.canonical for c in self.classes]


def polygon(k: int) -> LabeledGraph:
    """The alternating 2k-gon: even vertices are sources, odd vertices sinks."""
    n = 2 * k
    edges = []
    for i in range(0, n, 2):
        edges.append((i, i + 1))
        edges.append((i, (i - 1) % n))
    return LabeledGraph(n, tuple(edges))


@lru_cache(maxsize=None)
def _canonical_graphs(v: int, e: int, sink_only: bool, cap: int) -> tuple:
    """Canonical search results for every class in the slice, zero or not."""
    b = e - v + 1
    found: dict[tuple, Any] = {}
    if b == 1:
        if v == e and v >= 2 and v % 2 == 0 and not sink_only:
            res = canonical_search(polygon(v // 2))
            found[res.graph.edges] = res
    elif b >= 2:
        for k in range(1, min(v, 2 * (b - 1)) + 1):
            m = k + b - 1
            internal = v - k
            for pairs in core_graphs(k, m):
                loops = sum(1 for i, j in pairs if i == j)
                if loops > internal:
                    continue
                for g in decorations(k, pairs, internal, sink_only=sink_only, cap=cap):
                    res = canonical_search(g)
                    found.setdefault(res.graph.edges, res)
    return tuple(found[key] for key in sorted(found))


def enumerate_basis(d: int, v: int, e: int, flavor=FULL, *, cap: int = DEFAULT_CANDIDATE_CAP) -> BasisSlice:
    """All nonzero classes of one slice, in canonical order."""
    if not isinstance(flavor, str):
        from ogcomplex.proofcheck import phi_basis

        return phi_basis(flavor.core, flavor.stage, d, v=v, e=e)
    if flavor not in (FULL, SKELETON1):
        raise ValueError(f"unknown flavor {flavor!r}")
    parity = d % 2
    classes = []
    if v >= 1 and e >= 0:
        for res in _canonical_graphs(v, e, flavor == SKELETON1, cap):
            if not res.zero(parity):
                classes.append(GraphClass(res.graph, parity))
    return BasisSlice(d, v, e, flavor, tuple(classes))


def slices_of_loop_order(b: int, flavor=FULL, max_v: int | None = None) -> list[tuple[int, int]]:
    """(v, e) pairs that can be nonempty at loop order ``b``."""
    if flavor == SKELETON1:
        if b < 2:
            return []
        top = 2 * (b - 1) + 3 * (b - 1)
    else:
        if max_v is None:
            raise ValueError("the full flavor needs max_v")
        top = max_v
    return [(v, v + b - 1) for v in range(1, top + 1) if v + b - 1 >= 0]


# brute-force oracle -----------------------------------------------------


def _oracle_admissible(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    edges = list(edges)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h in edges:
        parent[find(t)] = find(h)
    if len({find(x) for x in range(n)}) != 1:
        return False
    ins = [0] * n
    outs = [0] * n
    for t, h in edges:
        outs[t] += 1
        ins[h] += 1
    for x in range(n):
        if ins[x] + outs[x] < 2:
            return False
        if ins[x] == 1 and outs[x] == 1:
            return False
    # cycle check by repeated removal of sources
    alive = set(range(n))
    while True:
        sources = [x for x in alive if not any(h == x and t in alive for t, h in edges)]
        if not sources:
            break
        alive -= set(sources)
    return not alive


def brute_force_basis(d: int, v: int, e: int, *, max_candidates: int = 5_000_000) -> BasisSlice:
    """Independent enumeration: every edge multiset, every vertex permutation."""
    if v > 6 or e > 9:
        raise ResourceLimitExceeded("brute force is limited to v <= 6, e <= 9")
    ordered = [(t, h) for t in range(v) for h in range(v) if t != h]
    perms = list(itertools.permutations(range(v)))
    parity = d % 2
    seen: set = set()
    classes = []
    count = 0
    for combo in itertools.combinations_with_replacement(ordered, e):
        count += 1
        if count > max_candidates:
            raise ResourceLimitExceeded(f"more than {max_candidates} candidates")
        if not _oracle_admissible(v, combo):
            continue
        images = [tuple(sorted((p[t], p[h]) for t, h in combo)) for p in perms]
        key = min(images)
        if key in seen:
            continue
        seen.add(key)
        if _oracle_zero(key, v, parity, perms):
            continue
        classes.append(key)
    classes.sort()
    return BasisSlice(d, v, e, "bruteforce", tuple(GraphClass(LabeledGraph(v, k), parity) for k in classes))


def _oracle_zero(edges: tuple, v: int, parity: int, perms) -> bool:
    if parity == 0 and len(set(edges)) != len(edges):
        return True
    for p in perms:
        image = [(p[t], p[h]) for t, h in edges]
        if sorted(image) != list(edges):
            continue
        if parity:
            if perm_sign(p) < 0:
                return True
        else:
            # edges are distinct, so the induced edge permutation is unique
            pos = {edge: i for i, edge in enumerate(edges)}
            if perm_sign([pos[x] for x in image]) < 0:
                return True
    return False


# cache ------------------------------------------------------------------


def _rules_hash() -> str:
    return hashlib.sha256(json.dumps(DEFAULT_RULES.as_dict(), sort_keys=True).encode()).hexdigest()


def slice_filename(d: int, v: int, e: int, flavor) -> str:
    return f"basis_d{d}_v{v}_e{e}_{flavor_name(flavor)}.jsonl"


def _serialize(slice_: BasisSlice) -> bytes:
    lines = []
    for c in slice_.classes:
        g = c.canonical
        lines.append(json.dumps({"v": g.n, "edges": [[t + 1, h + 1] for t, h in g.edges]}, separators=(",", ":")))
    return ("\n".join(lines) + ("\n" if lines else "")).encode()


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_manifest(cache_dir: Path) -> dict | None:
    path = cache_dir / "manifest.json"
    if not path.exists():
        return None
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptCache(f"unreadable manifest: {exc}") from exc


def store_basis(slice_: BasisSlice, cache_dir) -> Path:
    if slice_.part != ALL:
        raise ValueError("only whole slices are cached")
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    name = slice_filename(slice_.d, slice_.v, slice_.e, slice_.flavor)
    data = _serialize(slice_)
    path = cache_dir / name
    with FileLock(str(cache_dir / ".manifest.lock")):
        _atomic_write(path, data)
        manifest = _read_manifest(cache_dir)
        if manifest is None or manifest.get("format_version") != FORMAT_VERSION:
            manifest = {"format_version": FORMAT_VERSION, "checksums": {}}
        manifest["rules"] = DEFAULT_RULES.as_dict()
        manifest["rules_hash"] = _rules_hash()
        manifest["checksums"][name] = hashlib.sha256(data).hexdigest()
        manifest["checksums"] = dict(sorted(manifest["checksums"].items()))
        _atomic_write(cache_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True).encode())
    return path


def load_basis(d: int, v: int, e: int, flavor, cache_dir) -> BasisSlice | None:
    """Return the cached slice, or ``None`` when it is missing or from an older format."""
    cache_dir = Path(cache_dir)
    manifest = _read_manifest(cache_dir)
    if manifest is None or manifest.get("format_version") != FORMAT_VERSION:
        return None
    if manifest.get("rules_hash") != _rules_hash():
        raise VersionMismatch("cache was built with different admissibility rules")
    name = slice_filename(d, v, e, flavor)
    path = cache_dir / name
    expected = manifest.get("checksums", {}).get(name)
    if expected is None or not path.exists():
        return None
    data = path.read_bytes()
    if hashlib.sha256(data).hexdigest() != expected:
        raise CorruptCache(f"checksum mismatch for {name}")
    parity = d % 2
    classes = []
    for line in data.decode().splitlines():
        obj = json.loads(line)
        g = LabeledGraph(obj["v"], tuple((t - 1, h - 1) for t, h in obj["edges"]))
        classes.append(GraphClass(g, parity))
    return BasisSlice(d, v, e, flavor, tuple(classes))


def get_basis(d: int, v: int, e: int, flavor=FULL, cache_dir=None) -> BasisSlice:
    """Enumerate, going through the cache when a directory is given."""
    if cache_dir is not None and isinstance(flavor, str):
        cached = load_basis(d, v, e, flavor, cache_dir)
        if cached is not None:
            return cached
        slice_ = enumerate_basis(d, v, e, flavor)
        store_basis(slice_, cache_dir)
        return slice_
    return enumerate_basis(d, v, e, flavor)


def validate_slice(slice_: BasisSlice) -> None:
    """Assert the slice invariants; used by tests and the verify suites."""
    keys = [c.canonical.edges for c in slice_.classes]
    assert keys == sorted(keys), "classes out of order"
    assert len(set(keys)) == len(keys), "duplicate classes"
    for c in slice_.classes:
        if slice_.flavor in (FULL, SKELETON1):
            assert check_admissible(c.canonical), c
        res = canonical_search(c.canonical)
        assert res.graph == c.canonical
        assert not res.zero(slice_.d % 2)
