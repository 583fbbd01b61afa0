"""Named verification suites shared by the command line and the test-suite.

A suite expands a :class:`SuiteConfig` into a list of tasks.  Each task is a
module-level function name plus keyword arguments, so tasks can be shipped to
worker processes; each returns a list of records.  Records are plain dicts
with an ``invariant`` name, an ``ok`` flag and the ``(d, v, e)`` slice plus a
class witness when one exists.  Task order fixes record order, so the report
does not depend on how many workers ran it.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from ogcomplex.basis import ALL, FULL, MINUS, PLUS, SKELETON1, CorePhi, _serialize, enumerate_basis, slice_filename
from ogcomplex.complexes import Grading, differential_matrix
from ogcomplex.graphs import to_text
from ogcomplex.linalg import DEFAULT_PRIMES, rank_mod_p, rational_rank

PARTS = (ALL, PLUS, MINUS)
SUITES = ("d2zero", "involution", "minus-acyclic", "skeleton-qiso", "proof", "euler", "lie", "grt")
QISO_WINDOW = {2: 12, 3: 10}


@dataclass(frozen=True)
class SuiteConfig:
    ds: tuple[int, ...] = (2, 3)
    max_v: int | None = None
    max_e: int = 7
    max_loop_order: int = 3
    primes: tuple[int, ...] = DEFAULT_PRIMES
    seed: int = 0
    samples: int = 20
    qiso_window: dict = field(default_factory=lambda: dict(QISO_WINDOW))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["ds"] = list(self.ds)
        out["primes"] = list(self.primes)
        out["qiso_window"] = {str(k): v for k, v in sorted(self.qiso_window.items())}
        return out


def _record(invariant: str, ok: bool, d=None, v=None, e=None, flavor=FULL, part=ALL, witness=None, **extra) -> dict:
    rec = {
        "invariant": invariant,
        "ok": bool(ok),
        "d": d,
        "v": v,
        "e": e,
        "flavor": flavor if isinstance(flavor, str) else None,
        "part": part,
        "witness": witness,
    }
    rec.update(extra)
    return rec


def _checksum(d, v, e, flavor) -> tuple[str, str]:
    s = enumerate_basis(d, v, e, flavor)
    return slice_filename(d, v, e, flavor), hashlib.sha256(_serialize(s)).hexdigest()


def _bad_column(m) -> int | None:
    if m.is_zero():
        return None
    return min(j for _, j, _ in m.entries)


def _witness(d, v, e, flavor, col) -> str | None:
    if col is None:
        return None
    s = enumerate_basis(d, v, e, flavor)
    return to_text(s.classes[col].canonical).strip()


def full_slices(d: int, max_v: int, max_e: int) -> list[tuple[int, int]]:
    out = []
    for v in range(1, max_v + 1):
        for e in range(max(v - 1, 0), max_e + 1):
            if len(enumerate_basis(d, v, e)):
                out.append((v, e))
    return out


def skeleton_slices(d: int, b: int) -> list[tuple[int, int]]:
    return [(v, v + b - 1) for v in range(1, 5 * (b - 1) + 1) if len(enumerate_basis(d, v, v + b - 1, SKELETON1))]


# task bodies ------------------------------------------------------------


def task_d2zero(d, v, e, flavor) -> list[dict]:
    a = differential_matrix(d, v, e, flavor)
    b = differential_matrix(d, v - 1, e - 1, flavor)
    prod = b @ a
    name, digest = _checksum(d, v, e, flavor)
    return [
        _record(
            "differential_squares_to_zero",
            prod.is_zero(),
            d,
            v,
            e,
            flavor,
            witness=_witness(d, v, e, flavor, _bad_column(prod)),
            basis=name,
            checksum=digest,
        )
    ]


def _phi_flavor(core_name: str, stage: int) -> CorePhi:
    from ogcomplex.proofcheck import FIGURE_CORE, THETA_CORE

    return CorePhi({"theta": THETA_CORE, "figure": FIGURE_CORE}[core_name], stage)


def task_involution(d, v, e, flavor, core=None, stage=None) -> list[dict]:
    from ogcomplex.involution import iota_matrix
    from ogcomplex.sparse import ExactSparseMatrix

    fl = _phi_flavor(core, stage) if core else flavor
    src = enumerate_basis(d, v, e, fl)
    tgt = enumerate_basis(d, v - 1, e - 1, fl) if v > 1 else None
    a = iota_matrix(src)
    sq = a @ a - ExactSparseMatrix.identity(len(src))
    m = differential_matrix(d, v, e, fl)
    b = iota_matrix(tgt) if tgt is not None and len(tgt) else ExactSparseMatrix.zero(m.rows, m.rows)
    comm = m @ a - b @ m
    label = flavor if not core else f"core-{core}-stage{stage}"
    out = []
    for name, defect in (("iota_squared_identity", sq), ("iota_commutes_with_differential", comm)):
        col = _bad_column(defect)
        out.append(
            _record(
                name,
                col is None,
                d,
                v,
                e,
                label,
                witness=(_witness(d, v, e, fl, col) if not core else col) if col is not None else None,
            )
        )
    return out


def _betti(d, v, e, flavor, part, primes, transpose=False) -> tuple[int, int]:
    from ogcomplex.homology import matrix, rank, slice_dimension

    dim = slice_dimension(d, v, e, flavor, part)
    if not dim:
        return 0, 0
    out_m = matrix(d, v, e, flavor, part)
    in_m = matrix(d, v + 1, e + 1, flavor, part)
    if transpose:
        out_m, in_m = out_m.transpose(), in_m.transpose()
    return dim, dim - rank(out_m, primes) - rank(in_m, primes)


def task_minus(d, v, e, flavor, primes) -> list[dict]:
    primes = tuple(primes)
    out = []
    dim_m, b_m = _betti(d, v, e, flavor, MINUS, primes)
    _, b_m_dual = _betti(d, v, e, flavor, MINUS, primes, transpose=True)
    dim_a, b_a = _betti(d, v, e, flavor, ALL, primes)
    dim_p, b_p = _betti(d, v, e, flavor, PLUS, primes)
    g = Grading(d, v, e)
    common = {"loop_order": g.loop_order, "degree_OGC": g.degree_ogc}
    out.append(_record("minus_part_acyclic", b_m == 0, d, v, e, flavor, MINUS, dim=dim_m, betti=b_m, **common))
    out.append(
        _record("dual_minus_part_acyclic", b_m_dual == 0, d, v, e, flavor, MINUS, dim=dim_m, betti=b_m_dual, **common)
    )
    out.append(
        _record(
            "full_equals_plus",
            b_a == b_p and dim_a == dim_p + dim_m,
            d,
            v,
            e,
            flavor,
            ALL,
            betti=b_a,
            betti_plus=b_p,
            **common,
        )
    )
    return out


def task_qiso(d, b, part, max_v) -> list[dict]:
    from ogcomplex.errors import NotAChainMap
    from ogcomplex.skeleton import skeleton_quasi_iso

    report: dict = {}
    try:
        ok = skeleton_quasi_iso(d, b, part, max_v, report=report)
        err = None
    except NotAChainMap as exc:
        ok, err = False, str(exc)
    bad = sorted(k for k, r in report.items() if not (r["source"] == r["target"] == r["induced_rank"]))
    homology = {str(k): r for k, r in sorted(report.items()) if r["source"] or r["target"]}
    return [
        _record(
            "skeleton_inclusion_quasi_iso",
            ok,
            d,
            None,
            None,
            SKELETON1,
            part,
            witness=err or (f"degree v={bad[0]}" if bad else None),
            loop_order=b,
            window_max_v=max_v,
            homology=homology,
        )
    ]


def task_inclusion(d, v, e) -> list[dict]:
    from ogcomplex.involution import iota_matrix
    from ogcomplex.skeleton import inclusion_matrix

    inc = inclusion_matrix(d, v, e)
    inc_low = inclusion_matrix(d, v - 1, e - 1)
    chain = differential_matrix(d, v, e, FULL) @ inc - inc_low @ differential_matrix(d, v, e, SKELETON1)
    sk = enumerate_basis(d, v, e, SKELETON1)
    full = enumerate_basis(d, v, e, FULL)
    iota = iota_matrix(full) @ inc - inc @ iota_matrix(sk)
    return [
        _record(
            "inclusion_is_chain_map",
            chain.is_zero(),
            d,
            v,
            e,
            SKELETON1,
            witness=_witness(d, v, e, SKELETON1, _bad_column(chain)),
        ),
        _record(
            "inclusion_commutes_with_iota",
            iota.is_zero(),
            d,
            v,
            e,
            SKELETON1,
            witness=_witness(d, v, e, SKELETON1, _bad_column(iota)),
        ),
        _record(
            "inclusion_injective",
            rank_mod_p(inc, DEFAULT_PRIMES[0]) == len(sk),
            d,
            v,
            e,
            SKELETON1,
        ),
    ]


def task_phi(d, n, edges) -> list[dict]:
    from ogcomplex.proofcheck import CoreGraph, verify_phi_chain

    rep = verify_phi_chain(CoreGraph(n, tuple(tuple(x) for x in edges)), d)
    failed = sorted(k for k, x in rep["verdicts"].items() if not x)
    return [
        _record(
            "phi_chain",
            rep["passed"],
            d,
            None,
            None,
            "core-phi",
            MINUS,
            witness=({"core": rep["core"], "failed": failed} if failed else None),
            core=rep["core"],
            tree_order=rep["tree_order"],
            stages=rep["stages"],
            verdicts=rep["verdicts"],
        )
    ]


def task_projection(d, n, edges) -> list[dict]:
    from ogcomplex.proofcheck import CoreGraph, projection_check

    core = CoreGraph(n, tuple(tuple(x) for x in edges))
    ok = projection_check(core, d)
    info = {"n": n, "edges": [[a + 1, b + 1] for a, b in edges]}
    return [_record("phi_matches_reduced_edge_page", ok, d, None, None, "core-phi", ALL, witness=None if ok else info, core=info)]


def task_euler(d, b, part) -> list[dict]:
    from ogcomplex.homology import euler_check

    return [_record("euler_characteristic", euler_check(d, b, SKELETON1, part), d, None, None, SKELETON1, part, loop_order=b)]


def task_grt(primes) -> list[dict]:
    """Degree-zero cohomology of the d = 3 complex at loop orders 1-3."""
    from ogcomplex.homology import matrix, rank, slice_dimension

    d = 3
    out = []
    for b in (1, 2, 3):
        v = 2 * (b - 1) + 3  # d(v-1) = (d-1)e with e = v + b - 1
        e = v + b - 1
        flavor = FULL if b == 1 else SKELETON1
        values = {}
        for part in PARTS:
            dim = slice_dimension(d, v, e, flavor, part)
            if not dim:
                values[part] = {"dim": 0, "betti": 0, "per_prime": [], "rational": 0}
                continue
            mats = [matrix(d, v, e, flavor, part), matrix(d, v + 1, e + 1, flavor, part)]
            per_prime = [dim - sum(rank_mod_p(m, p) if not m.is_zero() else 0 for m in mats) for p in primes]
            rational = dim - sum(rational_rank(m) for m in mats)
            values[part] = {"dim": dim, "betti": dim - sum(rank(m, primes) for m in mats), "per_prime": per_prime, "rational": rational}
        want = 1 if b == 3 else 0
        agree = all(set(x["per_prime"]) <= {x["betti"]} and x["rational"] == x["betti"] for x in values.values())
        ok = values[ALL]["betti"] == want and values[PLUS]["betti"] == want and values[MINUS]["betti"] == 0 and agree
        out.append(
            _record("degree_zero_cohomology", ok, d, v, e, flavor, ALL, loop_order=b, expected=want, values=values)
        )
    return out


def _lie_pool(d: int):
    if d % 2:
        slices = [(2, 2), (2, 3), (3, 4)]
    else:
        slices = [(4, 4), (4, 5)]
    return [c.canonical for v, e in slices for c in enumerate_basis(d, v, e).classes]


def _lie_samples(d: int, count: int, seed: int, arity: int):
    pool = _lie_pool(d)
    rng = random.Random(f"{seed}:{d}:{arity}")
    return [tuple(rng.choice(pool) for _ in range(arity)) for _ in range(count)]


def task_lie_unit(d, v, e) -> list[dict]:
    from ogcomplex.complexes import Chain
    from ogcomplex.liealg import ExtElement, ext_bracket

    one = ExtElement(Fraction(1), Chain(d))
    ok_11 = ext_bracket(one, one, d) == ExtElement(Fraction(0), Chain(d))
    bad = None
    for c in enumerate_basis(d, v, e).classes:
        g = ExtElement(Fraction(0), Chain(d, {c.canonical: 1}))
        want = Chain(d, {c.canonical: 2 * (v - e)} if v != e else {})
        if ext_bracket(one, g, d).body != want or ext_bracket(g, one, d).body != want.scaled(-1):
            bad = to_text(c.canonical).strip()
            break
    return [
        _record("unit_bracket_rules", ok_11 and bad is None, d, v, e, witness=bad),
    ]


def task_lie_transpose(d, v, e) -> list[dict]:
    from ogcomplex.liealg import transpose_check

    return [_record("splitting_is_weighted_transpose", transpose_check(d, v, e), d, v, e)]


def task_lie_sample(d, kind, index, seed, count) -> list[dict]:
    from ogcomplex.liealg import derivation_defect, iota_defect, jacobi_defect, unit_jacobi_defect, bracket

    arity = 3 if kind == "jacobi" else 2
    xs = _lie_samples(d, count, seed, arity)[index]
    if kind == "jacobi":
        defect = jacobi_defect(*xs, d)
    elif kind == "derivation":
        defect = derivation_defect(*xs, d)
    elif kind == "iota":
        defect = iota_defect(*xs, d)
    else:
        got = unit_jacobi_defect(*xs, d)
        defect = got
        defect += bracket(*xs, d).scaled(2)
    witness = [to_text(x).strip() for x in xs]
    return [
        _record(
            {
                "jacobi": "jacobi_identity",
                "derivation": "differential_is_derivation",
                "iota": "iota_is_lie_map",
                "unit": "unit_defect_is_minus_two_bracket",
            }[kind],
            defect.is_zero(),
            d,
            None,
            None,
            FULL,
            witness=None if defect.is_zero() else witness,
            sample=index,
            inputs=witness,
        )
    ]


# suite expansion --------------------------------------------------------


def suite_tasks(name: str, cfg: SuiteConfig) -> list[tuple[str, dict]]:
    tasks: list[tuple[str, dict]] = []
    max_v = cfg.max_v if cfg.max_v is not None else 5
    if name == "d2zero":
        for d in cfg.ds:
            for v, e in full_slices(d, max_v, cfg.max_e):
                tasks.append(("task_d2zero", {"d": d, "v": v, "e": e, "flavor": FULL}))
            for b in range(2, cfg.max_loop_order + 1):
                for v, e in skeleton_slices(d, b):
                    tasks.append(("task_d2zero", {"d": d, "v": v, "e": e, "flavor": SKELETON1}))
    elif name == "involution":
        from ogcomplex.proofcheck import FIGURE_CORE, THETA_CORE

        for d in cfg.ds:
            for v, e in full_slices(d, max_v, cfg.max_e):
                tasks.append(("task_involution", {"d": d, "v": v, "e": e, "flavor": FULL}))
            for b in range(2, cfg.max_loop_order + 1):
                for v, e in skeleton_slices(d, b):
                    tasks.append(("task_involution", {"d": d, "v": v, "e": e, "flavor": SKELETON1}))
            for core_name, core in (("theta", THETA_CORE), ("figure", FIGURE_CORE)):
                for stage in range(core.n):
                    for s in range(len(core.edges) + 1):
                        v, e = core.n + s, len(core.edges) + s
                        if len(enumerate_basis(d, v, e, CorePhi(core, stage))):
                            tasks.append(
                                (
                                    "task_involution",
                                    {"d": d, "v": v, "e": e, "flavor": "core-phi", "core": core_name, "stage": stage},
                                )
                            )
    elif name == "minus-acyclic":
        top_v = cfg.max_v if cfg.max_v is not None else cfg.max_e + 1
        for d in cfg.ds:
            for v, e in full_slices(d, top_v, cfg.max_e):
                tasks.append(("task_minus", {"d": d, "v": v, "e": e, "flavor": FULL, "primes": list(cfg.primes)}))
            for b in range(2, cfg.max_loop_order + 1):
                for v, e in skeleton_slices(d, b):
                    tasks.append(
                        ("task_minus", {"d": d, "v": v, "e": e, "flavor": SKELETON1, "primes": list(cfg.primes)})
                    )
    elif name == "skeleton-qiso":
        for d in cfg.ds:
            for b in range(2, cfg.max_loop_order + 1):
                for v, e in skeleton_slices(d, b):
                    tasks.append(("task_inclusion", {"d": d, "v": v, "e": e}))
                window = cfg.qiso_window.get(b, 5 * (b - 1))
                for part in PARTS:
                    tasks.append(("task_qiso", {"d": d, "b": b, "part": part, "max_v": window}))
    elif name == "proof":
        from ogcomplex.proofcheck import core_sweep

        for d in cfg.ds:
            for core in core_sweep(4, 7, 1):
                tasks.append(("task_phi", {"d": d, "n": core.n, "edges": [list(x) for x in core.edges]}))
            for core in core_sweep(4, 7, 3):
                if len(core.edges) - core.n + 1 <= cfg.max_loop_order:
                    tasks.append(("task_projection", {"d": d, "n": core.n, "edges": [list(x) for x in core.edges]}))
    elif name == "euler":
        for d in cfg.ds:
            for b in range(2, cfg.max_loop_order + 1):
                for part in PARTS:
                    tasks.append(("task_euler", {"d": d, "b": b, "part": part}))
    elif name == "lie":
        for d in cfg.ds:
            for v, e in full_slices(d, min(max_v, 4), min(cfg.max_e, 6)):
                tasks.append(("task_lie_unit", {"d": d, "v": v, "e": e}))
                tasks.append(("task_lie_transpose", {"d": d, "v": v, "e": e}))
            kinds = ("jacobi", "derivation", "iota", "unit") if d % 2 else ("derivation", "iota", "unit")
            count = cfg.samples if d % 2 else max(1, cfg.samples // 4)
            for kind in kinds:
                for i in range(count):
                    tasks.append(
                        ("task_lie_sample", {"d": d, "kind": kind, "index": i, "seed": cfg.seed, "count": count})
                    )
    elif name == "grt":
        tasks.append(("task_grt", {"primes": list(cfg.primes)}))
    else:
        raise ValueError(f"unknown suite {name!r}")
    return tasks


def _run_task(task: tuple[str, dict]) -> list[dict]:
    fn, kwargs = task
    return globals()[fn](**kwargs)


def run_tasks(tasks, threads: int = 1) -> list[dict]:
    if threads <= 1 or len(tasks) <= 1:
        results = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=1))
    return [r for rs in results for r in rs]


def run_suite(name: str, cfg: SuiteConfig, threads: int = 1) -> dict:
    records = run_tasks(suite_tasks(name, cfg), threads)
    checksums = {r["basis"]: r["checksum"] for r in records if "basis" in r}
    for r in records:
        r.pop("basis", None)
        r.pop("checksum", None)
    return {
        "suite": name,
        "records": records,
        "failures": [r for r in records if not r["ok"]],
        "passed": all(r["ok"] for r in records),
        "basis_checksums": dict(sorted(checksums.items())),
    }
