"""Command-line entry point.

Exit codes: 0 success, 1 failed verification (a JSON failure record is
printed), 2 usage error, 3 resource limit.  Artifacts are sorted JSON (or
CSV) and never contain timings, paths or the worker count, so reruns with a
different ``--threads`` are byte-identical.  Every artifact is also stored
under ``<cache>/reports`` for ``report`` to collect.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ogcomplex import __version__
from ogcomplex.basis import ALL, FULL, MINUS, PLUS, SKELETON1, _serialize, enumerate_basis, get_basis, slice_filename, store_basis
from ogcomplex.errors import (
    CorruptCache,
    GraphError,
    IncompleteRange,
    NotAChainMap,
    OGCError,
    PrimeDisagreement,
    ResourceLimitExceeded,
    UnsupportedLoopOrder,
    VersionMismatch,
)
from ogcomplex.linalg import DEFAULT_PRIMES

CACHE_ENV = "OGCOMPLEX_CACHE_DIR"
DEFAULT_CACHE = ".ogcomplex-cache"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    d: list[int]
    max_v: int | None = None
    max_e: int | None = None
    max_loop_order: int | None = None
    flavor: str = FULL
    part: str = ALL
    primes: list[int] = field(default_factory=lambda: list(DEFAULT_PRIMES))
    seed: int = 0
    output_format: str = "json"
    extra: dict = field(default_factory=dict)
    threads: int = 1
    cache_dir: str = DEFAULT_CACHE

    def __post_init__(self):
        for name in ("max_v", "max_e", "max_loop_order"):
            x = getattr(self, name)
            if x is not None and x <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if any(p <= 2**20 for p in self.primes):
            raise UsageError("primes must exceed 2^20")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")

    def identity(self) -> dict:
        """The part of the configuration that determines artifact content."""
        out = asdict(self)
        out.pop("threads")
        out.pop("cache_dir")
        return out

    def hash(self) -> str:
        return hashlib.sha256(json.dumps(self.identity(), sort_keys=True).encode()).hexdigest()


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _envelope(cfg: RunConfig, body: dict, checksums: dict | None = None) -> dict:
    return {
        "tool_version": __version__,
        "config": cfg.identity(),
        "config_hash": cfg.hash(),
        "basis_checksums": dict(sorted((checksums or {}).items())),
        **body,
    }


def _checksums_for(slices) -> dict:
    out = {}
    for d, v, e, flavor in slices:
        s = enumerate_basis(d, v, e, flavor)
        if len(s):
            out[slice_filename(d, v, e, flavor)] = hashlib.sha256(_serialize(s)).hexdigest()
    return out


def _positive_ints(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV, DEFAULT_CACHE))
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--primes", type=_positive_ints, default=list(DEFAULT_PRIMES))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="output_format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", help="also write the artifact to this file")

    p = _Parser(prog="ogcomplex", description="Oriented graph complexes: bases, homology and verification.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enumerate", parents=[common], help="materialize bases into the cache")
    s.add_argument("--d", type=_positive_ints, required=True)
    s.add_argument("--v", type=int, required=True)
    s.add_argument("--e", type=int)
    s.add_argument("--max-e", type=int)
    s.add_argument("--flavor", choices=(FULL, SKELETON1), default=FULL)
    s.add_argument("--max-candidates", type=int, default=2_000_000, help="decorated candidates per slice")
    s.add_argument("--max-classes", type=int, help="fail with exit 3 if a slice is larger")

    s = sub.add_parser("homology", parents=[common], help="Betti table of one loop order")
    s.add_argument("--d", type=_positive_ints, required=True)
    s.add_argument("--loop-order", type=int, required=True)
    s.add_argument("--flavor", choices=(FULL, SKELETON1), default=SKELETON1)
    s.add_argument("--part", choices=(ALL, PLUS, MINUS, "each"), default=ALL)
    s.add_argument("--max-v", type=int)

    s = sub.add_parser("split", parents=[common], help="eigenspace split of one slice")
    s.add_argument("--d", type=_positive_ints, required=True)
    s.add_argument("--v", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--flavor", choices=(FULL, SKELETON1), default=FULL)
    s.add_argument("--vectors", action="store_true", help="include the eigenvectors")

    from ogcomplex.suites import SUITES

    s = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--d", type=_positive_ints, default=[2, 3])
    s.add_argument("--max-v", type=int)
    s.add_argument("--max-e", type=int, default=7)
    s.add_argument("--max-loop-order", type=int, default=3)
    s.add_argument("--samples", type=int, default=20)

    s = sub.add_parser("proofcheck", parents=[common], help="check the acyclicity argument over a core sweep")
    s.add_argument("--d", type=_positive_ints, default=[2, 3])
    s.add_argument("--max-vertices", type=int, default=4)
    s.add_argument("--max-edges", type=int, default=7)
    s.add_argument("--min-valence", type=int, default=1)

    sub.add_parser("report", parents=[common], help="collect cached artifacts into one document")
    return p


def _config(args) -> RunConfig:
    extra = {}
    for key in (
        "v",
        "e",
        "loop_order",
        "suite",
        "samples",
        "max_candidates",
        "max_classes",
        "max_vertices",
        "max_edges",
        "min_valence",
        "vectors",
    ):
        if getattr(args, key, None) is not None:
            extra[key] = getattr(args, key)
    return RunConfig(
        command=args.command,
        d=list(getattr(args, "d", []) or []),
        max_v=getattr(args, "max_v", None),
        max_e=getattr(args, "max_e", None),
        max_loop_order=getattr(args, "max_loop_order", None),
        flavor=getattr(args, "flavor", FULL),
        part=getattr(args, "part", ALL),
        primes=list(args.primes),
        seed=args.seed,
        output_format=args.output_format,
        extra=extra,
        threads=args.threads,
        cache_dir=args.cache_dir,
    )


# commands ---------------------------------------------------------------


def cmd_enumerate(cfg: RunConfig) -> tuple[int, str]:
    v = cfg.extra["v"]
    if v < 1:
        raise UsageError("--v must be positive")
    if "e" in cfg.extra:
        es = [cfg.extra["e"]]
    else:
        top = cfg.max_e if cfg.max_e is not None else v + 1
        es = list(range(max(v - 1, 0), top + 1))
    cap = cfg.extra.get("max_candidates")
    limit = cfg.extra.get("max_classes")
    rows = []
    for d in cfg.d:
        for e in es:
            s = enumerate_basis(d, v, e, cfg.flavor, cap=cap)
            if limit is not None and len(s) > limit:
                raise ResourceLimitExceeded(f"slice d={d} v={v} e={e} has {len(s)} classes > {limit}")
            store_basis(s, cfg.cache_dir)
            rows.append(
                {
                    "d": d,
                    "v": v,
                    "e": e,
                    "flavor": cfg.flavor,
                    "count": len(s),
                    "file": slice_filename(d, v, e, cfg.flavor),
                    "checksum": hashlib.sha256(_serialize(s)).hexdigest(),
                }
            )
    sums = {r["file"]: r["checksum"] for r in rows if r["count"]}
    if cfg.output_format == "csv":
        lines = ["d,v,e,flavor,count"] + [f"{r['d']},{r['v']},{r['e']},{r['flavor']},{r['count']}" for r in rows]
        return 0, "\n".join(lines) + "\n"
    if cfg.output_format == "text":
        return 0, "".join(f"d={r['d']} v={r['v']} e={r['e']} {r['flavor']}: {r['count']}\n" for r in rows)
    return 0, _dump(_envelope(cfg, {"slices": rows}, sums))


def cmd_homology(cfg: RunConfig) -> tuple[int, str]:
    from ogcomplex.homology import betti_table

    b = cfg.extra["loop_order"]
    if b < 1:
        raise UsageError("--loop-order must be positive")
    if b == 1 and cfg.flavor == SKELETON1:
        raise UnsupportedLoopOrder("loop order 1 is only available in the full flavor")
    parts = (ALL, PLUS, MINUS) if cfg.part == "each" else (cfg.part,)
    tables = [betti_table(d, b, cfg.flavor, parts, cfg.max_v, cfg.cache_dir) for d in cfg.d]
    rows = [r for t in tables for r in t.rows()]
    if cfg.output_format == "csv":
        return 0, "d,v,e,flavor,part,dim,betti\n" + "".join(
            f"{r['d']},{r['v']},{r['e']},{r['flavor']},{r['part']},{r['dim']},{r['betti']}\n" for r in rows
        )
    if cfg.output_format == "text":
        return 0, "".join(
            f"d={r['d']} v={r['v']} e={r['e']} deg={r['degree_OGC']} {r['part']}: dim {r['dim']} betti {r['betti']}\n"
            for r in rows
        )
    sums = _checksums_for({(r["d"], r["v"], r["e"], cfg.flavor) for r in rows})
    return 0, _dump(_envelope(cfg, {"betti": rows}, sums))


def cmd_split(cfg: RunConfig) -> tuple[int, str]:
    from ogcomplex.involution import split_basis

    v, e = cfg.extra["v"], cfg.extra["e"]
    out = []
    for d in cfg.d:
        s = get_basis(d, v, e, cfg.flavor, cfg.cache_dir)
        sp = split_basis(s)
        rec = {
            "d": d,
            "v": v,
            "e": e,
            "flavor": cfg.flavor,
            "dim": len(s),
            "plus": len(sp.plus),
            "minus": len(sp.minus),
            "fixed": sum(1 for vec in sp.plus + sp.minus if len(vec) == 1),
        }
        if cfg.extra.get("vectors"):
            rec["vectors"] = json.loads(sp.to_json())
        out.append(rec)
    if cfg.output_format != "json":
        return 0, "".join(f"d={r['d']} v={r['v']} e={r['e']}: {r['dim']} = {r['plus']} + {r['minus']}\n" for r in out)
    sums = _checksums_for({(r["d"], v, e, cfg.flavor) for r in out})
    return 0, _dump(_envelope(cfg, {"splits": out}, sums))


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    from ogcomplex.suites import SuiteConfig, run_suite

    scfg = SuiteConfig(
        ds=tuple(cfg.d),
        max_v=cfg.max_v,
        max_e=cfg.max_e or 7,
        max_loop_order=cfg.max_loop_order or 3,
        primes=tuple(cfg.primes),
        seed=cfg.seed,
        samples=cfg.extra.get("samples", 20),
    )
    result = run_suite(cfg.extra["suite"], scfg, cfg.threads)
    sums = result.pop("basis_checksums")
    doc = _envelope(cfg, result, sums)
    return (0 if result["passed"] else 1), _dump(doc)


def _phi_task(args) -> dict:
    from ogcomplex.proofcheck import CoreGraph, verify_phi_chain

    d, n, edges = args
    return verify_phi_chain(CoreGraph(n, tuple(tuple(x) for x in edges)), d)


def cmd_proofcheck(cfg: RunConfig) -> tuple[int, str]:
    from concurrent.futures import ProcessPoolExecutor

    from ogcomplex.proofcheck import core_sweep

    cores = core_sweep(cfg.extra["max_vertices"], cfg.extra["max_edges"], cfg.extra["min_valence"])
    tasks = [(d, c.n, [list(x) for x in c.edges]) for d in cfg.d for c in cores]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            records = list(pool.map(_phi_task, tasks, chunksize=1))
    else:
        records = [_phi_task(t) for t in tasks]
    failures = [
        {
            "invariant": "phi_chain",
            "d": r["d"],
            "core": r["core"],
            "failed": sorted(k for k, x in r["verdicts"].items() if not x),
        }
        for r in records
        if not r["passed"]
    ]
    passed = not failures
    doc = _envelope(cfg, {"cores": len(cores), "records": records, "failures": failures, "passed": passed})
    return (0 if passed else 1), _dump(doc)


def cmd_report(cfg: RunConfig) -> tuple[int, str]:
    root = Path(cfg.cache_dir)
    manifest = None
    if (root / "manifest.json").exists():
        try:
            manifest = json.loads((root / "manifest.json").read_text())
        except json.JSONDecodeError as exc:
            raise CorruptCache(f"unreadable manifest: {exc}") from exc
    reports = {}
    for path in sorted((root / "reports").glob("*")) if (root / "reports").is_dir() else []:
        text = path.read_text()
        try:
            reports[path.name] = json.loads(text)
        except json.JSONDecodeError:
            reports[path.name] = text
    doc = {"tool_version": __version__, "manifest": manifest, "reports": reports}
    return 0, _dump(doc)


COMMANDS = {
    "enumerate": cmd_enumerate,
    "homology": cmd_homology,
    "split": cmd_split,
    "verify": cmd_verify,
    "proofcheck": cmd_proofcheck,
    "report": cmd_report,
}


def _store_artifact(cfg: RunConfig, text: str) -> None:
    if cfg.command == "report":
        return
    ext = {"json": "json", "csv": "csv", "text": "txt"}[cfg.output_format]
    name = cfg.command if cfg.command != "verify" else f"verify-{cfg.extra['suite']}"
    folder = Path(cfg.cache_dir) / "reports"
    folder.mkdir(parents=True, exist_ok=True)
    (folder / f"{name}-{cfg.hash()[:16]}.{ext}").write_text(text)


def _failure(kind: str, exc: Exception) -> str:
    return _dump({"error": type(exc).__name__, "kind": kind, "message": str(exc)})


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        code, text = COMMANDS[cfg.command](cfg)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    except ResourceLimitExceeded as exc:
        stdout.write(_failure("resource_limit", exc))
        return 3
    except (IncompleteRange, UnsupportedLoopOrder, GraphError) as exc:
        stderr.write(_failure("usage", exc))
        return 2
    except (NotAChainMap, PrimeDisagreement, CorruptCache, VersionMismatch) as exc:
        stdout.write(_failure("verification", exc))
        return 1
    except OGCError as exc:
        stdout.write(_failure("error", exc))
        return 1
    stdout.write(text)
    if args.output:
        Path(args.output).write_text(text)
    _store_artifact(cfg, text)
    if code == 1:
        stderr.write("verification failed; see the failures list\n")
    return code


def main() -> None:
    sys.exit(run())
