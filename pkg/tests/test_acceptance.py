"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import io
import random

import pytest

from ogcomplex.basis import brute_force_basis, enumerate_basis
from ogcomplex.cli import run
from ogcomplex.graphs import ZERO, automorphism_report, canonical_search, canonicalize, perm_sign, relabel
from ogcomplex.suites import SuiteConfig, run_suite

THREADS = 4


def report(capsys, number, text, ok):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
    return ok


def suite_ok(name, **kw):
    res = run_suite(name, SuiteConfig(**kw), THREADS)
    return res["passed"], res


def failures(res):
    return res["failures"][:5]


def test_criterion_01_square_zero(capsys):
    ok, res = suite_ok("d2zero")
    assert report(capsys, 1, f"d^2 = 0 on {len(res['records'])} slices", ok), failures(res)


def test_criterion_02_relabeling_sign_law(capsys):
    rng = random.Random(0)
    bad, zero_bad, classes = [], [], 0
    for d, v, e in ((2, 4, 5), (2, 5, 7), (3, 3, 5), (3, 4, 6), (3, 5, 7)):
        for c in enumerate_basis(d, v, e).classes[:8]:
            classes += 1
            g = c.canonical
            for _ in range(200):
                sigma, tau = list(range(g.n)), list(range(len(g.edges)))
                rng.shuffle(sigma)
                rng.shuffle(tau)
                sc = canonicalize(relabel(g, sigma, tau), d)
                want = perm_sign(tau) if d % 2 == 0 else perm_sign(sigma)
                if sc is ZERO or sc.cls.canonical != g or sc.coefficient != want:
                    bad.append((d, g))
                    break
        # zero verdicts, also on classes that only survive for the other parity
        for other in (2, 3):
            for c in enumerate_basis(other, v, e).classes:
                dead = canonicalize(c.canonical, d % 2) is ZERO
                if dead != automorphism_report(c.canonical, d % 2)["has_odd_automorphism"]:
                    zero_bad.append((d, c.canonical))
    ok = not bad and not zero_bad
    assert report(capsys, 2, f"200 relabelings on {classes} classes, zero verdicts consistent", ok), (bad, zero_bad)


def test_criterion_03_basis_oracle(capsys):
    bad = []
    for d in (2, 3):
        for v in range(1, 5):
            for e in range(0, 7):
                fast = {c.canonical for c in enumerate_basis(d, v, e).classes}
                slow = {canonical_search(c.canonical).graph for c in brute_force_basis(d, v, e).classes}
                if fast != slow:
                    bad.append((d, v, e))
    assert report(capsys, 3, "enumeration equals brute force for v <= 4, e <= 6", not bad), bad


def test_criterion_04_involution_laws(capsys):
    ok, res = suite_ok("involution")
    assert report(capsys, 4, f"iota^2 = id and iota commutes with d on {len(res['records'])} slices", ok), failures(res)


@pytest.fixture(scope="module")
def minus_run():
    return suite_ok("minus-acyclic", ds=(2, 3), max_e=7)


def test_criterion_05_minus_acyclic(capsys, minus_run):
    _, res = minus_run
    recs = [r for r in res["records"] if r["invariant"] in ("minus_part_acyclic", "dual_minus_part_acyclic")]
    ok = bool(recs) and all(r["ok"] for r in recs)
    assert report(capsys, 5, f"minus part acyclic on {len(recs)} checks", ok), failures(res)


def test_criterion_06_full_equals_plus(capsys, minus_run):
    _, res = minus_run
    recs = [r for r in res["records"] if r["invariant"] == "full_equals_plus"]
    ok = bool(recs) and all(r["ok"] for r in recs)
    assert report(capsys, 6, f"Betti(full) = Betti(plus) on {len(recs)} bigrades", ok), failures(res)


@pytest.mark.slow
def test_criterion_07_skeleton_quasi_isos(capsys):
    ok, res = suite_ok("skeleton-qiso")
    assert report(capsys, 7, f"inclusions are quasi-isomorphisms ({len(res['records'])} checks)", ok), failures(res)


def test_criterion_08_proof_machinery(capsys):
    ok, res = suite_ok("proof")
    assert report(capsys, 8, f"stage complexes verified on {len(res['records'])} checks", ok), failures(res)


def test_criterion_09_grt(capsys):
    ok, res = suite_ok("grt", ds=(3,))
    assert report(capsys, 9, "degree-0 classes 0, 0, 1 at loop orders 1..3, plus part", ok), failures(res)


def test_criterion_10_lie(capsys):
    ok, res = suite_ok("lie", samples=20)
    jac = [r for r in res["records"] if r["invariant"] == "jacobi_identity"]
    ok = ok and len(jac) >= 20
    assert report(capsys, 10, f"unit rules, Jacobi ({len(jac)}) and derivation samples", ok), failures(res)


@pytest.mark.parametrize("suite", ["d2zero", "grt"])
def test_criterion_11_determinism(capsys, tmp_path, suite):
    outs = []
    for threads in (1, 4):
        buf = io.StringIO()
        code = run(
            ["verify", "--suite", suite, "--threads", str(threads), "--cache-dir", str(tmp_path / f"c{threads}")],
            buf,
            io.StringIO(),
        )
        outs.append((code, buf.getvalue()))
    ok = outs[0] == outs[1] and outs[0][0] == 0
    assert report(capsys, 11, f"{suite} report identical for 1 and 4 threads", ok)
