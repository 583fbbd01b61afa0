import io
import json

import pytest

from ogcomplex.basis import slice_filename
from ogcomplex.cli import CACHE_ENV, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cache(tmp_path):
    return str(tmp_path / "cache")


def test_enumerate_writes_cache(cache):
    code, out, _ = call("enumerate", "--d", "3", "--v", "3", "--e", "5", "--cache-dir", cache)
    assert code == 0
    doc = json.loads(out)
    assert doc["slices"][0]["count"] == 9
    assert doc["config_hash"] and doc["tool_version"]
    assert slice_filename(3, 3, 5, "full") in doc["basis_checksums"]


def test_enumerate_text_and_csv(cache):
    code, out, _ = call("enumerate", "--d", "2,3", "--v", "2", "--e", "2", "--format", "csv", "--cache-dir", cache)
    assert code == 0 and out.splitlines() == ["d,v,e,flavor,count", "2,2,2,full,0", "3,2,2,full,1"]


def test_homology_three_loops(cache):
    code, out, _ = call("homology", "--d", "3", "--loop-order", "3", "--part", "each", "--cache-dir", cache)
    assert code == 0
    rows = [r for r in json.loads(out)["betti"] if r["v"] == 7]
    got = {r["part"]: r["betti"] for r in rows}
    assert got == {"all": 1, "plus": 1, "minus": 0}


def test_split(cache):
    code, out, _ = call("split", "--d", "3", "--v", "4", "--e", "6", "--cache-dir", cache)
    rec = json.loads(out)["splits"][0]
    assert code == 0 and rec["plus"] + rec["minus"] == rec["dim"] == 50


def test_usage_errors(cache):
    assert call("frobnicate")[0] == 2
    assert call("homology", "--d", "3", "--loop-order", "2", "--flavor", "full", "--cache-dir", cache)[0] == 2
    assert call("homology", "--d", "3", "--loop-order", "1", "--cache-dir", cache)[0] == 2
    assert call("enumerate", "--d", "3", "--v", "2", "--primes", "101", "--cache-dir", cache)[0] == 2
    assert call("--version")[0] == 0


def test_resource_limits(cache):
    code, out, _ = call("enumerate", "--d", "3", "--v", "6", "--e", "8", "--max-classes", "10", "--cache-dir", cache)
    assert code == 3 and json.loads(out)["kind"] == "resource_limit"
    assert call("enumerate", "--d", "3", "--v", "6", "--e", "8", "--max-candidates", "5", "--cache-dir", cache)[0] == 3


def test_corrupt_cache_is_a_verification_failure(cache):
    call("homology", "--d", "3", "--loop-order", "2", "--cache-dir", cache)
    from pathlib import Path

    victim = Path(cache) / slice_filename(3, 4, 5, "skeleton1")
    victim.write_bytes(victim.read_bytes()[:7])
    code, out, _ = call("homology", "--d", "3", "--loop-order", "2", "--cache-dir", cache)
    assert code == 1 and json.loads(out)["error"] == "CorruptCache"


def test_verify_is_deterministic_across_threads(cache):
    base = ("verify", "--suite", "euler", "--d", "3", "--max-loop-order", "3", "--cache-dir", cache)
    a = call(*base, "--threads", "1")
    b = call(*base, "--threads", "3")
    assert a[0] == b[0] == 0
    assert a[1] == b[1]
    assert json.loads(a[1])["passed"]


def test_env_cache_and_report(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env"))
    assert call("split", "--d", "3", "--v", "2", "--e", "2")[0] == 0
    code, out, _ = call("report")
    doc = json.loads(out)
    assert code == 0 and any(name.startswith("split-") for name in doc["reports"])
    assert doc["manifest"]["format_version"] == 1


def test_output_file(cache, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = call("split", "--d", "3", "--v", "2", "--e", "2", "--cache-dir", cache, "--output", str(target))
    assert code == 0 and target.read_text() == out
