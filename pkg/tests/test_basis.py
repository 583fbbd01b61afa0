import json

import pytest

from ogcomplex.basis import (
    FULL,
    SKELETON1,
    brute_force_basis,
    enumerate_basis,
    get_basis,
    load_basis,
    polygon,
    slice_filename,
    store_basis,
    validate_slice,
)
from ogcomplex.errors import CorruptCache, ResourceLimitExceeded, VersionMismatch
from ogcomplex.graphs import canonical_search, check_admissible, new_graph, reverse_all


def test_small_examples():
    s = enumerate_basis(3, 2, 2)
    assert [c.canonical for c in s.classes] == [new_graph(2, [(0, 1), (0, 1)])]
    assert len(enumerate_basis(2, 2, 2)) == 0
    assert len(enumerate_basis(3, 1, 0)) == 0


@pytest.mark.parametrize("d", [2, 3])
def test_matches_brute_force(d):
    for v in range(1, 5):
        for e in range(0, 7):
            fast = {c.canonical for c in enumerate_basis(d, v, e).classes}
            oracle = brute_force_basis(d, v, e).classes
            # the oracle keeps the lexicographically least orbit member
            slow = {canonical_search(c.canonical).graph for c in oracle}
            assert len(slow) == len(oracle)
            assert fast == slow, (d, v, e)


def test_known_sizes():
    assert len(enumerate_basis(3, 3, 5)) == 9
    assert len(enumerate_basis(3, 4, 6)) == 50
    assert len(enumerate_basis(2, 4, 5)) == 3


def test_polygons_at_loop_order_one():
    for k in (2, 3, 4):
        g = polygon(k)
        assert check_admissible(g)
        assert g.n == len(g.edges) == 2 * k
    assert len(enumerate_basis(3, 5, 5)) == 0


def test_slices_are_valid_and_reversal_closed():
    for d, v, e in ((3, 4, 6), (2, 5, 7), (3, 5, 7)):
        s = enumerate_basis(d, v, e)
        validate_slice(s)
        reps = {c.canonical for c in s.classes}
        assert {canonical_search(reverse_all(g)).graph for g in reps} == reps


def test_skeleton_flavor_is_a_subset():
    full = {c.canonical for c in enumerate_basis(3, 5, 7).classes}
    sk = {c.canonical for c in enumerate_basis(3, 5, 7, SKELETON1).classes}
    assert sk and sk < full


def test_brute_force_guard():
    with pytest.raises(ResourceLimitExceeded):
        brute_force_basis(3, 7, 9)


def test_candidate_cap():
    with pytest.raises(ResourceLimitExceeded):
        enumerate_basis(3, 6, 8, cap=10)


def test_cache_round_trip(tmp_path):
    s = enumerate_basis(3, 4, 6)
    path = store_basis(s, tmp_path)
    assert path.name == slice_filename(3, 4, 6, FULL)
    loaded = load_basis(3, 4, 6, FULL, tmp_path)
    assert loaded.classes == s.classes
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["format_version"] == 1 and path.name in manifest["checksums"]
    assert get_basis(3, 4, 6, FULL, tmp_path).classes == s.classes


def test_cache_missing_and_stale(tmp_path):
    assert load_basis(3, 2, 2, FULL, tmp_path) is None
    store_basis(enumerate_basis(3, 2, 2), tmp_path)
    assert load_basis(3, 3, 5, FULL, tmp_path) is None
    m = json.loads((tmp_path / "manifest.json").read_text())
    m["format_version"] = 0
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    assert load_basis(3, 2, 2, FULL, tmp_path) is None


def test_cache_corruption(tmp_path):
    path = store_basis(enumerate_basis(3, 3, 5), tmp_path)
    path.write_bytes(path.read_bytes()[:10])
    with pytest.raises(CorruptCache):
        load_basis(3, 3, 5, FULL, tmp_path)


def test_cache_rules_change(tmp_path):
    store_basis(enumerate_basis(3, 2, 2), tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    m["rules_hash"] = "0" * 64
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(VersionMismatch):
        load_basis(3, 2, 2, FULL, tmp_path)
