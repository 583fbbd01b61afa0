import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ogcomplex.basis import enumerate_basis
from ogcomplex.errors import InadmissibleInput, OutOfRangeEndpoint, SelfLoop
from ogcomplex.graphs import (
    AdmissibilityRules,
    LabeledGraph,
    OK,
    ZERO,
    automorphism_report,
    canonicalize,
    check_admissible,
    from_json,
    new_graph,
    parse_text,
    perm_sign,
    relabel,
    reverse_all,
    to_json,
    to_text,
)

G2 = new_graph(2, [(0, 1), (0, 1)])
FAN = new_graph(3, [(0, 1), (0, 2), (2, 1), (2, 1)])


def brute_automorphisms(g):
    """All (vertex perm, edge perm) pairs fixing the labeled graph."""
    out = []
    for sigma in itertools.permutations(range(g.n)):
        for tau in itertools.permutations(range(len(g.edges))):
            if relabel(g, sigma, tau) == g:
                out.append((sigma, tau))
    return out


def test_new_graph_examples():
    assert G2.edges == ((0, 1), (0, 1))
    assert FAN.n == 3 and len(FAN.edges) == 4
    with pytest.raises(SelfLoop):
        new_graph(1, [(0, 0)])
    with pytest.raises(OutOfRangeEndpoint):
        new_graph(2, [(0, 2)])


def test_admissibility_examples():
    assert check_admissible(G2) is OK
    cyc = check_admissible(new_graph(3, [(0, 1), (1, 2), (2, 0)]))
    assert not cyc and "cycle" in cyc.reason
    path = check_admissible(new_graph(3, [(0, 1), (1, 2)]))
    assert not path
    assert not check_admissible(new_graph(4, [(0, 1), (0, 1), (2, 3), (2, 3)]))
    relaxed = AdmissibilityRules(min_valence=1, forbid_passing=False)
    assert check_admissible(new_graph(3, [(0, 1), (1, 2)]), relaxed)


def test_canonicalize_double_edge():
    assert canonicalize(G2, 0) is ZERO
    sc = canonicalize(G2, 1)
    assert sc.coefficient == 1 and sc.cls.canonical == G2


def test_fan_against_brute_force():
    autos = brute_automorphisms(FAN)
    odd_edge = any(perm_sign(t) == -1 for _, t in autos)
    odd_vertex = any(perm_sign(s) == -1 for s, _ in autos)
    for parity, odd in ((0, odd_edge), (1, odd_vertex)):
        rep = automorphism_report(FAN, parity)
        assert rep["group_size"] == len(autos)
        assert rep["has_odd_automorphism"] == odd
    # the parallel pair is an odd edge automorphism, so F dies for d even
    swapped = LabeledGraph(3, FAN.edges[:2] + (FAN.edges[3], FAN.edges[2]))
    assert canonicalize(swapped, 0) is ZERO
    assert canonicalize(swapped, 1).coefficient == canonicalize(FAN, 1).coefficient


def test_reverse_examples():
    assert reverse_all(G2).edges == ((1, 0), (1, 0))
    assert reverse_all(reverse_all(FAN)) == FAN
    assert check_admissible(reverse_all(FAN))


def test_text_and_json_round_trip():
    text = to_text(FAN)
    assert text.splitlines()[0] == "3 4"
    assert text.splitlines()[1] == "1 2"
    assert parse_text(text + to_text(G2)) == [FAN, G2]
    assert from_json(to_json(FAN)) == FAN


def test_inadmissible_input_rejected():
    with pytest.raises(InadmissibleInput):
        canonicalize(new_graph(3, [(0, 1), (1, 2)]), 0)


def _sample_classes():
    out = []
    for d, v, e in ((3, 3, 5), (3, 4, 6), (2, 4, 5), (2, 5, 7), (3, 4, 5)):
        out.extend((d, c.canonical) for c in enumerate_basis(d, v, e).classes[:6])
    return out


SAMPLES = _sample_classes()


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SAMPLES), st.randoms(use_true_random=False))
def test_relabeling_sign_law(sample, rnd):
    d, g = sample
    sigma = list(range(g.n))
    tau = list(range(len(g.edges)))
    rnd.shuffle(sigma)
    rnd.shuffle(tau)
    h = relabel(g, sigma, tau)
    sc = canonicalize(h, d)
    assert sc is not ZERO
    assert sc.cls.canonical == g
    want = perm_sign(tau) if d % 2 == 0 else perm_sign(sigma)
    assert sc.coefficient == want


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SAMPLES), st.integers(0, 1))
def test_canonical_is_idempotent_and_zero_consistent(sample, parity):
    _, g = sample
    sc = canonicalize(g, parity)
    rep = automorphism_report(g, parity)
    assert (sc is ZERO) == rep["has_odd_automorphism"]
    if sc is not ZERO:
        assert sc.cls.canonical == g and sc.coefficient == 1


def test_two_hundred_relabelings_per_class():
    import random

    rng = random.Random(0)
    for d, g in SAMPLES[:10]:
        for _ in range(200):
            sigma = list(range(g.n))
            tau = list(range(len(g.edges)))
            rng.shuffle(sigma)
            rng.shuffle(tau)
            sc = canonicalize(relabel(g, sigma, tau), d)
            assert sc.coefficient == (perm_sign(tau) if d % 2 == 0 else perm_sign(sigma))
