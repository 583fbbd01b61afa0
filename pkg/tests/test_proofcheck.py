import pytest

import ogcomplex.proofcheck as pc
from ogcomplex.errors import Disconnected, WrongStage
from ogcomplex.proofcheck import (
    FIGURE_CORE,
    THETA_CORE,
    CoreGraph,
    choose_tree_order,
    core_sweep,
    f_map,
    has_cycle,
    phi_basis,
    projection_check,
    tree_prefixes_ok,
    verify_phi_chain,
)

STAR = CoreGraph(4, ((0, 1), (0, 2), (0, 3)))
TRIANGLE = CoreGraph(3, ((0, 1), (1, 2), (0, 2)))


def test_tree_orders():
    order = choose_tree_order(STAR)
    assert order.edges == (0, 1, 2) and tree_prefixes_ok(STAR, order)
    assert tree_prefixes_ok(FIGURE_CORE, choose_tree_order(FIGURE_CORE))
    with pytest.raises(Disconnected):
        CoreGraph(3, ((0, 1),))


def test_cycles_through_collapsed_edges():
    assert has_cycle(TRIANGLE, (">", ">", "<"))
    assert not has_cycle(TRIANGLE, (">", ">", ">"))
    assert has_cycle(TRIANGLE, ("E", ">", "<"))
    assert not has_cycle(TRIANGLE, ("E", ">", "S"))


@pytest.mark.parametrize("core", [THETA_CORE, FIGURE_CORE, TRIANGLE])
def test_terminal_stage_is_all_ess(core):
    last = phi_basis(core, core.n - 1, 3)
    assert len(last) == 1
    assert set(last.classes[0].canonical) <= {"E", "S"}


def test_f_map_examples():
    assert f_map(1, ("S", "S", "S"), 3, THETA_CORE) == {}
    assert f_map(1, ("<", "S", "S"), 3, THETA_CORE) == {("E", "S", "S"): -1}
    assert f_map(1, ("<", "S", "S"), 2, THETA_CORE) == {("E", "S", "S"): 1}
    assert f_map(1, (">", ">", "S"), 2, THETA_CORE) == {}
    with pytest.raises(WrongStage):
        f_map(1, ("E", "S", "S"), 3, THETA_CORE)
    with pytest.raises(WrongStage):
        f_map(2, ("S", "S", "S"), 3, THETA_CORE)
    with pytest.raises(WrongStage):
        phi_basis(THETA_CORE, 2, 3)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("core", [THETA_CORE, FIGURE_CORE], ids=["theta", "figure"])
def test_named_cores_pass(core, d):
    rep = verify_phi_chain(core, d)
    assert rep["passed"], rep["verdicts"]
    assert rep["stages"][0]["betti_minus"] == {}


@pytest.mark.parametrize("d", [2, 3])
def test_small_sweep(d):
    cores = core_sweep(3, 5)
    assert len(cores) > 5
    assert all(verify_phi_chain(c, d)["passed"] for c in cores)


@pytest.mark.parametrize("d", [2, 3])
def test_projection_to_reduced_complex(d):
    assert projection_check(THETA_CORE, d)
    assert projection_check(CoreGraph(2, ((0, 1),) * 4), d)


def test_broken_sign_is_caught(monkeypatch):
    monkeypatch.setattr(pc, "_weight", lambda t, d: 0)
    assert not verify_phi_chain(FIGURE_CORE, 2)["passed"]
