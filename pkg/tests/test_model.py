import pytest

from pcgraph import PC, SC, ModeInputs, pc_volume, sc_volume, select_mode


def inputs(**kw):
    base = dict(active_vertices=250, active_edges=1000, edges=1000, ratio=0.3, sum_pdeg=300,
                k=16, index_bytes=4, value_bytes=4, bw_ratio=2.0)
    base.update(kw)
    return ModeInputs(**base)


def test_dense_frontier_picks_pc():
    m = inputs()
    assert pc_volume(m) == pytest.approx(7664)
    assert m.bw_ratio * sc_volume(m) == pytest.approx(30800)
    assert select_mode(m) == PC


def test_sparse_frontier_picks_sc():
    m = inputs(active_edges=10, active_vertices=5)
    assert m.bw_ratio * sc_volume(m) == pytest.approx(328)
    assert select_mode(m) == SC


def test_empty_frontier_is_sc():
    assert select_mode(inputs(active_edges=0, active_vertices=0)) == SC


def test_exact_message_count_overrides_ratio():
    m = inputs(active_edges=10, active_vertices=5, exact_messages=7)
    assert sc_volume(m) == 2 * 7 * 4 + 3 * 10 * 4 + 5 * 4


def test_bw_ratio_shifts_threshold():
    m = inputs(active_edges=100, active_vertices=25)
    assert select_mode(m) == SC
    assert select_mode(inputs(active_edges=100, active_vertices=25, bw_ratio=10.0)) == PC


def test_full_frontier_prefers_pc_for_any_ratio():
    for r in (0.05, 0.3, 0.7, 1.0):
        m = inputs(ratio=r, active_edges=1000, active_vertices=1000, value_bytes=8)
        assert select_mode(m) == PC
