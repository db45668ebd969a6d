# pylint: disable=missing-docstring

import pytest
import numpy as np
from test.mock_data import EDGE_LINES, STAR, make_graph
from rumor_block.graph import (
    WeightingModel, build_graph, degree_top_k, generate_power_law, load_edge_list,
    power_law_weights, read_edge_list, write_edge_list
)

def test_build_graph_csr():
    g = make_graph(4, [(2, 0), (0, 3), (0, 1), (3, 1)], p=0.5)
    assert (g.n, g.m) == (4, 4)
    # edge ids follow (src, dst) order
    np.testing.assert_array_equal(g.src, [0, 0, 2, 3])
    np.testing.assert_array_equal(g.dst, [1, 3, 0, 1])
    np.testing.assert_array_equal(g.out_degree(), [2, 0, 1, 1])
    np.testing.assert_array_equal(g.in_degree(), [1, 2, 0, 1])

    eids, srcs, probs = g.in_edges(1)
    assert sorted(srcs.tolist()) == [0, 3]
    np.testing.assert_array_equal(g.dst[eids], [1, 1])
    np.testing.assert_array_equal(probs, [0.5, 0.5])

    targets, _ = g.out_edges(0)
    assert targets.tolist() == [1, 3]
    assert g.out_adj[0] == [(1, 0.5), (3, 0.5)]
    assert sorted(g.in_adj[1]) == [(0, 0.5), (3, 0.5)]

def test_gather():
    g = make_graph(4, [(2, 0), (0, 3), (0, 1), (3, 1)])
    eids, counts = g.gather_out([0, 1, 3])
    assert counts.tolist() == [2, 0, 1]
    assert g.dst[eids].tolist() == [1, 3, 1]
    assert sorted(g.src[g.gather_in([1, 0])].tolist()) == [0, 2, 3]
    assert g.gather_in([2]).size == 0

def test_graph_arrays_are_read_only():
    g = make_graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        g.prob[0] = 0.3

def test_build_graph_errors():
    with pytest.raises(ValueError):
        build_graph(2, [0], [0], [0.5])
    with pytest.raises(ValueError):
        build_graph(2, [0, 0], [1, 1], [0.5, 0.5])
    with pytest.raises(ValueError):
        build_graph(2, [0], [2], [0.5])
    with pytest.raises(ValueError):
        build_graph(2, [0], [1], [1.5])
    with pytest.raises(ValueError):
        build_graph(2, [0, 1], [1], [0.5])

def test_weighting_model_parse():
    assert WeightingModel.parse('cp') == WeightingModel.constant(0.1)
    assert WeightingModel.parse('CP:0.05').p == 0.05
    assert WeightingModel.parse('wc').kind == 'wc'
    assert WeightingModel.parse('file').kind == 'file'
    assert WeightingModel.parse('cp').label == 'CP'
    assert WeightingModel.parse('cp:0.05').label == 'CP0.05'
    assert WeightingModel.parse('wc').label == 'WC'
    for bad in ('lt', 'cp:x', 'cp:2', 'wc:1'):
        with pytest.raises(ValueError):
            WeightingModel.parse(bad)

def test_read_edge_list_constant():
    g = read_edge_list(EDGE_LINES, WeightingModel.constant(0.2))
    # labels 10, 20, 30, 40 -> 0..3; self-loop kept only as a node
    assert g.n == 4
    assert g.labels.tolist() == [10, 20, 30, 40]
    assert g.m == 3
    np.testing.assert_allclose(g.prob, 0.2)
    assert g.index_of([40, 10]).tolist() == [3, 0]
    assert g.label_of([1, 2]) == [20, 30]

def test_read_edge_list_file_probabilities():
    g = read_edge_list(['1 2 0.5', '2 3 0.25', '1 2 0.9'], WeightingModel.from_file())
    # first occurrence wins
    assert g.prob.tolist() == [0.5, 0.25]
    with pytest.raises(RuntimeError) as err:
        read_edge_list(['1 2 0.5', '2 3'], WeightingModel.from_file())
    assert 'line 2' in str(err.value)

def test_read_edge_list_weighted_cascade():
    g = read_edge_list(['0 2', '1 2', '2 0', '0 2'], WeightingModel.weighted_cascade())
    eids, _, probs = g.in_edges(2)
    assert len(eids) == 2
    np.testing.assert_allclose(probs, [0.5, 0.5])
    np.testing.assert_allclose(g.in_edges(0)[2], [1.0])

def test_read_edge_list_errors():
    with pytest.raises(RuntimeError):
        read_edge_list(['# nothing here', ''], WeightingModel.constant())
    with pytest.raises(RuntimeError):
        read_edge_list(['0 1', 'bad line'], WeightingModel.constant())

def test_index_of_unknown_label():
    g = read_edge_list(EDGE_LINES, WeightingModel.constant())
    with pytest.raises(RuntimeError) as err:
        g.index_of([10, 99])
    assert '99' in str(err.value)

def test_write_then_load(tmp_path):
    g = make_graph(5, [(0, 1, 0.25), (1, 2, 0.125), (3, 1, 1.0)])
    path = tmp_path / 'g.txt'
    write_edge_list(g, str(path))
    h = load_edge_list(str(path), WeightingModel.from_file())
    assert h.n == 5
    np.testing.assert_array_equal(h.src, g.src)
    np.testing.assert_array_equal(h.dst, g.dst)
    np.testing.assert_allclose(h.prob, g.prob)
    assert path.read_text().splitlines()[-1] == '4 4 0.000000'

def test_load_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_edge_list(str(tmp_path / 'absent.txt'), WeightingModel.constant())

def test_power_law_weights():
    w = power_law_weights(2500, 20.8, 2.5)
    assert w[0] <= np.sqrt(w.sum()) + 1e-9
    assert abs(w.mean() - 20.8) < 1e-9
    assert np.all(np.diff(w) <= 0)

def test_generate_power_law():
    g = generate_power_law(2500, 10.4, 2.5, seed=7)
    assert g.n == 2500
    assert 0.85 * 2500 * 10.4 < g.m < 1.15 * 2500 * 10.4
    np.testing.assert_allclose(g.prob, 0.1)
    deg = g.out_degree() + g.in_degree()
    assert deg.max() > 5 * deg.mean()

    again = generate_power_law(2500, 10.4, 2.5, seed=7)
    np.testing.assert_array_equal(g.src, again.src)
    np.testing.assert_array_equal(g.dst, again.dst)

def test_generate_power_law_weighted_cascade():
    g = generate_power_law(300, 4, seed=1, model=WeightingModel.weighted_cascade())
    has_in = g.in_degree() > 0
    sums = np.bincount(g.dst, weights=g.prob, minlength=g.n)
    np.testing.assert_allclose(sums[has_in], 1.0)

def test_generate_power_law_errors():
    with pytest.raises(ValueError):
        generate_power_law(1, 10.4)
    with pytest.raises(ValueError):
        generate_power_law(100, 0)
    with pytest.raises(ValueError):
        generate_power_law(100, 3, exponent=1.0)
    with pytest.raises(ValueError):
        generate_power_law(100, 3, model=WeightingModel.from_file())

def test_degree_top_k():
    # node 0 has out-degree 3; nodes 2 and 6 tie at 1, lower id first
    assert degree_top_k(STAR, 3) == [0, 2, 6]
    assert degree_top_k(STAR, 1, direction='in') == [3]
    assert degree_top_k(STAR, 2, direction='total') == [0, 2]
    with pytest.raises(ValueError):
        degree_top_k(STAR, 0)
    with pytest.raises(ValueError):
        degree_top_k(STAR, 10)
    with pytest.raises(ValueError):
        degree_top_k(STAR, 1, direction='both')

def test_degree_top_k_matches_full_sort():
    g = generate_power_law(2500, 10.4, 2.5, seed=7)
    for direction, deg in (('out', g.out_degree()), ('in', g.in_degree()),
                           ('total', g.out_degree() + g.in_degree())):
        oracle = sorted(range(g.n), key=lambda v, deg=deg: (-int(deg[v]), v))[:20]
        assert degree_top_k(g, 20, direction) == oracle
