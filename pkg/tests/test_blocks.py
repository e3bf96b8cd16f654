"""Blockwise operators: weighted assembly, inner products, path averages."""

import numpy as np
import pytest

from permsync import (BlockMeasurement, Permutation, WeightedGraph, block_inner,
                      build_gcw, compose, squared_gcw_ratio)
from permsync.blocks import block_inner_dense, canonical_edges


def perm(*images):
    return Permutation(np.array(images))


def make_meas(n, m, blocks):
    return BlockMeasurement.from_blocks(n, m, blocks)


def truth_blocks(maps, edges):
    """Exact relative blocks P_i P_j^T from absolute maps."""
    out = {}
    for i, j in edges:
        pi, pj = Permutation(np.array(maps[i])), Permutation(np.array(maps[j]))
        out[(i, j)] = compose(pi, pj.transpose())
    return out


def dense_oracle(meas, weight_matrix):
    """Independent dense assembly via per-block Kronecker placement."""
    n, m = meas.n, meas.m
    out = np.zeros((n * m, n * m))
    for i, j in map(tuple, meas.edges):
        b = meas.block(i, j).matrix()
        out[i * m:(i + 1) * m, j * m:(j + 1) * m] = weight_matrix[i, j] * b
        out[j * m:(j + 1) * m, i * m:(i + 1) * m] = weight_matrix[i, j] * b.T
    return out


def path_average_oracle(meas, wmat, i, j, l):
    """Direct enumeration of weighted length-l walk products from i to j."""
    m = meas.m
    num = np.zeros((m, m))
    den = 0.0
    nodes = range(meas.n)

    def walk(seq):
        w = 1.0
        prod = np.eye(m)
        for a, b in zip(seq, seq[1:]):
            if not meas.has_edge(a, b) or wmat[a, b] == 0.0:
                return None
            w *= wmat[a, b]
            prod = prod @ meas.block(a, b).matrix()
        return w, prod

    import itertools
    for mids in itertools.product(nodes, repeat=l - 1):
        seq = (i, *mids, j)
        if any(a == b for a, b in zip(seq, seq[1:])):
            continue
        res = walk(seq)
        if res is None:
            continue
        w, prod = res
        num += w * prod
        den += w
    return (num / den) if den > 0 else None


def test_canonical_edges_rejects_duplicates_and_loops():
    with pytest.raises(ValueError):
        canonical_edges([(0, 0)])
    with pytest.raises(ValueError):
        canonical_edges([(0, 1), (1, 0)])


def test_measurement_symmetry_convention():
    p = perm(2, 0, 1)
    meas = make_meas(2, 3, {(0, 1): p})
    assert meas.block(0, 1) == p
    assert meas.block(1, 0) == p.transpose()
    dense = meas.dense()
    assert np.array_equal(dense, dense.T)


def test_gcw_unit_weights_equals_measurement():
    maps = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    edges = [(0, 1), (0, 2), (1, 2)]
    meas = make_meas(3, 3, truth_blocks(maps, edges))
    graph = WeightedGraph.unit(3, edges)
    gcw = build_gcw(graph, meas)
    assert np.array_equal(gcw.dense(), meas.dense())


def test_gcw_zero_weights_is_zero_operator():
    meas = make_meas(2, 2, {(0, 1): perm(1, 0)})
    graph = WeightedGraph(2, np.array([[0, 1]]), np.array([0.0]))
    assert not build_gcw(graph, meas).dense().any()


def test_gcw_scaled_path_matches_dense_oracle():
    maps = [[0, 1], [1, 0], [0, 1]]
    edges = [(0, 1), (1, 2)]
    meas = make_meas(3, 2, truth_blocks(maps, edges))
    graph = WeightedGraph(3, np.array(edges), np.array([2.0, 0.5]))
    gcw = build_gcw(graph, meas)
    assert np.array_equal(gcw.dense(), dense_oracle(meas, graph.weight_matrix()))
    # entrywise equality of the assembled operator, not just approximate
    assert (gcw.dense() == dense_oracle(meas, graph.weight_matrix())).all()


def test_gcw_requires_measurement_support():
    meas = make_meas(3, 2, {(0, 1): perm(1, 0)})
    graph = WeightedGraph.unit(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        build_gcw(graph, meas)


def test_block_inner_permutation_blocks():
    maps = [[0, 1, 2, 3], [2, 0, 3, 1], [3, 2, 1, 0]]
    edges = [(0, 1), (0, 2), (1, 2)]
    meas = make_meas(3, 4, truth_blocks(maps, edges))
    gcw = build_gcw(WeightedGraph.unit(3, edges), meas)
    table = block_inner(gcw, meas)
    assert all(table.value(i, j) == pytest.approx(4.0) for i, j in edges)


def test_block_inner_orthogonal_support():
    a = make_meas(2, 2, {(0, 1): perm(0, 1)})
    b = make_meas(2, 2, {(0, 1): perm(1, 0)})
    gcw = build_gcw(WeightedGraph.unit(2, [(0, 1)]), a)
    assert block_inner(gcw, b).value(0, 1) == 0.0


def test_block_inner_matches_dense_computation():
    gen = np.random.default_rng(0)
    edges = [(0, 1), (0, 2), (1, 2), (2, 3), (1, 3)]
    blocks = {e: Permutation(gen.permutation(3)) for e in edges}
    meas = make_meas(4, 3, blocks)
    w = WeightedGraph(4, np.array(edges), gen.random(5) + 0.5)
    gcw = build_gcw(w, meas)
    table = block_inner(gcw, meas)
    ref = block_inner_dense(gcw.dense(), meas.dense(), 4, 3)
    for i, j in edges:
        assert table.value(i, j) == pytest.approx(ref[i, j], abs=1e-12)


def test_path_average_noiseless_triangle_recovers_truth():
    maps = [[1, 0, 2], [2, 1, 0], [0, 2, 1]]
    edges = [(0, 1), (0, 2), (1, 2)]
    blocks = truth_blocks(maps, edges)
    meas = make_meas(3, 3, blocks)
    gcw = build_gcw(WeightedGraph.unit(3, edges), meas)
    table = squared_gcw_ratio(gcw, l=2)
    assert table.has_path.all()
    for e, (i, j) in enumerate(map(tuple, meas.edges)):
        assert np.array_equal(table.blocks[e], blocks[(i, j)].matrix())


def test_path_average_zeroed_bad_edges_recovers_truth():
    # 4-node instance with one corrupted edge; zero its weight
    gen = np.random.default_rng(3)
    maps = [gen.permutation(3).tolist() for _ in range(4)]
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    blocks = truth_blocks(maps, edges)
    blocks[(0, 1)] = Permutation(np.array([1, 2, 0]))  # corrupt
    meas = make_meas(4, 3, blocks)
    w = np.ones(6)
    w[meas.edge_index[(0, 1)]] = 0.0
    graph = WeightedGraph(4, meas.edges, w)
    gcw = build_gcw(graph, meas)
    table = squared_gcw_ratio(gcw, l=2)
    truth = truth_blocks(maps, edges)
    wmat = graph.weight_matrix()
    for e, (i, j) in enumerate(map(tuple, meas.edges)):
        oracle = path_average_oracle(meas, wmat, i, j, 2)
        if oracle is None:
            assert not table.has_path[e]
            continue
        assert table.has_path[e]
        assert np.allclose(table.blocks[e], oracle, atol=1e-12)
        assert np.allclose(table.blocks[e], truth[(i, j)].matrix(), atol=1e-12)


def test_path_average_l3_on_complete_noiseless():
    gen = np.random.default_rng(9)
    maps = [gen.permutation(4).tolist() for _ in range(5)]
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    blocks = truth_blocks(maps, edges)
    meas = make_meas(5, 4, blocks)
    graph = WeightedGraph.unit(5, edges)
    gcw = build_gcw(graph, meas)
    table = squared_gcw_ratio(gcw, l=3)
    wmat = graph.weight_matrix()
    for e, (i, j) in enumerate(map(tuple, meas.edges)):
        assert np.allclose(table.blocks[e], blocks[(i, j)].matrix(), atol=1e-12)
        oracle = path_average_oracle(meas, wmat, i, j, 3)
        assert np.allclose(table.blocks[e], oracle, atol=1e-10)


def test_path_average_rows_sum_to_one_and_range():
    gen = np.random.default_rng(11)
    edges = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    blocks = {e: Permutation(gen.permutation(4)) for e in edges}
    meas = make_meas(6, 4, blocks)
    graph = WeightedGraph(6, meas.edges, gen.random(len(edges)))
    table = squared_gcw_ratio(build_gcw(graph, meas), l=2)
    ok = table.has_path
    assert table.blocks[ok].min() >= 0.0
    assert table.blocks[ok].max() <= 1.0 + 1e-12
    assert np.allclose(table.blocks[ok].sum(axis=2), 1.0, atol=1e-9)


def test_path_average_fallback_block():
    # path graph 0-1-2: edge (0,1) has no 2-path (no common neighbour)
    maps = [[0, 1], [1, 0], [0, 1]]
    edges = [(0, 1), (1, 2)]
    meas = make_meas(3, 2, truth_blocks(maps, edges))
    gcw = build_gcw(WeightedGraph.unit(3, edges), meas)
    fb = np.full((2, 2), 0.5)
    table = squared_gcw_ratio(gcw, l=2, fallback=fb)
    assert not table.has_path.any()
    assert np.array_equal(table.blocks[0], fb)
