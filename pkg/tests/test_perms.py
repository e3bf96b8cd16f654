"""Permutation arithmetic and the projection onto permutations."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permsync import Permutation, compose, correlation_affinity, project_to_permutation

perm_maps = st.integers(min_value=2, max_value=7).flatmap(
    lambda m: st.permutations(list(range(m))))


def test_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation(np.array([0, 0, 1]))
    with pytest.raises(ValueError):
        Permutation(np.array([0, 2]))


def test_matrix_is_doubly_stochastic_binary():
    p = Permutation(np.array([2, 0, 1]))
    mat = p.matrix()
    assert mat.sum(axis=0).tolist() == [1, 1, 1]
    assert mat.sum(axis=1).tolist() == [1, 1, 1]
    assert np.array_equal(mat @ mat.T, np.eye(3))


def test_compose_identity_and_inverse():
    p = Permutation(np.array([3, 1, 0, 2]))
    ident = Permutation.identity(4)
    assert compose(p, ident) == p
    assert compose(ident, p) == p
    assert compose(p, p.transpose()) == ident
    assert compose(p.transpose(), p) == ident


def test_compose_matches_matrix_product():
    p = Permutation(np.array([1, 3, 0, 2]))
    q = Permutation(np.array([2, 0, 3, 1]))
    expect = p.matrix() @ q.matrix()
    assert np.array_equal(compose(p, q).matrix(), expect)


def test_compose_size_mismatch():
    with pytest.raises(ValueError):
        compose(Permutation.identity(3), Permutation.identity(4))


@given(perm_maps, st.randoms(use_true_random=False))
def test_compose_associative(map_a, rnd):
    m = len(map_a)
    p = Permutation(np.array(map_a))
    q = Permutation(np.array(rnd.sample(range(m), m)))
    r = Permutation(np.array(rnd.sample(range(m), m)))
    assert compose(compose(p, q), r) == compose(p, compose(q, r))


def test_correlation_affinity_examples():
    p = Permutation(np.array([1, 0, 2]))
    assert correlation_affinity(p, p) == 1.0
    ident2 = Permutation.identity(2)
    swap = Permutation(np.array([1, 0]))
    assert correlation_affinity(ident2, swap) == 0.0
    # a 3-cycle on columns {0,1,2} of a size-10 identity leaves 7 fixed rows
    cyc = np.arange(10)
    cyc[[0, 1, 2]] = [1, 2, 0]
    assert correlation_affinity(Permutation.identity(10), Permutation(cyc)) == pytest.approx(0.7)


@given(perm_maps, st.randoms(use_true_random=False))
def test_correlation_quantized_and_frobenius_identity(map_p, rnd):
    m = len(map_p)
    p = Permutation(np.array(map_p))
    q = Permutation(np.array(rnd.sample(range(m), m)))
    a = correlation_affinity(p, q)
    assert 0.0 <= a <= 1.0
    assert (a * m) == pytest.approx(round(a * m))
    frob2 = float(np.linalg.norm(p.matrix() - q.matrix()) ** 2)
    assert frob2 == pytest.approx(2 * m * (1 - a))
    assert (a == 1.0) == (p == q)


@pytest.mark.parametrize("m", [3, 4])
def test_distinct_permutations_agree_on_at_most_m_minus_2(m):
    perms = [Permutation(np.array(s)) for s in itertools.permutations(range(m))]
    for p in perms:
        for q in perms:
            if p != q:
                assert correlation_affinity(p, q) * m <= m - 2


def test_project_identity_and_swap():
    assert project_to_permutation(np.eye(3)) == Permutation.identity(3)
    assert project_to_permutation(np.array([[0.0, 1.0], [1.0, 0.0]])) == Permutation(np.array([1, 0]))


def test_project_matches_exhaustive_search():
    block = np.array([[3.0, 1.0, 0.0], [2.0, 4.0, 1.0], [0.0, 1.0, 5.0]])
    best = max(itertools.permutations(range(3)),
               key=lambda s: sum(block[r, c] for r, c in enumerate(s)))
    assert project_to_permutation(block).map.tolist() == list(best)


def test_project_equals_frobenius_projection():
    # argmax <P, M> is also argmin ||P - M||_F
    gen = np.random.default_rng(5)
    block = gen.standard_normal((4, 4))
    proj = project_to_permutation(block)
    d_proj = np.linalg.norm(proj.matrix() - block)
    for sigma in itertools.permutations(range(4)):
        p = Permutation(np.array(sigma))
        assert d_proj <= np.linalg.norm(p.matrix() - block) + 1e-12


def test_project_rejects_non_finite():
    with pytest.raises(ValueError):
        project_to_permutation(np.array([[np.inf, 0.0], [0.0, 1.0]]))
