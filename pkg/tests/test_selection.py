import math

import numpy as np
import pytest

from negood import EmbeddingMatrix, ScoreConfig, representativeness, select_and_partition
from negood.errors import AlphaTooLarge, LNotAvailable, TooFewRows
from negood.selection import GROUPING_RANDOM, knn_indices

from helpers import unit_matrix


def brute_force_rep(data, alpha):
    """Independent oracle: explicit distances, full sort per row."""
    data = data.astype(np.float64)
    n = len(data)
    out = np.empty(n)
    for i in range(n):
        d = np.array([np.sum((data[i] - data[j]) ** 2) for j in range(n)])
        d[i] = np.inf
        nearest = sorted(range(n), key=lambda j: (d[j], j))[:alpha]
        out[i] = -math.log(max(d[nearest].sum(), 1e-12))
    return out


TRIANGLE = EmbeddingMatrix(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]))


def test_hand_enumerated_triangle():
    # pairwise squared distances: d(e1,e2)=2, d(e1,e3)=4, d(e2,e3)=2
    rep = representativeness(TRIANGLE, alpha=1)
    np.testing.assert_allclose(rep, [-math.log(2)] * 3, rtol=1e-12)


def test_neighbor_tie_resolves_to_lower_index():
    # e2 is equidistant from e1 and e3
    nn = knn_indices(TRIANGLE, alpha=1)
    assert nn.tolist() == [[1], [0], [1]]


def test_duplicate_rows_clamp_to_floor():
    m = EmbeddingMatrix(np.array([[1.0, 0.0], [1.0, 0.0]]))
    rep = representativeness(m, alpha=1)
    np.testing.assert_allclose(rep, [-math.log(1e-12)] * 2, rtol=1e-12)


def test_matches_brute_force_and_outlier_ranks_last():
    rng = np.random.default_rng(20)
    clustered = rng.standard_normal((19, 6)) * 0.05 + np.r_[1.0, np.zeros(5)]
    outlier = -np.r_[1.0, np.zeros(5)]
    data = np.vstack([clustered, outlier])
    data /= np.linalg.norm(data, axis=1, keepdims=True)
    corpus = EmbeddingMatrix(data)

    rep = representativeness(corpus, alpha=3)
    np.testing.assert_allclose(rep, brute_force_rep(corpus.data, 3), rtol=1e-10)
    assert rep[-1] < rep[:-1].min()


def test_knn_by_euclidean_equals_knn_by_cosine():
    rng = np.random.default_rng(77)
    corpus = unit_matrix(rng, 40, 8)
    data = corpus.data.astype(np.float64)
    by_euclid = knn_indices(corpus, alpha=5)
    cos = data @ data.T
    for i in range(40):
        d = 2.0 - 2.0 * cos[i]  # |a-b|^2 on unit vectors
        d[i] = np.inf
        by_cos = sorted(range(40), key=lambda j: (d[j], j))[:5]
        assert by_euclid[i].tolist() == by_cos


def test_knn_argument_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(TooFewRows):
        representativeness(unit_matrix(rng, 1, 4), alpha=1)
    with pytest.raises(AlphaTooLarge):
        representativeness(unit_matrix(rng, 5, 4), alpha=5)


class TestSelectAndPartition:
    def test_remainder_rule(self):
        rng = np.random.default_rng(8)
        corpus = unit_matrix(rng, 9, 4)
        res = select_and_partition(corpus, ScoreConfig(L=5, B=2, alpha=2))
        assert [len(g) for g in res.groups] == [2, 2]
        union = np.concatenate(res.groups)
        assert len(set(union.tolist())) == 4  # one selected index discarded
        assert set(union).issubset(set(res.selected.tolist()))

    def test_single_group_takes_everything(self):
        rng = np.random.default_rng(9)
        corpus = unit_matrix(rng, 12, 4)
        res = select_and_partition(corpus, ScoreConfig(L=12, B=1, alpha=3))
        assert len(res.groups) == 1
        assert sorted(res.groups[0].tolist()) == sorted(range(12))

    def test_selection_dominance_on_seeded_corpus(self):
        rng = np.random.default_rng(200)
        corpus = unit_matrix(rng, 200, 16)
        res = select_and_partition(corpus, ScoreConfig(L=20, B=4, alpha=5))

        # full-sort oracle for the reorder
        oracle = sorted(range(200), key=lambda i: (-res.rep_scores[i], i))
        assert res.order.tolist() == oracle

        chosen = res.rep_scores[res.selected]
        rest = np.delete(res.rep_scores, res.selected)
        assert chosen.min() >= rest.max()

    def test_order_is_a_permutation(self):
        rng = np.random.default_rng(4)
        corpus = unit_matrix(rng, 50, 6)
        res = select_and_partition(corpus, ScoreConfig(L=10, B=2, alpha=3))
        assert sorted(res.order.tolist()) == list(range(50))
        assert np.all(np.diff(res.rep_scores[res.order]) <= 1e-15)

    def test_reorder_ties_break_by_ascending_index(self):
        row = np.array([1.0, 0.0, 0.0])
        data = np.array([row, [0.0, 1.0, 0.0], row, [0.0, 1.0, 0.0]])
        res = select_and_partition(
            EmbeddingMatrix(data), ScoreConfig(L=4, B=2, alpha=1)
        )
        # both duplicate pairs clamp to the same rep value; index order wins
        assert res.order.tolist() == [0, 1, 2, 3]

    def test_deterministic(self):
        rng = np.random.default_rng(31)
        corpus = unit_matrix(rng, 60, 8)
        cfg = ScoreConfig(L=30, B=3, alpha=4)
        a = select_and_partition(corpus, cfg)
        b = select_and_partition(corpus, cfg)
        assert np.array_equal(a.order, b.order)
        assert all(np.array_equal(x, y) for x, y in zip(a.groups, b.groups))

    def test_random_grouping_is_seeded_and_disjoint(self):
        rng = np.random.default_rng(13)
        corpus = unit_matrix(rng, 40, 8)
        cfg = ScoreConfig(L=20, B=4, alpha=3, seed=5)
        a = select_and_partition(corpus, cfg, grouping=GROUPING_RANDOM)
        b = select_and_partition(corpus, cfg, grouping=GROUPING_RANDOM)
        assert all(np.array_equal(x, y) for x, y in zip(a.groups, b.groups))
        assert [len(g) for g in a.groups] == [5, 5, 5, 5]
        union = np.concatenate(a.groups)
        assert len(set(union.tolist())) == 20

    def test_l_not_available(self):
        rng = np.random.default_rng(2)
        with pytest.raises(LNotAvailable):
            select_and_partition(unit_matrix(rng, 5, 4), ScoreConfig(L=6, B=1, alpha=2))
