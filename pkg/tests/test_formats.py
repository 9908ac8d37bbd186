import numpy as np
import pytest

from _graphs import random_connected_graph
from linemf.errors import ValidationError
from linemf.formats import MAGIC, load_embeddings, save_embeddings
from linemf.linkpred import auc, sample_non_edges, split_edges
from linemf.trainer import EmbeddingSet


@pytest.mark.parametrize("with_context", [True, False])
def test_binary_round_trip_is_lossless(tmp_path, rng, with_context):
    e = EmbeddingSet(rng.normal(size=(7, 3)), rng.normal(size=(7, 3)) if with_context else None)
    path = tmp_path / "emb.bin"
    assert save_embeddings(e, path) == [str(path)]
    assert path.read_bytes()[:8] == MAGIC
    assert load_embeddings(path) == e


def test_text_format(tmp_path):
    e = EmbeddingSet(np.array([[1.0, -0.123456789], [3e-7, 2.0]]), np.array([[0.5, 0.5], [1.0, 1.0]]))
    path = tmp_path / "emb.txt"
    written = save_embeddings(e, path)
    assert written == [str(path), str(path) + ".ctx"]
    lines = path.read_text().splitlines()
    assert lines == ["2 2", "0 1 -0.123457", "1 3e-07 2"]
    back = load_embeddings(path)
    np.testing.assert_allclose(back.vertex_vectors, e.vertex_vectors, rtol=5e-6)
    np.testing.assert_array_equal(back.context_vectors, e.context_vectors)


def test_text_without_context(tmp_path, rng):
    e = EmbeddingSet(rng.normal(size=(4, 2)))
    path = tmp_path / "v.emb"
    save_embeddings(e, path)
    assert load_embeddings(path).context_vectors is None


def test_text_missing_vertex(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 1\n0 1.0\n1 2.0\n")
    with pytest.raises(ValidationError):
        load_embeddings(path)


def test_binary_truncated(tmp_path, rng):
    path = tmp_path / "e.bin"
    save_embeddings(EmbeddingSet(rng.normal(size=(3, 2))), path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValidationError):
        load_embeddings(path)


class TestLinkPred:
    def test_perfect_ranking(self):
        assert auc([3.0, 4.0, 5.0], [0.0, 1.0, 2.9]) == 1.0
        assert auc([0.0], [1.0]) == 0.0
        assert auc([1.0], [1.0]) == 0.5

    def test_random_scores_near_half(self, rng):
        # 2,000 x 2,000 comparisons; the Mann-Whitney sd is about 0.006
        pos, neg = rng.normal(size=2000), rng.normal(size=2000)
        assert abs(auc(pos, neg) - 0.5) <= 0.05

    def test_auc_matches_pairwise_count(self, rng):
        pos, neg = rng.integers(0, 5, 40).astype(float), rng.integers(0, 5, 30).astype(float)
        brute = np.mean([(p > q) + 0.5 * (p == q) for p in pos for q in neg])
        assert auc(pos, neg) == pytest.approx(brute, abs=1e-12)

    def test_split_is_deterministic_and_disjoint(self, rng):
        g = random_connected_graph(rng, 30, directed=False)
        tr1, ho1 = split_edges(g, 0.2, seed=4)
        tr2, ho2 = split_edges(g, 0.2, seed=4)
        assert tr1 == tr2 and np.array_equal(ho1, ho2)
        assert tr1.n_edges + len(ho1) == g.n_edges
        assert not {tuple(p) for p in ho1.tolist()} & {(i, j) for i, j, _ in tr1.edges()}

    def test_split_needs_edges_left(self):
        from linemf.graph import from_edges

        g = from_edges([(0, 1), (1, 2)], directed=False)
        with pytest.raises(ValidationError):
            split_edges(g, 0.9)

    def test_non_edges(self, rng):
        g = random_connected_graph(rng, 15, directed=True)
        pairs = sample_non_edges(g, 200, seed=1)
        edges = {(i, j) for i, j, _ in g.edges()}
        assert len(pairs) == 200
        assert all(i != j and (i, j) not in edges for i, j in pairs.tolist())
