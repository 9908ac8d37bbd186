import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linemf.errors import GraphFormatError, ValidationError
from linemf.graph import (
    AliasSampler,
    degree_profile,
    dump_edge_list,
    from_edges,
    load_edge_list,
    make_edge_sampler,
    make_negative_sampler,
)

N_DRAWS = 100_000


def load(text, **kw):
    return load_edge_list(io.StringIO(text), **kw)


def assert_within_binomial(counts, probs, n_draws, n_sigma=3.0):
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    sd = np.sqrt(n_draws * probs * (1 - probs))
    assert np.all(np.abs(counts - n_draws * probs) <= n_sigma * sd + 1e-12), (counts / n_draws, probs)


class TestLoad:
    def test_single_undirected_edge(self):
        g = load("0 1 1.0\n")
        assert (g.n_vertices, g.n_edges, g.directed) == (2, 1, False)
        assert list(g.edges()) == [(0, 1, 1.0)]

    def test_duplicates_aggregate(self):
        g = load("0 1 2.0\n0 1 3.0\n", directed=True)
        assert list(g.edges()) == [(0, 1, 5.0)]

    def test_undirected_orientations_merge(self):
        g = load("1 0 2\n0 1 0.5\n")
        assert list(g.edges()) == [(0, 1, 2.5)]

    def test_directed_orientations_stay_apart(self):
        g = load("1 0 2\n0 1 0.5\n", directed=True)
        assert list(g.edges()) == [(0, 1, 0.5), (1, 0, 2.0)]

    def test_self_loop_rejected(self):
        with pytest.raises(ValidationError, match="self-loop"):
            load("0 0 1.0\n")

    def test_self_loop_dropped(self):
        g = load("0 0 1.0\n0 1\n", self_loop_policy="drop")
        assert list(g.edges()) == [(0, 1, 1.0)]

    def test_comments_blanks_default_weight(self):
        g = load("# header\n\n  0 2\n# trailing\n")
        assert g.n_vertices == 3
        assert list(g.edges()) == [(0, 2, 1.0)]

    @pytest.mark.parametrize(
        "text, lineno",
        [("0 1\nfoo bar\n", 2), ("0 1 2 3\n", 1), ("0\n", 1), ("# c\n0 1 x\n", 2), ("0 1.5 1\n", 1)],
    )
    def test_parse_errors_carry_line_number(self, text, lineno):
        with pytest.raises(GraphFormatError) as info:
            load(text)
        assert info.value.lineno == lineno

    @pytest.mark.parametrize("w", ["0", "-1", "nan", "inf"])
    def test_bad_weights(self, w):
        with pytest.raises(ValidationError):
            load(f"0 1 {w}\n")

    def test_negative_id(self):
        with pytest.raises(ValidationError):
            load("-1 2\n")

    def test_graph_is_immutable(self):
        g = load("0 1\n")
        with pytest.raises(ValueError):
            g.weight[0] = 3.0


edge_lists = st.lists(
    st.tuples(
        st.integers(0, 12),
        st.integers(0, 12),
        st.floats(0.01, 100, allow_nan=False, allow_infinity=False),
    ),
    min_size=1,
    max_size=40,
)


@settings(max_examples=60, deadline=None)
@given(edge_lists, st.booleans())
def test_dump_reload_is_identity(edges, directed):
    text = "".join(f"{i} {j} {w!r}\n" for i, j, w in edges)
    g = load(text, directed=directed, self_loop_policy="drop")
    buf = io.StringIO()
    dump_edge_list(g, buf)
    buf.seek(0)
    assert load_edge_list(buf, directed=directed) == g


class TestDegrees:
    def test_directed_example(self):
        p = degree_profile(load("0 1 2\n2 1 3\n", directed=True))
        assert p.in_degree[1] == 5
        assert p.out_degree[0] == 2
        assert p.total_in == 5

    def test_undirected_path(self):
        p = degree_profile(load("0 1\n1 2\n"))
        assert p.undirected_degree.tolist() == [1, 2, 1]
        assert p.total_undirected == 4

    def test_isolated_vertex(self):
        g = from_edges([(0, 1, 1.0)], directed=True, n_vertices=4)
        p = degree_profile(g)
        for arr in (p.in_degree, p.out_degree, p.undirected_degree):
            assert arr[3] == 0

    @settings(max_examples=60, deadline=None)
    @given(edge_lists, st.booleans())
    def test_totals(self, edges, directed):
        g = from_edges(edges, directed=directed, self_loop_policy="drop")
        p = degree_profile(g)
        total_w = math.fsum(g.weight.tolist())
        for arr in (p.in_degree, p.out_degree, p.undirected_degree):
            assert np.all(arr >= 0)
        if directed:
            assert p.total_in == pytest.approx(total_w, rel=1e-9)
            assert p.total_out == pytest.approx(total_w, rel=1e-9)
        else:
            assert p.total_undirected == pytest.approx(2 * total_w, rel=1e-9)


weight_vectors = st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=60).filter(
    lambda w: sum(w) > 0
)


class TestAliasSampler:
    @settings(max_examples=200, deadline=None)
    @given(weight_vectors)
    def test_tables_encode_distribution_exactly(self, weights):
        s = AliasSampler(weights)
        expected = np.asarray(weights) / np.sum(weights)
        np.testing.assert_allclose(s.exact_probabilities(), expected, rtol=0, atol=1e-12)

    def test_zero_weight_never_drawn(self):
        s = AliasSampler([5.0, 0.0], seed=1)
        assert not np.any(s.draw(N_DRAWS) == 1)

    def test_singleton(self):
        s = AliasSampler([2.5], seed=1)
        assert np.all(s.draw(1000) == 0)
        assert s.draw() == 0

    def test_scalar_and_vector_draws_in_range(self):
        s = AliasSampler([1, 0, 2, 0, 3], seed=3)
        assert {s.draw() for _ in range(200)} <= {0, 2, 4}

    def test_seeded_handles_agree(self):
        s = AliasSampler([1, 2, 3, 4])
        a = s.with_seed(11).draw(500)
        b = s.with_seed(11).draw(500)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, s.with_seed(12).draw(500))

    @pytest.mark.parametrize("bad", [[], [0, 0], [1, -1], [1, float("nan")]])
    def test_invalid_weights(self, bad):
        with pytest.raises(ValidationError):
            AliasSampler(bad)


class TestNegativeSampler:
    def test_unigram_frequencies(self):
        p = degree_profile(from_edges([(0, 1, 1.0), (1, 0, 3.0)], directed=True))
        # in-degrees are [3, 1]
        s = make_negative_sampler(p, "in_degree", 1.0, seed=5)
        counts = np.bincount(s.draw(N_DRAWS), minlength=2)
        assert_within_binomial(counts, [0.75, 0.25], N_DRAWS)

    def test_degrees_one_three(self):
        g = from_edges([(0, 2, 1.0), (1, 2, 3.0)], directed=False)
        p = degree_profile(g)
        s = AliasSampler(p.undirected_degree[:2], seed=2)
        counts = np.bincount(s.draw(N_DRAWS), minlength=2)
        assert_within_binomial(counts, [0.25, 0.75], N_DRAWS)

    def test_in_degree_mode_ignores_sources(self):
        p = degree_profile(from_edges([(0, 1, 5.0)], directed=True))
        s = make_negative_sampler(p, "in_degree", seed=0)
        assert np.all(s.draw(1000) == 1)

    def test_exponent_three_quarters(self):
        p = degree_profile(from_edges([(0, 1, 1.0), (1, 2, 15.0)], directed=False))
        s = make_negative_sampler(p, "undirected_degree", 0.75)
        deg = np.array([1.0, 16.0, 15.0])
        np.testing.assert_allclose(s.exact_probabilities(), deg**0.75 / np.sum(deg**0.75), atol=1e-12)

    def test_all_zero_rejected(self):
        p = degree_profile(from_edges([(0, 1, 1.0)], directed=True))
        p_in_zero = type(p)(p.out_degree, np.zeros(2), p.undirected_degree, True)
        with pytest.raises(ValidationError):
            make_negative_sampler(p_in_zero, "in_degree")

    @pytest.mark.parametrize("exponent", [0.0, -0.5, 1.5])
    def test_exponent_range(self, exponent):
        p = degree_profile(from_edges([(0, 1, 1.0)], directed=False))
        with pytest.raises(ValidationError):
            make_negative_sampler(p, "undirected_degree", exponent)


class TestEdgeSampler:
    def test_weighted_frequencies(self):
        g = from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 2.0)], directed=True)
        counts = np.bincount(make_edge_sampler(g, seed=9).draw(N_DRAWS), minlength=3)
        assert_within_binomial(counts, [0.25, 0.25, 0.5], N_DRAWS)

    def test_uniform_weights(self):
        g = from_edges([(i, i + 1, 2.0) for i in range(8)], directed=True)
        counts = np.bincount(make_edge_sampler(g, seed=4).draw(N_DRAWS), minlength=8)
        assert_within_binomial(counts, np.full(8, 1 / 8), N_DRAWS)

    def test_single_edge(self):
        g = from_edges([(3, 4, 0.1)], directed=False)
        assert np.all(make_edge_sampler(g, seed=0).draw(100) == 0)

    def test_empty_graph(self):
        g = from_edges([], directed=True, n_vertices=3)
        with pytest.raises(ValidationError):
            make_edge_sampler(g)
