import numpy as np
import pytest

import specluster as sp
from conftest import complete_graph, path_graph, two_block_benchmark_model


def write(tmp_path, text, name="edges.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_path_graph(tmp_path):
    g = sp.load_edge_list(write(tmp_path, "0 1\n1 2\n"))
    assert g.n == 3
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_load_drops_duplicates_and_self_loops(tmp_path):
    path = write(tmp_path, "0 1\n1 0\n2 2\n")
    with pytest.warns(UserWarning, match="1 duplicate.*1 self loop"):
        g = sp.load_edge_list(path)
    assert g.n == 3
    assert g.edges.tolist() == [[0, 1]]


def test_load_ignores_comments_and_blank_lines(tmp_path):
    g = sp.load_edge_list(write(tmp_path, "# header\n\n0 1\n# mid\n1 2\n"))
    assert g.num_edges == 2


def test_malformed_line_reports_number(tmp_path):
    path = write(tmp_path, "0 1\nbad line here\n")
    with pytest.raises(sp.EdgeListParseError, match="2"):
        sp.load_edge_list(path)
    path = write(tmp_path, "0 1\n1 x\n")
    with pytest.raises(sp.EdgeListParseError) as err:
        sp.load_edge_list(path)
    assert err.value.line_number == 2


def test_empty_file_is_error(tmp_path):
    with pytest.raises(sp.SpeclusterError, match="no edges"):
        sp.load_edge_list(write(tmp_path, ""))
    with pytest.raises(sp.SpeclusterError, match="no edges"):
        sp.load_edge_list(write(tmp_path, "# only comments\n"))


def test_n_hint_extends_node_count(tmp_path):
    g = sp.load_edge_list(write(tmp_path, "0 1\n"), n_hint=5)
    assert g.n == 5
    assert g.degrees.tolist() == [1, 1, 0, 0, 0]
    # hint smaller than the max index is ignored
    g = sp.load_edge_list(write(tmp_path, "0 4\n"), n_hint=2)
    assert g.n == 5


def test_line_permutation_idempotent(tmp_path):
    lines = ["0 1", "1 2", "2 3", "0 3", "1 3"]
    g1 = sp.load_edge_list(write(tmp_path, "\n".join(lines) + "\n", "a.txt"))
    g2 = sp.load_edge_list(write(tmp_path, "\n".join(reversed(lines)) + "\n", "b.txt"))
    assert np.array_equal(g1.edges, g2.edges)
    assert (g1.adjacency != g2.adjacency).nnz == 0


def test_neighbor_lists_sorted():
    g = sp.build_graph(5, [(4, 0), (2, 0), (0, 3), (1, 0)])
    assert g.neighbors(0).tolist() == [1, 2, 3, 4]
    assert g.edges.tolist() == [[0, 1], [0, 2], [0, 3], [0, 4]]
    assert g.degrees.sum() == 2 * g.num_edges


def test_save_load_roundtrip(tmp_path):
    g = sp.build_graph(6, [(0, 5), (1, 2), (3, 4), (0, 2)])
    out = tmp_path / "round.txt"
    sp.save_edge_list(g, out)
    g2 = sp.load_edge_list(out)
    assert np.array_equal(g.edges, g2.edges)


def test_build_graph_rejects_bad_edges():
    with pytest.raises(sp.SpeclusterError, match="self loop"):
        sp.build_graph(3, [(1, 1)])
    with pytest.raises(sp.SpeclusterError, match="duplicate"):
        sp.build_graph(3, [(0, 1), (1, 0)])
    with pytest.raises(sp.SpeclusterError, match="out of range"):
        sp.build_graph(2, [(0, 5)])


def test_degree_extremes():
    assert sp.degree_extremes(path_graph(3)) == (1, 2)
    assert sp.degree_extremes(complete_graph(4)) == (3, 3)


def _chernoff_upper(mu, budget):
    # smallest t with exp(-t^2 / (2 (mu + t/3))) <= budget for a Bernoulli sum
    log_inv = np.log(1.0 / budget)
    # solve t^2 - (2/3) log_inv t - 2 mu log_inv = 0
    return (2.0 / 3.0 * log_inv + np.sqrt((2.0 / 3.0 * log_inv) ** 2 + 8 * mu * log_inv)) / 2


def _chernoff_lower(mu, budget):
    return np.sqrt(2 * mu * np.log(1.0 / budget))


def test_degree_extremes_match_expected_degrees_monte_carlo():
    # Expected block degrees are 18.75 and 8.25 (row sums of B times sizes).
    # The min/max over 3000 nodes and 20 seeds must stay inside tail
    # envelopes derived from Chernoff bounds at union-bounded level 1e-3.
    model = two_block_benchmark_model()
    d_lo, d_hi = sp.population_degree_extremes(model)
    seeds = 20
    budget = 1e-3 / (seeds * model.n)
    hi_env = d_hi + _chernoff_upper(d_hi, budget)
    lo_env = max(0.0, d_lo - _chernoff_lower(d_lo, budget))
    for seed in range(seeds):
        g = sp.sample(model, seed)
        d_min, d_max = sp.degree_extremes(g)
        assert lo_env <= d_min <= d_max <= hi_env
