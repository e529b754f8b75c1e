import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csrnet import _kernels
from csrnet.communities import louvain, modularity
from csrnet.errors import EmptyGraph, InvalidPartition


def brute_modularity(g: nx.Graph, assignment) -> float:
    """Double loop over node pairs: (1/2m) sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j]."""
    nodes = list(g.nodes)
    m = g.number_of_edges()
    total = 0.0
    for a in nodes:
        for b in nodes:
            if assignment[a] == assignment[b]:
                total += (1.0 if g.has_edge(a, b) else 0.0) - g.degree(a) * g.degree(b) / (2 * m)
    return total / (2 * m)


graphs = st.builds(lambda n, p, s: nx.gnp_random_graph(n, p, seed=s),
                   st.integers(2, 25), st.floats(0.05, 0.6), st.integers(0, 10_000))


def test_two_joined_cliques():
    g = nx.barbell_graph(5, 0)
    part = louvain(g, seed=0)
    assert sorted(map(sorted, part.communities())) == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
    # 21 edges, 10 inside each clique, both clique degree sums equal 21
    assert part.modularity == pytest.approx(2 * (10 / 21 - 0.25), abs=1e-12)


@given(graphs, st.integers(0, 5))
def test_modularity_matches_brute_force(g, k):
    if g.number_of_edges() == 0:
        return
    rng = np.random.default_rng(k)
    assignment = {n: int(rng.integers(0, 3)) for n in g}
    assert abs(modularity(g, assignment) - brute_modularity(g, assignment)) <= 1e-12
    assert modularity(g, assignment) == pytest.approx(
        nx.community.modularity(g, [{n for n in g if assignment[n] == c} for c in set(assignment.values())]),
        abs=1e-12)


@given(graphs, st.integers(0, 100))
def test_history_non_decreasing_and_final_q(g, seed):
    part = louvain(g, seed=seed)
    h = np.array(part.history)
    assert (np.diff(h) >= -1e-12).all()
    if g.number_of_edges():
        assert part.modularity == pytest.approx(brute_modularity(g, part.assignment), abs=1e-12)
        assert part.modularity >= -1e-12


@given(graphs, st.integers(0, 100))
def test_seeded_runs_repeat(g, seed):
    a, b = louvain(g, seed=seed), louvain(g, seed=seed)
    assert a.assignment == b.assignment and a.history == b.history


def test_ids_are_dense_and_ordered():
    g = nx.disjoint_union(nx.complete_graph(4), nx.complete_graph(4))
    part = louvain(g, seed=3)
    assert part.assignment[0] == 0
    assert sorted(set(part.assignment.values())) == list(range(part.n_communities))


def test_backends_give_identical_partitions():
    if len(_kernels.backends()) < 2:
        pytest.skip("single backend")
    g = nx.ring_of_cliques(12, 5)
    g.add_edges_from(nx.gnp_random_graph(60, 0.03, seed=1).edges())
    for seed in range(5):
        assert louvain(g, seed, "python").assignment == louvain(g, seed, "compiled").assignment


def test_quality_close_to_networkx():
    g = nx.ring_of_cliques(30, 5)
    ours = louvain(g, seed=0).modularity
    ref = max(nx.community.modularity(g, nx.community.louvain_communities(g, seed=s)) for s in range(3))
    assert ours >= ref - 0.01


def test_degenerate_inputs():
    with pytest.raises(EmptyGraph):
        louvain(nx.Graph())
    g = nx.empty_graph(3)
    part = louvain(g)
    assert part.modularity == 0.0 and part.n_communities == 3
    with pytest.raises(InvalidPartition):
        modularity(nx.path_graph(3), {0: 0, 1: 0})


def test_partition_csv(tmp_path):
    part = louvain(nx.barbell_graph(4, 0), seed=1)
    part.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "node_label,community_id" and len(lines) == 9
