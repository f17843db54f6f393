import numpy as np

from clique import adjacency_from_matrix, degeneracy_order, is_clique, max_clique


def graph(vertices, edges):
    matrix = np.zeros((vertices, vertices), dtype=bool)
    for a, b in edges:
        matrix[a, b] = matrix[b, a] = True
    return adjacency_from_matrix(matrix)


# triangle 0-1-2 with a pendant 3 and a separate edge 4-5
SMALL = graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (4, 5)])


def test_adjacency_ignores_the_diagonal():
    adjacency = adjacency_from_matrix(np.ones((3, 3), dtype=bool))
    assert adjacency == [0b110, 0b101, 0b011]


def test_max_clique_small_graph():
    result = max_clique(SMALL)
    assert result.clique == [0, 1, 2]
    assert result.completed
    assert is_clique(SMALL, result.clique)


def test_max_clique_respects_candidates():
    result = max_clique(SMALL, candidates=0b111000)
    assert result.size == 2
    assert result.clique == [4, 5]


def test_complete_graph():
    adjacency = graph(7, [(a, b) for a in range(7) for b in range(a + 1, 7)])
    assert max_clique(adjacency).size == 7


def test_empty_candidate_set():
    result = max_clique(SMALL, candidates=0)
    assert result.size == 0
    assert result.completed


def test_budget_exhaustion_keeps_incumbent():
    result = max_clique(SMALL, budget=1, incumbent=[4, 5])
    assert not result.completed
    assert result.size >= 2
    assert is_clique(SMALL, result.clique)


def test_incumbent_is_only_replaced_by_larger_cliques():
    result = max_clique(SMALL, incumbent=[2, 1, 0])
    assert result.clique == [0, 1, 2]


def test_degeneracy_order_is_a_permutation():
    order = degeneracy_order(SMALL, 0b111111)
    assert sorted(order) == list(range(6))


def test_random_graphs_against_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(30):
        vertices = int(rng.integers(1, 11))
        upper = np.triu(rng.random((vertices, vertices)) < 0.5, 1)
        adjacency = adjacency_from_matrix(upper | upper.T)
        best = 0
        for subset in range(1 << vertices):
            members = [v for v in range(vertices) if subset >> v & 1]
            if len(members) > best and is_clique(adjacency, members):
                best = len(members)
        assert max_clique(adjacency).size == best
