import networkx as nx
import numpy as np
import pytest
from pydantic import ValidationError

from exact_solvers import brute_force_opt
from greedy_solver import bottom_up_greedy
from instance_gen import (
    GenConfig,
    Shape,
    SimpleGraph,
    chordal_mkc_to_instance,
    independence_number,
    intersection_graph,
    mcf_to_instance,
    mis_to_star,
    random_graph,
    random_instance,
    tightness_instance,
)
from tree_core import UNBOUNDED, PreconditionError, Solution, build_tree, load_vector, make_subtree


# --- random instances ---

def test_seed_determinism():
    config = GenConfig(seed=11, shape=Shape.GENERAL_SUBTREES, unbounded_fraction=0.2)
    assert random_instance(config) == random_instance(config)
    assert random_instance(config) != random_instance(config.model_copy(update={"seed": 12}))


@pytest.mark.parametrize("seed", range(20))
def test_paths_have_at_most_two_leaves(seed):
    instance = random_instance(GenConfig(seed=seed))
    assert all(s.is_path for s in instance.subtrees)
    assert instance.M <= 2


def test_sizes_respect_factor_range():
    config = GenConfig(seed=3, tree_size_range=(50, 150), subtree_factor_range=(2.0, 4.0))
    instance = random_instance(config)
    size = instance.tree.vertex_count
    assert 50 <= size <= 150
    assert 2 * size <= instance.n <= 4 * size


def test_count_range_and_demands():
    config = GenConfig(seed=5, subtree_count_range=(7, 9), demand_range=(2, 6))
    instance = random_instance(config)
    assert 7 <= instance.n <= 9
    assert all(2 <= s.demand <= 6 for s in instance.subtrees)


@pytest.mark.parametrize("seed", range(10))
def test_directed_shape(seed):
    instance = random_instance(GenConfig(seed=seed, shape=Shape.DIRECTED_PATHS))
    assert all(s.is_directed_path for s in instance.subtrees)


@pytest.mark.parametrize("seed", range(10))
def test_root_crossing_shape(seed):
    instance = random_instance(GenConfig(seed=seed, shape=Shape.ROOT_CROSSING_PATHS))
    tree = instance.tree
    assert len(tree.children[tree.root]) >= 2
    for s in instance.subtrees:
        assert s.is_path
        assert s.is_directed_path or (s.root_vertex == tree.root and s.nonroot_leaf_count == 2)


def test_leaf_to_leaf_shape_has_unbounded_interior():
    instance = random_instance(GenConfig(seed=2, shape=Shape.LEAF_TO_LEAF_PATHS))
    tree = instance.tree
    for v in tree.vertices:
        if not tree.is_leaf(v):
            assert instance.capacities.vertex_cap[v] is UNBOUNDED
    for s in instance.subtrees:
        assert all(tree.is_leaf(end) for end in s.endpoints)


def test_homogeneous_and_explicit_capacities():
    homogeneous = random_instance(GenConfig(seed=1, homogeneous_capacity=3))
    assert set(homogeneous.capacities.vertex_cap) == {3}
    ranged = random_instance(GenConfig(seed=1, capacity_range=(2, 4)))
    assert all(2 <= c <= 4 for c in ranged.capacities.vertex_cap)


def test_max_subtree_size():
    instance = random_instance(GenConfig(seed=4, shape=Shape.GENERAL_SUBTREES, max_subtree_size=3))
    assert all(len(s.vertices) <= 3 for s in instance.subtrees)


def test_config_validation():
    with pytest.raises(ValidationError):
        GenConfig(tree_size_range=(5, 2))
    with pytest.raises(ValidationError):
        GenConfig(shape=Shape.ROOT_CROSSING_PATHS, tree_size_range=(2, 5))
    with pytest.raises(ValidationError):
        GenConfig(unbounded_fraction=1.5)
    assert GenConfig(shape="directed").shape is Shape.DIRECTED_PATHS


# --- independent-set reduction ---

def test_triangle_reduction():
    graph = SimpleGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    instance = mis_to_star(graph)
    assert instance.tree.vertex_count == 4
    assert all(s.nonroot_leaf_count == 2 for s in instance.subtrees)
    assert brute_force_opt(instance).total == independence_number(graph) == 1


def test_edgeless_reduction():
    graph = SimpleGraph.from_edges(3, [])
    instance = mis_to_star(graph)
    assert [s.vertices for s in instance.subtrees] == [frozenset({0})] * 3
    assert instance.capacities.vertex_cap[0] is UNBOUNDED
    assert brute_force_opt(instance).total == independence_number(graph) == 3


def test_path_graph_reduction():
    graph = SimpleGraph.from_edges(3, [(0, 1), (2, 1)])
    assert independence_number(graph) == 2
    assert brute_force_opt(mis_to_star(graph)).total == 2


def test_graph_validation():
    with pytest.raises(PreconditionError, match="self-loop"):
        SimpleGraph.from_edges(2, [(1, 1)])
    with pytest.raises(PreconditionError, match="range"):
        SimpleGraph.from_edges(2, [(0, 2)])


def test_networkx_round_trip():
    graph = random_graph(7, 0.4, seed=9)
    assert SimpleGraph.from_networkx(graph.to_networkx()) == graph
    expected = len(nx.max_weight_clique(nx.complement(graph.to_networkx()), weight=None)[0])
    assert independence_number(graph) == expected


# --- adapters ---

def test_single_commodity():
    tree = build_tree({0: 0, 1: 0, 2: 1, 3: 0}, 0)
    instance = mcf_to_instance(tree, [(2, 3, 5)], {1: 5, 2: 6, 3: 9})
    assert brute_force_opt(instance).total == 5


def test_commodities_share_a_unit_edge():
    tree = build_tree({0: 0, 1: 0, 2: 1, 3: 0}, 0)
    instance = mcf_to_instance(tree, [(2, 3, 1), (1, 3, 1)], {1: 2, 2: 2, 3: 1})
    assert brute_force_opt(instance).total == 1


@pytest.mark.parametrize("seed", range(20))
def test_greedy_within_half_on_a_path_network(seed):
    rng = np.random.default_rng(seed)
    size = int(rng.integers(4, 10))
    root = size // 2
    parents = {v: v + 1 if v < root else v - 1 for v in range(size)}
    parents[root] = root
    tree = build_tree(parents, root)
    commodities = []
    for _ in range(int(rng.integers(1, 7))):
        s, t = (int(x) for x in rng.choice(size, size=2, replace=False))
        commodities.append((s, t, int(rng.integers(1, 3))))
    edge_caps = {c: int(rng.integers(1, 4)) for c in tree.edges}
    instance = mcf_to_instance(tree, commodities, edge_caps)
    assert instance.M <= 2
    greedy, _ = bottom_up_greedy(instance)
    assert brute_force_opt(instance).total <= 2 * greedy.total


def test_commodity_with_equal_endpoints():
    tree = build_tree({0: 0, 1: 0}, 0)
    with pytest.raises(PreconditionError, match="both"):
        mcf_to_instance(tree, [(1, 1, 1)], {1: 1})


def test_chordal_k_at_least_clique_size(two_level_parents):
    tree = build_tree(two_level_parents, 0)
    representation = [make_subtree(tree, vs) for vs in ({3, 1}, {1, 0}, {1, 4}, {0, 2, 5}, {2})]
    everything = Solution((1,) * len(representation))
    k = load_vector(chordal_mkc_to_instance(tree, representation, 1), everything).L_V
    instance = chordal_mkc_to_instance(tree, representation, k)
    assert brute_force_opt(instance).total == len(representation)


def test_chordal_k_one_is_independent_set(two_level_parents):
    tree = build_tree(two_level_parents, 0)
    representation = [make_subtree(tree, vs) for vs in ({3, 1}, {1, 0}, {1, 4}, {0, 2, 5}, {2}, {5})]
    instance = chordal_mkc_to_instance(tree, representation, 1)
    graph = SimpleGraph.from_networkx(intersection_graph(instance.subtrees))
    assert brute_force_opt(instance).total == independence_number(graph)


def test_chordal_directed_representation_greedy_is_optimal(two_level_parents):
    tree = build_tree(two_level_parents, 0)
    representation = [make_subtree(tree, vs) for vs in ({3, 1, 0}, {4, 1}, {1, 0}, {5, 2, 0}, {2, 0}, {3})]
    for k in (1, 2, 3):
        instance = chordal_mkc_to_instance(tree, representation, k)
        greedy, _ = bottom_up_greedy(instance)
        assert greedy.total == brute_force_opt(instance).total


def test_intersection_graph_is_chordal(two_level_parents):
    tree = build_tree(two_level_parents, 0)
    subtrees = [make_subtree(tree, vs) for vs in ({3, 1, 0}, {4, 1}, {0, 2}, {5, 2}, {1, 0, 2})]
    assert nx.is_chordal(intersection_graph(subtrees))


# --- tightness family ---

@pytest.mark.parametrize("m", [1, 3, 5])
def test_tightness_ratio(m):
    instance = tightness_instance(m)
    assert instance.M == m
    greedy, _ = bottom_up_greedy(instance)
    assert greedy.total == 1
    assert brute_force_opt(instance).total == m


def test_tightness_rejects_zero():
    with pytest.raises(PreconditionError):
        tightness_instance(0)
