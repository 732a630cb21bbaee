import pytest

from greedy_solver import (
    Accepted,
    OrderPolicy,
    Rejected,
    SameRootOrder,
    bottom_up_greedy,
    expanded_greedy_multiplicities,
    is_maximal,
    order_subtrees,
)
from instance_gen import GenConfig, Shape, random_instance, tightness_instance
from tree_core import UNBOUNDED, PolicyError, Solution, is_feasible, load_vector, vertex


def test_order_follows_postorder_on_a_path(make_instance):
    instance = make_instance({0: 0, 1: 0, 2: 1}, [{0, 1}, {1, 2}, {2}])
    assert order_subtrees(instance) == [2, 1, 0]


def test_fewest_leaves_first(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 1, 2, 3}, {0, 1}])
    assert order_subtrees(instance) == [0, 1]
    assert order_subtrees(instance, OrderPolicy.fewest_leaves_first()) == [1, 0]


def test_single_subtree_order(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 2}])
    assert order_subtrees(instance) == [0]


def test_explicit_permutation_breaks_same_root_ties(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 1}, {0, 2}, {3}])
    # the subtree rooted at leaf 3 still comes before those rooted at the center
    assert order_subtrees(instance, OrderPolicy.explicit([1, 2, 0])) == [2, 1, 0]


def test_custom_traversal(make_instance, star_parents):
    instance = make_instance(star_parents, [{1}, {2}, {3}])
    policy = OrderPolicy(vertex_traversal=(3, 2, 1, 0))
    assert order_subtrees(instance, policy) == [2, 1, 0]


def test_rejects_non_postorder_traversal(make_instance, star_parents):
    instance = make_instance(star_parents, [{1}])
    with pytest.raises(PolicyError, match="post-order"):
        order_subtrees(instance, OrderPolicy(vertex_traversal=(0, 1, 2, 3)))


def test_rejects_non_bijective_permutation(make_instance, star_parents):
    instance = make_instance(star_parents, [{1}, {2}])
    with pytest.raises(PolicyError, match="bijection"):
        order_subtrees(instance, OrderPolicy.explicit([0, 0]))
    with pytest.raises(PolicyError):
        order_subtrees(instance, OrderPolicy(same_root_order=SameRootOrder.EXPLICIT_PERMUTATION))


def test_empty_instance(make_instance, star_parents):
    solution, trace = bottom_up_greedy(make_instance(star_parents, []))
    assert solution == Solution(())
    assert trace.visit_order == []


@pytest.mark.parametrize("m", [2, 3, 5])
def test_whole_star_first_blocks_every_path(m):
    solution, trace = bottom_up_greedy(tightness_instance(m))
    assert solution.total == 1
    assert solution.multiplicity[0] == 1
    assert trace.decisions[0] == Accepted(1)
    for i in range(1, m + 1):
        assert isinstance(trace.decisions[i], Rejected)
        assert trace.decisions[i].blocking == vertex(i)


def test_paths_first_reach_the_optimum():
    m = 4
    instance = tightness_instance(m)
    solution, _ = bottom_up_greedy(instance, OrderPolicy.explicit([1, 2, 3, 4, 0]))
    assert solution.total == m
    assert solution.multiplicity[0] == 0


def test_compact_demand_capped_by_capacity(make_instance):
    instance = make_instance({0: 0, 1: 0, 2: 1}, [{0, 1, 2}], vertex_cap={1: 4}, edge_cap={2: 6}, demands=[7])
    solution, trace = bottom_up_greedy(instance)
    assert solution.multiplicity == (4,)
    assert solution.total == 4
    assert trace.decisions[0] == Accepted(4)


def test_unbounded_objects_take_full_demand(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 1}], demands=[9])
    solution, _ = bottom_up_greedy(instance)
    assert solution.multiplicity == (9,)


def test_trace_replays_solution(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 1}, {0, 2}, {0, 3}, {1}], vertex_cap={0: 2}, default=1)
    solution, trace = bottom_up_greedy(instance)
    assert trace.replay(instance.n) == solution
    assert trace.visit_order == [3, 0, 1, 2]
    assert is_feasible(instance, solution)


@pytest.mark.parametrize("seed", range(30))
def test_rejections_name_a_tight_object(seed):
    config = GenConfig(seed=seed, tree_size_range=(3, 12), subtree_count_range=(4, 16), shape=Shape.GENERAL_SUBTREES)
    instance = random_instance(config)
    solution, trace = bottom_up_greedy(instance)
    values = [0] * instance.n
    for i in trace.visit_order:
        decision = trace.decisions[i]
        if isinstance(decision, Rejected):
            obj = decision.blocking
            cap = instance.capacities.of(obj)
            assert obj in instance.subtrees[i].objects
            assert cap is not UNBOUNDED
            assert load_vector(instance, Solution(tuple(values)))[obj] >= cap
        else:
            values[i] = decision.multiplicity
    assert Solution(tuple(values)) == solution


def test_is_maximal(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 1}, {0, 2}], vertex_cap={0: 1})
    assert is_maximal(instance, Solution((1, 0)))
    assert not is_maximal(instance, Solution((0, 0)))
    unbounded = make_instance(star_parents, [{0, 1}])
    assert not is_maximal(unbounded, Solution((0,)))
    assert is_maximal(unbounded, Solution((1,)))


def test_compact_matches_expanded_greedy(make_instance, star_parents):
    instance = make_instance(
        star_parents,
        [{0, 1}, {0, 1, 2}, {2}, {0, 3}],
        vertex_cap={0: 5, 2: 3},
        edge_cap={1: 4},
        demands=[3, 2, 2, 4],
    )
    compact, _ = bottom_up_greedy(instance)
    assert expanded_greedy_multiplicities(instance) == compact.multiplicity
    fewest = OrderPolicy.fewest_leaves_first()
    compact_fewest, _ = bottom_up_greedy(instance, fewest)
    assert expanded_greedy_multiplicities(instance, fewest) == compact_fewest.multiplicity


def test_expansion_refuses_explicit_permutation(make_instance, star_parents):
    instance = make_instance(star_parents, [{0, 1}])
    with pytest.raises(PolicyError):
        expanded_greedy_multiplicities(instance, OrderPolicy.explicit([0]))
