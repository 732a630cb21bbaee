from typing import Callable, Dict, Iterable, Optional, Sequence

import pytest

from tree_core import UNBOUNDED, Capacity, Instance, build_tree, make_capacities, make_subtree


def build_instance(
    parents: Dict[int, int],
    vertex_sets: Sequence[Iterable[int]],
    vertex_cap: Optional[Dict[int, Capacity]] = None,
    edge_cap: Optional[Dict[int, Capacity]] = None,
    demands: Optional[Sequence[int]] = None,
    root: int = 0,
    default: Capacity = UNBOUNDED,
) -> Instance:
    """Capacities not listed default to `default`."""
    tree = build_tree(parents, root)
    vertex_caps = {v: default for v in tree.vertices}
    vertex_caps.update(vertex_cap or {})
    edge_caps = {c: default for c in tree.edges}
    edge_caps.update(edge_cap or {})
    demands = demands or [1] * len(vertex_sets)
    subtrees = tuple(make_subtree(tree, vs, d) for vs, d in zip(vertex_sets, demands))
    return Instance(tree, subtrees, make_capacities(tree, vertex_caps, edge_caps))


@pytest.fixture
def make_instance() -> Callable[..., Instance]:
    return build_instance


@pytest.fixture
def star_parents() -> Dict[int, int]:
    # center 0, leaves 1..3
    return {0: 0, 1: 0, 2: 0, 3: 0}


@pytest.fixture
def two_level_parents() -> Dict[int, int]:
    # r=0 with children u=1, w=2; u has leaves 3, 4; w has leaf 5
    return {0: 0, 1: 0, 2: 0, 3: 1, 4: 1, 5: 2}
