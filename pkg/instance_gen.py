# instance_gen.py
"""
Seeded instance construction: random trees and subtrees, the independent-set
reduction to a star, the greedy tightness family, and adapters from
multi-commodity flow on trees and from k-coloring of chordal graphs.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tree_core import (
    UNBOUNDED,
    Capacity,
    CapacityVector,
    Instance,
    PreconditionError,
    Subtree,
    Tree,
    build_tree,
    make_capacities,
    make_subtree,
)

logger = logging.getLogger(__name__)


class Shape(str, Enum):
    PATHS_ONLY = "paths"
    GENERAL_SUBTREES = "subtrees"
    ROOT_CROSSING_PATHS = "root-crossing"
    DIRECTED_PATHS = "directed"
    LEAF_TO_LEAF_PATHS = "leaf-to-leaf"


class GenConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(0, ge=0, lt=2**64)
    tree_size_range: Tuple[int, int] = (10, 20)
    subtree_count_range: Tuple[int, int] = (5, 20)
    # when set, the subtree count is drawn as a multiple of the tree size
    subtree_factor_range: Optional[Tuple[float, float]] = None
    # None: uniform on [1, 2 * ceil(average object load)]
    capacity_range: Optional[Tuple[int, int]] = None
    unbounded_fraction: float = Field(0.0, ge=0.0, le=1.0)
    homogeneous_capacity: Optional[int] = Field(None, ge=0)
    demand_range: Tuple[int, int] = (1, 1)
    max_subtree_size: Optional[int] = Field(None, ge=1)
    shape: Shape = Shape.PATHS_ONLY

    @field_validator("tree_size_range", "demand_range")
    @classmethod
    def _positive_range(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        lo, hi = value
        if lo < 1 or hi < lo:
            raise ValueError(f"range {value} must satisfy 1 <= min <= max")
        return value

    @field_validator("subtree_count_range", "capacity_range")
    @classmethod
    def _nonnegative_range(cls, value: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
        if value is not None:
            lo, hi = value
            if lo < 0 or hi < lo:
                raise ValueError(f"range {value} must satisfy 0 <= min <= max")
        return value

    @field_validator("subtree_factor_range")
    @classmethod
    def _factor_range(cls, value: Optional[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
        if value is not None:
            lo, hi = value
            if lo < 0 or hi < lo:
                raise ValueError(f"factor range {value} must satisfy 0 <= min <= max")
        return value

    @model_validator(mode="after")
    def _root_crossing_needs_branching(self) -> "GenConfig":
        if self.shape is Shape.ROOT_CROSSING_PATHS and self.tree_size_range[0] < 3:
            raise ValueError("root-crossing paths need trees of at least 3 vertices")
        return self


# --- Random instances ---

def _draw(rng: np.random.Generator, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _random_tree(rng: np.random.Generator, size: int, branching_root: bool) -> Tree:
    parents = {0: 0}
    for v in range(1, size):
        if branching_root and v <= 2:
            parents[v] = 0
        else:
            parents[v] = int(rng.integers(0, v))
    return build_tree(parents, 0)


def _descendants(tree: Tree, v: int) -> List[int]:
    found, stack = [], [v]
    while stack:
        w = stack.pop()
        found.append(w)
        stack.extend(tree.children[w])
    return sorted(found)


def _ancestors(tree: Tree, v: int) -> List[int]:
    chain = [v]
    while chain[-1] != tree.root:
        chain.append(tree.parent[chain[-1]])
    return chain


def _random_path(rng: np.random.Generator, tree: Tree, candidates: Sequence[int]) -> FrozenSet[int]:
    u = candidates[int(rng.integers(len(candidates)))]
    v = candidates[int(rng.integers(len(candidates)))]
    return tree.path(u, v)


def _random_directed_path(rng: np.random.Generator, tree: Tree) -> FrozenSet[int]:
    u = int(rng.integers(tree.vertex_count))
    chain = _ancestors(tree, u)
    top = chain[int(rng.integers(len(chain)))]
    return tree.path(top, u)


def _random_crossing_path(rng: np.random.Generator, tree: Tree) -> FrozenSet[int]:
    branches = tree.children[tree.root]
    first, second = rng.choice(len(branches), size=2, replace=False)
    left = _descendants(tree, branches[int(first)])
    right = _descendants(tree, branches[int(second)])
    return tree.path(left[int(rng.integers(len(left)))], right[int(rng.integers(len(right)))])


def _random_connected_set(rng: np.random.Generator, tree: Tree, max_size: int) -> FrozenSet[int]:
    start = int(rng.integers(tree.vertex_count))
    target = _draw(rng, 1, max(1, min(max_size, tree.vertex_count)))
    chosen = {start}
    while len(chosen) < target:
        frontier = sorted({
            w
            for v in chosen
            for w in tree.children[v] + ((tree.parent[v],) if v != tree.root else ())
            if w not in chosen
        })
        if not frontier:
            break
        chosen.add(frontier[int(rng.integers(len(frontier)))])
    return frozenset(chosen)


def _subtree_count(rng: np.random.Generator, config: GenConfig, tree_size: int) -> int:
    if config.subtree_factor_range is not None:
        lo_factor, hi_factor = config.subtree_factor_range
        lo = math.ceil(lo_factor * tree_size)
        hi = max(lo, math.floor(hi_factor * tree_size))
        return _draw(rng, lo, hi)
    return _draw(rng, *config.subtree_count_range)


def _draw_capacities(
    rng: np.random.Generator, config: GenConfig, tree: Tree, subtrees: Sequence[Subtree]
) -> CapacityVector:
    if config.homogeneous_capacity is not None:
        return CapacityVector.uniform(tree, config.homogeneous_capacity, config.homogeneous_capacity)

    if config.capacity_range is not None:
        lo, hi = config.capacity_range
    else:
        object_count = 2 * tree.vertex_count - 1
        total_load = sum(s.demand * (len(s.vertices) + len(s.edges)) for s in subtrees)
        lo, hi = 1, 2 * max(1, math.ceil(total_load / object_count))

    internal_unbounded = config.shape is Shape.LEAF_TO_LEAF_PATHS

    def draw(is_internal: bool) -> Capacity:
        if config.unbounded_fraction > 0 and rng.random() < config.unbounded_fraction:
            return UNBOUNDED
        value = _draw(rng, lo, hi)
        return UNBOUNDED if internal_unbounded and is_internal else value

    vertex_cap = {v: draw(not tree.is_leaf(v)) for v in tree.vertices}
    edge_cap = {c: draw(not tree.is_leaf(c)) for c in tree.edges}
    return make_capacities(tree, vertex_cap, edge_cap)


def random_instance(config: GenConfig) -> Instance:
    rng = np.random.default_rng(config.seed)
    size = _draw(rng, *config.tree_size_range)
    tree = _random_tree(rng, size, branching_root=config.shape is Shape.ROOT_CROSSING_PATHS)
    count = _subtree_count(rng, config, size)
    all_vertices = list(tree.vertices)
    leaves = tree.leaves()
    can_cross = len(tree.children[tree.root]) >= 2

    vertex_sets: List[FrozenSet[int]] = []
    for _ in range(count):
        if config.shape is Shape.PATHS_ONLY:
            vertex_sets.append(_random_path(rng, tree, all_vertices))
        elif config.shape is Shape.LEAF_TO_LEAF_PATHS:
            vertex_sets.append(_random_path(rng, tree, leaves))
        elif config.shape is Shape.DIRECTED_PATHS:
            vertex_sets.append(_random_directed_path(rng, tree))
        elif config.shape is Shape.ROOT_CROSSING_PATHS:
            if can_cross and rng.random() < 0.5:
                vertex_sets.append(_random_crossing_path(rng, tree))
            else:
                vertex_sets.append(_random_directed_path(rng, tree))
        else:
            vertex_sets.append(_random_connected_set(rng, tree, config.max_subtree_size or size))

    demand_lo, demand_hi = config.demand_range
    subtrees = tuple(make_subtree(tree, vs, _draw(rng, demand_lo, demand_hi)) for vs in vertex_sets)
    capacities = _draw_capacities(rng, config, tree, subtrees)
    logger.debug(f"random_instance(seed={config.seed}): {size} vertices, {count} {config.shape.value}")
    return Instance(tree, subtrees, capacities)


# --- Graphs & the independent-set reduction ---

@dataclass(frozen=True)
class SimpleGraph:
    vertex_count: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise PreconditionError(f"graph needs at least one vertex, got {self.vertex_count}")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise PreconditionError(f"edge ({u}, {v}) leaves the vertex range 0..{self.vertex_count - 1}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Tuple[int, int]]) -> "SimpleGraph":
        return cls(vertex_count, frozenset(edges))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "SimpleGraph":
        return cls(graph.number_of_nodes(), frozenset(graph.edges()))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph


def random_graph(vertex_count: int, edge_probability: float, seed: int) -> SimpleGraph:
    return SimpleGraph.from_networkx(nx.gnp_random_graph(vertex_count, edge_probability, seed=seed))


def independence_number(graph: SimpleGraph) -> int:
    """Brute force over vertex subsets, largest first."""
    for size in range(graph.vertex_count, 0, -1):
        for subset in itertools.combinations(range(graph.vertex_count), size):
            chosen = set(subset)
            if not any(u in chosen and v in chosen for u, v in graph.edges):
                return size
    return 0


def mis_to_star(graph: SimpleGraph) -> Instance:
    """
    Star with one leaf per graph edge and one sub-star per graph vertex (center
    plus the leaves of its incident edges). Center unbounded, everything else
    capacity 1, so feasible selections are exactly the independent sets.
    """
    ordered_edges = sorted(graph.edges)
    leaf_of: Dict[Tuple[int, int], int] = {e: j + 1 for j, e in enumerate(ordered_edges)}
    parents = {0: 0}
    parents.update({leaf: 0 for leaf in leaf_of.values()})
    tree = build_tree(parents, 0)

    subtrees = []
    for v in range(graph.vertex_count):
        leaves = {leaf for (a, b), leaf in leaf_of.items() if v in (a, b)}
        subtrees.append(make_subtree(tree, {0} | leaves))

    vertex_cap: Dict[int, Capacity] = {v: 1 for v in tree.vertices}
    vertex_cap[0] = UNBOUNDED
    capacities = make_capacities(tree, vertex_cap, {c: 1 for c in tree.edges})
    return Instance(tree, tuple(subtrees), capacities)


# --- Adapters ---

def mcf_to_instance(tree: Tree, commodities: Sequence[Tuple[int, int, int]], edge_caps: Mapping[int, Capacity]) -> Instance:
    """Each commodity (s, t, d) becomes the s-t path with demand d; vertices are unbounded."""
    subtrees = []
    for j, (s, t, d) in enumerate(commodities):
        for endpoint in (s, t):
            if not 0 <= endpoint < tree.vertex_count:
                raise PreconditionError(f"commodity {j}: unknown vertex {endpoint}")
        if s == t:
            raise PreconditionError(f"commodity {j}: source and sink are both {s}")
        subtrees.append(make_subtree(tree, tree.path(s, t), d))
    capacities = make_capacities(tree, {v: UNBOUNDED for v in tree.vertices}, edge_caps)
    return Instance(tree, tuple(subtrees), capacities)


def chordal_mkc_to_instance(tree: Tree, representation: Sequence[Subtree], k: int) -> Instance:
    """Vertex capacity k and unbounded edges: feasible sets are the k-colorable vertex sets."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise PreconditionError(f"k must be a positive integer, got {k!r}")
    subtrees = tuple(make_subtree(tree, s.vertices, s.demand) for s in representation)
    capacities = make_capacities(tree, {v: k for v in tree.vertices}, {c: UNBOUNDED for c in tree.edges})
    return Instance(tree, subtrees, capacities)


def intersection_graph(subtrees: Sequence[Subtree]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(subtrees)))
    for i, j in itertools.combinations(range(len(subtrees)), 2):
        if subtrees[i].vertices & subtrees[j].vertices:
            graph.add_edge(i, j)
    return graph


def tightness_instance(m: int) -> Instance:
    """Star with m leaves; the whole star first, then the m center-leaf paths. k_0 = m, all else 1."""
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise PreconditionError(f"m must be a positive integer, got {m!r}")
    tree = build_tree({v: 0 for v in range(m + 1)}, 0)
    subtrees = [make_subtree(tree, tree.vertices)]
    subtrees.extend(make_subtree(tree, {0, j}) for j in range(1, m + 1))
    vertex_cap: Dict[int, Capacity] = {v: 1 for v in tree.vertices}
    vertex_cap[0] = m
    return Instance(tree, tuple(subtrees), make_capacities(tree, vertex_cap, {c: 1 for c in tree.edges}))
