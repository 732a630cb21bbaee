# tree_core.py
"""
Rooted trees, subtrees, capacities and load accounting.

Every solver works on an immutable `Instance` (tree + ordered subtrees +
capacities) and reports a `Solution` (per-subtree multiplicities). Objects are
vertices and edges; an edge is named by its child endpoint.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)


# --- Exceptions ---

class MSTBLError(ValueError):
    """Base class for every error raised by the solver library."""


class TreeStructureError(MSTBLError):
    pass


class SubtreeError(MSTBLError):
    pass


class CapacityError(MSTBLError):
    pass


class SelectionError(MSTBLError):
    pass


class PolicyError(MSTBLError):
    pass


class PreconditionError(MSTBLError):
    pass


class BudgetExceededError(MSTBLError):
    """Raised when an exact search runs out of budget. `incumbent` is the best solution seen so far."""

    def __init__(self, message: str, incumbent: Optional["Solution"] = None):
        super().__init__(message)
        self.incumbent = incumbent


class InstanceFormatError(MSTBLError):
    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


# --- Capacities ---

class Unbounded(Enum):
    """Capacity sentinel that compares greater than every integer."""
    UNBOUNDED = "unbounded"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Unbounded.UNBOUNDED
Capacity = Union[int, Unbounded]


def check_capacity(value: object, what: str) -> Capacity:
    if value is UNBOUNDED:
        return UNBOUNDED
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise CapacityError(f"{what}: capacity must be a nonnegative integer or UNBOUNDED, got {value!r}")
    return value


def capacity_min(values: Iterable[Capacity]) -> Capacity:
    result: Capacity = UNBOUNDED
    for value in values:
        if value is not UNBOUNDED and (result is UNBOUNDED or value < result):
            result = value
    return result


# --- Objects ---

class ObjectKind(IntEnum):
    VERTEX = 0
    EDGE = 1


@dataclass(frozen=True, order=True)
class ObjectId:
    kind: ObjectKind
    id: int

    def __str__(self) -> str:
        return f"{'vertex' if self.kind is ObjectKind.VERTEX else 'edge'} {self.id}"


def vertex(v: int) -> ObjectId:
    return ObjectId(ObjectKind.VERTEX, v)


def edge(child: int) -> ObjectId:
    return ObjectId(ObjectKind.EDGE, child)


# --- Tree ---

@dataclass(frozen=True)
class Tree:
    vertex_count: int
    root: int
    parent: Tuple[int, ...]
    children: Tuple[Tuple[int, ...], ...]

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    @cached_property
    def edges(self) -> Tuple[int, ...]:
        """Edges as child endpoints, ascending."""
        return tuple(v for v in self.vertices if v != self.root)

    def objects(self) -> List[ObjectId]:
        return [vertex(v) for v in self.vertices] + [edge(c) for c in self.edges]

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def leaves(self) -> List[int]:
        return [v for v in self.vertices if not self.children[v]]

    @cached_property
    def _depths(self) -> Tuple[int, ...]:
        depths = [0] * self.vertex_count
        for v in self._preorder:
            if v != self.root:
                depths[v] = depths[self.parent[v]] + 1
        return tuple(depths)

    def depth(self, v: int) -> int:
        return self._depths[v]

    @cached_property
    def _preorder(self) -> Tuple[int, ...]:
        order: List[int] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(order)

    def postorder(self) -> List[int]:
        """Post-order with children visited by ascending vertex ID."""
        order: List[int] = []
        stack: List[Tuple[int, bool]] = [(self.root, False)]
        while stack:
            v, expanded = stack.pop()
            if expanded:
                order.append(v)
                continue
            stack.append((v, True))
            for c in reversed(self.children[v]):
                stack.append((c, False))
        return order

    def is_postorder(self, order: Sequence[int]) -> bool:
        if sorted(order) != list(self.vertices):
            return False
        seen = set()
        for v in order:
            if any(c not in seen for c in self.children[v]):
                return False
            seen.add(v)
        return True

    def path(self, u: int, v: int) -> FrozenSet[int]:
        """Vertex set of the unique u-v path."""
        self._check_vertex(u)
        self._check_vertex(v)
        left, right = {u}, {v}
        while self.depth(u) > self.depth(v):
            u = self.parent[u]
            left.add(u)
        while self.depth(v) > self.depth(u):
            v = self.parent[v]
            right.add(v)
        while u != v:
            u, v = self.parent[u], self.parent[v]
            left.add(u)
            right.add(v)
        return frozenset(left | right)

    def descendant_leaves(self, v: int) -> FrozenSet[int]:
        leaves = set()
        stack = [v]
        while stack:
            w = stack.pop()
            if self.children[w]:
                stack.extend(self.children[w])
            else:
                leaves.add(w)
        return frozenset(leaves)

    def parent_map(self) -> Dict[int, int]:
        return {v: self.parent[v] for v in self.vertices}

    def _check_vertex(self, v: int) -> None:
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < self.vertex_count:
            raise TreeStructureError(f"vertex {v!r} is not a vertex of a tree with {self.vertex_count} vertices")


def build_tree(parent_list: Mapping[int, int], root: int) -> Tree:
    """
    Builds a Tree from a vertex->parent map. The root maps to itself (or may be
    omitted); vertex IDs must be exactly 0..n-1.
    """
    parents = dict(parent_list)
    if root in parents and parents[root] != root:
        raise TreeStructureError(f"root {root} has parent {parents[root]}")
    parents[root] = root

    vertex_count = max(parents) + 1
    if min(parents) < 0:
        raise TreeStructureError(f"negative vertex ID {min(parents)}")
    for v in range(vertex_count):
        if v not in parents:
            raise TreeStructureError(f"disconnected vertex {v}: no parent entry")
    for v, p in parents.items():
        if not 0 <= p < vertex_count:
            raise TreeStructureError(f"disconnected vertex {v}: parent {p} is not a vertex")
        if p == v and v != root:
            raise TreeStructureError(f"disconnected vertex {v}: it is its own parent but not the root")

    # 0 = unvisited, 1 = on current walk, 2 = reaches root
    state = [0] * vertex_count
    state[root] = 2
    for start in range(vertex_count):
        walk = []
        v = start
        while state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = parents[v]
        if state[v] == 1:
            raise TreeStructureError(f"cycle detected through vertex {v}")
        for w in walk:
            state[w] = 2

    children: List[List[int]] = [[] for _ in range(vertex_count)]
    for v in range(vertex_count):
        if v != root:
            children[parents[v]].append(v)
    return Tree(
        vertex_count=vertex_count,
        root=root,
        parent=tuple(parents[v] for v in range(vertex_count)),
        children=tuple(tuple(sorted(c)) for c in children),
    )


# --- Subtrees ---

@dataclass(frozen=True)
class Subtree:
    vertices: FrozenSet[int]
    root_vertex: int
    nonroot_leaf_count: int
    edges: FrozenSet[int] = field(compare=False)
    demand: int = 1
    # induced degree of each vertex, sorted by vertex
    degrees: Tuple[Tuple[int, int], ...] = field(compare=False, default=())

    @cached_property
    def objects(self) -> Tuple[ObjectId, ...]:
        """Objects of the subtree in ascending ObjectId order."""
        return tuple([vertex(v) for v in sorted(self.vertices)] + [edge(c) for c in sorted(self.edges)])

    @property
    def is_path(self) -> bool:
        return all(d <= 2 for _, d in self.degrees)

    @property
    def is_directed_path(self) -> bool:
        return self.is_path and self.nonroot_leaf_count <= 1

    @property
    def endpoints(self) -> Tuple[int, int]:
        if not self.is_path:
            raise SubtreeError("endpoints are only defined for paths")
        ends = [v for v, d in self.degrees if d <= 1]
        if len(ends) == 1:
            return ends[0], ends[0]
        return ends[0], ends[1]

    def with_demand(self, demand: int) -> "Subtree":
        return Subtree(self.vertices, self.root_vertex, self.nonroot_leaf_count, self.edges, demand, self.degrees)


def make_subtree(tree: Tree, vertices: Iterable[int], demand: int = 1) -> Subtree:
    vertex_set = frozenset(vertices)
    if not vertex_set:
        raise SubtreeError("empty vertex set")
    for v in vertex_set:
        try:
            tree._check_vertex(v)
        except TreeStructureError as e:
            raise SubtreeError(str(e)) from e
    if isinstance(demand, bool) or not isinstance(demand, int) or demand < 1:
        raise SubtreeError(f"demand must be a positive integer, got {demand!r}")

    tops = [v for v in vertex_set if v == tree.root or tree.parent[v] not in vertex_set]
    if len(tops) != 1:
        raise SubtreeError(f"vertices {sorted(vertex_set)} do not induce a connected subgraph")
    root_vertex = tops[0]

    degrees = []
    nonroot_leaves = 0
    for v in sorted(vertex_set):
        inner_children = sum(1 for c in tree.children[v] if c in vertex_set)
        degree = inner_children + (0 if v == root_vertex else 1)
        degrees.append((v, degree))
        if v != root_vertex and inner_children == 0:
            nonroot_leaves += 1

    return Subtree(
        vertices=vertex_set,
        root_vertex=root_vertex,
        nonroot_leaf_count=nonroot_leaves,
        edges=frozenset(v for v in vertex_set if v != root_vertex),
        demand=demand,
        degrees=tuple(degrees),
    )


# --- Capacity vector ---

@dataclass(frozen=True)
class CapacityVector:
    vertex_cap: Tuple[Capacity, ...]
    # indexed by child vertex; the root slot is None
    edge_cap: Tuple[Optional[Capacity], ...]

    def of(self, obj: ObjectId) -> Capacity:
        if obj.kind is ObjectKind.VERTEX:
            return self.vertex_cap[obj.id]
        cap = self.edge_cap[obj.id]
        if cap is None:
            raise CapacityError(f"no edge above vertex {obj.id}")
        return cap

    @classmethod
    def uniform(cls, tree: Tree, vertex_capacity: Capacity, edge_capacity: Capacity) -> "CapacityVector":
        return make_capacities(
            tree,
            {v: vertex_capacity for v in tree.vertices},
            {c: edge_capacity for c in tree.edges},
        )


def make_capacities(tree: Tree, vertex_cap: Mapping[int, Capacity], edge_cap: Mapping[int, Capacity]) -> CapacityVector:
    if set(vertex_cap) != set(tree.vertices):
        missing = sorted(set(tree.vertices) - set(vertex_cap))
        extra = sorted(set(vertex_cap) - set(tree.vertices))
        raise CapacityError(f"vertex capacities must cover every vertex exactly (missing {missing}, unknown {extra})")
    if set(edge_cap) != set(tree.edges):
        missing = sorted(set(tree.edges) - set(edge_cap))
        extra = sorted(set(edge_cap) - set(tree.edges))
        raise CapacityError(f"edge capacities must cover every edge exactly (missing {missing}, unknown {extra})")
    return CapacityVector(
        vertex_cap=tuple(check_capacity(vertex_cap[v], f"vertex {v}") for v in tree.vertices),
        edge_cap=tuple(
            None if v == tree.root else check_capacity(edge_cap[v], f"edge {v}") for v in tree.vertices
        ),
    )


# --- Instance & solution ---

@dataclass(frozen=True)
class Instance:
    tree: Tree
    subtrees: Tuple[Subtree, ...]
    capacities: CapacityVector

    def __post_init__(self):
        object.__setattr__(self, "subtrees", tuple(self.subtrees))
        n = self.tree.vertex_count
        if len(self.capacities.vertex_cap) != n or len(self.capacities.edge_cap) != n:
            raise CapacityError("capacity vector does not match the tree")
        for i, subtree in enumerate(self.subtrees):
            if any(not 0 <= v < n for v in subtree.vertices):
                raise SubtreeError(f"subtree {i} has vertices outside the tree")

    @property
    def n(self) -> int:
        return len(self.subtrees)

    @cached_property
    def M(self) -> int:
        return max((s.nonroot_leaf_count for s in self.subtrees), default=0)

    @property
    def approximation_factor(self) -> int:
        return max(self.M, 1)

    def restrict(self, indices: Sequence[int]) -> "Instance":
        return Instance(self.tree, tuple(self.subtrees[i] for i in indices), self.capacities)

    def with_capacities(self, capacities: CapacityVector) -> "Instance":
        return Instance(self.tree, self.subtrees, capacities)

    def expand_demands(self) -> Tuple["Instance", Tuple[int, ...]]:
        """Unit-demand copies, copies of one subtree adjacent. Returns the owner of each copy."""
        copies: List[Subtree] = []
        owners: List[int] = []
        for i, subtree in enumerate(self.subtrees):
            unit = subtree.with_demand(1)
            copies.extend([unit] * subtree.demand)
            owners.extend([i] * subtree.demand)
        return Instance(self.tree, tuple(copies), self.capacities), tuple(owners)


@dataclass(frozen=True)
class Solution:
    multiplicity: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.multiplicity)

    @classmethod
    def empty(cls, n: int) -> "Solution":
        return cls(tuple([0] * n))

    @classmethod
    def from_mapping(cls, n: int, multiplicity: Mapping[int, int]) -> "Solution":
        values = [0] * n
        for i, m in multiplicity.items():
            if not 0 <= i < n:
                raise SelectionError(f"subtree index {i} out of range for {n} subtrees")
            values[i] = m
        return cls(tuple(values))


def validate_selection(instance: Instance, selection: Solution) -> None:
    if len(selection.multiplicity) != instance.n:
        raise SelectionError(
            f"selection has {len(selection.multiplicity)} entries but the instance has {instance.n} subtrees"
        )
    for i, (m, subtree) in enumerate(zip(selection.multiplicity, instance.subtrees)):
        if isinstance(m, bool) or not isinstance(m, int) or m < 0:
            raise SelectionError(f"subtree {i}: multiplicity must be a nonnegative integer, got {m!r}")
        if m > subtree.demand:
            raise SelectionError(f"subtree {i}: multiplicity {m} exceeds demand {subtree.demand}")


# --- Load accounting ---

class LoadTracker:
    """Mutable per-object loads for one instance."""

    def __init__(self, instance: Instance):
        self.instance = instance
        n = instance.tree.vertex_count
        self.vertex_load = [0] * n
        self.edge_load = [0] * n

    @classmethod
    def from_selection(cls, instance: Instance, selection: Solution) -> "LoadTracker":
        validate_selection(instance, selection)
        tracker = cls(instance)
        for subtree, m in zip(instance.subtrees, selection.multiplicity):
            if m:
                tracker.add(subtree, m)
        return tracker

    def add(self, subtree: Subtree, m: int) -> None:
        for v in subtree.vertices:
            self.vertex_load[v] += m
        for c in subtree.edges:
            self.edge_load[c] += m

    def load(self, obj: ObjectId) -> int:
        return self.vertex_load[obj.id] if obj.kind is ObjectKind.VERTEX else self.edge_load[obj.id]

    def residual(self, subtree: Subtree) -> Tuple[Capacity, Optional[ObjectId]]:
        """
        Minimum remaining capacity over the subtree's objects, and the first
        object (ascending ObjectId) with no capacity left, if any.
        """
        caps = self.instance.capacities
        best: Capacity = UNBOUNDED
        blocking: Optional[ObjectId] = None
        for obj in subtree.objects:
            cap = caps.of(obj)
            if cap is UNBOUNDED:
                continue
            left = cap - self.load(obj)
            if left <= 0 and blocking is None:
                blocking = obj
            if best is UNBOUNDED or left < best:
                best = left
        return best, blocking


@dataclass(frozen=True)
class LoadVector:
    loads: Dict[ObjectId, int]
    max_vertex_load: int
    max_edge_load: int

    def __getitem__(self, obj: ObjectId) -> int:
        return self.loads[obj]

    @property
    def L_V(self) -> int:
        return self.max_vertex_load

    @property
    def L_E(self) -> int:
        return self.max_edge_load


def load_vector(instance: Instance, selection: Solution) -> LoadVector:
    tracker = LoadTracker.from_selection(instance, selection)
    tree = instance.tree
    loads = {vertex(v): tracker.vertex_load[v] for v in tree.vertices}
    loads.update({edge(c): tracker.edge_load[c] for c in tree.edges})
    return LoadVector(
        loads=loads,
        max_vertex_load=max(tracker.vertex_load, default=0),
        max_edge_load=max((tracker.edge_load[c] for c in tree.edges), default=0),
    )


def overloaded_objects(instance: Instance, selection: Solution) -> List[Tuple[ObjectId, int]]:
    tracker = LoadTracker.from_selection(instance, selection)
    caps = instance.capacities
    result = []
    for obj in instance.tree.objects():
        cap = caps.of(obj)
        if cap is UNBOUNDED:
            continue
        excess = tracker.load(obj) - cap
        if excess > 0:
            result.append((obj, excess))
    return sorted(result)


def is_feasible(instance: Instance, selection: Solution) -> bool:
    return not overloaded_objects(instance, selection)


def residual_min_capacity(instance: Instance, selection: Solution, subtree_index: int) -> Capacity:
    if not 0 <= subtree_index < instance.n:
        raise SelectionError(f"subtree index {subtree_index} out of range for {instance.n} subtrees")
    tracker = LoadTracker.from_selection(instance, selection)
    value, _ = tracker.residual(instance.subtrees[subtree_index])
    return value


def deduct_loads(instance: Instance, selection: Solution) -> CapacityVector:
    """Capacities left after `selection`: k_o - load(selection, o)."""
    tracker = LoadTracker.from_selection(instance, selection)
    caps = instance.capacities
    vertex_cap = tuple(
        cap if cap is UNBOUNDED else cap - tracker.vertex_load[v] for v, cap in enumerate(caps.vertex_cap)
    )
    edge_cap = tuple(
        cap if cap is None or cap is UNBOUNDED else cap - tracker.edge_load[c] for c, cap in enumerate(caps.edge_cap)
    )
    if any(c is not UNBOUNDED and c is not None and c < 0 for c in vertex_cap + edge_cap):
        raise SelectionError("cannot deduct the loads of an infeasible selection")
    return CapacityVector(vertex_cap=vertex_cap, edge_cap=edge_cap)
