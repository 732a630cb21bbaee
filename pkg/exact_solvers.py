# exact_solvers.py
"""
Exact optima for small instances.

`brute_force_opt` is a depth-first branch-and-bound over per-subtree
multiplicities and serves as the reference optimum everywhere else.
The hierarchical b-matching pieces (b-bounds, leaf augmentation, endpoint
multigraph, laminar search) back the shared-vertex path solver in
`plans/shared_vertex_plan.py`.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from tree_core import (
    UNBOUNDED,
    BudgetExceededError,
    Capacity,
    Instance,
    PreconditionError,
    Solution,
    Subtree,
    build_tree,
    capacity_min,
    check_capacity,
    is_feasible,
    make_capacities,
    make_subtree,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveBudget:
    max_subtree_count: int = 24
    max_node_count: int = 2_000_000
    max_expanded_copies: int = 40

    def __post_init__(self):
        for name in ("max_subtree_count", "max_node_count", "max_expanded_copies"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"SolveBudget.{name} must be a positive integer, got {value!r}")


# --- Generic multiplicity search ---

class _MultiplicitySearch:
    """
    Depth-first search over item multiplicities in input order.

    Phase 1 finds the optimum total, trying multiplicities high-to-low.
    Phase 2 walks low-to-high and stops at the first vector reaching that
    total, which is the lexicographically smallest optimum.
    Subclasses keep the constraint state: `capacity`, `add`/`remove` for the
    chosen multiplicity, `leave`/`reenter` when an item drops out of the
    remaining set, and `shortfall`, a lower bound on remaining demand that
    cannot be taken.
    """

    label = "search"

    def __init__(self, demands: Sequence[int], max_nodes: int, prune: bool = True):
        self.demands = list(demands)
        self.n = len(self.demands)
        self.max_nodes = max_nodes
        self.prune = prune
        self.nodes = 0
        self.current = [0] * self.n
        self.best: Optional[List[int]] = None
        self.best_total = -1
        self.suffix = [0] * (self.n + 1)
        for i in range(self.n - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] + self.demands[i]

    def capacity(self, i: int) -> int:
        raise NotImplementedError

    def add(self, i: int, m: int) -> None:
        raise NotImplementedError

    def remove(self, i: int, m: int) -> None:
        raise NotImplementedError

    def leave(self, i: int) -> None:
        pass

    def reenter(self, i: int) -> None:
        pass

    def shortfall(self) -> int:
        return 0

    def _upper_bound(self, i: int, total: int) -> int:
        return total + self.suffix[i] - self.shortfall()

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            logger.warning(f"{self.label}: node budget {self.max_nodes} exhausted (best so far {self.best_total})")
            raise BudgetExceededError(f"{self.label}: node budget of {self.max_nodes} exceeded")

    def _maximize(self, i: int, total: int) -> None:
        self._tick()
        if i == self.n:
            if total > self.best_total:
                self.best_total = total
                self.best = list(self.current)
            return
        if self.prune and self._upper_bound(i, total) <= self.best_total:
            return
        cap = min(self.demands[i], self.capacity(i))
        self.leave(i)
        for m in range(cap, -1, -1):
            self.current[i] = m
            if m:
                self.add(i, m)
            self._maximize(i + 1, total + m)
            if m:
                self.remove(i, m)
        self.current[i] = 0
        self.reenter(i)

    def _lex_smallest(self, i: int, total: int, target: int) -> bool:
        self._tick()
        if i == self.n:
            if total == target:
                self.best = list(self.current)
                return True
            return False
        if self.prune and self._upper_bound(i, total) < target:
            return False
        cap = min(self.demands[i], self.capacity(i))
        self.leave(i)
        found = False
        for m in range(0, cap + 1):
            self.current[i] = m
            if m:
                self.add(i, m)
            found = self._lex_smallest(i + 1, total + m, target)
            if m:
                self.remove(i, m)
            if found:
                break
        self.current[i] = 0
        self.reenter(i)
        return found

    def run(self) -> List[int]:
        try:
            self._maximize(0, 0)
            assert self.best is not None
            target = self.best_total
            self._lex_smallest(0, 0, target)
        except BudgetExceededError as e:
            raise BudgetExceededError(str(e), incumbent=Solution(tuple(self.best)) if self.best else None) from None
        logger.info(f"{self.label}: optimum {self.best_total} after {self.nodes} nodes")
        return self.best


class _SubtreePackingSearch(_MultiplicitySearch):
    label = "brute_force_opt"

    def __init__(self, instance: Instance, max_nodes: int, prune: bool):
        super().__init__([s.demand for s in instance.subtrees], max_nodes, prune)
        n = instance.tree.vertex_count
        caps = instance.capacities
        # object slots: vertex v -> v, edge above c -> n + c; None = unbounded
        self.residual: List[Optional[int]] = [None] * (2 * n)
        for v, cap in enumerate(caps.vertex_cap):
            self.residual[v] = None if cap is UNBOUNDED else cap
        for c, cap in enumerate(caps.edge_cap):
            self.residual[n + c] = None if cap is None or cap is UNBOUNDED else cap
        self.finite_slots = [s for s, r in enumerate(self.residual) if r is not None]
        self.item_slots: List[List[int]] = []
        for subtree in instance.subtrees:
            slots = [v for v in subtree.vertices] + [n + c for c in subtree.edges]
            self.item_slots.append([s for s in slots if self.residual[s] is not None])
        self.through = [0] * (2 * n)
        for demand, slots in zip(self.demands, self.item_slots):
            for s in slots:
                self.through[s] += demand

    def capacity(self, i: int) -> int:
        cap = self.demands[i]
        for s in self.item_slots[i]:
            cap = min(cap, self.residual[s])
        return cap

    def add(self, i: int, m: int) -> None:
        for s in self.item_slots[i]:
            self.residual[s] -= m

    def remove(self, i: int, m: int) -> None:
        for s in self.item_slots[i]:
            self.residual[s] += m

    def leave(self, i: int) -> None:
        for s in self.item_slots[i]:
            self.through[s] -= self.demands[i]

    def reenter(self, i: int) -> None:
        for s in self.item_slots[i]:
            self.through[s] += self.demands[i]

    def shortfall(self) -> int:
        worst = 0
        for s in self.finite_slots:
            excess = self.through[s] - self.residual[s]
            if excess > worst:
                worst = excess
        return worst


def _check_instance_budget(instance: Instance, budget: SolveBudget) -> None:
    if instance.n > budget.max_subtree_count:
        raise BudgetExceededError(f"{instance.n} subtrees exceed the budget of {budget.max_subtree_count}")
    copies = sum(s.demand for s in instance.subtrees)
    if copies > budget.max_expanded_copies:
        raise BudgetExceededError(f"{copies} expanded copies exceed the budget of {budget.max_expanded_copies}")


def brute_force_opt(instance: Instance, budget: Optional[SolveBudget] = None, prune: bool = True) -> Solution:
    """Maximum-total feasible solution; ties go to the lexicographically smallest multiplicity vector."""
    budget = budget or SolveBudget()
    _check_instance_budget(instance, budget)
    if instance.n == 0:
        return Solution(())
    search = _SubtreePackingSearch(instance, budget.max_node_count, prune)
    return Solution(tuple(search.run()))


def exhaustive_opt(instance: Instance, budget: Optional[SolveBudget] = None) -> Solution:
    """Plain enumeration of every multiplicity vector, no pruning."""
    budget = budget or SolveBudget()
    _check_instance_budget(instance, budget)
    best: Optional[Solution] = None
    for values in itertools.product(*[range(s.demand + 1) for s in instance.subtrees]):
        candidate = Solution(tuple(values))
        if best is not None and candidate.total <= best.total:
            continue
        if is_feasible(instance, candidate):
            best = candidate
    return best if best is not None else Solution(())


# --- Hierarchical b-matching ---

class MultiEdge(NamedTuple):
    u: int
    v: int
    multiplicity: int


class LaminarSet(NamedTuple):
    members: FrozenSet[int]
    bound: Capacity


@dataclass(frozen=True)
class LaminarBMatchingProblem:
    node_ids: Tuple[int, ...]
    edges: Tuple[MultiEdge, ...]
    laminar_sets: Tuple[LaminarSet, ...]
    root_pair_bound: Capacity = UNBOUNDED

    def __post_init__(self):
        nodes = set(self.node_ids)
        for j, e in enumerate(self.edges):
            if e.u not in nodes or e.v not in nodes:
                raise PreconditionError(f"edge {j} ({e.u}, {e.v}) has an endpoint outside the node set")
            if e.multiplicity < 1:
                raise PreconditionError(f"edge {j} has nonpositive multiplicity {e.multiplicity}")
        for k, laminar in enumerate(self.laminar_sets):
            check_capacity(laminar.bound, f"laminar set {k}")
        check_capacity(self.root_pair_bound, "root pair bound")
        sets = [s.members for s in self.laminar_sets]
        for a, b in itertools.combinations(range(len(sets)), 2):
            x, y = sets[a], sets[b]
            if x & y and not (x <= y or y <= x):
                raise PreconditionError(f"laminar sets {a} and {b} overlap without nesting")


def b_matching_violations(problem: LaminarBMatchingProblem, multiplicities: Sequence[int]) -> List[str]:
    violations = []
    for j, (e, m) in enumerate(zip(problem.edges, multiplicities)):
        if not 0 <= m <= e.multiplicity:
            violations.append(f"edge {j}: multiplicity {m} outside 0..{e.multiplicity}")
    for k, laminar in enumerate(problem.laminar_sets):
        if laminar.bound is UNBOUNDED:
            continue
        degree_sum = sum(
            m * ((e.u in laminar.members) + (e.v in laminar.members))
            for e, m in zip(problem.edges, multiplicities)
        )
        if degree_sum > laminar.bound:
            violations.append(f"laminar set {k}: degree sum {degree_sum} > {laminar.bound}")
    total = sum(multiplicities)
    if problem.root_pair_bound is not UNBOUNDED and total > problem.root_pair_bound:
        violations.append(f"root pair bound: {total} > {problem.root_pair_bound}")
    return violations


class _LaminarSearch(_MultiplicitySearch):
    label = "hierarchical_b_matching"

    def __init__(self, problem: LaminarBMatchingProblem, max_nodes: int, prune: bool):
        super().__init__([e.multiplicity for e in problem.edges], max_nodes, prune)
        bounded = [s for s in problem.laminar_sets if s.bound is not UNBOUNDED]
        self.remaining: List[int] = [s.bound for s in bounded]
        self.terms: List[List[Tuple[int, int]]] = [[] for _ in problem.edges]
        for k, laminar in enumerate(bounded):
            for j, e in enumerate(problem.edges):
                coef = (e.u in laminar.members) + (e.v in laminar.members)
                if coef:
                    self.terms[j].append((k, coef))
        if problem.root_pair_bound is not UNBOUNDED:
            k = len(self.remaining)
            self.remaining.append(problem.root_pair_bound)
            for j in range(len(problem.edges)):
                self.terms[j].append((k, 1))
        self.through = [0] * len(self.remaining)
        self.max_coef = [1] * len(self.remaining)
        for j, terms in enumerate(self.terms):
            for k, coef in terms:
                self.through[k] += coef * self.demands[j]
                self.max_coef[k] = max(self.max_coef[k], coef)

    def capacity(self, j: int) -> int:
        cap = self.demands[j]
        for k, coef in self.terms[j]:
            cap = min(cap, self.remaining[k] // coef)
        return cap

    def add(self, j: int, m: int) -> None:
        for k, coef in self.terms[j]:
            self.remaining[k] -= coef * m

    def remove(self, j: int, m: int) -> None:
        for k, coef in self.terms[j]:
            self.remaining[k] += coef * m

    def leave(self, j: int) -> None:
        for k, coef in self.terms[j]:
            self.through[k] -= coef * self.demands[j]

    def reenter(self, j: int) -> None:
        for k, coef in self.terms[j]:
            self.through[k] += coef * self.demands[j]

    def shortfall(self) -> int:
        worst = 0
        for k, left in enumerate(self.remaining):
            excess = self.through[k] - left
            if excess > 0:
                # dropping one unit frees at most max_coef of the constraint
                worst = max(worst, -(-excess // self.max_coef[k]))
        return worst


def _check_problem_budget(problem: LaminarBMatchingProblem, budget: SolveBudget) -> None:
    if len(problem.edges) > budget.max_subtree_count:
        raise BudgetExceededError(f"{len(problem.edges)} multigraph edges exceed the budget of {budget.max_subtree_count}")


def hierarchical_b_matching(
    problem: LaminarBMatchingProblem, budget: Optional[SolveBudget] = None, prune: bool = True
) -> Tuple[int, ...]:
    """
    Maximum edge sub-multiset H with sum_{l in L} d_H(l) <= b for every laminar
    set (L, b) and |H| <= root_pair_bound. Returns multiplicities per edge.
    """
    budget = budget or SolveBudget()
    _check_problem_budget(problem, budget)
    if not problem.edges:
        return ()
    search = _LaminarSearch(problem, budget.max_node_count, prune)
    return tuple(search.run())


def exhaustive_b_matching(problem: LaminarBMatchingProblem, budget: Optional[SolveBudget] = None) -> Tuple[int, ...]:
    budget = budget or SolveBudget()
    _check_problem_budget(problem, budget)
    best: Optional[Tuple[int, ...]] = None
    for values in itertools.product(*[range(e.multiplicity + 1) for e in problem.edges]):
        if best is not None and sum(values) <= sum(best):
            continue
        if not b_matching_violations(problem, values):
            best = tuple(values)
    return best if best is not None else ()


# --- Shared-vertex path reduction pieces ---

def compute_b_bounds(instance: Instance) -> Dict[int, Capacity]:
    """b_r = k_r; b_v = min(k_v, k_{e_v}) otherwise."""
    tree = instance.tree
    caps = instance.capacities
    bounds: Dict[int, Capacity] = {}
    for v in tree.vertices:
        if v == tree.root:
            bounds[v] = caps.vertex_cap[v]
        else:
            bounds[v] = capacity_min([caps.vertex_cap[v], caps.edge_cap[v]])
    return bounds


def leaf_augment(instance: Instance) -> Tuple[Instance, Dict[int, int]]:
    """
    Moves every path endpoint that is not a tree leaf onto a fresh pendant leaf
    with unbounded vertex and edge capacity. One pendant per such vertex.
    Returns the new instance and a map pendant -> original endpoint.
    """
    tree = instance.tree
    for i, subtree in enumerate(instance.subtrees):
        if not subtree.is_path:
            raise PreconditionError(f"subtree {i} is not a path")

    internal_ends = sorted({
        end
        for subtree in instance.subtrees
        for end in subtree.endpoints
        if not tree.is_leaf(end)
    })
    if not internal_ends:
        return instance, {}

    pendant_of = {u: tree.vertex_count + k for k, u in enumerate(internal_ends)}
    parents = tree.parent_map()
    parents.update({p: u for u, p in pendant_of.items()})
    augmented_tree = build_tree(parents, tree.root)

    caps = instance.capacities
    vertex_cap = {v: caps.vertex_cap[v] for v in tree.vertices}
    edge_cap = {c: caps.edge_cap[c] for c in tree.edges}
    for p in pendant_of.values():
        vertex_cap[p] = UNBOUNDED
        edge_cap[p] = UNBOUNDED

    subtrees: List[Subtree] = []
    for subtree in instance.subtrees:
        extra = {pendant_of[end] for end in subtree.endpoints if end in pendant_of}
        subtrees.append(make_subtree(augmented_tree, subtree.vertices | extra, subtree.demand))

    relabel = {p: u for u, p in pendant_of.items()}
    logger.debug(f"leaf_augment: added {len(relabel)} pendant leaves")
    return Instance(augmented_tree, tuple(subtrees), make_capacities(augmented_tree, vertex_cap, edge_cap)), relabel


def build_endpoint_multigraph(instance: Instance) -> LaminarBMatchingProblem:
    """One multigraph edge per root-crossing path between its leaf endpoints."""
    tree = instance.tree
    r = tree.root
    edges: List[MultiEdge] = []
    for i, subtree in enumerate(instance.subtrees):
        crosses_root = subtree.is_path and subtree.root_vertex == r and subtree.nonroot_leaf_count == 2
        if not crosses_root:
            raise PreconditionError(f"subtree {i} does not contain the root {r} as an internal vertex")
        u, v = subtree.endpoints
        if not (tree.is_leaf(u) and tree.is_leaf(v)):
            raise PreconditionError(f"subtree {i} has an endpoint that is not a tree leaf; augment leaves first")
        edges.append(MultiEdge(u, v, subtree.demand))

    bounds = compute_b_bounds(instance)
    laminar_sets = tuple(
        LaminarSet(tree.descendant_leaves(v), bounds[v]) for v in tree.vertices if v != r
    )
    return LaminarBMatchingProblem(
        node_ids=tuple(tree.leaves()),
        edges=tuple(edges),
        laminar_sets=laminar_sets,
        root_pair_bound=bounds[r],
    )
