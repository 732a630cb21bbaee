# greedy_solver.py
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tree_core import (
    UNBOUNDED,
    Instance,
    LoadTracker,
    ObjectId,
    PolicyError,
    Solution,
    validate_selection,
)

logger = logging.getLogger(__name__)


class SameRootOrder(str, Enum):
    INPUT_ORDER = "input"
    FEWEST_NONROOT_LEAVES_FIRST = "fewest-leaves"
    EXPLICIT_PERMUTATION = "explicit"


@dataclass(frozen=True)
class OrderPolicy:
    """
    How the greedy walks the instance. `vertex_traversal=None` means post-order
    with children by ascending ID; otherwise it must be a post-order of the tree.
    `permutation` ranks all subtrees when `same_root_order` is EXPLICIT_PERMUTATION.
    """
    vertex_traversal: Optional[Tuple[int, ...]] = None
    same_root_order: SameRootOrder = SameRootOrder.INPUT_ORDER
    permutation: Optional[Tuple[int, ...]] = None

    @classmethod
    def fewest_leaves_first(cls) -> "OrderPolicy":
        return cls(same_root_order=SameRootOrder.FEWEST_NONROOT_LEAVES_FIRST)

    @classmethod
    def explicit(cls, permutation: Sequence[int], vertex_traversal: Optional[Sequence[int]] = None) -> "OrderPolicy":
        return cls(
            vertex_traversal=tuple(vertex_traversal) if vertex_traversal is not None else None,
            same_root_order=SameRootOrder.EXPLICIT_PERMUTATION,
            permutation=tuple(permutation),
        )


@dataclass(frozen=True)
class Accepted:
    multiplicity: int


@dataclass(frozen=True)
class Rejected:
    blocking: ObjectId


Decision = Union[Accepted, Rejected]


@dataclass
class GreedyTrace:
    visit_order: List[int] = field(default_factory=list)
    decisions: Dict[int, Decision] = field(default_factory=dict)

    def replay(self, n: int) -> Solution:
        values = [0] * n
        for i in self.visit_order:
            decision = self.decisions[i]
            if isinstance(decision, Accepted):
                values[i] = decision.multiplicity
        return Solution(tuple(values))


def order_subtrees(instance: Instance, policy: Optional[OrderPolicy] = None) -> List[int]:
    """Subtree indices grouped by root in traversal order, ties broken per policy."""
    policy = policy or OrderPolicy()
    tree = instance.tree

    if policy.vertex_traversal is None:
        traversal: Sequence[int] = tree.postorder()
    else:
        traversal = policy.vertex_traversal
        if not tree.is_postorder(traversal):
            raise PolicyError(f"vertex order {list(traversal)} is not a post-order of the tree")
    rank = {v: position for position, v in enumerate(traversal)}

    if policy.same_root_order is SameRootOrder.INPUT_ORDER:
        def tie(i: int) -> Tuple[int, ...]:
            return (i,)
    elif policy.same_root_order is SameRootOrder.FEWEST_NONROOT_LEAVES_FIRST:
        def tie(i: int) -> Tuple[int, ...]:
            return (instance.subtrees[i].nonroot_leaf_count, i)
    elif policy.same_root_order is SameRootOrder.EXPLICIT_PERMUTATION:
        permutation = policy.permutation
        if permutation is None or sorted(permutation) != list(range(instance.n)):
            raise PolicyError(f"explicit permutation {permutation} is not a bijection on 0..{instance.n - 1}")
        position = {i: p for p, i in enumerate(permutation)}

        def tie(i: int) -> Tuple[int, ...]:
            return (position[i],)
    else:
        raise PolicyError(f"unknown same-root order {policy.same_root_order!r}")

    return sorted(range(instance.n), key=lambda i: (rank[instance.subtrees[i].root_vertex],) + tie(i))


def bottom_up_greedy(instance: Instance, policy: Optional[OrderPolicy] = None) -> Tuple[Solution, GreedyTrace]:
    """
    Visits subtrees bottom-up and takes each with multiplicity
    min(demand, minimum remaining capacity of its objects).
    """
    order = order_subtrees(instance, policy)
    tracker = LoadTracker(instance)
    trace = GreedyTrace()
    values = [0] * instance.n

    for i in order:
        subtree = instance.subtrees[i]
        remaining, blocking = tracker.residual(subtree)
        m = subtree.demand if remaining is UNBOUNDED else min(subtree.demand, remaining)
        trace.visit_order.append(i)
        if m > 0:
            tracker.add(subtree, m)
            values[i] = m
            trace.decisions[i] = Accepted(m)
            logger.debug(f"greedy: accepted subtree {i} (root {subtree.root_vertex}) x{m}")
        else:
            assert blocking is not None
            trace.decisions[i] = Rejected(blocking)
            logger.debug(f"greedy: rejected subtree {i}, blocked at {blocking}")

    solution = Solution(tuple(values))
    logger.info(f"greedy: {len(order)} subtrees visited, total {solution.total}")
    return solution, trace


def is_maximal(instance: Instance, solution: Solution) -> bool:
    """True iff no subtree below its demand can gain one more unit."""
    validate_selection(instance, solution)
    tracker = LoadTracker.from_selection(instance, solution)
    for subtree, m in zip(instance.subtrees, solution.multiplicity):
        if m < subtree.demand:
            remaining, _ = tracker.residual(subtree)
            if remaining is UNBOUNDED or remaining > 0:
                return False
    return True


def expanded_greedy_multiplicities(instance: Instance, policy: Optional[OrderPolicy] = None) -> Tuple[int, ...]:
    """Runs the unit-copy greedy and folds accepted copies back onto their subtrees."""
    if policy is not None and policy.same_root_order is SameRootOrder.EXPLICIT_PERMUTATION:
        raise PolicyError("expansion of explicit permutations is not supported")
    expanded, owners = instance.expand_demands()
    unit_solution, _ = bottom_up_greedy(expanded, policy)
    folded = [0] * instance.n
    for owner, m in zip(owners, unit_solution.multiplicity):
        folded[owner] += m
    return tuple(folded)
