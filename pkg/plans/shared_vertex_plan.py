# plans/shared_vertex_plan.py
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from exact_solvers import SolveBudget, build_endpoint_multigraph, hierarchical_b_matching, leaf_augment
from greedy_solver import OrderPolicy, bottom_up_greedy
from tree_core import BudgetExceededError, Instance, PreconditionError, Solution, deduct_loads, is_feasible

logger = logging.getLogger("SharedVertexPathsPlan")


def split_paths(instance: Instance) -> Tuple[List[int], List[int]]:
    """Indices of directed paths and of paths crossing the root; raises if neither."""
    r = instance.tree.root
    directed, crossing = [], []
    for i, subtree in enumerate(instance.subtrees):
        if not subtree.is_path:
            raise PreconditionError(f"subtree {i} is not a path")
        if subtree.nonroot_leaf_count <= 1:
            directed.append(i)
        elif subtree.root_vertex == r:
            crossing.append(i)
        else:
            raise PreconditionError(
                f"path {i} (root {subtree.root_vertex}) is neither directed nor through the tree root {r}"
            )
    return directed, crossing


class SharedVertexPathsPlan:
    """
    Exact solver for path instances where every path is directed or passes
    through the tree root. Greedy on the directed paths first, then a
    hierarchical b-matching on the root-crossing paths over what capacity is left.
    """

    def __init__(self, budget: Optional[SolveBudget] = None):
        self.budget = budget or SolveBudget()
        self.stages: List[Tuple[str, Callable[[Dict[str, Any]], None]]] = [
            ("split_paths", self._stage_split_paths),
            ("directed_greedy", self._stage_directed_greedy),
            ("deduct_loads", self._stage_deduct_loads),
            ("leaf_augment", self._stage_leaf_augment),
            ("endpoint_multigraph", self._stage_endpoint_multigraph),
            ("b_matching", self._stage_b_matching),
            ("merge", self._stage_merge),
        ]

    def execute(self, instance: Instance) -> Dict[str, Any]:
        plan_state: Dict[str, Any] = {"instance": instance, "plan_execution_log": []}
        logger.info(f"PLAN EXECUTION STARTED: {instance.n} paths on {instance.tree.vertex_count} vertices")
        for stage_name, stage in self.stages:
            plan_state["plan_execution_log"].append(stage_name)
            logger.debug(f"PLAN: ==> {stage_name}")
            try:
                stage(plan_state)
            except Exception as e:
                logger.error(f"PLAN failed during '{stage_name}': {e}")
                raise
        logger.info(f"PLAN: done, total {plan_state['solution'].total}")
        return plan_state

    def _stage_split_paths(self, state: Dict[str, Any]) -> None:
        state["directed"], state["crossing"] = split_paths(state["instance"])

    def _stage_directed_greedy(self, state: Dict[str, Any]) -> None:
        directed_instance = state["instance"].restrict(state["directed"])
        state["directed_instance"] = directed_instance
        state["greedy_solution"], _ = bottom_up_greedy(directed_instance, OrderPolicy.fewest_leaves_first())

    def _stage_deduct_loads(self, state: Dict[str, Any]) -> None:
        # rejected directed paths are dropped: an optimum agrees with the greedy on them
        residual = deduct_loads(state["directed_instance"], state["greedy_solution"])
        state["crossing_instance"] = state["instance"].restrict(state["crossing"]).with_capacities(residual)

    def _stage_leaf_augment(self, state: Dict[str, Any]) -> None:
        state["augmented_instance"], state["relabel"] = leaf_augment(state["crossing_instance"])

    def _stage_endpoint_multigraph(self, state: Dict[str, Any]) -> None:
        state["problem"] = build_endpoint_multigraph(state["augmented_instance"])

    def _stage_b_matching(self, state: Dict[str, Any]) -> None:
        try:
            state["matching"] = hierarchical_b_matching(state["problem"], self.budget)
        except BudgetExceededError as e:
            # report the directed picks plus the best matching seen as one selection
            matching = e.incumbent.multiplicity if e.incumbent is not None else ()
            incumbent = self._merge(state, matching)
            if not is_feasible(state["instance"], incumbent):
                incumbent = self._merge(state, ())
            raise BudgetExceededError(str(e), incumbent=incumbent) from None

    @staticmethod
    def _merge(state: Dict[str, Any], matching: Sequence[int]) -> Solution:
        values = [0] * state["instance"].n
        for i, m in zip(state["directed"], state["greedy_solution"].multiplicity):
            values[i] = m
        for i, m in zip(state["crossing"], matching):
            values[i] = m
        return Solution(tuple(values))

    def _stage_merge(self, state: Dict[str, Any]) -> None:
        instance: Instance = state["instance"]
        solution = self._merge(state, state["matching"])
        if not is_feasible(instance, solution):
            raise PreconditionError("merged solution overloads the original instance")
        state["solution"] = solution


def solve_shared_vertex_paths(instance: Instance, budget: Optional[SolveBudget] = None) -> Solution:
    return SharedVertexPathsPlan(budget).execute(instance)["solution"]
