# tools/exact_methods.py
import logging
from typing import Dict

from exact_solvers import SolveBudget, brute_force_opt
from instance_gen import GenConfig, Shape
from plans.shared_vertex_plan import solve_shared_vertex_paths
from tree_core import Instance, PreconditionError, Solution

logger = logging.getLogger(__name__)


class ExactMethodTool:
    """Base class for the exact methods the experiment harness can compare against."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    def check_config(self, config: GenConfig) -> None:
        """Raises PreconditionError if instances drawn from `config` are out of scope."""

    def execute(self, instance: Instance, budget: SolveBudget) -> Solution:
        raise NotImplementedError(f"{self.name} has not implemented execute.")


class OracleTool(ExactMethodTool):
    def __init__(self):
        super().__init__(name="oracle", description="Branch-and-bound over per-subtree multiplicities.")

    def execute(self, instance: Instance, budget: SolveBudget) -> Solution:
        return brute_force_opt(instance, budget)


class SharedVertexPathsTool(ExactMethodTool):
    def __init__(self):
        super().__init__(
            name="shared",
            description="Directed-path greedy plus hierarchical b-matching on root-crossing paths.",
        )

    def check_config(self, config: GenConfig) -> None:
        if config.shape not in (Shape.ROOT_CROSSING_PATHS, Shape.DIRECTED_PATHS):
            raise PreconditionError(
                f"the shared-vertex method needs root-crossing or directed paths, not shape '{config.shape.value}'"
            )

    def execute(self, instance: Instance, budget: SolveBudget) -> Solution:
        return solve_shared_vertex_paths(instance, budget)


EXACT_METHODS: Dict[str, ExactMethodTool] = {tool.name: tool for tool in (OracleTool(), SharedVertexPathsTool())}


def get_exact_method(name: str) -> ExactMethodTool:
    tool = EXACT_METHODS.get(name)
    if tool is None:
        raise PreconditionError(f"unknown exact method '{name}' (choose from {', '.join(sorted(EXACT_METHODS))})")
    return tool
