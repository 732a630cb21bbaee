# main.py
"""Command-line front end: solve, generate, reduce and benchmark MSTBL instances."""
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click

from bench import run_ratio_experiment
from config.domains.experiments import EXPERIMENT_PRESETS
from config.settings import DEFAULT_BUDGET, DEFAULT_TRIALS, LOG_FORMAT, LOG_LEVEL
from exact_solvers import SolveBudget, brute_force_opt
from greedy_solver import OrderPolicy, SameRootOrder, bottom_up_greedy, is_maximal
from instance_gen import GenConfig, Shape, mis_to_star, random_instance, tightness_instance
from instance_io import parse_graph, parse_instance, serialize_instance, summarize_instance
from plans.shared_vertex_plan import solve_shared_vertex_paths
from tree_core import Instance, MSTBLError, Solution, is_feasible, load_vector

logger = logging.getLogger("MSTBL_CLI")


def _configure_logging() -> None:
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _read_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"wrote {path}")


def _report_solution(instance: Instance, solution: Solution, as_json: bool) -> None:
    # every solve checks its own output before printing
    if not is_feasible(instance, solution):
        raise MSTBLError("solver returned an infeasible selection")
    loads = load_vector(instance, solution)
    if as_json:
        payload: Dict[str, Any] = {
            "total": solution.total,
            "multiplicities": list(solution.multiplicity),
            "L_V": loads.L_V,
            "L_E": loads.L_E,
        }
        click.echo(json.dumps(payload))
        return
    click.echo(f"total: {solution.total}")
    click.echo("multiplicities: " + " ".join(f"{i}={m}" for i, m in enumerate(solution.multiplicity)))
    click.echo(f"L_V: {loads.L_V}")
    click.echo(f"L_E: {loads.L_E}")


def _parse_int_list(value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(token) for token in value.replace(",", " ").split()]
    except ValueError as e:
        raise click.BadParameter(f"expected a comma-separated list of integers, got {value!r}") from e


def _budget(subtrees: Optional[int], nodes: Optional[int], copies: Optional[int]) -> SolveBudget:
    return SolveBudget(
        max_subtree_count=subtrees or DEFAULT_BUDGET.max_subtree_count,
        max_node_count=nodes or DEFAULT_BUDGET.max_node_count,
        max_expanded_copies=copies or DEFAULT_BUDGET.max_expanded_copies,
    )


budget_options = [
    click.option("--max-subtrees", type=int, default=None, help="Largest subtree (or multigraph edge) count to attempt."),
    click.option("--max-nodes", "--budget", "max_nodes", type=int, default=None, help="Search node budget."),
    click.option("--max-copies", type=int, default=None, help="Largest total demand the oracle expands."),
]


def with_budget_options(command):
    for option in reversed(budget_options):
        command = option(command)
    return command


@click.group(help=__doc__)
def cli() -> None:
    pass


@cli.command("solve-greedy")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--order",
    type=click.Choice([o.value for o in SameRootOrder if o is not SameRootOrder.EXPLICIT_PERMUTATION]),
    default=SameRootOrder.INPUT_ORDER.value,
    show_default=True,
    help="Tie-break among subtrees sharing a root.",
)
@click.option("--permutation", default=None, help="Explicit subtree order (comma-separated indices); overrides --order.")
@click.option("--traversal", default=None, help="Custom post-order of the tree vertices (comma-separated).")
@click.option("--json", "as_json", is_flag=True, help="Print a JSON summary.")
def solve_greedy(file: str, order: str, permutation: Optional[str], traversal: Optional[str], as_json: bool) -> None:
    """Run the bottom-up greedy on an instance file."""
    instance = _read_instance(file)
    vertex_order = _parse_int_list(traversal)
    explicit = _parse_int_list(permutation)
    if explicit is not None:
        policy = OrderPolicy.explicit(explicit, vertex_order)
    else:
        policy = OrderPolicy(
            vertex_traversal=tuple(vertex_order) if vertex_order is not None else None,
            same_root_order=SameRootOrder(order),
        )
    solution, _ = bottom_up_greedy(instance, policy)
    if not is_maximal(instance, solution):
        raise MSTBLError("greedy returned a non-maximal selection")
    _report_solution(instance, solution, as_json)


@cli.command("solve-exact")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@with_budget_options
@click.option("--json", "as_json", is_flag=True, help="Print a JSON summary.")
def solve_exact(file: str, max_subtrees: Optional[int], max_nodes: Optional[int], max_copies: Optional[int], as_json: bool) -> None:
    """Compute the optimum by branch-and-bound (small instances only)."""
    instance = _read_instance(file)
    solution = brute_force_opt(instance, _budget(max_subtrees, max_nodes, max_copies))
    _report_solution(instance, solution, as_json)


@cli.command("solve-shared")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@with_budget_options
@click.option("--json", "as_json", is_flag=True, help="Print a JSON summary.")
def solve_shared(file: str, max_subtrees: Optional[int], max_nodes: Optional[int], max_copies: Optional[int], as_json: bool) -> None:
    """Solve a path instance whose paths are directed or cross the tree root."""
    instance = _read_instance(file)
    solution = solve_shared_vertex_paths(instance, _budget(max_subtrees, max_nodes, max_copies))
    _report_solution(instance, solution, as_json)


def _range(lo: Optional[int], hi: Optional[int], fallback: Any) -> Any:
    if lo is None and hi is None:
        return fallback
    if fallback is None:
        fallback = (lo if lo is not None else hi, hi if hi is not None else lo)
    return (lo if lo is not None else fallback[0], hi if hi is not None else fallback[1])


generator_options = [
    click.option("--seed", type=int, default=0, show_default=True, help="Random seed."),
    click.option("--preset", type=click.Choice(sorted(EXPERIMENT_PRESETS)), default=None, help="Start from an experiment preset."),
    click.option("--shape", type=click.Choice([s.value for s in Shape]), default=None, help="Kind of subtrees to draw."),
    click.option("--tree-min", type=int, default=None, help="Smallest tree size."),
    click.option("--tree-max", type=int, default=None, help="Largest tree size."),
    click.option("--count-min", type=int, default=None, help="Fewest subtrees."),
    click.option("--count-max", type=int, default=None, help="Most subtrees."),
    click.option("--cap-min", type=int, default=None, help="Smallest capacity (default: scaled to the load)."),
    click.option("--cap-max", type=int, default=None, help="Largest capacity."),
    click.option("--unbounded-fraction", type=float, default=None, help="Share of objects with unbounded capacity."),
    click.option("--demand-max", type=int, default=None, help="Largest subtree demand (compact form)."),
]


def with_generator_options(command):
    for option in reversed(generator_options):
        command = option(command)
    return command


def _gen_config(params: Dict[str, Any]) -> GenConfig:
    fields: Dict[str, Any] = {}
    if params.get("preset"):
        fields.update(EXPERIMENT_PRESETS[params["preset"]]["generator"])
    fields["seed"] = params["seed"]
    if params.get("shape"):
        fields["shape"] = params["shape"]
    if params.get("tree_min") is not None or params.get("tree_max") is not None:
        fields["tree_size_range"] = _range(params.get("tree_min"), params.get("tree_max"), fields.get("tree_size_range", (10, 20)))
    if params.get("count_min") is not None or params.get("count_max") is not None:
        fields["subtree_count_range"] = _range(params.get("count_min"), params.get("count_max"), fields.get("subtree_count_range", (5, 20)))
        fields.pop("subtree_factor_range", None)
    if params.get("cap_min") is not None or params.get("cap_max") is not None:
        fields["capacity_range"] = _range(params.get("cap_min"), params.get("cap_max"), None)
    if params.get("unbounded_fraction") is not None:
        fields["unbounded_fraction"] = params["unbounded_fraction"]
    if params.get("demand_max") is not None:
        fields["demand_range"] = (1, params["demand_max"])
    try:
        return GenConfig(**fields)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


@cli.command("gen-random")
@with_generator_options
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Instance file to write.")
@click.option("--summary", is_flag=True, help="Print the instance's size, M and total demand as JSON.")
def gen_random(output: str, summary: bool, **params: Any) -> None:
    """Write a seeded random instance."""
    instance = random_instance(_gen_config(params))
    _write_text(output, serialize_instance(instance))
    if summary:
        click.echo(json.dumps(summarize_instance(instance)))


@cli.command("reduce-mis")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Instance file to write.")
def reduce_mis(graph_file: str, output: str) -> None:
    """Build the star instance whose optimum is the graph's independence number."""
    graph = parse_graph(Path(graph_file).read_text(encoding="utf-8"))
    _write_text(output, serialize_instance(mis_to_star(graph)))


@cli.command("gen-tight")
@click.option("--m", "m", type=int, required=True, help="Number of star leaves (the M of the instance).")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Instance file to write.")
def gen_tight(m: int, output: str) -> None:
    """Write the instance on which the greedy is exactly M times worse than optimal."""
    _write_text(output, serialize_instance(tightness_instance(m)))


@cli.command("bench")
@with_generator_options
@click.option("--trials", type=int, default=DEFAULT_TRIALS, show_default=True, help="Number of instances.")
@click.option("--method", type=click.Choice(["oracle", "shared"]), default=None, help="Exact method (default: preset's, else oracle).")
@with_budget_options
@click.option("--concurrency", type=int, default=None, help="Trials run at once.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="CSV report to write.")
def bench(
    trials: int,
    method: Optional[str],
    max_subtrees: Optional[int],
    max_nodes: Optional[int],
    max_copies: Optional[int],
    concurrency: Optional[int],
    output: str,
    **params: Any,
) -> None:
    """Compare greedy totals with exact optima on seeded random instances."""
    config = _gen_config(params)
    if method is None:
        method = EXPERIMENT_PRESETS[params["preset"]]["exact_method"] if params.get("preset") else "oracle"
    report = run_ratio_experiment(
        config, trials, method, _budget(max_subtrees, max_nodes, max_copies), concurrency
    )
    _write_text(output, report.to_csv())
    click.echo(report.summary_text(), nl=False)


def cli_dispatch(argv: Sequence[str]) -> int:
    _configure_logging()
    try:
        result = cli.main(args=list(argv), prog_name="mstbl", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except MSTBLError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except Exception as e:
        logger.critical(f"CRITICAL UNHANDLED EXCEPTION: {e}", exc_info=True)
        return 3
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(cli_dispatch(sys.argv[1:]))
