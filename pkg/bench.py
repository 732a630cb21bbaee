# bench.py
"""
Approximation-ratio experiments: generate seeded instances, run the greedy and
an exact method on each, and tabulate opt/greedy.
"""
import asyncio
import csv
import io
import logging
import threading
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from cachetools import LRUCache, cached
from cachetools.keys import hashkey

from config.settings import BENCH_CONCURRENCY, DEFAULT_BUDGET, ORACLE_CACHE_SIZE
from exact_solvers import SolveBudget
from greedy_solver import bottom_up_greedy, is_maximal
from instance_gen import GenConfig, random_instance
from tools.exact_methods import get_exact_method
from tree_core import BudgetExceededError, Instance, is_feasible

logger = logging.getLogger(__name__)

CSV_HEADER = ["seed", "tree_size", "subtree_count", "M", "greedy", "opt", "ratio"]

exact_cache: LRUCache = LRUCache(maxsize=ORACLE_CACHE_SIZE)


@cached(cache=exact_cache, key=lambda method, instance, budget: hashkey(method, instance, budget), lock=threading.RLock())
def exact_total(method: str, instance: Instance, budget: SolveBudget) -> int:
    solution = get_exact_method(method).execute(instance, budget)
    if not is_feasible(instance, solution):
        raise RuntimeError(f"exact method '{method}' returned an infeasible solution")
    return solution.total


@dataclass(frozen=True)
class RatioRow:
    seed: int
    tree_size: int
    subtree_count: int
    M: int
    greedy_total: int
    # exact optimum, or the best lower bound found when the budget ran out
    opt_total: int
    opt_exact: bool = True

    @property
    def ratio(self) -> Optional[float]:
        if not self.opt_exact:
            return None
        if self.greedy_total == 0:
            # greedy maximality: greedy 0 forces opt 0
            return 1.0
        return self.opt_total / self.greedy_total

    def csv_cells(self) -> List[str]:
        opt = str(self.opt_total) if self.opt_exact else f"budget_exceeded>={self.opt_total}"
        ratio = "" if self.ratio is None else f"{self.ratio:.6f}"
        return [str(self.seed), str(self.tree_size), str(self.subtree_count), str(self.M), str(self.greedy_total), opt, ratio]


@dataclass
class RatioReport:
    rows: List[RatioRow] = field(default_factory=list)

    @property
    def ratios(self) -> List[float]:
        return [row.ratio for row in self.rows if row.ratio is not None]

    @property
    def count(self) -> int:
        return len(self.rows)

    @property
    def budget_exceeded_count(self) -> int:
        return sum(1 for row in self.rows if not row.opt_exact)

    @property
    def max_ratio(self) -> Optional[float]:
        ratios = self.ratios
        return max(ratios) if ratios else None

    @property
    def mean_ratio(self) -> Optional[float]:
        ratios = self.ratios
        return float(np.mean(ratios)) if ratios else None

    def histogram(self, bins: Sequence[float] = (1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.8, 2.0)) -> List[Tuple[float, float, int]]:
        """(low, high, count) per bin; the last bin is closed and stretches to the largest ratio."""
        ratios = self.ratios
        edges = list(bins)
        if ratios and max(ratios) > edges[-1]:
            edges.append(max(ratios))
        counts, _ = np.histogram(ratios, bins=edges) if ratios else (np.zeros(len(edges) - 1, dtype=int), None)
        return [(edges[k], edges[k + 1], int(counts[k])) for k in range(len(edges) - 1)]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_cells())
        return buffer.getvalue()

    def summary_text(self) -> str:
        def fmt(value: Optional[float]) -> str:
            return "undefined" if value is None else f"{value:.6f}"

        lines = [
            f"count={self.count}",
            f"budget_exceeded={self.budget_exceeded_count}",
            f"max_ratio={fmt(self.max_ratio)}",
            f"mean_ratio={fmt(self.mean_ratio)}",
        ]
        if self.ratios:
            lines.append("histogram:")
            bins = self.histogram()
            for k, (lo, hi, count) in enumerate(bins):
                close = "]" if k == len(bins) - 1 else ")"
                lines.append(f"  [{lo:.2f}, {hi:.2f}{close} {count}")
        return "\n".join(lines) + "\n"


def _run_trial(config: GenConfig, method: str, budget: SolveBudget) -> RatioRow:
    instance = random_instance(config)
    greedy_solution, _ = bottom_up_greedy(instance)
    if not is_maximal(instance, greedy_solution):
        raise RuntimeError(f"seed {config.seed}: greedy selection is not maximal")
    greedy_total = greedy_solution.total
    try:
        opt_total, exact = exact_total(method, instance, budget), True
    except BudgetExceededError as e:
        incumbent = e.incumbent.total if e.incumbent is not None else 0
        opt_total, exact = max(greedy_total, incumbent), False
        logger.warning(f"seed {config.seed}: exact method '{method}' over budget, lower bound {opt_total}")
    return RatioRow(
        seed=config.seed,
        tree_size=instance.tree.vertex_count,
        subtree_count=instance.n,
        M=instance.M,
        greedy_total=greedy_total,
        opt_total=opt_total,
        opt_exact=exact,
    )


async def _run_trials(config: GenConfig, trials: int, method: str, budget: SolveBudget, concurrency: int) -> List[RatioRow]:
    semaphore = asyncio.Semaphore(concurrency)

    async def one(trial: int) -> RatioRow:
        trial_config = config.model_copy(update={"seed": config.seed + trial})
        async with semaphore:
            return await asyncio.to_thread(_run_trial, trial_config, method, budget)

    # gather keeps trial order regardless of completion order
    return list(await asyncio.gather(*(one(t) for t in range(trials))))


def run_ratio_experiment(
    config: GenConfig,
    trials: int,
    exact_method: str = "oracle",
    budget: Optional[SolveBudget] = None,
    concurrency: Optional[int] = None,
) -> RatioReport:
    """One row per trial; trial t uses seed config.seed + t."""
    if trials < 0:
        raise ValueError(f"trials must be nonnegative, got {trials}")
    get_exact_method(exact_method).check_config(config)
    budget = budget or DEFAULT_BUDGET
    logger.info(f"ratio experiment: {trials} trials, shape {config.shape.value}, exact method '{exact_method}'")
    if trials == 0:
        return RatioReport()
    rows = asyncio.run(_run_trials(config, trials, exact_method, budget, concurrency or BENCH_CONCURRENCY))
    report = RatioReport(rows=rows)
    logger.info(f"ratio experiment done: max {report.max_ratio}, mean {report.mean_ratio}")
    return report
