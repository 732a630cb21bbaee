# config/settings.py
import logging
import os

from dotenv import load_dotenv

from exact_solvers import SolveBudget

load_dotenv()

APP_ENV = os.getenv("APP_ENV", "").lower()
LOG_LEVEL_NAME = os.getenv("MSTBL_LOG_LEVEL", "WARNING").upper()
LOG_LEVEL = logging.DEBUG if APP_ENV == "development" else getattr(logging, LOG_LEVEL_NAME, logging.WARNING)
LOG_FORMAT = "%(asctime)s - %(name)s:%(lineno)d - %(levelname)s - %(message)s"

DEFAULT_TRIALS = int(os.getenv("MSTBL_TRIALS", "200"))
BENCH_CONCURRENCY = int(os.getenv("MSTBL_BENCH_CONCURRENCY", "4"))
ORACLE_CACHE_SIZE = int(os.getenv("MSTBL_ORACLE_CACHE_SIZE", "1024"))

DEFAULT_BUDGET = SolveBudget(
    max_subtree_count=int(os.getenv("MSTBL_MAX_SUBTREES", "24")),
    max_node_count=int(os.getenv("MSTBL_MAX_NODES", "2000000")),
    max_expanded_copies=int(os.getenv("MSTBL_MAX_COPIES", "40")),
)
