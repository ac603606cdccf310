from .csvio import RUN_HEADER, SUMMARY_HEADER, MalformedCsvError, ResultRow, read_rows
from .runner import BudgetGuard, RunConfig, execute_run, run_config_to_files

__all__ = [
    "BudgetGuard",
    "MalformedCsvError",
    "ResultRow",
    "RunConfig",
    "RUN_HEADER",
    "SUMMARY_HEADER",
    "execute_run",
    "read_rows",
    "run_config_to_files",
]
