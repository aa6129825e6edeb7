"""Deterministic thread-parallel execution of independent work units.

Units are pure functions of their index (random streams are derived from the
master seed and the unit index, never shared), and results are merged in unit
order, so the output is bitwise identical for any thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def default_threads() -> int:
    return os.cpu_count() or 1


def run_units(fn, num_units: int, threads: int | None = None) -> list:
    """Evaluate fn(i) for i in range(num_units); results in index order."""
    threads = threads or default_threads()
    if threads <= 1 or num_units <= 1:
        return [fn(i) for i in range(num_units)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(num_units)))
