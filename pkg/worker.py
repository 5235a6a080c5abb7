"""
Worker pool for independent sweep items (grid points, protocol samples,
monotonicity and invariance samples).
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from config import Config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# below this many items a process pool costs more than it saves
MIN_PARALLEL_ITEMS = 4


class SweepWorker:
    """Runs a picklable task function over a batch of items."""

    def __init__(self, workers: Optional[int] = None, label: str = "sweep"):
        """
        Initialize the worker.

        Args:
            workers: Process cap; defaults to RBNLAB_THREADS
            label: Name used in log messages
        """
        self.workers = max(1, int(workers or Config.THREADS))
        self.label = label

    def run(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Apply `fn` to every item.

        Args:
            fn: Module-level function (or functools.partial of one)
            items: Work items

        Returns:
            Results in input order
        """
        items = list(items)
        if not items:
            return []
        logger.info(f"Running {len(items)} {self.label} tasks on {self._pool_size(len(items))} worker(s)")
        try:
            if self._pool_size(len(items)) == 1:
                results = [fn(item) for item in items]
            else:
                chunksize = max(1, len(items) // (self.workers * 8))
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    results = list(pool.map(fn, items, chunksize=chunksize))
            logger.info(f"Completed {len(results)} {self.label} tasks")
            return results
        except Exception as e:
            logger.error(f"Error running {self.label} tasks: {str(e)}")
            raise

    def _pool_size(self, count: int) -> int:
        if self.workers == 1 or count < MIN_PARALLEL_ITEMS:
            return 1
        return min(self.workers, count)


def run_parallel(
    fn: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    label: str = "sweep",
) -> List[R]:
    """Convenience wrapper around SweepWorker.run."""
    return SweepWorker(workers=workers, label=label).run(fn, items)
