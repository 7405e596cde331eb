"""
Bounded worker pool for domain-level work units.

Runs independent units (one per domain, per matrix cell, per rendered line) on a
ThreadPoolExecutor, shows progress with tqdm and hands results back in unit order so
the assembled output never depends on completion order.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from threading import Lock
from typing import Any, Callable, Generic, List, Optional, Sequence, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class UnitFailure:
    """A unit that raised, kept so the caller can report every failure at once"""
    index: int
    unit: Any
    error: BaseException


@dataclass
class BatchResult(Generic[R]):
    """Results in submission order plus the failures collected along the way"""
    results: List[Optional[R]]
    failures: List[UnitFailure] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def raise_first(self) -> None:
        """Re-raise the failure of the lowest-index unit, if any."""
        if self.failures:
            first = min(self.failures, key=lambda failure: failure.index)
            raise first.error


class BatchRunner:
    """Process a sequence of work units with a bounded number of threads"""

    def __init__(self, max_workers: int = 4, desc: str = "Processing",
                 unit: str = "unit", show_progress: bool = False):
        """
        Args:
            max_workers: Upper bound on concurrent threads (1 runs inline)
            desc: Label for the progress bar
            unit: Unit name for the progress bar
            show_progress: Draw a tqdm bar on stderr
        """
        if max_workers < 1:
            raise ValueError("max_workers must be at least 1")
        self.max_workers = max_workers
        self.desc = desc
        self.unit = unit
        self.show_progress = show_progress
        self.lock = Lock()

    def run(self, fn: Callable[[T], R], units: Sequence[T]) -> BatchResult[R]:
        """
        Apply fn to every unit.

        Results are stored by unit index; a unit that raises is recorded as a failure
        and leaves None in its slot.
        """
        start_time = time.time()
        results: List[Optional[R]] = [None] * len(units)
        failures: List[UnitFailure] = []

        def _process(idx: int, item: T) -> None:
            try:
                value = fn(item)
            except Exception as e:
                logger.debug("unit %d failed: %s", idx, e)
                with self.lock:
                    failures.append(UnitFailure(idx, item, e))
                return
            with self.lock:
                results[idx] = value

        with tqdm(total=len(units), desc=self.desc, unit=self.unit,
                  disable=not self.show_progress) as pbar:
            if self.max_workers == 1 or len(units) <= 1:
                for idx, item in enumerate(units):
                    _process(idx, item)
                    pbar.update(1)
            else:
                with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                    futures = {
                        executor.submit(_process, idx, item): idx
                        for idx, item in enumerate(units)
                    }
                    for future in as_completed(futures):
                        future.result()
                        pbar.update(1)

        failures.sort(key=lambda failure: failure.index)
        elapsed = time.time() - start_time
        logger.debug("%s: %d units in %.2fs (%d failed)",
                     self.desc, len(units), elapsed, len(failures))
        return BatchResult(results=results, failures=failures, elapsed_seconds=elapsed)


def run_units(fn: Callable[[T], R], units: Sequence[T], max_workers: int = 1,
              desc: str = "Processing", show_progress: bool = False) -> List[R]:
    """Run fn over units and return results in order, re-raising the first failure."""
    batch = BatchRunner(max_workers=max_workers, desc=desc,
                        show_progress=show_progress).run(fn, units)
    batch.raise_first()
    return list(batch.results)
