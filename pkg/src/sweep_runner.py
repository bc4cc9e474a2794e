"""
Parallel runner for finite-section sweeps over (L, z0) pairs.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
Pair = Tuple[int, float]
ProgressCallback = Callable[[int, int, Pair, float], None]


class SweepRunner:
    """Run a function over (L, z0) pairs in a thread pool."""

    def __init__(self, workers: int = 4, progress: Optional[ProgressCallback] = None):
        """
        Initialize runner.

        Args:
            workers: Number of threads (LAPACK releases the GIL)
            progress: Called as progress(done, total, pair, seconds) per finished pair
        """
        self.workers = max(1, int(workers))
        self.progress = progress

    def run(self, fn: Callable[[int, float], T], pairs: Iterable[Pair]) -> List[Tuple[Pair, T]]:
        """
        Evaluate fn(L, z0) for every pair.

        Results are returned sorted by (L, z0) whatever the completion order,
        so merging is order-independent.

        Args:
            fn: Work function
            pairs: (L, z0) pairs; duplicates are run once

        Returns:
            List of ((L, z0), result)
        """
        unique = sorted(set((int(L), float(z0)) for L, z0 in pairs))
        total = len(unique)
        results = {}

        if self.workers == 1 or total <= 1:
            for done, pair in enumerate(unique, start=1):
                start = time.time()
                results[pair] = fn(*pair)
                self._report(done, total, pair, time.time() - start)
            return [(pair, results[pair]) for pair in unique]

        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            started = {}
            future_to_pair = {}
            for pair in unique:
                started[pair] = time.time()
                future_to_pair[executor.submit(fn, *pair)] = pair

            for done, future in enumerate(as_completed(future_to_pair), start=1):
                pair = future_to_pair[future]
                # Errors propagate to the caller; the sweep is all-or-nothing
                results[pair] = future.result()
                self._report(done, total, pair, time.time() - started[pair])

        return [(pair, results[pair]) for pair in unique]

    def _report(self, done: int, total: int, pair: Pair, seconds: float):
        logger.debug("[%d/%d] L=%d z0=%.6f done in %.3fs", done, total, pair[0], pair[1], seconds)
        if self.progress is not None:
            self.progress(done, total, pair, seconds)


def grid_pairs(Ls: Iterable[int], z0s: Iterable[float]) -> List[Pair]:
    """Cartesian product of truncation sizes and base points."""
    return [(L, z0) for L in Ls for z0 in z0s]
