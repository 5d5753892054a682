import asyncio
import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, List, Optional

from ..core.config import Config

logger = logging.getLogger(__name__)


@dataclass
class BatchConfig:
    batch_size: int = 2000
    workers: int = 4

    @classmethod
    def from_config(cls, cfg=None) -> "BatchConfig":
        cfg = cfg or Config
        get = cfg.get if isinstance(cfg, dict) else (lambda key, default=None: getattr(cfg, key, default))
        return cls(batch_size=int(get("BATCH_SIZE", 2000)), workers=int(get("WORKERS", 4)))

    def batches(self, total: int):
        """Contiguous [start, stop) trial ranges."""
        size = max(1, self.batch_size)
        return [(start, min(start + size, total)) for start in range(0, total, size)]


class TrialProgress:
    """Counts finished trials and batches; logs each batch at debug level."""

    def __init__(self, total: int, label: str = "trials"):
        self.total = total
        self.label = label
        self.processed = 0
        self.batches_done = 0
        self.start_time = time.time()
        self._lock = asyncio.Lock()

    async def update(self, count: int):
        async with self._lock:
            self.processed += count
            self.batches_done += 1
            logger.debug(f"[Batching] {self.label}: {self.processed}/{self.total} ({self.percentage:.1f}%)")

    @property
    def percentage(self) -> float:
        return (self.processed / self.total * 100) if self.total > 0 else 100.0

    @property
    def elapsed_time(self) -> float:
        return time.time() - self.start_time


async def _run_batches(total: int, batch_fn: Callable[[int, int], Any], config: BatchConfig,
                       progress: TrialProgress) -> List[Any]:
    semaphore = asyncio.Semaphore(max(1, config.workers))

    async def run_one(start: int, stop: int):
        async with semaphore:
            result = await asyncio.to_thread(batch_fn, start, stop)
        await progress.update(stop - start)
        return result

    # gather keeps submission order, so results line up with batch indices
    return await asyncio.gather(*(run_one(start, stop) for start, stop in config.batches(total)))


def run_batches(total: int, batch_fn: Callable[[int, int], Any], config: Optional[BatchConfig] = None,
                label: str = "trials") -> List[Any]:
    """
    Run batch_fn(start, stop) over contiguous trial ranges on worker threads.

    Returns the batch results in batch order; callers merge them in that
    order, which makes the merged result independent of the worker count.

    Workers are threads, so batches only run in parallel while they sit in
    numpy calls that release the GIL. The per-step word and point updates
    are pure Python and serialise; `workers` bounds how many batches are in
    flight, not how many cores are used.
    """
    config = config or BatchConfig.from_config()
    if total <= 0:
        return []
    progress = TrialProgress(total, label)
    loop = asyncio.new_event_loop()
    try:
        results = loop.run_until_complete(_run_batches(total, batch_fn, config, progress))
    finally:
        loop.close()
    logger.debug(f"[Batching] {label}: {total} trials in {progress.batches_done} batches, "
                 f"{progress.elapsed_time:.2f}s")
    return results
