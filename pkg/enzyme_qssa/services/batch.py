import asyncio
from typing import Callable, Iterable, List, Optional, TypeVar

from enzyme_qssa.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


async def bounded_gather(func: Callable[[T], R], items: Iterable[T], limit: Optional[int] = None) -> List[R]:
    """Run `func` over items in worker threads, at most `limit` at a time; results keep input order."""
    semaphore = asyncio.Semaphore(limit or settings.QSSA_MAX_WORKERS)

    async def run_one(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(func, item)

    return await asyncio.gather(*(run_one(item) for item in items))


def run_batch(func: Callable[[T], R], items: Iterable[T], limit: Optional[int] = None) -> List[R]:
    return asyncio.run(bounded_gather(func, list(items), limit))
