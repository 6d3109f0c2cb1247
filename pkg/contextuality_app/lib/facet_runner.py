"""
Fans per-facet work out over worker threads and returns results in input order.

Called by:
    - contextuality_app.lib.acceptance
    - contextuality_app.management.commands.graph
    - contextuality_app.management.commands.alpha
"""

import functools
import logging
import pprint
from collections.abc import Callable, Sequence
from typing import TypeVar

import trio

log = logging.getLogger(__name__)

Item = TypeVar('Item')
Result = TypeVar('Result')


async def manage_facet_calls(fn: Callable[[Item], Result], items: Sequence[Item], threads: int) -> list[Result]:
    """
    Starts one task per item; each runs `fn` in a worker thread, at most `threads` at a time.

    Called by:
        - run_per_facet()
    """
    limiter = trio.CapacityLimiter(threads)
    results_holder_dct: dict[int, Result] = {}  # receives results as they're produced
    async with trio.open_nursery() as nursery:
        for index, item in enumerate(items):
            nursery.start_soon(run_one, fn, index, item, limiter, results_holder_dct)
    log.debug(f'finished indices, ```{pprint.pformat(sorted(results_holder_dct))}```')
    return [results_holder_dct[index] for index in range(len(items))]


async def run_one(
    fn: Callable[[Item], Result],
    index: int,
    item: Item,
    limiter: trio.CapacityLimiter,
    results_holder_dct: dict[int, Result],
) -> None:
    """
    Runs a single item and stores its result under its input index.

    Called by:
        - manage_facet_calls()
    """
    result = await trio.to_thread.run_sync(functools.partial(fn, item), limiter=limiter)
    ## update holder --------------------------------------------
    results_holder_dct[index] = result
    return


def run_per_facet(fn: Callable[[Item], Result], items: Sequence[Item], threads: int = 1) -> list[Result]:
    """
    Runs `fn` over `items`; with threads=1 runs inline, in order, without starting trio.
    """
    if threads < 1:
        raise ValueError(f'threads must be at least 1, got ``{threads}``')
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    try:
        return trio.run(manage_facet_calls, fn, items, threads)
    except ExceptionGroup as group:
        ## callers catch worker errors by type, so re-raise the first one unwrapped
        first: BaseException = group
        while isinstance(first, BaseExceptionGroup):
            first = first.exceptions[0]
        log.exception(f'per-facet run failed; ``{len(group.exceptions)}`` worker error(s)')
        raise first from group
