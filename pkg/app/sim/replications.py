import logging
from concurrent.futures import ProcessPoolExecutor

from tqdm import tqdm

from app.config import config
from app.core.model import Scenario
from app.sim.engine import RawCounters, run
from app.sim.events import EventLog


LOGGER = logging.getLogger(__name__)


def _run_counters(job: tuple[Scenario, int]) -> RawCounters:
    scenario, seed = job
    return run(scenario, seed)[1]


def replication_seeds(scenario: Scenario) -> list[int]:
    return [scenario.run.seed + index for index in range(scenario.run.replications)]


def run_replications(
    scenario: Scenario,
    *,
    workers: int | None = None,
    progress: bool | None = None,
    record_first: bool = False,
) -> tuple[list[RawCounters], EventLog | None]:
    """
    Runs every replication (seed = base seed + index), in worker processes
    when `workers` > 1. Results keep replication order; only the first
    replication records an event log, on request.
    """
    workers = config.workers if workers is None else workers
    progress = config.progress if progress is None else progress
    seeds = replication_seeds(scenario)

    log = None
    counters: list[RawCounters] = []
    pending = seeds
    if record_first:
        log, first = run(scenario, seeds[0], record=True)
        counters.append(first)
        pending = seeds[1:]

    jobs = [(scenario, seed) for seed in pending]
    bar = tqdm(total=len(seeds), initial=len(counters), disable=not progress, desc="replications")
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for result in pool.map(_run_counters, jobs):
                    counters.append(result)
                    bar.update(1)
        else:
            for job in jobs:
                counters.append(_run_counters(job))
                bar.update(1)
    finally:
        bar.close()

    LOGGER.info(
        "sim.replications.complete scenario=%s replications=%s workers=%s",
        scenario.identity(),
        len(counters),
        workers,
    )
    return counters, log
