# infrastructure/tasks.py
from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from config import Config
from infrastructure.logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(n_jobs: Optional[int] = None) -> int:
    """
    Worker count for joblib. None falls back to Config.PTLAB_JOBS; 0 means all cores.
    """
    if n_jobs is None:
        n_jobs = Config.PTLAB_JOBS
    if n_jobs <= 0:
        return -1
    return n_jobs


def run_parallel(func: Callable[[T], R], items: Iterable[T], n_jobs: Optional[int] = None) -> List[R]:
    """
    Evaluate func over items, possibly on several worker processes.

    Results come back in input order, so callers aggregate deterministically
    regardless of how work was scheduled.
    """
    work = list(items)
    jobs = resolve_jobs(n_jobs)
    if jobs == 1 or len(work) <= 1:
        return [func(item) for item in work]
    logger.debug("Dispatching %d work units to %s workers", len(work), jobs)
    return Parallel(n_jobs=jobs)(delayed(func)(item) for item in work)
