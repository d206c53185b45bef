""" Seeding, parallel execution and report helpers
"""
import dataclasses
from datetime import datetime, timezone
import enum
import json
import logging

import joblib
import numpy as np

logger = logging.getLogger('robj2r')

DEFAULT_SEED = 0


# SEEDING
def seed_sequence(seed, *key):
    """ Counter-based child seed: the same ``(seed, key)`` always gives the
    same stream, whatever order or worker it is requested from

    Args:
        seed (int): root seed
        key (int): path of counters (replicate, attempt, ...)

    Returns:
        np.random.SeedSequence: child seed sequence

    """
    seed = DEFAULT_SEED if seed is None else int(seed)
    return np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))


def rng_for(seed, *key):
    """ ``np.random.Generator`` for :func:`seed_sequence` ``(seed, *key)`` """
    return np.random.default_rng(seed_sequence(seed, *key))


def int_seed(seed, *key):
    """ 32-bit integer seed, for APIs wanting ``random_state`` integers """
    return int(seed_sequence(seed, *key).generate_state(1)[0])


# PARALLELISM
def parallel_map(func, items, n_jobs=1):
    """ Ordered ``[func(item) for item in items]``, optionally with joblib

    Output order follows ``items`` regardless of ``n_jobs``.
    """
    items = list(items)
    if n_jobs is None or n_jobs == 1 or len(items) < 2:
        return [func(item) for item in items]
    return joblib.Parallel(n_jobs=n_jobs)(joblib.delayed(func)(item)
                                          for item in items)


# REPORTS
def to_jsonable(obj):
    """ Recursively convert NumPy, dataclass and enum values for ``json`` """
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, 'to_dict'):
            return to_jsonable(obj.to_dict())
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if np.isfinite(obj) else None
    return obj


def dumps_report(report):
    """ Deterministic JSON text (sorted keys) """
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + '\n'


def write_json(report, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps_report(report))
    logger.info('Wrote report to %s', path)


def timestamp():
    return datetime.now(timezone.utc).isoformat(timespec='seconds')
