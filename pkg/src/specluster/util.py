"""Small shared helpers: seeding, worker counts, artifact hashing."""

import hashlib
import os

import numpy as np

THREADS_ENV = "SPECLUSTER_THREADS"


def seed_sequence(seed):
    """Coerce an int or SeedSequence into a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def rng_from(seed):
    return np.random.default_rng(seed_sequence(seed))


def max_workers(n_tasks, requested=None):
    """Worker count for parallel sections, capped by SPECLUSTER_THREADS."""
    if n_tasks <= 1:
        return 1
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        if env is not None:
            try:
                requested = int(env)
            except ValueError:
                requested = 1
        else:
            requested = min(4, os.cpu_count() or 1)
    return max(1, min(requested, n_tasks))


def config_digest(items):
    """Short stable hash of key/value pairs, for artifact provenance lines."""
    canon = "\n".join(f"{k}={items[k]}" for k in sorted(items))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def fmt(value):
    """Deterministic CSV formatting for floats and ints."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isnan(v):
        return "nan"
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)
