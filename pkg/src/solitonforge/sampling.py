"""Deterministic sampling of chart domains.

Verification routines sample parameter boxes with a seeded Halton sequence:
reproducible for a fixed seed, well spread for small sample counts, and
kept away from the domain boundary so finite-difference stencils stay inside.
"""

import os

import numpy as np
from scipy.stats import qmc


def domain_box(domain):
    """Normalize a domain spec to (lo, hi) arrays.

    Accepts a sequence of (lo, hi) pairs, one per parameter.
    """
    arr = np.asarray(domain, dtype=float)
    if arr.ndim == 1 and arr.size == 2:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2 or np.any(arr[:, 0] >= arr[:, 1]):
        raise ValueError(f"domain must be a list of (lo, hi) pairs, got {domain!r}")
    return arr[:, 0], arr[:, 1]


def sample_box(domain, n, seed=0, margin=0.0):
    """n low-discrepancy points in the open box, >= margin from each face.

    Returns an (n, k) array. ``margin`` may be a scalar or per-axis array;
    it is clipped to 40% of each axis length so the shrunken box stays valid.
    """
    lo, hi = domain_box(domain)
    if n < 1:
        raise ValueError("need at least one sample")
    m = np.broadcast_to(np.asarray(margin, dtype=float), lo.shape)
    m = np.minimum(m, 0.4 * (hi - lo))
    lo2, hi2 = lo + m, hi - m
    eng = qmc.Halton(d=len(lo), scramble=True, seed=seed)
    return lo2 + eng.random(n) * (hi2 - lo2)


def grid_box(domain, counts, margin=0.0):
    """Regular tensor grid over the box, margins as in sample_box.

    ``counts`` is an int or per-axis sequence; returns (prod(counts), k),
    in row-major (last axis fastest) order.
    """
    lo, hi = domain_box(domain)
    counts = np.broadcast_to(np.asarray(counts, dtype=int), lo.shape)
    if np.any(counts < 2):
        raise ValueError("need at least 2 grid points per axis")
    m = np.broadcast_to(np.asarray(margin, dtype=float), lo.shape)
    m = np.minimum(m, 0.4 * (hi - lo))
    axes = [np.linspace(lo[i] + m[i], hi[i] - m[i], counts[i]) for i in range(len(lo))]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([ax.ravel() for ax in mesh])


def worker_count():
    """Parallel sampling width: SOLITON_FORGE_THREADS, else cpu count."""
    env = os.environ.get("SOLITON_FORGE_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValueError(f"SOLITON_FORGE_THREADS must be an integer, got {env!r}") from exc
        return max(1, cap)
    return os.cpu_count() or 1


def map_samples(fn, samples):
    """Apply fn to each sample, result order fixed by input order.

    Uses a thread pool of ``worker_count()`` workers when more than one is
    allowed; results are collected per index, so any reduction done by the
    caller sees a deterministic order regardless of scheduling.
    """
    samples = list(samples)
    width = worker_count()
    if width <= 1 or len(samples) < 4:
        return [fn(s) for s in samples]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=width) as pool:
        return list(pool.map(fn, samples))
