"""Deterministic random streams.

Every estimator splits its sample index range into fixed-size blocks. Block
``b`` of stream ``s`` under seed ``seed`` always draws from the same Philox
generator, so results do not depend on how blocks are spread over workers.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..core import Estimate, ParameterError

BLOCK_SIZE = 1 << 14
THREADS_ENV = "CONIC_GEOM_THREADS"


def check_seed(seed) -> int:
    if seed is None:
        raise ParameterError("a seed is required for randomized computations")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ParameterError("seed must be a 64-bit unsigned integer")
    return seed


def stream_id(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def map_blocks(fn, samples, seed, stream, threads=None, block_size=BLOCK_SIZE):
    """Call ``fn(rng, count)`` for every block and return results in block order."""
    samples = int(samples)
    if samples < 1:
        raise ParameterError("samples must be positive")
    if isinstance(stream, str):
        stream = stream_id(stream)
    nblocks = -(-samples // block_size)
    counts = [min(block_size, samples - b * block_size) for b in range(nblocks)]

    def run(b):
        return fn(block_rng(seed, stream, b), counts[b])

    threads = threads or default_threads()
    if threads == 1 or nblocks == 1:
        return [run(b) for b in range(nblocks)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(run, range(nblocks)))


def estimate_mean(fn, samples, seed, stream, threads=None, block_size=BLOCK_SIZE, max_discard=1e-3):
    """Monte Carlo mean of per-sample values produced by ``fn(rng, count)``.

    ``fn`` returns an array of ``count`` values; entries equal to ``nan`` mark
    degenerate trials. These are discarded and replaced with fresh draws from
    the same block generator. More than ``max_discard`` discarded trials
    overall raises ``RuntimeError``.
    """

    def block(rng, count):
        vals = np.asarray(fn(rng, count), dtype=float)
        bad = np.isnan(vals)
        discarded = int(bad.sum())
        vals = vals[~bad]
        retries = 0
        while len(vals) < count:
            retries += 1
            if retries > 50:
                raise RuntimeError("too many consecutive degenerate trials")
            extra = np.asarray(fn(rng, count - len(vals)), dtype=float)
            bad = np.isnan(extra)
            discarded += int(bad.sum())
            vals = np.concatenate([vals, extra[~bad]])
        return vals.sum(), np.square(vals).sum(), discarded

    seed = check_seed(seed)
    parts = map_blocks(block, samples, seed, stream, threads, block_size)
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    discarded = sum(p[2] for p in parts)
    if discarded > max_discard * samples:
        raise RuntimeError(f"{discarded} degenerate trials out of {samples} exceeds the allowed fraction")
    return summarize(s, s2, samples, seed, discarded)


def summarize(s, s2, samples, seed, discarded=0) -> Estimate:
    mean = s / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return Estimate(float(mean), float(np.sqrt(var / samples)), int(samples), int(seed), int(discarded))


def sample_gaussian(dim: int, stream: np.random.Generator, size=None) -> np.ndarray:
    """I.i.d. standard normal vector(s) of length ``dim``."""
    if dim < 1:
        raise ParameterError("dim must be >= 1")
    shape = (dim,) if size is None else (size, dim)
    return stream.standard_normal(shape)
