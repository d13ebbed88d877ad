"""Reproducible Monte Carlo substrate: splittable streams and block scheduling.

Streams are derived from a 64-bit root seed through a hierarchical path of
64-bit indices, backed by counter-based Philox.  Work is partitioned into a
*fixed* grid of logical blocks whose size never depends on how many workers
execute them, so merged results are identical for any worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

__all__ = [
    "RngStream",
    "BlockResult",
    "block_layout",
    "run_blocks",
    "proportion_stderr",
    "proportion_ci",
    "DEFAULT_BLOCK_SIZE",
]

# Samples per logical block.  Fixed so that the sample-to-block assignment is
# a pure function of (seed, n_total), never of the worker count.
DEFAULT_BLOCK_SIZE = 1 << 18

# Below this many hits the normal interval is unreliable; switch to Wilson.
WILSON_HIT_CUTOFF = 500


@dataclass(frozen=True)
class RngStream:
    """A named position in a tree of statistically independent random streams.

    Two streams with different (root_seed, path) pairs are independent;
    identical pairs reproduce identical output.  Instances are immutable and
    cheap; the heavyweight generator is materialized on demand.
    """

    root_seed: int
    path: tuple = ()

    def derive(self, index: int) -> "RngStream":
        """Child stream at ``index``; injective in ``index`` for a fixed parent."""
        return RngStream(self.root_seed, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        """Materialize a counter-based generator for this stream position."""
        seq = np.random.SeedSequence(self.root_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


@dataclass
class BlockResult:
    """Hit counts gathered by one logical block (or a merge of several).

    ``counts`` is an integer array (one cell per scored statistic); merging
    adds counts and sample sizes, so it is associative and commutative.
    """

    n_samples: int
    counts: np.ndarray
    block_index: int = -1
    extras: dict = field(default_factory=dict)

    @staticmethod
    def merge(results) -> "BlockResult":
        results = list(results)
        if not results:
            raise ValueError("nothing to merge")
        counts = np.zeros_like(results[0].counts)
        n = 0
        for r in results:
            counts += r.counts
            n += r.n_samples
        return BlockResult(n_samples=n, counts=counts)


def block_layout(n_total: int, block_size: int = DEFAULT_BLOCK_SIZE):
    """Partition ``n_total`` samples into fixed-size blocks.

    All blocks have ``block_size`` samples except the last, which takes the
    remainder.
    """
    if n_total <= 0:
        raise ValueError("n_total must be positive")
    if block_size <= 0:
        raise ValueError("block_size must be positive")
    sizes = []
    remaining = n_total
    while remaining > 0:
        take = min(block_size, remaining)
        sizes.append(take)
        remaining -= take
    return sizes


def run_blocks(task, n_total: int, stream: RngStream, *, workers: int = 1,
               block_size: int = DEFAULT_BLOCK_SIZE) -> BlockResult:
    """Execute ``task`` over the fixed logical-block grid and merge the counts.

    Parameters
    ----------
    task : callable
        ``task(generator, size) -> np.ndarray`` of integer counts.  Must draw
        all randomness from the passed generator.
    n_total : int
        Total number of samples across all blocks.
    stream : RngStream
        Root stream; block ``i`` uses ``stream.derive(i)``.
    workers : int
        Concurrent executors.  Results are invariant to this value.
    block_size : int
        Logical block size; changing it changes the sample-to-stream
        assignment (and therefore the samples), so leave it at the default
        for reproducible experiments.
    """
    sizes = block_layout(n_total, block_size)

    def one(i_size):
        i, size = i_size
        gen = stream.derive(i).generator()
        try:
            counts = task(gen, size)
        except Exception as exc:
            raise RuntimeError(f"block {i} failed: {exc}") from exc
        return BlockResult(n_samples=size, counts=np.asarray(counts), block_index=i)

    jobs = list(enumerate(sizes))
    if workers <= 1 or len(jobs) == 1:
        results = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, jobs))
    # Merge in block order so any float accumulation is order-fixed too.
    results.sort(key=lambda r: r.block_index)
    return BlockResult.merge(results)


def proportion_stderr(hits: int, n: int) -> float:
    p = hits / n
    return float(np.sqrt(max(p * (1.0 - p), 0.0) / n))


def proportion_ci(hits: int, n: int, level: float = 0.95):
    """Two-sided confidence interval for a binomial proportion.

    Normal approximation when hits are plentiful, Wilson score interval for
    rare events (where the normal interval under-covers badly).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    z = float(stats.norm.ppf(0.5 + level / 2.0))
    p = hits / n
    if hits >= WILSON_HIT_CUTOFF:
        half = z * proportion_stderr(hits, n)
        return max(p - half, 0.0), min(p + half, 1.0)
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)
