"""Shapley value computation: exact enumeration and multi-chain sampling.

The exact path enumerates every subset (guarded to small n) and exists as
the reference the sampler is checked against.  The sampling path draws, per
chain, T subsets with sizes uniform on ``[ceil(s/2), s]``, scores the
members of each subset by removing them one at a time in random order, and
averages per-chain means across chains.

Scale note: dividing by T counts iterations where an instance was never
sampled as zero contributions, so estimates are biased toward zero relative
to exact Shapley values (for an additive game the expectation is
``w_i * E[|S_t|] / n``).  Downstream selection consumes ranks only, which
the bias does not disturb.  ``normalization="inclusions"`` divides by each
instance's inclusion count instead, for study.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from .datatypes import SamplingConfig, ValuationResult, ValueFunction

#: Exact enumeration visits 2**n subsets; refuse anything bigger than this.
EXACT_GUARD_N = 20

_MASK64 = 0xFFFFFFFFFFFFFFFF


def chain_seed(master_seed: int, chain_index: int) -> int:
    """Derive the 64-bit seed of one chain from the master seed.

    Counter-based mix so chains are independent and each one can be rerun
    in isolation.  Reference implementation (all arithmetic mod 2**64),
    the finalizer of the splitmix64 generator:

        z = master_seed + (chain_index + 1) * 0x9E3779B97F4A7C15
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)
    """
    z = (master_seed + (chain_index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ChainResult:
    """Per-chain aggregate: mean contribution per instance over T iterations."""

    chain_index: int
    mean_contributions: np.ndarray
    inclusion_counts: np.ndarray


def exact_shapley(value_fn: ValueFunction, n: int, guard: int = EXACT_GUARD_N) -> ValuationResult:
    """Average marginal contribution over all subsets, by full enumeration.

    Each of the 2**n distinct subsets is evaluated exactly once.  The weight
    of a subset pair (S, S+{i}) is 1 / (n * C(n-1, |S|)), i.e. marginals are
    averaged uniformly over subset sizes and uniformly within a size, which
    makes the values sum to v(D) - v(empty).
    """
    if n > guard:
        raise ValueError(f"exact enumeration guarded to n <= {guard}, got n={n}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return ValuationResult(np.zeros(0), method="exact", config_echo={"n": 0})

    masks = np.arange(1 << n, dtype=np.int64)
    table = np.empty(1 << n)
    for mask in masks:
        table[mask] = value_fn(np.flatnonzero((mask >> np.arange(n)) & 1))

    sizes = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        sizes += (masks >> i) & 1
    # weight by |S| for the pair (S, S + {i}), S excluding i
    size_weight = np.array([1.0 / (n * comb(n - 1, s)) for s in range(n)])

    values = np.empty(n)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        gains = table[without | bit] - table[without]
        values[i] = float(np.sum(size_weight[sizes[without]] * gains))
    return ValuationResult(values, method="exact", config_echo={"n": n})


def run_chain(
    value_fn: ValueFunction,
    n: int,
    config: SamplingConfig,
    chain_index: int,
) -> ChainResult:
    """One sampling chain: T iterations of sample-then-strip-one-at-a-time.

    Every iteration draws a subset size uniformly from [ceil(s/2), s], a
    subset of that size uniformly without replacement, then removes members
    in uniformly random order; each removal contributes the value drop it
    caused to the removed instance.  Instances outside the subset get zero
    for that iteration.  Needs |S_t| + 1 value evaluations per iteration.
    """
    config.check(n)
    if chain_index < 0:
        raise ValueError(f"chain_index must be >= 0, got {chain_index}")
    rng = np.random.Generator(np.random.PCG64(chain_seed(config.master_seed, chain_index)))
    s = config.subset_size_s
    low = (s + 1) // 2
    totals = np.zeros(n)
    inclusions = np.zeros(n, dtype=np.int64)

    for _ in range(config.iterations_t):
        size = int(rng.integers(low, s + 1))
        subset = rng.choice(n, size=size, replace=False)
        inclusions[subset] += 1
        removal_order = rng.permutation(subset)
        previous = value_fn(np.sort(removal_order))
        for j in range(size):
            current = value_fn(np.sort(removal_order[j + 1 :]))
            totals[removal_order[j]] += previous - current
            previous = current

    return ChainResult(
        chain_index=chain_index,
        mean_contributions=totals / config.iterations_t,
        inclusion_counts=inclusions,
    )


def estimate_values(
    value_fn: ValueFunction,
    n: int,
    config: SamplingConfig,
    threads: int = 1,
    normalization: str = "iterations",
) -> ValuationResult:
    """Average the per-chain means over chains 0..J-1.

    Chains run independently (optionally on a thread pool) and are summed
    in ascending chain_index order regardless of completion order, so the
    result is bit-identical for any thread count.
    """
    config.check(n)
    if normalization not in ("iterations", "inclusions"):
        raise ValueError(f"unknown normalization {normalization!r}")
    chains = range(config.chains_j)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: run_chain(value_fn, n, config, c), chains))
    else:
        results = [run_chain(value_fn, n, config, c) for c in chains]

    if normalization == "iterations":
        acc = np.zeros(n)
        for res in results:  # ascending chain_index
            acc += res.mean_contributions
        values = acc / config.chains_j
    else:
        totals = np.zeros(n)
        counts = np.zeros(n, dtype=np.int64)
        for res in results:
            totals += res.mean_contributions * config.iterations_t
            counts += res.inclusion_counts
        values = totals / np.maximum(counts, 1)

    echo = {
        "subset_size_s": config.subset_size_s,
        "iterations_t": config.iterations_t,
        "chains_j": config.chains_j,
        "master_seed": config.master_seed,
        "normalization": normalization,
    }
    return ValuationResult(values, method="ts_dshapley", config_echo=echo, seed=config.master_seed)


def memoized(value_fn: ValueFunction) -> ValueFunction:
    """Cache a value function by index set.

    Sound because value functions are deterministic by contract; useful when
    the same subsets recur (exact enumeration, small-n sampling).  Safe for
    concurrent callers: worst case a subset is computed twice with identical
    results.
    """
    cache: dict[bytes, float] = {}

    def cached(subset_indices: np.ndarray) -> float:
        key = np.sort(np.asarray(subset_indices, dtype=np.int64)).tobytes()
        hit = cache.get(key)
        if hit is None:
            hit = value_fn(subset_indices)
            cache[key] = hit
        return hit

    return cached
