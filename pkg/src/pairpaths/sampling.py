"""Seeded, reproducible sampling of experiment runs.

Generator: counter-based SplitMix64. Draw number ``k`` (0-based, global across
all chunks) uses the 64-bit word::

    z = seed + (k + 1) * 0x9E3779B97F4A7C15            (mod 2**64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9           (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB           (mod 2**64)
    z =  z ^ (z >> 31)
    u = (z >> 11) * 2**-53                             in [0, 1)

and the run's outcome is the first cell whose cumulative probability exceeds
``u``, cells ordered EE, EF, FE, FF, then gamma labels sorted. Zero-probability
cells are left out of the table, so they can never be drawn. A chunk
covering draws ``[start, start + n)`` is sampled with ``start`` as its counter
offset, which is why chunked and sequential sampling agree exactly.
"""
from __future__ import annotations

import functools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Scheme
from .evolution import evolve, outcome_distribution

DEFAULT_SEED = 20240229
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, start: int, n: int) -> np.ndarray:
    """Words for counters ``start .. start + n - 1`` as uint64."""
    counters = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + counters * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, start: int, n: int) -> np.ndarray:
    return (splitmix64(seed, start, n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True)
class RunTally:
    counts: dict = field(default_factory=dict)
    n: int = 0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if sum(self.counts.values()) != self.n:
            raise ValueError("tally counts do not sum to n")

    def to_json(self) -> str:
        return json.dumps({"cells": self.counts, "n": self.n, "seed": self.seed})

    @classmethod
    def from_json(cls, text: str) -> "RunTally":
        data = json.loads(text)
        return cls({str(k): int(v) for k, v in data["cells"].items()},
                   int(data["n"]), int(data["seed"]))


def _cell_table(scheme: Scheme):
    probs = outcome_distribution(evolve(scheme)).cells()
    return list(probs), np.array(list(probs.values()), dtype=float)


def _draw(names, probs, seed: int, start: int, n: int) -> dict:
    live = np.flatnonzero(probs > 0)
    cdf = np.cumsum(probs[live])
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    picks = np.searchsorted(cdf, uniforms(seed, start, n), side="right")
    hits = np.bincount(picks, minlength=len(live))
    counts = {name: 0 for name in names}
    for slot, idx in enumerate(live):
        counts[names[idx]] = int(hits[slot])
    return counts


def sample(scheme: Scheme, n: int, seed: int = DEFAULT_SEED, start: int = 0) -> RunTally:
    """``n`` runs of ``scheme`` using draw counters ``start .. start + n - 1``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    names, probs = _cell_table(scheme)
    if n == 0:
        return RunTally({name: 0 for name in names}, 0, seed)
    return RunTally(_draw(names, probs, seed, start, n), n, seed)


def sample_chunked(scheme: Scheme, n: int, seed: int = DEFAULT_SEED,
                   chunk_size: int = 65536, workers: int | None = None) -> RunTally:
    """Same tally as ``sample(scheme, n, seed)``, computed chunk by chunk in threads."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if chunk_size <= 0:
        raise ValueError("chunk_size must be positive")
    starts = list(range(0, n, chunk_size))
    if not starts:
        return sample(scheme, 0, seed)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda s: sample(scheme, min(chunk_size, n - s), seed, start=s), starts))
    return functools.reduce(merge, parts)


def _lineage(s1: int, s2: int) -> int:
    # order-independent mix of two distinct seeds
    lo, hi = sorted((s1, s2))
    return int(splitmix64(lo ^ ((hi * 0x9E3779B97F4A7C15) & _MASK64), 0, 1)[0])


def merge(t1: RunTally, t2: RunTally) -> RunTally:
    """Cell-wise sum; an empty tally is the identity and equal seeds are kept."""
    if t2.n == 0 and not any(k not in t1.counts for k in t2.counts):
        return t1
    if t1.n == 0 and not any(k not in t2.counts for k in t1.counts):
        return t2
    counts = dict(t1.counts)
    for k, v in t2.counts.items():
        counts[k] = counts.get(k, 0) + v
    seed = t1.seed if t1.seed == t2.seed else _lineage(t1.seed, t2.seed)
    return RunTally(counts, t1.n + t2.n, seed)


def frequencies(t: RunTally) -> dict[str, tuple[float, float]]:
    """cell -> (estimate, binomial standard error)."""
    if t.n <= 0:
        raise ValueError("no runs to estimate frequencies from")
    out = {}
    for cell, count in t.counts.items():
        p = count / t.n
        out[cell] = (p, math.sqrt(p * (1 - p) / t.n))
    return out
