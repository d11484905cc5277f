import math
import random

import pytest

from conftest import random_scheme
from pairpaths.circuit import build_scheme_a, build_scheme_b
from pairpaths.evolution import evolve, outcome_distribution
from pairpaths.sampling import (
    RunTally,
    frequencies,
    merge,
    sample,
    sample_chunked,
    splitmix64,
    uniforms,
)


def test_splitmix_reference_values():
    # published SplitMix64 outputs for a generator seeded with 0 (first three words)
    words = [int(w) for w in splitmix64(0, 0, 3)]
    assert words == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_uniforms_in_unit_interval():
    u = uniforms(123, 0, 10000)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.02


def test_empty_sample():
    t = sample(build_scheme_a(), 0, 5)
    assert t.n == 0 and sum(t.counts.values()) == 0


def test_zero_cells_never_drawn():
    t = sample(build_scheme_a(), 100000, 42)
    assert t.counts["EE"] == 0 and t.counts["FF"] == 0
    for seed in range(5):
        tb = sample(build_scheme_b(), 20000, seed)
        assert tb.counts["EF"] == 0 and tb.counts["FE"] == 0


def test_scheme_b_within_five_sigma():
    n = 100000
    t = sample(build_scheme_b(), n, 42)
    sigma = math.sqrt(0.25 * 0.75 / n)
    assert abs(t.counts["EE"] / n - 0.25) < 5 * sigma


def test_gamma_total_large_n():
    n = 10 ** 6
    t = sample(build_scheme_b(), n, 9)
    gamma = sum(v for k, v in t.counts.items() if k.startswith("gamma:")) / n
    assert abs(gamma - 0.5) < 5 * math.sqrt(0.25 / n)


def test_deterministic():
    assert sample(build_scheme_b(), 5000, 77) == sample(build_scheme_b(), 5000, 77)
    assert sample(build_scheme_b(), 5000, 77) != sample(build_scheme_b(), 5000, 78)


def test_frequencies():
    t = RunTally({"EF": 50, "FE": 50}, 100, 0)
    f = frequencies(t)
    assert f["EF"] == (0.5, pytest.approx(0.05))
    assert frequencies(RunTally({"EE": 10}, 10, 0))["EE"] == (1.0, 0.0)
    with pytest.raises(ValueError):
        frequencies(RunTally({}, 0, 0))


def test_merge_identity_and_commutative():
    t1 = sample(build_scheme_b(), 1000, 1)
    t2 = sample(build_scheme_b(), 1000, 2)
    empty = sample(build_scheme_b(), 0, 1)
    assert merge(t1, empty) == t1
    assert merge(empty, t1) == t1
    m12, m21 = merge(t1, t2), merge(t2, t1)
    assert m12.counts == m21.counts and m12.n == 2000
    assert m12.seed == m21.seed != t1.seed


def test_chunked_equals_sequential():
    for n, chunk in ((2000, 1000), (100000, 7777), (1, 64)):
        seq = sample(build_scheme_b(), n, 42)
        par = sample_chunked(build_scheme_b(), n, 42, chunk_size=chunk, workers=4)
        assert par == seq


def test_manual_chunk_derivation():
    # chunk k of size m samples counters k*m .. k*m+m-1
    n = 2000
    seq = sample(build_scheme_a(), 2 * n, 5)
    parts = [sample(build_scheme_a(), n, 5, start=k * n) for k in (1, 0)]
    assert merge(*parts) == seq


def test_random_scheme_frequencies():
    rng = random.Random(4)
    sch = random_scheme(rng)
    n = 200000
    t = sample(sch, n, 11)
    probs = outcome_distribution(evolve(sch)).cells()
    for cell, p in probs.items():
        se = math.sqrt(p * (1 - p) / n)
        assert abs(t.counts[cell] / n - p) <= 5 * se + 1e-12


def test_tally_json_round_trip():
    t = sample(build_scheme_a(), 100, 3)
    assert RunTally.from_json(t.to_json()) == t
