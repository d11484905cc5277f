"""
Simulated runs
==============

Sampling draws individual runs from the exact outcome distribution with a
counter-based SplitMix64 stream, so the same seed always gives the same tally
and chunked sampling in threads gives exactly the sequential result.
"""
# %%
from pairpaths import build_scheme_a, build_scheme_b, frequencies, sample, sample_chunked

for scheme in (build_scheme_a(), build_scheme_b()):
    tally = sample(scheme, 100_000, seed=42)
    print(scheme.name, tally.counts)
    for cell, (p, se) in frequencies(tally).items():
        print(f"   {cell:<9} {p:.4f} +- {se:.4f}")

# %%
# Cells with probability zero never show up, whatever the seed or run count.
print(sample(build_scheme_a(), 1_000_000, seed=7).counts["EE"])

# %%
seq = sample(build_scheme_b(), 250_000, seed=3)
par = sample_chunked(build_scheme_b(), 250_000, seed=3, chunk_size=10_000, workers=8)
print("chunked == sequential:", seq == par)
