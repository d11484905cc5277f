"""
Final states of the two annihilation contexts
=============================================

Both wings are identical three-splitter interferometers. The contexts differ
only in which stage-1 path pairs cross and annihilate: {a-, a+} and {b-, b+} in
context (a), {a-, b+} and {b-, a+} in context (b).
"""
# %%
# Propagate each context from |IN-, IN+> and print the final superposition.
from pairpaths import (
    BellKind,
    bell_overlap,
    build_scheme_a,
    build_scheme_b,
    evolve,
    outcome_distribution,
    postselect_survivors,
)

for scheme in (build_scheme_a(), build_scheme_b()):
    state = evolve(scheme)
    print(f"context ({scheme.name})")
    print(state)
    print()

# %%
# Squared amplitudes give the run statistics. Context (a) never yields a joint
# detection in e-e+ or f-f+; context (b) yields each a quarter of the time.
for scheme in (build_scheme_a(), build_scheme_b()):
    d = outcome_distribution(evolve(scheme))
    print(scheme.name, {k: round(v, 12) for k, v in d.cells().items()})

# %%
# Throwing away the annihilated runs leaves a Bell state in each context.
for scheme in (build_scheme_a(), build_scheme_b()):
    survivors = postselect_survivors(evolve(scheme))
    overlaps = {k.value: round(bell_overlap(survivors, k), 12) for k in BellKind}
    print(scheme.name, overlaps)
