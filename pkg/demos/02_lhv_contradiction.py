"""
No local model fits both contexts
=================================

A local model fixes each particle's detector response (E, F, or none) from its
own hidden variables and its own interferometer. The interferometers are the
same in both contexts, so a model must reproduce both behaviours with one set of
weights over the 9 deterministic responses. That is a linear feasibility
problem.
"""
# %%
from pairpaths import (
    behavior_from_quantum,
    build_scheme_a,
    build_scheme_b,
    contradiction_fraction,
    evolve,
    lhv_feasible,
    outcome_distribution,
    verify_certificate,
)

beh_a = behavior_from_quantum(outcome_distribution(evolve(build_scheme_a())))
beh_b = behavior_from_quantum(outcome_distribution(evolve(build_scheme_b())))
print("context a:", beh_a)
print("context b:", beh_b)

# %%
# The LP is infeasible. The certificate is a linear functional over the
# constraint rows: it is <= 0 on every deterministic response but > 0 on the
# observed data. Here it reads "the e-e+ cell is 0 in (a) and 1/4 in (b)".
result = lhv_feasible(beh_a, beh_b)
print(type(result).__name__, result.certificate)
print("certificate verifies:", verify_certificate(result.certificate, beh_a, beh_b))

# %%
# Half of the runs in context (b) land in cells that context (a) forbids.
print("contradiction fraction:", contradiction_fraction(beh_a, beh_b))

# %%
# Identical behaviours are always reproducible; the weights are the cell masses.
print(lhv_feasible(beh_b, beh_b).weights)
