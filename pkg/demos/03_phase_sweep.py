"""
Sweeping an intrinsic setting
=============================

Varying the phase between paths c and d of the minus interferometer moves the
surviving pair from the e-f+/f-e+ sector into the e-e+/f-f+ sector. At a
phase of pi, context (a) produces the same statistics as context (b).
"""
# %%
import numpy as np

from pairpaths import build_scheme_a, evolve, outcome_distribution
from pairpaths.circuit import with_phase

print(f"{'phase':>8} {'pEE':>8} {'pEF':>8} {'pFE':>8} {'pFF':>8} {'gamma':>8}")
for phi in np.linspace(0, np.pi, 9):
    d = outcome_distribution(evolve(with_phase(build_scheme_a(), "cd", phi, wing="minus")))
    print(f"{phi:8.4f} {d.pEE:8.4f} {d.pEF:8.4f} {d.pFE:8.4f} {d.pFF:8.4f} {d.gamma_total:8.4f}")

# %%
# The same grid through the command line (CSV, ready for plotting elsewhere):
#
#   pairpaths sweep --scheme a --param minus.phase_cd=0:pi:pi/8 --format csv
