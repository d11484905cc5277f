"""Phase-I simplex feasibility for ``A x = b, x >= 0``.

Works over ``fractions.Fraction`` (``eps=0``, exact) or ``float`` (``eps>0``).
When the system is infeasible the final Phase-I duals give a Farkas
certificate ``y`` with ``y^T A <= 0`` column-wise and ``y^T b > 0``.
Bland's rule is used throughout, so the pivot sequence (and therefore the
result) is deterministic and cycling cannot occur.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class LPOutcome:
    """Final Phase-I point, duals and optimal sum of artificials.

    ``objective == 0`` (exactly, or within the caller's tolerance) means ``x``
    is feasible; otherwise ``certificate`` is the Farkas functional.
    """
    x: list
    certificate: list
    objective: object


def phase_one(A: Sequence[Sequence], b: Sequence, eps=0, max_pivots: int = 10_000) -> LPOutcome:
    """``eps`` is the pivot tolerance; pass 0 for exact rational arithmetic."""
    m = len(A)
    n = len(A[0]) if m else 0
    exact = eps == 0
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    def num(v):
        return Fraction(v) if exact else float(v)

    # flip rows so the artificial basis starts primal feasible
    signs = [(-1 if num(bi) < 0 else 1) for bi in b]
    rows = []
    for i in range(m):
        s = signs[i]
        row = [s * num(a) for a in A[i]]
        row += [one if k == i else zero for k in range(m)]
        row.append(s * num(b[i]))
        rows.append(row)
    basis = [n + i for i in range(m)]
    width = n + m

    # reduced costs of min sum(artificials); last entry is -objective
    cost = [zero] * (width + 1)
    for j in range(width + 1):
        if j < n or j == width:
            cost[j] = -sum((r[j] for r in rows), zero)
    for _ in range(max_pivots):
        enter = next((j for j in range(width) if cost[j] < -eps), None)
        if enter is None:
            break
        leave, best = None, None
        for i, r in enumerate(rows):
            if r[enter] > eps:
                ratio = r[-1] / r[enter]
                if (best is None or ratio < best - eps
                        or (abs(ratio - best) <= eps and basis[i] < basis[leave])):
                    leave, best = i, ratio
        if leave is None:
            # cannot happen in phase I (objective bounded below by 0)
            raise RuntimeError("unbounded phase-one problem")
        piv = rows[leave][enter]
        prow = [v / piv for v in rows[leave]]
        rows[leave] = prow
        for i, r in enumerate(rows):
            if i != leave and r[enter] != 0:
                f = r[enter]
                rows[i] = [v - f * p for v, p in zip(r, prow)]
        f = cost[enter]
        cost = [v - f * p for v, p in zip(cost, prow)]
        basis[leave] = enter
    else:
        raise RuntimeError("simplex pivot limit reached")

    objective = -cost[-1]
    # artificial column k started as e_k with cost 1, so its reduced cost is 1 - y_k
    y = [signs[k] * (one - cost[n + k]) for k in range(m)]
    x = [zero] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rows[i][-1]
    return LPOutcome(x=x, certificate=y, objective=objective)
