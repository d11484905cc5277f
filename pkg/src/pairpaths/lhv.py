"""Local-hidden-variable feasibility for the two annihilation contexts.

Each wing's detector outcome (E, F, or no detection) is fixed in advance by
that particle's hidden variables and its own interferometer, which is the
same in both contexts. A deterministic model is therefore one pair of local
outcomes used for *both* contexts, and a general model is a probability
mixture over the 9 such pairs; mixtures over hidden variables of any
cardinality reduce to this simplex. Treating "no detection" (annihilation) as a
locally predetermined value is the modelling assumption of the argument.

Feasibility of reproducing two behaviours is a small LP (9 weights, 18 cell
rows plus normalisation) solved by :func:`pairpaths.lp.phase_one`.
"""
from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .evolution import OutcomeDistribution
from .lp import phase_one

BEHAVIOR_TOL = 1e-9
ZERO_CELL_TOL = 1e-12
PIVOT_EPS = 1e-13
MAX_EXACT_DENOMINATOR = 2 ** 20


class LHVError(ValueError):
    pass


class LocalOutcome(enum.Enum):
    DETECT_E = "E"
    DETECT_F = "F"
    NO_DETECT = "_"


_OUTCOMES = (LocalOutcome.DETECT_E, LocalOutcome.DETECT_F, LocalOutcome.NO_DETECT)
CELLS = tuple(m.value + p.value for m, p in itertools.product(_OUTCOMES, repeat=2))
DETECTION_CELLS = ("EE", "EF", "FE", "FF")


@dataclass(frozen=True)
class DeterministicStrategy:
    minus: LocalOutcome
    plus: LocalOutcome

    @property
    def cell(self) -> str:
        return self.minus.value + self.plus.value

    def __str__(self):
        return self.cell


class Behavior:
    """Joint distribution over the 9 local-outcome cells (keys like ``"EF"``, ``"_E"``, ``"__"``)."""

    __slots__ = ("probs",)

    def __init__(self, probs: Mapping[str, object], *, require_all: bool = False):
        unknown = set(probs) - set(CELLS)
        if unknown:
            raise LHVError(f"unknown behavior cells: {sorted(unknown)}")
        if require_all:
            missing = [c for c in CELLS if c not in probs]
            if missing:
                raise LHVError(f"missing behavior cells: {missing}")
        out = {}
        for c in CELLS:
            v = probs.get(c, 0)
            if isinstance(v, bool) or not isinstance(v, (int, float, Fraction)):
                raise LHVError(f"cell {c}: not a number: {v!r}")
            if isinstance(v, float) and not math.isfinite(v):
                raise LHVError(f"cell {c}: not finite")
            if v < 0:
                raise LHVError(f"cell {c}: negative mass {v}")
            out[c] = v
        total = sum(out.values())
        if abs(total - 1) > BEHAVIOR_TOL:
            raise LHVError(f"behavior sums to {float(total)!r}, not 1")
        self.probs = out

    def __getitem__(self, cell: str):
        return self.probs[cell]

    def __eq__(self, other):
        return isinstance(other, Behavior) and self.probs == other.probs

    def __repr__(self):
        nz = {c: v for c, v in self.probs.items() if v}
        return f"Behavior({nz})"

    def close_to(self, other: "Behavior", tol: float = BEHAVIOR_TOL) -> bool:
        return all(abs(self[c] - other[c]) <= tol for c in CELLS)

    def to_json(self) -> str:
        return json.dumps({c: float(self.probs[c]) for c in CELLS})

    @classmethod
    def from_json(cls, text: str) -> "Behavior":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LHVError(f"behavior file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise LHVError("behavior file must hold a JSON object")
        return cls(data, require_all=True)


@dataclass(frozen=True)
class Feasible:
    weights: dict  # DeterministicStrategy -> weight

    @property
    def feasible(self) -> bool:
        return True


@dataclass(frozen=True)
class Infeasible:
    """No LHV model exists.

    ``certificate`` maps constraint-row labels ``("a", cell)``, ``("b", cell)``
    and ``("norm",)`` to multipliers. It is ``None`` only for a product-form
    rejection, where the witness is ``reason`` instead. When a single cell
    already separates the behaviours, ``certificate`` is the two-row
    functional on that cell and the raw Phase-I duals sit in ``lp_certificate``.
    """
    certificate: dict | None
    reason: str = ""
    lp_certificate: dict | None = None

    @property
    def feasible(self) -> bool:
        return False


def behavior_from_quantum(d: OutcomeDistribution) -> Behavior:
    return Behavior({
        "EE": d.pEE, "EF": d.pEF, "FE": d.pFE, "FF": d.pFF,
        "__": d.gamma_total,
    })


def enumerate_strategies() -> list[DeterministicStrategy]:
    return [DeterministicStrategy(m, p) for m, p in itertools.product(_OUTCOMES, repeat=2)]


def strategy_behavior(s: DeterministicStrategy) -> Behavior:
    # carries no context argument: the same response is used in both contexts
    return Behavior({s.cell: 1})


def point_mass(cell: str) -> Behavior:
    return Behavior({cell: 1})


def mixture(weights: Mapping[DeterministicStrategy, float]) -> Behavior:
    probs = {c: 0 for c in CELLS}
    for s, w in weights.items():
        probs[s.cell] += w
    return Behavior(probs)


def _row_labels():
    return [("a", c) for c in CELLS] + [("b", c) for c in CELLS] + [("norm",)]


def _system(a: Behavior, b: Behavior):
    strategies = enumerate_strategies()
    rows, rhs = [], []
    for ctx, beh in (("a", a), ("b", b)):
        for c in CELLS:
            rows.append([strategy_behavior(s)[c] for s in strategies])
            rhs.append(beh[c])
    rows.append([1] * len(strategies))
    rhs.append(1)
    return strategies, rows, rhs


def _is_exact(v) -> bool:
    if isinstance(v, (int, Fraction)):
        return True
    return Fraction(v).denominator <= MAX_EXACT_DENOMINATOR


def lhv_feasible(a: Behavior, b: Behavior, *, product_form: bool = False,
                 tol: float = BEHAVIOR_TOL):
    """Decide whether one LHV model reproduces behaviour ``a`` in context (a) and ``b`` in (b).

    Inputs whose entries are small-denominator rationals (0.25, 0.5, ...) are
    solved exactly over ``Fraction``; anything else goes through the float
    path at tolerance ``tol``. The LP rows pin each weight to its cell's
    probability, so a feasible weight vector is unique and no tie-break is
    needed. With ``product_form`` the weight table must also factor as
    ``w[m, p] = x[m] * y[p]``.
    """
    exact = all(_is_exact(v) for beh in (a, b) for v in beh.probs.values())
    strategies, rows, rhs = _system(a, b)
    if exact:
        rhs = [Fraction(v) for v in rhs]
        out = phase_one(rows, rhs, eps=0)
        ok = out.objective == 0
    else:
        out = phase_one(rows, [float(v) for v in rhs], eps=PIVOT_EPS)
        resid = [sum(r[j] * out.x[j] for j in range(len(strategies))) - v
                 for r, v in zip(rows, rhs)]
        ok = max(abs(v) for v in resid) <= tol

    if not ok:
        cert = dict(zip(_row_labels(), out.certificate))
        if not verify_certificate(cert, a, b, tol=tol):
            raise RuntimeError("LP returned a certificate that does not verify")
        short = _two_row_certificate(a, b, tol)
        return Infeasible(short or cert,
                          "no mixture of deterministic strategies fits both behaviors",
                          lp_certificate=cert)

    weights = {s: w for s, w in zip(strategies, out.x) if w}
    if not exact:
        weights = {s: float(w) for s, w in weights.items()}
    if product_form:
        defect = product_form_defect(weights)
        if defect > tol:
            return Infeasible(None, f"weight table is not rank one (defect {float(defect):.3g})")
    return Feasible(weights)


def product_form_defect(weights: Mapping[DeterministicStrategy, object]):
    """Largest |w[m,p] - x[m] y[p]| with x, y the marginals of the weight table.

    A nonnegative table summing to one is a product of nonnegative vectors iff
    it equals the outer product of its marginals.
    """
    table = {(s.minus, s.plus): w for s, w in weights.items()}
    row = {m: sum(table.get((m, p), 0) for p in _OUTCOMES) for m in _OUTCOMES}
    col = {p: sum(table.get((m, p), 0) for m in _OUTCOMES) for p in _OUTCOMES}
    return max(abs(table.get((m, p), 0) - row[m] * col[p])
               for m in _OUTCOMES for p in _OUTCOMES)


def _two_row_certificate(a: Behavior, b: Behavior, tol: float):
    """Sparsest functional: ``b[c] - a[c]`` on one cell, scanned in CELLS order."""
    for c in CELLS:
        diff = b[c] - a[c]
        if diff == 0:
            continue
        sign = 1 if diff > 0 else -1
        cert = {("a", c): -sign, ("b", c): sign}
        if verify_certificate(cert, a, b, tol=tol):
            return cert
    return None


def verify_certificate(cert: Mapping | None, a: Behavior, b: Behavior,
                       tol: float = BEHAVIOR_TOL) -> bool:
    """Re-check the Farkas conditions from scratch.

    For every strategy column the functional must be <= 0, and on the
    right-hand side it must be > 0. Rational inputs are checked exactly.
    """
    if not cert:
        return False
    labels = _row_labels()
    if set(cert) - set(labels):
        return False
    y = {lab: cert.get(lab, 0) for lab in labels}
    exact = all(isinstance(v, (int, Fraction)) for v in y.values()) and all(
        _is_exact(v) for beh in (a, b) for v in beh.probs.values())
    slack = 0 if exact else tol
    if exact:
        probs_a = {c: Fraction(a[c]) for c in CELLS}
        probs_b = {c: Fraction(b[c]) for c in CELLS}
    else:
        probs_a = {c: float(a[c]) for c in CELLS}
        probs_b = {c: float(b[c]) for c in CELLS}

    # strategy (m, p) contributes 1 to row (a, mp), row (b, mp) and the norm row
    for m, p in itertools.product(_OUTCOMES, repeat=2):
        cell = m.value + p.value
        if y["a", cell] + y["b", cell] + y["norm",] > slack:
            return False
    value = y["norm",] + sum(y["a", c] * probs_a[c] + y["b", c] * probs_b[c] for c in CELLS)
    return value > slack


def contradiction_fraction(a: Behavior, b: Behavior, *, symmetric: bool = False):
    """Mass ``b`` puts on joint detections that ``a`` never produces.

    With ``symmetric`` the roles are swapped, i.e. the mass ``a`` puts on
    detections forbidden by ``b``.
    """
    if symmetric:
        a, b = b, a
    return sum((b[c] for c in DETECTION_CELLS if abs(a[c]) <= ZERO_CELL_TOL), 0)
