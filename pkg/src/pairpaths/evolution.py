"""Stage-by-stage propagation of the joint state through a scheme.

Pipeline from ``|IN-, IN+>``: stage 1 (+ ``phase_ab``), annihilation,
stage 2 (+ ``phase_cd``), stage 3. ``dense_oracle`` recomputes the same final
state with explicit 7x7 wing matrices and a 49x49 Kronecker product, and is
kept deliberately free of the sparse machinery.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import SQRT_HALF, Scheme, WingCircuit, check, splitter_coefficients
from .state import (
    STAGE_PATHS,
    Gamma,
    JointState,
    Pair,
    Path,
    inner_product,
    make_state,
    norm_squared,
)

NORM_TOL = 1e-9


class EvolutionError(ValueError):
    pass


@dataclass(frozen=True)
class OutcomeDistribution:
    pEE: float = 0.0
    pEF: float = 0.0
    pFE: float = 0.0
    pFF: float = 0.0
    pGamma: dict = field(default_factory=dict)

    @property
    def gamma_total(self) -> float:
        return math.fsum(self.pGamma.values())

    @property
    def total(self) -> float:
        return math.fsum([self.pEE, self.pEF, self.pFE, self.pFF, self.gamma_total])

    def cells(self) -> dict[str, float]:
        """Probabilities in the fixed sampling order: EE, EF, FE, FF, then gammas by label."""
        out = {"EE": self.pEE, "EF": self.pEF, "FE": self.pFE, "FF": self.pFF}
        for label in sorted(self.pGamma):
            out[f"gamma:{label}"] = self.pGamma[label]
        return out


class BellKind(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


def _wing_map(wing: WingCircuit, stage: int) -> dict[Path, list[tuple[Path, complex]]]:
    """Single-particle transfer for ``stage``: input path -> [(output path, amplitude)]."""
    u = splitter_coefficients(wing.splitter(stage))
    out1, out2 = STAGE_PATHS[stage]
    phase = {1: wing.phases.ab, 2: wing.phases.cd, 3: 0.0}[stage]
    kick = cmath.exp(1j * phase) if phase else 1.0
    col = {out1: 1.0, out2: kick}
    inputs = STAGE_PATHS[stage - 1]
    table = {}
    for j, src in enumerate(inputs):
        table[src] = [(dst, u[i, j] * col[dst]) for i, dst in enumerate((out1, out2))]
    return table


def _apply_stage(state: JointState, scheme: Scheme, stage: int) -> JointState:
    found = state.pair_stage
    if found is not None and found != stage - 1:
        raise EvolutionError(
            f"stage {stage} expects pair kets at stage {stage - 1}, got stage {found}")
    m_map = _wing_map(scheme.minus, stage)
    p_map = _wing_map(scheme.plus, stage)
    entries = []
    for ket, amp in state.terms.items():
        if isinstance(ket, Gamma):
            entries.append((ket, amp))
            continue
        for m_out, m_amp in m_map[ket.minus]:
            for p_out, p_amp in p_map[ket.plus]:
                entries.append((Pair(m_out, p_out), amp * m_amp * p_amp))
    return make_state(entries, state.tolerance)


def initial_state() -> JointState:
    return JointState({Pair(Path.IN, Path.IN): 1.0})


def apply_stage1(state: JointState, scheme: Scheme) -> JointState:
    return _apply_stage(state, scheme, 1)


def apply_stage2(state: JointState, scheme: Scheme) -> JointState:
    return _apply_stage(state, scheme, 2)


def apply_stage3(state: JointState, scheme: Scheme) -> JointState:
    return _apply_stage(state, scheme, 3)


def apply_annihilation(state: JointState, scheme: Scheme) -> JointState:
    """Relabel every pair ket hit by a rule as that rule's gamma ket."""
    rules = scheme.rule_map()
    if not rules:
        return state
    found = state.pair_stage
    if found not in (None, 1):
        raise EvolutionError(f"annihilation acts on stage-1 kets, got stage {found}")
    entries = []
    for ket, amp in state.terms.items():
        if isinstance(ket, Pair) and (ket.minus, ket.plus) in rules:
            entries.append((Gamma(rules[ket.minus, ket.plus]), amp))
        else:
            entries.append((ket, amp))
    return make_state(entries, state.tolerance)


def evolve(scheme: Scheme, initial: JointState | None = None) -> JointState:
    """Final state of ``scheme`` starting from ``|IN-, IN+>`` (or ``initial``)."""
    check(scheme)
    s = initial_state() if initial is None else initial
    s = apply_stage1(s, scheme)
    s = apply_annihilation(s, scheme)
    s = apply_stage2(s, scheme)
    return apply_stage3(s, scheme)


def outcome_distribution(state: JointState) -> OutcomeDistribution:
    found = state.pair_stage
    if found not in (None, 3):
        raise EvolutionError(f"outcome distribution needs final-stage kets, got stage {found}")
    probs = {}
    gammas = {}
    for ket, amp in state.terms.items():
        p = abs(amp) ** 2
        if isinstance(ket, Gamma):
            gammas[ket.label] = p
        else:
            probs["p" + ket.minus.name + ket.plus.name] = p
    return OutcomeDistribution(**probs, pGamma=gammas)


def postselect_survivors(state: JointState) -> JointState:
    """Drop gamma kets and renormalise what is left; the global phase is kept."""
    pairs = state.pairs()
    norm = math.sqrt(math.fsum(abs(a) ** 2 for a in pairs.values()))
    if norm == 0.0:
        raise EvolutionError("no survivors")
    return JointState({k: a / norm for k, a in pairs.items()}, state.tolerance)


_E, _F = Path.E, Path.F
_BELL = {
    BellKind.PSI_PLUS: ((Pair(_E, _F), 1), (Pair(_F, _E), 1)),
    BellKind.PSI_MINUS: ((Pair(_E, _F), 1), (Pair(_F, _E), -1)),
    BellKind.PHI_PLUS: ((Pair(_E, _E), 1), (Pair(_F, _F), 1)),
    BellKind.PHI_MINUS: ((Pair(_E, _E), 1), (Pair(_F, _F), -1)),
}


def bell_state(kind: BellKind) -> JointState:
    return make_state((k, c * SQRT_HALF) for k, c in _BELL[kind])



def bell_overlap(state: JointState, kind: BellKind) -> float:
    """Fidelity |<Bell|state>|^2 of a normalised final-stage pair state."""
    if state.gammas():
        raise EvolutionError("bell overlap needs a pure pair-sector state; post-select first")
    if state.pair_stage not in (None, 3):
        raise EvolutionError("bell overlap needs final-stage kets")
    if abs(norm_squared(state) - 1.0) > NORM_TOL:
        raise EvolutionError("state is not normalised")
    return min(1.0, abs(inner_product(bell_state(kind), state)) ** 2)


# --- dense oracle -----------------------------------------------------------

_IDX = {p: i for i, p in enumerate(Path)}
_DIM = len(_IDX)


def _dense_stage(wing: WingCircuit, stage: int) -> np.ndarray:
    bs = wing.splitter(stage)
    r = bs.r
    t = math.sqrt(max(0.0, 1.0 - r * r))
    phase = (wing.phases.ab, wing.phases.cd, 0.0)[stage - 1]
    m = np.zeros((_DIM, _DIM), dtype=complex)
    if stage == 1:
        m[_IDX[Path.A], _IDX[Path.IN]] = t
        m[_IDX[Path.B], _IDX[Path.IN]] = 1j * r * np.exp(1j * phase)
        return m
    in1, in2 = {2: (Path.A, Path.B), 3: (Path.C, Path.D)}[stage]
    o1, o2 = {2: (Path.C, Path.D), 3: (Path.E, Path.F)}[stage]
    m[_IDX[o1], _IDX[in1]] = t
    m[_IDX[o2], _IDX[in1]] = 1j * r
    m[_IDX[o2], _IDX[in2]] = t
    m[_IDX[o1], _IDX[in2]] = 1j * r
    m[_IDX[o2], :] *= np.exp(1j * phase)
    return m


def dense_oracle(scheme: Scheme, tolerance: float = 1e-12) -> JointState:
    """Brute-force final state via 49x49 matrices and an explicit gamma register."""
    check(scheme)
    labels = [rule.label for rule in scheme.rules]
    ops = [np.kron(_dense_stage(scheme.minus, k), _dense_stage(scheme.plus, k))
           for k in (1, 2, 3)]
    vec = np.zeros(_DIM * _DIM, dtype=complex)
    vec[_IDX[Path.IN] * _DIM + _IDX[Path.IN]] = 1.0
    vec = ops[0] @ vec

    # projector: routed pair coordinates move into the gamma register
    route = np.zeros((len(labels), _DIM * _DIM))
    for g, rule in enumerate(scheme.rules):
        route[g, _IDX[rule.minus] * _DIM + _IDX[rule.plus]] = 1.0
    keep = np.eye(_DIM * _DIM) - np.diag(route.sum(axis=0))
    gamma = route @ vec
    vec = ops[2] @ (ops[1] @ (keep @ vec))

    paths = list(Path)
    entries = []
    for idx in np.flatnonzero(np.abs(vec) > 0):
        m, p = divmod(int(idx), _DIM)
        entries.append((Pair(paths[m], paths[p]), vec[idx]))
    entries.extend((Gamma(lab), gamma[g]) for g, lab in enumerate(labels))
    return make_state(entries, tolerance)
