"""Interferometer wings, annihilation geometry and the two built-in schemes.

Beam-splitter convention (fixed, "i on reflection")::

    in1 -> t*out1 + i*r*out2
    in2 -> t*out2 + i*r*out1

with real amplitude reflectance ``r`` and transmittance ``t = sqrt(1 - r^2)``.
Stage 1 has a single live input (``IN``) feeding ``in1``; its outputs are
``(A, B)``. Stage 2 maps ``(A, B) -> (C, D)`` and stage 3 ``(C, D) -> (E, F)``.
A phase ``phase_ab`` multiplies the B path by ``exp(i*phase_ab)`` right after
stage 1, and ``phase_cd`` the D path right after stage 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .state import Path

SQRT_HALF = math.sqrt(0.5)
TWO_PI = 2 * math.pi
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class BeamSplitter:
    r: float = SQRT_HALF

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))

    @property
    def t(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.r * self.r))

    @classmethod
    def from_intensity(cls, reflectance: float) -> "BeamSplitter":
        return cls(math.sqrt(reflectance))


def _wrap_phase(phi: float) -> float:
    phi = float(phi) % TWO_PI
    # x % 2pi can round up to exactly 2pi for tiny negative x
    return 0.0 if phi >= TWO_PI else phi


@dataclass(frozen=True)
class PhaseSettings:
    ab: float = 0.0
    cd: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "ab", _wrap_phase(self.ab))
        object.__setattr__(self, "cd", _wrap_phase(self.cd))


@dataclass(frozen=True)
class WingCircuit:
    bs1: BeamSplitter = field(default_factory=BeamSplitter)
    bs2: BeamSplitter = field(default_factory=BeamSplitter)
    bs3: BeamSplitter = field(default_factory=BeamSplitter)
    phases: PhaseSettings = field(default_factory=PhaseSettings)

    def splitter(self, stage: int) -> BeamSplitter:
        return (self.bs1, self.bs2, self.bs3)[stage - 1]


@dataclass(frozen=True)
class AnnihilationRule:
    minus: Path
    plus: Path
    label: str


@dataclass(frozen=True)
class Scheme:
    name: str
    minus: WingCircuit
    plus: WingCircuit
    rules: tuple[AnnihilationRule, ...] = ()

    def __post_init__(self):
        # rule order carries no meaning; keep a canonical order so equality ignores it
        rules = sorted(self.rules, key=lambda r: (r.minus.order, r.plus.order, r.label))
        object.__setattr__(self, "rules", tuple(rules))

    def wing(self, wing) -> WingCircuit:
        return self.minus if getattr(wing, "value", wing) == "minus" else self.plus

    def rule_map(self) -> dict[tuple[Path, Path], str]:
        return {(rule.minus, rule.plus): rule.label for rule in self.rules}


class SchemeError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def splitter_coefficients(bs: BeamSplitter) -> np.ndarray:
    """2x2 table ``U`` with ``U[out, in]`` the amplitude for in -> out."""
    t, r = bs.t, bs.r
    return np.array([[t, 1j * r], [1j * r, t]], dtype=complex)


def build_scheme_a() -> Scheme:
    """Context (a): the pair annihilates on {a-, a+} (point P) or {b-, b+} (point Q)."""
    wing = WingCircuit()
    return Scheme("a", wing, wing, (
        AnnihilationRule(Path.A, Path.A, "P"),
        AnnihilationRule(Path.B, Path.B, "Q"),
    ))


def build_scheme_b() -> Scheme:
    """Context (b): same wings, annihilation on {a-, b+} (R) or {b-, a+} (S)."""
    wing = WingCircuit()
    return Scheme("b", wing, wing, (
        AnnihilationRule(Path.A, Path.B, "R"),
        AnnihilationRule(Path.B, Path.A, "S"),
    ))


def builtin_scheme(ref: str) -> Scheme:
    try:
        return {"a": build_scheme_a, "b": build_scheme_b}[ref]()
    except KeyError:
        raise KeyError(f"no built-in scheme {ref!r}") from None


def validate(s: Scheme) -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    problems = []
    for wname, wing in (("minus", s.minus), ("plus", s.plus)):
        for k in (1, 2, 3):
            bs = wing.splitter(k)
            if not (math.isfinite(bs.r) and 0.0 <= bs.r <= 1.0):
                problems.append(f"wing {wname} splitter {k}: ratio {bs.r!r} outside [0, 1]")
            elif abs(bs.r ** 2 + bs.t ** 2 - 1.0) > UNITARITY_TOL:
                problems.append(f"wing {wname} splitter {k}: r^2 + t^2 != 1")
        for name in ("ab", "cd"):
            if not math.isfinite(getattr(wing.phases, name)):
                problems.append(f"wing {wname}: phase {name} is not finite")
    if len(s.rules) > 4:
        problems.append("more than 4 annihilation rules")
    seen_labels, seen_pairs = set(), set()
    for rule in s.rules:
        if rule.minus not in (Path.A, Path.B) or rule.plus not in (Path.A, Path.B):
            problems.append("annihilation rule outside stage-1 paths")
        if rule.label in seen_labels:
            problems.append(f"duplicate gamma label {rule.label!r}")
        if (rule.minus, rule.plus) in seen_pairs:
            problems.append(
                f"duplicate annihilation pair ({rule.minus.value}-, {rule.plus.value}+)")
        seen_labels.add(rule.label)
        seen_pairs.add((rule.minus, rule.plus))
    return problems


def check(s: Scheme) -> Scheme:
    problems = validate(s)
    if problems:
        raise SchemeError(problems)
    return s


def with_splitter(s: Scheme, stage: int, r: float, wing: str | None = None) -> Scheme:
    """Copy of ``s`` with splitter ``stage`` set to ``r`` on one or both wings."""
    def patch(w):
        return replace(w, **{f"bs{stage}": BeamSplitter(r)})
    return replace(
        s,
        minus=patch(s.minus) if wing in (None, "minus") else s.minus,
        plus=patch(s.plus) if wing in (None, "plus") else s.plus,
    )


def with_phase(s: Scheme, which: str, phi: float, wing: str | None = None) -> Scheme:
    def patch(w):
        return replace(w, phases=replace(w.phases, **{which: phi}))
    return replace(
        s,
        minus=patch(s.minus) if wing in (None, "minus") else s.minus,
        plus=patch(s.plus) if wing in (None, "plus") else s.plus,
    )
