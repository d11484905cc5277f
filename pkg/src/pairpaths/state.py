"""Sparse two-particle joint states.

A joint state maps basis kets to complex amplitudes. A basis ket is either a
``Pair`` (one path for the minus-wing particle, one for the plus-wing
particle, both at the same interferometer depth) or a ``Gamma`` flag marking
that the pair annihilated into radiation at a labelled intersection point.
Gamma kets are absorbing: no beam splitter ever acts on them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Union

DEFAULT_TOLERANCE = 1e-12


class StateError(ValueError):
    pass


class Path(enum.Enum):
    IN = "in"
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"

    @property
    def stage(self) -> int:
        return _STAGE[self]

    @property
    def order(self) -> int:
        return _ORDER[self]


_STAGE = {Path.IN: 0, Path.A: 1, Path.B: 1, Path.C: 2, Path.D: 2, Path.E: 3, Path.F: 3}
_ORDER = {p: i for i, p in enumerate(Path)}

# first/second output port of each stage, indexed by stage number of the outputs
STAGE_PATHS = {0: (Path.IN,), 1: (Path.A, Path.B), 2: (Path.C, Path.D), 3: (Path.E, Path.F)}


class Wing(enum.Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class Pair:
    minus: Path
    plus: Path

    def __post_init__(self):
        if self.minus.stage != self.plus.stage:
            raise StateError(
                f"pair ket |{self.minus.value}-,{self.plus.value}+> mixes stages "
                f"{self.minus.stage} and {self.plus.stage}"
            )

    @property
    def stage(self) -> int:
        return self.minus.stage

    def sort_key(self):
        return (0, self.minus.order, self.plus.order, "")

    def __str__(self):
        return f"|{self.minus.value}-,{self.plus.value}+>"


@dataclass(frozen=True)
class Gamma:
    label: str

    def sort_key(self):
        return (1, -1, -1, self.label)

    def __str__(self):
        return f"|gamma:{self.label}>"


BasisKet = Union[Pair, Gamma]


class JointState:
    """Immutable sparse superposition over ``Pair`` and ``Gamma`` kets.

    Terms whose magnitude falls below ``tolerance`` are dropped on
    construction, so a stored term is never "numerically zero".
    """

    __slots__ = ("_terms", "tolerance")

    def __init__(self, terms: Mapping[BasisKet, complex] | None = None,
                 tolerance: float = DEFAULT_TOLERANCE):
        self.tolerance = float(tolerance)
        kept = {}
        stage = None
        for ket, amp in (terms or {}).items():
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise StateError(f"non-finite amplitude on {ket}")
            if abs(amp) < self.tolerance:
                continue
            if isinstance(ket, Pair):
                if stage is None:
                    stage = ket.stage
                elif ket.stage != stage:
                    raise StateError("state mixes pair kets from different stages")
            elif not isinstance(ket, Gamma):
                raise TypeError(f"not a basis ket: {ket!r}")
            kept[ket] = amp
        self._terms = MappingProxyType(kept)

    @property
    def terms(self) -> Mapping[BasisKet, complex]:
        return self._terms

    @property
    def pair_stage(self) -> int | None:
        """Stage shared by all pair kets, or None when there are none."""
        for ket in self._terms:
            if isinstance(ket, Pair):
                return ket.stage
        return None

    def amplitude(self, ket: BasisKet) -> complex:
        return self._terms.get(ket, 0j)

    def pairs(self):
        return {k: a for k, a in self._terms.items() if isinstance(k, Pair)}

    def gammas(self):
        return {k: a for k, a in self._terms.items() if isinstance(k, Gamma)}

    def pruned(self, tolerance: float | None = None) -> "JointState":
        tol = self.tolerance if tolerance is None else tolerance
        return JointState(self._terms, tol)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other):
        if not isinstance(other, JointState):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"JointState({render_state(self)!r})"

    def __str__(self):
        return render_state(self)


def make_state(entries: Iterable[tuple[BasisKet, complex]],
               tolerance: float = DEFAULT_TOLERANCE) -> JointState:
    """Build a state from (ket, amplitude) pairs, summing repeated kets."""
    acc: dict = {}
    for ket, amp in entries:
        acc[ket] = acc.get(ket, 0j) + complex(amp)
    return JointState(acc, tolerance)


def norm_squared(s: JointState) -> float:
    return math.fsum(abs(a) ** 2 for a in s.terms.values())


def inner_product(s1: JointState, s2: JointState) -> complex:
    """<s1|s2>, conjugate-linear in ``s1``."""
    small, large = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for ket in small.terms:
        if ket in large.terms:
            total += s1.terms[ket].conjugate() * s2.terms[ket]
    return total


def scale_add(target: JointState, source: JointState, factor: complex = 1) -> JointState:
    """Return ``target + factor * source``."""
    acc = dict(target.terms)
    factor = complex(factor)
    for ket, amp in source.terms.items():
        acc[ket] = acc.get(ket, 0j) + factor * amp
    return JointState(acc, target.tolerance)


def scale(s: JointState, factor: complex) -> JointState:
    return JointState({k: complex(factor) * a for k, a in s.terms.items()}, s.tolerance)


def format_amplitude(amp: complex, digits: int = 12) -> str:
    # adding 0.0 folds negative zero into positive zero
    re = amp.real + 0.0
    im = amp.imag + 0.0
    return f"{re:.{digits}g}{im:+.{digits}g}i"


def render_state(s: JointState, digits: int = 12) -> str:
    """Canonical one-term-per-line rendering, pairs first then gammas."""
    keys = sorted(s.terms, key=lambda k: k.sort_key())
    return "\n".join(f"{format_amplitude(s.terms[k], digits)} {k}" for k in keys)
