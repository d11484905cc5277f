import cmath
import random

import pytest

from pairpaths.state import (
    Gamma,
    JointState,
    Pair,
    Path,
    StateError,
    inner_product,
    make_state,
    norm_squared,
    render_state,
    scale,
    scale_add,
)

A, B, C, E, F = Path.A, Path.B, Path.C, Path.E, Path.F

# the four final terms of context (a) as printed, gamma signs per our P/Q choice
EQ1 = make_state([(Gamma("P"), 0.5), (Gamma("Q"), -0.5),
                  (Pair(E, F), -0.5j), (Pair(F, E), -0.5j)])
EQ2 = make_state([(Gamma("R"), 0.5j), (Gamma("S"), 0.5j),
                  (Pair(E, E), 0.5), (Pair(F, F), -0.5)])


def test_single_ket():
    s = make_state([(Pair(A, A), 1)])
    assert len(s) == 1
    assert norm_squared(s) == 1


def test_duplicates_summed():
    s = make_state([(Pair(A, A), 0.5), (Pair(A, A), 0.5)])
    assert dict(s.terms) == {Pair(A, A): 1}


def test_sub_tolerance_pruned():
    assert len(make_state([(Pair(A, B), 1e-15)])) == 0


def test_tolerance_configurable():
    assert len(make_state([(Pair(A, B), 1e-15)], tolerance=0.0)) == 1


def test_mixed_stage_ket_rejected():
    with pytest.raises(StateError):
        Pair(A, C)


def test_mixed_stage_state_rejected():
    with pytest.raises(StateError):
        make_state([(Pair(A, A), 1), (Pair(C, C), 1)])


def test_non_finite_rejected():
    with pytest.raises(StateError):
        make_state([(Pair(A, A), float("nan"))])


def test_norm_squared():
    assert norm_squared(JointState()) == 0
    assert norm_squared(EQ1) == pytest.approx(1, abs=1e-15)
    assert norm_squared(make_state([(Pair(E, F), -0.5j)])) == 0.25


def test_inner_product_examples():
    assert inner_product(make_state([(Pair(E, F), 1)]), make_state([(Pair(F, E), 1)])) == 0
    assert inner_product(EQ2, EQ2) == pytest.approx(1, abs=1e-15)
    assert inner_product(make_state([(Gamma("P"), 1)]), make_state([(Pair(E, E), 1)])) == 0


def test_inner_product_conjugate_linear_first_argument():
    s = make_state([(Pair(E, E), 1j)])
    t = make_state([(Pair(E, E), 1)])
    assert inner_product(s, t) == -1j
    assert inner_product(t, s) == 1j


def test_scale_add_examples():
    s = EQ1
    assert scale_add(s, EQ2, 0) == s
    assert len(scale_add(s, s, -1)) == 0
    survivor = scale_add(make_state([(Pair(E, E), 0.5)]), make_state([(Pair(F, F), -0.5)]), 1)
    assert dict(survivor.terms) == {Pair(E, E): 0.5, Pair(F, F): -0.5}


def test_pruning_idempotent():
    rng = random.Random(5)
    for _ in range(50):
        s = JointState({Pair(p, q): complex(rng.gauss(0, 1e-11), rng.gauss(0, 1e-11))
                        for p in (E, F) for q in (E, F)}, tolerance=0.0)
        once = s.pruned(1e-11)
        assert once.pruned(1e-11) == once


def _random_sparse(rng):
    kets = [Pair(p, q) for p in (E, F) for q in (E, F)] + [Gamma(x) for x in "PQRS"]
    return make_state((k, complex(rng.gauss(0, 1), rng.gauss(0, 1)))
                      for k in rng.sample(kets, rng.randint(1, len(kets))))


def test_bilinearity():
    rng = random.Random(11)
    for _ in range(200):
        s1, s2, t = _random_sparse(rng), _random_sparse(rng), _random_sparse(rng)
        a = complex(rng.gauss(0, 1), rng.gauss(0, 1))
        b = complex(rng.gauss(0, 1), rng.gauss(0, 1))
        lhs = inner_product(scale_add(scale(s1, a), s2, b), t)
        rhs = a.conjugate() * inner_product(s1, t) + b.conjugate() * inner_product(s2, t)
        assert abs(lhs - rhs) < 1e-12


def test_sectors_exactly_orthogonal():
    rng = random.Random(3)
    for _ in range(50):
        s = _random_sparse(rng)
        assert inner_product(JointState(s.gammas()), JointState(s.pairs())) == 0


def test_render_is_canonical():
    text = render_state(EQ1)
    assert text.splitlines() == [
        "0-0.5i |e-,f+>",
        "0-0.5i |f-,e+>",
        "0.5+0i |gamma:P>",
        "-0.5+0i |gamma:Q>",
    ]
    reordered = make_state(reversed(list(EQ1.terms.items())))
    assert render_state(reordered) == text


def test_render_twelve_digits():
    s = make_state([(Pair(E, E), cmath.exp(0.3j))])
    assert render_state(s) == "0.955336489126+0.295520206661i |e-,e+>"
