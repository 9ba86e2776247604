import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from finrestrict.balls import build_lp_system
from finrestrict.groups import GroupSpec, SpecMismatchError
from finrestrict.measures import (
    DualMeasure,
    MeasureProfile,
    ball_masses,
    decay_constant,
    graph_measure,
    inverse_transform_measure,
    measure_profile,
    paraboloid_measure,
    point_mass,
    regularity_constant,
    regularity_constant_direct,
    uniform_measure,
)


def support_points(mu):
    return {mu.spec.point(int(i)) for i in mu.support}


# -- construction ---------------------------------------------------------------------------------


def test_paraboloid_z3():
    mu = paraboloid_measure(GroupSpec.cyclic(3, 2))
    assert support_points(mu) == {(0, 0), (1, 1), (2, 1)}
    assert np.allclose(mu.weights[mu.support], 1 / 3)


def test_graph_of_zero_is_hyperplane():
    spec = GroupSpec.cyclic(5, 3)
    mu = graph_measure(spec, {})
    assert all(x[-1] == 0 for x in support_points(mu)) and len(mu.support) == 25


@pytest.mark.parametrize(
    "spec,size",
    [(GroupSpec.cyclic(5, 3), 25), (GroupSpec.cyclic(9, 2), 9), (GroupSpec.finite_field(5, 2), 5), (GroupSpec.finite_field(3, 3, (1, 0, 1)), 81)],
    ids=lambda v: getattr(v, "label", str(v)),
)
def test_paraboloid_support_and_mass(spec, size):
    mu = paraboloid_measure(spec)
    assert len(mu.support) == size
    assert mu.total_mass == pytest.approx(1.0, abs=1e-15)


def test_paraboloid_over_extension_field_uses_field_squares():
    spec = GroupSpec.finite_field(3, 2, (1, 0, 1))
    gf = spec.gf
    expected = {(w, gf.mul(w, w)) for w in range(9)}
    assert support_points(paraboloid_measure(spec)) == expected


def test_graph_measure_general_polynomial():
    spec = GroupSpec.cyclic(7, 3)
    h = {(1, 1): 3, (0, 3): 1, (0, 0): 2}  # 3 w1 w2 + w2^3 + 2
    mu = graph_measure(spec, h)
    expected = {(a, b, (3 * a * b + b**3 + 2) % 7) for a in range(7) for b in range(7)}
    assert support_points(mu) == expected


def test_construction_errors():
    with pytest.raises(ValueError):
        graph_measure(GroupSpec.cyclic(5, 3), {(2,): 1})
    with pytest.raises(ValueError):
        graph_measure(GroupSpec.cyclic(5, 1), {})
    with pytest.raises(ValueError):
        paraboloid_measure(GroupSpec.finite_field(2, 2))
    with pytest.raises(ValueError):
        DualMeasure(GroupSpec.cyclic(3, 1), [1, -0.1, 0])
    with pytest.raises(ValueError):
        DualMeasure(GroupSpec.cyclic(3, 1), [1, 0])
    with pytest.raises(ValueError):
        MeasureProfile(Fraction(1), 1.0, Fraction(2), 1.0)


def test_measure_json_roundtrip():
    mu = paraboloid_measure(GroupSpec.cyclic(5, 2))
    d = json.loads(mu.to_json())
    assert len(d["weights"]) == 5
    back = DualMeasure.from_json(mu.to_json())
    assert back.spec == mu.spec and np.array_equal(back.weights, mu.weights)
    bad = json.dumps({"spec": d["spec"], "weights": {"0": -1.0}})
    with pytest.raises(ValueError):
        DualMeasure.from_json(bad)


@given(st.sampled_from([3, 5, 7, 9]), st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_graph_measures_have_unit_mass(N, n, seed):
    rng = np.random.default_rng(seed)
    h = {tuple(rng.integers(0, 3, size=n - 1)): int(rng.integers(0, N)) for _ in range(3)}
    mu = graph_measure(GroupSpec.cyclic(N, n), h)
    assert mu.total_mass == pytest.approx(1.0, abs=1e-12)
    assert inverse_transform_measure(mu).values[0] == pytest.approx(mu.total_mass)


# -- constants -------------------------------------------------------------------------------------


def regularity_oracle(mu, N, a):
    n = mu.spec.n
    pts = list(itertools.product(range(N), repeat=n))
    w = {mu.spec.point(int(i)): mu.weights[i] for i in mu.support}
    A = 0.0
    divs = [d for d in range(1, N + 1) if N % d == 0]
    for d in divs:
        rho = Fraction(1, d)
        ball = oracles.cyclic_dual_ball(N, n, rho)
        for xi in pts:
            mass = sum(v for eta, v in w.items() if tuple((e - c) % N for e, c in zip(eta, xi)) in ball)
            A = max(A, mass / float(rho) ** a)
    return A


def decay_oracle(mu, N, b):
    n = mu.spec.n
    divs = [d for d in range(1, N + 1) if N % d == 0]
    mv = inverse_transform_measure(mu).values
    B = 0.0
    for i in range(mu.spec.size):
        x = mu.spec.point(i)
        # sup of rho with x outside B_rho(0) is the first divisor scale that captures x
        exit_ = next(d for d in divs if x in oracles.cyclic_ball(N, n, d))
        if exit_ == 1:
            continue
        B = max(B, abs(mv[i]) * exit_ ** (b / 2))
    return B


@pytest.mark.parametrize("N,n", [(3, 2), (9, 2), (5, 2), (3, 3), (6, 2), (12, 2)])
def test_constants_match_oracles(N, n):
    spec = GroupSpec.cyclic(N, n)
    sys = build_lp_system(spec)
    mu = paraboloid_measure(spec)
    a = b = n - 1
    assert regularity_constant(mu, sys, a) == pytest.approx(regularity_oracle(mu, N, a), rel=1e-12)
    assert decay_constant(mu, sys, b) == pytest.approx(decay_oracle(mu, N, b), rel=1e-12)
    assert regularity_constant_direct(mu, sys, a) == pytest.approx(regularity_constant(mu, sys, a), rel=1e-12)


@pytest.mark.parametrize("p,alpha,n", [(3, 1, 2), (3, 2, 2), (5, 1, 2), (5, 2, 2), (3, 1, 3), (3, 2, 3), (5, 1, 3)])
def test_paraboloid_constants_are_one(p, alpha, n):
    spec = GroupSpec.cyclic(p**alpha, n)
    prof = measure_profile(paraboloid_measure(spec), build_lp_system(spec))
    assert prof.a == n - 1 and prof.b == n - 1
    assert prof.A == pytest.approx(1.0, abs=1e-9)
    assert prof.B <= 1 + 1e-9


def test_paraboloid_z3_b_is_exactly_one():
    spec = GroupSpec.cyclic(3, 2)
    B = decay_constant(paraboloid_measure(spec), build_lp_system(spec), 1)
    # max_x |mu-check(x)| ||x||^{1/2} = 3^{-1/2} 3^{1/2}
    assert B == pytest.approx(1.0, abs=1e-12)


def test_field_paraboloid_constants():
    spec = GroupSpec.finite_field(3, 2)
    sys = build_lp_system(spec)
    mu = paraboloid_measure(spec)
    assert regularity_constant(mu, sys, 1) == pytest.approx(1.0)
    assert decay_constant(mu, sys, 1) == pytest.approx(1.0)
    mv = np.abs(inverse_transform_measure(mu).values)
    coords = spec.coords
    assert np.allclose(mv[(coords[:, 1] == 0) & (coords[:, 0] != 0)], 0)
    assert np.allclose(mv[coords[:, 1] != 0], 3**-0.5)


@pytest.mark.parametrize("spec", [GroupSpec.cyclic(9, 2), GroupSpec.finite_field(3, 2)], ids=lambda s: s.label)
@pytest.mark.parametrize("a", [Fraction(1, 2), 1, Fraction(3, 2)])
def test_point_mass_regularity(spec, a):
    sys = build_lp_system(spec)
    smallest = sys.dual.smallest_nonempty()
    assert regularity_constant(point_mass(spec), sys, a) == pytest.approx(float(1 / smallest) ** float(a))


def test_uniform_measure_has_no_decay_constant():
    spec = GroupSpec.cyclic(9, 2)
    assert decay_constant(uniform_measure(spec), build_lp_system(spec), 1) == pytest.approx(0.0, abs=1e-12)


def test_exponent_range_errors():
    spec = GroupSpec.cyclic(3, 2)
    sys, mu = build_lp_system(spec), paraboloid_measure(spec)
    with pytest.raises(ValueError):
        regularity_constant(mu, sys, 2)
    with pytest.raises(ValueError):
        regularity_constant(mu, sys, 0)
    with pytest.raises(ValueError):
        decay_constant(mu, sys, Fraction(3, 2), a=1)
    with pytest.raises(ValueError):
        decay_constant(mu, sys, 0)
    with pytest.raises(SpecMismatchError):
        regularity_constant(mu, build_lp_system(GroupSpec.cyclic(9, 2)), 1)


@given(st.sampled_from([(9, 2), (12, 2), (5, 3)]), st.integers(0, 2**32 - 1))
def test_hypotheses_hold_with_returned_constants(case, seed):
    N, n = case
    spec = GroupSpec.cyclic(N, n)
    sys = build_lp_system(spec)
    rng = np.random.default_rng(seed)
    w = rng.random(spec.size) * (rng.random(spec.size) < 0.2)
    mu = DualMeasure(spec, w)
    a = b = Fraction(n - 1)
    A, B = regularity_constant(mu, sys, a), decay_constant(mu, sys, b, a)
    for rho in sys.dual.breakpoints:
        assert ball_masses(mu, sys, rho).max() <= A * float(rho) ** float(a) * (1 + 1e-9) + 1e-12
    mv = np.abs(inverse_transform_measure(mu).values)
    for rho in sys.primal.breakpoints:
        out = ~sys.primal.at_origin(rho)
        if out.any():
            assert mv[out].max() <= B * float(rho) ** (-float(b) / 2) * (1 + 1e-9) + 1e-12
