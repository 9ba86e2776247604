import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from finrestrict.charsums import (
    QuadSumInput,
    legendre,
    magnitude_law,
    paraboloid_transform_closed,
    quad_sum_bruteforce,
    quad_sum_closed,
)
from finrestrict.groups import GroupSpec, norms
from finrestrict.measures import inverse_transform_measure, paraboloid_measure

MODULI = [(3, 1), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (5, 3), (7, 1), (7, 2), (7, 3), (11, 1), (11, 2), (13, 2), (17, 1)]


def test_examples():
    w = cmath.exp(2j * math.pi / 3)
    s = quad_sum_bruteforce(QuadSumInput(0, 1, 3, 1))
    assert s == pytest.approx(1 + 2 * w)
    assert abs(s) == pytest.approx(3**0.5)
    assert abs(quad_sum_closed(QuadSumInput(0, 1, 3, 1)) - s) < 1e-9
    assert abs(quad_sum_closed(QuadSumInput(1, 1, 3, 2))) == pytest.approx(3)
    assert abs(quad_sum_closed(QuadSumInput(1, 3, 3, 2))) < 1e-12
    for p, alpha in [(3, 1), (5, 2), (7, 3)]:
        assert abs(quad_sum_closed(QuadSumInput(1, 0, p, alpha))) < 1e-12
        assert abs(quad_sum_bruteforce(QuadSumInput(1, 0, p, alpha))) < 1e-9
        assert quad_sum_closed(QuadSumInput(0, 0, p, alpha)) == pytest.approx(p**alpha)


def test_input_validation():
    with pytest.raises(ValueError):
        QuadSumInput(0, 1, 2, 1)
    with pytest.raises(ValueError):
        QuadSumInput(0, 1, 9, 1)
    with pytest.raises(ValueError):
        QuadSumInput(0, 1, 3, 0)
    assert QuadSumInput(-1, 10, 3, 2).a == 8 and QuadSumInput(-1, 10, 3, 2).b == 1


def test_legendre():
    assert [legendre(u, 7) for u in range(7)] == [0, 1, 1, -1, 1, -1, -1]


def test_bruteforce_matches_loop_oracle():
    for a, b in [(0, 1), (2, 5), (4, 3), (7, 0)]:
        assert quad_sum_bruteforce(QuadSumInput(a, b, 3, 2)) == pytest.approx(oracles.quad_sum(a, b, 9), abs=1e-9)


@pytest.mark.parametrize("p,alpha", MODULI, ids=lambda v: str(v))
def test_closed_form_matches_bruteforce_exhaustively(p, alpha):
    M = p**alpha
    worst = 0.0
    for a in range(M):
        for b in range(M):
            inp = QuadSumInput(a, b, p, alpha)
            worst = max(worst, abs(quad_sum_closed(inp) - quad_sum_bruteforce(inp)))
    assert worst <= 1e-9


@pytest.mark.parametrize("p,alpha", MODULI, ids=lambda v: str(v))
def test_magnitude_law_exhaustively(p, alpha):
    M = p**alpha
    for a in range(M):
        for b in range(M):
            law = magnitude_law(a, b, p, alpha)
            s = abs(quad_sum_closed(QuadSumInput(a, b, p, alpha)))
            if law is None:
                assert a == 0 and b == 0
                continue
            assert s == pytest.approx(law, abs=1e-9)
            # vanishing exactly when the divisibility condition fails
            nb = M // math.gcd(b, M)
            assert (s < 1e-9) == (a % (M // nb) != 0)


@given(st.sampled_from([(3, 5), (5, 3), (7, 2)]), st.integers(), st.integers())
def test_closed_form_is_periodic(pa, a, b):
    p, alpha = pa
    M = p**alpha
    assert quad_sum_closed(QuadSumInput(a, b, p, alpha)) == pytest.approx(
        quad_sum_closed(QuadSumInput(a % M, b % M, p, alpha)), abs=1e-9
    )


# -- paraboloid transform ------------------------------------------------------------------------


def test_paraboloid_transform_examples():
    spec = GroupSpec.cyclic(3, 2)
    assert paraboloid_transform_closed(spec, (0, 0)) == pytest.approx(1)
    w = cmath.exp(2j * math.pi / 3)
    assert paraboloid_transform_closed(spec, (0, 1)) == pytest.approx((1 + 2 * w) / 3)


def test_paraboloid_transform_z9_cubed_random_points():
    spec = GroupSpec.cyclic(9, 3)
    mv = inverse_transform_measure(paraboloid_measure(spec)).values
    rng = np.random.default_rng(2024)
    for i in rng.integers(spec.size, size=50):
        assert abs(paraboloid_transform_closed(spec, spec.point(int(i))) - mv[i]) <= 1e-9


@pytest.mark.parametrize("N,n", [(3, 2), (9, 2), (25, 2), (27, 2), (5, 3), (7, 2)])
def test_paraboloid_transform_pointwise_and_decay(N, n):
    spec = GroupSpec.cyclic(N, n)
    mv = inverse_transform_measure(paraboloid_measure(spec)).values
    closed = np.array([paraboloid_transform_closed(spec, spec.point(i)) for i in range(spec.size)])
    assert np.max(np.abs(closed - mv)) <= 1e-9
    assert np.all(np.abs(closed) <= norms(spec).astype(float) ** (-(n - 1) / 2) + 1e-9)


def test_paraboloid_transform_rejects_bad_modulus():
    with pytest.raises(ValueError):
        paraboloid_transform_closed(GroupSpec.cyclic(6, 2), (0, 1))
    with pytest.raises(ValueError):
        paraboloid_transform_closed(GroupSpec.cyclic(8, 2), (0, 1))
    with pytest.raises(ValueError):
        paraboloid_transform_closed(GroupSpec.finite_field(3, 2), (0, 1))
