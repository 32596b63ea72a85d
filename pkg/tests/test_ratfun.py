import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dispersia import ratfun as rf
from dispersia.errors import DegreeZero, PoleEvaluation, UnsupportedMultiplicity
from dispersia.ratfun import Polynomial as P
from dispersia.ratfun import RationalFunction as R


def multiset_close(a, b, tol=1e-7):
    a, b = sorted(a, key=lambda z: (z.real, z.imag)), list(b)
    if len(a) != len(b):
        return False
    for z in a:
        j = min(range(len(b)), key=lambda k: abs(b[k] - z))
        if abs(b[j] - z) > tol * max(1.0, abs(z)):
            return False
        b.pop(j)
    return True


# ------------------------------------------------------------- polynomial

def test_polynomial_trims_trailing_zeros():
    p = P([1.0, 2.0, 0.0, 0.0])
    assert p.degree == 1
    assert list(p.coeffs) == [1.0, 2.0]
    assert P([0.0, 0.0]).is_zero()


def test_polynomial_arithmetic():
    p, q = P([1, 1]), P([-1, 1])
    assert p * q == P([-1, 0, 1])
    assert p + q == P([0, 2])
    quo, rem = divmod(P([-1, 0, 1]), P([-1, 1]))
    assert quo == P([1, 1]) and rem.is_zero()


def test_from_roots_and_derivative():
    p = P.from_roots([1.0, 2.0, 2.0])
    assert p(2.0) == 0 and p.deriv()(2.0) == 0
    assert p.deriv(2)(2.0) != 0


# -------------------------------------------------------------- evaluate

def test_evaluate_identity_case():
    f = R(P([1.0]), P([1.0, -1.0]))
    assert rf.evaluate(f, 0.0) == pytest.approx(1.0)


def test_evaluate_derivative_of_square():
    f = R(P([0, 0, 1]), P([1]))
    assert rf.evaluate(f, 1j, order=1) == pytest.approx(2j)


def test_evaluate_against_direct_arithmetic():
    f = R(P([1, 0, 1]), P([4, 0, 1]))
    z = 1 + 1j
    direct = (z * z + 1) / (z * z + 4)
    assert abs(rf.evaluate(f, z) - direct) < 1e-15


def test_evaluate_at_pole_raises():
    with pytest.raises(PoleEvaluation):
        rf.evaluate(R(P([1.0]), P([-1.0, 1.0])), 1.0)


# ----------------------------------------------------------------- roots

def test_roots_simple_real():
    rs = rf.roots(P([-1, 0, 1]))
    assert rs.real() == [(-1.0, 1), (1.0, 1)]


def test_roots_conjugate_pair():
    rs = rf.roots(P([1, 0, 1]))
    assert multiset_close(rs.flat(), [1j, -1j])
    assert not rs.real()


def test_roots_factored_with_double_zero():
    p = P.from_roots([0, 0, 4, -4, 5, -5])
    rs = rf.roots(p)
    assert rs.real() == [(-5.0, 1), (-4.0, 1), (0.0, 2), (4.0, 1), (5.0, 1)]
    assert rs.degree == 6


def test_roots_constant_raises():
    with pytest.raises(DegreeZero):
        rf.roots(P([3.0]))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_roots_multiplicity_detected(m):
    rs = rf.roots(P.from_roots([1.5] * m + [-0.5]))
    assert (1.5, m) in [(round(x, 9), k) for x, k in rs.real()]


@pytest.mark.parametrize("m", [2, 3])
def test_derivative_lowers_multiplicity(m):
    p = P.from_roots([2.0] * m + [-1.0, 3.0])
    mult = dict((round(x, 8), k) for x, k in rf.roots(p.deriv()).real())
    assert mult.get(2.0) == m - 1


coeff = st.floats(min_value=-5, max_value=5, allow_nan=False).filter(lambda x: abs(x) > 0.1)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=7), st.lists(coeff, min_size=2, max_size=7))
def test_roots_of_product_is_union(a, b):
    p, q = P(a), P(b)
    got = rf.roots(p * q).flat()
    want = rf.roots(p).flat() + rf.roots(q).flat()
    assert multiset_close(got, want, 1e-6)


# ---------------------------------------------------------------- reduce

def test_reduce_difference_of_squares():
    f = rf.reduce(R(P([-1, 0, 1]), P([-1, 1])))
    assert f.den.degree == 0
    assert np.allclose(f.num.coeffs / f.den.coeffs[0], [1, 1])


def test_reduce_perfect_square():
    f = rf.reduce(R(P([1, 2, 1]), P([1, 1])))
    assert f.den.degree == 0
    assert np.allclose(f.num.coeffs / f.den.coeffs[0], [1, 1])


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.lists(coeff, min_size=1, max_size=4), st.lists(coeff, min_size=2, max_size=4))
def test_reduce_matches_probes(r, a, b):
    common = P([-r, 1])
    f = R(P(a) * common, P(b) * common)
    g = rf.reduce(f)
    assert g.den.degree <= f.den.degree - 1
    rng = np.random.default_rng(0)
    for z in rng.normal(size=16) + 1j * rng.normal(size=16):
        try:
            want = rf.evaluate(f, z)
        except PoleEvaluation:
            continue
        assert abs(rf.evaluate(g, z) - want) <= 1e-9 * max(1.0, abs(want))


# ------------------------------------------------------ partial fractions

def test_partial_fractions_inverse_square_difference():
    pf = rf.partial_fractions(R(P([1]), P([-1, 0, 1]), "omega"))
    got = sorted((round(p.real, 12), k, round(c.real, 12)) for p, k, c in pf.terms)
    assert got == [(-1.0, 1, -0.5), (1.0, 1, 0.5)]


def test_partial_fractions_lorentz_residues():
    pf = rf.partial_fractions(R(P([0, 1]), P([-4, 0, 1]), "omega"))
    assert pf.residue(2.0) == pytest.approx(0.5)
    assert pf.residue(-2.0) == pytest.approx(0.5)


def test_partial_fractions_polynomial_input():
    pf = rf.partial_fractions(R(P([1, 2, 3]), P([1])))
    assert pf.terms == () or list(pf.terms) == []
    assert pf.polynomial == P([1, 2, 3])


def test_partial_fractions_order_limits():
    rf.partial_fractions(R(P([1]), P.from_roots([0, 0, 0, 0])))
    with pytest.raises(UnsupportedMultiplicity):
        rf.partial_fractions(R(P([1]), P.from_roots([1, 1, 1])))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=1, max_size=5, unique=True), st.lists(coeff, min_size=1, max_size=4))
def test_partial_fraction_reconstruction(poles, num):
    poles = [p for p in poles]
    if min(abs(a - b) for a in poles for b in poles + [1e9] if a != b) < 0.05:
        return
    f = R(P(num), P.from_roots(poles))
    pf = rf.partial_fractions(rf.reduce(f))
    for z in (0.3 + 1.1j, -2.2 + 0.4j, 5.0 - 3j):
        want = rf.evaluate(f, z)
        assert abs(pf(z) - want) <= 1e-8 * max(1.0, abs(want))


# ---------------------------------------------------------------- parity

def test_parity():
    assert rf.parity(P([-16, 0, 1])) == "even"
    assert rf.parity(P([0, 0, 0, 1])) == "odd"
    assert rf.parity(P([0, 1, 1])) == "neither"


def test_variable_maps_are_inverse():
    f = R(P([1, 2, 3]), P([4, 5, 6, 1]), "s")
    g = rf.to_s(rf.to_omega(f))
    for z in (0.2 + 0.1j, 1.5 - 2j):
        assert cmath.isclose(rf.evaluate(g, z), rf.evaluate(f, z), rel_tol=1e-13)
    w = 0.7 + 0.3j
    assert cmath.isclose(rf.evaluate(rf.to_omega(f), w), rf.evaluate(f, -1j * w), rel_tol=1e-13)
