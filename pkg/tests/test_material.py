import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dispersia import dispersion as dsp
from dispersia import material as mat
from dispersia import ratfun as rf
from dispersia.errors import Degenerate, NegativeParameter, NotLossless, NotLosslessPassive, SchemaError
from dispersia.ratfun import Polynomial as P
from dispersia.ratfun import RationalFunction as R

LORENTZ1 = mat.LorentzForm([(1.0, 15.0)], [(2.0, 21.0)])


def omega_law(num, den):
    """eps/eps0 as a rational function of omega, ascending coefficients."""
    return R(P(num), P(den), "omega")


def double_drude(oe=1.0, om=2.0):
    eps = omega_law([oe**2 * om**2, 0, -(oe**2 + om**2), 0, 1], [0, 0, 0, 0, 1])
    return mat.from_omega_laws(eps, omega_law([1], [1]))


@st.composite
def lorentz_forms(draw):
    def terms():
        n = draw(st.integers(0, 4))
        poles = sorted(draw(st.lists(st.floats(0.1, 10), min_size=n, max_size=n, unique=True)))
        if any(b - a < 0.05 for a, b in zip(poles, poles[1:])):
            poles = [0.5 + 1.3 * k for k in range(n)]
        return [(w, draw(st.floats(0.1, 5))) for w in poles]

    return mat.LorentzForm(terms(), terms())


# ----------------------------------------------------------- constructors

def test_from_lorentz_static_value():
    m = mat.from_lorentz(mat.LorentzForm([(1.0, 1.0)], []))
    assert m.eps(0.0) == pytest.approx(2.0)


def test_from_lorentz_empty_is_vacuum():
    m = mat.from_lorentz(mat.LorentzForm([], [], 2.0, 3.0))
    assert m.eps(1.7) == pytest.approx(2.0) and m.mu(0.3 + 1j) == pytest.approx(3.0)


def test_from_lorentz_zero_pole_is_drude():
    m = mat.from_lorentz(mat.LorentzForm([(0.0, 4.0)], []))
    for w in (0.5, 3.0, 1 + 1j):
        assert m.eps(w) == pytest.approx(1 - 4 / w**2)


def test_lorentz_form_rejects_bad_terms():
    with pytest.raises(NegativeParameter):
        mat.LorentzForm([(1.0, -1.0)], [])
    with pytest.raises(ValueError):
        mat.LorentzForm([(2.0, 1.0), (1.0, 1.0)], [])


def test_from_example_closed_forms():
    cond = mat.from_example("conductive", sigma=1.0)
    lossy = mat.from_example("lossy", Omega_e=1.0, alpha_e=1.0)
    for w in (0.7, 2.0 + 0.5j, -1.3 + 0.1j):
        assert abs(cond.eps(w) - (1 - 1 / (1j * w))) < 1e-12
        assert abs(lossy.eps(w) - (1 - 1 / (1j * w + w * w))) < 1e-12
    vac = mat.from_example("lorentz", Omega_e=0.0, omega_e=2.0)
    assert vac.eps(1.3) == pytest.approx(1.0)
    with pytest.raises(NegativeParameter):
        mat.from_example("conductive", sigma=-1.0)


# ---------------------------------------------------------- admissibility

def test_admissible_cases():
    assert mat.check_admissible(mat.from_lorentz(LORENTZ1))
    improper = mat.MaterialModel(chi_e=R(P([0, 1]), P([1])))
    assert not mat.check_admissible(improper)
    cplx = mat.MaterialModel(chi_e=R(P([1 + 1j]), P([-1, 1])))
    res = mat.check_admissible(cplx)
    assert not res and res.reason


def test_lossless_cases():
    assert mat.is_lossless(mat.from_example("lorentz", Omega_e=1, omega_e=1))
    assert not mat.is_lossless(mat.from_example("conductive", sigma=1.0))
    assert not mat.is_lossless(mat.from_example("lossy", Omega_e=1, omega_e=1, alpha_e=0.5))


# --------------------------------------------------------------- passivity

def test_generalized_lorentz_is_passive():
    assert mat.is_passive(mat.from_lorentz(LORENTZ1))


def test_double_drude_not_passive_with_verified_witness():
    res = mat.is_passive(double_drude())
    assert not res
    w = res.witness
    assert w.imag > 0
    assert (w * double_drude().eps(w)).imag < 0


def test_conductive_is_passive():
    assert mat.is_passive(mat.from_example("conductive", sigma=1.0))


@settings(max_examples=40, deadline=None)
@given(lorentz_forms())
def test_passive_monte_carlo_shadow(form):
    m = mat.from_lorentz(form)
    assert mat.is_passive(m)
    rng = np.random.default_rng(1)
    r = 10 ** rng.uniform(-3, 3, 200)
    th = rng.uniform(0, math.pi, 200)
    for w in r * np.exp(1j * th):
        try:
            fe, fm = w * m.eps(w), w * m.mu(w)
        except rf.PoleEvaluation:
            continue
        assert fe.imag >= -1e-12 * max(1.0, abs(fe))
        assert fm.imag >= -1e-12 * max(1.0, abs(fm))


@settings(max_examples=30, deadline=None)
@given(lorentz_forms())
def test_passive_lossless_implies_growing(form):
    assert mat.growing_check(mat.from_lorentz(form))


# ---------------------------------------------------------------- growing

def test_growing_cases():
    assert mat.growing_check(mat.from_example("lorentz", Omega_e=1, omega_e=1))
    assert mat.growing_check(mat.MaterialModel())
    assert not mat.growing_check(double_drude())
    with pytest.raises(NotLossless):
        mat.growing_check(mat.from_example("conductive", sigma=1.0))


def test_double_drude_derivative_is_negative_somewhere():
    m = double_drude()
    f = rf.reduce(m.omega_eps())
    assert complex(rf.evaluate(f, 1.0, order=1)).real < 0


# ----------------------------------------------------------- degeneracy

def degenerate_example():
    eps = omega_law([2, 0, -1], [1, 0, -1])
    mu = omega_law([1, 0, -1], [4, 0, -1])
    return mat.from_omega_laws(eps, mu)


def test_make_nondegenerate_cancels_shared_factor():
    m = degenerate_example()
    assert not mat.is_nondegenerate(m)
    out = mat.make_nondegenerate(m)
    assert mat.is_nondegenerate(out)
    for w in (0.3, 1.7 + 0.2j, 3.1):
        assert abs(out.eps(w) - (2 - w * w) / (4 - w * w)) < 1e-10
        assert abs(out.mu(w) - 1.0) < 1e-10
        assert abs(out.eps(w) * out.mu(w) - m.eps(w) * m.mu(w)) < 1e-10 * abs(m.eps(w) * m.mu(w))


def test_make_nondegenerate_keeps_nondegenerate_models():
    for m in (mat.from_lorentz(LORENTZ1), mat.from_example("drude", Omega_e=1, Omega_m=2)):
        out = mat.make_nondegenerate(m)
        assert out == m


# --------------------------------------------------------- non-dissipative

def test_nondissipative_cases():
    assert mat.is_nondissipative(mat.from_lorentz(LORENTZ1))
    neg_drude = mat.from_omega_laws(omega_law([1, 0, 1], [0, 0, 1]), omega_law([1], [1]))
    assert not mat.is_nondissipative(neg_drude)
    assert mat.is_nondissipative(double_drude())
    with pytest.raises(Degenerate):
        mat.is_nondissipative(degenerate_example())


def test_nondissipative_brute_force_roots():
    m = mat.from_lorentz(LORENTZ1)
    for k2 in np.linspace(0.0, 400.0, 20):
        roots = dsp.dispersion_roots(m, k2)
        assert all(abs(r.imag) <= 1e-7 * max(1.0, abs(r)) for r in roots)


# ----------------------------------------------------- equivalent passive

def test_equivalent_passive_double_drude():
    m = double_drude()
    eq = mat.make_equivalent_passive(m)
    assert mat.is_passive(eq)
    for w in (0.5, 1.5, 3.0):
        assert eq.eps(w) == pytest.approx(1 - 4 / w**2)
        assert eq.mu(w) == pytest.approx(1 - 1 / w**2)


@settings(max_examples=30, deadline=None)
@given(lorentz_forms())
def test_equivalent_passive_preserves_product(form):
    m = mat.make_nondegenerate(mat.from_lorentz(form))
    eq = mat.make_equivalent_passive(m)
    assert mat.is_passive(eq)
    rng = np.random.default_rng(2)
    for w in rng.uniform(-6, 6, 32) + 1j * rng.uniform(0.05, 3, 32):
        f, g = dsp.F(m, w), dsp.F(eq, w)
        assert abs(f - g) <= 1e-10 * max(1.0, abs(f))


@settings(max_examples=30, deadline=None)
@given(lorentz_forms())
def test_interlacing_for_nondissipative(form):
    m = mat.make_nondegenerate(mat.from_lorentz(form))
    if mat.is_nondissipative(m):
        poles, zeros = mat.interlacing_data(m)
        mat.check_interlacing(poles, zeros)


def count_in(values, a, b):
    return sum(1 for v in values if a < v < b)


@settings(max_examples=30, deadline=None)
@given(lorentz_forms(), st.lists(st.tuples(st.floats(0, 12), st.floats(0, 12)), min_size=20, max_size=20))
def test_pole_zero_count_estimate(form, intervals):
    m = mat.make_nondegenerate(mat.from_lorentz(form))
    poles, zeros = mat.interlacing_data(m)
    for a, b in intervals:
        a, b = min(a, b), max(a, b)
        assert abs(count_in(poles, a, b) - count_in(zeros, a, b)) <= 2


# ----------------------------------------------------------- Lorentz form

def test_to_lorentz_form_from_rational():
    m = mat.from_omega_laws(omega_law([-16, 0, 1], [-1, 0, 1]), omega_law([1], [1]))
    form = mat.to_lorentz_form(m)
    assert len(form.e_terms) == 1 and form.m_terms == ()
    w, a = form.e_terms[0]
    assert w == pytest.approx(1.0) and a == pytest.approx(15.0)


def test_to_lorentz_form_vacuum_and_round_trip():
    assert mat.to_lorentz_form(mat.MaterialModel()) == mat.LorentzForm()
    back = mat.to_lorentz_form(mat.from_lorentz(LORENTZ1))
    for (w1, a1), (w2, a2) in zip(back.e_terms + back.m_terms, LORENTZ1.e_terms + LORENTZ1.m_terms):
        assert abs(w1 - w2) < 1e-10 and abs(a1 - a2) < 1e-10
    with pytest.raises(NotLosslessPassive):
        mat.to_lorentz_form(double_drude())


@settings(max_examples=30, deadline=None)
@given(lorentz_forms())
def test_lorentz_form_positive_plasma(form):
    out = mat.to_lorentz_form(mat.from_lorentz(form))
    assert all(a > 0 for _, a in out.e_terms + out.m_terms)


# -------------------------------------------------------------- certify

def test_certify_report_witnesses_reverify():
    rep = mat.certify(double_drude())
    assert rep.is_admissible and rep.is_lossless and not rep.is_passive and rep.is_nondissipative
    w = rep.witnesses["passive"]
    assert (w * double_drude().eps(w)).imag < 0
    rep = mat.certify(mat.from_example("conductive", sigma=1.0))
    w = rep.witnesses["lossless"]
    m = mat.from_example("conductive", sigma=1.0)
    assert not cmath.isclose(m.eps(w), m.eps(-w))


# -------------------------------------------------------- serialization

def test_model_json_round_trip():
    m = mat.from_lorentz(LORENTZ1)
    back = mat.model_from_dict(mat.model_to_dict(m))
    for w in (0.3, 3.0 + 1j):
        assert back.eps(w) == pytest.approx(m.eps(w)) and back.mu(w) == pytest.approx(m.mu(w))


def test_model_json_kinds_and_errors():
    d = {"eps": {"kind": "lossy", "Omega": 1, "omega": 0, "alpha": 1}, "mu": {"kind": "drude", "Omega": 2}}
    m = mat.model_from_dict(d)
    assert m.eps(1.0) == pytest.approx(1 - 1 / (1j + 1))
    assert m.mu(1.0) == pytest.approx(-3.0)
    with pytest.raises(SchemaError):
        mat.model_from_dict({"eps": {"kind": "vacuum"}})
    with pytest.raises(SchemaError):
        mat.model_from_dict({"eps": {"kind": "vacuum", "x": 1}, "mu": {"kind": "vacuum"}})
    with pytest.raises(SchemaError):
        mat.model_from_dict({"eps": {"kind": "plasma"}, "mu": {"kind": "vacuum"}})
