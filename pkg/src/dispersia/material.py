"""Dispersive material laws and their structural certificates.

A :class:`MaterialModel` stores the susceptibilities ``chi_e`` and ``chi_m``
as real rational functions of s = -i*omega, so that

    eps(omega) = eps0 * (1 + chi_e(-i*omega)),   mu likewise.

The checks here decide admissibility, losslessness, passivity (exact
Herglotz certification of omega*eps and omega*mu), the growing property,
non-degeneracy and non-dissipativity, and build equivalent models.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import ratfun as rf
from .errors import (
    Degenerate,
    InterlacingViolated,
    NegativeParameter,
    NotLossless,
    NotLosslessPassive,
    SchemaError,
)
from .ratfun import Polynomial, RationalFunction

_ZERO = RationalFunction(Polynomial([0.0]), Polynomial([1.0]), "s")


@dataclass(frozen=True)
class Check:
    """Outcome of a certificate: truth value, violating frequency, reason."""

    ok: bool
    witness: complex | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class MaterialModel:
    eps0: float = 1.0
    mu0: float = 1.0
    chi_e: RationalFunction = _ZERO
    chi_m: RationalFunction = _ZERO

    def eps(self, omega):
        return self.eps0 * (1.0 + rf.evaluate(self.chi_e, -1j * complex(omega)))

    def mu(self, omega):
        return self.mu0 * (1.0 + rf.evaluate(self.chi_m, -1j * complex(omega)))

    def rel_eps(self) -> RationalFunction:
        """eps/eps0 as a rational function of omega."""
        return _relative(self.chi_e)

    def rel_mu(self) -> RationalFunction:
        return _relative(self.chi_m)

    def omega_eps(self) -> RationalFunction:
        """omega * eps(omega), the function certified Herglotz for passivity."""
        r = self.rel_eps()
        return RationalFunction(r.num * Polynomial([0.0, self.eps0]), r.den, "omega")

    def omega_mu(self) -> RationalFunction:
        r = self.rel_mu()
        return RationalFunction(r.num * Polynomial([0.0, self.mu0]), r.den, "omega")


def _relative(chi: RationalFunction) -> RationalFunction:
    """1 + chi in the omega variable, numerator and denominator monic."""
    return rf.to_omega(RationalFunction(chi.den + chi.num, chi.den, "s"))


@dataclass(frozen=True)
class LorentzForm:
    """eps = eps0 (1 + sum Omega^2 / (omega_l^2 - omega^2)), mu likewise."""

    e_terms: tuple = ()
    m_terms: tuple = ()
    eps0: float = 1.0
    mu0: float = 1.0

    def __post_init__(self):
        for name in ("e_terms", "m_terms"):
            terms = tuple((float(w), float(a)) for w, a in getattr(self, name))
            object.__setattr__(self, name, terms)
            for w, a in terms:
                if a <= 0 or w < 0:
                    raise NegativeParameter(f"{name}: need omega >= 0 and Omega^2 > 0, got ({w}, {a})")
            poles = [w for w, _ in terms]
            if any(b <= a for a, b in zip(poles, poles[1:])):
                raise ValueError(f"{name}: pole frequencies must be strictly increasing")


@dataclass(frozen=True)
class PassivityReport:
    is_admissible: bool
    is_lossless: bool
    is_passive: bool
    is_nondissipative: bool
    witnesses: dict = field(default_factory=dict)
    reasons: dict = field(default_factory=dict)


# ---------------------------------------------------------------- builders

def _lorentz_chi(terms) -> RationalFunction:
    den = Polynomial([1.0])
    num = Polynomial([0.0])
    for w, a in terms:
        factor = Polynomial([w * w, 0.0, 1.0])
        num = num * factor + den * a
        den = den * factor
    return RationalFunction(num, den, "s")


def from_lorentz(form: LorentzForm) -> MaterialModel:
    return MaterialModel(form.eps0, form.mu0, _lorentz_chi(form.e_terms), _lorentz_chi(form.m_terms))


def _nonneg(**params):
    for k, v in params.items():
        if v < 0:
            raise NegativeParameter(f"{k} must be nonnegative, got {v}")


def _lossy_chi(Omega, omega, alpha) -> RationalFunction:
    if Omega == 0:
        return _ZERO
    return RationalFunction(Polynomial([Omega * Omega]), Polynomial([omega * omega, alpha, 1.0]), "s")


def from_example(kind: str, eps0: float = 1.0, mu0: float = 1.0, **p) -> MaterialModel:
    """Textbook media.

    conductive: sigma.  lorentz: Omega_e, omega_e, Omega_m, omega_m.
    drude: Omega_e, Omega_m.  lossy: Omega_e, omega_e, alpha_e and the
    magnetic counterparts (all default to 0).
    """
    _nonneg(eps0=eps0, mu0=mu0, **p)
    g = lambda k: float(p.get(k, 0.0))  # noqa: E731
    if kind == "conductive":
        sigma = g("sigma")
        chi_e = _ZERO if sigma == 0 else RationalFunction(Polynomial([sigma / eps0]), Polynomial([0.0, 1.0]), "s")
        return MaterialModel(eps0, mu0, chi_e, _ZERO)
    if kind == "lorentz":
        return MaterialModel(eps0, mu0, _lossy_chi(g("Omega_e"), g("omega_e"), 0.0),
                             _lossy_chi(g("Omega_m"), g("omega_m"), 0.0))
    if kind == "drude":
        return MaterialModel(eps0, mu0, _lossy_chi(g("Omega_e"), 0.0, 0.0), _lossy_chi(g("Omega_m"), 0.0, 0.0))
    if kind == "lossy":
        return MaterialModel(eps0, mu0, _lossy_chi(g("Omega_e"), g("omega_e"), g("alpha_e")),
                             _lossy_chi(g("Omega_m"), g("omega_m"), g("alpha_m")))
    raise ValueError(f"unknown example kind {kind!r}")


def from_omega_laws(eps_rel: RationalFunction, mu_rel: RationalFunction, eps0=1.0, mu0=1.0) -> MaterialModel:
    """Model from eps/eps0 and mu/mu0 given as rational functions of omega."""

    def chi(r):
        s = rf.to_s(r)
        num = rf.difference(s.num, s.den).real_if_close(1e-12)
        den = s.den.real_if_close(1e-12)
        return RationalFunction(num, den, "s")

    return MaterialModel(eps0, mu0, chi(eps_rel), chi(mu_rel))


# ----------------------------------------------------------- admissibility

def _reduced(f: RationalFunction) -> bool:
    if f.num.is_zero() or f.num.degree < 1 or f.den.degree < 1:
        return True
    rn, rd = f.zeros(), f.poles()
    tol = rf.TOL_CLUSTER * max(rn.scale, rd.scale)
    return not rf._match_common(rn, rd, tol)


def check_admissible(m: MaterialModel) -> Check:
    for name, chi, law in (("eps", m.chi_e, m.eps), ("mu", m.chi_m, m.mu)):
        ref = m.eps0 if name == "eps" else m.mu0
        if not chi.is_real():
            w = 1.0 + 1.0j
            return Check(False, w, f"{name}: complex coefficients break the reality principle")
        if not chi.is_strictly_proper():
            return Check(False, 1e6j, f"{name}: susceptibility is not strictly proper")
        if not _reduced(chi):
            rn, rd = chi.zeros(), chi.poles()
            common = rf._match_common(rn, rd, rf.TOL_CLUSTER * max(rn.scale, rd.scale))
            return Check(False, 1j * common[0][0], f"{name}: susceptibility is not reduced")
        if chi.den.degree >= 1:
            rho = max(1.0, max(abs(r) for r, _ in chi.poles()))
            d1 = abs(law(1e3j * rho) / ref - 1.0)
            d2 = abs(law(1e6j * rho) / ref - 1.0)
            if d2 > 1e-2 * d1 + 1e-13:
                return Check(False, 1e6j * rho, f"{name}: no vacuum-like high-frequency limit")
    for name, ref in (("eps0", m.eps0), ("mu0", m.mu0)):
        if not ref > 0:
            return Check(False, None, f"{name} must be positive")
    return Check(True)


def _even_function(chi: RationalFunction) -> bool:
    r = rf.reduce(chi)
    if r.num.is_zero():
        return True
    return rf.parity(r.num) == "even" and rf.parity(r.den) == "even"


def _loss_witness(m: MaterialModel) -> complex:
    for w in (0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 0.1):
        try:
            if abs(m.eps(w).imag) > 1e-12 * abs(m.eps(w)) or abs(m.mu(w).imag) > 1e-12 * abs(m.mu(w)):
                return complex(w)
        except rf.PoleEvaluation:
            continue
    return 1.0 + 0j


def is_lossless(m: MaterialModel) -> bool:
    return _even_function(m.chi_e) and _even_function(m.chi_m)


# --------------------------------------------------------- Herglotz test

def _laurent_lead(f: RationalFunction, p: complex, mult: int, poles: rf.RootSet) -> complex:
    """Leading Laurent coefficient c of f ~ c/(z - p)^mult."""
    others = [q for q, k in poles.roots if q != p for _ in range(k)]
    rest = Polynomial.from_roots(others, lead=f.den.lead)
    return complex(f.num(p)) / complex(rest(p))


def _im(f, z):
    return complex(rf.evaluate(f, z)).imag


def _witness_near(f, p, c, mult, radius, upper_only=True):
    """A point near the pole p where Im f < 0, following the Laurent term."""
    thetas = np.linspace(0.0, math.pi, 721)[1:-1] if upper_only else np.linspace(0, 2 * math.pi, 1441)[:-1]
    vals = np.imag(c * np.exp(-1j * mult * thetas))
    order = np.argsort(vals)
    r = radius
    for _ in range(60):
        for idx in order[:5]:
            z = p + r * cmath.exp(1j * thetas[idx])
            if z.imag >= 0 and _im(f, z) < 0:
                return z
        r /= 2.0
    return None


def herglotz_test(f: RationalFunction) -> Check:
    """Exact certificate that f maps the upper half-plane into its closure.

    Checks, in order: no pole in the open upper half-plane; real poles simple
    with negative residue; growth at most linear with a nonnegative slope;
    Im f >= 0 on the real axis (sign of the imaginary-part numerator between
    its real roots).
    """
    f = rf.reduce(f)
    if f.num.is_zero():
        return Check(True)
    poles = f.poles()
    gaps = sorted({abs(a - b) for a, _ in poles.roots for b, _ in poles.roots if a != b})
    sep = gaps[0] if gaps else 1.0
    for p, mult in poles.roots:
        if p.imag > rf.TOL_REAL * poles.scale:
            c = _laurent_lead(f, p, mult, poles)
            rad = 0.25 * min(p.imag, sep)
            w = _witness_near(f, p, c, mult, rad, upper_only=False)
            return Check(False, w, "pole in the upper half-plane")
    for p, mult in poles.roots:
        if not poles.is_real(p):
            continue
        c = _laurent_lead(f, p, mult, poles)
        if mult == 1 and c.real < 0 and abs(c.imag) <= 1e-9 * abs(c):
            continue
        w = _witness_near(f, complex(p.real), c, mult, 0.25 * sep)
        what = "multiple real pole" if mult > 1 else "real pole with non-negative residue"
        return Check(False, w, what)
    excess = f.num.degree - f.den.degree
    if excess >= 1:
        c = complex(f.num.lead / f.den.lead)
        if excess > 1 or c.real < 0 or abs(c.imag) > 1e-12 * abs(c):
            big = 1e3 * max(poles.scale, 1.0)
            for th in np.linspace(0, math.pi, 181)[1:-1]:
                z = big * cmath.exp(1j * th)
                if _im(f, z) < 0:
                    return Check(False, z, "growth at infinity is not Herglotz")
            return Check(False, None, "growth at infinity is not Herglotz")
    # real-axis sign of Im f = Im(N * conj D) / |D|^2
    im_part = rf.conj_product_imag(f.num, f.den)
    if im_part.is_zero():
        return Check(True)
    xs = []
    if im_part.degree >= 1:
        xs = sorted({x for x, _ in rf.roots(im_part).real()})
    if xs:
        span = max(1.0, xs[-1] - xs[0])
        samples = [xs[0] - span] + [(a + b) / 2 for a, b in zip(xs, xs[1:])] + [xs[-1] + span]
    else:
        samples = [0.0]
    for x in samples:
        h = complex(im_part(x)).real
        if h < -1e-12 * max(im_part.magnitude(x), 1e-300):
            for eta in np.geomspace(1e-3, 1e-12, 40) * max(1.0, abs(x)):
                try:
                    if _im(f, x + 1j * eta) < 0:
                        return Check(False, complex(x, eta), "negative imaginary part on the real axis")
                except rf.PoleEvaluation:
                    continue
            return Check(False, complex(x), "negative imaginary part on the real axis")
    return Check(True)


def is_passive(m: MaterialModel) -> Check:
    """omega*eps and omega*mu are both Herglotz; the witness violates it."""
    for name, f in (("eps", m.omega_eps()), ("mu", m.omega_mu())):
        res = herglotz_test(f)
        if not res:
            return Check(False, res.witness, f"omega*{name}: {res.reason}")
    return Check(True)


def growing_check(m: MaterialModel) -> Check:
    """d(omega eps)/d omega > 0 and d(omega mu)/d omega > 0 off the poles."""
    if not is_lossless(m):
        raise NotLossless("the growing property is only defined for lossless media")
    for name, f in (("eps", m.omega_eps()), ("mu", m.omega_mu())):
        f = rf.reduce(f)
        f = RationalFunction(f.num.real_if_close(1e-12), f.den.real_if_close(1e-12), "omega")
        nd = rf.difference(f.num.deriv() * f.den, f.num * f.den.deriv()).real_if_close(1e-12)
        if nd.is_zero():
            return Check(False, 0j, f"omega*{name} is constant")
        real_poles = [x for x, _ in f.poles().real()] if f.den.degree >= 1 else []
        xs = []
        if nd.degree >= 1:
            nroots = rf.roots(nd)
            for x, _ in nroots.real():
                if all(abs(x - p) > 1e-7 * max(1.0, abs(p)) for p in real_poles):
                    return Check(False, complex(x), f"(omega*{name})' vanishes")
                xs.append(x)
        pts = sorted(set(xs) | set(real_poles))
        if pts:
            span = max(1.0, pts[-1] - pts[0])
            samples = [pts[0] - span] + [(a + b) / 2 for a, b in zip(pts, pts[1:])] + [pts[-1] + span]
        else:
            samples = [0.0]
        for x in samples:
            if complex(nd(x)).real <= 0:
                return Check(False, complex(x), f"(omega*{name})' is not positive")
    return Check(True)


# ---------------------------------------------------------- equivalence

def _roots_or_empty(p: Polynomial):
    return rf.roots(p).roots if p.degree >= 1 else ()


def _atom(r: complex, real_axis: bool) -> Polynomial:
    if real_axis:
        return Polynomial([-r.real, 1.0])
    return Polynomial([abs(r) ** 2, -2 * r.real, 1.0])


def _atoms(p: Polynomial, skip_zero=True):
    """Real irreducible factors (linear or conjugate quadratic) of p, ascending |root|."""
    out = []
    if p.degree < 1:
        return out
    rs = rf.roots(p)
    for r, m in rs.roots:
        if skip_zero and abs(r) <= rf.TOL_CLUSTER * rs.scale:
            continue
        if rs.is_real(r):
            out.extend([(abs(r), complex(r.real), 1)] * m)
        elif r.imag > 0:
            out.extend([(abs(r), r, 2)] * m)
    out.sort(key=lambda t: (t[0], t[1].real, t[1].imag))
    return out


def _divide(p: Polynomial, g: Polynomial) -> Polynomial:
    q, _ = divmod(p, g)
    return q.real_if_close(1e-9)


def _shared_atom(dens: Polynomial, nums: Polynomial):
    """Smallest root shared by dens and nums (nonzero), as (root, degree)."""
    a, b = _atoms(dens), _atoms(nums)
    for _, r, d in a:
        for _, r2, d2 in b:
            scale = max(1.0, abs(r), abs(r2))
            if d == d2 and abs(r - r2) <= 1e-7 * scale:
                return (r + r2) / 2, d
    return None


def _parts(chi: RationalFunction):
    """(numerator of 1 + chi, denominator), both in s."""
    return (chi.den + chi.num).real_if_close(), chi.den.real_if_close()


def is_nondegenerate(m: MaterialModel) -> bool:
    ae, qe = _parts(m.chi_e)
    am, qm = _parts(m.chi_m)
    return _shared_atom(qe, am) is None and _shared_atom(qm, ae) is None


def make_nondegenerate(m: MaterialModel) -> MaterialModel:
    """Equivalent model with no pole of one law at a zero of the other.

    A pole factor of eps shared with the numerator of mu is cancelled, and
    one pole factor of mu of equal degree is moved into eps so both laws
    keep the form constant + strictly proper.  Poles of eps are processed
    first, then poles of mu, smallest frequency first.  The point 0 is left
    alone: it is governed by the omega^2 factor of the dispersion relation.
    """
    ae, qe = _parts(m.chi_e)
    am, qm = _parts(m.chi_m)
    changed = False
    for _ in range(64):
        step = _cancel_once(ae, qe, am, qm)
        if step is None:
            swapped = _cancel_once(am, qm, ae, qe)
            if swapped is None:
                break
            am, qm, ae, qe = swapped
        else:
            ae, qe, am, qm = step
        changed = True
    if not changed:
        return m

    def chi(a, q):
        return RationalFunction(rf.difference(a, q).real_if_close(1e-9), q.real_if_close(1e-9), "s")

    return MaterialModel(m.eps0, m.mu0, chi(ae, qe), chi(am, qm))


def _cancel_once(a1, q1, a2, q2):
    """Cancel one pole atom of law 1 against a zero atom of law 2."""
    shared = _shared_atom(q1, a2)
    if shared is None:
        return None
    r, d = shared
    g = _atom(r, d == 1)
    q1, a2 = _divide(q1, g), _divide(a2, g)
    # law 1 lost d poles: borrow d poles from law 2 (fallback: lend it d zeros)
    donors = [t for t in _atoms(q2, skip_zero=False) if t[2] == d]
    if donors:
        h = _atom(donors[0][1], d == 1)
        return a1, q1 * h, a2, _divide(q2, h)
    zeros = [t for t in _atoms(a1, skip_zero=False) if t[2] == d]
    if zeros:
        h = _atom(zeros[0][1], d == 1)
        return _divide(a1, h), q1, a2 * h, q2
    return None


def product_law(m: MaterialModel) -> RationalFunction:
    """eps*mu as a reduced rational function of omega."""
    e, u = m.rel_eps(), m.rel_mu()
    return rf.reduce(RationalFunction(e.num * u.num * (m.eps0 * m.mu0), e.den * u.den, "omega"))


def dispersion_function(m: MaterialModel) -> RationalFunction:
    """F(omega) = omega^2 eps mu, reduced, as a rational function of omega."""
    e, u = m.rel_eps(), m.rel_mu()
    num = e.num * u.num * Polynomial([0.0, 0.0, m.eps0 * m.mu0])
    return rf.reduce(RationalFunction(num, e.den * u.den, "omega"))


def _nonneg_real(p: Polynomial, what: str, zero_halves: bool):
    """Nonnegative real roots; a zero of order 2k at the origin counts k times."""
    if p.degree < 1:
        return []
    rs = rf.roots(p.real_if_close(1e-9))
    out = []
    for r, mult in rs.roots:
        if not rs.is_real(r):
            raise InterlacingViolated(f"non-real {what} {r}")
        x = r.real
        if abs(x) <= rf.TOL_CLUSTER * rs.scale:
            if not zero_halves:
                raise InterlacingViolated(f"{what} at omega = 0")
            if mult % 2:
                raise InterlacingViolated(f"odd multiplicity {what} at omega = 0")
            out.extend([0.0] * (mult // 2))
        elif x > 0:
            out.extend([x] * mult)
    return sorted(out)


def interlacing_data(m: MaterialModel):
    """Sorted nonnegative poles and zeros of eps*mu (zero pole of order 2k counted k times)."""
    g = product_law(m)
    g = RationalFunction(g.num.real_if_close(1e-9), g.den.real_if_close(1e-9), "omega")
    poles = _nonneg_real(g.den, "pole", True)
    zeros = _nonneg_real(g.num, "zero", False)
    return poles, zeros


def check_interlacing(poles, zeros) -> None:
    if len(poles) != len(zeros):
        raise InterlacingViolated(f"{len(poles)} poles against {len(zeros)} zeros")
    n = len(poles)
    for k in range(n):
        tol = 1e-12 * max(1.0, zeros[k])
        if not poles[k] < zeros[k] - tol:
            raise InterlacingViolated(f"p_{k + 1} = {poles[k]} is not below z_{k + 1} = {zeros[k]}")
        if k + 2 < n and not zeros[k] < poles[k + 2] - tol:
            raise InterlacingViolated(f"z_{k + 1} = {zeros[k]} is not below p_{k + 3} = {poles[k + 2]}")


def make_equivalent_passive(m: MaterialModel) -> MaterialModel:
    """Passive (generalized Lorentz) model with the same eps*mu.

    With p_1 <= p_2 <= ... and z_1 <= z_2 <= ... the nonnegative poles and
    zeros of eps*mu, the even-indexed factors (omega^2 - z^2)/(omega^2 - p^2)
    form the new eps and the odd-indexed ones the new mu.
    """
    poles, zeros = interlacing_data(m)
    check_interlacing(poles, zeros)

    def chi(idx):
        num = Polynomial([1.0])
        den = Polynomial([1.0])
        for k in idx:
            num = num * Polynomial([zeros[k] ** 2, 0.0, 1.0])
            den = den * Polynomial([poles[k] ** 2, 0.0, 1.0])
        return RationalFunction(rf.difference(num, den), den, "s")

    n = len(poles)
    even = [k for k in range(n) if (k + 1) % 2 == 0]
    odd = [k for k in range(n) if (k + 1) % 2 == 1]
    return MaterialModel(m.eps0, m.mu0, chi(even), chi(odd))


def is_nondissipative(m: MaterialModel) -> Check:
    """All plane-wave frequencies real: structural test plus passive synthesis."""
    if not check_admissible(m):
        return Check(False, None, "model is not admissible")
    if not is_nondegenerate(m):
        raise Degenerate("model is degenerate; apply make_nondegenerate first")
    f = dispersion_function(m)
    for what, p in (("zero", f.num), ("pole", f.den)):
        if p.degree < 1:
            continue
        rs = rf.roots(p.real_if_close(1e-9))
        for r, mult in rs.roots:
            if not rs.is_real(r):
                return Check(False, r, f"F has a non-real {what}")
            if mult > 2:
                return Check(False, r, f"F has a {what} of multiplicity {mult}")
    if not is_lossless(m):
        return Check(False, _loss_witness(m), "eps or mu is not even")
    try:
        eq = make_equivalent_passive(m)
    except InterlacingViolated as exc:
        return Check(False, None, f"interlacing fails: {exc}")
    res = is_passive(eq)
    if not res:
        return Check(False, res.witness, "equivalent model is not passive")
    return Check(True)


def to_lorentz_form(m: MaterialModel) -> LorentzForm:
    """Generalized Lorentz coefficients of a passive lossless model."""
    if not is_lossless(m) or not is_passive(m):
        raise NotLosslessPassive("Lorentz form requires a passive lossless model")

    def terms(f: RationalFunction, ref: float):
        f = rf.reduce(f)
        f = RationalFunction(f.num.real_if_close(1e-9), f.den.real_if_close(1e-9), "omega")
        pf = rf.partial_fractions(f)
        out = []
        for p, order, c in pf.terms:
            x = p.real
            if order != 1 or abs(p.imag) > 1e-9 * max(1.0, abs(p)) or x < -1e-12 * max(1.0, abs(p)):
                continue
            # a pair of poles +-w contributes Omega^2 w / (w^2 - omega^2) with residue -Omega^2/2
            res = c.real
            if abs(x) <= 1e-12:
                out.append((0.0, -res / ref))
            else:
                out.append((x, -2.0 * res / ref))
        return tuple(sorted(out))

    return LorentzForm(terms(m.omega_eps(), m.eps0), terms(m.omega_mu(), m.mu0), m.eps0, m.mu0)


def certify(m: MaterialModel) -> PassivityReport:
    """Run every check and collect witnesses for the failed ones."""
    wit, why = {}, {}
    adm = check_admissible(m)
    if not adm:
        wit["admissible"], why["admissible"] = adm.witness, adm.reason
        return PassivityReport(False, False, False, False, wit, why)
    lossless = is_lossless(m)
    if not lossless:
        wit["lossless"], why["lossless"] = _loss_witness(m), "eps or mu is not even in omega"
    pas = is_passive(m)
    if not pas:
        wit["passive"], why["passive"] = pas.witness, pas.reason
    nd = is_nondissipative(make_nondegenerate(m))
    if not nd:
        wit["nondissipative"], why["nondissipative"] = nd.witness, nd.reason
    return PassivityReport(True, lossless, pas.ok, nd.ok, wit, why)


# -------------------------------------------------------- serialization

def _chi_to_dict(chi: RationalFunction) -> dict:
    return {"kind": "rational", "num": [float(c) for c in np.real(chi.num.coeffs)],
            "den": [float(c) for c in np.real(chi.den.coeffs)]}


def model_to_dict(m: MaterialModel) -> dict:
    return {"eps0": m.eps0, "mu0": m.mu0, "eps": _chi_to_dict(m.chi_e), "mu": _chi_to_dict(m.chi_m)}


_LAW_KEYS = {
    "vacuum": set(),
    "rational": {"num", "den"},
    "lorentz": {"terms"},
    "drude": {"Omega"},
    "conductive": {"sigma"},
    "lossy": {"Omega", "omega", "alpha"},
}


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {x!r}")
    return float(x)


def law_from_dict(d, where: str, ref: float) -> RationalFunction:
    if not isinstance(d, dict) or "kind" not in d:
        raise SchemaError(f"{where}: expected an object with a 'kind' key")
    kind = d["kind"]
    if kind not in _LAW_KEYS:
        raise SchemaError(f"{where}.kind: unknown kind {kind!r}")
    extra = set(d) - _LAW_KEYS[kind] - {"kind"}
    if extra:
        raise SchemaError(f"{where}: unknown key(s) {sorted(extra)}")
    missing = _LAW_KEYS[kind] - set(d)
    if missing:
        raise SchemaError(f"{where}: missing key(s) {sorted(missing)}")
    try:
        if kind == "vacuum":
            return _ZERO
        if kind == "rational":
            num = [_number(x, f"{where}.num") for x in d["num"]]
            den = [_number(x, f"{where}.den") for x in d["den"]]
            if not any(den):
                raise SchemaError(f"{where}.den: zero denominator")
            return RationalFunction(Polynomial(num), Polynomial(den), "s")
        if kind == "lorentz":
            terms = [(_number(w, f"{where}.terms"), _number(a, f"{where}.terms")) for w, a in d["terms"]]
            form = LorentzForm(terms)
            return _lorentz_chi(form.e_terms)
        if kind == "drude":
            om = _number(d["Omega"], f"{where}.Omega")
            _nonneg(Omega=om)
            return _lossy_chi(om, 0.0, 0.0)
        if kind == "conductive":
            sigma = _number(d["sigma"], f"{where}.sigma")
            _nonneg(sigma=sigma)
            return _ZERO if sigma == 0 else RationalFunction(Polynomial([sigma / ref]), Polynomial([0.0, 1.0]), "s")
        om, w, a = (_number(d[k], f"{where}.{k}") for k in ("Omega", "omega", "alpha"))
        _nonneg(Omega=om, omega=w, alpha=a)
        return _lossy_chi(om, w, a)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def model_from_dict(d: dict) -> MaterialModel:
    if not isinstance(d, dict):
        raise SchemaError("material: expected a JSON object")
    for key in ("eps", "mu"):
        if key not in d:
            raise SchemaError(f"material: missing key {key!r}")
    eps0 = _number(d.get("eps0", 1.0), "eps0")
    mu0 = _number(d.get("mu0", 1.0), "mu0")
    if eps0 <= 0 or mu0 <= 0:
        raise SchemaError("eps0 and mu0 must be positive")
    return MaterialModel(eps0, mu0, law_from_dict(d["eps"], "eps", eps0), law_from_dict(d["mu"], "mu", mu0))
