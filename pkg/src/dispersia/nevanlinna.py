"""Nevanlinna (Herglotz) representations and their material measures.

A Herglotz function has the representation

    f(w) = alpha*w + beta + integral (1/(xi - w) - xi/(1 + xi^2)) dnu(xi)

with alpha >= 0 and a positive measure nu.  For passive materials
omega*eps/eps0 is Herglotz and its measure is even, which gives
eps = eps0 (1 + integral dnu(xi) / (xi^2 - omega^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import material as mat
from . import ratfun as rf
from .errors import AsymmetricMeasure, NonConvergent, NotHerglotz, NotPassive, QuadratureFailure
from .ratfun import Polynomial, RationalFunction


@dataclass(frozen=True)
class LorentzianDensity:
    """alpha Omega^2 / (pi (xi^2 + alpha^2)): total mass Omega^2."""

    alpha: float
    omega: float
    kind: str = "lorentzian"

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.alpha * self.omega**2 / (math.pi * (xi * xi + self.alpha**2))

    def breakpoints(self):
        return [-self.alpha, 0.0, self.alpha]


@dataclass(frozen=True)
class GridDensity:
    """Piecewise-linear density through (xi_i, v_i), zero outside the grid."""

    xi: tuple
    v: tuple
    kind: str = "grid"

    def __post_init__(self):
        if len(self.xi) != len(self.v) or len(self.xi) < 2:
            raise ValueError("grid density needs matching xi and v with at least two nodes")
        if any(b <= a for a, b in zip(self.xi, self.xi[1:])):
            raise ValueError("grid nodes must increase")
        if min(self.v) < 0:
            raise ValueError("density values must be nonnegative")

    def __call__(self, x):
        return np.interp(x, self.xi, self.v, left=0.0, right=0.0)

    def breakpoints(self):
        return list(self.xi)


@dataclass(frozen=True)
class RationalDensity:
    """num(xi)/den(xi) with real polynomials, den > 0 on the real axis."""

    num: tuple
    den: tuple
    kind: str = "rational"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.num) / np.polynomial.polynomial.polyval(x, self.den)

    def breakpoints(self):
        r = Polynomial(self.den)
        if r.degree < 1:
            return [0.0]
        return sorted({0.0} | {float(z.real) for z, _ in rf.roots(r).roots})


@dataclass(frozen=True)
class HerglotzMeasure:
    alpha: float = 0.0
    beta: float = 0.0
    point_masses: tuple = ()
    density: object = None

    def __post_init__(self):
        pts = tuple(sorted((float(x), float(m)) for x, m in self.point_masses))
        object.__setattr__(self, "point_masses", pts)


@dataclass(frozen=True)
class MaterialMeasures:
    nu_e: HerglotzMeasure
    nu_m: HerglotzMeasure


def herglotz_coeffs(f: RationalFunction):
    """(alpha, beta) = (lim f(iy)/(iy), Re f(i)) of a rational Herglotz function."""
    cert = mat.herglotz_test(f)
    if not cert:
        raise NotHerglotz(cert.reason)
    f = rf.reduce(f)
    alpha = 0.0
    if not f.num.is_zero() and f.num.degree == f.den.degree + 1:
        alpha = float(np.real(f.num.lead / f.den.lead))
    beta = float(complex(rf.evaluate(f, 1j)).real) + 0.0
    return alpha, beta


def _boundary_density(f: RationalFunction):
    """(1/pi) Im f on the real axis as a rational density, or None when it vanishes."""
    im = rf.conj_product_imag(f.num, f.den)
    if im.is_zero():
        return None
    conj_den = Polynomial(np.conj(f.den.coeffs))
    num = im / math.pi
    den = Polynomial(np.real(np.asarray((f.den * conj_den).coeffs, dtype=complex)))
    return RationalDensity(tuple(float(c) for c in num.coeffs), tuple(float(c) for c in den.coeffs))


def extract_measure_rational(f: RationalFunction) -> HerglotzMeasure:
    """Exact (alpha, beta, nu) of a rational Herglotz function.

    Masses sit at the real poles with mass = -residue; the absolutely
    continuous part is (1/pi) Im f on the axis, computed after subtracting
    the real-pole terms (which are real there).
    """
    alpha, beta = herglotz_coeffs(f)
    f = rf.reduce(f)
    points = []
    regular = f
    if f.den.degree >= 1:
        pf = rf.partial_fractions(f)
        scale = max(1.0, max(abs(p) for p, _, _ in pf.terms)) if pf.terms else 1.0
        for p, order, c in pf.terms:
            if abs(p.imag) <= rf.TOL_REAL * scale and order == 1:
                points.append((p.real, -c.real))
                regular = regular - RationalFunction(Polynomial([c.real]), Polynomial([-p.real, 1.0]), "omega")
        regular = rf.reduce(regular)
    density = _boundary_density(regular)
    if density is not None:
        density = _as_lorentzian(density) or density
    return HerglotzMeasure(alpha, beta, tuple(points), density)


def _as_lorentzian(d: RationalDensity):
    """Recognize c / (xi^2 + a^2) and return its closed-form tag."""
    num = Polynomial(d.num).trimmed(1e-12)
    den = Polynomial(d.den).trimmed(1e-12)
    if num.degree != 0 or den.degree != 2:
        return None
    a0, a1, a2 = (float(x) for x in den.coeffs)
    if abs(a1) > 1e-12 * max(abs(a0), abs(a2)) or a0 <= 0 or a2 <= 0:
        return None
    c = float(num.coeffs[0]) / a2
    a = math.sqrt(a0 / a2)
    if c <= 0:
        return None
    return LorentzianDensity(a, math.sqrt(c * math.pi / a))


# --------------------------------------------------------------- quadrature

_QUAD = dict(epsabs=1e-14, epsrel=1e-12, limit=800)


def _integrate_line(g, density, centre: float, width: float):
    """Integral over the real line of g(xi) * density(xi), complex-valued."""
    cuts = set(density.breakpoints()) | {centre - 4 * width, centre, centre + 4 * width}
    if isinstance(density, GridDensity):
        lo, hi = density.xi[0], density.xi[-1]
        cuts = sorted(c for c in cuts if lo <= c <= hi) or [lo, hi]
        cuts = sorted(set(cuts) | {lo, hi})
        pieces = list(zip(cuts, cuts[1:]))
    else:
        cuts = sorted(cuts)
        pieces = [(-math.inf, cuts[0])] + list(zip(cuts, cuts[1:])) + [(cuts[-1], math.inf)]
    total, err = 0.0j, 0.0
    for a, b in pieces:
        if b <= a:
            continue
        for part in (np.real, np.imag):
            val, e = integrate.quad(lambda x: float(part(g(x))) * float(density(x)), a, b, **_QUAD)
            total += val if part is np.real else 1j * val
            err += e
    return total, err


def eval_from_measure(mu: HerglotzMeasure, omega, tol: float = 1e-8) -> complex:
    """alpha w + beta + integral (1/(xi - w) - xi/(1 + xi^2)) dnu for Im w > 0."""
    w = complex(omega)
    if not w.imag > 0:
        raise ValueError("evaluation point must lie in the open upper half-plane")
    val = mu.alpha * w + mu.beta
    for xi, mass in mu.point_masses:
        val += mass * (1.0 / (xi - w) - xi / (1.0 + xi * xi))
    if mu.density is not None:
        kernel = lambda x: (1.0 + x * w) / ((x - w) * (1.0 + x * x))  # noqa: E731
        part, err = _integrate_line(kernel, mu.density, w.real, w.imag)
        if not math.isfinite(err) or err > tol * max(1.0, abs(part)):
            raise QuadratureFailure(f"quadrature error estimate {err:g} at omega = {w}")
        val += part
    if val.imag < -1e-12 * max(1.0, abs(val)):
        raise QuadratureFailure(f"negative imaginary part {val.imag:g} at omega = {w}")
    return val


def eval_material(nu: HerglotzMeasure, omega, ref: float = 1.0, tol: float = 1e-8) -> complex:
    """ref * (1 + integral dnu(xi) / (xi^2 - omega^2)) for an even measure."""
    w = complex(omega)
    val = 1.0 + 0.0j
    for xi, mass in nu.point_masses:
        val += mass / (xi * xi - w * w)
    if nu.density is not None:
        part, err = _integrate_line(lambda x: 1.0 / (x * x - w * w), nu.density, abs(w.real), abs(w.imag) or 1.0)
        if not math.isfinite(err) or err > tol * max(1.0, abs(part)):
            raise QuadratureFailure(f"quadrature error estimate {err:g} at omega = {w}")
        val += part
    return ref * val


# ------------------------------------------------------ Stieltjes inversion

@dataclass(frozen=True)
class StieltjesResult:
    point_a: float
    point_b: float
    interval: float


def _extrapolate(etas, values, tol, what):
    """Polynomial extrapolation to eta = 0 removing the O(eta) and O(eta^2) terms.

    The two-point linear extrapolant from the smallest etas serves as the
    control value; a disagreement above 10*tol signals non-convergence.
    """
    e, v = np.asarray(etas, float), np.asarray(values, float)
    linear = (e[-2] * v[-1] - e[-1] * v[-2]) / (e[-2] - e[-1])
    if len(e) >= 3:
        e3, v3 = e[-3:], v[-3:]
        coeffs = np.polyfit(e3, v3, 2)
        best = float(coeffs[-1])
    else:
        best = float(linear)
    if abs(best - linear) > 10 * tol * max(1.0, abs(best)):
        raise NonConvergent(f"{what}: extrapolants {best:g} and {linear:g} disagree")
    return best


def stieltjes_numeric(f, a: float, b: float, eta_seq=(1e-2, 1e-3, 1e-4), tol: float = 1e-4,
                      points=None) -> StieltjesResult:
    """Masses of nu from boundary values of a black-box Herglotz function f.

    point_a, point_b: nu({a}), nu({b}) from eta * Im f(x + i eta).
    interval: (nu[a, b] + nu(a, b)) / 2 from (1/pi) int_a^b Im f(x + i eta) dx.
    """
    etas = sorted(eta_seq, reverse=True)

    def point(x):
        vals = [eta * complex(f(complex(x, eta))).imag for eta in etas]
        return _extrapolate(etas, vals, tol, f"point mass at {x}")

    vals = []
    for eta in etas:
        g = lambda x, eta=eta: complex(f(complex(x, eta))).imag  # noqa: E731
        v, err = integrate.quad(g, a, b, epsabs=1e-13, epsrel=1e-11, limit=1000, points=points)
        if not math.isfinite(v):
            raise NonConvergent("boundary integral did not converge")
        vals.append(v / math.pi)
    interval = _extrapolate(etas, vals, tol, f"mass of [{a}, {b}]")
    return StieltjesResult(point(a), point(b), interval)


# --------------------------------------------------------- material side

def _symmetrize(nu: HerglotzMeasure, name: str) -> HerglotzMeasure:
    pts = dict()
    for xi, mass in nu.point_masses:
        pts[round(xi, 12)] = (xi, mass)
    out = []
    for key, (xi, mass) in sorted(pts.items()):
        if xi == 0 or abs(xi) <= 1e-14:
            out.append((0.0, mass))
            continue
        mirror = [v for k, v in pts.items() if abs(v[0] + xi) <= 1e-9 * max(1.0, abs(xi))]
        if not mirror or abs(mirror[0][1] - mass) > 1e-8 * max(1.0, mass):
            raise AsymmetricMeasure(f"{name}: unmatched mass at {xi}")
        avg = 0.5 * (mass + mirror[0][1])
        out.append((math.copysign(0.5 * (abs(xi) + abs(mirror[0][0])), xi), avg))
    dens = nu.density
    if isinstance(dens, RationalDensity):
        odd = Polynomial(dens.num).coeffs[1::2].tolist() + Polynomial(dens.den).coeffs[1::2].tolist()
        scale = max(np.max(np.abs(dens.num)), np.max(np.abs(dens.den)))
        if any(abs(c) > 1e-10 * scale for c in odd):
            raise AsymmetricMeasure(f"{name}: density is not even")
    return HerglotzMeasure(0.0, 0.0, tuple(out), dens)


def material_measures(m: mat.MaterialModel) -> MaterialMeasures:
    """Even measures nu_e, nu_m with eps = eps0 (1 + int dnu_e / (xi^2 - omega^2))."""
    cert = mat.is_passive(m)
    if not cert:
        raise NotPassive(cert.reason)
    fe = RationalFunction(m.omega_eps().num / m.eps0, m.omega_eps().den, "omega")
    fm = RationalFunction(m.omega_mu().num / m.mu0, m.omega_mu().den, "omega")
    return MaterialMeasures(_symmetrize(extract_measure_rational(fe), "nu_e"),
                            _symmetrize(extract_measure_rational(fm), "nu_m"))


# ------------------------------------------------------- Gauss-Legendre

def gauss_legendre(n: int, interval=(-1.0, 1.0)):
    """Gauss-Legendre nodes (ascending) and weights on (a, b), by Newton iteration."""
    if n < 1:
        raise ValueError("n must be at least 1")
    a, b = interval
    i = np.arange(1, n + 1)
    x = np.cos(math.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        if n == 1:
            p0, p1 = np.ones_like(x), x.copy()
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def quadrature_lorentz_approx(alpha: float, Omega: float, n_q: int):
    """Generalized Lorentz terms approximating eps = 1 - Omega^2 / (i alpha w + w^2).

    Gauss-Legendre on tau in (0, pi/2) after xi = alpha tan(tau): poles
    alpha tan(tau_l) and plasma terms 2 w_l Omega^2 / pi.
    """
    x, wx = gauss_legendre(n_q, (-1.0, 1.0))
    t = np.tan(math.pi * x / 4.0)
    # tan(pi/4 (1 + x)) written so that x = 0 maps to exactly 1
    poles = alpha * (1.0 + t) / (1.0 - t)
    plasma = 0.5 * wx * Omega**2
    return [(float(p), float(s)) for p, s in zip(poles, plasma)]


def _scalar_or_array(v):
    return complex(v) if np.ndim(v) == 0 else v


def drude_eps(alpha: float, Omega: float, omega):
    """Relative permittivity 1 - Omega^2 / (i alpha omega + omega^2) of a dissipative Drude medium."""
    w = np.asarray(omega, dtype=complex)
    return _scalar_or_array(1.0 - Omega**2 / (1j * alpha * w + w * w))


def lorentz_eps(terms, omega):
    w = np.asarray(omega, dtype=complex)
    return _scalar_or_array(1.0 + sum((s / (p * p - w * w) for p, s in terms), np.zeros_like(w)))


# --------------------------------------------------------- serialization

def measure_to_dict(mu: HerglotzMeasure) -> dict:
    out = {"alpha": mu.alpha, "beta": mu.beta, "points": [[x, m] for x, m in mu.point_masses]}
    d = mu.density
    if isinstance(d, LorentzianDensity):
        out["density"] = {"kind": "lorentzian", "alpha": d.alpha, "omega": d.omega}
    elif isinstance(d, GridDensity):
        out["density"] = {"kind": "grid", "xi": list(d.xi), "v": list(d.v)}
    elif isinstance(d, RationalDensity):
        out["density"] = {"kind": "rational", "num": list(d.num), "den": list(d.den)}
    return out


def measure_from_dict(d: dict) -> HerglotzMeasure:
    dens = d.get("density")
    density = None
    if dens is not None:
        kind = dens.get("kind")
        if kind == "lorentzian":
            density = LorentzianDensity(float(dens["alpha"]), float(dens["omega"]))
        elif kind == "grid":
            density = GridDensity(tuple(map(float, dens["xi"])), tuple(map(float, dens["v"])))
        elif kind == "rational":
            density = RationalDensity(tuple(map(float, dens["num"])), tuple(map(float, dens["den"])))
        else:
            raise ValueError(f"unknown density kind {kind!r}")
    return HerglotzMeasure(float(d.get("alpha", 0.0)), float(d.get("beta", 0.0)),
                           tuple((float(x), float(m)) for x, m in d.get("points", [])), density)
