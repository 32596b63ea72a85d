"""Plane-wave dispersion analysis.

F(omega) = omega^2 eps(omega) mu(omega) links frequency and wave number
through F(omega) = |k|^2.  For passive lossless media the positive real
axis splits into spectral bands (F >= 0, each carrying one monotone branch
omega(|k|)) and gaps; the sign of omega F'(omega) tells forward from
backward bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import material as mat
from . import ratfun as rf
from .errors import (
    AsymmetricMeasure,
    DegenerateModel,
    DispersiaError,
    NotLosslessPassive,
    NotOnDispersionCurve,
    OutsideBand,
)
from .material import MaterialModel
from .ratfun import Polynomial, RationalFunction

INF = math.inf


def F(m: MaterialModel, omega) -> complex:
    w = complex(omega)
    return rf.evaluate(m.omega_eps(), w) * rf.evaluate(m.omega_mu(), w)


def D(m: MaterialModel, omega) -> complex:
    """F'(omega) by the product rule on omega*eps and omega*mu."""
    w = complex(omega)
    fe, fm = m.omega_eps(), m.omega_mu()
    return rf.evaluate(fe, w, 1) * rf.evaluate(fm, w) + rf.evaluate(fm, w, 1) * rf.evaluate(fe, w)


def _real_rf(f: RationalFunction) -> RationalFunction:
    return RationalFunction(f.num.real_if_close(1e-9), f.den.real_if_close(1e-9), f.var)


def dispersion_polynomial(m: MaterialModel, k2: float) -> Polynomial:
    f = _real_rf(mat.dispersion_function(m))
    return rf.difference(f.num, f.den * float(k2))


def dispersion_roots(m: MaterialModel, k2: float) -> list:
    """All roots omega of F(omega) = k2, with multiplicities repeated."""
    p = dispersion_polynomial(m, k2)
    if p.degree < 1:
        return []
    return rf.roots(p).flat()


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    direction: str
    k_at_lo: float
    k_at_hi: float
    touching: bool = False

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        pad = tol * max(1.0, abs(x))
        return self.lo - pad <= x <= self.hi + pad


@dataclass(frozen=True)
class BandStructure:
    bands: tuple
    gaps: tuple
    poles_positive: tuple
    zeros_positive: tuple = ()
    intervals: tuple = field(default=(), compare=False)


def _check_band_input(m: MaterialModel):
    if not mat.is_lossless(m) or not mat.is_passive(m):
        raise NotLosslessPassive("band structure needs a passive lossless model")
    if not mat.is_nondegenerate(m):
        raise DegenerateModel("band structure needs a non-degenerate model")


def _positive_real(p: Polynomial):
    """Distinct nonnegative real roots with multiplicities, and a zero flag."""
    if p.degree < 1:
        return [], 0
    rs = rf.roots(p)
    out, at_zero = [], 0
    for r, mult in rs.roots:
        if not rs.is_real(r):
            raise NotLosslessPassive(f"non-real pole or zero {r} of the dispersion function")
        x = r.real
        if abs(x) <= rf.TOL_CLUSTER * rs.scale:
            at_zero = mult
        elif x > 0:
            out.append((x, mult))
    return sorted(out), at_zero


def _sign(f: RationalFunction, x: float) -> int:
    # sign of num * den avoids the pole guard near multiple poles
    v = (complex(f.num(x)) * complex(f.den(x))).real
    return (v > 0) - (v < 0)


def _classify(s_left: int, s_right: int) -> str:
    if s_left < 0 and s_right < 0:
        return "Q-"
    if s_left > 0 and s_right > 0:
        return "Q+"
    return "Q0"


def band_structure(m: MaterialModel) -> BandStructure:
    """Spectral bands and gaps on [0, inf) from the pole/zero sign analysis."""
    _check_band_input(m)
    f = _real_rf(mat.dispersion_function(m))
    poles, pole_at_zero = _positive_real(f.den)
    zeros, _ = _positive_real(f.num)
    pole_x = [x for x, _ in poles]
    points = sorted({0.0, *pole_x, *(x for x, _ in zeros)})
    gaps_between = [b - a for a, b in zip(points, points[1:]) if b > a]
    delta = 1e-4 * (min(gaps_between) if gaps_between else 1.0)

    # intervals between consecutive poles; the first starts at 0
    edges = [(0.0, "pole" if pole_at_zero else "origin")] + [(x, "pole") for x in pole_x]
    intervals = []
    for i, (a, kind_a) in enumerate(edges):
        b, kind_b = (edges[i + 1] if i + 1 < len(edges) else (INF, "inf"))
        inner = [(x, mult) for x, mult in zeros if a < x < b]
        s_left = _sign(f, a + delta)
        s_right = 1 if b == INF else _sign(f, b - delta)
        intervals.append((a, b, kind_a, kind_b, inner, _classify(s_left, s_right)))

    bands = []
    for a, b, kind_a, kind_b, inner, cls in intervals:
        cuts = [a] + [x for x, _ in inner] + [b]
        kinds = [kind_a] + ["zero"] * len(inner) + [kind_b]
        mults = [0] + [mult for _, mult in inner] + [0]
        for j in range(len(cuts) - 1):
            lo, hi = cuts[j], cuts[j + 1]
            probe = 0.5 * (lo + hi) if hi < INF else lo + max(1.0, lo)
            if _sign(f, probe) <= 0:
                continue
            d = (complex(probe) * D(m, probe)).real
            direction = "forward" if d > 0 else "backward"
            k_lo = 0.0 if kinds[j] in ("zero", "origin") else INF
            k_hi = 0.0 if kinds[j + 1] == "zero" else INF
            touching = (mults[j] == 2 and j > 0) or (mults[j + 1] == 2 and j + 1 < len(cuts) - 1)
            bands.append(Band(lo, hi, direction, k_lo, k_hi, touching))

    # a touching flag only counts if the neighbour across the double zero is a band
    fixed = []
    for i, bd in enumerate(bands):
        if bd.touching:
            left = i > 0 and bands[i - 1].hi == bd.lo
            right = i + 1 < len(bands) and bands[i + 1].lo == bd.hi
            bd = Band(bd.lo, bd.hi, bd.direction, bd.k_at_lo, bd.k_at_hi, left or right)
        fixed.append(bd)
    bands = fixed

    gaps = []
    cursor = 0.0
    for bd in bands:
        if bd.lo > cursor:
            gaps.append((cursor, bd.lo))
        cursor = max(cursor, bd.hi)
    if bands and bands[-1].hi != INF:
        raise DispersiaError("last band is bounded; the model violates the vacuum limit")
    return BandStructure(tuple(bands), tuple(gaps), tuple(pole_x), tuple(x for x, _ in zeros),
                         tuple((a, b, cls) for a, b, _, _, _, cls in intervals))


@dataclass(frozen=True)
class BranchCurve:
    band_id: int
    direction: str
    k: tuple
    omega: tuple


@dataclass(frozen=True)
class BranchCurves:
    k_grid: tuple
    curves: tuple


def _positive_roots(m, k2, tol=1e-7):
    out = []
    for r in dispersion_roots(m, k2):
        if abs(r.imag) <= tol * max(1.0, abs(r)) and r.real >= -tol:
            out.append(max(r.real, 0.0))
    return sorted(out)


def branch_curves(m: MaterialModel, k_grid) -> BranchCurves:
    """Sample omega_l(|k|) on each band by band membership of the real roots."""
    bs = band_structure(m)
    ks = tuple(float(k) for k in k_grid)
    per_band = [[] for _ in bs.bands]
    for k in ks:
        roots = _positive_roots(m, k * k)
        if k > 0 and len(roots) != len(bs.bands):
            raise DispersiaError(f"{len(roots)} positive roots at k = {k} for {len(bs.bands)} bands")
        for i, bd in enumerate(bs.bands):
            inside = [r for r in roots if bd.contains(r, 1e-7)]
            if not inside:
                raise DispersiaError(f"no root in band {i} at k = {k}")
            # an endpoint root shared with a touching neighbour: take the nearest to the interior
            mid = bd.lo + 1.0 if bd.hi == INF else 0.5 * (bd.lo + bd.hi)
            per_band[i].append(min(inside, key=lambda r: abs(r - mid)) if len(inside) > 1 else inside[0])
    curves = []
    for i, (bd, om) in enumerate(zip(bs.bands, per_band)):
        positive = [w for k, w in zip(ks, om) if k > 0]
        steps = np.diff(positive)
        if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
            raise DispersiaError(f"branch {i} is not strictly monotone")
        curves.append(BranchCurve(i, bd.direction, ks, tuple(om)))
    return BranchCurves(ks, tuple(curves))


def group_velocity(m: MaterialModel, omega: float) -> float:
    """d omega / d|k| = 2 sqrt(F) / F' on a band interior."""
    try:
        fv = F(m, omega)
        dv = D(m, omega)
    except rf.PoleEvaluation as exc:
        raise OutsideBand(f"omega = {omega} is a pole") from exc
    if not fv.real > 0 or dv == 0:
        raise OutsideBand(f"F({omega}) = {fv.real:g} is not positive")
    return float((2.0 * math.sqrt(fv.real) / dv).real)


@dataclass(frozen=True)
class PlaneWaveMode:
    k: np.ndarray
    omega: complex
    E: np.ndarray
    H: np.ndarray
    P: np.ndarray
    M: np.ndarray
    kind: str


def _near_root(f_poly: Polynomial, w: complex) -> bool:
    if f_poly.degree < 1:
        return False
    rs = rf.roots(f_poly)
    return any(abs(r - w) <= 1e-9 * max(1.0, abs(r)) for r, _ in rs.roots)


def plane_wave(m: MaterialModel, k, omega, e_transverse) -> PlaneWaveMode:
    """Amplitudes (E, H, P, M) of a plane wave exp(i(k.x - omega t)).

    Uses k x H = omega eps E and k x E = -omega mu H, together with the
    static modes at poles of eps or mu and curl-free modes at zeros of
    omega*eps or omega*mu.
    """
    k = np.asarray(k, dtype=complex)
    e = np.asarray(e_transverse, dtype=complex)
    w = complex(omega)
    fe, fm = rf.reduce(m.omega_eps()), rf.reduce(m.omega_mu())
    if _near_root(fe.den, w) and w != 0:
        H = e
        return PlaneWaveMode(k, w, np.zeros(3, complex), H, np.cross(k, H) / w, -m.mu0 * H, "static_magnetic")
    if _near_root(fm.den, w) and w != 0:
        E = e
        return PlaneWaveMode(k, w, E, np.zeros(3, complex), -m.eps0 * E, -np.cross(k, E) / w, "static_electric")
    k2 = complex(np.dot(k, k))
    we, wm = rf.evaluate(fe, w), rf.evaluate(fm, w)
    zero_e, zero_m = _near_root(fe.num, w), _near_root(fm.num, w)
    kn = math.sqrt(abs(k2)) if abs(k2) > 0 else 0.0
    if not (zero_e or zero_m):
        if abs(we * wm - k2) > 1e-8 * max(1.0, abs(k2)):
            raise NotOnDispersionCurve(f"F({w}) = {we * wm} differs from |k|^2 = {k2}")
        khat = k / kn if kn > 0 else np.zeros(3, complex)
        E = e - np.dot(khat, e) * khat
        H = -np.cross(k, E) / wm
        eps, mu = we / w, wm / w
        return PlaneWaveMode(k, w, E, H, (eps - m.eps0) * E, (mu - m.mu0) * H, "maxwell")
    khat = k / kn if kn > 0 else np.array([1.0, 0.0, 0.0], complex)
    along = np.dot(khat, e) * khat
    if not np.any(along):
        along = khat
    E = along if zero_e else np.zeros(3, complex)
    H = along if zero_m else np.zeros(3, complex)
    eps = m.eps(w) if w != 0 else complex(rf.evaluate(m.rel_eps(), 0.0)) * m.eps0
    mu = m.mu(w) if w != 0 else complex(rf.evaluate(m.rel_mu(), 0.0)) * m.mu0
    return PlaneWaveMode(k, w, E, H, (eps - m.eps0) * E, (mu - m.mu0) * H, "curlfree")


# ------------------------------------------------------------- spectrum

@dataclass(frozen=True)
class SpectrumResult:
    continuous_part: tuple
    point_part: dict

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.continuous_part)


def _merge(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + 1e-12 * max(1.0, abs(lo)):
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def _mirror(pos):
    both = list(pos) + [(-hi, -lo) for lo, hi in pos]
    return _merge(both)


def _check_symmetric(nu, name):
    pts = sorted(nu.point_masses)
    for xi, mass in pts:
        if not any(abs(x + xi) <= 1e-9 * max(1.0, abs(xi)) and abs(mm - mass) <= 1e-9 * max(1.0, mass)
                   for x, mm in pts):
            raise AsymmetricMeasure(f"{name}: mass {mass} at {xi} has no mirror image")
    dens = nu.density
    if dens is not None and dens.kind == "grid":
        xi, v = np.asarray(dens.xi), np.asarray(dens.v)
        if not np.allclose(np.interp(-xi[::-1], xi, v, left=0, right=0), v[::-1], rtol=1e-9, atol=1e-12):
            raise AsymmetricMeasure(f"{name}: density is not even")


def _density_support(dens):
    if dens is None:
        return []
    if dens.kind == "lorentzian":
        return [(-INF, INF)]
    if dens.kind == "grid":
        xi, v = np.asarray(dens.xi, float), np.asarray(dens.v, float)
        segs = [(xi[i], xi[i + 1]) for i in range(len(xi) - 1) if v[i] > 0 or v[i + 1] > 0]
        return list(_merge(segs))
    # rational boundary densities are positive on all of the real line
    return [(-INF, INF)]


def _law_from_measure(nu, omega: float, ref: float) -> float:
    """eps/eps0 at a real omega outside the support of nu."""
    val = 1.0
    for xi, mass in nu.point_masses:
        val += mass / (xi * xi - omega * omega)
    dens = nu.density
    if dens is not None and dens.kind == "grid":
        xi, v = np.asarray(dens.xi, float), np.asarray(dens.v, float)
        g = lambda x: np.interp(x, xi, v, left=0, right=0) / (x * x - omega * omega)  # noqa: E731
        val += integrate.quad(g, xi[0], xi[-1], limit=400, points=list(xi[:: max(1, len(xi) // 40)]))[0]
    return ref * val


def spectrum(nu_e, nu_m, eps0: float = 1.0, mu0: float = 1.0) -> SpectrumResult:
    """Real spectrum J u F^{-1}([0, inf)) of the Maxwell operator with the given measures."""
    _check_symmetric(nu_e, "nu_e")
    _check_symmetric(nu_m, "nu_m")
    atoms_e = sorted({xi for xi, _ in nu_e.point_masses})
    atoms_m = sorted({xi for xi, _ in nu_m.point_masses})
    dens_support = _merge(_density_support(nu_e.density) + _density_support(nu_m.density))
    points = {"P_e": tuple(atoms_e), "P_m": tuple(atoms_m), "Z_e": (), "Z_m": ()}
    if dens_support and dens_support[0] == (-INF, INF):
        return SpectrumResult(((-INF, INF),), points)

    if not dens_support:
        model = mat.from_lorentz(mat.LorentzForm(_terms(nu_e), _terms(nu_m), eps0, mu0))
        bs = band_structure(mat.make_nondegenerate(model))
        pos = [(b.lo, b.hi) for b in bs.bands] + [(x, x) for x in bs.zeros_positive] + \
              [(x, x) for x in atoms_e + atoms_m if x >= 0]
        ze = _real_zeros(model.omega_eps())
        zm = _real_zeros(model.omega_mu())
        points["Z_e"], points["Z_m"] = ze, zm
        return SpectrumResult(_mirror(pos), points)

    # grid densities: numeric sign analysis of F on the complement of the support
    lim = 10.0 * max([1.0] + [abs(x) for seg in dens_support for x in seg] + [abs(x) for x in atoms_e + atoms_m])
    blocked = [(lo, hi) for lo, hi in dens_support if hi >= 0]
    pos = [(max(lo, 0.0), hi) for lo, hi in blocked] + [(x, x) for x in atoms_e + atoms_m if x >= 0]
    cuts = sorted({0.0, lim, *(x for seg in blocked for x in seg if 0 <= x <= lim),
                   *(x for x in atoms_e + atoms_m if 0 < x < lim)})
    free = [(a, b) for a, b in zip(cuts, cuts[1:]) if not any(lo <= 0.5 * (a + b) <= hi for lo, hi in blocked)]

    def fval(x):
        return x * x * _law_from_measure(nu_e, x, eps0) * _law_from_measure(nu_m, x, mu0)

    zeros_e, zeros_m = [], []
    for a, b in free:
        xs = np.linspace(a, b, 401)[1:-1]
        vals = np.array([fval(x) for x in xs])
        le = np.array([x * _law_from_measure(nu_e, x, eps0) for x in xs])
        lm = np.array([x * _law_from_measure(nu_m, x, mu0) for x in xs])
        for arr, store, fun in ((le, zeros_e, lambda x: x * _law_from_measure(nu_e, x, eps0)),
                                (lm, zeros_m, lambda x: x * _law_from_measure(nu_m, x, mu0))):
            for i in np.flatnonzero(np.sign(arr[:-1]) * np.sign(arr[1:]) < 0):
                store.append(optimize.brentq(fun, xs[i], xs[i + 1], xtol=1e-14))
        roots = [optimize.brentq(fval, xs[i], xs[i + 1], xtol=1e-14)
                 for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)]
        cuts_ab = [a] + roots + [b]
        for lo, hi in zip(cuts_ab, cuts_ab[1:]):
            if fval(0.5 * (lo + hi)) >= 0:
                pos.append((lo, hi))
    if lim > 0:
        pos.append((lim, INF))
    points["Z_e"] = tuple(sorted({round(z, 12) for z in zeros_e} | {-round(z, 12) for z in zeros_e}))
    points["Z_m"] = tuple(sorted({round(z, 12) for z in zeros_m} | {-round(z, 12) for z in zeros_m}))
    return SpectrumResult(_mirror(pos), points)


def _terms(nu):
    out = {}
    for xi, mass in nu.point_masses:
        if xi == 0:
            out[0.0] = out.get(0.0, 0.0) + mass
        elif xi > 0:
            out[xi] = out.get(xi, 0.0) + 2.0 * mass
    return tuple(sorted(out.items()))


def _real_zeros(f: RationalFunction) -> tuple:
    f = _real_rf(rf.reduce(f))
    if f.num.degree < 1:
        return ()
    rs = rf.roots(f.num)
    return tuple(sorted(r.real for r, _ in rs.roots if rs.is_real(r)))


# -------------------------------------------------------------- export

def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    return format(float(x), ".17g")


def bands_csv(bs: BandStructure) -> str:
    rows = ["band_id,lo,hi,direction"]
    for i, b in enumerate(bs.bands):
        rows.append(f"{i},{_fmt(b.lo)},{_fmt(b.hi)},{b.direction}")
    return "\n".join(rows) + "\n"


def branches_csv(bc: BranchCurves) -> str:
    rows = ["k,branch_id,omega"]
    for c in bc.curves:
        for k, w in zip(c.k, c.omega):
            rows.append(f"{_fmt(k)},{c.band_id},{_fmt(w)}")
    return "\n".join(rows) + "\n"
