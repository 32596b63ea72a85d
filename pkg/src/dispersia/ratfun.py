"""Polynomials and rational functions with floating-point root bookkeeping.

Coefficients are stored lowest degree first. Rational functions carry a
variable tag, ``"s"`` (with s = -i*omega) or ``"omega"``, so that material
laws can live in the real-coefficient s-domain and be moved to the
frequency domain by an exact power-of-i coefficient map.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DegreeZero, PoleEvaluation, UnsupportedMultiplicity

TOL_REAL = 1e-9
TOL_CLUSTER = 1e-7
TOL_COEFF = 1e-12

# relative Taylor-coefficient level below which a cluster of eigenvalues is
# accepted as a single multiple root
_TOL_MULTIPLE = 1e-12
# widest relative spread examined when merging eigenvalue clusters
_MERGE_RADIUS = 1e-3


def _as_coeff_array(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex))
    if arr.size == 0:
        arr = np.zeros(1, dtype=complex)
    if np.all(arr.imag == 0.0):
        return arr.real.astype(float)
    return arr


class Polynomial:
    """Immutable polynomial with ascending coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = _as_coeff_array(coeffs)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def lead(self):
        return self._c[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and self._c[0] == 0

    def is_real(self) -> bool:
        return not np.iscomplexobj(self._c)

    @classmethod
    def from_roots(cls, roots, lead=1.0) -> "Polynomial":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "Polynomial":
        out = np.zeros(k + 1, dtype=complex)
        out[k] = c
        return cls(out)

    def __call__(self, z):
        z = np.asarray(z)
        out = np.zeros_like(z, dtype=complex if np.iscomplexobj(self._c) or np.iscomplexobj(z) else float)
        for a in self._c[::-1]:
            out = out * z + a
        return out[()] if out.ndim == 0 else out

    def magnitude(self, z) -> float:
        """Sum of |a_k| |z|^k, the natural scale for rounding errors of p(z)."""
        return float(np.sum(np.abs(self._c) * np.abs(z) ** np.arange(len(self._c))))

    def deriv(self, order: int = 1) -> "Polynomial":
        c = self._c
        for _ in range(order):
            if len(c) <= 1:
                return Polynomial([0.0])
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(c)

    def taylor(self, z0, n: int) -> np.ndarray:
        """First n Taylor coefficients p^(j)(z0)/j! of the expansion at z0."""
        c = np.array(self._c, dtype=complex)
        out = np.zeros(n, dtype=complex)
        work = c.copy()
        for j in range(n):
            if len(work) == 0:
                break
            # synthetic division by (z - z0): remainder is the next coefficient
            acc = 0.0j
            quotient = np.zeros(max(len(work) - 1, 0), dtype=complex)
            for k in range(len(work) - 1, -1, -1):
                acc = acc * z0 + work[k]
                if k > 0:
                    quotient[k - 1] = acc
            out[j] = acc
            work = quotient
        return out

    def __add__(self, other):
        other = _poly(other)
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, dtype=complex)
        a[: len(self._c)] += self._c
        a[: len(other._c)] += other._c
        return Polynomial(a)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._c)

    def __sub__(self, other):
        return self + (-_poly(other))

    def __rsub__(self, other):
        return _poly(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self._c * other)
        return Polynomial(np.convolve(self._c, _poly(other)._c))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(self._c / scalar)

    def __divmod__(self, other: "Polynomial"):
        num = np.array(self._c, dtype=complex)
        den = np.array(other._c, dtype=complex)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if len(num) < len(den):
            return Polynomial([0.0]), self
        q = np.zeros(len(num) - len(den) + 1, dtype=complex)
        r = num.copy()
        for k in range(len(q) - 1, -1, -1):
            q[k] = r[k + len(den) - 1] / den[-1]
            r[k : k + len(den)] -= q[k] * den
        rem = r[: len(den) - 1] if len(den) > 1 else np.zeros(1)
        if self.is_real() and other.is_real():
            q, rem = q.real, np.real(rem)
        return Polynomial(q), Polynomial(rem)

    def trimmed(self, rel: float = TOL_COEFF) -> "Polynomial":
        """Drop leading coefficients negligible against the largest one."""
        c = self._c
        if c.size == 0:
            return self
        cut = rel * np.max(np.abs(c))
        k = len(c)
        while k > 1 and abs(c[k - 1]) <= cut:
            k -= 1
        return Polynomial(c[:k])

    def real_if_close(self, rel: float = TOL_COEFF) -> "Polynomial":
        c = self._c
        if not np.iscomplexobj(c):
            return self
        if np.max(np.abs(c.imag), initial=0.0) <= rel * max(np.max(np.abs(c)), 1e-300):
            return Polynomial(c.real)
        return self

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return len(self._c) == len(other._c) and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(np.asarray(self._c, dtype=complex).tolist()))

    def __repr__(self):
        return f"Polynomial({self._c.tolist()})"


def _poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def _pad(c, n):
    out = np.zeros(n, dtype=np.result_type(c, float))
    out[: len(c)] = c
    return out


def difference(a: Polynomial, b: Polynomial, rel: float = TOL_COEFF) -> Polynomial:
    """a - b with coefficients at cancellation level (|a_k - b_k| <= rel (|a_k| + |b_k|)) set to zero."""
    n = max(len(a.coeffs), len(b.coeffs))
    ca, cb = _pad(a.coeffs, n), _pad(b.coeffs, n)
    c = ca - cb
    c[np.abs(c) <= rel * (np.abs(ca) + np.abs(cb))] = 0
    return Polynomial(c)


def conj_product_imag(a: Polynomial, b: Polynomial, rel: float = TOL_COEFF) -> Polynomial:
    """Im(a(x) conj(b(x))) on the real axis, with roundoff-level coefficients set to zero."""
    ca, cb = np.asarray(a.coeffs, dtype=complex), np.conj(np.asarray(b.coeffs, dtype=complex))
    im = np.convolve(ca, cb).imag
    im[np.abs(im) <= rel * np.convolve(np.abs(ca), np.abs(cb))] = 0
    return Polynomial(im)


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with multiplicities; ``scale`` normalizes tolerances."""

    roots: tuple
    scale: float

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def flat(self) -> list:
        out = []
        for r, m in self.roots:
            out.extend([r] * m)
        return out

    def is_real(self, r) -> bool:
        return abs(complex(r).imag) <= TOL_REAL * self.scale

    def real(self) -> list:
        """Real roots as (float, multiplicity), ascending."""
        out = [(float(complex(r).real), m) for r, m in self.roots if self.is_real(r)]
        return sorted(out)

    def nonreal(self) -> list:
        return [(r, m) for r, m in self.roots if not self.is_real(r)]


def _cluster(points: np.ndarray, radius: float) -> list:
    """Single-linkage groups of points closer than radius."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _is_multiple_root(p: Polynomial, c: complex, m: int) -> bool:
    t = p.taylor(c, m)
    coeffs = np.abs(p.coeffs)
    ks = np.arange(len(coeffs))
    for j in range(m):
        bound = sum(coeffs[k] * comb(int(k), j) * abs(c) ** (k - j) for k in ks if k >= j)
        if abs(t[j]) > _TOL_MULTIPLE * max(bound, 1e-300):
            return False
    return True


def _polish(p: Polynomial, z: complex, m: int, steps: int = 1) -> complex:
    """Newton steps on the (m-1)-th derivative, where an m-fold root is simple."""
    q = p.deriv(m - 1) if m > 1 else p
    dq = q.deriv()
    for _ in range(steps):
        d = dq(z)
        if d == 0:
            break
        z_new = z - q(z) / d
        if abs(q(z_new)) <= abs(q(z)):
            z = z_new
    return complex(z)


def roots(p: Polynomial) -> RootSet:
    """All complex roots of p with multiplicities.

    Companion-matrix eigenvalues (LAPACK balances the matrix before the QR
    iteration), one Newton polish per root, clustering of nearby eigenvalues
    into multiple roots and snapping of nearly real roots onto the axis.
    """
    if p.degree < 1:
        raise DegreeZero("root finding needs a polynomial of degree >= 1")
    c = p.coeffs
    n_zero = int(np.argmax(c != 0))
    core = Polynomial(c[n_zero:])
    found = []
    if core.degree >= 1:
        d = core.degree
        comp = np.zeros((d, d), dtype=complex if np.iscomplexobj(core.coeffs) else float)
        comp[1:, :-1] = np.eye(d - 1)
        comp[:, -1] = -(core.coeffs[:-1] / core.coeffs[-1])
        eig = np.linalg.eigvals(comp).astype(complex)
        found = list(eig)
    all_pts = np.array(found + [0.0] * n_zero, dtype=complex)
    scale = float(np.max(np.abs(all_pts))) if all_pts.size else 1.0
    if scale == 0.0:
        scale = 1.0

    groups = [[z] for z in found]
    if found:
        pts = np.array(found)
        owner = list(range(len(found)))
        radius = TOL_CLUSTER * scale
        # grow single-linkage components over widening radii; a component
        # wider than the base tolerance is accepted only if it passes the
        # multiple-root test at its centroid
        while radius <= _MERGE_RADIUS * scale * 1.0001:
            for comp in _cluster(pts, radius):
                if len(comp) < 2 or len({owner[i] for i in comp}) == 1:
                    continue
                base = radius <= TOL_CLUSTER * scale * 1.0001
                if base or _is_multiple_root(core, complex(np.mean(pts[comp])), len(comp)):
                    for i in comp:
                        owner[i] = comp[0]
            radius *= 10.0
        by_owner = {}
        for i, o in enumerate(owner):
            by_owner.setdefault(o, []).append(found[i])
        groups = list(by_owner.values())

    out = []
    for g in groups:
        m = len(g)
        z = complex(np.mean(g))
        z = _polish(core, z, m, steps=1 if m == 1 else 2)
        out.append([z, m])
    if n_zero:
        out.append([0j, n_zero])

    for item in out:
        if abs(item[0].imag) <= TOL_REAL * scale:
            item[0] = complex(item[0].real, 0.0)
    if p.is_real():
        # exact conjugate symmetry for real-coefficient input
        upper = [it for it in out if it[0].imag > 0]
        lower = [it for it in out if it[0].imag < 0]
        for it in upper:
            if not lower:
                break
            k = min(range(len(lower)), key=lambda i: abs(lower[i][0] - it[0].conjugate()))
            if lower[k][1] == it[1]:
                lower[k][0] = it[0].conjugate()
                del lower[k]
    out.sort(key=lambda it: (round(it[0].real, 12), it[0].imag))
    return RootSet(tuple((z, m) for z, m in out), scale)


class RationalFunction:
    """num/den with a monic denominator and a variable tag."""

    __slots__ = ("num", "den", "var")

    def __init__(self, num, den=None, var: str = "s"):
        num = _poly(num) if not isinstance(num, Polynomial) else num
        den = Polynomial([1.0]) if den is None else (_poly(den) if not isinstance(den, Polynomial) else den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if var not in ("s", "omega"):
            raise ValueError(f"unknown variable tag {var!r}")
        lead = den.lead
        if lead != 1:
            num = Polynomial(num.coeffs / lead)
            den = Polynomial(den.coeffs / lead)
        self.num = num
        self.den = den
        self.var = var

    @classmethod
    def constant(cls, c, var="s"):
        return cls(Polynomial([c]), None, var)

    def __call__(self, z):
        return evaluate(self, z)

    def is_real(self) -> bool:
        return self.num.is_real() and self.den.is_real()

    def is_strictly_proper(self) -> bool:
        return self.num.is_zero() or self.num.degree < self.den.degree

    def deriv(self) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(n.deriv() * d - n * d.deriv(), d * d, self.var)

    def _check(self, other):
        if isinstance(other, RationalFunction) and other.var != self.var:
            raise ValueError("mixing s- and omega-variable rational functions")

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            self._check(other)
            return other
        return RationalFunction(_poly(other), None, self.var)

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den, self.var)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den, self.var)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, self.var)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num, self.var)

    def poles(self) -> RootSet:
        return roots(self.den) if self.den.degree >= 1 else RootSet((), 1.0)

    def zeros(self) -> RootSet:
        return roots(self.num) if self.num.degree >= 1 else RootSet((), 1.0)

    def __repr__(self):
        return f"RationalFunction(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()}, var={self.var!r})"


def evaluate(f: RationalFunction, z, order: int = 0):
    """Value (order 0) or derivative (order 1) of f at a scalar z."""
    z = complex(z)
    dz = f.den(z)
    if abs(dz) <= TOL_COEFF * max(f.den.magnitude(z), 1e-300):
        raise PoleEvaluation(f"evaluation at a pole: z = {z}")
    nz = f.num(z)
    if order == 0:
        return nz / dz
    if order == 1:
        return (f.num.deriv()(z) * dz - nz * f.den.deriv()(z)) / dz**2
    raise ValueError("order must be 0 or 1")


_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _powers_map(c: np.ndarray, unit: int) -> np.ndarray:
    """c_k * u^k for u = i (unit=1) or u = -i (unit=3); multiplications are exact."""
    out = np.array(c, dtype=complex)
    for k in range(len(out)):
        w = _I_POWERS[(unit * k) % 4]
        out[k] = complex(out[k].real * w.real - out[k].imag * w.imag,
                         out[k].real * w.imag + out[k].imag * w.real)
    return out


def to_omega(f: RationalFunction) -> RationalFunction:
    """Re-express an s-domain function as a function of omega (s = -i omega)."""
    if f.var == "omega":
        return f
    return RationalFunction(Polynomial(_powers_map(f.num.coeffs, 3)),
                            Polynomial(_powers_map(f.den.coeffs, 3)), "omega")


def to_s(f: RationalFunction) -> RationalFunction:
    """Inverse of :func:`to_omega` (omega = i s)."""
    if f.var == "s":
        return f
    return RationalFunction(Polynomial(_powers_map(f.num.coeffs, 1)),
                            Polynomial(_powers_map(f.den.coeffs, 1)), "s")


def _match_common(a: RootSet, b: RootSet, tol: float) -> list:
    """Pairs of roots shared by a and b, as (location, common multiplicity)."""
    pool = [[r, m] for r, m in b.roots]
    common = []
    for r, m in a.roots:
        best = None
        for item in pool:
            if item[1] > 0 and abs(item[0] - r) <= tol:
                if best is None or abs(item[0] - r) < abs(best[0] - r):
                    best = item
        if best is not None:
            k = min(m, best[1])
            best[1] -= k
            common.append(((r + best[0]) / 2, k))
    return common


def reduce(f: RationalFunction) -> RationalFunction:
    """Divide out the roots shared by numerator and denominator."""
    if f.num.is_zero():
        return RationalFunction(Polynomial([0.0]), Polynomial([1.0]), f.var)
    if f.num.degree < 1 or f.den.degree < 1:
        return f
    rn, rd = roots(f.num), roots(f.den)
    scale = max(rn.scale, rd.scale)
    common = _match_common(rn, rd, TOL_CLUSTER * scale)
    if not common:
        return f
    flat = [r for r, m in common for _ in range(m)]
    g = Polynomial.from_roots(flat)
    if f.is_real():
        g = g.real_if_close(1e-9)
        if not g.is_real():
            g = Polynomial(np.asarray(g.coeffs).real)
    qn, _ = divmod(f.num, g)
    qd, _ = divmod(f.den, g)
    if f.is_real():
        qn, qd = qn.real_if_close(1e-9), qd.real_if_close(1e-9)
    return RationalFunction(qn, qd, f.var)


@dataclass(frozen=True)
class PartialFractions:
    """f = polynomial + sum of coefficient / (z - pole)^order."""

    terms: tuple
    polynomial: Polynomial
    var: str = "s"

    def __call__(self, z):
        z = complex(z)
        val = complex(self.polynomial(z))
        for pole, order, coeff in self.terms:
            val += coeff / (z - pole) ** order
        return val

    def residue(self, pole, tol: float = 1e-9):
        """Coefficient of the order-1 term at the pole nearest to ``pole``."""
        best = None
        for p, order, c in self.terms:
            if order == 1 and abs(p - pole) <= tol * max(1.0, abs(pole)):
                if best is None or abs(p - pole) < abs(best[0] - pole):
                    best = (p, c)
        return 0.0 if best is None else best[1]


def partial_fractions(f: RationalFunction) -> PartialFractions:
    """Expansion in terms c/(z - p)^j; orders up to 2, and up to 4 at z = 0."""
    poly, rem = divmod(f.num, f.den)
    if f.den.degree < 1 or rem.is_zero():
        return PartialFractions((), poly, f.var)
    rs = roots(f.den)
    terms = []
    for p, m in rs.roots:
        at_zero = p == 0
        if m > 4 or (m > 2 and not at_zero):
            raise UnsupportedMultiplicity(f"pole {p} has order {m}")
        others = [q for q, k in rs.roots if q != p for _ in range(k)]
        rest = Polynomial.from_roots(others, lead=f.den.lead)
        a = rem.taylor(p, m)
        b = rest.taylor(p, m)
        # power series division a/b
        h = np.zeros(m, dtype=complex)
        for j in range(m):
            acc = a[j] - sum(h[i] * b[j - i] for i in range(j))
            h[j] = acc / b[0]
        for j in range(1, m + 1):
            c = h[m - j]
            if c != 0:
                terms.append((complex(p), j, complex(c)))
    return PartialFractions(tuple(terms), poly, f.var)


def parity(p: Polynomial) -> str:
    """'even', 'odd' or 'neither', judged relative to the largest coefficient."""
    c = np.abs(p.coeffs)
    tol = TOL_COEFF * (np.max(c) if c.size else 0.0)
    odd_small = np.all(c[1::2] <= tol)
    even_small = np.all(c[0::2] <= tol)
    if odd_small:
        return "even"
    if even_small:
        return "odd"
    return "neither"
