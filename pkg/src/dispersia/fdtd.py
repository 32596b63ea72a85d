"""2D TE (Ex, Ey, Hz) Yee scheme with auxiliary oscillators on a PEC square.

Each oscillator is carried in velocity form,

    dP/dt = Q,   dQ/dt + alpha Q + omega^2 P = E,

and enters Maxwell through eps0 (dE/dt + sum Omega^2 Q) = rot H (same for H
with -rot E).  Oscillators and fields are advanced together by the trapezoid
rule, which keeps a discrete energy exactly conserved (alpha = 0) or
non-increasing (alpha > 0).

Layout on [-L, L]^2 with nx x ny cells: Ex (nx, ny+1) at (x_{i+1/2}, y_j),
Ey (nx+1, ny) at (x_i, y_{j+1/2}), Hz (nx, ny) at cell centres.  E lives at
integer steps, Hz at half steps.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .errors import CflViolation, NumericalBlowup
from .material import LorentzForm


numba.config.THREADING_LAYER = "workqueue"


def _configure_threads():
    n = os.environ.get("DISPERSIA_THREADS")
    if n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


_configure_threads()


@dataclass(frozen=True)
class Oscillator:
    """One term Omega2 / (omega^2 - i alpha w - w^2) of eps/eps0 - 1 (or mu/mu0 - 1)."""

    Omega2: float
    omega: float = 0.0
    alpha: float = 0.0


def oscillators_from_lorentz(form: LorentzForm):
    e = tuple(Oscillator(a, w) for w, a in form.e_terms)
    m = tuple(Oscillator(a, w) for w, a in form.m_terms)
    return e, m


def oscillators_dissipative(Omega_e, Omega_m, alpha_e, alpha_m):
    """Dissipative Drude pair: eps = eps0 (1 - Omega_e^2 / (i alpha_e w + w^2))."""
    return (Oscillator(Omega_e**2, 0.0, alpha_e),), (Oscillator(Omega_m**2, 0.0, alpha_m),)


@dataclass(frozen=True)
class Gaussian:
    """amp * exp(-rate (x^2 + y^2)), optionally cut to zero outside radius `cutoff`."""

    amp: float = 1.0
    rate: float = 300.0
    cutoff: float | None = None

    def __call__(self, x, y):
        r2 = x * x + y * y
        v = self.amp * np.exp(-self.rate * r2)
        if self.cutoff is not None:
            v = np.where(r2 <= self.cutoff**2, v, 0.0)
        return v


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def default_initial(cutoff=None):
    return (Gaussian(1.0, 300.0, cutoff), Gaussian(1.0, 300.0, cutoff), Gaussian(1.0, 200.0, cutoff))


ZERO_INITIAL = (_zero, _zero, _zero)


@dataclass(frozen=True)
class FdtdConfig:
    nx: int = 200
    ny: int = 200
    L: float = 0.5
    dt_ratio: float = 0.5
    eps0: float = 1.0
    mu0: float = 1.0
    e_osc: tuple = ()
    m_osc: tuple = ()
    t_end: float = 0.0
    probes: tuple = ((0.0, 0.0),)
    probe_every: int = 1
    energy_every: int = 1
    initial: tuple = field(default_factory=default_initial)

    @property
    def dx(self):
        return 2 * self.L / self.nx

    @property
    def dy(self):
        return 2 * self.L / self.ny

    @property
    def dt(self):
        return self.dt_ratio * self.dx

    @property
    def c0(self):
        return 1.0 / math.sqrt(self.eps0 * self.mu0)

    @property
    def n_steps(self):
        return int(math.floor(self.t_end / self.dt + 1e-9))


@dataclass
class FdtdState:
    config: FdtdConfig
    Ex: np.ndarray
    Ey: np.ndarray
    Hz: np.ndarray          # H at n + 1/2
    Hz_prev: np.ndarray     # H at n - 1/2
    Pex: np.ndarray
    Qex: np.ndarray
    Pey: np.ndarray
    Qey: np.ndarray
    Pm: np.ndarray          # magnetic oscillators at n + 1/2
    Qm: np.ndarray
    osc_m_prev: float = 0.0     # magnetic oscillator energy at n - 1/2
    exch_m_prev: float = 0.0    # magnetic power exchange at step n
    dissipation: float = 0.0    # accumulated field-to-oscillator exchange
    n: int = 0

    @property
    def time(self):
        return self.n * self.config.dt


@dataclass
class EnergyTrace:
    times: np.ndarray
    E_em: np.ndarray
    E_osc_e: np.ndarray
    E_osc_m: np.ndarray
    E_loc: np.ndarray
    E_tot: np.ndarray
    dissipation_integral: np.ndarray


@dataclass
class RunResult:
    trace: EnergyTrace
    probe_times: np.ndarray
    probe_values: np.ndarray   # (n_samples, n_probes) of Hz
    state: FdtdState


# ------------------------------------------------------------------ kernels

@njit(cache=True, inline="always")
def _advance(e0, rot, P, Q, Om2, bq, cp, ce, den, dt, ref):
    """Trapezoid update of one field value and its oscillators; returns (e1, exchange)."""
    s = 0.0
    for k in range(Om2.shape[0]):
        s += Om2[k] * (bq[k] * Q[k] - cp[k] * P[k] + ce[k] * e0 + Q[k])
    e1 = (e0 + dt / ref * rot - 0.5 * dt * s) / den
    exch = 0.0
    for k in range(Om2.shape[0]):
        qn = bq[k] * Q[k] - cp[k] * P[k] + ce[k] * (e0 + e1)
        exch += Om2[k] * (qn + Q[k]) * (e0 + e1)
        P[k] += 0.5 * dt * (qn + Q[k])
        Q[k] = qn
    return e1, 0.25 * exch


@njit(cache=True, parallel=True)
def _update_e(Ex, Ey, Hz, Pex, Qex, Pey, Qey, Om2, bq, cp, ce, den, dt, dx, dy, eps0):
    nx, ny = Hz.shape
    rows = np.zeros(nx + 1)
    for i in prange(nx + 1):
        acc = 0.0
        if i < nx:
            for j in range(1, ny):
                rot = (Hz[i, j] - Hz[i, j - 1]) / dy
                e1, x = _advance(Ex[i, j], rot, Pex[i, j], Qex[i, j], Om2, bq, cp, ce, den, dt, eps0)
                Ex[i, j] = e1
                acc += x
        if 0 < i < nx:
            for j in range(ny):
                rot = -(Hz[i, j] - Hz[i - 1, j]) / dx
                e1, x = _advance(Ey[i, j], rot, Pey[i, j], Qey[i, j], Om2, bq, cp, ce, den, dt, eps0)
                Ey[i, j] = e1
                acc += x
        rows[i] = acc
    return rows


@njit(cache=True, parallel=True)
def _update_h(Ex, Ey, Hz, Pm, Qm, Om2, bq, cp, ce, den, dt, dx, dy, mu0):
    nx, ny = Hz.shape
    rows = np.zeros(nx)
    for i in prange(nx):
        acc = 0.0
        for j in range(ny):
            rot = -((Ey[i + 1, j] - Ey[i, j]) / dx - (Ex[i, j + 1] - Ex[i, j]) / dy)
            h1, x = _advance(Hz[i, j], rot, Pm[i, j], Qm[i, j], Om2, bq, cp, ce, den, dt, mu0)
            Hz[i, j] = h1
            acc += x
        rows[i] = acc
    return rows


def _rot_e(Ex, Ey, dx, dy):
    return (Ey[1:, :] - Ey[:-1, :]) / dx - (Ex[:, 1:] - Ex[:, :-1]) / dy


def _coeffs(osc, dt):
    Om2 = np.array([o.Omega2 for o in osc], dtype=float)
    w2 = np.array([o.omega**2 for o in osc], dtype=float)
    al = np.array([o.alpha for o in osc], dtype=float)
    a = 1 + 0.5 * al * dt + 0.25 * w2 * dt * dt
    b = 1 - 0.5 * al * dt - 0.25 * w2 * dt * dt
    bq, cp, ce = b / a, dt * w2 / a, 0.5 * dt / a
    den = 1.0 + 0.5 * dt * float(np.sum(Om2 * ce))
    return Om2, bq, cp, ce, den


def _osc_energy(P, Q, osc, ref, area):
    if not osc:
        return 0.0
    Om2 = np.array([o.Omega2 for o in osc])
    w2 = np.array([o.omega**2 for o in osc])
    return 0.5 * ref * area * float(np.sum(Om2 * (np.sum(Q * Q, axis=(0, 1)) + w2 * np.sum(P * P, axis=(0, 1)))))


# --------------------------------------------------------------- operations

def check_cfl(cfg: FdtdConfig):
    limit = 1.0 / (cfg.c0 * math.sqrt(1.0 / cfg.dx**2 + 1.0 / cfg.dy**2))
    if cfg.dt > limit * (1 + 1e-12):
        raise CflViolation(f"dt = {cfg.dt:g} exceeds the CFL limit {limit:g}")


def grids(cfg: FdtdConfig):
    """Coordinates of the Ex, Ey and Hz samples as (X, Y) pairs."""
    xn = -cfg.L + cfg.dx * np.arange(cfg.nx + 1)
    yn = -cfg.L + cfg.dy * np.arange(cfg.ny + 1)
    xc, yc = 0.5 * (xn[1:] + xn[:-1]), 0.5 * (yn[1:] + yn[:-1])
    return (np.meshgrid(xc, yn, indexing="ij"), np.meshgrid(xn, yc, indexing="ij"),
            np.meshgrid(xc, yc, indexing="ij"))


def init(cfg: FdtdConfig) -> FdtdState:
    """Sample the initial fields; oscillators start at rest.

    H is started at +-dt/2 by a vacuum half step, so the magnetic oscillators
    start at rest at t = dt/2 and the discrete energy at t = 0 has no
    oscillator part.
    """
    check_cfl(cfg)
    (xex, yex), (xey, yey), (xh, yh) = grids(cfg)
    fx, fy, fh = cfg.initial
    Ex = np.array(fx(xex, yex), dtype=float)
    Ey = np.array(fy(xey, yey), dtype=float)
    H0 = np.array(fh(xh, yh), dtype=float)
    Ex[:, 0] = Ex[:, -1] = 0.0
    Ey[0, :] = Ey[-1, :] = 0.0
    half = 0.5 * cfg.dt / cfg.mu0 * _rot_e(Ex, Ey, cfg.dx, cfg.dy)
    ne, nm = len(cfg.e_osc), len(cfg.m_osc)
    z = np.zeros
    return FdtdState(cfg, Ex, Ey, H0 - half, H0 + half,
                     z(Ex.shape + (ne,)), z(Ex.shape + (ne,)), z(Ey.shape + (ne,)), z(Ey.shape + (ne,)),
                     z(H0.shape + (nm,)), z(H0.shape + (nm,)))


def step(state: FdtdState) -> FdtdState:
    """Advance E from n to n+1, then H from n+1/2 to n+3/2 (in place)."""
    cfg = state.config
    dt, dx, dy, area = cfg.dt, cfg.dx, cfg.dy, cfg.dx * cfg.dy
    ce_ = _coeffs(cfg.e_osc, dt)
    cm_ = _coeffs(cfg.m_osc, dt)
    ex_e = _update_e(state.Ex, state.Ey, state.Hz, state.Pex, state.Qex, state.Pey, state.Qey,
                     *ce_, dt, dx, dy, cfg.eps0)
    ex_e = dt * cfg.eps0 * area * math.fsum(ex_e)
    osc_m_now = _osc_energy(state.Pm, state.Qm, cfg.m_osc, cfg.mu0, area)
    prev = state.Hz.copy()
    ex_m = _update_h(state.Ex, state.Ey, state.Hz, state.Pm, state.Qm, *cm_, dt, dx, dy, cfg.mu0)
    ex_m = dt * cfg.mu0 * area * math.fsum(ex_m)
    state.Hz_prev = prev
    state.osc_m_prev = osc_m_now
    state.dissipation += ex_e + 0.5 * (ex_m + state.exch_m_prev)
    state.exch_m_prev = ex_m
    state.n += 1
    return state


@dataclass(frozen=True)
class EnergyRecord:
    E_em: float
    E_osc_e: float
    E_osc_m: float
    E_loc: float
    E_tot: float


def energies(state: FdtdState) -> EnergyRecord:
    """Discrete energies at integer step n.

    E_em = 1/2 eps0 |E^n|^2 + 1/4 mu0 (|H^{n-1/2}|^2 + |H^{n+1/2}|^2)
           + dt/4 (rot E^n, H^{n+1/2} - H^{n-1/2}),
    the field part of the quantity the scheme conserves; oscillator energies
    1/2 Omega^2 (|Q|^2 + omega^2 |P|^2), the magnetic one averaged over n +- 1/2.
    """
    cfg = state.config
    area = cfg.dx * cfg.dy
    we = 0.5 * cfg.eps0 * area * (float(np.sum(state.Ex**2)) + float(np.sum(state.Ey**2)))
    wm = 0.25 * cfg.mu0 * area * (float(np.sum(state.Hz**2)) + float(np.sum(state.Hz_prev**2)))
    rot = _rot_e(state.Ex, state.Ey, cfg.dx, cfg.dy)
    cross = 0.25 * cfg.dt * area * float(np.sum(rot * (state.Hz - state.Hz_prev)))
    em = we + wm + cross
    oe = _osc_energy(state.Pex, state.Qex, cfg.e_osc, cfg.eps0, area) + \
        _osc_energy(state.Pey, state.Qey, cfg.e_osc, cfg.eps0, area)
    om = 0.5 * (state.osc_m_prev + _osc_energy(state.Pm, state.Qm, cfg.m_osc, cfg.mu0, area))
    tot = em + oe + om
    return EnergyRecord(em, oe, om, tot, tot)


def probe_hz(state: FdtdState, x: float, y: float) -> float:
    """Bilinear interpolation of Hz (time n + 1/2) at (x, y)."""
    cfg = state.config
    u = (x + cfg.L) / cfg.dx - 0.5
    v = (y + cfg.L) / cfg.dy - 0.5
    i = int(np.clip(math.floor(u), 0, cfg.nx - 2))
    j = int(np.clip(math.floor(v), 0, cfg.ny - 2))
    fu, fv = u - i, v - j
    H = state.Hz
    return float((1 - fu) * (1 - fv) * H[i, j] + fu * (1 - fv) * H[i + 1, j]
                 + (1 - fu) * fv * H[i, j + 1] + fu * fv * H[i + 1, j + 1])


def run(cfg: FdtdConfig, state: FdtdState | None = None) -> RunResult:
    """Step to t_end, sampling energies every `energy_every` and probes every `probe_every` steps."""
    state = init(cfg) if state is None else state
    n = cfg.n_steps
    rec, times, diss, pt, pv = [], [], [], [], []

    def sample_energy():
        r = energies(state)
        rec.append((r.E_em, r.E_osc_e, r.E_osc_m, r.E_loc, r.E_tot))
        times.append(state.time)
        diss.append(state.dissipation)

    def sample_probe():
        pt.append(state.time + 0.5 * cfg.dt)
        pv.append([probe_hz(state, x, y) for x, y in cfg.probes])

    if n > 0:
        sample_energy()
        sample_probe()
    for k in range(1, n + 1):
        step(state)
        if k % cfg.energy_every == 0 or k == n:
            sample_energy()
            if not math.isfinite(rec[-1][-1]):
                raise NumericalBlowup(f"non-finite energy at step {k}")
        if k % cfg.probe_every == 0 or k == n:
            sample_probe()
    if not (np.all(np.isfinite(state.Hz)) and np.all(np.isfinite(state.Ex)) and np.all(np.isfinite(state.Ey))):
        raise NumericalBlowup("non-finite field values")
    arr = np.array(rec, dtype=float).reshape(-1, 5)
    trace = EnergyTrace(np.array(times), *arr.T.copy(), np.array(diss))
    return RunResult(trace, np.array(pt), np.array(pv, dtype=float).reshape(len(pt), len(cfg.probes)), state)


def support_radius(state: FdtdState, threshold: float) -> float:
    """Radius of the smallest origin-centred disc outside which |E|, |H| <= threshold."""
    r = 0.0
    for (X, Y), F in zip(grids(state.config), (state.Ex, state.Ey, state.Hz)):
        mask = np.abs(F) > threshold
        if np.any(mask):
            r = max(r, float(np.max(np.hypot(X[mask], Y[mask]))))
    return r


@dataclass(frozen=True)
class PassivityDiagnostic:
    bounded: bool          # E_em(T) <= E_em(0)(1 + 1e-8) at all samples
    strongly_passive: bool  # dissipation integral >= -1e-8 E_em(0)
    non_monotone: bool     # E_em increased somewhere between samples


def passivity_diagnostic(trace: EnergyTrace) -> PassivityDiagnostic:
    if trace.E_em.size == 0:
        return PassivityDiagnostic(True, True, False)
    e0 = trace.E_em[0]
    bounded = bool(np.all(trace.E_em <= e0 * (1 + 1e-8)))
    strong = bool(np.all(trace.dissipation_integral >= -1e-8 * e0))
    rises = np.diff(trace.E_em) > 1e-10 * max(e0, 1e-300)
    return PassivityDiagnostic(bounded, strong, bool(np.any(rises)))


# ------------------------------------------------------------------ output

def energy_csv(trace: EnergyTrace) -> str:
    lines = ["t,E_em,E_osc_e,E_osc_m,E_loc,E_tot"]
    for row in zip(trace.times, trace.E_em, trace.E_osc_e, trace.E_osc_m, trace.E_loc, trace.E_tot):
        lines.append(",".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def probe_csv(times, values) -> str:
    lines = ["t,value"]
    for t, v in zip(times, values):
        lines.append(f"{float(t):.17g},{float(v):.17g}")
    return "\n".join(lines) + "\n"


def write_snapshot(path, field_array: np.ndarray, step_index: int) -> None:
    """Little-endian int64 header (nx, ny, step) then row-major float64 values."""
    a = np.ascontiguousarray(field_array, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(np.array([a.shape[0], a.shape[1], step_index], dtype="<i8").tobytes())
        fh.write(a.tobytes(order="C"))


def read_snapshot(path):
    with open(path, "rb") as fh:
        nx, ny, st = np.frombuffer(fh.read(24), dtype="<i8")
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(int(nx), int(ny))
    return data, int(st)
