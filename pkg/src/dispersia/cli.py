"""Command-line front end: dispersia <command> --input FILE --out DIR [options].

Exit codes: 0 success, 1 a material check failed, 2 input/output or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dispersion, fdtd
from . import material as mat
from . import nevanlinna as nv
from . import ratfun as rf
from .errors import DispersiaError, ParseError, SchemaError

COMMANDS = ("check", "bands", "measure", "approx", "simulate")
_TOP_KEYS = {"eps0", "mu0", "eps", "mu", "fdtd", "analysis"}
_FDTD_KEYS = {"nx", "ny", "L", "dt_ratio", "t_end", "probes", "initial", "probe_every", "energy_every", "snapshot"}
_ANALYSIS_KEYS = {"k_max", "k_samples"}
_GAUSS_KEYS = {"amp", "rate", "cutoff"}


class CheckFailed(Exception):
    """A material property required by the command does not hold."""


@dataclass
class RunConfig:
    command: str
    input: Path | None
    out: Path
    material: dict = field(default_factory=dict)
    fdtd: dict = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    extra = set(d) - allowed
    if extra:
        raise SchemaError(f"{where}: unknown key(s) {sorted(extra)}")


def parse_config(path, command: str = "check", out=".", overrides=None):
    """Load and validate a JSON config; returns (RunConfig, MaterialModel)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    _check_keys(raw, _TOP_KEYS, "config")
    model = mat.model_from_dict({k: v for k, v in raw.items() if k in ("eps0", "mu0", "eps", "mu")})
    fd = raw.get("fdtd", {})
    _check_keys(fd, _FDTD_KEYS, "fdtd")
    an = raw.get("analysis", {})
    _check_keys(an, _ANALYSIS_KEYS, "analysis")
    cfg = RunConfig(command, path, Path(out), raw, fd, an, dict(overrides or {}))
    return cfg, model


# ---------------------------------------------------------------- commands

def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _complex_pair(z):
    return None if z is None else [float(np.real(z)), float(np.imag(z))]


def _report_dict(r: mat.PassivityReport) -> dict:
    return {
        "admissible": r.is_admissible,
        "lossless": r.is_lossless,
        "passive": r.is_passive,
        "nondissipative": r.is_nondissipative,
        "witnesses": {k: _complex_pair(v) for k, v in sorted(r.witnesses.items())},
        "reasons": dict(sorted(r.reasons.items())),
    }


def cmd_check(cfg: RunConfig, m: mat.MaterialModel, log) -> int:
    report = mat.certify(m)
    _write(cfg.out / "report.json", _dump_json(_report_dict(report)))
    if not report.is_admissible:
        log(f"not admissible: {report.reasons.get('admissible')}")
        return 1
    if not report.is_passive:
        w = report.witnesses.get("passive")
        log(f"not passive: {report.reasons.get('passive')} (witness omega = {w})")
        return 1
    return 0


def _prepare_for_bands(m: mat.MaterialModel, log) -> mat.MaterialModel:
    adm = mat.check_admissible(m)
    if not adm:
        raise CheckFailed(f"not admissible: {adm.reason}")
    m = mat.make_nondegenerate(m)
    nd = mat.is_nondissipative(m)
    if not nd:
        raise CheckFailed(f"not non-dissipative: {nd.reason}")
    if not mat.is_passive(m):
        log("notice: input is non-dissipative but not passive; using the equivalent passive model")
        m = mat.make_equivalent_passive(m)
    return m


def cmd_bands(cfg: RunConfig, m: mat.MaterialModel, log) -> int:
    m = _prepare_for_bands(m, log)
    k_max = float(cfg.overrides.get("k_max") or cfg.analysis.get("k_max", 10.0))
    n_k = int(cfg.overrides.get("k_samples") or cfg.analysis.get("k_samples", 50))
    if k_max <= 0 or n_k < 1:
        raise SchemaError("analysis: k_max must be positive and k_samples at least 1")
    bs = dispersion.band_structure(m)
    bc = dispersion.branch_curves(m, np.linspace(k_max / n_k, k_max, n_k))
    _write(cfg.out / "bands.csv", dispersion.bands_csv(bs))
    _write(cfg.out / "branches.csv", dispersion.branches_csv(bc))
    return 0


def cmd_measure(cfg: RunConfig, m: mat.MaterialModel, log) -> int:
    pas = mat.is_passive(m)
    if not pas:
        raise CheckFailed(f"not passive: {pas.reason}")
    mm = nv.material_measures(m)
    tol = cfg.overrides.get("tol")
    if tol is not None:
        _cross_check_masses(m, mm, float(tol))
    out = {"nu_e": nv.measure_to_dict(mm.nu_e), "nu_m": nv.measure_to_dict(mm.nu_m)}
    _write(cfg.out / "measure.json", _dump_json(out))
    return 0


def _cross_check_masses(m: mat.MaterialModel, mm: nv.MaterialMeasures, tol: float) -> None:
    """Compare each exact point mass with the numeric boundary-value estimate."""
    if tol <= 0:
        raise SchemaError("--tol must be positive")
    laws = (("nu_e", mm.nu_e, m.omega_eps(), m.eps0), ("nu_m", mm.nu_m, m.omega_mu(), m.mu0))
    for name, nu, f, ref in laws:
        for xi, mass in nu.point_masses:
            if xi == 0.0:
                continue
            est = nv.stieltjes_numeric(lambda z, f=f, ref=ref: rf.evaluate(f, z) / ref, xi, xi, tol=tol).point_a
            if abs(est - mass) > tol * max(1.0, abs(mass)):
                raise CheckFailed(f"{name}: mass {mass:g} at {xi:g} disagrees with boundary estimate {est:g}")


def cmd_approx(cfg: RunConfig, log) -> int:
    alpha = float(cfg.overrides["alpha"])
    Omega = float(cfg.overrides["omega"])
    nq = int(cfg.overrides.get("nq") or 10)
    if alpha <= 0 or Omega <= 0 or nq < 1:
        raise SchemaError("approx: alpha and omega must be positive and nq at least 1")
    terms = nv.quadrature_lorentz_approx(alpha, Omega, nq)
    form = {"eps0": 1.0, "mu0": 1.0, "e_terms": [list(t) for t in terms], "m_terms": [list(t) for t in terms]}
    _write(cfg.out / "lorentz_form.json", _dump_json(form))
    rows = ["re_omega,im_omega,abs_error"]
    for x in np.linspace(-20.0, 20.0, 401):
        w = complex(x, 1.0)
        err = abs(nv.lorentz_eps(terms, w) - nv.drude_eps(alpha, Omega, w))
        rows.append(f"{x:.17g},1,{err:.17g}")
    _write(cfg.out / "errors.csv", "\n".join(rows) + "\n")
    return 0


def _law_oscillators(d: dict, ref: float, where: str):
    kind = d.get("kind")
    if kind == "lossy":
        return (fdtd.Oscillator(float(d["Omega"]) ** 2, float(d["omega"]), float(d["alpha"])),)
    if kind == "conductive" and d.get("sigma", 0) != 0:
        raise CheckFailed(f"{where}: conductive laws have no oscillator form for the time-domain solver")
    chi = mat.law_from_dict(d, where, ref)
    single = mat.MaterialModel(ref, 1.0, chi, mat.law_from_dict({"kind": "vacuum"}, where, 1.0))
    try:
        form = mat.to_lorentz_form(single)
    except DispersiaError as exc:
        raise CheckFailed(f"{where}: not lossless passive ({exc})") from exc
    return tuple(fdtd.Oscillator(a, w) for w, a in form.e_terms)


def _gaussian(d, where):
    _check_keys(d, _GAUSS_KEYS, where)
    cut = d.get("cutoff")
    return fdtd.Gaussian(float(d.get("amp", 1.0)), float(d.get("rate", 300.0)), None if cut is None else float(cut))


def _initial(value):
    if value is None or value == "gaussians":
        return fdtd.default_initial()
    if value == "zero":
        return fdtd.ZERO_INITIAL
    if isinstance(value, dict):
        _check_keys(value, {"ex", "ey", "hz"}, "fdtd.initial")
        zero = {"amp": 0.0}
        return tuple(_gaussian(value.get(k, zero), f"fdtd.initial.{k}") for k in ("ex", "ey", "hz"))
    raise SchemaError("fdtd.initial: expected 'gaussians', 'zero' or an object with ex/ey/hz")


def fdtd_config(cfg: RunConfig) -> fdtd.FdtdConfig:
    fd, ov = cfg.fdtd, cfg.overrides
    eps0 = float(cfg.material.get("eps0", 1.0))
    mu0 = float(cfg.material.get("mu0", 1.0))
    e_osc = _law_oscillators(cfg.material["eps"], eps0, "eps")
    m_osc = _law_oscillators(cfg.material["mu"], mu0, "mu")
    n = ov.get("grid")
    probes = tuple(tuple(map(float, p)) for p in fd.get("probes", [[0.0, 0.0]]))
    if any(len(p) != 2 for p in probes):
        raise SchemaError("fdtd.probes: expected a list of [x, y] pairs")
    t_end = ov.get("t_end")
    return fdtd.FdtdConfig(
        nx=int(n or fd.get("nx", 200)), ny=int(n or fd.get("ny", 200)), L=float(fd.get("L", 0.5)),
        dt_ratio=float(fd.get("dt_ratio", 0.5)), eps0=eps0, mu0=mu0, e_osc=e_osc, m_osc=m_osc,
        t_end=float(t_end if t_end is not None else fd.get("t_end", 1.0)), probes=probes,
        probe_every=int(fd.get("probe_every", 1)), energy_every=int(fd.get("energy_every", 1)),
        initial=_initial(fd.get("initial")))


def cmd_simulate(cfg: RunConfig, m: mat.MaterialModel, log) -> int:
    fc = fdtd_config(cfg)
    res = fdtd.run(fc)
    _write(cfg.out / "energy.csv", fdtd.energy_csv(res.trace))
    for k in range(len(fc.probes)):
        _write(cfg.out / f"probe_{k}.csv", fdtd.probe_csv(res.probe_times, res.probe_values[:, k]))
    if cfg.fdtd.get("snapshot"):
        for name in ("Ex", "Ey", "Hz"):
            fdtd.write_snapshot(cfg.out / f"{name}.bin", getattr(res.state, name), res.state.n)
    diag = fdtd.passivity_diagnostic(res.trace)
    if not (diag.bounded and diag.strongly_passive):
        log("warning: electromagnetic energy exceeded its initial value")
    return 0


def _write(path: Path, text: str) -> None:
    path.write_text(text)


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dispersia", description="Dispersive Maxwell media toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--nq", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--k-max", type=float)
    p.add_argument("--k-samples", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--t-end", type=float)
    return p


def execute(cfg: RunConfig, model, log=None) -> int:
    log = log or (lambda msg: print(msg, file=sys.stderr))
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
        if cfg.command == "approx":
            return cmd_approx(cfg, log)
        handler = {"check": cmd_check, "bands": cmd_bands, "measure": cmd_measure, "simulate": cmd_simulate}
        return handler[cfg.command](cfg, model, log)
    except CheckFailed as exc:
        log(str(exc))
        return 1
    except (ParseError, SchemaError, OSError) as exc:
        log(f"error: {exc}")
        return 2
    except DispersiaError as exc:
        log(f"{type(exc).__name__}: {exc}")
        return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = lambda msg: print(msg, file=sys.stderr)  # noqa: E731
    overrides = {"nq": args.nq, "alpha": args.alpha, "omega": args.omega, "k_max": args.k_max,
                 "k_samples": args.k_samples, "tol": args.tol, "grid": args.grid, "t_end": args.t_end}
    try:
        if args.command == "approx":
            if args.alpha is None or args.omega is None:
                log("error: approx needs --alpha and --omega")
                return 2
            cfg, model = RunConfig("approx", args.input, args.out, overrides=overrides), None
        else:
            if args.input is None:
                log(f"error: {args.command} needs --input")
                return 2
            cfg, model = parse_config(args.input, args.command, args.out, overrides)
    except (ParseError, SchemaError, OSError) as exc:
        log(f"error: {exc}")
        return 2
    except DispersiaError as exc:
        log(f"{type(exc).__name__}: {exc}")
        return 2
    return execute(cfg, model, log)


if __name__ == "__main__":
    sys.exit(main())
