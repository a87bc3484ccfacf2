"""Command line front end.

Subcommands::

    nqdecoherence scan            decay exponents along a time, temperature or N sweep
    nqdecoherence q-functions     kernel values 2N Q_m^0 and 4N Q_m^r along a time sweep
    nqdecoherence rho             per-element modulus, phase and bounds along a time sweep
    nqdecoherence oracle-compare  lattice sums against quadrature on a toy problem

Configuration is a flat ``key = value`` file (``--config``); every key can
also be given as ``--key=value`` which wins over the file.  Units are fixed
by the key suffix.  Output is CSV on stdout or ``--out``; a ``.meta``
sidecar echoes the full configuration next to ``--out`` (stderr otherwise).

Exit codes: 0 success, 2 configuration error, 3 quadrature did not
converge, 4 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import sys
from typing import Dict, List

import numpy as np

from . import __version__
from .core import (DeformationBath, OhmicFermionicBath, PiezoBath, RegisterGeometry,
                   eta_from_gate)
from .decay import (decay_profile, e_factor, e_tilde_factor, q1_r, q2_r, q_fermionic)
from .errors import ConfigError, ConvergenceError, DomainError, ResourceCapError
from .oracle import KLattice, ModeSum
from .quadrature import QuadratureConfig
from .register import BasisPair, bounds, evolve_element, static_element, uniform_bias

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_RESOURCE = 0, 2, 3, 4

# key -> default; the default's type is the key's type
DEFAULTS: Dict[str, object] = {
    "geometry.N": 1000,
    "geometry.q0_nm": 50.0,
    "geometry.d_nm": 400.0,
    "geometry.cL_m_per_s": 5e3,
    "bath.piezo.g": 0.03,
    "bath.piezo.omega_c_per_s": 5e10,
    "bath.deformation.omega_s_sq_per_s2": 1e25,
    "bath.deformation.omega_c_per_s": 5e10,
    "bath.fermionic.eta": 9.3e-8,
    "bath.fermionic.E_F_eV": "",
    "bath.fermionic.V0_eV": "",
    "bath.fermionic.omega_c_f_per_s": 1.3e15,
    "temperature_K": 0.0,
    "time_s": 1e-11,
    "sweep.variable": "time",
    "sweep.start": 1e-13,
    "sweep.stop": 1e-10,
    "sweep.points": 31,
    "sweep.scale": "log",
    "element.preset": "most-offdiagonal",
    "element.l": "",
    "element.m": "",
    "element.rho0_re": 0.5,
    "element.rho0_im": 0.0,
    "bias.epsilon_per_s": 0.0,
    "q.bath": "piezo",
    "q.r_list": "1,2,3",
    "quadrature.rel_tol": 1e-9,
    "quadrature.abs_tol": 1e-14,
    "quadrature.max_subdivisions": 10_000,
    "quadrature.cutoff_decades": 40.0,
    "quadrature.truncation_tol": 1e-9,
    "oracle.N": 3,
    "oracle.q0": 0.5,
    "oracle.d": 4.0,
    "oracle.cL": 1.0,
    "oracle.g": 1.0,
    "oracle.omega_c": 1.0,
    "oracle.t": 1.0,
    "oracle.boxes": "24,34,48",
    "oracle.kmax": 14.0,
    "oracle.mode_cap": 6_000_000,
    "oracle.r_list": "0,1,2",
    "oracle.modes": "",
    "oracle.volume": 1.0,
    "oracle.threshold": 0.01,
}

SCAN_COLUMNS = ["sweep_value", "lambda_b_piezo", "lambda_b_deformation", "lambda_f", "x_b",
                "e_factor", "e_tilde", "two_N_Q2_0", "r_max_used", "status"]
RHO_COLUMNS = ["t", "l", "m", "lambda_b", "lambda_f", "x_b", "bias_phase", "magnitude",
               "phase", "magnitude_ratio", "b_minus", "b_plus", "status"]
ORACLE_COLUMNS = ["quantity", "index", "box", "modes", "lattice", "quadrature", "rel_dev",
                  "verdict"]
MAX_ENUMERATED_N = 12


def q_function_columns(r_list):
    cols = ["t", "two_N_Q1_0", "two_N_Q2_0"]
    for r in r_list:
        cols += [f"four_N_Q1_r{r}", f"four_N_Q2_r{r}"]
    return cols


# ---------------------------------------------------------------------------
# configuration

def _convert(key, raw, line=None):
    default = DEFAULTS[key]
    if not isinstance(raw, str):
        # argparse swallows a bare "--" value; labels can use the comma form instead
        raise ConfigError("cannot read value (write all-minus labels as -1,-1,...)", key, line)
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        if isinstance(default, float):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(f"cannot read {raw!r} as {type(default).__name__}", key, line)
    return raw


def parse_config_text(text: str) -> Dict[str, object]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected key = value", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError("unknown key", key, lineno)
        if key in out:
            raise ConfigError("duplicate key", key, lineno)
        out[key] = _convert(key, value, lineno)
    return out


class RunConfig:
    """Validated configuration with typed accessors for the model objects."""

    def __init__(self, values: Dict[str, object]):
        self.values = dict(DEFAULTS)
        self.values.update(values)
        self._validate()

    def __getitem__(self, key):
        return self.values[key]

    def _validate(self):
        v = self.values
        if v["sweep.variable"] not in ("time", "temperature", "N"):
            raise ConfigError("must be time, temperature or N", "sweep.variable")
        if v["sweep.scale"] not in ("linear", "log"):
            raise ConfigError("must be linear or log", "sweep.scale")
        if v["sweep.points"] < 2:
            raise ConfigError("need at least 2 points", "sweep.points")
        if v["sweep.scale"] == "log" and not (v["sweep.start"] > 0 and v["sweep.stop"] > 0):
            raise ConfigError("log scale needs positive endpoints", "sweep.start")
        if v["sweep.start"] < 0 or v["sweep.stop"] < 0:
            raise ConfigError("sweep endpoints must be >= 0", "sweep.start")
        if v["geometry.N"] < 1:
            raise ConfigError("must be >= 1", "geometry.N")
        if v["q.bath"] not in ("piezo", "deformation"):
            raise ConfigError("must be piezo or deformation", "q.bath")
        if v["element.preset"] not in ("most-offdiagonal", "diagonal", "row", "explicit"):
            raise ConfigError("must be most-offdiagonal, diagonal, row or explicit",
                              "element.preset")
        if (v["bath.fermionic.E_F_eV"] == "") != (v["bath.fermionic.V0_eV"] == ""):
            raise ConfigError("give both E_F_eV and V0_eV or neither", "bath.fermionic.E_F_eV")
        try:
            self.quadrature()
            self.geometry()
            self.piezo()
            self.deformation()
            self.fermionic()
        except DomainError as exc:
            raise ConfigError(str(exc))

    # model objects
    def quadrature(self) -> QuadratureConfig:
        v = self.values
        return QuadratureConfig(v["quadrature.rel_tol"], v["quadrature.abs_tol"],
                                v["quadrature.max_subdivisions"], v["quadrature.cutoff_decades"])

    def geometry(self, n=None) -> RegisterGeometry:
        v = self.values
        return RegisterGeometry.from_nm(v["geometry.N"] if n is None else n, v["geometry.q0_nm"],
                                        v["geometry.d_nm"], v["geometry.cL_m_per_s"])

    def piezo(self, temperature=None) -> PiezoBath:
        v = self.values
        return PiezoBath(temperature=v["temperature_K"] if temperature is None else temperature,
                         g=v["bath.piezo.g"], omega_c=v["bath.piezo.omega_c_per_s"])

    def deformation(self, temperature=None) -> DeformationBath:
        v = self.values
        return DeformationBath(
            temperature=v["temperature_K"] if temperature is None else temperature,
            omega_s_sq=v["bath.deformation.omega_s_sq_per_s2"],
            omega_c=v["bath.deformation.omega_c_per_s"])

    def fermionic(self, temperature=None) -> OhmicFermionicBath:
        v = self.values
        temperature = v["temperature_K"] if temperature is None else temperature
        if v["bath.fermionic.E_F_eV"] != "":
            eta = eta_from_gate(float(v["bath.fermionic.E_F_eV"]),
                                float(v["bath.fermionic.V0_eV"]))
        else:
            eta = v["bath.fermionic.eta"]
        return OhmicFermionicBath(temperature=temperature, eta=eta,
                                  omega_c_f=v["bath.fermionic.omega_c_f_per_s"])

    def sweep_values(self) -> List[float]:
        v = self.values
        start, stop, n = v["sweep.start"], v["sweep.stop"], v["sweep.points"]
        if v["sweep.scale"] == "log":
            values = np.geomspace(start, stop, n)
        else:
            values = np.linspace(start, stop, n)
        if v["sweep.variable"] == "N":
            out = [int(round(x)) for x in values]
            if min(out) < 1:
                raise ConfigError("N sweep values must be >= 1", "sweep.start")
            return out
        return [float(x) for x in values]

    def time_values(self) -> List[float]:
        if self.values["sweep.variable"] != "time":
            raise ConfigError("this command sweeps time; set sweep.variable=time",
                              "sweep.variable")
        return self.sweep_values()

    def pairs(self, n) -> List[BasisPair]:
        v = self.values
        preset = v["element.preset"]
        if preset == "most-offdiagonal":
            return [BasisPair.most_offdiagonal(n)]
        if preset == "diagonal":
            return [BasisPair((1,) * n, (1,) * n)]
        m = parse_label(v["element.m"], "element.m") if v["element.m"] else (-1,) * n
        if len(m) != n:
            raise ConfigError(f"label has {len(m)} qubits, N={n}", "element.m")
        if preset == "explicit":
            if not v["element.l"]:
                raise ConfigError("explicit preset needs element.l", "element.l")
            l = parse_label(v["element.l"], "element.l")
            if len(l) != n:
                raise ConfigError(f"label has {len(l)} qubits, N={n}", "element.l")
            return [BasisPair(l, m)]
        if n > MAX_ENUMERATED_N:
            raise ConfigError(f"row enumeration needs N <= {MAX_ENUMERATED_N}", "element.preset")
        return [BasisPair(l, m) for l in itertools.product((1, -1), repeat=n)]


def parse_label(text: str, key: str):
    """'+-+' or '1,-1,1' -> (1, -1, 1)."""
    text = text.strip()
    try:
        if "," in text:
            out = tuple(int(s) for s in text.split(","))
        else:
            out = tuple({"+": 1, "-": -1}[c] for c in text)
    except (KeyError, ValueError):
        raise ConfigError(f"cannot read label {text!r}", key)
    if not out or any(v not in (1, -1) for v in out):
        raise ConfigError(f"labels must be +-1, got {text!r}", key)
    return out


def format_label(label) -> str:
    return "".join("+" if v > 0 else "-" for v in label)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# commands

class _Writer:
    def __init__(self, columns):
        self.buffer = io.StringIO()
        self.writer = csv.writer(self.buffer, lineterminator="\n")
        self.writer.writerow(columns)
        self.ncols = len(columns)
        self.failures = 0
        self.r_max = 0

    def row(self, values):
        assert len(values) == self.ncols
        self.writer.writerow([fmt(v) for v in values])

    def text(self):
        return self.buffer.getvalue()


def _try(fn, writer, failed, name):
    try:
        return fn()
    except ConvergenceError:
        failed.append(name)
        writer.failures += 1
        return math.nan


def cmd_scan(cfg: RunConfig) -> _Writer:
    out = _Writer(SCAN_COLUMNS)
    qcfg = cfg.quadrature()
    trunc = cfg["quadrature.truncation_tol"]
    variable = cfg["sweep.variable"]
    for value in cfg.sweep_values():
        t = value if variable == "time" else cfg["time_s"]
        temperature = value if variable == "temperature" else None
        geom = cfg.geometry(value if variable == "N" else None)
        pair = cfg.pairs(geom.n_qubits)[0]
        failed: List[str] = []
        piezo = _try(lambda: decay_profile(cfg.piezo(temperature), geom, t, qcfg,
                                           truncation_tol=trunc), out, failed, "piezo")
        deform = _try(lambda: decay_profile(cfg.deformation(temperature), geom, t, qcfg,
                                            truncation_tol=trunc), out, failed, "deformation")
        fb = cfg.fermionic(temperature)
        q2f = _try(lambda: q_fermionic(fb.eta, fb.omega_c_f, fb.temperature, t, 2, qcfg),
                   out, failed, "fermionic")
        nan = math.nan
        lam_p = x_p = e = et = two_n_q = nan
        lam_d = x_d = nan
        r_max = 0
        if not isinstance(piezo, float):
            res = static_element(pair, piezo)
            lam_p, x_p = res.lambda_b, res.x_b
            two_n_q = 2 * geom.n_qubits * piezo.q2[0]
            r_max = piezo.r_max
            if t > 0:
                e, et = e_factor(piezo), e_tilde_factor(piezo)
        if not isinstance(deform, float):
            res = static_element(pair, deform)
            lam_d, x_d = res.lambda_b, res.x_b
            r_max = max(r_max, deform.r_max)
        lam_f = 2.0 * pair.diff_norm_sq * q2f
        out.r_max = max(out.r_max, r_max)
        status = "ok" if not failed else "nonconverged:" + "+".join(failed)
        out.row([value, lam_p, lam_d, lam_f, x_p + x_d, e, et, two_n_q, r_max, status])
    return out


def _r_list(cfg, key, n):
    text = cfg[key].strip()
    if not text:
        return []
    try:
        rs = [int(s) for s in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot read r list {text!r}", key)
    for r in rs:
        if r < 0 or r >= n:
            raise ConfigError(f"r={r} must lie in [0, N-1] with N={n}", key)
    return rs


def cmd_q_functions(cfg: RunConfig) -> _Writer:
    geom = cfg.geometry()
    n = geom.n_qubits
    r_list = [r for r in _r_list(cfg, "q.r_list", n) if r != 0]
    out = _Writer(q_function_columns(r_list))
    bath = cfg.piezo() if cfg["q.bath"] == "piezo" else cfg.deformation()
    qcfg = cfg.quadrature()
    for t in cfg.time_values():
        failed: List[str] = []
        row = [t, _try(lambda: 2 * n * q1_r(bath, geom, 0, t, qcfg), out, failed, "q1"),
               _try(lambda: 2 * n * q2_r(bath, geom, 0, t, qcfg), out, failed, "q2")]
        for r in r_list:
            row.append(_try(lambda: 4 * n * q1_r(bath, geom, r, t, qcfg), out, failed, "q1"))
            row.append(_try(lambda: 4 * n * q2_r(bath, geom, r, t, qcfg), out, failed, "q2"))
        out.row(row)
    return out


def cmd_rho(cfg: RunConfig) -> _Writer:
    geom = cfg.geometry()
    n = geom.n_qubits
    pairs = cfg.pairs(n)
    out = _Writer(RHO_COLUMNS)
    qcfg = cfg.quadrature()
    trunc = cfg["quadrature.truncation_tol"]
    rho0 = complex(cfg["element.rho0_re"], cfg["element.rho0_im"])
    if abs(rho0) > 1:
        raise ConfigError("|rho0| must not exceed 1", "element.rho0_re")
    bias = uniform_bias(cfg["bias.epsilon_per_s"])
    piezo, fb = cfg.piezo(), cfg.fermionic()
    for t in cfg.time_values():
        failed: List[str] = []
        prof = _try(lambda: decay_profile(piezo, geom, t, qcfg, truncation_tol=trunc),
                    out, failed, "piezo")
        q2f = _try(lambda: q_fermionic(fb.eta, fb.omega_c_f, fb.temperature, t, 2, qcfg),
                   out, failed, "fermionic")
        status = "ok" if not failed else "nonconverged:" + "+".join(failed)
        for pair in pairs:
            if isinstance(prof, float) or math.isnan(q2f):
                out.row([t, format_label(pair.l), format_label(pair.m)] + [math.nan] * 9
                        + [status])
                continue
            out.r_max = max(out.r_max, prof.r_max)
            res = static_element(pair, prof, q2f, bias, t)
            value = evolve_element(rho0, res)
            if t > 0 or pair.l == pair.m:
                b_minus, b_plus = bounds(pair, prof, q2f, abs(rho0))
            else:
                b_minus = b_plus = abs(rho0)
            out.row([t, format_label(pair.l), format_label(pair.m), res.lambda_b, res.lambda_f,
                     res.x_b, res.bias_phase, abs(value), math.atan2(value.imag, value.real),
                     res.magnitude_ratio, b_minus, b_plus, status])
    return out


def _oracle_lattices(cfg):
    mode_cap = cfg["oracle.mode_cap"]
    if cfg["oracle.modes"].strip():
        try:
            modes = [[float(x) for x in chunk.split(",")]
                     for chunk in cfg["oracle.modes"].split(";") if chunk.strip()]
            if any(len(m) != 3 for m in modes):
                raise ValueError
        except ValueError:
            raise ConfigError("expected 'kx,ky,kz;kx,ky,kz;...'", "oracle.modes")
        return [("modes", KLattice.from_modes(modes, cfg["oracle.volume"], mode_cap=mode_cap))]
    try:
        boxes = [float(s) for s in cfg["oracle.boxes"].split(",")]
    except ValueError:
        raise ConfigError("expected comma-separated box lengths", "oracle.boxes")
    return [(fmt(L), KLattice.cube(L, cfg["oracle.kmax"], mode_cap=mode_cap)) for L in boxes]


def cmd_oracle_compare(cfg: RunConfig) -> _Writer:
    from .decay import q1_r as api_q1, q2_r as api_q2

    geom = RegisterGeometry(cfg["oracle.N"], cfg["oracle.q0"], cfg["oracle.d"], cfg["oracle.cL"])
    bath = PiezoBath(g=cfg["oracle.g"], omega_c=cfg["oracle.omega_c"])
    t = cfg["oracle.t"]
    threshold = cfg["oracle.threshold"]
    r_list = _r_list(cfg, "oracle.r_list", geom.n_qubits)
    qcfg = cfg.quadrature()
    lattices = _oracle_lattices(cfg)
    explicit = cfg["oracle.modes"].strip() != ""
    out = _Writer(ORACLE_COLUMNS)
    ref = {}
    for r in r_list:
        ref[1, r] = api_q1(bath, geom, r, t, qcfg)
        ref[2, r] = api_q2(bath, geom, r, t, qcfg)
    scale = abs(api_q2(bath, geom, 0, t, qcfg))
    psi_hist: Dict[tuple, List[float]] = {}
    for level, (label, lattice) in enumerate(lattices):
        ms = ModeSum(lattice, bath, geom)
        finest = level == len(lattices) - 1
        for r in r_list:
            for which in (1, 2):
                val = ms.q(r, t, which)
                dev = abs(val - ref[which, r]) / abs(ref[which, r]) if ref[which, r] else math.inf
                if explicit:
                    verdict = "unconverged"
                elif finest:
                    verdict = "pass" if dev < threshold else "fail"
                else:
                    verdict = "info"
                out.row([f"Q{which}", r, label, ms.n_modes, val, ref[which, r], dev, verdict])
        for n in range(1, geom.n_qubits + 1):
            psi, phi = ms.psi_phi(n, t)
            for name, val in (("Psi", psi), ("Phi", phi)):
                hist = psi_hist.setdefault((name, n), [])
                hist.append(abs(val))
                rel = abs(val) / scale if scale else math.inf
                if explicit or not finest:
                    verdict = "unconverged" if explicit else "info"
                elif hist[-1] <= 1e-12 * scale:
                    verdict = "vanishes"
                elif all(b < a for a, b in zip(hist, hist[1:])):
                    verdict = "shrinking"
                else:
                    verdict = "not-shrinking"
                out.row([name, n, label, ms.n_modes, val, 0.0, rel, verdict])
    return out


COMMANDS = {
    "scan": cmd_scan,
    "q-functions": cmd_q_functions,
    "rho": cmd_rho,
    "oracle-compare": cmd_oracle_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nqdecoherence",
        description="Decoherence functions of a charge-qubit register in a phonon bath.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="CSV output path (default: stdout)")
        for key in DEFAULTS:
            p.add_argument(f"--{key}", dest=f"opt:{key}", default=None, metavar="VALUE")
    return parser


def load_config(args) -> RunConfig:
    values: Dict[str, object] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
    for key in DEFAULTS:
        raw = getattr(args, f"opt:{key}")
        if raw is not None:
            values[key] = _convert(key, raw)
    return RunConfig(values)


def metadata(command, cfg: RunConfig, writer: _Writer) -> str:
    lines = [f"command={command}", f"version={__version__}",
             f"rows_failed={writer.failures}", f"r_max={writer.r_max}"]
    lines += [f"config.{key}={fmt(cfg[key])}" for key in sorted(DEFAULTS)]
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        writer = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    meta = metadata(args.command, cfg, writer)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(writer.text())
        with open(args.out + ".meta", "w", encoding="utf-8") as fh:
            fh.write(meta)
    else:
        sys.stdout.write(writer.text())
        sys.stderr.write(meta)
    return EXIT_NONCONVERGENCE if writer.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
