"""Experiment configuration: flat INI files parsed into typed settings.

A config file has one section per concern:

    [experiment]  name, cutoff
    [system]      SystemParams fields (rates in units of kappa_ref)
    [bath]        BathParams fields
    [pulse]       Gaussian drive envelope (pulsed experiments only)
    [gate]        integration gate: width plus center (a time, or "auto")
    [sweep]       experiment-specific grid and target values
    [output]      directory

All times are in units of 1/kappa_ref and all rates in kappa_ref.
``validate_config`` checks schema, physical ranges, and the per-experiment
requirements without running anything; ``load_config`` parses and raises on
an invalid file.
"""

import configparser
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .params import SystemParams, BathParams, Pulse

HARD_CUTOFF = 24

_SYSTEM_FLOAT_KEYS = ("delta1", "delta2", "u1", "u2", "j_hop",
                      "kappa1", "kappa2")
_SYSTEM_COMPLEX_KEYS = ("f1", "f2")
_BATH_FLOAT_KEYS = ("n_th", "dephasing", "cascade_efficiency")


@dataclass(frozen=True)
class GateSpec:
    """Square time gate for pulse integrals.

    ``center`` is a time, or None for "auto" (the equal-time g2 minimum).
    """

    width: float
    center: Optional[float] = None


@dataclass
class ExperimentConfig:
    experiment: str
    system: SystemParams
    bath: BathParams
    cutoff: int
    sweep: Dict[str, float]
    pulse: Optional[Pulse] = None
    gate: Optional[GateSpec] = None
    outdir: str = "runs"
    source: str = "<memory>"

    def sweep_value(self, key: str) -> float:
        return self.sweep[key]


@dataclass
class ValidationReport:
    """Field-level validation findings plus derived-quantity echo."""

    source: str
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    echo: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> List[str]:
        out = []
        for e in self.errors:
            out.append(f"error: {e}")
        for w in self.warnings:
            out.append(f"warning: {w}")
        for k, v in self.echo.items():
            out.append(f"echo: {k} = {v}")
        out.append(("OK" if self.ok else "INVALID") + f": {self.source}")
        return out


# per-experiment requirements: sweep keys -> "float" | "int" | "floats"
# (comma list), plus whether a pulse / gate section is required
@dataclass(frozen=True)
class ExperimentInfo:
    description: str
    sweep_keys: Dict[str, str]
    needs_pulse: bool = False
    needs_gate: bool = False


EXPERIMENTS: Dict[str, ExperimentInfo] = {
    "fig2-g2-vs-n1": ExperimentInfo(
        "Equal-time g2 of the driven mode versus its occupancy at the "
        "optimal working point, plus the photon-number inset",
        {"n1_min": "float", "n1_max": "float", "n1_points": "int",
         "inset_n1": "float", "inset_nmax": "int"}),
    "fig3-maps": ExperimentInfo(
        "Weak-drive-limit g2 maps over (U, J) at the optimal detuning and "
        "over (delta1, delta2) at fixed U, J",
        {"u_min": "float", "u_max": "float", "u_points": "int",
         "j_min": "float", "j_max": "float", "j_points": "int",
         "delta_min": "float", "delta_max": "float", "delta_points": "int"}),
    "fig4-thermal-dephasing-map": ExperimentInfo(
        "Steady-state occupancy and g2 over thermal occupation and pure "
        "dephasing at the optimal working point",
        {"nth_min": "float", "nth_max": "float", "nth_points": "int",
         "eta_min": "float", "eta_max": "float", "eta_points": "int"}),
    "fig5-g2tau-vs-U": ExperimentInfo(
        "Steady-state g2(tau) at the optimal working point for several "
        "Kerr strengths (detuning and hopping derived per curve)",
        {"u_values": "floats", "target_n1": "float", "periods": "float",
         "points_per_period": "int"}),
    "fig5bis-pulsed-two-time": ExperimentInfo(
        "Two-time correlation map and pulse-integrated g2 under Gaussian "
        "pulsed driving of the optimal dimer",
        {"grid_points": "int"}, needs_pulse=True, needs_gate=True),
    "fig6-squeezed-distribution": ExperimentInfo(
        "Optimal displacement curve and the photon-number distribution of "
        "the optimally displaced squeezed state",
        {"r_min": "float", "r_max": "float", "r_points": "int",
         "pn_r": "float", "pn_nmax": "int"}),
    "fig7-optimal-squeeze": ExperimentInfo(
        "Optimal squeeze parameter and minimal g2 versus displacement, "
        "plus the two-photon-suppression curve",
        {"alpha_min": "float", "alpha_max": "float", "alpha_points": "int",
         "r_min": "float", "r_max": "float", "r_points": "int"}),
    "fig8-upb-vs-optimal": ExperimentInfo(
        "Hierarchy of the dimer g2 against the optimal pure and thermal "
        "squeezed-state bounds, with the nonlinearity-sweep inset",
        {"n1_min": "float", "n1_max": "float", "n1_points": "int",
         "inset_n1": "float", "inset_u_min": "float", "inset_u_max": "float",
         "inset_u_points": "int"}),
    "fig9-cascaded": ExperimentInfo(
        "Cascaded pair: steady g2(tau) of the target mode and the pulsed "
        "two-time map with gating",
        {"tau_max": "float", "tau_points": "int", "grid_points": "int"},
        needs_pulse=True, needs_gate=True),
    "fig10-output-mixing": ExperimentInfo(
        "Mixed-output occupancy and g2 maps over the detection angles, the "
        "delayed g2 at the optimal mixing, and the pulsed two-time map",
        {"f0": "float", "theta_in": "float", "phi_in": "float",
         "gamma0": "float", "theta_points": "int", "phi_points": "int",
         "tau_max": "float", "tau_points": "int", "grid_points": "int"},
        needs_pulse=True, needs_gate=True),
    "jc-fig11": ExperimentInfo(
        "Cavity-emitter variant: cavity g2 versus occupancy at the optimal "
        "coupling, and g2(tau) at a reference occupancy",
        {"nc_min": "float", "nc_max": "float", "nc_points": "int",
         "tau_nc": "float", "tau_max": "float", "tau_points": "int"}),
}


def _parse_number(raw: str, kind: str):
    raw = raw.strip()
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "complex":
        return complex(raw.replace(" ", ""))
    if kind == "floats":
        vals = tuple(float(tok) for tok in raw.split(",") if tok.strip())
        if not vals:
            raise ValueError("empty list")
        return vals
    raise ValueError(f"unknown kind {kind}")


def _read_ini(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except OSError as exc:
        raise ValueError(f"{path}: cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ValueError(f"{path}: parse error: {exc}") from exc
    return parser


def _collect(parser, section, keys, kind, report, required=()):
    """Parse `keys` of one declared type from a section, recording errors."""
    out = {}
    if not parser.has_section(section):
        for key in required:
            report.errors.append(f"{section}.{key}: missing (section absent)")
        return out
    for key in keys:
        if not parser.has_option(section, key):
            if key in required:
                report.errors.append(f"{section}.{key}: missing")
            continue
        raw = parser.get(section, key)
        try:
            out[key] = _parse_number(raw, kind)
        except ValueError:
            report.errors.append(
                f"{section}.{key}: expected {kind}, got {raw!r}")
    return out


def validate_config(path: str) -> Tuple[Optional[ExperimentConfig],
                                        ValidationReport]:
    """Parse and check a config file; never runs any solver.

    Returns the parsed config (None when invalid) and a report whose
    ``errors`` carry field-level messages and whose ``echo`` lists derived
    quantities worth confirming (for instance the cascade coupling chi).
    """
    report = ValidationReport(source=path)
    try:
        parser = _read_ini(path)
    except ValueError as exc:
        report.errors.append(str(exc))
        return None, report

    # [experiment]
    name = None
    if not parser.has_section("experiment"):
        report.errors.append("experiment: section missing")
    else:
        name = parser.get("experiment", "name", fallback=None)
        if name is None:
            report.errors.append("experiment.name: missing")
        elif name not in EXPERIMENTS:
            known = ", ".join(sorted(EXPERIMENTS))
            report.errors.append(
                f"experiment.name: unknown experiment {name!r} "
                f"(known: {known})")
            name = None
    cutoff_map = _collect(parser, "experiment", ("cutoff",), "int", report,
                          required=("cutoff",))
    cutoff = cutoff_map.get("cutoff", 0)
    if "cutoff" in cutoff_map and not 2 <= cutoff <= HARD_CUTOFF:
        report.errors.append(
            f"experiment.cutoff: must lie in [2, {HARD_CUTOFF}], got "
            f"{cutoff}")

    # [system]
    sysvals = _collect(parser, "system", _SYSTEM_FLOAT_KEYS, "float", report)
    sysvals.update(_collect(parser, "system", _SYSTEM_COMPLEX_KEYS,
                            "complex", report))
    for key in ("kappa1", "kappa2"):
        if sysvals.get(key, 1.0) <= 0:
            report.errors.append(f"system.{key}: must be > 0")
    for key in ("u1", "u2"):
        if sysvals.get(key, 0.0) < 0:
            report.errors.append(f"system.{key}: must be >= 0")

    # [bath]
    bathvals = _collect(parser, "bath", _BATH_FLOAT_KEYS, "float", report)
    bathvals.update(_collect(parser, "bath", ("squeeze_xi",), "complex",
                             report))
    if parser.has_option("bath", "squeeze_standard_form"):
        try:
            bathvals["squeeze_standard_form"] = parser.getboolean(
                "bath", "squeeze_standard_form")
        except ValueError:
            report.errors.append(
                "bath.squeeze_standard_form: expected a boolean")
    if bathvals.get("n_th", 0.0) < 0:
        report.errors.append("bath.n_th: must be >= 0")
    if bathvals.get("dephasing", 0.0) < 0:
        report.errors.append("bath.dephasing: must be >= 0")
    eta_c = bathvals.get("cascade_efficiency", 0.0)
    if not 0.0 <= eta_c <= 1.0:
        report.errors.append(
            f"bath.cascade_efficiency: must lie in [0, 1], got {eta_c}")

    # [pulse] / [gate]
    pulse = None
    info = EXPERIMENTS.get(name) if name else None
    if parser.has_section("pulse") or (info and info.needs_pulse):
        req = ("f_peak", "sigma_t", "t0")
        pv = _collect(parser, "pulse", ("sigma_t", "t0"), "float", report,
                      required=req[1:] if (info and info.needs_pulse) else ())
        pv.update(_collect(parser, "pulse", ("f_peak",), "complex", report,
                           required=req[:1]
                           if (info and info.needs_pulse) else ()))
        if not parser.has_section("pulse") and info and info.needs_pulse:
            report.errors.append("pulse: section missing (required by "
                                 f"{name})")
        if pv.get("sigma_t", 1.0) <= 0:
            report.errors.append("pulse.sigma_t: must be > 0")
        elif len(pv) == 3:
            pulse = Pulse(f_peak=pv["f_peak"], sigma_t=pv["sigma_t"],
                          t0=pv["t0"])
    gate = None
    if parser.has_section("gate") or (info and info.needs_gate):
        gv = _collect(parser, "gate", ("width",), "float", report,
                      required=("width",)
                      if (info and info.needs_gate) else ())
        if gv.get("width", 1.0) <= 0:
            report.errors.append("gate.width: must be > 0")
        center = None
        if parser.has_option("gate", "center"):
            raw = parser.get("gate", "center").strip()
            if raw != "auto":
                try:
                    center = float(raw)
                except ValueError:
                    report.errors.append(
                        f"gate.center: expected a time or 'auto', got "
                        f"{raw!r}")
        if "width" in gv:
            gate = GateSpec(width=gv["width"], center=center)

    # [sweep]
    sweep: Dict[str, float] = {}
    if info:
        for key, kind in info.sweep_keys.items():
            got = _collect(parser, "sweep", (key,), kind, report,
                           required=(key,))
            sweep.update(got)
        for key, kind in info.sweep_keys.items():
            if kind == "int" and key.endswith("points") \
                    and sweep.get(key, 1) < 1:
                report.errors.append(
                    f"sweep.{key}: grid must have at least one point, got "
                    f"{sweep[key]}")
        for lo_key in list(sweep):
            if lo_key.endswith("_min"):
                hi_key = lo_key[:-4] + "_max"
                if hi_key in sweep and sweep[hi_key] < sweep[lo_key]:
                    report.errors.append(
                        f"sweep.{hi_key}: must be >= sweep.{lo_key}")

    outdir = parser.get("output", "directory", fallback="runs") \
        if parser.has_section("output") else "runs"

    _experiment_specific_checks(name, sysvals, bathvals, sweep, report)

    if report.errors or name is None:
        return None, report
    system = SystemParams(**sysvals)
    bath = BathParams(**bathvals)
    cfg = ExperimentConfig(experiment=name, system=system, bath=bath,
                           cutoff=cutoff, sweep=sweep, pulse=pulse,
                           gate=gate, outdir=outdir, source=path)
    _echo_derived(cfg, report)
    return cfg, report


def _experiment_specific_checks(name, sysvals, bathvals, sweep, report):
    if name == "fig9-cascaded":
        if bathvals.get("cascade_efficiency", 0.0) <= 0:
            report.errors.append(
                "bath.cascade_efficiency: fig9-cascaded needs a "
                "unidirectional channel (> 0)")
        if sysvals.get("f2", 0) == 0:
            report.errors.append(
                "system.f2: fig9-cascaded drives the target mode; f2 must "
                "be nonzero")
    if name == "fig10-output-mixing":
        if sysvals.get("f1", 0) != 0 or sysvals.get("f2", 0) != 0:
            report.errors.append(
                "system.f1/f2: fig10-output-mixing derives both drives "
                "from sweep.f0 and the input angles; set them to 0")
        if sweep.get("f0", 1.0) <= 0 or sweep.get("gamma0", 1.0) <= 0:
            report.errors.append(
                "sweep.f0/gamma0: amplitudes must be > 0")
    if name == "jc-fig11" and sysvals.get("j_hop", 0.0) == 0.0:
        report.errors.append(
            "system.j_hop: jc-fig11 reads j_hop as the cavity-emitter "
            "coupling g; it must be nonzero")
    if name in ("fig2-g2-vs-n1", "fig8-upb-vs-optimal"):
        if sysvals.get("f1", 0) == 0 and sysvals.get("f2", 0) == 0:
            report.errors.append(
                "system.f1: a reference drive is needed to scale the "
                "occupancy sweep")
        for key in ("n1_min", "inset_n1"):
            if key in sweep and sweep[key] <= 0:
                report.errors.append(f"sweep.{key}: must be > 0")
    if name == "fig5-g2tau-vs-U":
        if any(u <= 0 for u in sweep.get("u_values", (1.0,))):
            report.errors.append("sweep.u_values: all entries must be > 0")
        if sweep.get("target_n1", 1.0) <= 0:
            report.errors.append("sweep.target_n1: must be > 0")


def _echo_derived(cfg: ExperimentConfig, report: ValidationReport) -> None:
    if cfg.bath.cascade_efficiency > 0:
        chi = cfg.bath.chi(cfg.system)
        report.echo["chi"] = f"{chi:.12g}"
    if cfg.experiment == "fig10-output-mixing":
        f0 = cfg.sweep["f0"]
        th = cfg.sweep["theta_in"]
        ph = cfg.sweep["phi_in"]
        f1 = f0 * math.cos(0.5 * th)
        f2c = f0 * math.sin(0.5 * th) * complex(math.cos(ph), math.sin(ph))
        report.echo["f1_in"] = f"{f1:.12g}"
        report.echo["f2_in"] = f"{f2c.real:.12g}{f2c.imag:+.12g}j"
    if cfg.pulse is not None:
        report.echo["pulse_window_end"] = \
            f"{cfg.pulse.t0 + 6.0 * cfg.pulse.sigma_t:.12g}"


def load_config(path: str) -> ExperimentConfig:
    """Parse a config file, raising ValueError with all findings if bad."""
    cfg, report = validate_config(path)
    if cfg is None:
        raise ValueError("; ".join(report.errors) or f"{path}: invalid")
    return cfg


def resolve_outdir(cfg: ExperimentConfig, override: Optional[str]) -> str:
    out = override if override else cfg.outdir
    if not os.path.isabs(out):
        base = os.path.dirname(os.path.abspath(cfg.source)) \
            if cfg.source != "<memory>" else os.getcwd()
        out = os.path.join(base, out)
    return out
