"""Batch front-end: ``pfhyper <command> --scenario FILE [--out DIR] [--format csv|json]``.

Commands: simulate, sweep, check-conditions, verify, tolerance.
Exit codes: 0 ok, 2 parse error, 3 validation error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, oracle
from .elements import PBS_REFLECT_H_MAP, apply_bs, apply_pbs
from .entanglement import concurrence, concurrence_bs_analytic, reduce
from .hilbert import BinGrid, same_path_weight
from .sagnac import (C_LIGHT, LENGTH_NAMES, SagnacConfig, concurrence_sagnac_analytic,
                     simulate as simulate_sagnac, tolerance_for_concurrence)
from .sources import SourceSpec, make_two_source_input
from .temporal import (VISIBILITY_THRESHOLD, condition_residuals, correlation_time,
                       envelope_overlap, s14_residual)

SCHEMA_VERSION = 1
EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERIC = 2, 3, 4
CONCURRENCE_THRESHOLD = 0.999
ORACLE_TOL = 1e-10

SWEEP_PARAMS = {
    "bs": ("phi_rp", "theta1", "theta2"),
    "pbs": ("phi_rp", "theta1", "theta2"),
    "sagnac": tuple(f"{n}_cm" for n in LENGTH_NAMES) + ("beat_length_mm",),
}
PARAM_UNITS = {"phi_rp": "rad", "theta1": "rad", "theta2": "rad", "beat_length_mm": "mm"}


class ScenarioError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _parse_error(msg):
    return ScenarioError(msg, EXIT_PARSE)


def _validation_error(msg):
    return ScenarioError(msg, EXIT_VALIDATION)


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class Scenario:
    scheme: str
    phi_rp: float = 0.0
    theta1: float = 0.0
    theta2: float = 0.0
    center_wavelength_nm: float = 1550.0
    bin_offsets_thz: tuple = (1.0,)
    bin_width_thz: float | None = None
    spectral_model: str = "delta"
    lengths_cm: dict = field(default_factory=dict)
    beat_length_mm: float | None = None
    sweep: Sweep | None = None
    tolerance_targets: tuple = ()
    outputs: tuple = ()

    def to_json(self) -> dict:
        d = asdict(self)
        d["bin_offsets_thz"] = list(self.bin_offsets_thz)
        d["tolerance_targets"] = list(self.tolerance_targets)
        d["outputs"] = list(self.outputs)
        d["lengths_cm"] = dict(sorted(self.lengths_cm.items()))
        return {"schema_version": SCHEMA_VERSION, **d}


def _number(doc, key, where, default=None, required=False):
    if key not in doc:
        if required:
            raise _parse_error(f"missing field '{where}{key}'")
        return default
    val = doc[key]
    if val is None and not required:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise _parse_error(f"field '{where}{key}' must be a number, got {val!r}")
    return float(val)


def parse_scenario(doc) -> Scenario:
    """Validate a scenario document (already JSON-decoded)."""
    if not isinstance(doc, dict):
        raise _parse_error("scenario must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise _parse_error(f"field 'schema_version' must be {SCHEMA_VERSION}")
    scheme = doc.get("scheme")
    if not isinstance(scheme, str):
        raise _parse_error("missing field 'scheme'")
    if scheme not in SWEEP_PARAMS:
        raise _validation_error(f"field 'scheme' must be one of {sorted(SWEEP_PARAMS)}")

    offsets = doc.get("bin_offsets_thz", [1.0])
    if not isinstance(offsets, list) or not offsets or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in offsets):
        raise _parse_error("field 'bin_offsets_thz' must be a non-empty list of numbers")
    lengths = doc.get("lengths_cm", {})
    if not isinstance(lengths, dict):
        raise _parse_error("field 'lengths_cm' must be an object")
    for k, v in lengths.items():
        if k not in LENGTH_NAMES:
            raise _validation_error(f"field 'lengths_cm.{k}' is not one of {list(LENGTH_NAMES)}")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise _parse_error(f"field 'lengths_cm.{k}' must be a number")
    sweep = None
    if doc.get("sweep") is not None:
        sw = doc["sweep"]
        if not isinstance(sw, dict) or not isinstance(sw.get("parameter"), str):
            raise _parse_error("field 'sweep.parameter' must be a string")
        steps = sw.get("steps")
        if isinstance(steps, bool) or not isinstance(steps, int):
            raise _parse_error("field 'sweep.steps' must be an integer")
        sweep = Sweep(sw["parameter"], _number(sw, "start", "sweep.", required=True),
                      _number(sw, "stop", "sweep.", required=True), steps)
    targets = doc.get("tolerance_targets", [])
    if not isinstance(targets, list):
        raise _parse_error("field 'tolerance_targets' must be a list")
    outputs = doc.get("outputs", [])
    if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
        raise _parse_error("field 'outputs' must be a list of strings")
    spectral = doc.get("spectral_model", "delta")
    if not isinstance(spectral, str):
        raise _parse_error("field 'spectral_model' must be a string")

    sc = Scenario(
        scheme=scheme,
        phi_rp=_number(doc, "phi_rp", "", 0.0),
        theta1=_number(doc, "theta1", "", 0.0),
        theta2=_number(doc, "theta2", "", 0.0),
        center_wavelength_nm=_number(doc, "center_wavelength_nm", "", 1550.0),
        bin_offsets_thz=tuple(float(x) for x in offsets),
        bin_width_thz=_number(doc, "bin_width_thz", ""),
        spectral_model=spectral,
        lengths_cm={k: float(v) for k, v in sorted(lengths.items())},
        beat_length_mm=_number(doc, "beat_length_mm", ""),
        sweep=sweep,
        tolerance_targets=tuple(_number({"t": t}, "t", "tolerance_targets[]") for t in targets),
        outputs=tuple(outputs),
    )
    _validate(sc)
    return sc


def _validate(sc: Scenario):
    if sc.center_wavelength_nm <= 0:
        raise _validation_error("field 'center_wavelength_nm' must be positive")
    if any(o <= 0 for o in sc.bin_offsets_thz):
        raise _validation_error("field 'bin_offsets_thz' entries must be positive")
    if len(set(sc.bin_offsets_thz)) != len(sc.bin_offsets_thz):
        raise _validation_error("field 'bin_offsets_thz' entries must be distinct")
    if sc.spectral_model not in ("delta", "flat_top"):
        raise _validation_error("field 'spectral_model' must be 'delta' or 'flat_top'")
    if sc.spectral_model == "flat_top" and not (sc.bin_width_thz and sc.bin_width_thz > 0):
        raise _validation_error("field 'bin_width_thz' must be positive for flat_top")
    if sc.bin_width_thz is not None and sc.bin_width_thz <= 0:
        raise _validation_error("field 'bin_width_thz' must be positive")
    if any(v < 0 for v in sc.lengths_cm.values()):
        raise _validation_error("field 'lengths_cm' entries must be non-negative")
    if sc.scheme == "sagnac":
        if sc.beat_length_mm is None or sc.beat_length_mm <= 0:
            raise _validation_error("field 'beat_length_mm' is required and positive for sagnac")
    elif sc.lengths_cm:
        raise _validation_error("field 'lengths_cm' only applies to the sagnac scheme")
    if sc.sweep is not None:
        if sc.sweep.parameter not in SWEEP_PARAMS[sc.scheme]:
            raise _validation_error(
                f"field 'sweep.parameter' must be one of {list(SWEEP_PARAMS[sc.scheme])}")
        if sc.sweep.steps < 2:
            raise _validation_error("field 'sweep.steps' must be at least 2")
    for t in sc.tolerance_targets:
        if not 0 < t < 1:
            raise _validation_error("field 'tolerance_targets' entries must lie in (0, 1)")


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _parse_error(f"cannot read scenario: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _parse_error(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_scenario(doc)


# -- model construction ------------------------------------------------------

def _with_param(sc: Scenario, name: str, value: float) -> Scenario:
    if name.endswith("_cm"):
        lengths = dict(sc.lengths_cm)
        lengths[name[:-3]] = value
        return _replace(sc, lengths_cm=lengths)
    return _replace(sc, **{name: value})


def _replace(sc: Scenario, **kw) -> Scenario:
    d = {f: getattr(sc, f) for f in sc.__dataclass_fields__}
    d.update(kw)
    return Scenario(**d)


def build_grid(sc: Scenario) -> BinGrid:
    omega_c = 2 * math.pi * C_LIGHT / (sc.center_wavelength_nm * 1e-9)
    width = None if sc.bin_width_thz is None else 2 * math.pi * sc.bin_width_thz * 1e12
    return BinGrid.from_offsets(2 * omega_c, [2 * math.pi * f * 1e12 for f in sc.bin_offsets_thz],
                                width)


def build_sagnac(sc: Scenario) -> SagnacConfig:
    lengths = {n: sc.lengths_cm.get(n, 0.0) / 100 for n in LENGTH_NAMES}
    return SagnacConfig(build_grid(sc), beat_length=sc.beat_length_mm * 1e-3,
                        wavelength=sc.center_wavelength_nm * 1e-9, **lengths)


def build_output_state(sc: Scenario):
    if sc.scheme == "sagnac":
        return simulate_sagnac(build_sagnac(sc))
    grid = build_grid(sc)
    state = make_two_source_input(SourceSpec(1, grid, sc.theta1, sc.phi_rp),
                                  SourceSpec(2, grid, sc.theta2, sc.phi_rp))
    if sc.scheme == "bs":
        return apply_bs(state)
    return apply_pbs(state, PBS_REFLECT_H_MAP)


def evaluate(sc: Scenario) -> dict:
    """One row of results for a fully specified scenario."""
    state = build_output_state(sc)
    rho_p, rep = reduce(state, keep="polarization")
    rho_f, _ = reduce(state, keep="frequency")
    row = {"p_keep [1]": rep.p_keep, "same_path_weight [1]": same_path_weight(state)}
    if len(sc.bin_offsets_thz) == 1:
        row["concurrence_pol [1]"] = concurrence(rho_p)
        row["concurrence_freq [1]"] = concurrence(rho_f)
    else:
        row["purity_pol [1]"] = float(np.real(np.trace(rho_p.matrix @ rho_p.matrix)))
    if sc.scheme == "sagnac":
        cfg = build_sagnac(sc)
        row["delta_L [cm]"] = cfg.delta_L * 100
        row["concurrence_analytic [1]"] = concurrence_sagnac_analytic(cfg)
        row["s14_residual [fs]"] = s14_residual(cfg) * 1e15
    else:
        row["concurrence_analytic [1]"] = concurrence_bs_analytic(sc.phi_rp)
    if not all(math.isfinite(v) for v in row.values()):
        raise ScenarioError("non-finite result", EXIT_NUMERIC)
    return row


# -- output ------------------------------------------------------------------

def format_number(x: float) -> str:
    return f"{x:.11e}"


def write_table(rows: list[dict], out: Path, stem: str, fmt: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{stem}.json"
        path.write_text(json.dumps({"rows": rows}, indent=2, sort_keys=False) + "\n")
        return path
    path = out / f"{stem}.csv"
    header = list(rows[0])
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(format_number(r[h]) for h in header))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_metadata(sc: Scenario, out: Path, stem: str, command: str, source: str):
    meta = {
        "command": command,
        "package_version": __version__,
        "scenario_file": source,
        "scenario": sc.to_json(),
        "units": "lengths cm, wavelengths nm, frequencies THz (ordinary), phases rad",
        "wavepacket_normalization": "unit L2 norm on the time grid",
    }
    path = out / f"{stem}.meta.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


# -- commands ----------------------------------------------------------------

def cmd_simulate(sc, args):
    row = evaluate(sc)
    return [row], "simulate"


def cmd_sweep(sc, args):
    if sc.sweep is None:
        raise _validation_error("field 'sweep' is required for the sweep command")
    rows = []
    pname = sc.sweep.parameter
    unit = "cm" if pname.endswith("_cm") else PARAM_UNITS.get(pname, "1")
    label = pname[:-3] if pname.endswith("_cm") else pname.removesuffix("_mm")
    for i, value in enumerate(sc.sweep.values()):
        point = _with_param(sc, pname, float(value))
        _validate(point)
        row = {"index [1]": float(i), f"{label} [{unit}]": float(value)}
        row.update(evaluate(point))
        rows.append(row)
    return rows, "sweep"


def cmd_tolerance(sc, args):
    if sc.scheme != "sagnac":
        raise _validation_error("tolerance needs the sagnac scheme")
    cfg = build_sagnac(sc)
    targets = sc.tolerance_targets or (0.999, 0.99)
    rows = [{"concurrence_target [1]": t,
             "delta_L_max [cm]": tolerance_for_concurrence(cfg, t) * 100} for t in targets]
    return rows, "tolerance"


def conditions_report(sc: Scenario) -> dict:
    if sc.scheme != "sagnac":
        raise _validation_error("check-conditions needs the sagnac scheme")
    cfg = build_sagnac(sc)
    res = condition_residuals(cfg)
    width = 2 * math.pi * (sc.bin_width_thz or 0.1) * 1e12
    s14 = s14_residual(cfg)
    tc = correlation_time(width)
    vis = envelope_overlap(s14, 0.0, width)
    c = concurrence_sagnac_analytic(cfg)
    state = simulate_sagnac(cfg)
    c_num = concurrence(reduce(state, keep="polarization")[0]) if cfg.grid.n_bins == 1 else None
    return {
        "delta_L [cm]": cfg.delta_L * 100,
        "r1 [s]": res.r1, "r2 [s]": res.r2, "r3 [s]": res.r3,
        "s14_residual [s]": s14,
        "walkoff [fs]": abs(s14) * 1e15,
        "correlation_time [ps]": tc * 1e12,
        "walkoff_ratio [1]": abs(s14) / tc,
        "frequency_visibility [1]": vis,
        "concurrence_analytic [1]": c,
        "concurrence_numeric [1]": c_num,
        "walkoff_status": "PASS" if vis >= VISIBILITY_THRESHOLD else "FAIL",
        "concurrence_status": "PASS" if c >= CONCURRENCE_THRESHOLD else "FAIL",
    }


def cmd_check(sc, args):
    rep = conditions_report(sc)
    for k, v in rep.items():
        print(f"{k:28s} {v if isinstance(v, str) or v is None else format_number(v)}")
    row = {k: v for k, v in rep.items() if isinstance(v, float)}
    return [row], "conditions"


def cmd_verify(sc, args):
    state = build_output_state(sc)
    if sc.scheme == "sagnac":
        mons = oracle.sagnac_monomials(build_sagnac(sc))
    else:
        mapping = PBS_REFLECT_H_MAP if sc.scheme == "pbs" else None
        grid = build_grid(sc)
        mons = oracle.bs_monomials(grid.pairs, sc.phi_rp, sc.theta1, sc.theta2, mapping)
    err = oracle.compare_with_state(mons, state)
    print(f"max amplitude discrepancy vs oracle: {format_number(err)}")
    if not err < ORACLE_TOL:
        raise ScenarioError(f"oracle discrepancy {err:.3e} exceeds {ORACLE_TOL:.0e}", EXIT_NUMERIC)
    return [{"max_discrepancy [1]": err}], "verify"


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "check-conditions": cmd_check,
    "verify": cmd_verify,
    "tolerance": cmd_tolerance,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfhyper", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.scenario)
        rows, stem = COMMANDS[args.command](sc, args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out is not None:
        out = Path(args.out)
        path = write_table(rows, out, stem, args.format)
        write_metadata(sc, out, stem, args.command, str(args.scenario))
        print(f"wrote {path}")
    elif args.command not in ("check-conditions", "verify"):
        for r in rows:
            print(", ".join(f"{k}={format_number(v)}" for k, v in r.items()))
    return 0


def bundled_scenario(name: str) -> Path:
    return Path(__file__).with_name("scenarios") / name


if __name__ == "__main__":
    sys.exit(main())
