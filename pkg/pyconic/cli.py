"""
Command-line experiment driver.

    pyconic run config.json [--out DIR] [--tolerance TOL] [--quiet]
    pyconic catalog --n 3 --jmax 3 [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 solver or fit failure,
3 failed invariant check.
"""

import argparse
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from pyconic.asymptotics import ExponentCatalog
from pyconic.cone_geometry import (
    RadialMetric,
    arclength_samples,
    cone_metric,
    flat_metric,
    glued_metric,
    horn_fit,
    horn_metric,
    neg_schwarzschild_metric,
    sampled_metric,
    schwarzschild_metric,
)
from pyconic.conformal import blow_up
from pyconic.cross_section import SpectralData, sphere_spectrum, validate_spectrum
from pyconic.exceptions import ConfigError, FitError, InvariantViolation, SolverError
from pyconic.mass import adm_mass, mass_shift_experiment
from pyconic.profiles.builtin import BumpProfile
from pyconic.profiles.symbolic import SymbolicProfile
from pyconic.solvers.base import SolverSettings
from pyconic.solvers.constructions import green_harmonic, solve_schrodinger
from pyconic.utils.io import dumps, format_float, read_csv_columns, write_csv, write_json
from pyconic.utils.symbolic import first_order_shift_coefficient

SCHEMA_VERSION = 1

EXPERIMENTS = ("mass", "green", "blowup", "mass_shift", "schrodinger", "horn_fit", "catalog")

METRIC_PARAMETERS: Dict[str, Dict[str, Any]] = {
    "flat": {},
    "cone": {},
    "horn": {"b": None},
    "schwarzschild": {"A": 1.0},
    "neg_schwarzschild": {"A": 1.0},
    "glued": {"cone_radius": 1.0, "af_radius": 2.0, "aperture": 0.5},
    "sampled": {"path": None, "af_start": 0.0},
    "expression": {"warp": "r", "factor": "1", "af_start": 0.0},
}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricConfig:
    kind: str = "flat"
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SpectrumConfig:
    source: str = "sphere"
    j_max: int = 8
    radius: float = 1.0
    eigenvalues: Tuple[Dict[str, Any], ...] = ()
    ricci_lower_bound: Optional[float] = None
    cross_section_scalar: Optional[float] = None


@dataclass(frozen=True)
class SolverConfig:
    r_in: float = 1e-4
    r_out: float = 1e4
    points_per_decade: int = 400
    richardson: bool = True
    tolerance: float = 1e-9
    degeneracy_threshold: float = 1e12
    fit_tolerance: float = 1e-3
    negative_part_threshold: Optional[float] = None

    def settings(self) -> SolverSettings:
        return SolverSettings(**asdict(self))


@dataclass(frozen=True)
class PotentialConfig:
    kind: str = "bump"
    amplitude: float = 1.0
    center: float = 1.5
    width: float = 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Fully resolved experiment configuration.

    Attributes:
        experiment: One of EXPERIMENTS
        n: Dimension
        metric: Metric kind and parameters
        spectrum: Cross-section spectrum
        solver: Radial solver settings
        ladder: Flux radii for masses
        deltas: Blow-up parameters
        potential: Schrodinger potential
        output: Output directory
        base_dir: Directory against which relative paths are resolved (not serialized)
    """

    experiment: str
    n: int = 3
    metric: MetricConfig = field(default_factory=MetricConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    ladder: Tuple[float, ...] = (1e1, 1e2, 1e3)
    deltas: Tuple[float, ...] = (0.1, 0.2, 0.4)
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    output: str = "pyconic_out"
    base_dir: str = "."

    def to_dict(self) -> Dict[str, Any]:
        """The resolved config in the JSON schema; parse_config(to_dict()) reproduces it."""
        metric = {"kind": self.metric.kind, **self.metric.params}
        spectrum = {
            k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.spectrum).items()
        }
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "n": self.n,
            "metric": metric,
            "spectrum": spectrum,
            "solver": asdict(self.solver),
            "mass": {"ladder": list(self.ladder)},
            "blowup": {"deltas": list(self.deltas)},
            "potential": asdict(self.potential),
            "output": self.output,
        }


def _section(data: Any, allowed: Dict[str, Any], path: str) -> Dict[str, Any]:
    """Merge a config section over defaults, rejecting unknown keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must be an object", key=path)
    for key in data:
        if key not in allowed:
            dotted = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown configuration key {dotted!r}", key=dotted)
    merged = dict(allowed)
    merged.update(data)
    return merged


def _number(value: Any, key: str, cast: Callable[[Any], Any] = float) -> Any:
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"{key} must be a number", key=key)
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number, got {value!r}", key=key) from exc


def parse_config(data: Dict[str, Any], base_dir: str = ".") -> ExperimentConfig:
    """
    Parse and validate a JSON experiment document.

    Args:
        data: Decoded JSON object
        base_dir: Directory of the config file, for relative paths

    Returns:
        ExperimentConfig: Resolved configuration

    Raises:
        ConfigError: On unknown keys, missing values or out-of-range parameters
    """
    top = _section(
        data,
        {
            "schema_version": None,
            "experiment": None,
            "n": 3,
            "metric": None,
            "spectrum": None,
            "solver": None,
            "mass": None,
            "blowup": None,
            "potential": None,
            "output": "pyconic_out",
        },
        "",
    )
    if top["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}, got {top['schema_version']!r}",
            key="schema_version",
        )
    experiment = top["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {list(EXPERIMENTS)}, got {experiment!r}", key="experiment"
        )
    n = _number(top["n"], "n", int)
    if n != top["n"] or n < 3:
        raise ConfigError(f"n must be an integer >= 3, got {top['n']!r}", key="n")

    raw_metric = top["metric"] or {"kind": "flat"}
    if not isinstance(raw_metric, dict):
        raise ConfigError("metric must be an object", key="metric")
    kind = raw_metric.get("kind", "flat")
    if kind not in METRIC_PARAMETERS:
        raise ConfigError(
            f"metric.kind must be one of {sorted(METRIC_PARAMETERS)}, got {kind!r}",
            key="metric.kind",
        )
    params = _section(
        {k: v for k, v in raw_metric.items() if k != "kind"}, METRIC_PARAMETERS[kind], "metric"
    )
    for key, value in params.items():
        if value is None:
            raise ConfigError(f"metric.{key} is required for kind {kind!r}", key=f"metric.{key}")
        if key not in ("path", "warp", "factor"):
            params[key] = _number(value, f"metric.{key}")

    spec = _section(top["spectrum"], asdict(SpectrumConfig()), "spectrum")
    if spec["source"] not in ("sphere", "table"):
        raise ConfigError("spectrum.source must be 'sphere' or 'table'", key="spectrum.source")
    spectrum = SpectrumConfig(
        source=spec["source"],
        j_max=_number(spec["j_max"], "spectrum.j_max", int),
        radius=_number(spec["radius"], "spectrum.radius"),
        eigenvalues=tuple(spec["eigenvalues"] or ()),
        ricci_lower_bound=(
            None
            if spec["ricci_lower_bound"] is None
            else _number(spec["ricci_lower_bound"], "spectrum.ricci_lower_bound")
        ),
        cross_section_scalar=(
            None
            if spec["cross_section_scalar"] is None
            else _number(spec["cross_section_scalar"], "spectrum.cross_section_scalar")
        ),
    )

    sol = _section(top["solver"], asdict(SolverConfig()), "solver")
    solver = SolverConfig(
        r_in=_number(sol["r_in"], "solver.r_in"),
        r_out=_number(sol["r_out"], "solver.r_out"),
        points_per_decade=_number(sol["points_per_decade"], "solver.points_per_decade", int),
        richardson=bool(sol["richardson"]),
        tolerance=_number(sol["tolerance"], "solver.tolerance"),
        degeneracy_threshold=_number(sol["degeneracy_threshold"], "solver.degeneracy_threshold"),
        fit_tolerance=_number(sol["fit_tolerance"], "solver.fit_tolerance"),
        negative_part_threshold=(
            None
            if sol["negative_part_threshold"] is None
            else _number(sol["negative_part_threshold"], "solver.negative_part_threshold")
        ),
    )
    solver.settings()

    mass = _section(top["mass"], {"ladder": [1e1, 1e2, 1e3]}, "mass")
    blow = _section(top["blowup"], {"deltas": [0.1, 0.2, 0.4]}, "blowup")
    pot = _section(top["potential"], asdict(PotentialConfig()), "potential")
    if pot["kind"] != "bump":
        raise ConfigError("potential.kind must be 'bump'", key="potential.kind")
    potential = PotentialConfig(
        kind="bump",
        amplitude=_number(pot["amplitude"], "potential.amplitude"),
        center=_number(pot["center"], "potential.center"),
        width=_number(pot["width"], "potential.width"),
    )
    if not isinstance(top["output"], str) or not top["output"]:
        raise ConfigError("output must be a directory name", key="output")

    return ExperimentConfig(
        experiment=experiment,
        n=n,
        metric=MetricConfig(kind, params),
        spectrum=spectrum,
        solver=solver,
        ladder=tuple(_number(r, "mass.ladder") for r in mass["ladder"]),
        deltas=tuple(_number(d, "blowup.deltas") for d in blow["deltas"]),
        potential=potential,
        output=top["output"],
        base_dir=base_dir,
    )


def load_config(path: str) -> ExperimentConfig:
    """Read a UTF-8 JSON config file and parse it."""
    file = Path(path)
    try:
        data = json.loads(file.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path!r} does not exist", key="config") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config file {path!r} is not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return parse_config(data, base_dir=str(file.parent))


# ---------------------------------------------------------------------------
# Building metrics and spectra
# ---------------------------------------------------------------------------


def build_spectrum(cfg: ExperimentConfig) -> SpectralData:
    """Spectral data from the spectrum section; invalid spectra raise ConfigError."""
    s = cfg.spectrum
    if s.source == "sphere":
        spectral = sphere_spectrum(cfg.n, s.j_max, radius=s.radius)
    else:
        if not s.eigenvalues:
            raise ConfigError("table spectrum needs eigenvalues", key="spectrum.eigenvalues")
        spectral = SpectralData.from_table(cfg.n, s.eigenvalues, s.ricci_lower_bound)
    violations = validate_spectrum(spectral)
    if violations:
        raise ConfigError("invalid spectrum: " + "; ".join(violations), key="spectrum")
    return spectral


def build_metric(cfg: ExperimentConfig) -> RadialMetric:
    """
    The metric named by the metric section, over the configured cross section.

    Args:
        cfg: Resolved configuration

    Returns:
        RadialMetric: Metric ready for the experiment
    """
    spectral = build_spectrum(cfg)
    scalar = spectral.scalar_curvature
    if scalar is None:
        scalar = cfg.spectrum.cross_section_scalar
    if scalar is None:
        raise ConfigError(
            "table spectra need spectrum.cross_section_scalar", key="spectrum.cross_section_scalar"
        )
    kind, p, n = cfg.metric.kind, cfg.metric.params, cfg.n
    if kind == "flat":
        metric = flat_metric(n)
    elif kind == "cone":
        metric = cone_metric(n, radius=cfg.spectrum.radius)
    elif kind == "horn":
        metric = horn_metric(n, p["b"])
    elif kind == "schwarzschild":
        metric = schwarzschild_metric(n, p["A"])
    elif kind == "neg_schwarzschild":
        metric = neg_schwarzschild_metric(n, p["A"])
    elif kind == "glued":
        metric = glued_metric(n, p["cone_radius"], p["af_radius"], p["aperture"])
    elif kind == "sampled":
        path = Path(cfg.base_dir) / str(p["path"])
        if not path.exists():
            raise ConfigError(f"sampled metric file {str(path)!r} does not exist", key="metric.path")
        try:
            columns = read_csv_columns(path)
        except (ValueError, StopIteration) as exc:
            raise ConfigError(f"cannot read sampled metric {str(path)!r}", key="metric.path") from exc
        if "r" not in columns or "f" not in columns:
            raise ConfigError("sampled metric CSV needs columns r and f", key="metric.path")
        metric = sampled_metric(
            n, columns["r"], columns["f"], columns.get("u"), af_start=p["af_start"]
        )
    else:
        metric = RadialMetric(
            n,
            spectral,
            SymbolicProfile(p["warp"]),
            factor=SymbolicProfile(p["factor"]),
            cross_section_scalar=float(scalar),
            af_start=p["af_start"],
            name="expression",
        )

    return replace(metric, spectral=spectral, cross_section_scalar=float(scalar))


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


@dataclass
class Outcome:
    """Results, tables and invariant checks of one experiment."""

    results: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]] = field(default_factory=dict)
    checks: List[Dict[str, Any]] = field(default_factory=list)
    mass_report: Optional[Dict[str, Any]] = None

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})


def _mass(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    out = Outcome()
    report = adm_mass(metric, cfg.ladder)
    out.mass_report = report.to_dict()
    out.results = {**report.to_dict(), "fitted_order": report.fitted_order, "monotone": report.monotone}
    out.tables["fluxes.csv"] = (("R", "flux"), list(zip(report.radii, report.fluxes)))
    bound = 1e-4 * abs(report.mass) + 1e-8
    out.check(
        "mass_error_bar",
        report.error_bar <= bound,
        f"error bar {format_float(report.error_bar)} <= {format_float(bound)}",
    )
    if cfg.metric.kind in ("schwarzschild", "neg_schwarzschild"):
        sign = 1.0 if cfg.metric.kind == "schwarzschild" else -1.0
        expected = sign * 4.0 * (cfg.n - 1) * cfg.metric.params["A"]
        rel = abs(report.mass - expected) / abs(expected)
        out.results["closed_form_mass"] = expected
        out.check("closed_form_mass", rel < 1e-3, f"relative error {format_float(rel)}")
    return out


def _green(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    out = Outcome()
    u, A = green_harmonic(metric, settings=cfg.solver.settings())
    out.results = {"A": A, "min_u": float(np.min(u.values))}
    out.tables["green.csv"] = (
        ("r", "u", "du", "d2u"),
        list(zip(u.r, u.values, u.d1, u.d2)),
    )
    out.check("green_above_one", np.min(u.values) > 1.0, f"min u = {format_float(np.min(u.values))}")
    out.check("green_A_positive", A > 0, f"A = {format_float(A)}")
    return out


def _blowup(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    out = Outcome()
    u, A = green_harmonic(metric, settings=cfg.solver.settings())
    out.results = {"A": A, "blowups": []}
    masses = []
    for delta in cfg.deltas:
        b = blow_up(metric, delta, u)
        report = adm_mass(b.af_metric, cfg.ladder)
        masses.append(report.to_dict())
        out.results["blowups"].append(
            {
                "delta": delta,
                "aperture": b.aperture,
                "decay_exponent": b.decay_exponent,
                "decay_residual": b.decay_residual,
                "alpha_prime": b.alpha_prime,
                "s0": b.cut.s0,
                "H_s0": b.cut.mean_curvature,
                "H_s0_times_s0": b.cut.scaled_curvature,
                "deviation_s0": b.cut.deviation,
                "mean_concave": b.cut.mean_concave,
                "mass": report.mass,
                "mass_error_bar": report.error_bar,
            }
        )
        out.tables[f"blowup_delta_{format_float(delta)}.csv"] = (
            ("s", "warp", "factor", "deviation", "mean_curvature"),
            b.rows(),
        )
        out.check(
            f"decay_delta_{format_float(delta)}",
            b.decays_to_cone,
            f"decay {format_float(b.decay_exponent)} >= alpha' {format_float(b.alpha_prime)}",
        )
        out.check(
            f"mean_concave_delta_{format_float(delta)}",
            b.cut.mean_concave,
            f"H(s0) = {format_float(b.cut.mean_curvature)} at s0 = {format_float(b.cut.s0)}",
        )
    out.mass_report = masses[-1] if masses else None
    return out


def _mass_shift(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    out = Outcome()
    u, A = green_harmonic(metric, settings=cfg.solver.settings())
    shift = mass_shift_experiment(metric, u, A, cfg.deltas, ladder=cfg.ladder, strict=False)
    out.results = shift.to_dict()
    out.tables["mass_shift.csv"] = (
        ("delta", "mass", "error_bar"),
        [(d, rep.mass, rep.error_bar) for d, rep in zip(shift.deltas, shift.reports)],
    )
    out.check(
        "mass_shift_linear",
        shift.is_linear,
        f"1 - R^2 = {format_float(shift.linear_deviation)}",
    )
    symbolic = first_order_shift_coefficient(cfg.n)
    out.check(
        "mass_shift_symbolic",
        abs(shift.coefficient - symbolic) <= 5e-3 * abs(symbolic),
        f"c = {format_float(shift.coefficient)} vs symbolic {format_float(symbolic)}",
    )
    return out


def _schrodinger(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    out = Outcome()
    p = cfg.potential
    result = solve_schrodinger(
        metric, BumpProfile(p.amplitude, p.center, p.width), settings=cfg.solver.settings()
    )
    out.results = {
        "A": result.A,
        "B": result.B,
        "potential_nonnegative": result.potential_nonnegative,
        "tip_limit_at_least_one": result.tip_limit_at_least_one,
        "negative_part_norm": result.negative_part_norm,
        "negative_part_threshold": result.negative_part_threshold,
        "condition_estimate": result.condition_estimate,
        "min_u": float(np.min(result.u.values)),
    }
    out.tables["schrodinger.csv"] = (("r", "u", "du"), list(zip(result.u.r, result.u.values, result.u.d1)))
    out.check("schrodinger_positive", np.min(result.u.values) > 0, "u > 0 on the grid")
    # maximum principle: B <= 1 when V >= 0, B >= 1 when V <= 0
    tol = cfg.solver.fit_tolerance
    if result.potential_nonnegative:
        out.check("tip_limit_sign", result.B <= 1.0 + tol, f"B = {result.B:.6g} <= 1 for V >= 0")
    else:
        out.check("tip_limit_sign", result.B >= 1.0 - tol, f"B = {result.B:.6g} >= 1 for V <= 0")
    return out


def _horn_fit(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    out = Outcome()
    fit = horn_fit(metric, threshold=cfg.solver.fit_tolerance)
    samples = arclength_samples(metric, 1e-4, 1e2)
    out.results = {
        "b": fit.exponent,
        "coefficient": fit.coefficient,
        "residual": fit.residual,
        "r2": fit.r2,
    }
    out.tables["arclength.csv"] = (("r", "s", "F"), list(zip(samples.r, samples.s, samples.F)))
    out.check("horn_exponent_positive", fit.exponent > 0, f"b = {format_float(fit.exponent)}")
    return out


def _catalog_outcome(spectral: SpectralData, window: int) -> Outcome:
    out = Outcome()
    catalog = ExponentCatalog.from_spectrum(spectral, window)
    rows = [(r.j, r.eigenvalue, r.multiplicity, r.nu_plus, r.nu_minus) for r in catalog.rows]
    out.tables["catalog.csv"] = (("j", "lambda", "multiplicity", "nu_plus", "nu_minus"), rows)
    window_rows = [(k, k, 2 - spectral.n - k) for k in range(catalog.window + 1)]
    out.tables["infinity_critical.csv"] = (("k", "nu_plus", "nu_minus"), window_rows)
    out.results = {
        "window": catalog.window,
        "infinity_critical": sorted(catalog.infinity_critical),
        "cone_critical": sorted(catalog.cone_critical),
    }
    return out


def _catalog(cfg: ExperimentConfig, metric: RadialMetric) -> Outcome:
    return _catalog_outcome(metric.spectral, min(cfg.spectrum.j_max, metric.spectral.j_max))


RUNNERS: Dict[str, Callable[[ExperimentConfig, RadialMetric], Outcome]] = {
    "mass": _mass,
    "green": _green,
    "blowup": _blowup,
    "mass_shift": _mass_shift,
    "schrodinger": _schrodinger,
    "horn_fit": _horn_fit,
    "catalog": _catalog,
}


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _summary(cfg: ExperimentConfig, outcome: Outcome, caught: List[str]) -> str:
    lines = [f"pyconic experiment: {cfg.experiment}", "", "configuration:"]
    lines += ["  " + line for line in dumps(cfg.to_dict()).splitlines()]
    lines += ["", "results:"]
    for key in sorted(outcome.results):
        value = outcome.results[key]
        text = format_float(value) if isinstance(value, float) else json.dumps(value, sort_keys=True, default=str)
        lines.append(f"  {key}: {text}")
    lines += ["", "checks:"]
    for c in outcome.checks:
        lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
    if caught:
        lines += ["", "warnings:"] + [f"  {w}" for w in caught]
    return "\n".join(lines) + "\n"


def write_outputs(
    cfg: ExperimentConfig, outcome: Outcome, out_dir: Path, caught: List[str]
) -> List[Path]:
    """Write report.json, mass_report.json, CSV tables and summary.txt."""
    written = []
    for name in sorted(outcome.tables):
        header, rows = outcome.tables[name]
        written.append(write_csv(out_dir / name, header, rows))
    report = {
        "config": cfg.to_dict(),
        "experiment": cfg.experiment,
        "results": outcome.results,
        "checks": outcome.checks,
        "passed": all(c["passed"] for c in outcome.checks),
        "tables": sorted(outcome.tables),
        "warnings": caught,
    }
    written.append(write_json(out_dir / "report.json", report))
    if outcome.mass_report is not None:
        written.append(write_json(out_dir / "mass_report.json", outcome.mass_report))
    summary = out_dir / "summary.txt"
    summary.write_text(_summary(cfg, outcome, caught), encoding="utf-8")
    written.append(summary)
    return written


def run_experiment(
    cfg: ExperimentConfig, out_dir: Optional[Path] = None, verbose: bool = False
) -> Outcome:
    """
    Run one configured experiment and write its artifacts.

    Args:
        cfg: Resolved configuration
        out_dir: Output directory, cfg.output if None
        verbose: Whether to print progress to standard error

    Returns:
        Outcome: Results and checks

    Raises:
        InvariantViolation: If any invariant check fails (after writing the outputs)
    """
    out_dir = Path(out_dir or cfg.output)
    metric = build_metric(cfg)
    if verbose:
        print(f"running {cfg.experiment} on {metric.name} (n={cfg.n})", file=sys.stderr)
    with warnings.catch_warnings(record=True) as records:
        warnings.simplefilter("always")
        outcome = RUNNERS[cfg.experiment](cfg, metric)
    caught = [str(w.message) for w in records]
    if verbose:
        for message in caught:
            print(f"warning: {message}", file=sys.stderr)
    write_outputs(cfg, outcome, out_dir, caught)
    failed = [c["name"] for c in outcome.checks if not c["passed"]]
    if failed:
        raise InvariantViolation(f"invariant checks failed: {', '.join(failed)}")
    return outcome


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--tolerance", type=float, help="solver residual tolerance")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = argparse.ArgumentParser(
        prog="pyconic", description="Positive-mass constructions on conical AF manifolds"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run an experiment config")
    run.add_argument("config", help="path to a JSON experiment config")
    cat = sub.add_parser("catalog", parents=[common], help="critical exponents of a sphere")
    cat.add_argument("--n", type=int, required=True, help="dimension")
    cat.add_argument("--jmax", type=int, required=True, help="largest mode index")
    return parser


def _run_command(args: argparse.Namespace) -> None:
    cfg = load_config(args.config)
    if args.tolerance is not None:
        cfg = replace(cfg, solver=replace(cfg.solver, tolerance=args.tolerance))
        cfg.solver.settings()
    out_dir = Path(args.out) if args.out else None
    run_experiment(cfg, out_dir, verbose=not args.quiet)
    if not args.quiet:
        print(f"wrote {cfg.experiment} report to {out_dir or cfg.output}", file=sys.stderr)


def _catalog_command(args: argparse.Namespace) -> None:
    spectral = sphere_spectrum(args.n, args.jmax)
    outcome = _catalog_outcome(spectral, args.jmax)
    # exponent table first, then the infinity-critical window
    for i, name in enumerate(("catalog.csv", "infinity_critical.csv")):
        header, rows = outcome.tables[name]
        if args.out:
            path = write_csv(Path(args.out) / name, header, rows)
            if not args.quiet:
                print(f"wrote {path}", file=sys.stderr)
            continue
        if i:
            sys.stdout.write("\n")
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(format_float(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line interface.

    Args:
        argv: Arguments without the program name, sys.argv[1:] if None

    Returns:
        int: Exit code
    """
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            _run_command(args)
        else:
            _catalog_command(args)
    except ConfigError as exc:
        where = f" [{exc.key}]" if exc.key else ""
        print(f"configuration error{where}: {exc}", file=sys.stderr)
        return 1
    except (SolverError, FitError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
