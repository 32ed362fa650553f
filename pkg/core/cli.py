"""
cli.py
======
Command-line front end: evaluate functions, run verification suites and
write machine-readable reports.

    python main.py eval --fn theta3 --z 0 --tau 1.2i
    python main.py verify --what picard --nu 1 --mu 1 --N 3 --grid 5
    python main.py chudnovsky --grid 5 --format csv

Exit status: 0 when every row passes, 1 on any failed row, 2 on usage errors.
"""

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core import elliptic, hypergeom, painleve, theta
from core.config import ToolkitConfig, TruncationPolicy
from core.elliptic import PeriodConvention
from core.errors import ToolkitError, UsageError
from core.jets import Jet, constant_jet, identity_jet
from core.painleve import Cusp, Family, P6Params, SolutionSpec
from core.report import ResidualReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "pvi-report/1"

REQUIRED_FLAGS = {"eval": "fn", "verify": "what", "asymptotics": "cusp"}
# Flags that never change a report
RUN_ONLY_FLAGS = ("workers", "verbose", "out")
FUNCTIONS = ("theta1", "theta2", "theta3", "theta4", "theta1prime", "wp", "x", "2f1", "u")
CHECKS = ("picard", "hitchin", "x-schwarz", "wp-identity", "theta-identities", "substitution", "wp-form")

# Per-check tolerance when --tol is absent
DEFAULT_TOLS = {
    "picard": 1e-7, "hitchin": 1e-7, "x-schwarz": 1e-8, "wp-identity": 1e-9,
    "theta-identities": 1e-11, "substitution": 1e-9, "wp-form": 1e-7, "chudnovsky": 1e-6,
    "fit-curve": 1e-7,
}

CUSP_SAMPLES = {
    Cusp.ZERO: [1j / 2, 1j / 2.5, 1j / 3],
    Cusp.ONE: [1 + 1j / 2, 1 + 1j / 3, 1 + 1j / 4],
    Cusp.INFINITY: [4j, 5j, 6j],
}
# Second-order error decay at 0 and infinity: |x - leading| / |e|^2 stays bounded
CUSP_RATIO_BOUND = 300.0

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^[+-]?{_NUM}$")
_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)i$")
_FULL = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)i$")


def parse_complex(text: str) -> complex:
    """'a+bi', 'a-bi', 'a' or 'bi' (decimal floats, no parentheses)"""
    s = text.strip()
    if _REAL.match(s):
        return complex(float(s), 0.0)
    m = _IMAG.match(s) or _FULL.match(s)
    if not m:
        raise UsageError(f"not a complex literal: {text!r}")
    im = m.group("im")
    im_value = float(im + "1") if im in ("", "+", "-") else float(im)
    re_value = float(m.group("re")) if "re" in m.groupdict() and m.group("re") else 0.0
    return complex(re_value, im_value)


def format_float(v: float) -> str:
    """17 significant digits, always readable back as a float"""
    s = format(float(v) + 0.0, ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def format_complex(c: complex) -> str:
    c = complex(c)
    re_part, im_part = c.real + 0.0, c.imag + 0.0
    sign = "-" if math.copysign(1.0, im_part) < 0 else "+"
    return f"{format_float(re_part)}{sign}{format_float(abs(im_part))}i"


class _Parser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message)


@dataclass
class CommandSpec:
    subcommand: str
    flags: Dict[str, Any] = field(default_factory=dict)

    def echo(self) -> Dict[str, Any]:
        """Flags as given, in sorted key order, complex values as literals"""
        out = {"subcommand": self.subcommand}
        for key in sorted(k for k in self.flags if k not in RUN_ONLY_FLAGS):
            out[key] = _jsonable(self.flags[key])
        return out


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except UsageError as e:
        raise argparse.ArgumentTypeError(str(e))


def _params_arg(text: str) -> Tuple[complex, ...]:
    return tuple(_complex_arg(part) for part in text.split(","))


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--tau", action="append", type=_complex_arg)
    common.add_argument("--grid", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--trunc-tol", type=float)
    common.add_argument("--max-terms", type=int)
    common.add_argument("--convention", choices=("auto", "unit", "double"), default="auto")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--workers", type=int)

    solution = _Parser(add_help=False)
    solution.add_argument("--nu", type=int)
    solution.add_argument("--mu", type=int)
    solution.add_argument("--N", type=int)
    solution.add_argument("--A", type=_complex_arg)
    solution.add_argument("--B", type=_complex_arg)

    parser = _Parser(prog="pvi", description="Painleve VI / theta / Weierstrass verification toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common])
    p.add_argument("--fn", choices=FUNCTIONS)
    p.add_argument("--z", type=_complex_arg, default=0j)
    p.add_argument("--order", type=int, choices=(0, 1, 2, 3), default=0)
    p.add_argument("--params", type=_params_arg)

    for name in ("picard", "hitchin"):
        p = sub.add_parser(name, parents=[common, solution])
        p.add_argument("--params", type=_params_arg)

    p = sub.add_parser("verify", parents=[common, solution])
    p.add_argument("--what", choices=CHECKS)
    p.add_argument("--params", type=_params_arg)
    p.add_argument("--z", type=_complex_arg, default=0.3 + 0.2j)

    p = sub.add_parser("asymptotics", parents=[common])
    p.add_argument("--cusp", choices=[c.value for c in Cusp])

    sub.add_parser("chudnovsky", parents=[common])

    p = sub.add_parser("fit-curve", parents=[common, solution])
    p.add_argument("--family", choices=[f.value for f in Family], default="picard")
    p.add_argument("--max-deg", type=int, default=6)
    p.add_argument("--rank-tol", type=float, default=1e-10)

    sub.add_parser("suite", parents=[common])
    return parser


def parse_command(argv: Sequence[str], config: Optional[ToolkitConfig] = None) -> CommandSpec:
    """Validated CommandSpec, or UsageError naming the offending flag"""
    config = config or ToolkitConfig()
    ns = vars(_build_parser().parse_args(list(argv)))
    subcommand = ns.pop("subcommand")
    flags = {k: v for k, v in ns.items() if v is not None}

    min_im = config.min_im_tau
    for tau in flags.get("tau", []):
        if not tau.imag >= min_im:
            raise UsageError(f"--tau {format_complex(tau)}: Im(tau) below min_im_tau = {min_im}")
    required = REQUIRED_FLAGS.get(subcommand)
    if required and required not in flags:
        raise UsageError(f"{subcommand} needs --{required}")
    grid = flags.get("grid")
    if grid is not None and not 1 <= grid <= len(config.tau_grid):
        raise UsageError(f"--grid must be in 1..{len(config.tau_grid)}, got {grid}")
    if flags.get("workers") is not None and flags["workers"] < 1:
        raise UsageError("--workers must be >= 1")
    if flags.get("max_terms") is not None and flags["max_terms"] < 4:
        raise UsageError("--max-terms must be >= 4")
    if flags.get("trunc_tol") is not None and not flags["trunc_tol"] > 0:
        raise UsageError("--trunc-tol must be positive")
    params = flags.get("params")
    if params is not None:
        wanted = 3 if flags.get("fn") == "2f1" else 4
        if len(params) != wanted:
            raise UsageError(f"--params needs {wanted} comma-separated values")
    if "N" in flags and flags["N"] < 1:
        raise UsageError("--N must be >= 1")
    return CommandSpec(subcommand, flags)


# Report document

@dataclass
class ReportDocument:
    command: Dict[str, Any]
    results: List[Dict[str, Any]]
    convention: Dict[str, Optional[str]]
    schema_version: str = SCHEMA_VERSION

    @property
    def summary(self) -> Dict[str, Any]:
        passed = sum(1 for row in self.results if row["pass"])
        residuals = [row["residual_abs"] for row in self.results
                     if isinstance(row.get("residual_abs"), float)]
        return {
            "pass_count": passed,
            "fail_count": len(self.results) - passed,
            "max_residual": max(residuals) if residuals else None,
        }

    @property
    def exit_status(self) -> int:
        return 0 if self.results and all(row["pass"] for row in self.results) else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "results": self.results,
            "convention": self.convention,
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return _dump(self.to_dict(), 0) + "\n"

    def to_csv(self) -> str:
        columns: List[str] = []
        for row in self.results:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(columns)
        for row in self.results:
            writer.writerow([_csv_cell(row.get(key)) for key in columns])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        data = json.loads(text)
        validate_report(data)
        return cls(data["command"], data["results"], data["convention"], data["schema_version"])


def _jsonable(v):
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _dump(obj, indent: int) -> str:
    """JSON text with 17-significant-digit floats and insertion-ordered keys"""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, complex):
        return json.dumps(format_complex(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dump(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v) if math.isfinite(v) else ""
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, (list, tuple, dict)):
        return _dump(v, 0).replace("\n", "").replace("  ", "")
    return str(v)


_ROW_TYPES = {"tau": str, "pass": bool}


def validate_report(doc: Dict[str, Any]):
    """Field presence and types of a report document; raises ValueError"""
    for key, kind in (("schema_version", str), ("command", dict), ("results", list),
                      ("convention", dict), ("summary", dict)):
        if not isinstance(doc.get(key), kind):
            raise ValueError(f"report field {key!r} missing or not {kind.__name__}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unknown schema_version {doc['schema_version']!r}")
    if not isinstance(doc["command"].get("subcommand"), str):
        raise ValueError("command echo lacks the subcommand")
    for i, row in enumerate(doc["results"]):
        for key, kind in _ROW_TYPES.items():
            if not isinstance(row.get(key), kind):
                raise ValueError(f"row {i}: {key!r} missing or not {kind.__name__}")
        if row.get("error") is not None and not isinstance(row["error"], str):
            raise ValueError(f"row {i}: error must be a code string")
        parse_complex(row["tau"])
    summary = doc["summary"]
    passed = sum(1 for row in doc["results"] if row["pass"])
    if summary.get("pass_count") != passed or summary.get("fail_count") != len(doc["results"]) - passed:
        raise ValueError("summary counts disagree with results")
    if summary.get("max_residual") is not None and not isinstance(summary["max_residual"], (int, float)):
        raise ValueError("max_residual must be a number or null")


# Rows

def report_row(report: ResidualReport) -> Dict[str, Any]:
    return {
        "tau": format_complex(report.tau),
        "context": report.context,
        "convention": report.convention,
        "residual_abs": report.residual_abs if math.isfinite(report.residual_abs) else None,
        "tol": report.tol,
        "pass": report.passed,
        "error": report.error,
    }


def _guarded(tau: complex, tol: float, context: str, convention: str,
             fn: Callable[[complex], Dict[str, Any]]) -> Dict[str, Any]:
    """fn(tau) as a row; a ToolkitError becomes a failing row carrying its code"""
    try:
        return fn(tau)
    except ToolkitError as e:
        logger.warning(f"⚠ {context} at tau={format_complex(tau)}: {e.code} {e}")
        return report_row(ResidualReport.failure(tau, tol, context, convention, e))


def _run_grid(taus: Sequence[complex], row_fn: Callable[[complex], Dict[str, Any]],
              workers: int) -> List[Dict[str, Any]]:
    """Rows in grid order regardless of worker count"""
    if workers <= 1 or len(taus) <= 1:
        return [row_fn(t) for t in taus]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row_fn, taus))


class Executor:
    """Runs one CommandSpec against a configuration"""

    def __init__(self, cmd: CommandSpec, config: Optional[ToolkitConfig] = None):
        self.cmd = cmd
        self.flags = cmd.flags
        self.config = config or ToolkitConfig()
        self.pol = TruncationPolicy(
            term_tol=self.flags.get("trunc_tol", self.config.term_tol),
            max_terms=self.flags.get("max_terms", self.config.max_terms),
            min_im_tau=self.config.min_im_tau,
            hyper_max_terms=self.config.hyper_max_terms,
        )
        self.workers = self.flags.get("workers", self.config.workers)
        self.convention: Dict[str, Optional[str]] = {"theta": "q=exp(i pi tau)", "period": None,
                                                      "chudnovsky": None}

    # inputs

    def taus(self, default_grid: Optional[List[str]] = None, default_count: int = 5) -> List[complex]:
        if "tau" in self.flags:
            return list(self.flags["tau"])
        grid = default_grid or self.config.tau_grid
        count = min(self.flags.get("grid", default_count), len(grid))
        return [parse_complex(t) for t in grid[:count]]

    def calibration_points(self, grid: List[str]) -> List[complex]:
        return [parse_complex(t) for t in grid[:self.config.calibration_points]]

    def tol(self, check: str) -> float:
        return self.flags.get("tol", DEFAULT_TOLS.get(check, self.config.default_tol))

    def solution_spec(self, family: Family) -> SolutionSpec:
        f = self.flags
        if all(k in f for k in ("nu", "mu", "N")):
            return SolutionSpec.rational(family, f["nu"], f["mu"], f["N"])
        if "A" in f and "B" in f:
            return SolutionSpec(family, f["A"], f["B"])
        if family is Family.HITCHIN:
            return SolutionSpec(family, 1 / 3, 1 / 3)
        raise UsageError("give --nu --mu --N or --A --B")

    def p6_params(self, family: Family) -> P6Params:
        if "params" in self.flags:
            return P6Params(*self.flags["params"])
        return painleve.family_params(family)

    def period_variant(self) -> painleve.PeriodVariant:
        choice = self.flags.get("convention", "auto")
        if choice == "auto":
            points = self.calibration_points(self.config.tau_grid)
            variant = painleve.calibrate_period_convention(self.pol, points)
        elif choice == "unit":
            variant = painleve.PeriodVariant(PeriodConvention.UNIT, 1.0)
        else:
            variant = painleve.PeriodVariant(PeriodConvention.DOUBLE, 2.0)
        self.convention["period"] = variant.name
        return variant

    # subcommands

    def run(self) -> ReportDocument:
        handler = getattr(self, "run_" + self.cmd.subcommand.replace("-", "_"))
        try:
            results = handler()
        except UsageError:
            raise
        except ToolkitError as e:
            # calibration and other whole-command failures: one failing row
            logger.warning(f"⚠ {self.cmd.subcommand} failed: {e.code} {e}")
            tau = self.taus()[0]
            results = [report_row(ResidualReport.failure(tau, 0.0, self.cmd.subcommand, "n/a", e))]
        return ReportDocument(self.cmd.echo(), results, dict(self.convention))

    def run_eval(self) -> List[Dict[str, Any]]:
        fn, z, order = self.flags["fn"], self.flags.get("z", 0j), self.flags.get("order", 0)

        def row(tau):
            def compute(t):
                jet = self.evaluate(fn, z, t, order)
                return {"tau": format_complex(t), "fn": fn, "z": format_complex(z), "order": order,
                        "value": [format_complex(v) for v in jet.d[:order + 1]],
                        "pass": True, "error": None}
            return _guarded(tau, 0.0, f"eval-{fn}", "", compute)

        return _run_grid(self.taus(default_count=1), row, self.workers)

    def evaluate(self, fn: str, z: complex, tau: complex, order: int) -> Jet:
        """Jet in the evaluation variable: tau for tau-functions, z for z-functions"""
        pol = self.pol
        tau_var = identity_jet(tau) if order else constant_jet(tau, 0)
        z_var = identity_jet(z) if order else constant_jet(z, 0)
        tau_const = constant_jet(tau, z_var.order)
        if fn.startswith("theta") and fn != "theta1prime":
            return theta.theta_eval(int(fn[-1]), z_var, tau_const, pol)
        if fn == "theta1prime":
            return theta.theta1_prime(z_var, tau_const, pol)
        if fn == "wp":
            variant = self.period_variant()
            return elliptic.wp_eval(z_var, tau_const, variant.conv, pol)[0]
        if fn == "x":
            return theta.modular_x(tau_var, pol)
        if fn == "2f1":
            a, b, c = self.flags.get("params", (0.5, 0.25, 1.25))
            return hypergeom.gauss_2f1(hypergeom.HypergeomParams(a, b, c), z_var, pol)
        points = self.calibration_points(self.config.chud_grid)
        self.convention["chudnovsky"] = hypergeom.calibrate_chudnovsky(pol, points).name
        return hypergeom.chud_u(tau_var, pol)

    def _solution_rows(self, family: Family) -> List[Dict[str, Any]]:
        spec = self.solution_spec(family)
        params = self.p6_params(family)
        tol = self.tol(family.value)

        def compute(tau):
            tau_jet = identity_jet(tau)
            x = theta.modular_x(tau_jet, self.pol)
            y = painleve.solution_y(spec, tau_jet, self.pol)
            report = painleve.p6_residual_parametric(x, y, params, tol, tau, "n/a")
            row = {"tau": format_complex(tau), "x": format_complex(x.d[0]), "y": format_complex(y.d[0])}
            row.update({k: v for k, v in report_row(report).items() if k != "tau"})
            row["context"] = f"p6-{family.value}"
            return row

        return _run_grid(self.taus(), lambda t: _guarded(t, tol, f"p6-{family.value}", "n/a", compute),
                         self.workers)

    def run_picard(self):
        return self._solution_rows(Family.PICARD)

    def run_hitchin(self):
        return self._solution_rows(Family.HITCHIN)

    def run_verify(self) -> List[Dict[str, Any]]:
        what = self.flags["what"]
        tol = self.tol(what)
        pol = self.pol
        z = self.flags.get("z", 0.3 + 0.2j)

        if what in ("picard", "hitchin"):
            family = Family(what)
            spec = self.solution_spec(family)
            params = self.p6_params(family)
            check = lambda t: painleve.solution_residual(spec, t, params, pol, tol)  # noqa: E731
            label = "n/a"
        elif what == "x-schwarz":
            check = lambda t: painleve.x_schwarz_residual(t, pol, tol)  # noqa: E731
            label = "n/a"
        elif what == "theta-identities":
            check = lambda t: theta.theta_identity_residual(t, pol, tol=tol)  # noqa: E731
            label = self.convention["theta"]
        elif what == "wp-identity":
            conv = PeriodConvention.UNIT if self.flags.get("convention") == "unit" else PeriodConvention.DOUBLE
            check = lambda t: elliptic.wp_identity_residual(z, t, conv, pol, tol)  # noqa: E731
            label = conv.value
        elif what == "substitution":
            variant = self.period_variant()
            spec = self.solution_spec(Family.PICARD)

            def check(t):
                gap = painleve.cross_identity_gap(variant, spec, t, pol)
                return ResidualReport.build(t, gap, tol, "substitution", variant.name)
            label = variant.name
        else:
            variant = self.period_variant()
            spec = self.solution_spec(Family.PICARD)
            params = self.p6_params(Family.PICARD)
            check = lambda t: painleve.wp_form_residual(  # noqa: E731
                spec, t, params, variant.conv, pol, tol, variant.z_scale)
            label = variant.name

        grid = self.config.theta_grid if what == "theta-identities" else None
        return _run_grid(self.taus(grid), lambda t: _guarded(t, tol, what, label,
                                                             lambda s: report_row(check(s))), self.workers)

    def run_asymptotics(self) -> List[Dict[str, Any]]:
        cusp = Cusp(self.flags["cusp"])
        samples = list(self.flags.get("tau", CUSP_SAMPLES[cusp]))
        try:
            checked = painleve.cusp_asymptotics_check(cusp, samples, self.pol)
        except ToolkitError as e:
            return [report_row(ResidualReport.failure(t, CUSP_RATIO_BOUND, f"cusp-{cusp.value}", "n/a", e))
                    for t in samples]
        rows = []
        previous = None
        for sample in checked:
            # error shrinks toward 0 and infinity; log|x| grows toward 1
            if cusp is Cusp.ONE:
                ok = 0.5 <= sample.ratio <= 2.0
                trend = previous is None or sample.leading_error >= previous
            else:
                ok = sample.ratio <= CUSP_RATIO_BOUND
                trend = previous is None or sample.leading_error <= previous
            ok = ok and trend
            previous = sample.leading_error
            rows.append({"tau": format_complex(sample.tau), "context": f"cusp-{cusp.value}",
                         "leading_error": sample.leading_error, "ratio": sample.ratio,
                         "pass": ok, "error": None})
        return rows

    def run_chudnovsky(self) -> List[Dict[str, Any]]:
        tol = self.tol("chudnovsky")
        try:
            variant = hypergeom.calibrate_chudnovsky(
                self.pol, self.calibration_points(self.config.chud_grid))
        except ToolkitError as e:
            return [report_row(ResidualReport.failure(t, tol, "chudnovsky", "uncalibrated", e))
                    for t in self.taus(self.config.chud_grid)]
        self.convention["chudnovsky"] = variant.name

        def compute(tau):
            return report_row(hypergeom.chud_residual(tau, self.pol, variant, tol))

        return _run_grid(self.taus(self.config.chud_grid),
                         lambda t: _guarded(t, tol, "chudnovsky", variant.name, compute), self.workers)

    def run_fit_curve(self) -> List[Dict[str, Any]]:
        family = Family(self.flags.get("family", "picard"))
        spec = self.solution_spec(family)
        tol = self.tol("fit-curve")
        taus = self.flags.get("tau", painleve.FIT_TAU_SAMPLES)
        try:
            points = painleve.picard_samples(spec, taus, self.pol)
            fit = painleve.sweep_algebraic_relation(points, self.flags.get("max_deg", 6),
                                                    self.flags.get("rank_tol", 1e-10))
        except ToolkitError as e:
            return [report_row(ResidualReport.failure(taus[0], tol, "fit-curve", "n/a", e))]
        return [{
            "tau": format_complex(taus[0]),
            "context": f"fit-{family.value}",
            "deg_x": fit.deg_x,
            "deg_y": fit.deg_y,
            "coeffs": [[format_complex(c) for c in row] for row in fit.coeffs],
            "residual_abs": float(fit.heldout_residual),
            "tol": tol,
            "pass": fit.heldout_residual <= tol,
            "error": None,
        }]

    def run_suite(self) -> List[Dict[str, Any]]:
        """Every acceptance check, in a fixed order"""
        rows: List[Dict[str, Any]] = []
        base = {k: v for k, v in self.flags.items() if k in ("trunc_tol", "max_terms", "workers", "grid", "tau")}
        plan = [
            ("verify", {"what": "theta-identities"}),
            ("verify", {"what": "wp-identity"}),
            ("verify", {"what": "x-schwarz"}),
            ("verify", {"what": "substitution", "nu": 1, "mu": 1, "N": 3}),
            ("verify", {"what": "picard", "nu": 1, "mu": 1, "N": 3}),
            ("verify", {"what": "picard", "nu": 1, "mu": 2, "N": 5}),
            ("verify", {"what": "hitchin", "A": 1 / 3, "B": 1 / 3}),
            ("chudnovsky", {}),
            ("asymptotics", {"cusp": "zero"}),
            ("asymptotics", {"cusp": "one"}),
            ("asymptotics", {"cusp": "infinity"}),
            ("fit-curve", {"family": "picard", "nu": 1, "mu": 1, "N": 2, "max_deg": 6}),
        ]
        for subcommand, extra in plan:
            flags = dict(base, **extra)
            if subcommand in ("asymptotics", "fit-curve"):
                flags.pop("tau", None)
            child = Executor(CommandSpec(subcommand, flags), self.config)
            child.pol = self.pol
            rows.extend(child.run().results)
            for key, value in child.convention.items():
                if value is not None:
                    self.convention[key] = value
        return rows


def execute(cmd: CommandSpec, config: Optional[ToolkitConfig] = None) -> Tuple[ReportDocument, int]:
    """Run a command; the status is 0 iff every row passes"""
    doc = Executor(cmd, config).run()
    return doc, doc.exit_status


def render(doc: ReportDocument, fmt: str) -> str:
    return doc.to_csv() if fmt == "csv" else doc.to_json()


def main(argv: Optional[Sequence[str]] = None) -> Tuple[int, Optional[ReportDocument]]:
    """Parse, execute and write the report; returns (exit status, report)"""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cmd = parse_command(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return e.exit_status, None

    logging.basicConfig(level=logging.INFO if cmd.flags.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        doc, status = execute(cmd)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return e.exit_status, None

    text = render(doc, cmd.flags.get("format", "json"))
    out = cmd.flags.get("out")
    if out:
        with open(out, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return status, doc
