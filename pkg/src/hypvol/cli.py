"""Command-line front end: evaluate library functions, run the verification
sweeps and print tables for plotting."""

import argparse
import ast
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional

from . import __version__, bounds, caps, hyptrig, verify
from ._backend import BACKEND
from .errors import ConsistencyError, ConvergenceError, DomainError, HypvolError
from .numerics import DEFAULT_TOLERANCES, Tolerances

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3, 4
THREADS_ENV = "HYPVOL_THREADS"
FORMATS = ("text", "json", "csv")
VERIFY_TARGETS = ("evil-star", "no-short-geodesic", "short-geodesic", "all")
TABLE_TARGETS = ("vnear", "vfar", "wstar", "bound-sum")
TOL_KEYS = ("quad_abs", "quad_rel", "root_tol", "domain_clamp")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class EvalEntry:
    func: object
    params: tuple
    formula: str
    int_params: tuple = ()
    takes_tol: bool = False


REGISTRY = {
    "ball_volume": EvalEntry(hyptrig.ball_volume, ("r",), "B(r) = pi (sinh 2r - 2r)"),
    "kappa": EvalEntry(caps.kappa, ("R", "w"), "volume of one cap"),
    "iota": EvalEntry(caps.iota_general, ("R", "w1", "w2", "alpha"),
                      "volume of the intersection of two caps", takes_tol=True),
    "sigma": EvalEntry(caps.sigma_union, ("R", "w", "wp", "alpha"),
                       "volume of the union of two caps", takes_tol=True),
    "phi_n": EvalEntry(hyptrig.phi_n, ("n", "delta", "D"),
                       "sinh(Phi/2) = sinh(n delta/2) cosh(D/2) / cosh(delta/2)", int_params=("n",)),
    "psi": EvalEntry(hyptrig.psi, ("x", "y"), "arccos(tanh(y/2) / tanh x)", takes_tol=True),
    "theta": EvalEntry(hyptrig.cap_angle_theta, ("w", "R"), "arccos(tanh w / tanh R)", takes_tol=True),
    "omega": EvalEntry(hyptrig.omega, ("l", "theta", "D"), "distance to the axis of a loxodromic", takes_tol=True),
    "rho_k": EvalEntry(hyptrig.rho_k, ("k", "D", "lambda"),
                       "(1/2) log((k-2)/(1/2 - 1/(1+e^D) - 1/(1+e^lambda)) - 1)", int_params=("k",)),
    "rho_short": EvalEntry(hyptrig.rho_short, ("l",), "(1/2) log((e^l + 3) / (e^l - 1))"),
    "h2": EvalEntry(hyptrig.h2, ("R",), "circumradius of the equilateral triangle with side 2R"),
    "h3": EvalEntry(hyptrig.h3, ("R",), "circumradius of the regular tetrahedron with edge 2R"),
    "boroczky_d": EvalEntry(hyptrig.boroczky_density, ("r",), "Boroczky local packing density",
                            takes_tol=True),
    "vbor": EvalEntry(hyptrig.v_bor, ("R", "rho"), "Boroczky-ball volume bound", takes_tol=True),
    "vnear": EvalEntry(bounds.v_near, ("D",), "near-volume bound", takes_tol=True),
    "vfar": EvalEntry(bounds.v_far, ("D", "lambda"), "far-volume bound", takes_tol=True),
    "vn": EvalEntry(bounds.v_n, ("l", "lambda"), "B(lambda/2) - 2 kappa(lambda/2, l/2)"),
    "w": EvalEntry(bounds.w_total, ("l", "lambda"), "v_far(l, lambda) + v_n(l, lambda)", takes_tol=True),
    "wstar": EvalEntry(bounds.w_star, ("l", "y"), "w(l, 2 rho_short(l) + y)", takes_tol=True),
    "chi": EvalEntry(bounds.chi, ("l", "y"), "rho_4(l, 2rho+y) - (h + (2rho+y)/2)"),
    "delta_ab": EvalEntry(bounds.delta_ab, ("a", "b"), "nesting-inequality gap bound on [a, b]",
                          takes_tol=True),
}

_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}
_FUNCS = {name: getattr(math, name) for name in
          ("log", "exp", "sqrt", "sinh", "cosh", "tanh", "asinh", "acosh", "atanh",
           "sin", "cos", "tan", "asin", "acos", "atan")}
_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
           ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b,
           ast.Pow: lambda a, b: a ** b}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def parse_real(text):
    """A float, or a small arithmetic expression such as ``log(7)/2``."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return _eval_node(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
        raise UsageError(f"cannot read {text!r} as a number") from exc


# -- output ---------------------------------------------------------------

def _json_scalar(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        # "-0" would read back as the integer 0
        return "-0.0" if text == "-0" else text
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dump_json(obj, indent=0):
    """Canonical JSON: sorted keys, two-space indent, floats to 17 significant
    digits. Parsing the output and dumping again gives the same bytes."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{pad}{json.dumps(str(k))}: {dump_json(obj[k], indent + 1)}" for k in sorted(obj))
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dump_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    return _json_scalar(obj)


def report_to_dict(report, full=False):
    d = {
        "lemma_id": report.lemma_id,
        "mode": report.mode,
        "threshold": report.threshold,
        "min_value": report.min_value,
        "min_cell": verify.cell_bounds(report.min_cell),
        "passed": report.passed,
        "cell_count": report.cell_count,
        "timing_seconds": report.timing,
        "extras": report.extras,
    }
    if full:
        d["cells"] = [
            {"cell": verify.cell_bounds(c.cell), "value": c.value, "branch_info": c.branch_info}
            for c in report.cells
        ]
    return d


def _cell_text(cell):
    b = verify.cell_bounds(cell)
    if "y_lo" in b:
        return f"[{b['lo']!r}, {b['hi']!r}]x[{b['y_lo']!r}, {b['y_hi']!r}]"
    return f"[{b['lo']!r}, {b['hi']!r})"


def summary_line(report):
    verdict = "PASS" if report.passed else "FAIL"
    return (f"{report.lemma_id}: {verdict} min_value={report.min_value!r} "
            f"min_cell={_cell_text(report.min_cell)} threshold={report.threshold!r} "
            f"cells={report.cell_count} mode={report.mode} time={report.timing:.2f}s")


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([repr(v) if isinstance(v, float) else v for v in row] for row in rows)
    return buf.getvalue()


# -- configuration -------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    command: str
    target: str
    args: tuple = ()
    mode: str = "sound"
    refinement: int = 1
    output_format: str = "text"
    output_path: Optional[str] = None
    tolerances: Tolerances = DEFAULT_TOLERANCES
    threads: Optional[int] = None
    full: bool = False
    chi_threshold: float = verify.CHI_THRESHOLD

    def __post_init__(self):
        if self.refinement < 1:
            raise UsageError(f"refinement must be >= 1, got {self.refinement}")
        if self.mode not in bounds.MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.threads is not None and self.threads < 1:
            raise UsageError(f"threads must be >= 1, got {self.threads}")


def read_config(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _truthy(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def build_config(ns):
    file_cfg = read_config(ns.config) if getattr(ns, "config", None) else {}
    known = {"format", "output", "mode", "refinement", "threads", "full", "chi_threshold", *TOL_KEYS}
    unknown = set(file_cfg) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")

    def pick(flag, key, conv, default):
        if flag is not None:
            return flag
        if key in file_cfg:
            try:
                return conv(file_cfg[key])
            except ValueError as exc:
                raise UsageError(f"bad config value for {key}: {file_cfg[key]!r}") from exc
        return default

    env_threads = os.environ.get(THREADS_ENV)
    try:
        default_threads = int(env_threads) if env_threads else None
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {env_threads!r}") from exc

    tol_overrides = {}
    for key in TOL_KEYS:
        value = pick(getattr(ns, key, None), key, float, None)
        if value is not None:
            tol_overrides[key] = value
    try:
        tol = replace(DEFAULT_TOLERANCES, **tol_overrides)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from exc

    return RunConfig(
        command=ns.command,
        target=ns.target,
        args=tuple(getattr(ns, "args", ()) or ()),
        mode=pick(ns.mode, "mode", str, "sound"),
        refinement=pick(ns.refinement, "refinement", int, 1),
        output_format=pick(ns.format, "format", str, "text"),
        output_path=pick(ns.output, "output", str, None),
        tolerances=tol,
        threads=pick(ns.threads, "threads", int, default_threads),
        full=pick(True if ns.full else None, "full", _truthy, False),
        chi_threshold=pick(ns.chi_threshold, "chi_threshold", float, verify.CHI_THRESHOLD),
    )


# -- commands -------------------------------------------------------------

def cmd_eval(cfg):
    entry = REGISTRY.get(cfg.target)
    if entry is None:
        raise UsageError(f"unknown function {cfg.target!r}; choose from {', '.join(sorted(REGISTRY))}")
    if len(cfg.args) != len(entry.params):
        raise UsageError(f"{cfg.target} takes {len(entry.params)} arguments "
                         f"({', '.join(entry.params)}), got {len(cfg.args)}")
    values = []
    for name, text in zip(entry.params, cfg.args):
        v = parse_real(text)
        if name in entry.int_params:
            if v != int(v):
                raise UsageError(f"{name} must be an integer, got {text!r}")
            v = int(v)
        values.append(v)
    kwargs = {"tol": cfg.tolerances} if entry.takes_tol else {}
    value = entry.func(*values, **kwargs)
    if cfg.output_format == "json":
        text = dump_json({"target": cfg.target, "args": values, "value": value,
                          "paper_ref": entry.formula}) + "\n"
    elif cfg.output_format == "csv":
        header = ["target", *entry.params, "value"]
        text = _csv_text(header, [[cfg.target, *values, value]])
    else:
        call = ", ".join(repr(v) for v in values)
        text = f"{value!r}\n# {cfg.target}({call}): {entry.formula} [hypvol {__version__}, {BACKEND} kernels]\n"
    return EXIT_PASS, text


def run_verify(target, cfg):
    tol = cfg.tolerances
    if target == "evil-star":
        return verify.verify_evil_star(tol)
    if target == "no-short-geodesic":
        grid = verify.GridSpec.no_short_geodesic_default(cfg.refinement)
        return verify.verify_no_short_geodesic(grid, cfg.mode, cfg.threads, tol)
    grid = verify.GridSpec.short_geodesic_default(cfg.refinement)
    return verify.verify_short_geodesic(grid, cfg.threads, cfg.chi_threshold, tol)


def cmd_verify(cfg):
    if cfg.target not in VERIFY_TARGETS:
        raise UsageError(f"unknown verification {cfg.target!r}; choose from {', '.join(VERIFY_TARGETS)}")
    if cfg.args:
        raise UsageError("verify takes no positional arguments after the target")
    targets = VERIFY_TARGETS[:-1] if cfg.target == "all" else (cfg.target,)
    reports = [run_verify(t, cfg) for t in targets]
    passed = all(r.passed for r in reports)

    if cfg.output_format == "json":
        dicts = [report_to_dict(r, cfg.full) for r in reports]
        doc = {"passed": passed, "reports": dicts} if cfg.target == "all" else dicts[0]
        text = dump_json(doc) + "\n"
    elif cfg.output_format == "csv":
        if cfg.full:
            header = ["lemma_id", "lo", "hi", "y_lo", "y_hi", "value", "branch"]
            rows = []
            for r in reports:
                for c in r.cells:
                    b = verify.cell_bounds(c.cell)
                    rows.append([r.lemma_id, b["lo"], b["hi"], b.get("y_lo", ""), b.get("y_hi", ""),
                                 c.value, c.branch_info.get("branch", "")])
        else:
            header = ["lemma_id", "passed", "min_value", "min_lo", "min_hi", "min_y_lo", "min_y_hi",
                      "threshold", "cell_count", "mode"]
            rows = []
            for r in reports:
                b = verify.cell_bounds(r.min_cell)
                rows.append([r.lemma_id, r.passed, r.min_value, b["lo"], b["hi"], b.get("y_lo", ""),
                             b.get("y_hi", ""), r.threshold, r.cell_count, r.mode])
        text = _csv_text(header, rows)
    else:
        lines = []
        for r in reports:
            lines.append(summary_line(r))
            lines.extend(f"  {k}={v!r}" for k, v in sorted(r.extras.items()))
        text = "\n".join(lines) + "\n"
    return (EXIT_PASS if passed else EXIT_FAIL), text


def _steps(lo, hi, step):
    if not (step > 0 and hi >= lo):
        raise UsageError(f"empty range {lo!r}..{hi!r} step {step!r}")
    n = math.floor((hi - lo) / step + 1e-9)
    return [lo + i * step for i in range(n + 1)]


def _near_branch(D):
    return "t3" if D >= bounds.BRANCH_POINT else "nought"


def cmd_table(cfg):
    if cfg.target not in TABLE_TARGETS:
        raise UsageError(f"unknown table {cfg.target!r}; choose from {', '.join(TABLE_TARGETS)}")
    nums = [parse_real(a) for a in cfg.args]
    tol = cfg.tolerances
    lam0 = bounds.CONSTANTS.lambda0
    if cfg.target == "wstar":
        if len(nums) != 6:
            raise UsageError("table wstar takes l_lo l_hi l_step y_lo y_hi y_step")
        header = ["l", "y", "w_star", "branch"]
        rows = []
        for l in _steps(*nums[:3]):
            for y in _steps(*nums[3:]):
                Z = bounds.chi(l, y) + bounds.CONSTANTS.h
                rows.append([l, y, bounds.w_star(l, y, tol), bounds.far_case(Z)])
    else:
        if len(nums) != 3:
            raise UsageError(f"table {cfg.target} takes lo hi step")
        xs = _steps(*nums)
        if cfg.target == "vnear":
            header = ["D", "v_near", "branch"]
            rows = [[D, bounds.v_near(D, tol), _near_branch(D)] for D in xs]
        elif cfg.target == "vfar":
            header = ["D", "v_far", "branch"]
            rows = [[D, bounds.v_far(D, lam0, tol), bounds.far_case(bounds.z_gap(D, lam0))] for D in xs]
        else:
            header = ["D", "bound_sum", "branch"]
            rows = [[D, bounds.v_near(D, tol) + bounds.v_far(D, lam0, tol),
                     f"{_near_branch(D)}+{bounds.far_case(bounds.z_gap(D, lam0))}"] for D in xs]
    if cfg.output_format == "json":
        text = dump_json({"target": cfg.target, "columns": header, "rows": rows}) + "\n"
    else:
        text = _csv_text(header, rows)
    return EXIT_PASS, text


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "table": cmd_table}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="output format (default text)")
    common.add_argument("-o", "--output", default=None, metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--mode", choices=bounds.MODES, default=None,
                        help="interval bound on [0.7, log 7): sound subtracts the T3 cap twice, paper_text once")
    common.add_argument("--refinement", type=int, default=None, metavar="N",
                        help="multiply every grid subdivision count by N")
    common.add_argument("--threads", type=int, default=None, metavar="N",
                        help=f"worker processes for sweeps (default ${THREADS_ENV} or 1)")
    common.add_argument("--config", default=None, metavar="PATH", help="flat key = value settings file")
    common.add_argument("--full", action="store_true", default=None, help="include every cell in reports")
    common.add_argument("--chi-threshold", dest="chi_threshold", type=float, default=None,
                        help="chi_S above which the Boroczky rectangle bound is used (default 0.1)")
    for key in TOL_KEYS:
        common.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, default=None,
                            help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="hypvol", description="Hyperbolic cap volumes, volume bounds and their grid verification.")
    parser.add_argument("--version", action="version", version=f"hypvol {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one library function")
    p.add_argument("target", help=f"one of: {', '.join(sorted(REGISTRY))}")
    p.add_argument("args", nargs="*", help="real arguments (expressions like log(7)/2 are accepted)")

    p = sub.add_parser("verify", parents=[common], help="run a verification sweep")
    p.add_argument("target", help=f"one of: {', '.join(VERIFY_TARGETS)}")

    p = sub.add_parser("table", parents=[common], help="tabulate a bound over a range")
    p.add_argument("target", help=f"one of: {', '.join(TABLE_TARGETS)}")
    p.add_argument("args", nargs="*", help="lo hi step (wstar: l_lo l_hi l_step y_lo y_hi y_step)")
    return parser


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = build_config(ns)
        code, text = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"hypvol: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"hypvol: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, ConsistencyError) as exc:
        print(f"hypvol: numerical failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except HypvolError as exc:
        print(f"hypvol: numerical failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"hypvol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
