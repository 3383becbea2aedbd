"""``qgc`` command line.

Exit codes: 0 success, 2 argument errors, 1 numerical guard failures.  Errors
go to stderr as ``qgc:error:<code>:<kind>: <message>``.  Floats are written
with at most 15 significant digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys

import click

from . import curvature as cv
from . import forecast as fc
from .dynamics import FlowState, integrate
from .errors import DomainError, QGCError
from .extension import HatVector, MetricContext
from .oracles import DEFAULT_TOLERANCES, discrepancy_report, run_suites
from .parallel import pmap
from .structure import BACKENDS, build_table

CONFIG_KEYS = ("lmax", "alpha", "backend", "out", "format")


def fmt(x) -> str:
    return format(float(x) + 0.0, ".15g")  # + 0.0 folds -0.0 into 0.0


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _load_config(ctx, _param, path):
    """Turn a JSON config into click defaults; explicit flags still win."""
    if not path:
        return
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config: {exc}") from None
    if not isinstance(cfg, dict):
        raise click.BadParameter("config must be a JSON object")
    unknown = set(cfg) - set(CONFIG_KEYS) - {"tolerances"}
    if unknown:
        raise click.BadParameter(f"unknown config keys: {sorted(unknown)}")
    tolerances = cfg.get("tolerances", {})
    if any(not isinstance(v, (int, float)) or v <= 0 for v in tolerances.values()):
        raise click.BadParameter("tolerances must be positive numbers")
    base = {k: cfg[k] for k in CONFIG_KEYS if k in cfg}
    if "lmax" in base and int(base["lmax"]) < 1:
        raise click.BadParameter("lmax must be >= 1")
    defaults = {}
    for name, cmd in main.commands.items():
        names = {p.name for p in cmd.params}
        d = {k: v for k, v in base.items() if k in names}
        if "tolerances" in names and tolerances:
            d["tolerances"] = json.dumps(tolerances)
        defaults[name] = d
    ctx.default_map = defaults


def _tolerances(raw) -> dict:
    if not raw:
        return {}
    tol = json.loads(raw) if isinstance(raw, str) else dict(raw)
    bad = set(tol) - set(DEFAULT_TOLERANCES)
    if bad:
        raise click.BadParameter(f"unknown tolerance names: {sorted(bad)}")
    return {k: float(v) for k, v in tol.items()}


def _float_list(_ctx, _param, value):
    try:
        return [float(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from None


lmax_opt = click.option("--lmax", type=click.IntRange(min=1), default=3, show_default=True)
alpha_opt = click.option("--alpha", type=click.FloatRange(min=0.0), default=0.0, show_default=True)
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                       help="Write to this file instead of stdout.")
tol_opt = click.option("--tolerances", default=None, hidden=True)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", type=click.Path(dir_okay=False), callback=_load_config,
              is_eager=True, expose_value=False, help="JSON file of default options.")
def main():
    """Curvature of the centrally extended sphere algebra and related estimates."""


@main.command()
@lmax_opt
@click.option("--backend", type=click.Choice(BACKENDS), default="analytic", show_default=True)
@click.option("--format", "format_", type=click.Choice(["csv", "json"]), default="csv")
@out_opt
def constants(lmax, backend, format_, out):
    """Structure-constant table for all modes up to LMAX."""
    records = build_table(lmax, backend).records()
    if format_ == "json":
        emit(dumps_json({"lmax": lmax, "backend": backend, "entries": records}), out)
    else:
        header = ["l1", "m1", "l2", "m2", "l3", "m3", "re", "im"]
        emit(dumps_csv(header, [[r[k] for k in header] for r in records]), out)


@main.command()
@lmax_opt
@tol_opt
@out_opt
def check(lmax, tolerances, out):
    """Run every oracle suite; exit 1 if any residual exceeds its tolerance."""
    results = run_suites(lmax, _tolerances(tolerances))
    rows = [(r.name, float(r.residual), float(r.tol), "pass" if r.passed else "FAIL")
            for r in results]
    emit(dumps_csv(["suite", "residual", "tolerance", "status"], rows), out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise QGCError(f"oracle suites failed: {', '.join(failed)}")


@main.command()
@click.option("--nu", type=float, default=1.0, show_default=True)
@click.option("--a", "a", type=float, default=0.0, show_default=True)
@alpha_opt
@click.option("--l0", type=int, required=True)
@click.option("--m0", type=int, required=True)
@click.option("--json", "as_json", is_flag=True, help="Also evaluate the general route.")
def zonal(nu, a, alpha, l0, m0, as_json):
    """Sectional curvature of the zonal-flow plane (closed form)."""
    kappa = cv.zonal_sectional(nu, a, alpha, l0, m0)
    if not as_json:
        click.echo(fmt(kappa))
        return
    ctx = MetricContext(alpha)
    xi, eta = cv.zonal_plane(nu, a, l0, m0, ctx)
    general = cv.sectional(xi, eta, ctx, build_table(max(l0, 1))).kappa
    click.echo(dumps_json({"nu": nu, "a": a, "alpha": alpha, "l0": l0, "m0": m0,
                           "kappa": kappa, "kappa_general": general}), nl=False)


@main.command()
@click.option("--a", "a", type=float, default=0.0, show_default=True)
@alpha_opt
@lmax_opt
@click.option("--m0", type=int, default=None, help="Fixed order; default m0 = l0.")
@click.option("--verify", is_flag=True, help="Add the general Gram-normalised value.")
@out_opt
def tradewind(a, alpha, lmax, m0, verify, out):
    """Tradewind-plane sectional curvature for l0 = 1..LMAX."""
    ctx = MetricContext(alpha)
    table = build_table(max(lmax, 2)) if verify else None
    rows = []
    for l0 in range(1, lmax + 1):
        m = l0 if m0 is None else m0
        if abs(m) > l0:
            continue
        row = [float(a), float(alpha), l0, m, cv.tradewind_sectional(a, alpha, l0, m)]
        if verify:
            xi, eta = cv.tradewind_plane(a, l0, m, ctx)
            row.append(cv.sectional(xi, eta, ctx, table).kappa)
        rows.append(row)
    header = ["a", "alpha", "l0", "m0", "kappa"] + (["kappa_general"] if verify else [])
    emit(dumps_csv(header, rows), out)


@main.command()
@click.option("--a", "a_values", default="0,2,6,12", callback=_float_list, show_default=True)
@alpha_opt
@click.option("--lmax", type=click.IntRange(min=1), default=30, show_default=True)
@out_opt
def figure2(a_values, alpha, lmax, out):
    """Tradewind curvature along m0 = l0 for several a (plot-ready CSV)."""
    rows = []
    for chunk in pmap(lambda a: cv.figure2_sweep([a], range(1, lmax + 1), alpha), a_values):
        rows.extend(chunk)
    emit(dumps_csv(["a", "l0", "kappa"], [[float(a), l0, k] for a, l0, k in rows]), out)


def _read_init(path) -> HatVector:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        coeffs = {}
        for m in data.get("modes", []):
            coeffs[(int(m["l"]), int(m["m"]))] = complex(float(m.get("re", 0)), float(m.get("im", 0)))
        return HatVector(coeffs, float(data.get("central", 0.0)))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise click.BadParameter(f"bad init file {path}: {exc}") from None


@main.command()
@click.option("--init", "init", type=click.Path(exists=True, dir_okay=False), required=True)
@lmax_opt
@click.option("--a", "a", type=float, default=None, help="Central part; overrides the file.")
@alpha_opt
@click.option("--dt", type=float, default=1e-3, show_default=True)
@click.option("--steps", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--every", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--bound", type=float, default=1e6, show_default=True)
@out_opt
def evolve(init, lmax, a, alpha, dt, steps, every, bound, out):
    """Integrate the truncated dynamics from a JSON initial spectrum."""
    u = _read_init(init)
    if a is not None:
        u = HatVector(u.coeffs, a)
    if u.lmax > lmax:
        raise DomainError(f"initial data reaches l={u.lmax} beyond --lmax {lmax}")
    state = FlowState(u, 0.0, MetricContext(alpha), build_table(max(lmax, 1)))
    traj = integrate(state, dt, steps, bound=bound, record_every=every)
    emit(dumps_csv(["t", "E", "a", "enstrophy", "max|c|"], traj.rows()), out)


@main.command()
@click.option("--a", "a", type=float, default=0.0, show_default=True)
@click.option("--beta", type=float, required=True)
@click.option("--months", type=float, default=0.0, show_default=True)
@click.option("--wind-kmh", type=float, default=100.0, show_default=True)
@alpha_opt
@out_opt
def forecast(a, beta, months, wind_kmh, alpha, out):
    """Predictability estimates for a tradewind atmosphere."""
    p = fc.ForecastParams(a=a, beta_luk=beta, months=months, wind_kmh=wind_kmh, alpha=alpha)
    emit(dumps_json(fc.report(p).as_dict()), out)


@main.command()
@lmax_opt
@tol_opt
@out_opt
def report(lmax, tolerances, out):
    """Discrepancy report: printed-k deltas, g versus Y_20, oracle residuals."""
    emit(dumps_json(discrepancy_report(lmax, _tolerances(tolerances))), out)


def _error(code: int, kind: str, message: str) -> int:
    click.echo(f"qgc:error:{code}:{kind}: {message}", err=True)
    return code


def run(argv=None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        rv = main.main(args=argv, prog_name="qgc", standalone_mode=False)
        return rv if isinstance(rv, int) else 0
    except click.exceptions.NoArgsIsHelpError as exc:
        click.echo(exc.format_message(), err=True)
        return 2
    except click.UsageError as exc:
        return _error(2, "usage", exc.format_message())
    except DomainError as exc:
        return _error(2, "domain", str(exc))
    except QGCError as exc:
        return _error(1, type(exc).__name__, str(exc))
    except click.exceptions.Abort:
        return _error(1, "abort", "aborted")
    except click.ClickException as exc:
        return _error(1, "click", exc.format_message())


def entry():
    sys.exit(run(sys.argv[1:]))
