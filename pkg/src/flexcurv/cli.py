"""Command-line front end.

Every report embeds the resolved scenario, so any report file can be fed
back with ``--scenario`` to reproduce it.  Exit codes: 0 pass, 1 numerical
disagreement (FAIL), 2 validation error, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import NumericalDomainError, ValidationError
from .flex import FLEX_TOL, check_flex, construct_flex_numeric, require_flex, triviality_of_field
from .geometry import check_regular, principal_curvatures, surface_area, total_mean_curvature
from .scenario import FORMATS, Scenario, ScenarioError
from .variation import SWEEP_COLUMNS, invariant_sweep, variation_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_VALIDATION = 2
EXIT_DOMAIN = 3

REPORT_MARKER = "# flexcurv report"


class Report:
    """Command output: a status, the resolved scenario, a result mapping and optional table rows."""

    def __init__(self, command: str, scenario: Scenario, status: str, result: dict, table=None, columns=()):
        self.command = command
        self.scenario = scenario
        self.status = status
        self.result = result
        self.table = table
        self.columns = tuple(columns)

    @property
    def exit_code(self) -> int:
        return EXIT_FAIL if self.status == "FAIL" else EXIT_OK

    def to_dict(self) -> dict:
        d = {"command": self.command, "status": self.status, "scenario": self.scenario.to_dict()}
        d["result"] = dict(self.result)
        if self.table is not None:
            d["result"]["rows"] = [dict(zip(self.columns, row)) for row in self.table]
        return d

    def _scenario_header(self) -> list[str]:
        return ["[scenario]", *self.scenario.to_text().splitlines()]

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"{REPORT_MARKER}: {self.command} {self.status}\n")
        for line in self._scenario_header():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        if self.table is not None:
            w.writerow(self.columns)
            for row in self.table:
                w.writerow([_csv_cell(x) for x in row])
        else:
            flat = {k: v for k, v in self.result.items() if not isinstance(v, (dict, list))}
            w.writerow(flat.keys())
            w.writerow([_csv_cell(x) for x in flat.values()])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{REPORT_MARKER}: {self.command} {self.status}", *self._scenario_header(), "[result]"]
        for key, val in self.result.items():
            if isinstance(val, dict):
                for k2, v2 in val.items():
                    lines.append(f"{key}.{k2} = {_text_cell(v2)}")
            elif not isinstance(val, list):
                lines.append(f"{key} = {_text_cell(val)}")
        if self.table is not None:
            lines.append("[table]")
            lines.append("  ".join(f"{c:>22}" for c in self.columns))
            for row in self.table:
                lines.append("  ".join(f"{_text_cell(x):>22}" for x in row))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "text": self.to_text}[fmt]()


def _csv_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _text_cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return _csv_cell(x)


def load_scenario(path: str) -> Scenario:
    """Scenario file, or any report this CLI wrote (JSON, CSV or text)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {path}: {exc}") from None
    if not text.startswith(REPORT_MARKER):
        return Scenario.load(path)
    lines = [ln[2:] if ln.startswith("# ") else ln for ln in text.splitlines()]
    try:
        start = lines.index("[scenario]") + 1
    except ValueError:
        raise ValidationError(f"{path}: report has no [scenario] block") from None
    block = []
    for ln in lines[start:]:
        if ln.startswith("[") or ln.startswith("#") or "=" not in ln:
            break
        block.append(ln)
    return Scenario.from_text("\n".join(block))


# -- commands ----------------------------------------------------------------------


def cmd_curvature(sc: Scenario) -> Report:
    p = sc.patch()
    q = sc.quadrature()
    check_regular(p, q)
    H = total_mean_curvature(p, q)
    area = surface_area(p, q)
    u, v = p.domain.sample_points(sc.samples)
    k1, k2 = principal_curvatures(p, u, v)
    rows = [
        (float(a), float(b), float((x + y) / 2), float(x * y), float(x), float(y))
        for a, b, x, y in zip(u, v, np.broadcast_to(k1, u.shape), np.broadcast_to(k2, u.shape))
    ]
    result = {
        "surface": p.describe(),
        "domain": p.domain.describe(),
        "total_mean_curvature": H,
        "area": area,
        "quadrature": q.rule(p.domain),
    }
    return Report("curvature", sc, "OK", result, rows, ("u", "v", "H", "K", "kappa1", "kappa2"))


def cmd_flex_check(sc: Scenario) -> Report:
    p = sc.patch()
    grid = sc.construct_grid()
    if grid is not None:
        d = construct_flex_numeric(p, *grid)
        passed = d.residual_norm <= FLEX_TOL
        result = {
            "surface": p.describe(),
            "discrete": True,
            "residual_norm": d.residual_norm,
            "triviality_score": d.triviality_score,
            "kernel_dimension": d.kernel_dimension,
            "nontrivial": d.nontrivial,
            "tol": FLEX_TOL,
            "pass": passed,
        }
        return Report("flex-check", sc, "PASS" if passed else "FAIL", result)
    flex = sc.flex_field(p)
    fc = check_flex(p, flex, n=sc.samples)
    result = {
        "surface": p.describe(),
        "flex": flex.source(),
        "discrete": False,
        "max_first_order": fc.max_first_order,
        "max_second_order": fc.max_second_order,
        "worst_point": list(fc.worst_point),
        "n_points": fc.n_points,
        "triviality_score": triviality_of_field(p, flex),
        "tol": fc.tol,
        "pass": fc.passed,
    }
    return Report("flex-check", sc, "PASS" if fc.passed else "FAIL", result)


def cmd_variation(sc: Scenario) -> Report:
    p = sc.patch()
    flex = sc.flex_field(p)
    rep = variation_report(
        p,
        flex,
        sc.quadrature(),
        sc.boundary_quadrature(),
        h=sc.fd_step,
        use_richardson=sc.richardson,
        erratum_probe=sc.erratum_probe,
    )
    result = {"surface": p.describe(), "flex": flex.source(), **rep.to_dict()}
    return Report("variation", sc, "PASS" if rep.passed else "FAIL", result)


def cmd_sweep(sc: Scenario) -> Report:
    if not sc.t_list:
        raise ScenarioError("t_list", "sweep needs at least one t value")
    if not all(math.isfinite(t) for t in sc.t_list):
        raise ScenarioError("t_list", "t values must be finite")
    p = sc.patch()
    flex = sc.flex_field(p)
    require_flex(p, flex)
    rows = invariant_sweep(p, flex, sc.t_list, sc.quadrature())
    table = [tuple(r.as_dict()[c] for c in SWEEP_COLUMNS) for r in rows]
    result = {
        "surface": p.describe(),
        "flex": flex.source(),
        "irregular_rows": sum(r.status != "ok" for r in rows),
    }
    return Report("sweep", sc, "OK", result, table, SWEEP_COLUMNS)


def cmd_construct_flex(sc: Scenario) -> Report:
    grid = sc.construct_grid()
    if grid is None:
        if sc.flex:
            raise ScenarioError("flex", "construct-flex takes 'construct' or 'construct:<n_u>x<n_v>'")
        grid = (12, 12)
    p = sc.patch()
    d = construct_flex_numeric(p, *grid)
    result = {"surface": p.describe(), **d.to_dict()}
    columns = ("u", "v", "xi", "eta", "zeta")
    return Report("construct-flex", sc, "OK", result, list(d.rows()), columns)


COMMANDS = {
    "curvature": cmd_curvature,
    "flex-check": cmd_flex_check,
    "variation": cmd_variation,
    "sweep": cmd_sweep,
    "construct-flex": cmd_construct_flex,
}


def write_gnuplot(report: Report, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(c for c in report.columns if c != "status") + "\n")
        for row in report.table:
            fh.write(" ".join(repr(float(x)) for x, c in zip(row, report.columns) if c != "status") + "\n")


# -- argument handling -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flexcurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--scenario", help="key = value scenario file, or a report written by flexcurv")
        sp.add_argument("--surface", help="catalog name (plane, paraboloid, saddle, 'cap R=1 r=0.5') or height expression")
        sp.add_argument("--domain", help="rect:u0,u1,v0,v1 | disk:cu,cv,r | disk:r")
        sp.add_argument("--flex", help="'xi,eta,zeta' expressions, translate:/rotate:/rigid:, bump, construct[:NxM]")
        sp.add_argument("--nodes", type=int, help="Gauss nodes per axis")
        sp.add_argument("--boundary-nodes", type=int, help="Gauss nodes per boundary panel")
        sp.add_argument("--boundary-panels", type=int)
        sp.add_argument("--fd-step", type=float)
        sp.add_argument("--no-richardson", action="store_true")
        sp.add_argument("--t-list", help="comma-separated t values")
        sp.add_argument("--samples", type=int, help="sample grid size for pointwise checks")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--erratum-probe", action="store_true", help="also evaluate the alternative boundary integrand")
        sp.add_argument("--out", help="write the report here instead of standard output")
        if name == "sweep":
            sp.add_argument("--gnuplot", help="also write a whitespace-separated data file")
    return parser


def scenario_from_args(args) -> Scenario:
    base = load_scenario(args.scenario) if args.scenario else Scenario()
    overrides = {}
    for key in ("surface", "domain", "flex", "nodes", "boundary_nodes", "boundary_panels", "fd_step", "samples", "format"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    if args.t_list is not None:
        overrides["t_list"] = args.t_list
    if args.no_richardson:
        overrides["richardson"] = False
    if args.erratum_probe:
        overrides["erratum_probe"] = True
    sc = Scenario.from_mapping(overrides, base=base)
    sc.validate()
    return sc


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        sc = scenario_from_args(args)
        report = COMMANDS[args.command](sc)
    except ValidationError as exc:
        print(f"flexcurv: error: {exc}", file=stderr)
        return EXIT_VALIDATION
    except NumericalDomainError as exc:
        route = getattr(exc, "route", None)
        where = f" (route: {route})" if route else ""
        print(f"flexcurv: numerical-domain error{where}: {exc}", file=stderr)
        return EXIT_DOMAIN
    text = report.render(sc.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    if getattr(args, "gnuplot", None):
        write_gnuplot(report, args.gnuplot)
    print(f"flexcurv {args.command}: {report.status}", file=stderr)
    return report.exit_code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
