"""Command-line driver: build charts, check fibers, audit spin, count points."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .charts import GENERIC, SPECIAL, ChartSpec, ChartSpecError, build_chart, certify_simplification, make_spec
from .counting import (CountGuardError, component_count_check, grassmannian_report, isotropic_cell_count,
                       isotropic_count, ogr24_count)
from .fibers import fiber_report
from .groebner import DEFAULT_PAIR_GUARD, ResourceGuardError
from .spin import (DEFAULT_ENUM_GUARD, EnumerationGuardError, enumerate_points, is_worst_point,
                   isotropy_rank, rank_t_plus_pi, spin_audit, spin_splitting_census)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
GUARD_ERRORS = (ResourceGuardError, EnumerationGuardError, CountGuardError)


class Task(str, Enum):
    BUILD = "BUILD"
    SIMPLIFY_VERIFY = "SIMPLIFY_VERIFY"
    FIBERS = "FIBERS"
    SPIN = "SPIN"
    COUNTS = "COUNTS"
    CERTIFY_ALL = "CERTIFY_ALL"


class SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    p: int
    n: int
    r: int
    s: int
    chart: int
    pivots: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _valid(self):
        try:
            self.to_spec()
        except ChartSpecError as exc:
            raise ValueError(str(exc)) from None
        return self

    def to_spec(self) -> ChartSpec:
        return ChartSpec(self.p, self.n, self.r, self.s, self.chart, tuple(self.pivots))


class Guards(BaseModel):
    model_config = ConfigDict(extra="forbid")
    gb_pairs: int = Field(DEFAULT_PAIR_GUARD, gt=0)
    enum_assignments: int = Field(DEFAULT_ENUM_GUARD, gt=0)


class Outputs(BaseModel):
    model_config = ConfigDict(extra="forbid")
    json_path: Optional[str] = None
    points_csv: Optional[str] = None
    text: bool = True


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    specs: list[SpecModel] = Field(default_factory=list)
    q: Optional[int] = None
    guards: Guards = Field(default_factory=Guards)
    outputs: Outputs = Field(default_factory=Outputs)
    tasks: list[Task]

    @field_validator("tasks")
    @classmethod
    def _nonempty(cls, v):
        if not v:
            raise ValueError("at least one task is required")
        return v

    @model_validator(mode="after")
    def _q_matches(self):
        if self.q is not None:
            for sp in self.specs:
                if sp.p != self.q:
                    raise ValueError(f"q: only q = p is supported (q={self.q}, spec p={sp.p})")
        needs_spec = set(self.tasks) - {Task.COUNTS, Task.CERTIFY_ALL}
        if needs_spec and not self.specs:
            raise ValueError(f"specs: tasks {sorted(t.value for t in needs_spec)} need at least one spec")
        return self


class ConfigError(ValueError):
    pass


def parse_config(text: str | dict) -> RunConfig:
    try:
        data = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        msgs = []
        for err in exc.errors():
            loc = ".".join(str(x) for x in err["loc"]) or "config"
            msgs.append(f"{loc}: {err['msg']}")
        raise ConfigError("; ".join(msgs)) from None


def parse_spec_flag(text: str) -> dict:
    """'p,n,r,s,chart[,pivot...]' -> spec dict."""
    try:
        parts = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--spec: expected integers, got {text!r}") from None
    if len(parts) < 5:
        raise ConfigError(f"--spec: expected p,n,r,s,chart[,pivots...], got {text!r}")
    p, n, r, s, chart, *piv = parts
    return {"p": p, "n": n, "r": r, "s": s, "chart": chart, "pivots": piv}


# -- expectations ------------------------------------------------------------


def expected_generic_empty(spec: ChartSpec) -> bool:
    return (spec.chart == 1) == (spec.s % 2 == 1)


def _check(name: str, ok: bool, **detail) -> dict:
    out = {"name": name, "pass": bool(ok)}
    out.update(detail)
    return out


def task_build(spec: ChartSpec, guards: Guards) -> dict:
    c = build_chart(spec)
    return {
        "raw_vars": len(c.raw.ring.variables),
        "raw_generators": len(c.raw.nonzero_generators()),
        "simplified_vars": list(c.simplified.ring.variables),
        "reduced_vars": list(c.reduced.ring.variables),
        "reduced_generators": [str(g) for g in c.reduced.nonzero_generators()],
        "principal": str(c.principal) if c.principal is not None else None,
        "d_vars": list(c.d_vars),
        "notes": list(c.notes),
        "checks": [_check("built", True)],
    }


def task_simplify(spec: ChartSpec, guards: Guards) -> dict:
    c = build_chart(spec)
    out = {"checks": []}
    for fiber in (GENERIC, SPECIAL):
        cert = certify_simplification(c, fiber, guards.gb_pairs)
        out["checks"].append(_check(f"simplification_{fiber.lower()}", cert.ok,
                                    failures=cert.failures[:5]))
    return out


def task_fibers(spec: ChartSpec, guards: Guards) -> dict:
    c = build_chart(spec)
    g = fiber_report(c, GENERIC, guards.gb_pairs)
    sp = fiber_report(c, SPECIAL, guards.gb_pairs)
    n, r, s = spec.n, spec.r, spec.s
    checks = [_check("generic_emptiness", g.empty == expected_generic_empty(spec),
                     empty=g.empty, expected=expected_generic_empty(spec))]
    if spec.verified_case and not g.empty:
        checks.append(_check("generic_dim", g.dimension == r * s, value=g.dimension, expected=r * s))
        checks.append(_check("special_dim", sp.dimension == r * s, value=sp.dimension, expected=r * s))
        if len(sp.components) == 2:
            checks.append(_check("reduced", sp.reduced is True))
            for i, comp in enumerate(sp.components, 1):
                checks.append(_check(f"component_{i}", comp.dim == r * s and comp.smooth is True
                                     and comp.irreducible != "reducible",
                                     dim=comp.dim, smooth=comp.smooth, irreducible=comp.irreducible))
            checks.append(_check("intersection_dim", sp.intersection_dim == r * s - 1,
                                 value=sp.intersection_dim, expected=r * s - 1))
            checks.append(_check("transverse", sp.transverse is True))
        else:
            checks.append(_check("smooth_special", all(cp.smooth for cp in sp.components)))
        if c.principal is not None:
            checks.append(_check("flat_principal", sp.flat_principal is True))
        if spec.chart == 1:
            want = s * (n - s)
            checks.append(_check("worst_fiber_dim", sp.worst_fiber_dim == want,
                                 value=sp.worst_fiber_dim, expected=want))
            want = s * (2 * n - 3 * s + 1) // 2
            checks.append(_check("isotropic_dim", sp.isotropic_dim == want,
                                 value=sp.isotropic_dim, expected=want))
        else:
            want = (s - 1) * (n - 1 - s) + (s - 1)
            checks.append(_check("worst_fiber_dim", sp.worst_fiber_dim == want,
                                 value=sp.worst_fiber_dim, expected=want))
    return {"generic": g.to_json(), "special": sp.to_json(), "empty_generic": g.empty,
            "checks": checks}


def task_spin(spec: ChartSpec, guards: Guards) -> dict:
    c = build_chart(spec)
    audit = spin_audit(c, spec.p, guards.enum_assignments)
    census = spin_splitting_census(c, spec.p, guards.enum_assignments)
    checks = [_check("census_equal", census.equal)]
    if not expected_generic_empty(spec):
        checks.append(_check("parity", audit.violations == 0, violations=audit.violations))
        if spec.chart == 1:
            checks.append(_check("rank_equals_rank_D", audit.d_rank_mismatches == 0))
            checks.append(_check("worst_point_iff_A_zero", audit.a_zero_mismatches == 0))
            if spec.s == 2:
                ranks = set(audit.isotropy_histogram)
                checks.append(_check("isotropy_two_orbits", ranks == {0, 2},
                                     ranks=sorted(ranks)))
    return {"audit": audit.to_json(), "census": census.to_json(), "checks": checks}


def task_counts_spec(spec: ChartSpec, guards: Guards) -> dict:
    c = build_chart(spec)
    checks = []
    out = {}
    if c.principal is not None and len(c.d_vars) == 1 and not expected_generic_empty(spec):
        checks.append(_check("component_counts", component_count_check(c, spec.p, guards.enum_assignments)))
    if spec.chart == 1 and spec.s == 2 and not expected_generic_empty(spec):
        cell = isotropic_cell_count(spec.s, spec.n, spec.p, spec.pivots)
        census = sum(1 for pt in enumerate_points(c, spec.p, guards.enum_assignments)
                     if is_worst_point(pt) and isotropy_rank(pt) == 0)
        total = isotropic_count(spec.s, spec.n, spec.p, guard=guards.enum_assignments)
        out.update({"isotropic_global": total, "isotropic_in_chart": cell,
                    "census_isotropic_worst": census, "chart_locality_discount": total - cell})
        checks.append(_check("isotropic_cell_matches_census", cell == census))
    out["checks"] = checks
    return out


def global_counts(q: int) -> dict:
    reps = [grassmannian_report(2, 4, q), grassmannian_report(1, 4, q)]
    lines = isotropic_count(1, 4, q)
    ogr = ogr24_count(q)
    checks = [_check(f"{r.target}_cross_checks", r.ok, count=r.count) for r in reps]
    checks.append(_check("isotropic_lines_all", lines == reps[1].count, count=lines))
    checks.append(_check("OGr(2,4)", ogr == 2 * (q + 1), count=ogr))
    return {"reports": [r.to_json() for r in reps],
            "isotropic_planes_4": isotropic_count(2, 4, q), "checks": checks}


SPEC_TASKS = {
    Task.BUILD: task_build,
    Task.SIMPLIFY_VERIFY: task_simplify,
    Task.FIBERS: task_fibers,
    Task.SPIN: task_spin,
    Task.COUNTS: task_counts_spec,
}


def acceptance_specs(p: int = 3) -> list:
    out = []
    for n in (4, 6):
        for s in (1, 2, 3):
            if s > n // 2:
                continue
            for chart in (1, 2):
                cases = (1,) if (chart == 2 and s == 1) else (1, 2)
                for case in cases:
                    spec = make_spec(p, n, s, chart, case)
                    if spec not in out:
                        out.append(spec)
    return out


def run(config: RunConfig, log=None) -> tuple:
    """Execute the configured tasks. Returns (exit status, report dict)."""
    tasks = list(dict.fromkeys(config.tasks))
    specs = [sm.to_spec() for sm in config.specs]
    if Task.CERTIFY_ALL in tasks:
        tasks = list(SPEC_TASKS)
        if not specs:
            specs = acceptance_specs(config.q or 3)
    results = []
    failed = guarded = False
    for spec in specs:
        entry = {"spec": spec.to_json(), "tasks": {}}
        for task in tasks:
            if task not in SPEC_TASKS:
                continue
            try:
                res = SPEC_TASKS[task](spec, config.guards)
                res["pass"] = all(ch["pass"] for ch in res["checks"])
            except GUARD_ERRORS as exc:
                res = {"pass": False, "guard": str(exc), "checks": []}
                guarded = True
            failed |= not res["pass"] and "guard" not in res
            entry["tasks"][task.value] = res
            if log:
                log(_summary_line(spec, task, res))
        entry["pass"] = all(t["pass"] for t in entry["tasks"].values())
        results.append(entry)
    report = {"specs": results}
    if Task.COUNTS in tasks and not config.specs or Task.CERTIFY_ALL in config.tasks:
        q = config.q or (specs[0].p if specs else 3)
        gc = global_counts(q)
        gc["pass"] = all(ch["pass"] for ch in gc["checks"])
        failed |= not gc["pass"]
        report["counts"] = gc
        if log:
            log(f"counts q={q}: {'PASS' if gc['pass'] else 'FAIL'}")
    if config.outputs.points_csv:
        try:
            n = write_points_csv(config.outputs.points_csv, specs, config.guards)
            if log:
                log(f"wrote {n} points to {config.outputs.points_csv}")
        except GUARD_ERRORS as exc:
            guarded = True
            if log:
                log(f"point dump: GUARD {exc}")
    report["pass"] = not failed and not guarded
    status = EXIT_FAIL if failed else EXIT_GUARD if guarded else EXIT_OK
    return status, report


def write_points_csv(path: str, specs, guards: Guards) -> int:
    """Dump the flat-chart special-fiber points of every spec; returns the row count."""
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["spec", "point", "rank_t_plus_pi", "isotropy_rank"])
        for spec in specs:
            c = build_chart(spec)
            label = ",".join(map(str, (spec.p, spec.n, spec.r, spec.s, spec.chart) + spec.pivots))
            has_q = "Q" in c.named_matrices
            for pt in enumerate_points(c, spec.p, guards.enum_assignments):
                point = " ".join(f"{k}={v}" for k, v in pt.assignment.items())
                w.writerow([label, point, rank_t_plus_pi(pt), isotropy_rank(pt) if has_q else ""])
                rows += 1
    return rows


def _summary_line(spec: ChartSpec, task: Task, res: dict) -> str:
    tag = "PASS" if res["pass"] else ("GUARD" if "guard" in res else "FAIL")
    bad = [ch["name"] for ch in res.get("checks", []) if not ch["pass"]]
    label = f"({spec.p},{spec.n},{spec.r},{spec.s}) chart {spec.chart} pivots {list(spec.pivots)}"
    extra = f" failed: {', '.join(bad)}" if bad else ""
    if "guard" in res:
        extra = f" {res['guard']}"
    return f"{label} {task.value}: {tag}{extra}"


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


COMMANDS = {
    "build-chart": Task.BUILD,
    "verify-simplification": Task.SIMPLIFY_VERIFY,
    "fiber-report": Task.FIBERS,
    "spin-audit": Task.SPIN,
    "point-count": Task.COUNTS,
    "certify": Task.CERTIFY_ALL,
    "run": None,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--spec", action="append", default=[], metavar="p,n,r,s,chart[,pivots]",
                        help="chart spec; pivots follow the chart number (repeatable)")
    common.add_argument("--q", type=int, metavar="PRIME")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--guard-gb", type=int, metavar="N")
    common.add_argument("--guard-enum", type=int, metavar="N")
    common.add_argument("--task", action="append", default=[], metavar="NAME",
                        help="extra task (repeatable): " + ", ".join(t.value for t in Task))
    common.add_argument("--points-csv", metavar="PATH", help="dump enumerated chart points as CSV")
    common.add_argument("--quiet", action="store_true", help="no text summary")
    parser = argparse.ArgumentParser(prog="splitlm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.loads(fh.read())
        except OSError as exc:
            raise ConfigError(f"--config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--config: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("--config: top level must be an object")
    specs = list(data.get("specs", [])) + [parse_spec_flag(s) for s in args.spec]
    tasks = list(data.get("tasks", []))
    cmd_task = COMMANDS[args.command]
    if cmd_task is not None:
        tasks.append(cmd_task.value)
    tasks += args.task
    data["specs"] = specs
    data["tasks"] = list(dict.fromkeys(tasks))
    if args.q is not None:
        data["q"] = args.q
    guards = dict(data.get("guards", {}))
    if args.guard_gb is not None:
        guards["gb_pairs"] = args.guard_gb
    if args.guard_enum is not None:
        guards["enum_assignments"] = args.guard_enum
    data["guards"] = guards
    outputs = dict(data.get("outputs", {}))
    if args.json:
        outputs["json_path"] = args.json
    if args.points_csv:
        outputs["points_csv"] = args.points_csv
    if args.quiet:
        outputs["text"] = False
    data["outputs"] = outputs
    return parse_config(data)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    log = print if config.outputs.text else None
    status, report = run(config, log)
    path = config.outputs.json_path
    if path == "-":
        sys.stdout.write(dumps(report))
    elif path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(report))
    if log:
        log({EXIT_OK: "PASS", EXIT_FAIL: "FAIL", EXIT_GUARD: "GUARD"}[status])
    return status


if __name__ == "__main__":
    sys.exit(main())
