"""Command-line front end: space catalog, check runs, barrier checks and
plot-data emission.

Exit status of ``run``: 0 all pass, 1 any fail, 2 any inconclusive (none
fail), 3 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import jsonschema
from referencing import Registry, Resource

from .conditions import CONDITION_IDS, run_condition
from .modelspace import DomainError
from .reporting import CheckConfig, CheckReport, ConfigError, combine_verdicts
from .spaces import _ANALYTIC, CATALOG, SpaceSpecError, build_space, point_from_json
from .supportsense import SampledFunction, sturm_ratio_check, verify_barrier

__all__ = ["RunManifest", "load_manifest", "run", "emit_plot_data", "main", "EXIT"]

EXIT = {"pass": 0, "fail": 1, "inconclusive": 2, "config": 3}
CSV_HEADER = ("scale", "value", "bound")


# ---------------------------------------------------------------- manifest


def _schema(name: str) -> dict:
    return json.loads(resources.files("comparison_lab").joinpath("schemas", name).read_text())


def _validator() -> jsonschema.Draft202012Validator:
    space = _schema("space.schema.json")
    registry = Registry().with_resource(space["$id"], Resource.from_contents(space)).with_resource(
        "space.schema.json", Resource.from_contents(space))
    return jsonschema.Draft202012Validator(_schema("manifest.schema.json"), registry=registry)


@dataclass
class RunManifest:
    """Spaces, condition ids, check configuration, output directory and seed."""

    spaces: list
    conditions: list
    config: CheckConfig = field(default_factory=CheckConfig)
    out: Optional[str] = None
    triples: Optional[list] = None

    @property
    def seed(self) -> int:
        return self.config.seed

    def to_json(self) -> dict:
        d = {"spaces": self.spaces, "conditions": self.conditions, "config": self.config.to_json()}
        if self.triples is not None:
            d["triples"] = self.triples
        return d


def manifest_from_dict(data: dict) -> RunManifest:
    """Validate a manifest document; schema and semantic errors raise ConfigError."""
    errors = sorted(_validator().iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"manifest invalid at {where}: {e.message}")
    spaces = data["spaces"] if "spaces" in data else [data["space"]]
    cfg = dict(data.get("config", {}))
    if "seed" in data:
        if "seed" in cfg and cfg["seed"] != data["seed"]:
            raise ConfigError("conflicting seeds in manifest and config")
        cfg["seed"] = data["seed"]
    if cfg.get("scales") is not None:
        cfg["scales"] = tuple(cfg["scales"])
    config = CheckConfig(**cfg)
    for spec in spaces:
        build_space(spec)
    return RunManifest(spaces, list(data["conditions"]), config, data.get("out"), data.get("triples"))


def load_manifest(path) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None
    return manifest_from_dict(data)


# ---------------------------------------------------------------- running


def _label(spec: dict) -> str:
    if spec["kind"] == "double":
        return "double-" + _label(spec["base"])
    params = spec.get("params", {})
    parts = [spec["kind"]] + [f"{k}{params[k]:.6g}" for k in sorted(params)
                               if isinstance(params[k], (int, float)) and not isinstance(params[k], bool)]
    return re.sub(r"[^A-Za-z0-9_.+-]", "_", "_".join(parts))


def _report_doc(report: CheckReport, spec: dict, seed: int) -> dict:
    doc = report.to_json()
    doc["space"] = spec
    doc["seed"] = seed
    return doc


def emit_plot_data(report: CheckReport, out_dir, prefix: str) -> list:
    """Write one CSV per curve, plus the witness table, with columns
    (scale, value, bound). Rows keep the report's order."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    tables = {name: rows for name, rows in sorted(report.curves.items())}
    tables["witnesses"] = [(w.scale, w.lhs, w.rhs) for w in report.witnesses]
    for name, rows in tables.items():
        path = out_dir / f"{prefix}__{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for row in rows:
                w.writerow(["" if v is None else repr(float(v)) for v in row[:3]])
        written.append(path)
    return written


def run(manifest: RunManifest, out_dir=None, jobs: int = 1, stream=None) -> int:
    """Execute every (space, condition) pair; write JSON reports and CSV
    curves under ``out_dir``; return the exit status."""
    out_dir = out_dir or manifest.out
    stream = stream or sys.stdout
    jobs_list = [(spec, cond) for spec in manifest.spaces for cond in manifest.conditions]

    def one(item):
        spec, cond = item
        space = build_space(spec)
        triples = None
        if manifest.triples is not None:
            triples = [tuple(point_from_json(x) for x in t) for t in manifest.triples]
        return run_condition(space, cond, manifest.config, triples)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(one, jobs_list))
    else:
        reports = [one(item) for item in jobs_list]

    verdicts = []
    for (spec, cond), report in zip(jobs_list, reports):
        prefix = f"{_label(spec)}__{cond}"
        verdicts.append(report.verdict)
        print(f"{prefix}: {report.verdict} (worst margin {report.worst_margin})", file=stream)
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            text = json.dumps(_report_doc(report, spec, manifest.seed), sort_keys=True, indent=2)
            (out / f"{prefix}.json").write_text(text + "\n")
            emit_plot_data(report, out, prefix)
    return EXIT[combine_verdicts(verdicts)]


# ---------------------------------------------------------------- argument handling


def _space_arg(value: str) -> dict:
    """A space spec file, inline JSON, or a bare catalog kind with defaults."""
    if value.lstrip().startswith("{"):
        return json.loads(value)
    path = Path(value)
    if path.exists():
        return json.loads(path.read_text())
    if value in CATALOG:
        return {"kind": value}
    raise ConfigError(f"--space {value!r} is neither a file, inline JSON nor a catalog kind")


def _manifest_from_args(args) -> RunManifest:
    """Flags override the manifest's config; without a manifest they build one."""
    if args.manifest:
        try:
            data = json.loads(Path(args.manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read manifest {args.manifest}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("manifest must be a JSON object")
        if args.space:
            data.pop("space", None)
            data["spaces"] = [_space_arg(s) for s in args.space]
        if args.condition:
            data["conditions"] = args.condition
    else:
        if not args.space or not args.condition:
            raise ConfigError("run needs --manifest or both --space and --condition")
        data = {"spaces": [_space_arg(s) for s in args.space], "conditions": args.condition}
    cfg = dict(data.get("config", {}))
    for k in ("kappa", "direction", "epsilon", "delta", "samples", "seed", "t_max", "sweep", "tol"):
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if args.scales is not None:
        cfg["n_scales"] = args.scales
    if args.seed is not None:
        data.pop("seed", None)
    data["config"] = cfg
    return manifest_from_dict(data)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    d = CheckConfig()
    p.add_argument("--kappa", type=float, help=f"curvature bound (default {d.kappa})")
    p.add_argument("--direction", choices=("lower", "upper"), help=f"bound direction (default {d.direction})")
    p.add_argument("--epsilon", type=float, help=f"uniformity tolerance (default {d.epsilon})")
    p.add_argument("--delta", type=float, help="uniformity radius (default: scanned)")
    p.add_argument("--scales", type=int, metavar="J", help=f"ladder depth (default {d.n_scales})")
    p.add_argument("--samples", type=int, metavar="N", help=f"sampled triples (default {d.samples})")
    p.add_argument("--seed", type=int, metavar="S", help=f"sampling seed (default {d.seed})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="comparison-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run comparison checks")
    p_run.add_argument("--manifest", help="run manifest (JSON)")
    p_run.add_argument("--space", action="append", help="space spec file, inline JSON or catalog kind")
    p_run.add_argument("--condition", action="append", choices=CONDITION_IDS, metavar="ID",
                       help="condition id (repeatable): " + ", ".join(CONDITION_IDS))
    _add_config_flags(p_run)
    p_run.add_argument("--t-max", dest="t_max", type=float, help="largest ladder scale (default: geodesic length)")
    p_run.add_argument("--sweep", type=int, help="equispaced sweep points per geodesic")
    p_run.add_argument("--tol", type=float, help="numeric slack")
    p_run.add_argument("--out", help="output directory for JSON reports and CSV curves")
    p_run.add_argument("--jobs", type=int, default=1, help="checks run concurrently")

    sub.add_parser("catalog", help="list space kinds and default parameters")

    for name, hlp in (("barrier", "barrier comparison on a sampled function"),
                      ("sturm", "Sturm-ratio pathway on a sampled function")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("csv", help="CSV with columns t, f and an optional exceptional marker")
        p.add_argument("--kappa", type=float, default=0.0)
        if name == "barrier":
            p.add_argument("--direction", choices=("lower", "upper"), default="lower")
        p.add_argument("--out", help="write the JSON report here")
    return parser


def _finish_single(report: CheckReport, out: Optional[str]) -> int:
    text = report.dumps()
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)
    return EXIT[report.verdict]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT["config"] if exc.code not in (0, None) else 0
    config_errors = (ConfigError, SpaceSpecError, DomainError, ValueError, TypeError, OSError)
    try:
        if args.command == "catalog":
            for kind in CATALOG:
                params = _ANALYTIC[kind][1] if kind in _ANALYTIC else {}
                print(kind, json.dumps(params, sort_keys=True))
            return 0
        if args.command == "run":
            manifest = _manifest_from_args(args)
        else:
            f = SampledFunction.from_csv(args.csv)
    except config_errors as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["config"]
    if args.command == "run":
        return run(manifest, args.out, jobs=args.jobs)
    if args.command == "barrier":
        return _finish_single(verify_barrier(f, args.kappa, args.direction), args.out)
    return _finish_single(sturm_ratio_check(f, args.kappa), args.out)


if __name__ == "__main__":
    sys.exit(main())
