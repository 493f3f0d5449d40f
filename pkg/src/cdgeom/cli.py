"""Command-line interface: ``cdgeom <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from math import comb
from pathlib import Path

from . import serialize
from .algebra import LevelBoundError, build_table
from .incidence import IncidenceStructure, grassmannian, isomorphic, validate_configuration
from .report import fmt_census, fmt_line_type, run_verification
from .unit_geometry import (
    GREEK_SYMBOLS,
    LineClass,
    build_pg_model,
    classify_line,
    extract_configuration,
    unit_geometry,
)
from .veldkamp import (
    DEFAULT_MAX_POINTS,
    classified_hyperplanes,
    composition_census,
    verify_fine_structure,
    veldkamp_lines,
)

TABLE_MAX_LEVEL = 10
PIPELINE_MAX_LEVEL = 6
LONG_RUN_MAX_LEVEL = 7

FORMATS = {
    "table": ("csv", "json", "text"),
    "geometry": ("json", "text", "dot"),
    "configuration": ("json", "text", "dot"),
    "hyperplanes": ("json", "text"),
    "veldkamp": ("json", "text", "dot"),
    "grassmannian": ("json", "text", "dot"),
    "verify": ("text", "json"),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    level: int
    fmt: str
    max_level: int
    max_points: int
    output: Path | None = None
    long_run: bool = False
    seed: int | None = None

    def validate(self) -> None:
        if self.max_level <= 0 or self.max_points <= 0:
            raise UsageError("resource bounds must be positive")
        if self.fmt not in FORMATS[self.command]:
            raise UsageError(
                f"format {self.fmt!r} not available for {self.command}; "
                f"choose from {', '.join(FORMATS[self.command])}"
            )
        if self.level < 0:
            raise UsageError("level must be non-negative")
        if self.command == "table":
            if self.level > self.max_level:
                raise UsageError(f"level {self.level} exceeds table bound {self.max_level}")
            return
        if self.command == "grassmannian":
            return
        low = {"geometry": 2, "configuration": 1, "hyperplanes": 1, "veldkamp": 3, "verify": 3}[self.command]
        high = LONG_RUN_MAX_LEVEL if self.long_run else min(self.max_level, PIPELINE_MAX_LEVEL)
        if self.command == "geometry":
            high = self.max_level
        if not low <= self.level <= high:
            hint = " (level 7 needs --long-run)" if self.level == LONG_RUN_MAX_LEVEL else ""
            raise UsageError(f"{self.command} needs {low} <= level <= {high}{hint}")


def _classes_of(level: int, points=None) -> dict[str, list[int]]:
    strat = unit_geometry(level).stratification
    keep = set(points) if points is not None else None
    out = {}
    for label, members in strat.classes:
        chosen = sorted(m for m in members if keep is None or m in keep)
        if chosen:
            out[label] = chosen
    return out


def cmd_table(cfg: RunConfig) -> str:
    table = build_table(cfg.level, max_level=cfg.max_level)
    if cfg.fmt == "csv":
        return serialize.table_to_csv(table)
    if cfg.fmt == "json":
        return serialize.table_to_json(table) + "\n"
    n = table.size
    width = max(3, len(str(n - 1)) + 2)
    rows = ["*".rjust(width) + "".join(str(b).rjust(width) for b in range(n))]
    for a in range(n):
        rows.append(str(a).rjust(width) + "".join(str(table[a, b]).rjust(width) for b in range(n)))
    return "\n".join(rows) + "\n"


def cmd_geometry(cfg: RunConfig) -> str:
    geo = unit_geometry(cfg.level, max_level=max(cfg.max_level, cfg.level))
    strat = geo.stratification
    if cfg.fmt == "json":
        doc = {
            "level": cfg.level,
            "points": list(range(1, 2 ** cfg.level)),
            "lines": [list(ln) for ln in geo.lines],
            "line_classes": [classify_line(ln).value for ln in geo.lines],
            "classes": _classes_of(cfg.level),
            "profiles": {
                label: dict(zip(("ordinary", "defective"), strat.class_profile(label)))
                for label in strat.labels()
            },
            "line_types": [
                {"points": list(k[0]), "line_class": k[1].value, "count": v}
                for k, v in geo.line_type_census().items()
            ],
        }
        return json.dumps(doc, ensure_ascii=False) + "\n"
    if cfg.fmt == "dot":
        pg = build_pg_model(cfg.level)
        tags = {frozenset(ln): classify_line(ln).value for ln in geo.lines}
        return serialize.levi_dot(pg, tags, name=f"pg_{cfg.level - 1}_2")
    census = geo.census()
    out = [
        f"level {cfg.level}: {len(geo.lines)} lines, "
        f"{census[LineClass.ORDINARY]} ordinary / {census[LineClass.DEFECTIVE]} defective"
    ]
    for label, members in strat.classes:
        o, d = strat.class_profile(label)
        out.append(f"  {GREEK_SYMBOLS[label]} ({len(members)} points, {o} ordinary + {d} defective lines each): "
                   + "{" + ",".join(map(str, sorted(members))) + "}")
    out.append("line types:")
    for key, count in geo.line_type_census().items():
        out.append(f"  {fmt_line_type(key)}: {count}")
    out.append("lines:")
    for ln in geo.lines:
        out.append(f"  {{{ln.a},{ln.b},{ln.c}}} {classify_line(ln).value}")
    return "\n".join(out) + "\n"


def cmd_configuration(cfg: RunConfig) -> str:
    conf = extract_configuration(cfg.level)
    params = validate_configuration(conf)
    if cfg.fmt == "json":
        doc = serialize.structure_to_dict(conf, _classes_of(cfg.level, conf.points) if cfg.level >= 2 else None)
        doc["level"] = cfg.level
        doc["parameters"] = {"v": params.v, "r": params.r, "b": params.b, "k": params.k}
        return json.dumps(doc, ensure_ascii=False) + "\n"
    if cfg.fmt == "dot":
        return serialize.levi_dot(conf, name=f"C_{cfg.level}")
    out = [f"C_{cfg.level}: {params} configuration"]
    out += ["  {" + ",".join(map(str, ln)) + "}" for ln in conf.lines]
    if not conf.lines:
        out.append("  points: " + ",".join(map(str, conf.points)))
    return "\n".join(out) + "\n"


def cmd_hyperplanes(cfg: RunConfig) -> str:
    conf = extract_configuration(cfg.level)
    hyps = classified_hyperplanes(conf, max_points=cfg.max_points)
    census = composition_census(hyps)
    if cfg.fmt == "json":
        doc = {
            "level": cfg.level,
            "count": len(hyps),
            "census": census,
            "hyperplanes": [{"points": sorted(h.points), "composition": h.composition} for h in hyps],
        }
        return json.dumps(doc, ensure_ascii=False) + "\n"
    out = [f"C_{cfg.level}: {len(hyps)} geometric hyperplanes ({fmt_census(census)})"]
    for h in hyps:
        out.append(f"  {h.composition:<12} {{{','.join(map(str, sorted(h.points)))}}}")
    return "\n".join(out) + "\n"


def cmd_veldkamp(cfg: RunConfig) -> str:
    report = verify_fine_structure(cfg.level, max_points=cfg.max_points, raise_on_mismatch=False)
    if cfg.fmt == "dot":
        conf = extract_configuration(cfg.level)
        hyps = classified_hyperplanes(conf, max_points=cfg.max_points)
        vls = veldkamp_lines(conf, hyps)
        space = IncidenceStructure([h.points for h in hyps], [vl.members for vl in vls])
        return serialize.levi_dot(space, name=f"V_C_{cfg.level}")
    if cfg.fmt == "json":
        doc = {
            "level": cfg.level,
            "status": "pass" if report.ok else "fail",
            "hyperplane_census": report.hyperplane_census,
            "class_of_composition": report.class_of_composition,
            "veldkamp_lines": report.veldkamp_line_count,
            "line_types": [
                {
                    "hyperplanes": list(lt.hyperplane_types),
                    "core": lt.core,
                    "point_classes": list(lt.point_classes),
                    "line_class": lt.line_class.value,
                    "veldkamp_count": lt.veldkamp_count,
                    "pg_count": lt.pg_count,
                }
                for lt in report.line_types
            ],
            "witness": serialize.witness_to_list(report.witness) if report.witness else None,
            "problems": report.problems,
        }
        return json.dumps(doc, ensure_ascii=False) + "\n"
    out = [f"V(C_{cfg.level}): {sum(report.hyperplane_census.values())} points, "
           f"{report.veldkamp_line_count} lines; PG({cfg.level - 1},2) has {report.pg_line_count} lines"]
    for comp, label in report.class_of_composition.items():
        out.append(f"  {comp:<12} x{report.hyperplane_census[comp]:<4} <-> {GREEK_SYMBOLS[label]}-points")
    for lt in report.line_types:
        out.append(
            f"  {' + '.join(lt.hyperplane_types):<36} core {lt.core:<20} "
            f"{fmt_line_type((lt.point_classes, lt.line_class)):<22} {lt.veldkamp_count}"
        )
    out.append("isomorphism: " + ("found" if report.witness else "NOT FOUND"))
    out += [f"problem: {p}" for p in report.problems]
    return "\n".join(out) + "\n"


def cmd_grassmannian(cfg: RunConfig) -> str:
    m = cfg.level
    g = grassmannian(m)
    if cfg.fmt == "json":
        doc = serialize.structure_to_dict(g)
        doc["m"] = m
        return json.dumps(doc) + "\n"
    if cfg.fmt == "dot":
        return serialize.levi_dot(g, name=f"G_2_{m}")
    params = validate_configuration(g)
    out = [f"G_2({m}): {params} configuration, {comb(m, 4)} Pasch subconfigurations"]
    n = m - 1
    if 1 <= n <= PIPELINE_MAX_LEVEL:
        w = isomorphic(extract_configuration(n), g)
        out.append(f"C_{n} ≅ G_2({m}): " + ("yes" if w else "no"))
        if w:
            out += [f"  {a} -> {b}" for a, b in w.pairs()]
    return "\n".join(out) + "\n"


def cmd_verify(cfg: RunConfig):
    report = run_verification(cfg.level, max_points=cfg.max_points)
    text = report.to_json() + "\n" if cfg.fmt == "json" else report.to_text()
    return text, report.passed


COMMANDS = {
    "table": cmd_table,
    "geometry": cmd_geometry,
    "configuration": cmd_configuration,
    "hyperplanes": cmd_hyperplanes,
    "veldkamp": cmd_veldkamp,
    "grassmannian": cmd_grassmannian,
    "verify": cmd_verify,
}

HELP = {
    "table": "multiplication table of the level-N algebra",
    "geometry": "unit triples, ordinary/defective lines and point classes",
    "configuration": "the configuration C_N",
    "hyperplanes": "geometric hyperplanes of C_N with composition labels",
    "veldkamp": "Veldkamp space of C_N matched against PG(N-1,2)",
    "grassmannian": "combinatorial Grassmannian G_2(m)",
    "verify": "run the full pipeline and report every published count",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdgeom", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fmts in FORMATS.items():
        p = sub.add_parser(name, help=HELP[name])
        if name == "grassmannian":
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("-m", type=int, dest="m", help="ground set size")
            group.add_argument("--level", "-n", type=int, help="level N; builds G_2(N+1)")
        else:
            p.add_argument("--level", "-n", type=int, required=True, help="algebra level N")
        p.add_argument("--format", "-f", choices=fmts, default=fmts[0], dest="fmt")
        p.add_argument("--output", "-o", type=Path, help="write to file instead of stdout")
        p.add_argument("--max-level", type=int, default=TABLE_MAX_LEVEL,
                       help=f"largest level accepted (default {TABLE_MAX_LEVEL})")
        p.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS,
                       help=f"largest configuration for hyperplane search (default {DEFAULT_MAX_POINTS})")
        p.add_argument("--long-run", action="store_true", help="allow level 7 pipelines")
        p.add_argument("--seed", type=int, help="reserved; all computation is deterministic")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    level = args.level
    if args.command == "grassmannian":
        level = args.m if args.m is not None else args.level + 1
    return RunConfig(
        command=args.command,
        level=level,
        fmt=args.fmt,
        max_level=args.max_level,
        max_points=args.max_points,
        output=args.output,
        long_run=args.long_run,
        seed=args.seed,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        cfg.validate()
        result = COMMANDS[cfg.command](cfg)
    except (UsageError, LevelBoundError, ValueError) as exc:
        print(f"cdgeom: error: {exc}", file=sys.stderr)
        return 2
    ok = True
    if isinstance(result, tuple):
        result, ok = result
    if cfg.output is not None:
        try:
            cfg.output.write_text(result, encoding="utf-8")
        except OSError as exc:
            print(f"cdgeom: cannot write {cfg.output}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(result)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
