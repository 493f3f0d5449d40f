"""End-to-end verification of one level against the published counts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Any, Callable

from .algebra import build_table, cd_basis_product, verify_subalgebra_nesting
from .incidence import count_pasch, grassmannian, is_binomial, isomorphic, validate_configuration
from .serialize import witness_to_list
from .unit_geometry import GREEK_SYMBOLS, LineClass, extract_configuration, unit_geometry
from .veldkamp import (
    DEFAULT_MAX_POINTS,
    check_nesting,
    classified_hyperplanes,
    composition_census,
    verify_fine_structure,
)

ORD, DEF = LineClass.ORDINARY, LineClass.DEFECTIVE

# Published values per level. Line types are keyed by sorted class labels
# plus the ordinary/defective tag.
PUBLISHED: dict[int, dict[str, Any]] = {
    3: {
        "source": "octonion census",
        "lines": 7,
        "split": (6, 1),
        "classes": {"alpha": (3, (2, 1)), "beta": (4, (3, 0))},
        "members": {"alpha": {3, 5, 6}, "beta": {1, 2, 4, 7}},
        "line_types": {
            (("alpha", "alpha", "alpha"), DEF): 1,
            (("alpha", "beta", "beta"), ORD): 6,
        },
        "params": (6, 2, 4, 3),
        "hyperplanes": {"C_2": 4, "C_1 ⊔ C_1": 3},
        "veldkamp_lines": 7,
        "cells": [(1, 2, -1, 3), (5, 6, 1, 3), (7, 4, 1, 3)],
    },
    4: {
        "source": "sedenion census",
        "lines": 35,
        "split": (25, 10),
        "classes": {"alpha": (10, (4, 3)), "beta": (5, (7, 0))},
        "members": {"alpha": {3, 5, 6, 7, 9, 10, 11, 12, 13, 14}, "beta": {1, 2, 4, 8, 15}},
        "line_types": {
            (("alpha", "alpha", "alpha"), DEF): 10,
            (("alpha", "beta", "beta"), ORD): 10,
            (("alpha", "alpha", "beta"), ORD): 15,
        },
        "params": (10, 3, 10, 3),
        "hyperplanes": {"C_2 ⊔ C_1": 10, "C_3": 5},
        "veldkamp_lines": 35,
        "cells": [(8, 9, -1, 1), (15, 14, 1, 1), (12, 5, 1, 9)],
    },
    5: {
        "source": "32-nion census",
        "lines": 155,
        "split": (90, 65),
        "classes": {"alpha": (10, (6, 9)), "beta": (15, (8, 7)), "gamma": (6, (15, 0))},
        "members": {
            "alpha": {7, 11, 13, 14, 19, 21, 22, 25, 26, 28},
            "beta": {3, 5, 6, 9, 10, 12, 15, 17, 18, 20, 23, 24, 27, 29, 30},
            "gamma": {1, 2, 4, 8, 16, 31},
        },
        "line_types": {
            (("alpha", "alpha", "beta"), DEF): 45,
            (("beta", "beta", "beta"), DEF): 20,
            (("beta", "beta", "beta"), ORD): 15,
            (("alpha", "beta", "gamma"), ORD): 60,
            (("beta", "gamma", "gamma"), ORD): 15,
        },
        "params": (15, 4, 20, 3),
        "hyperplanes": {"C_2 ⊔ C_2": 10, "C_3 ⊔ C_1": 15, "C_4": 6},
        "veldkamp_lines": 155,
        "cells": [(16, 2, 1, 18), (31, 30, -1, 1), (9, 31, -1, 22)],
    },
    6: {
        "source": "64-nion census",
        "lines": 651,
        "split": (301, 350),
        "classes": {"alpha": (35, (10, 21)), "beta": (21, (16, 15)), "gamma": (7, (31, 0))},
        "members": {},
        "line_types": {
            (("alpha", "alpha", "alpha"), DEF): 105,
            (("alpha", "alpha", "beta"), DEF): 210,
            (("beta", "beta", "beta"), DEF): 35,
            (("alpha", "beta", "beta"), ORD): 105,
            (("alpha", "alpha", "gamma"), ORD): 70,
            (("alpha", "beta", "gamma"), ORD): 105,
            (("beta", "gamma", "gamma"), ORD): 21,
        },
        "params": (21, 5, 35, 3),
        "hyperplanes": {"C_3 ⊔ C_2": 35, "C_4 ⊔ C_1": 21, "C_5": 7},
        "veldkamp_lines": 651,
        "cells": [],
    },
}


@dataclass
class CheckRecord:
    name: str
    expected: str
    computed: str
    source: str
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "computed": self.computed,
            "source": self.source,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    level: int
    records: list[CheckRecord] = field(default_factory=list)
    artifacts: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "status": "pass" if self.passed else "fail",
            "records": [r.to_dict() for r in self.records],
            "artifacts": self.artifacts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, sort_keys=False)

    def to_text(self) -> str:
        width = min(max((len(r.name) + len(r.expected) for r in self.records), default=0) + 3, 48)
        out = [f"verification report, level {self.level}"]
        for r in self.records:
            head = f"{r.name} = {r.expected}"
            line = f"{'PASS' if r.passed else 'FAIL'}  {head:<{width}}  [{r.source}]"
            if not r.passed:
                line += f"  computed: {r.computed}"
            out.append(line)
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'} "
                   f"({len(self.records) - len(self.failures())}/{len(self.records)} checks)")
        return "\n".join(out) + "\n"


def fmt_line_type(key: tuple[tuple[str, ...], LineClass]) -> str:
    labels, cls = key
    return "{" + ",".join(GREEK_SYMBOLS.get(x, x) for x in labels) + "} " + cls.value


def fmt_census(census: dict) -> str:
    return ", ".join(f"{k}: {v}" for k, v in census.items())


class _Checker:
    def __init__(self, report: VerificationReport):
        self.report = report

    def check(self, name: str, expected: Any, source: str, compute: Callable[[], Any],
              render: Callable[[Any], str] = str) -> Any:
        try:
            value = compute()
            computed = render(value)
            passed = value == expected
        except Exception as exc:  # a failing stage is a failed record, not a crash
            value, computed, passed = None, f"error: {type(exc).__name__}: {exc}", False
        self.report.records.append(
            CheckRecord(name, render(expected), computed, source, passed)
        )
        return value


def run_verification(level: int, max_points: int = DEFAULT_MAX_POINTS) -> VerificationReport:
    """Run table -> triples -> classes -> C_N -> hyperplanes -> Veldkamp ->
    PG and Grassmannian isomorphisms -> nesting for one level."""
    report = VerificationReport(level)
    chk = _Checker(report).check
    pub = PUBLISHED.get(level, {})
    src = pub.get("source", "generic formula")
    generic = "generic formula"

    table = build_table(level)
    chk("table invariants", [], "unit algebra", table.check_invariants)
    chk(f"A_{level - 1} nested in A_{level}", True, "doubling construction",
        lambda: verify_subalgebra_nesting(table, build_table(level - 1)))
    for a, b, sign, index in pub.get("cells", []):
        unit = "+" if sign > 0 else "-"
        chk(f"e_{a} e_{b}", f"{unit}{index}", src, lambda a=a, b=b: str(cd_basis_product(level, a, b)))

    geo = unit_geometry(level)
    n_lines = (2 ** level - 1) * (2 ** (level - 1) - 1) // 3
    chk("lines", pub.get("lines", n_lines), src if pub else generic, lambda: len(geo.lines))
    if pub:
        census = geo.census()
        chk("ordinary:defective", "%d:%d" % pub["split"], src,
            lambda: f"{census[ORD]}:{census[DEF]}")
        chk("point classes", pub["classes"], src,
            lambda: {lab: (len(m), geo.stratification.class_profile(lab))
                     for lab, m in geo.stratification.classes},
            lambda c: ", ".join(f"{GREEK_SYMBOLS[k]}: {n} x {prof}" for k, (n, prof) in c.items()))
        for label, members in pub["members"].items():
            chk(f"{GREEK_SYMBOLS[label]} points", sorted(members), src,
                lambda label=label: sorted(geo.stratification[label]))
        chk("line types", {fmt_line_type(k): v for k, v in pub["line_types"].items()}, src,
            lambda: {fmt_line_type(k): v for k, v in geo.line_type_census().items()},
            fmt_census)

    conf = extract_configuration(level)
    params = (comb(level + 1, 2), level - 1, comb(level + 1, 3), 3)
    chk(f"C_{level} parameters", pub.get("params", params), src if pub else generic,
        lambda: tuple(vars(validate_configuration(conf)).values()))
    chk(f"C_{level} binomial", True, generic, lambda: is_binomial(conf, level))
    chk("Pasch subconfigurations", comb(level + 1, 4), "Grassmannian count",
        lambda: count_pasch(conf))

    def g2_witness():
        w = isomorphic(conf, grassmannian(level + 1))
        if w is not None:
            report.artifacts["grassmannian_witness"] = witness_to_list(w)
        return "witness" if w is not None else "none"

    chk(f"C_{level} ≅ G_2({level + 1})", "witness", "Grassmannian conjecture", g2_witness)

    hyps = classified_hyperplanes(conf, max_points=max_points)
    census = composition_census(hyps)
    expected_hyps = pub.get("hyperplanes")
    total = 2 ** level - 1

    def fmt_hyp(c):
        return f"{sum(c.values())} (" + "+".join(str(v) for v in sorted(c.values(), reverse=True)) + ")"

    chk("hyperplanes", fmt_hyp(expected_hyps) if expected_hyps else str(total),
        src if pub else generic, lambda: fmt_hyp(census) if expected_hyps else str(len(hyps)))
    if expected_hyps:
        chk("hyperplane compositions", expected_hyps, "hyperplane ledger", lambda: census, fmt_census)
    report.artifacts["hyperplanes"] = [
        {"points": sorted(h.points), "composition": h.composition} for h in hyps
    ]

    fine = None

    def fine_structure():
        nonlocal fine
        fine = verify_fine_structure(level, max_points=max_points, raise_on_mismatch=False)
        return fine

    chk("Veldkamp lines", pub.get("veldkamp_lines", n_lines), src if pub else generic,
        lambda: fine_structure().veldkamp_line_count)
    if fine is not None:
        chk(f"V(C_{level}) ≅ PG({level - 1},2) preserving classes", "witness", "Veldkamp isomorphism",
            lambda: "witness" if fine.ok else "none: " + "; ".join(fine.problems))
        vcensus = {
            fmt_line_type((lt.point_classes, lt.line_class)): lt.veldkamp_count
            for lt in fine.line_types
        }
        chk("Veldkamp line types", {fmt_line_type(k): v for k, v in geo.line_type_census().items()},
            "Veldkamp isomorphism", lambda: vcensus, fmt_census)
        if fine.witness is not None:
            report.artifacts["veldkamp_witness"] = witness_to_list(fine.witness)
        report.artifacts["veldkamp_line_types"] = [
            {
                "hyperplanes": list(lt.hyperplane_types),
                "core": lt.core,
                "point_classes": list(lt.point_classes),
                "line_class": lt.line_class.value,
                "count": lt.veldkamp_count,
            }
            for lt in fine.line_types
        ]

    chk(f"C_{level - 1} hyperplanes of C_{level}", level + 1, "nesting pattern",
        lambda: check_nesting(level, max_points=max_points).count)
    return report
