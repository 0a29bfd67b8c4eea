"""Command-line front end.

Human-readable tables go to stdout; ``--json PATH`` writes the report as
JSON (``--json -`` prints it instead of the table).  Errors are printed to
stderr as JSON and mapped to exit codes: 2 parse, 3 validation,
4 perversity or stratum problems, 5 internal.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import constructors, corpus, errors
from .chain_builder import (
    admissibility_table,
    build_presentation,
    build_relative_complex,
    funest_report,
    grandes_strates,
)
from .complex_core import FilteredComplex, build_complex, check_normal, check_pseudomanifold
from .homology_engine import homology
from .invariance import check_refinement, equivalence_refutation, invariance_report
from .perversity import (
    EquivalenceDeclaration,
    Perversity,
    check_K_perversity,
    classical_spec_from_dict,
    classify,
    equivalence_from_dict,
    perversity_from_dict,
    zero_perversity,
)
from .rings import ZZ, parse_ring


# -- input ----------------------------------------------------------------


def _read_json(path: str, kind: str) -> dict:
    """Read a JSON file; unknown paths fall back to the builtin of the same name."""
    p = Path(path)
    if p.is_file():
        try:
            return json.loads(p.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise errors.ParseError(f"{path}: {exc}") from None
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in corpus.names(kind):
        return corpus.raw(kind, stem)
    raise errors.ParseError(f"cannot read {path!r} (no such file or builtin)")


def load_complex(path: str) -> FilteredComplex:
    return build_complex(_read_json(path, "complexes"))


def load_construction_input(path: str, what: str) -> FilteredComplex:
    """Like :func:`load_complex`, but an input without vertices is reported as empty."""
    raw = _read_json(path, "complexes")
    if isinstance(raw, dict) and not raw.get("vertices") and not raw.get("simplices"):
        raise errors.EmptyInput(f"{what} of an empty complex")
    return build_complex(raw)


def load_perversity(path: str | None, X: FilteredComplex) -> Perversity:
    if path is None:
        return zero_perversity(X)
    return perversity_from_dict(X, _read_json(path, "perversities"))


def load_equivalence(path: str | None) -> EquivalenceDeclaration:
    if path is None:
        return EquivalenceDeclaration()
    return equivalence_from_dict(_read_json(path, "equivalences"))


def _rings(specs: Sequence[str] | None):
    out = []
    for spec in specs or ["z"]:
        out += [parse_ring(part) for part in spec.split(",") if part]
    return out


# -- output ---------------------------------------------------------------


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(args, report: dict, table: Callable[[dict], str]) -> None:
    target = getattr(args, "json", None)
    if target == "-":
        sys.stdout.write(dumps(report))
        return
    sys.stdout.write(table(report))
    if target:
        Path(target).write_text(dumps(report), encoding="utf-8")


def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, headers))] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _group_text(g: dict, ring: str) -> str:
    if not g["free_rank"] and not g["torsion"]:
        return "0"
    parts = []
    if g["free_rank"]:
        parts.append(ring if g["free_rank"] == 1 else f"{ring}^{g['free_rank']}")
    parts += [f"Z/{d}" for d in g["torsion"]]
    return " + ".join(parts)


# -- commands -------------------------------------------------------------


def cmd_validate(args) -> int:
    X = load_complex(args.complex)
    strata = X.strata
    report = {
        "name": X.name,
        "formal_dim": X.formal_dim,
        "dim": X.dim,
        "vertices": len(X.levels),
        "simplices": len(X.simplices),
        "strata": [
            {
                "id": s.id,
                "level": s.level,
                "codim": s.codim,
                "regular": s.regular,
                "depth": strata.depth[s.id],
                "vertices": list(s.vertices),
            }
            for s in strata
        ],
        "order": [list(p) for p in strata.order_pairs()],
        "pseudomanifold": check_pseudomanifold(X).is_pm,
        "normal": check_normal(X).is_normal,
    }

    def table(r):
        head = f"{r['name']}: formal_dim {r['formal_dim']}, {r['vertices']} vertices, {r['simplices']} simplices\n"
        rows = [(s["id"], s["level"], s["codim"], "yes" if s["regular"] else "no", s["depth"]) for s in r["strata"]]
        order = "".join(f"{a} < {b}\n" for a, b in r["order"])
        return head + _table(["stratum", "level", "codim", "regular", "depth"], rows) + order

    _emit(args, report, table)
    return 0


def cmd_homology(args) -> int:
    X = load_complex(args.complex)
    ring = parse_ring(args.ring)
    if args.ordinary:
        variant, p = "ordinary", None
    else:
        variant = "tame" if args.tame else "intersection"
        p = load_perversity(args.perversity, X)
    if args.relative:
        L = load_complex(args.relative)
        P = build_relative_complex(X, L, p, ring, variant)
    else:
        P = build_presentation(X, p, ring, variant)
    groups = homology(P, reduced=args.reduced)
    report = {
        "complex": X.name,
        "variant": P.variant,
        "ring": ring.name,
        "reduced": args.reduced,
        "perversity": None if p is None else p.to_dict(),
        "homology": {str(k): g.as_dict() for k, g in enumerate(groups)},
    }

    def table(r):
        rows = [(k, _group_text(g, r["ring"])) for k, g in sorted(r["homology"].items(), key=lambda kv: int(kv[0]))]
        return f"{r['complex']} ({r['variant']}, {r['ring']})\n" + _table(["degree", "group"], rows)

    _emit(args, report, table)
    return 0


def _write_complex(args, X: FilteredComplex) -> int:
    data = X.to_dict()
    if args.output:
        Path(args.output).write_text(dumps(data), encoding="utf-8")
    else:
        sys.stdout.write(dumps(data))
    return 0


def cmd_cone(args) -> int:
    return _write_complex(args, constructors.cone(load_construction_input(args.complex, "cone")))


def cmd_suspend(args) -> int:
    return _write_complex(args, constructors.suspension(load_construction_input(args.complex, "suspension")))


def cmd_sd(args) -> int:
    X = load_construction_input(args.complex, "subdivision")
    return _write_complex(args, constructors.barycentric_subdivide(X, args.times))


def cmd_prod_i(args) -> int:
    X = load_construction_input(args.complex, "product")
    return _write_complex(args, constructors.product_interval(X, args.m))


def cmd_prod_s1(args) -> int:
    X = load_construction_input(args.complex, "product")
    return _write_complex(args, constructors.product_circle(X, args.m))


def cmd_union(args) -> int:
    first = load_construction_input(args.first, "union")
    second = load_construction_input(args.second, "union")
    return _write_complex(args, constructors.disjoint_union(first, second))


def cmd_check(args) -> int:
    X = load_complex(args.complex)
    raw = _read_json(args.perversity, "perversities")
    p = perversity_from_dict(X, raw)
    report: dict = {"complex": X.name, "class": args.cls, "perversity": p.to_dict()}
    if args.cls in ("king", "gm"):
        spec = classical_spec_from_dict(raw)
        c = classify(spec if spec is not None else p, X)
        report["classification"] = c.as_dict()
        report["passed"] = c.is_king if args.cls == "king" else c.is_gm
        report["failed"] = [] if report["passed"] else ["growth" if args.cls == "king" else "gm"]
    else:
        k = check_K_perversity(X, p, load_equivalence(args.equiv))
        report.update(k.as_dict())
        report["failed"] = k.failed()

    def table(r):
        verdict = "pass" if r["passed"] else "fail(" + ",".join(r["failed"]) + ")"
        return f"{r['complex']}: {r['class']} check: {verdict}\n"

    _emit(args, report, table)
    return 0


def cmd_invariance(args) -> int:
    fine, coarse = load_complex(args.fine), load_complex(args.coarse)
    pair = check_refinement(fine, coarse)
    p_coarse = load_perversity(args.perversity, coarse)
    override = None
    if args.fine_perversity:
        raw = _read_json(args.fine_perversity, "perversities")
        override = dict(raw.get("values", {})) if raw.get("kind", "general") == "general" else perversity_from_dict(fine, raw)
    equiv = load_equivalence(args.equiv) if args.equiv else None
    variants = ("tame",) if args.tame else ("intersection",)
    rep = invariance_report(pair, p_coarse, _rings(args.ring), variants, override, equiv)
    report = rep.as_dict()

    def table(r):
        rows = []
        for comp in r["comparisons"]:
            for d in comp["degrees"]:
                rows.append(
                    (comp["ring"], comp["variant"], d["degree"], _group_text(d["fine"], comp["ring"]),
                     _group_text(d["coarse"], comp["ring"]), d["verdict"])
                )
        failed = [name for name, h in r["hypotheses"].items() if not h["passed"]]
        tail = f"hypotheses failing: {', '.join(failed) if failed else 'none'}\nverdict: {r['verdict']}\n"
        return _table(["ring", "variant", "degree", "fine", "coarse", "verdict"], rows) + tail

    _emit(args, report, table)
    return 0


def cmd_diagnose(args) -> int:
    X = load_complex(args.complex)
    p = load_perversity(args.perversity, X)
    wanted = {k for k in ("funest", "grandes_strates", "defects") if getattr(args, k)} or {"funest", "grandes_strates", "defects"}
    report: dict = {"complex": X.name, "perversity": p.to_dict()}
    admissible = sorted(s for s, ok in admissibility_table(X, p).items() if ok)
    reports = [funest_report(X, s, p) for s in admissible]
    if "funest" in wanted:
        report["funest"] = [r.as_dict() for r in reports if r.defect]
    if "defects" in wanted:
        report["defects"] = [{"simplex": list(r.simplex), "defect": r.defect} for r in reports]
    if "grandes_strates" in wanted:
        large = grandes_strates(X, p)
        report["grandes_strates"] = {
            "strata": sorted(s.id for s in X.strata.singular() if p[s.id] > s.codim - 2),
            "vertices": sorted(large.levels),
            "simplices": [list(s) for s in large.maximal_simplices],
        }

    def table(r):
        out = ""
        if "funest" in r:
            rows = [(" ".join(f["simplex"]), " ".join(f["funest_face"]), f["guilty_stratum"], f["defect"]) for f in r["funest"]]
            out += _table(["simplex", "funest face", "stratum", "defect"], rows)
        if "defects" in r:
            hist: dict[int, int] = {}
            for d in r["defects"]:
                hist[d["defect"]] = hist.get(d["defect"], 0) + 1
            out += "defects: " + ", ".join(f"{k}: {v}" for k, v in sorted(hist.items())) + "\n"
        if "grandes_strates" in r:
            g = r["grandes_strates"]
            out += "large strata: " + ("{" + ", ".join(g["strata"]) + "}" if g["strata"] else "∅") + "\n"
        return out

    _emit(args, report, table)
    return 0


def cmd_refute(args) -> int:
    X = load_complex(args.complex)
    report = {"complex": X.name, "strata": [args.first, args.second], **equivalence_refutation(X, args.first, args.second).as_dict()}
    _emit(args, report, lambda r: f"{r['strata'][0]} ~ {r['strata'][1]}: {r['verdict']}\n")
    return 0


def cmd_corpus(args) -> int:
    if args.action == "list":
        report = {kind: corpus.names(kind) for kind in corpus.KINDS}
        _emit(args, report, lambda r: "".join(f"{k}: {' '.join(v)}\n" for k, v in r.items()))
        return 0
    if args.action == "show":
        if not args.name:
            raise errors.ParseError("corpus show needs a name")
        kind = next((k for k in corpus.KINDS if args.name in corpus.names(k)), "complexes")
        sys.stdout.write(dumps(corpus.raw(kind, args.name)))
        return 0
    out = Path(args.name or "corpus")
    for kind in corpus.KINDS:
        folder = out / kind
        folder.mkdir(parents=True, exist_ok=True)
        for name in corpus.names(kind):
            (folder / f"{name}.json").write_text(dumps(corpus.raw(kind, name)), encoding="utf-8")
    return 0


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ihcalc", description="Intersection homology of filtered simplicial complexes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, json_out=True):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        if json_out:
            sp.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
        return sp

    sp = add("validate", cmd_validate, "parse a complex and list its strata")
    sp.add_argument("complex")

    sp = add("homology", cmd_homology, "intersection, tame or ordinary homology")
    sp.add_argument("complex")
    sp.add_argument("-p", "--perversity", help="perversity file (default: zero perversity)")
    sp.add_argument("--ring", default="z", help="z, q or f<p> (default z)")
    sp.add_argument("--tame", action="store_true", help="tame intersection homology")
    sp.add_argument("--ordinary", action="store_true", help="ordinary simplicial homology")
    sp.add_argument("--relative", metavar="SUB", help="full subcomplex to quotient by")
    sp.add_argument("--reduced", action="store_true")

    for name, func, help_text in (
        ("cone", cmd_cone, "closed cone"),
        ("suspend", cmd_suspend, "suspension"),
        ("sd", cmd_sd, "barycentric subdivision"),
        ("prod-i", cmd_prod_i, "product with an interval"),
        ("prod-s1", cmd_prod_s1, "product with a circle"),
    ):
        sp = add(name, func, help_text, json_out=False)
        sp.add_argument("complex")
        sp.add_argument("-o", "--output", help="output file (default stdout)")
        if name == "sd":
            sp.add_argument("--times", type=int, default=1)
        if name == "prod-i":
            sp.add_argument("--m", type=int, default=1, help="number of interval subdivisions")
        if name == "prod-s1":
            sp.add_argument("--m", type=int, default=3, help="number of circle vertices")
    sp = add("union", cmd_union, "disjoint union", json_out=False)
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("-o", "--output")

    sp = add("check", cmd_check, "perversity class checks")
    sp.add_argument("complex")
    sp.add_argument("-p", "--perversity", required=True)
    sp.add_argument("--class", dest="cls", choices=["king", "gm", "k"], required=True)
    sp.add_argument("--equiv", help="equivalence declaration file (for --class k)")

    sp = add("invariance", cmd_invariance, "compare a refinement pair")
    sp.add_argument("fine")
    sp.add_argument("coarse")
    sp.add_argument("-p", "--perversity", help="perversity on the coarse complex (default zero)")
    sp.add_argument("--fine-perversity", help="override values of the pulled-back fine perversity")
    sp.add_argument("--equiv", help="extra equivalences on the fine complex")
    sp.add_argument("--tame", action="store_true")
    sp.add_argument("--ring", action="append", help="ring(s), repeatable or comma separated (default z)")

    sp = add("diagnose", cmd_diagnose, "funest faces, defects and large strata")
    sp.add_argument("complex")
    sp.add_argument("-p", "--perversity")
    sp.add_argument("--funest", action="store_true")
    sp.add_argument("--grandes-strates", dest="grandes_strates", action="store_true")
    sp.add_argument("--defects", action="store_true")

    sp = add("refute", cmd_refute, "try to refute an equivalence of two strata by local homology")
    sp.add_argument("complex")
    sp.add_argument("first")
    sp.add_argument("second")

    sp = add("corpus", cmd_corpus, "list, show or export the builtin examples")
    sp.add_argument("action", choices=["list", "show", "export"])
    sp.add_argument("name", nargs="?", help="builtin name (show) or target directory (export)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except errors.IHError as exc:
        sys.stderr.write(json.dumps(exc.as_dict(), sort_keys=True, default=str) + "\n")
        return exc.exit_code
    except Exception as exc:  # anything else is a bug
        err = errors.InternalError(f"{type(exc).__name__}: {exc}")
        sys.stderr.write(json.dumps(err.as_dict(), sort_keys=True) + "\n")
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
