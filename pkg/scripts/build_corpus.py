"""Regenerate the builtin JSON corpus under src/ihcalc/data."""
from __future__ import annotations

import json
from pathlib import Path

from ihcalc.complex_core import FilteredComplex
from ihcalc.constructors import cone, product_interval, suspension

DATA = Path(__file__).resolve().parents[1] / "src" / "ihcalc" / "data"


def circle3() -> FilteredComplex:
    return FilteredComplex.from_maximal("circle3", 1, {"a": 1, "b": 1, "c": 1}, [["a", "b"], ["b", "c"], ["a", "c"]])


def pointed_circle() -> FilteredComplex:
    return FilteredComplex.from_maximal(
        "pointed-circle", 1, {"p": 0, "a": 1, "b": 1}, [["p", "a"], ["a", "b"], ["b", "p"]]
    )


def octahedron(name: str, pole_level: int) -> FilteredComplex:
    ring = ["a", "b", "c", "d"]
    tris = [[pole, ring[i], ring[(i + 1) % 4]] for pole in ("pt", "s") for i in range(4)]
    levels = {v: 2 for v in ring + ["s"]}
    levels["pt"] = pole_level
    return FilteredComplex.from_maximal(name, 2, levels, tris)


def torus() -> FilteredComplex:
    tris = []
    for i in range(7):
        tris.append([f"t{i}", f"t{(i + 1) % 7}", f"t{(i + 3) % 7}"])
        tris.append([f"t{i}", f"t{(i + 2) % 7}", f"t{(i + 3) % 7}"])
    return FilteredComplex.from_maximal("torus", 2, {f"t{i}": 2 for i in range(7)}, tris)


def pinched_torus() -> FilteredComplex:
    tube = product_interval(circle3(), 1)
    levels = dict(tube.levels)
    levels["p"] = 0
    ends = [s for s in tube.simplices if len(s) == 2 and len({v[-2] for v in s}) == 1]
    maximal = list(tube.maximal_simplices) + [s + ("p",) for s in ends]
    return FilteredComplex.from_maximal("pinched-torus", 2, levels, maximal)


def subdivide_edge(X: FilteredComplex, edge: tuple[str, str], new: str, level: int) -> FilteredComplex:
    """Stellar subdivision of one edge by a new vertex."""
    a, b = edge
    maximal = []
    for s in X.maximal_simplices:
        if a in s and b in s:
            maximal.append([v for v in s if v != a] + [new])
            maximal.append([v for v in s if v != b] + [new])
        else:
            maximal.append(list(s))
    levels = dict(X.levels)
    levels[new] = level
    return FilteredComplex.from_maximal(X.name, X.formal_dim, levels, maximal)


def renamed(X: FilteredComplex, name: str) -> FilteredComplex:
    return FilteredComplex(name, X.formal_dim, X.levels, X.simplices, X.vertex_order)


def complexes() -> dict[str, FilteredComplex]:
    t = torus()
    # keep t0 away from both apexes so it can be made a point stratum of its own
    susp = suspension(t)
    susp = subdivide_edge(susp, ("t0", "w+"), "m+", 3)
    susp = renamed(subdivide_edge(susp, ("t0", "w-"), "m-", 3), "susp-torus")
    refined = susp.relevel({"t0": 0}, "susp-torus-refined")
    return {
        "circle3": circle3(),
        "pointed-circle": pointed_circle(),
        "pointed-sphere": octahedron("pointed-sphere", 0),
        "trivial-sphere": octahedron("trivial-sphere", 2),
        "torus": t,
        "pinched-torus": pinched_torus(),
        "cone-circle": renamed(cone(circle3()), "cone-circle"),
        "cone-torus": renamed(cone(t), "cone-torus"),
        "susp-torus": susp,
        "susp-torus-refined": refined,
    }


PERVERSITIES = {
    "apex0": {"kind": "general", "values": {"S0.0": 0}},
    "apex1": {"kind": "general", "values": {"S0.0": 1}},
    "apex2": {"kind": "general", "values": {"S0.0": 2}},
    "pt_neg1": {"kind": "general", "values": {"S0.0": -1}},
    "pt1": {"kind": "general", "values": {"S0.0": 1}},
    "gm-middle": {"kind": "classical", "by_codim": {"1": 0, "2": 0, "3": 0, "4": 1}},
    "jump2": {"kind": "classical", "by_codim": {"2": 0, "3": 2}},
}

EQUIVALENCES = {"pt-reg": {"pairs": [["S0.0", "S2.0"]]}}


def write(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def main() -> None:
    for name, X in complexes().items():
        write(DATA / "complexes" / f"{name}.json", X.to_dict())
    for name, raw in PERVERSITIES.items():
        write(DATA / "perversities" / f"{name}.json", raw)
    for name, raw in EQUIVALENCES.items():
        write(DATA / "equivalences" / f"{name}.json", raw)


if __name__ == "__main__":
    main()
