import pytest

from ihcalc import errors
from ihcalc.complex_core import (
    NEG_INF,
    FilteredComplex,
    StratifiedMapDescriptor,
    build_complex,
    check_normal,
    check_pseudomanifold,
    check_stratified_map,
    decompose,
    identity_map,
    stratified_map,
)
from ihcalc.constructors import cone, disjoint_union


def raw(formal_dim, levels, simplices, name="t"):
    return {
        "name": name,
        "formal_dim": formal_dim,
        "vertices": [{"id": v, "level": lv} for v, lv in levels.items()],
        "simplices": simplices,
    }


def circle():
    return build_complex(raw(1, {"a": 1, "b": 1, "c": 1}, [["a", "b"], ["b", "c"], ["a", "c"]]))


def test_triangle_circle():
    X = circle()
    assert len(X.simplices_of_dim(0)) == 3
    assert len(X.simplices_of_dim(1)) == 3
    assert all(X.level(s) <= 1 for s in X.simplices)


def test_pointed_sphere_accepted(builtin):
    X = builtin("pointed-sphere")
    assert X.formal_dim == 2
    assert sorted(X.levels.values()) == [0, 2, 2, 2, 2, 2]


def test_empty_top_level():
    with pytest.raises(errors.EmptyTopLevel):
        build_complex(raw(2, {"a": 1, "b": 1}, [["a", "b"]]))


@pytest.mark.parametrize(
    "bad, error",
    [
        ({"name": "x", "formal_dim": 1, "vertices": [{"id": "a", "level": 1}, {"id": "a", "level": 1}], "simplices": [["a"]]}, errors.DuplicateVertex),
        (raw(1, {"a": 2}, [["a"]]), errors.LevelOutOfRange),
        (raw(1, {"a": -1, "b": 1}, [["a", "b"]]), errors.LevelOutOfRange),
        (raw(1, {"a": 1}, [["a", "z"]]), errors.DanglingVertexRef),
    ],
)
def test_validation_errors(bad, error):
    with pytest.raises(error):
        build_complex(bad)


def test_strata_pointed_sphere(builtin):
    S = builtin("pointed-sphere").strata
    assert S.ids == ["S0.0", "S2.0"]
    assert S["S0.0"].codim == 2 and not S["S0.0"].regular
    assert S["S2.0"].regular


def test_strata_cone_on_torus(builtin):
    S = builtin("cone-torus").strata
    assert S["S0.0"].codim == 3
    assert S.leq("S0.0", "S3.0") and not S.leq("S3.0", "S0.0")
    assert S.depth["S0.0"] == 1


def test_disjoint_circles_incomparable():
    U = disjoint_union(circle(), circle())
    S = U.strata
    assert [s.regular for s in S] == [True, True]
    a, b = S.ids
    assert not S.leq(a, b) and not S.leq(b, a)


def test_strata_are_antisymmetric_and_regular_maximal(builtin):
    for name in ("susp-torus", "pinched-torus", "susp-torus-refined", "pointed-circle"):
        S = builtin(name).strata
        for a, b in S.order_pairs():
            assert not S.leq(b, a)
        for r in S.regular():
            assert all(b == r.id for b in S.above[r.id])


def test_each_simplex_meets_one_stratum_per_level(builtin):
    X = builtin("susp-torus-refined")
    for s in X.simplices:
        by_level = {}
        for v in s:
            by_level.setdefault(X.levels[v], set()).add(X.strata.vertex_stratum[v])
        assert all(len(ids) == 1 for ids in by_level.values())


def test_decompose_cone_circle(builtin):
    X = builtin("cone-circle")
    a, b = [v for v in X.vertex_order if X.levels[v] == 2][:2]
    view = decompose(X, ("w", a, b))
    assert view.parts == (("w",), (), tuple(sorted((a, b))))
    assert view.part_dims == (0, NEG_INF, 1)
    assert decompose(X, (a, b)).parts[:2] == ((), ())
    assert decompose(X, ("w",)).parts == (("w",), (), ())
    with pytest.raises(errors.UnknownSimplex):
        decompose(X, ("nowhere",))


def test_pseudomanifold(builtin):
    assert check_pseudomanifold(builtin("pointed-sphere")).is_pm
    wedge = {"p": 0, "a": 1, "b": 1, "c": 1, "d": 1}
    tris = [["p", "a"], ["a", "b"], ["b", "p"], ["p", "c"], ["c", "d"], ["d", "p"]]
    assert check_pseudomanifold(build_complex(raw(1, wedge, tris))).is_pm
    report = check_pseudomanifold(build_complex(raw(2, {"a": 2, "b": 2, "c": 2}, [["a", "b", "c"]])))
    assert not report.is_pm
    assert {tuple(w["simplex"]) for w in report.witnesses} == {("a", "b"), ("a", "c"), ("b", "c")}


def test_normal(builtin):
    assert check_normal(builtin("susp-torus")).is_normal
    assert check_normal(circle()).is_normal
    report = check_normal(builtin("pinched-torus"))
    assert not report.is_normal
    assert ["p"] in report.witnesses


def test_refinement_identity_is_stratified(builtin):
    f = identity_map(builtin("pointed-sphere"), builtin("trivial-sphere"))
    assert f.stratum_map == {"S0.0": "S2.0", "S2.0": "S2.0"}


def test_coarse_to_fine_splits(builtin):
    f = StratifiedMapDescriptor(builtin("trivial-sphere"), builtin("pointed-sphere"), {v: v for v in builtin("trivial-sphere").levels})
    report = check_stratified_map(f, strict=False)
    assert not report.valid
    assert {v["kind"] for v in report.violations} >= {"StratumSplit"}
    with pytest.raises(errors.StratumSplit):
        check_stratified_map(f)


def test_constant_map_to_apex_raises_codimension(builtin):
    # a regular stratum can only land in a regular stratum
    K = builtin("cone-circle")
    C = circle()
    f = StratifiedMapDescriptor(C, K, {v: "w" for v in C.levels})
    report = check_stratified_map(f, strict=False)
    assert report.stratum_map == {"S1.0": "S0.0"}
    assert [v["kind"] for v in report.violations] == ["CodimViolation"]
    with pytest.raises(errors.CodimViolation):
        check_stratified_map(f)


def test_cone_slice_inclusion(builtin):
    K = builtin("cone-circle")
    a, b = [v for v in K.vertex_order if v != "w"][:2]
    edge = build_complex(raw(1, {a: 1, b: 1}, [[a, b]]))
    f = stratified_map(cone(edge), K, {"w": "w", a: a, b: b})
    assert f.stratum_map == {"S0.0": "S0.0", "S2.0": "S2.0"}


def test_not_simplicial():
    C = circle()
    target = build_complex(raw(1, {"x": 1, "y": 1, "z": 1, "u": 1}, [["x", "y"], ["z", "u"]]))
    with pytest.raises(errors.NotSimplicial):
        stratified_map(C, target, {"a": "x", "b": "y", "c": "z"})


def test_identity_on_self(builtin):
    for name in ("susp-torus", "pinched-torus", "cone-torus"):
        X = builtin(name)
        report = check_stratified_map(StratifiedMapDescriptor(X, X, {v: v for v in X.levels}))
        assert report.valid and report.monotone


def test_round_trip(builtin):
    X = builtin("susp-torus-refined")
    Y = build_complex(X.to_dict())
    assert Y == X
    assert Y.strata.ids == X.strata.ids


def test_from_maximal_keeps_vertex_order():
    X = FilteredComplex.from_maximal("x", 1, {"b": 1, "a": 1}, [["a", "b"]], ("b", "a"))
    assert X.vertex_order == ("b", "a")
