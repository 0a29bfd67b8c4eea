import pytest

import oracle
from helpers import groups, padded
from ihcalc import errors
from ihcalc.complex_core import FilteredComplex, build_complex
from ihcalc.constructors import (
    apex_strata,
    barycentric_subdivide,
    build_collared_cone,
    build_cone,
    build_product_interval,
    build_subdivision,
    cone,
    disjoint_union,
    half_cone_cover,
    product_circle,
    product_interval,
    suspension,
    transport_perversity,
)
from ihcalc.perversity import make_perversity, zero_perversity


def point(level=0):
    return build_complex({"name": "pt", "formal_dim": level, "vertices": [{"id": "x", "level": level}], "simplices": [["x"]]})


def edge():
    return build_complex(
        {"name": "edge", "formal_dim": 1, "vertices": [{"id": "a", "level": 1}, {"id": "b", "level": 1}], "simplices": [["a", "b"]]}
    )


def test_cone(builtin):
    K = cone(builtin("circle3"))
    assert len(K.levels) == 4 and K.levels["w"] == 0 and K.formal_dim == 2
    assert K.strata["S0.0"].codim == 2
    assert cone(builtin("torus")).strata["S0.0"].codim == 3
    I = cone(point())
    assert sorted(I.levels.values()) == [0, 1] and len(I.simplices_of_dim(1)) == 1


def test_cone_keeps_faces(builtin):
    X = builtin("pointed-circle")
    K = cone(X)
    assert X.simplices <= K.simplices
    assert all(tuple(sorted(s + ("w",))) in K.simplices for s in X.simplices)


def test_suspension(builtin):
    S = suspension(builtin("circle3"))
    assert [s.codim for s in S.strata.singular()] == [2, 2]
    assert oracle.ordinary_homology(S.simplices) == [(1, ()), (0, ()), (1, ())]
    assert not any({"w+", "w-"} <= set(s) for s in S.simplices)
    T = suspension(builtin("torus"))
    assert [s.codim for s in T.strata.singular()] == [3, 3]
    # an empty complex is not representable, so the emptiness check happens on the raw input
    with pytest.raises(errors.EmptyTopLevel):
        FilteredComplex.from_maximal("empty", 0, {}, [])


def test_products(builtin):
    I = product_interval(point(), 1)
    assert (len(I.simplices_of_dim(1)), I.formal_dim, set(I.levels.values())) == (1, 1, {1})
    annulus = product_interval(builtin("circle3"), 1)
    assert len(annulus.levels) == 6 and not annulus.strata.singular()
    X = builtin("pointed-circle")
    P = product_interval(X, 1)
    (line,) = P.strata.singular()
    assert line.codim == X.strata.singular()[0].codim
    assert len(product_circle(point(), 3).simplices_of_dim(1)) == 3
    torus = product_circle(builtin("circle3"), 3)
    assert len(torus.levels) == 9
    assert oracle.ordinary_homology(torus.simplices) == [(1, ()), (2, ()), (1, ())]
    s1s2 = product_circle(builtin("pointed-sphere"), 3)
    (circle,) = s1s2.strata.singular()
    assert len(circle.vertices) == 3
    with pytest.raises(errors.MTooSmall):
        product_circle(point(), 2)
    with pytest.raises(errors.MTooSmall):
        product_interval(point(), 0)


def test_longer_interval(builtin):
    X = builtin("pointed-sphere")
    built = build_product_interval(X, 3)
    p = make_perversity(X, {"S0.0": 1})
    assert padded(groups(built.complex, transport_perversity(built, p)), 4) == padded(groups(X, p), 4)


def test_subdivision(builtin):
    sd = barycentric_subdivide(edge())
    assert len(sd.simplices_of_dim(1)) == 2
    X = builtin("pointed-sphere")
    once = barycentric_subdivide(X)
    assert len(once.strata) == len(X.strata)
    assert len(once.simplices) > len(X.simplices)
    assert once.strata.ids == barycentric_subdivide(X).strata.ids


def test_subdivision_keeps_skeleta(builtin):
    X = builtin("susp-torus-refined")
    built = build_subdivision(X)
    for i in range(X.formal_dim + 1):
        old = {s for s in X.simplices if X.level(s) <= i}
        new = {s for s in built.complex.simplices if built.complex.level(s) <= i}
        # every new simplex in K_i sits over a flag of old simplices in K_i
        for s in new:
            assert all(built.carrier[v][1] in old for v in s)
        assert len(new) >= len(old)


def test_disjoint_union(builtin):
    C = builtin("circle3")
    assert len(disjoint_union(C, C).strata) == 2
    assert len(disjoint_union(C, builtin("pointed-circle")).strata) == 3
    with pytest.raises(errors.DimMismatch):
        disjoint_union(C, builtin("pointed-sphere"))


def test_transport(builtin):
    X = builtin("pointed-circle")
    built = build_cone(X)
    (apex,) = apex_strata(built)
    p = transport_perversity(built, make_perversity(X, {"S0.0": 3}), extra={apex: -1})
    assert p[apex] == -1
    assert sorted(p.values[s.id] for s in built.complex.strata.singular()) == [-1, 3]
    with pytest.raises(errors.MissingStratum):
        transport_perversity(built, make_perversity(X, {"S0.0": 3}))
    with pytest.raises(errors.ShapeMismatch):
        transport_perversity(built)


def test_collared_cone_pieces(builtin):
    built = build_collared_cone(builtin("circle3"))
    K, pieces = built.complex, built.pieces
    assert pieces["cone"] | pieces["collar"] == K.simplices
    assert pieces["cone"] & pieces["collar"] == pieces["seam"]


def test_half_cones_cover(builtin):
    built = build_cone(builtin("torus"))
    A, B = half_cone_cover(built)
    assert A | B == built.complex.simplices
    assert A != built.complex.simplices and B != built.complex.simplices


def test_cone_apex_zero_agrees_with_formula(builtin):
    X = builtin("torus")
    built = build_cone(X)
    (apex,) = apex_strata(built)
    p = transport_perversity(built, zero_perversity(X), extra={apex: 0})
    assert padded(groups(built.complex, p), 4) == [(1, ()), (2, ()), (0, ()), (0, ())]
