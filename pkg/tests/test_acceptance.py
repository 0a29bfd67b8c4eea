"""Acceptance suite: one test per criterion, exact integer comparisons throughout.

Run with ``pytest tests/test_acceptance.py -v`` (a PASS/FAIL line per
criterion is printed at the end) or directly as a script.
"""
import random
from itertools import product

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors
from sympy import ZZ as SZZ

import oracle
from helpers import F2, RINGS, groups, padded, perversity_sweep, top_shift
from ihcalc.chain_builder import build_presentation, build_relative_complex, funest_report, is_admissible
from ihcalc.complex_core import FilteredComplex, boundary_faces, check_normal, stratified_map
from ihcalc.constructors import (
    apex_strata,
    build_collared_cone,
    build_cone,
    build_product_circle,
    build_product_interval,
    build_subdivision,
    half_cone_cover,
    transport_perversity,
)
from ihcalc.homology_engine import induced_isomorphism, mayer_vietoris, pair_sequence
from ihcalc.invariance import check_refinement, invariance_report
from ihcalc.linalg import mat_mul, smith_normal_form
from ihcalc.perversity import (
    ClassicalPerversitySpec,
    constant_perversity,
    from_classical,
    make_perversity,
    pullback,
    zero_perversity,
)
from ihcalc.rings import QQ, ZZ

BUILTINS = [
    "circle3",
    "pointed-circle",
    "pointed-sphere",
    "trivial-sphere",
    "torus",
    "pinched-torus",
    "cone-circle",
    "cone-torus",
    "susp-torus",
    "susp-torus-refined",
]
PAIRS = [("pointed-sphere", "trivial-sphere"), ("susp-torus-refined", "susp-torus")]


def base_perversities(X):
    """The perversities on a cone base used by the cone sweeps."""
    if not X.strata.singular():
        return [zero_perversity(X)]
    return list(perversity_sweep(X, (-1, 0, 1)))


def small_sweep(X):
    """Constants -1 and 0, t̄ and t̄+1 (deduplicated)."""
    out = []
    for p in (constant_perversity(X, -1), constant_perversity(X, 0), top_shift(X, 0), top_shift(X, 1)):
        if p not in out:
            out.append(p)
    return out


def cone_with(X, p_base, apex_value):
    built = build_cone(X)
    (apex,) = apex_strata(built)
    return built.complex, transport_perversity(built, p_base, extra={apex: apex_value})


def sigma_of(X):
    return X.full_subcomplex([v for v, lv in X.levels.items() if lv < X.formal_dim])


def regular_part(X):
    return [s for s in X.simplices if all(X.levels[v] == X.formal_dim for v in s)]


# -- 1, 2: cone formula -----------------------------------------------------


def _cone_sweep(variant):
    checked = 0
    for name in ("circle3", "torus", "pointed-circle"):
        X = oracle_ready(name)
        n = X.formal_dim  # the cone has dimension n + 1
        for p_base in base_perversities(X):
            base = oracle.from_complex(X, p_base if X.strata.singular() else None, "Z", tame=variant == "tame")
            for apex_value in range(-2, n + 3):
                K, p = cone_with(X, p_base, apex_value)
                got = padded(groups(K, p, ZZ, variant), n + 2)
                expected = []
                for k in range(n + 2):
                    if k < n - apex_value:
                        expected.append(padded(base, n + 2)[k])
                    elif k == 0 and variant == "intersection":
                        expected.append((1, ()))
                    else:
                        expected.append((0, ()))
                assert got == expected, (name, p_base.values, apex_value, got, expected)
                checked += 1
    return checked


_CACHE = {}


def oracle_ready(name):
    from ihcalc import corpus

    if name not in _CACHE:
        _CACHE[name] = corpus.complex_named(name)
    return _CACHE[name]


@pytest.mark.criterion(1, "cone formula sweep")
def test_cone_formula_sweep():
    assert _cone_sweep("intersection") > 0


@pytest.mark.criterion(2, "tame cone formula sweep")
def test_tame_cone_formula_sweep():
    assert _cone_sweep("tame") > 0
    # the degree-0 divergence actually shows up
    X = oracle_ready("circle3")
    K, p = cone_with(X, zero_perversity(X), 2)
    assert groups(K, p, ZZ, "intersection")[0] == (1, ())
    assert padded(groups(K, p, ZZ, "tame"), 1)[0] == (0, ())


# -- 3: extreme perversities ------------------------------------------------


@pytest.mark.criterion(3, "extreme perversities")
def test_extreme_perversities():
    for ring in ("Z", "F2"):
        for name in ("susp-torus", "cone-torus"):
            X = oracle_ready(name)
            assert check_normal(X).is_normal
            ordinary = oracle.ordinary_homology(X.simplices, ring)
            got = groups(X, top_shift(X, 0), RINGS[ring])
            assert padded(got, len(ordinary)) == padded(ordinary, len(got)), (name, ring)
        for name in BUILTINS:
            X = oracle_ready(name)
            ordinary = oracle.ordinary_homology(X.simplices, ring)
            got = groups(X, top_shift(X, 1), RINGS[ring])
            assert padded(got, len(ordinary)) == padded(ordinary, len(got)), (name, ring, "t+1")
            open_part = regular_part(X)
            expected = oracle.ordinary_homology(open_part, ring) if open_part else []
            got = groups(X, constant_perversity(X, -1), RINGS[ring])
            length = max(len(got), len(expected))
            assert padded(got, length) == padded(expected, length), (name, ring, "-1")


# -- 4: tame identifications ------------------------------------------------


@pytest.mark.criterion(4, "tame identifications")
def test_tame_identifications():
    for name in BUILTINS:
        X = oracle_ready(name)
        singular = X.strata.singular()
        # every assignment between t̄-2 and t̄ on each stratum
        ranges = [range(s.codim - 4, s.codim - 1) for s in singular]
        for combo in product(*ranges):
            p = make_perversity(X, {s.id: v for s, v in zip(singular, combo)})
            assert groups(X, p, ZZ, "tame") == groups(X, p, ZZ, "intersection"), (name, p.values)
        if not singular:
            continue
        Sigma = sigma_of(X)
        relative = [(g.free_rank, g.torsion) for g in _homology(build_relative_complex(X, Sigma, None, ZZ, "ordinary"))]
        expected = oracle.relative_ordinary_homology(X.simplices, Sigma.simplices, "Z")
        assert padded(relative, len(expected)) == padded(expected, len(relative)), name
        for delta in (1, 3):
            got = groups(X, top_shift(X, delta), ZZ, "tame")
            length = max(len(got), len(expected))
            assert padded(got, length) == padded(expected, length), (name, delta)


def _homology(P):
    from ihcalc.homology_engine import homology

    return homology(P)


# -- 5: a point stratum that does not matter --------------------------------


@pytest.mark.criterion(5, "King invariance instance")
def test_pointed_sphere():
    X = oracle_ready("pointed-sphere")
    (pt,) = [s.id for s in X.strata.singular()]
    sphere = oracle.ordinary_homology(oracle_ready("trivial-sphere").simplices, "Z")
    assert sphere == [(1, ()), (0, ()), (1, ())]
    for value in (0, 1, 2, 5):
        assert padded(groups(X, make_perversity(X, {pt: value})), 3) == sphere
    punctured = oracle.ordinary_homology(regular_part(X), "Z")
    assert padded(punctured, 3) == [(1, ()), (0, ()), (0, ())]
    assert padded(groups(X, make_perversity(X, {pt: -1})), 3) == padded(punctured, 3)


# -- 6, 7: refinement pairs -------------------------------------------------


def _pair(fine, coarse):
    return check_refinement(oracle_ready(fine), oracle_ready(coarse))


def _fine_overrides(pair):
    """Values for the fine strata landing in regular coarse strata."""
    extra = [
        s.id for s in pair.fine.strata.singular()
        if pair.coarse.strata[pair.stratum_correspondence[s.id]].regular
    ]
    for combo in product((-2, -1, 0, 1, 2, 5), repeat=len(extra)):
        yield dict(zip(extra, combo))


@pytest.mark.criterion(6, "refinement invariance")
def test_refinement_invariance():
    rings = (ZZ, QQ, F2)
    seen_claim = seen_violation = 0
    for fine, coarse in PAIRS:
        pair = _pair(fine, coarse)
        for q in perversity_sweep(pair.coarse, (-1, 0, 1, 2)):
            for override in _fine_overrides(pair):
                report = invariance_report(pair, q, rings=rings, fine_override=override)
                ii_violated = not report.hypotheses["fine_K"]["conditions"]["ii"]["passed"]
                if report.hypotheses_hold("intersection"):
                    seen_claim += 1
                    for comp in report.comparisons:
                        assert comp.verdict == "match", (fine, q.values, override, comp.as_dict())
                        assert comp.degree_verdicts == ["match"] * len(comp.degree_verdicts)
                if ii_violated:
                    seen_violation += 1
                    assert report.verdict == "no-claim, mismatch consistent", (fine, q.values, override)
                    assert any(not c.matches for c in report.comparisons)
    assert seen_claim and seen_violation


@pytest.mark.criterion(7, "tame refinement invariance")
def test_tame_refinement_invariance():
    rings = (ZZ, QQ, F2)
    checked = 0
    gm_specs = [
        ClassicalPerversitySpec({2: 0, 3: 0, 4: 1}),  # lower middle
        ClassicalPerversitySpec({2: 0, 3: 1, 4: 1}),  # upper middle
        ClassicalPerversitySpec({2: 0, 3: 0, 4: 0}),  # zero
    ]
    for fine, coarse in PAIRS:
        pair = _pair(fine, coarse)
        for spec in gm_specs:
            q = from_classical(spec, pair.coarse)
            for p_fine in (pullback(pair.coarsening, q), from_classical(spec, pair.fine)):
                report = invariance_report(pair, q, rings=rings, variants=("tame",), fine_override=p_fine)
                assert report.hypotheses_hold("tame"), (fine, spec, report.hypotheses)
                for comp in report.comparisons:
                    assert comp.verdict == "match", (fine, p_fine.values, comp.as_dict())
                checked += 1
    assert checked == 12


# -- 8: subdivision ---------------------------------------------------------


@pytest.mark.criterion(8, "subdivision invariance")
def test_subdivision_invariance():
    for name in BUILTINS:
        X = oracle_ready(name)
        perversities = small_sweep(X)
        layers = [(X, perversities)]
        for _ in range(2):
            K, ps = layers[-1]
            built = build_subdivision(K)
            layers.append((built.complex, [transport_perversity(built, p) for p in ps]))
        for variant in ("intersection", "tame"):
            for i, p in enumerate(perversities):
                reference = groups(X, p, ZZ, variant)
                for times in (1, 2):
                    K, ps = layers[times]
                    got = groups(K, ps[i], ZZ, variant)
                    length = max(len(got), len(reference))
                    assert padded(got, length) == padded(reference, length), (name, p.values, variant, times)


# -- 9: products ------------------------------------------------------------


def _direct_sum_shift(gs, length):
    gs = padded(gs, length)
    out = []
    for k in range(length):
        a = gs[k]
        b = gs[k - 1] if k else (0, ())
        out.append((a[0] + b[0], tuple(sorted(a[1] + b[1]))))
    return out


@pytest.mark.criterion(9, "sphere and interval products")
def test_products():
    for name in ("pointed-sphere", "cone-circle"):
        X = oracle_ready(name)
        (sid,) = [s.id for s in X.strata.singular()]
        interval = build_product_interval(X, 1)
        circle = build_product_circle(X, 3)
        for value in range(-2, 5):
            p = make_perversity(X, {sid: value})
            for variant in ("intersection", "tame"):
                base = groups(X, p, ZZ, variant)
                length = X.formal_dim + 3
                got = groups(interval.complex, transport_perversity(interval, p), ZZ, variant)
                assert padded(got, length) == padded(base, length), (name, value, variant, "I")
                got = groups(circle.complex, transport_perversity(circle, p), ZZ, variant)
                assert padded(got, length) == _direct_sum_shift(base, length), (name, value, variant, "S1")


# -- 10: funest faces -------------------------------------------------------


def _funest_counterexamples(X, p):
    bad = []
    n = X.formal_dim
    for s in X.simplices:
        if not is_admissible(X, s, p):
            continue
        report = funest_report(X, s, p)
        faces_ok = [is_admissible(X, f, p) for _, f in boundary_faces(s)] if len(s) > 1 else []
        if (report.defect == 0) != all(faces_ok):
            bad.append(("defect", s, report))
        for (_, f), ok in zip(boundary_faces(s) if len(s) > 1 else [], faces_ok):
            # a face fails exactly when it contains the funest face
            contains = report.funest_face is not None and set(report.funest_face) <= set(f)
            if (not ok) != contains:
                bad.append(("containment", s, f, report))
        if report.funest_face is not None:
            codim = n - X.levels[max(report.funest_face, key=X.levels.__getitem__)]
            if report.defect != codim or len(report.funest_face) == len(s):
                bad.append(("shape", s, report))
    return bad


def random_complex(rng, index):
    vertices = [f"v{i}" for i in range(rng.randint(3, 8))]
    dim = rng.randint(1, min(3, len(vertices) - 1))
    maximal = {tuple(sorted(rng.sample(vertices, dim + 1))) for _ in range(rng.randint(1, 6))}
    used = sorted({v for s in maximal for v in s})
    n = dim + rng.randint(0, 1)
    levels = {v: rng.randint(0, n) for v in used}
    levels[rng.choice(used)] = n
    return FilteredComplex.from_maximal(f"random{index}", n, levels, sorted(maximal))


@pytest.mark.criterion(10, "funest-face characterization")
def test_funest_faces():
    counterexamples = []
    for name in BUILTINS:
        X = oracle_ready(name)
        for p in perversity_sweep(X, (-1, 0, 1, 2)):
            counterexamples += _funest_counterexamples(X, p)
    rng = random.Random(20240611)
    assignments = 0
    for index in range(200):
        X = random_complex(rng, index)
        singular = [s.id for s in X.strata.singular()]
        for _ in range(4):
            values = {sid: rng.choice((-2, -1, 0, 1, 2, 3)) for sid in singular}
            counterexamples += _funest_counterexamples(X, make_perversity(X, values))
            assignments += 1
    assert assignments == 800
    assert counterexamples == []


# -- 11: exact sequences ----------------------------------------------------


@pytest.mark.criterion(11, "exact sequences")
def test_exact_sequences():
    for ring in (F2, QQ):
        # pair sequences: singular part and cone base
        for name in ("pointed-sphere", "pinched-torus", "cone-circle", "cone-torus", "pointed-circle"):
            X = oracle_ready(name)
            subs = [sigma_of(X)]
            if name.startswith("cone-"):
                subs.append(X.full_subcomplex([v for v, lv in X.levels.items() if lv == X.formal_dim]))
            for L in subs:
                for p in small_sweep(X):
                    for variant in ("intersection", "tame"):
                        rel = build_relative_complex(X, L, p, ring, variant)
                        report, _ = pair_sequence(rel)
                        assert report.exact, (name, p.values, variant, report.failures)
        # Mayer-Vietoris on the half-cone cover
        circle = oracle_ready("circle3")
        built = build_cone(circle)
        (apex,) = apex_strata(built)
        A, B = half_cone_cover(built)
        for value in range(-2, 5):
            p = transport_perversity(built, zero_perversity(circle), extra={apex: value})
            for variant in ("intersection", "tame"):
                mv = mayer_vietoris(built.complex, p, ring, A, B, variant, max_subdivisions=2)
                assert mv.exact, (value, variant, mv.as_dict())
                assert mv.stabilized_at is not None and mv.stabilized_at <= 2, (value, variant, mv.as_dict())
        # excision: (collared cone, collar) against (cone, seam)
        for name in ("circle3", "pointed-circle"):
            X = oracle_ready(name)
            built = build_collared_cone(X)
            K = built.complex
            (apex,) = apex_strata(built)
            cone_part = K.subcomplex(built.pieces["cone"])
            inclusion = stratified_map(cone_part, K, {v: v for v in cone_part.levels})
            for p_base in base_perversities(X):
                for value in range(-1, 3):
                    p = transport_perversity(built, p_base, extra={apex: value})
                    p_cone = pullback(inclusion, p)
                    for variant in ("intersection", "tame"):
                        small = build_relative_complex(cone_part, built.pieces["seam"], p_cone, ring, variant)
                        big = build_relative_complex(K, built.pieces["collar"], p, ring, variant)
                        iso, detail = induced_isomorphism(small, big)
                        assert iso, (name, value, variant, detail)
                        if ring is QQ:
                            zs = build_relative_complex(cone_part, built.pieces["seam"], p_cone, ZZ, variant)
                            zb = build_relative_complex(K, built.pieces["collar"], p, ZZ, variant)
                            a, b = _homology(zs), _homology(zb)
                            length = max(len(a), len(b))
                            assert padded([(g.free_rank, g.torsion) for g in a], length) == padded(
                                [(g.free_rank, g.torsion) for g in b], length
                            )


# -- 12: engine self-checks -------------------------------------------------


def _is_identity(M):
    return all(M[i][j] == int(i == j) for i in range(len(M)) for j in range(len(M)))


@pytest.mark.criterion(12, "homology-engine self-checks")
def test_engine_self_checks():
    presentations = 0
    for name in BUILTINS:
        X = oracle_ready(name)
        for p in small_sweep(X):
            for ring in RINGS.values():
                for variant in ("intersection", "tame"):
                    P = build_presentation(X, p, ring, variant)
                    # d∘d = 0 recomputed here, column by column
                    for k in range(2, len(P.boundary)):
                        for col in P.boundary[k]:
                            acc = {}
                            for i, c in col.items():
                                for r, e in P.boundary[k - 1][i].items():
                                    acc[r] = acc.get(r, 0) + c * e
                            modulus = ring.modulus
                            assert all((x % modulus if modulus else x) == 0 for x in acc.values()), (name, k)
                    P.check_dd()
                    presentations += 1
    assert presentations > 0

    rng = random.Random(7)
    for _ in range(500):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = [[rng.randint(-9, 9) if rng.random() < 0.7 else 0 for _ in range(n)] for _ in range(m)]
        snf = smith_normal_form(A)
        D = mat_mul(mat_mul(snf.left_transform, A), snf.right_transform)
        for i in range(m):
            for j in range(n):
                assert D[i][j] == (snf.diagonal[i] if i == j else 0)
        assert _is_identity(mat_mul(snf.left_transform, snf.left_inverse))
        assert _is_identity(mat_mul(snf.right_transform, snf.right_inverse))
        nonzero = [d for d in snf.diagonal if d]
        assert all(d > 0 for d in nonzero)
        assert snf.diagonal[: len(nonzero)] == nonzero
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
        reference = [abs(int(d)) for d in invariant_factors(Matrix(A), domain=SZZ) if d != 0]
        assert nonzero == reference, (A, snf.diagonal, reference)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
