"""Refinement pairs, hypothesis checks and side-by-side homology comparisons.

Stratum equivalence is never inferred.  It comes from the user, or from the
coarse side of a refinement pair (strata landing in one coarse stratum are
treated as equivalent).  Local homology can only refute an equivalence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import errors
from .complex_core import FilteredComplex, StratifiedMapDescriptor, boundary_faces, check_stratified_map, link
from .homology_engine import HomologyGroup, homology
from .chain_builder import build_presentation
from .linalg import rank
from .perversity import (
    EquivalenceDeclaration,
    KReport,
    Perversity,
    check_K_perversity,
    pullback,
    pushforward,
)
from .rings import PrimeField, Ring, ZZ

F2 = PrimeField(2)


@dataclass(frozen=True)
class RefinementPair:
    fine: FilteredComplex
    coarse: FilteredComplex
    stratum_correspondence: Mapping[str, str]
    source_flags: Mapping[str, bool]
    coarsening: StratifiedMapDescriptor = field(repr=False)

    def sources_of(self, coarse_id: str) -> list[str]:
        return sorted(s for s, t in self.stratum_correspondence.items() if t == coarse_id and self.source_flags[s])

    def as_dict(self) -> dict:
        return {
            "fine": self.fine.name,
            "coarse": self.coarse.name,
            "correspondence": dict(sorted(self.stratum_correspondence.items())),
            "sources": sorted(s for s, flag in self.source_flags.items() if flag),
        }


def check_refinement(fine: FilteredComplex, coarse: FilteredComplex) -> RefinementPair:
    """Is ``fine`` a finer stratification of the same complex as ``coarse``?"""
    if fine.simplices != coarse.simplices or fine.formal_dim != coarse.formal_dim:
        raise errors.SimplexSetMismatch("refinement pairs must share simplices and formal dimension")
    ident = StratifiedMapDescriptor(fine, coarse, {v: v for v in fine.levels})
    report = check_stratified_map(ident, strict=False)
    if not report.valid:
        raise errors.NotARefinement(
            "identity is not a stratified map: " + "; ".join(v["detail"] for v in report.violations)
        )
    corr = report.stratum_map
    flags = {s.id: coarse.strata[corr[s.id]].level == s.level for s in fine.strata}
    ident = StratifiedMapDescriptor(fine, coarse, ident.vertex_map, corr)
    return RefinementPair(fine, coarse, corr, flags, ident)


def induced_equivalence(pair: RefinementPair) -> EquivalenceDeclaration:
    """Fine strata sharing a coarse stratum, declared pairwise equivalent."""
    groups: dict[str, list[str]] = {}
    for s, t in sorted(pair.stratum_correspondence.items()):
        groups.setdefault(t, []).append(s)
    return EquivalenceDeclaration.of((members[0], other) for members in groups.values() for other in members[1:])


# -- local homology refutation ---------------------------------------------


def _reduced_betti_f2(simplices: Iterable[tuple]) -> tuple[int, ...]:
    """Reduced Betti numbers over F_2, starting in degree -1."""
    cells = sorted(set(simplices), key=lambda s: (len(s), s))
    if not cells:
        return (1,)
    top = max(len(s) for s in cells) - 1
    by_dim = [[s for s in cells if len(s) == k + 1] for k in range(top + 1)]
    index = [{s: i for i, s in enumerate(b)} for b in by_dim]
    dims = [1] + [len(b) for b in by_dim]
    ranks = [0] * (top + 3)
    ranks[0] = 0
    ranks[1] = 1  # augmentation onto the single degree -1 cell
    for k in range(1, top + 1):
        M = [[0] * dims[k + 1] for _ in range(dims[k])]
        for j, s in enumerate(by_dim[k]):
            for _, face in boundary_faces(s):
                M[index[k - 1][face]][j] = 1
        ranks[k + 1] = rank(M, F2)
    return tuple(dims[i] - ranks[i] - ranks[i + 1] for i in range(top + 2))


def local_homology_signature(X: FilteredComplex, vertex: str) -> tuple[int, ...]:
    """``dim H_k(|X|, |X| - v; F_2)`` for k = 0, 1, ..., via the reduced homology of the link."""
    sig = list(_reduced_betti_f2(link(X, (vertex,))))
    while len(sig) > 1 and sig[-1] == 0:
        sig.pop()
    return tuple(sig)


@dataclass(frozen=True)
class RefutationResult:
    verdict: str  # "refuted" or "unknown"
    evidence: Mapping[str, list]

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "evidence": {k: [list(s) for s in v] for k, v in self.evidence.items()}}


def equivalence_refutation(X: FilteredComplex, first: str, second: str) -> RefutationResult:
    """Compare local homology at the vertices of two strata.

    Equivalent strata have points with homeomorphic neighbourhoods, so if no
    signature seen on one stratum appears on the other the equivalence is refuted.
    """
    sigs = {}
    for sid in (first, second):
        if sid not in X.strata:
            raise errors.UnknownStratum(f"{X.name} has no stratum {sid!r}", stratum=sid)
        sigs[sid] = sorted({local_homology_signature(X, v) for v in X.strata[sid].vertices})
    refuted = not set(sigs[first]) & set(sigs[second])
    return RefutationResult("refuted" if refuted else "unknown", sigs)


# -- homogeneity -----------------------------------------------------------


@dataclass(frozen=True)
class HomogeneityReport:
    homogeneous: bool
    p_homogeneous: bool
    witnesses: list[dict]

    def as_dict(self) -> dict:
        return {"homogeneous": self.homogeneous, "p_homogeneous": self.p_homogeneous, "witnesses": self.witnesses}


def check_homogeneous(X: FilteredComplex, p: Perversity, equiv: EquivalenceDeclaration) -> HomogeneityReport:
    equiv.validate(X)
    strata = X.strata
    classes = equiv.classes(strata.ids)
    witnesses = []
    for s in strata.singular():
        partners = sorted(o for o in classes[s.id] if strata[o].regular)
        if partners:
            witnesses.append(
                {"stratum": s.id, "equivalent_to": partners, "value": p[s.id], "top": s.codim - 2, "ok": p[s.id] <= s.codim - 2}
            )
    return HomogeneityReport(not witnesses, all(w["ok"] for w in witnesses), witnesses)


def codim_one_condition(pair: RefinementPair) -> list[str]:
    """Fine codimension-1 strata that land in a regular coarse stratum."""
    return sorted(
        s.id
        for s in pair.fine.strata
        if s.codim == 1 and pair.coarse.strata[pair.stratum_correspondence[s.id]].regular
    )


# -- reports ---------------------------------------------------------------


@dataclass
class Comparison:
    ring: str
    variant: str
    fine: list[HomologyGroup]
    coarse: list[HomologyGroup]
    verdict: str = ""

    @property
    def degree_verdicts(self) -> list[str]:
        length = max(len(self.fine), len(self.coarse))
        out = []
        for k in range(length):
            a = self.fine[k] if k < len(self.fine) else HomologyGroup(self.ring, 0)
            b = self.coarse[k] if k < len(self.coarse) else HomologyGroup(self.ring, 0)
            out.append("match" if (a.free_rank, a.torsion) == (b.free_rank, b.torsion) else "mismatch")
        return out

    @property
    def matches(self) -> bool:
        return all(v == "match" for v in self.degree_verdicts)

    def as_dict(self) -> dict:
        return {
            "ring": self.ring,
            "variant": self.variant,
            "verdict": self.verdict,
            "degrees": [
                {"degree": k, "fine": f.as_dict(), "coarse": c.as_dict(), "verdict": v}
                for k, (f, c, v) in enumerate(zip(self.fine, self.coarse, self.degree_verdicts))
            ],
        }


@dataclass
class InvarianceReport:
    pair: RefinementPair
    fine_perversity: Perversity
    coarse_perversity: Perversity
    hypotheses: dict[str, dict]
    comparisons: list[Comparison]

    def hypotheses_hold(self, variant: str) -> bool:
        needed = ["fine_K", "pushforward"]
        if variant == "tame":
            needed += ["codim_one", "fine_p_homogeneous", "coarse_p_homogeneous"]
        return all(self.hypotheses[name]["passed"] for name in needed)

    @property
    def verdict(self) -> str:
        verdicts = {c.verdict for c in self.comparisons}
        for v in ("mismatch", "no-claim, mismatch consistent", "no-claim"):
            if v in verdicts:
                return v
        return "match"

    def as_dict(self) -> dict:
        return {
            "pair": self.pair.as_dict(),
            "fine_perversity": self.fine_perversity.to_dict(),
            "coarse_perversity": self.coarse_perversity.to_dict(),
            "hypotheses": self.hypotheses,
            "comparisons": [c.as_dict() for c in self.comparisons],
            "verdict": self.verdict,
        }


def invariance_report(
    pair: RefinementPair,
    p_coarse: Perversity,
    rings: Sequence[Ring] = (ZZ,),
    variants: Sequence[str] = ("intersection",),
    fine_override: Perversity | Mapping[str, int] | None = None,
    equiv: EquivalenceDeclaration | None = None,
) -> InvarianceReport:
    """Compute both sides and explain any difference.

    The fine perversity is the pullback of ``p_coarse`` unless overridden.
    Hypothesis failures turn a verdict into "no-claim"; they never raise.
    """
    p_fine = pullback(pair.coarsening, p_coarse)
    if isinstance(fine_override, Perversity):
        p_fine = fine_override
    elif fine_override:
        p_fine = p_fine.with_values(fine_override)
    declared = induced_equivalence(pair)
    if equiv is not None:
        equiv.validate(pair.fine)
        declared = declared.merged(equiv)

    hyps: dict[str, dict] = {}
    fine_k: KReport = check_K_perversity(pair.fine, p_fine, declared, pair.coarsening)
    hyps["fine_K"] = fine_k.as_dict()
    coarse_k = check_K_perversity(pair.coarse, p_coarse, EquivalenceDeclaration())
    hyps["coarse_K"] = coarse_k.as_dict()
    try:
        pushed = pushforward(pair.coarsening, p_fine)
        agrees = pushed == p_coarse
        hyps["pushforward"] = {"passed": agrees, "values": dict(sorted(pushed.values.items()))}
    except errors.IHError as exc:
        hyps["pushforward"] = {"passed": False, "error": exc.as_dict()}
    bad_codim_one = codim_one_condition(pair)
    hyps["codim_one"] = {"passed": not bad_codim_one, "witnesses": bad_codim_one}
    fine_h = check_homogeneous(pair.fine, p_fine, declared)
    hyps["fine_p_homogeneous"] = {"passed": fine_h.p_homogeneous, **fine_h.as_dict()}
    coarse_h = check_homogeneous(pair.coarse, p_coarse, EquivalenceDeclaration())
    hyps["coarse_p_homogeneous"] = {"passed": coarse_h.p_homogeneous, **coarse_h.as_dict()}

    report = InvarianceReport(pair, p_fine, p_coarse, hyps, [])
    for ring in rings:
        for variant in variants:
            fine = homology(build_presentation(pair.fine, p_fine, ring, variant))
            coarse = homology(build_presentation(pair.coarse, p_coarse, ring, variant))
            comp = Comparison(ring.name, variant, fine, coarse)
            holds = report.hypotheses_hold(variant)
            if comp.matches:
                comp.verdict = "match" if holds else "no-claim"
            else:
                comp.verdict = "mismatch" if holds else "no-claim, mismatch consistent"
            report.comparisons.append(comp)
    return report
