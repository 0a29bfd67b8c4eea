"""Exception types shared by every module.

Each error carries a stable ``kind`` string (what the CLI prints in its
machine-readable error JSON) and the process exit code it maps to.
"""
from __future__ import annotations

PARSE = 2
VALIDATION = 3
SEMANTIC = 4
INTERNAL = 5


class IHError(Exception):
    kind = "Error"
    exit_code = INTERNAL

    def __init__(self, message: str = "", **detail):
        super().__init__(message or self.kind)
        self.message = message or self.kind
        self.detail = detail

    def as_dict(self) -> dict:
        out = {"error": self.kind, "message": self.message}
        if self.detail:
            out["detail"] = self.detail
        return out


def _make(name: str, code: int) -> type[IHError]:
    return type(name, (IHError,), {"kind": name, "exit_code": code})


ParseError = _make("ParseError", PARSE)

DuplicateVertex = _make("DuplicateVertex", VALIDATION)
LevelOutOfRange = _make("LevelOutOfRange", VALIDATION)
EmptyTopLevel = _make("EmptyTopLevel", VALIDATION)
DanglingVertexRef = _make("DanglingVertexRef", VALIDATION)
NotSimplicial = _make("NotSimplicial", VALIDATION)
StratumSplit = _make("StratumSplit", VALIDATION)
CodimViolation = _make("CodimViolation", VALIDATION)
NotFullSubcomplex = _make("NotFullSubcomplex", VALIDATION)
SimplexSetMismatch = _make("SimplexSetMismatch", VALIDATION)
NotARefinement = _make("NotARefinement", VALIDATION)
DimMismatch = _make("DimMismatch", VALIDATION)
MTooSmall = _make("MTooSmall", VALIDATION)
EmptyInput = _make("EmptyInput", VALIDATION)

UnknownSimplex = _make("UnknownSimplex", SEMANTIC)
MissingCodim = _make("MissingCodim", SEMANTIC)
UnknownStratum = _make("UnknownStratum", SEMANTIC)
MissingStratum = _make("MissingStratum", SEMANTIC)
RegularValueNonZero = _make("RegularValueNonZero", SEMANTIC)
UnknownStratumInEquiv = _make("UnknownStratumInEquiv", SEMANTIC)
SourceValueConflict = _make("SourceValueConflict", SEMANTIC)
NoSource = _make("NoSource", SEMANTIC)
NotAdmissible = _make("NotAdmissible", SEMANTIC)
DualityInequalityViolated = _make("DualityInequalityViolated", SEMANTIC)
NotAdmissibleInput = _make("NotAdmissibleInput", SEMANTIC)
NotAugmentable = _make("NotAugmentable", SEMANTIC)
UnknownRing = _make("UnknownRing", SEMANTIC)

InconsistentComplex = _make("InconsistentComplex", INTERNAL)
ShapeMismatch = _make("ShapeMismatch", INTERNAL)
InternalError = _make("InternalError", INTERNAL)
