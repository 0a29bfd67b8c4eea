"""Coefficient rings: the integers, the rationals and prime fields."""
from __future__ import annotations

from fractions import Fraction

from . import errors


class Ring:
    name: str
    is_field: bool
    modulus: int = 0

    def norm(self, x):
        return x

    def is_unit(self, x) -> bool:
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)


class Integers(Ring):
    name = "Z"
    is_field = False

    def norm(self, x):
        return int(x)

    def is_unit(self, x) -> bool:
        return x == 1 or x == -1

    def inv(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in Z")
        return x


class Rationals(Ring):
    name = "Q"
    is_field = True

    def norm(self, x):
        return Fraction(x)

    def is_unit(self, x) -> bool:
        return x != 0

    def inv(self, x):
        return 1 / Fraction(x)


class PrimeField(Ring):
    is_field = True

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise errors.UnknownRing(f"F_{p}: {p} is not prime")
        self.modulus = p
        self.name = f"F{p}"

    def norm(self, x):
        return int(x) % self.modulus

    def is_unit(self, x) -> bool:
        return x % self.modulus != 0

    def inv(self, x):
        return pow(int(x), -1, self.modulus)


ZZ = Integers()
QQ = Rationals()


def parse_ring(text: str) -> Ring:
    """``z``, ``q`` or ``f<p>`` (case-insensitive)."""
    t = text.strip().lower()
    if t == "z":
        return ZZ
    if t == "q":
        return QQ
    if t.startswith("f") and t[1:].isdigit():
        return PrimeField(int(t[1:]))
    raise errors.UnknownRing(f"unknown ring {text!r}; expected z, q or f<p>")
