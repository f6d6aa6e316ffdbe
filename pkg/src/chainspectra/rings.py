"""Exact coefficient arithmetic over Z, Q, and prime fields F_p.

Every matrix, complex, and diagram in this package is parametrized by one
of these rings.  Coefficients are plain Python values (int for Z and F_p,
Fraction for Q), always normalized through canon() before storage, so
equality of stored values is plain ==.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Ring:
    """Common interface; concrete rings override the arithmetic hooks."""

    @property
    def is_field(self) -> bool:
        return False

    def zero(self):
        return self.canon(0)

    def one(self):
        return self.canon(1)

    def canon(self, x):
        raise NotImplementedError

    def add(self, a, b):
        return self.canon(a + b)

    def sub(self, a, b):
        return self.canon(a - b)

    def mul(self, a, b):
        return self.canon(a * b)

    def neg(self, a):
        return self.canon(-a)

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def divides(self, a, b) -> bool:
        """True when a*q == b is solvable."""
        raise NotImplementedError

    def exact_div(self, b, a):
        """The q with a*q == b; caller must ensure divisibility."""
        raise NotImplementedError

    def pivot_key(self, a, row: int, col: int):
        """Sort key used to pick SNF pivots deterministically."""
        raise NotImplementedError

    def fmt(self, a) -> str:
        return str(a)

    def parse(self, s: str):
        raise NotImplementedError

    def token(self) -> str:
        """CLI/JSON-friendly name, e.g. "Z" or "Fp:7"."""
        raise NotImplementedError


@dataclass(frozen=True)
class ZRing(Ring):
    def canon(self, x):
        assert isinstance(x, int) and not isinstance(x, bool)
        return x

    def is_unit(self, a) -> bool:
        return a in (1, -1)

    def inv(self, a):
        assert self.is_unit(a)
        return a

    def divides(self, a, b) -> bool:
        if a == 0:
            return b == 0
        return b % a == 0

    def exact_div(self, b, a):
        assert a != 0 and b % a == 0
        return b // a

    def pivot_key(self, a, row: int, col: int):
        # smallest absolute value first, ties broken by position
        return (abs(a), row, col)

    def parse(self, s: str):
        return int(s)

    def token(self) -> str:
        return "Z"


@dataclass(frozen=True)
class QRing(Ring):
    @property
    def is_field(self) -> bool:
        return True

    def canon(self, x):
        return Fraction(x)

    def is_unit(self, a) -> bool:
        return a != 0

    def inv(self, a):
        assert a != 0
        return Fraction(1) / a

    def divides(self, a, b) -> bool:
        return a != 0 or b == 0

    def exact_div(self, b, a):
        assert a != 0
        return self.canon(Fraction(b) / a)

    def pivot_key(self, a, row: int, col: int):
        # any nonzero entry works; take the first by position
        return (row, col)

    def parse(self, s: str):
        return Fraction(s)

    def token(self) -> str:
        return "Q"


@dataclass(frozen=True)
class FpRing(Ring):
    p: int

    def __post_init__(self):
        assert _is_prime(self.p), f"modulus {self.p} is not prime"

    @property
    def is_field(self) -> bool:
        return True

    def canon(self, x):
        assert isinstance(x, int) and not isinstance(x, bool)
        return x % self.p

    def is_unit(self, a) -> bool:
        return a % self.p != 0

    def inv(self, a):
        assert self.is_unit(a)
        return pow(a, -1, self.p)

    def divides(self, a, b) -> bool:
        return a % self.p != 0 or b % self.p == 0

    def exact_div(self, b, a):
        return self.canon(b * self.inv(a))

    def pivot_key(self, a, row: int, col: int):
        return (row, col)

    def parse(self, s: str):
        return self.canon(int(s))

    def token(self) -> str:
        return f"Fp:{self.p}"


Z = ZRing()
Q = QRing()


def Fp(p: int) -> FpRing:
    return FpRing(p)


def ring_from_token(token: str) -> Ring:
    """Inverse of Ring.token(): "Z", "Q", or "Fp:<prime>"."""
    if token == "Z":
        return Z
    if token == "Q":
        return Q
    if token.startswith("Fp:"):
        return Fp(int(token.split(":", 1)[1]))
    raise ValueError(f"unknown ring token {token!r}")


CONNECTIVE = "connective"
UNBOUNDED = "unbounded"
VARIANTS = (CONNECTIVE, UNBOUNDED)


@dataclass(frozen=True)
class Backend:
    """A coefficient ring together with a boundedness variant.

    Connective complexes live in non-negative degrees; unbounded ones may
    have support anywhere.  Most constructions preserve the backend, and
    mixing backends in one operation is an error.
    """

    ring: Ring
    variant: str

    def __post_init__(self):
        assert self.variant in VARIANTS

    @property
    def connective(self) -> bool:
        return self.variant == CONNECTIVE

    def token(self) -> str:
        return f"{self.ring.token()}/{self.variant}"
