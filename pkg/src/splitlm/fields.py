"""Exact coefficient fields: Q, Q(pi) with pi^2 = p, and F_p with pi -> 0.

Field objects are stateless singletons per parameter; elements are plain
Python values (int for F_p, int/Fraction for Q, (a, b) pairs for Q(pi)) so
that polynomial arithmetic can stay close to the metal.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

RATIONAL = "RATIONAL"
RAMIFIED_QUADRATIC = "RAMIFIED_QUADRATIC"
PRIME_FIELD = "PRIME_FIELD"


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _q(x):
    # keep integral rationals as ints: int arithmetic is much cheaper
    if type(x) is int:
        return x
    return x.numerator if x.denominator == 1 else x


def _fmt_rational(x) -> str:
    x = _q(x)
    if type(x) is int:
        return str(x)
    return f"{x.numerator}/{x.denominator}"


class CoefField:
    kind: str
    p: int | None = None

    def __eq__(self, other):
        return type(self) is type(other) and self.p == other.p

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return self.token()

    # element protocol, overridden below
    zero: object
    one: object

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def is_one(self, a) -> bool:
        return a == self.one

    def pow(self, a, k: int):
        r = self.one
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r


class RationalField(CoefField):
    kind = RATIONAL
    zero = 0
    one = 1

    def token(self) -> str:
        return "QQ"

    def add(self, a, b):
        return _q(a + b)

    def sub(self, a, b):
        return _q(a - b)

    def mul(self, a, b):
        return _q(a * b)

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return _q(Fraction(1) / a)

    def from_int(self, n: int):
        return n

    def from_fraction(self, x: Fraction):
        return _q(x)

    def pi(self):
        raise FieldError("pi is not an element of QQ")

    def is_integral(self, a, p: int) -> bool:
        return Fraction(a).denominator % p != 0

    def format(self, a) -> str:
        return _fmt_rational(a)

    def is_negative(self, a) -> bool:
        return a < 0

    def elements(self):
        raise FieldError("QQ is infinite")


class RamifiedQuadraticField(CoefField):
    """Q(pi), pi^2 = p. Elements (a, b) mean a + b*pi."""

    kind = RAMIFIED_QUADRATIC
    zero = (0, 0)
    one = (1, 0)

    def __init__(self, p: int):
        self.p = p

    def token(self) -> str:
        return f"QQ(pi^2={self.p})"

    def add(self, x, y):
        return (_q(x[0] + y[0]), _q(x[1] + y[1]))

    def sub(self, x, y):
        return (_q(x[0] - y[0]), _q(x[1] - y[1]))

    def mul(self, x, y):
        a, b = x
        c, d = y
        if b == 0 and d == 0:
            return (_q(a * c), 0)
        return (_q(a * c + self.p * b * d), _q(a * d + b * c))

    def neg(self, x):
        return (-x[0], -x[1])

    def inv(self, x):
        a, b = x
        if b == 0:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return (_q(Fraction(1) / a), 0)
        # p is not a rational square, so the norm vanishes only at 0
        norm = Fraction(a * a - self.p * b * b)
        return (_q(a / norm), _q(-b / norm))

    def from_int(self, n: int):
        return (n, 0)

    def from_fraction(self, x: Fraction):
        return (_q(x), 0)

    def pi(self):
        return (0, 1)

    def format(self, x) -> str:
        a, b = x
        if b == 0:
            return _fmt_rational(a)
        if b == 1:
            bs = "pi"
        elif b == -1:
            bs = "-pi"
        else:
            bs = f"{_fmt_rational(b)}*pi"
        if a == 0:
            return bs
        sep = "" if bs.startswith("-") else "+"
        return f"({_fmt_rational(a)}{sep}{bs})"

    def is_negative(self, x) -> bool:
        a, b = x
        return (a < 0) if a != 0 else (b < 0)


class PrimeField(CoefField):
    """F_p; the uniformizer pi is sent to 0 before entry."""

    kind = PRIME_FIELD
    zero = 0
    one = 1

    def __init__(self, p: int):
        self.p = p

    def token(self) -> str:
        return f"GF({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def from_int(self, n: int):
        return n % self.p

    def from_fraction(self, x: Fraction):
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise FieldError(f"{x} is not representable in GF({self.p})")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def pi(self):
        return 0

    def format(self, a) -> str:
        return str(a)

    def is_negative(self, a) -> bool:
        return False

    def elements(self):
        return range(self.p)


def _check_p(p: int) -> None:
    if not isinstance(p, int) or p % 2 == 0 or not is_prime(p):
        raise FieldError(f"p must be an odd prime, got {p!r}")


@lru_cache(maxsize=None)
def rational() -> RationalField:
    return RationalField()


@lru_cache(maxsize=None)
def ramified(p: int) -> RamifiedQuadraticField:
    _check_p(p)
    return RamifiedQuadraticField(p)


@lru_cache(maxsize=None)
def prime_field(p: int) -> PrimeField:
    _check_p(p)
    return PrimeField(p)


def parse_field(token: str) -> CoefField:
    """Inverse of ``CoefField.token``."""
    t = token.strip().replace(" ", "")
    if t == "QQ":
        return rational()
    if t.startswith("QQ(pi^2=") and t.endswith(")"):
        return ramified(int(t[len("QQ(pi^2="):-1]))
    if t.startswith("GF(") and t.endswith(")"):
        return prime_field(int(t[3:-1]))
    raise FieldError(f"unknown field token {token!r}")
