"""Monomial orders, both as tuple sort keys and as packed-integer encodings."""
from __future__ import annotations

from dataclasses import dataclass

GREVLEX = "GREVLEX"
LEX = "LEX"
BLOCK = "BLOCK"

# bits per exponent field in the packed encodings; the top bit of every
# field is a guard so that subtraction borrows are detectable
FIELD_BITS = 16
_MAXEXP = (1 << (FIELD_BITS - 1)) - 1


class OrderOverflowError(OverflowError):
    pass


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = GREVLEX
    split: int = 0

    def __post_init__(self):
        if self.kind not in (GREVLEX, LEX, BLOCK):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == BLOCK and self.split < 0:
            raise ValueError("block split must be nonnegative")

    @property
    def name(self) -> str:
        if self.kind == BLOCK:
            return f"block{self.split}"
        return self.kind.lower()

    def key(self, e: tuple):
        """Sort key: larger key means larger monomial."""
        if self.kind == LEX:
            return e
        if self.kind == GREVLEX:
            return _grevlex_key(e)
        k = self.split
        return (e[:k], _grevlex_key(e[k:]))

    def packer(self, nvars: int) -> "Packer":
        return Packer(self, nvars)


def _grevlex_key(e: tuple):
    return (sum(e), tuple(-x for x in reversed(e)))


def grevlex() -> MonomialOrder:
    return MonomialOrder(GREVLEX)


def lex() -> MonomialOrder:
    return MonomialOrder(LEX)


def block(split: int) -> MonomialOrder:
    return MonomialOrder(BLOCK, split)


def parse_order(token: str) -> MonomialOrder:
    t = token.strip().lower()
    if t == "grevlex":
        return grevlex()
    if t == "lex":
        return lex()
    if t.startswith("block"):
        return block(int(t[5:]))
    raise ValueError(f"unknown monomial order {token!r}")


class Packer:
    """Encodes exponent tuples as ints.

    ``order_int(e)`` is additive and its integer order is the monomial order.
    ``exp_int(e)`` packs the raw exponents with guard bits; ``a | b`` iff
    ``((B | G) - A) & G == G`` where ``G`` is the guard mask.
    """

    def __init__(self, order: MonomialOrder, nvars: int):
        self.order = order
        self.n = nvars
        w = FIELD_BITS
        self.guard = sum(1 << (w * i + w - 1) for i in range(nvars))
        self.field_mask = (1 << w) - 1
        if order.kind == LEX:
            self.split = nvars
        elif order.kind == GREVLEX:
            self.split = 0
        else:
            self.split = min(order.split, nvars)
        self._rest_bits = w * (nvars - self.split)

    def exp_int(self, e) -> int:
        w = FIELD_BITS
        r = 0
        for x in e:
            if x > _MAXEXP:
                raise OrderOverflowError("exponent too large for packed monomials")
        # variable 0 in the most significant field
        for x in e:
            r = (r << w) | x
        return r

    def exp_tuple(self, E: int) -> tuple:
        w = FIELD_BITS
        m = self.field_mask
        out = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            out[i] = E & m
            E >>= w
        return tuple(out)

    def order_int(self, e) -> int:
        w = FIELD_BITS
        k = self.split
        hi = 0
        for x in e[:k]:
            hi = (hi << w) | x
        rest = e[k:]
        lo = 0
        if rest:
            # prefix sums S_len, S_len-1, ..., S_1 from most significant down
            sums = []
            acc = 0
            for x in rest:
                acc += x
                sums.append(acc)
            if acc > _MAXEXP:
                raise OrderOverflowError("degree too large for packed monomials")
            for s in reversed(sums):
                lo = (lo << w) | s
        return (hi << self._rest_bits) | lo
