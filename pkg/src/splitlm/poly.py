"""Sparse multivariate polynomials over the coefficient fields."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .fields import CoefField, FieldError, PRIME_FIELD
from .orders import MonomialOrder, grevlex


class RingMismatchError(ValueError):
    pass


class PolyParseError(ValueError):
    pass


_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True, eq=True)
class RingCtx:
    field: CoefField
    variables: tuple
    order: MonomialOrder

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        seen = set()
        for v in self.variables:
            if not _IDENT.match(v) or v == "pi":
                raise ValueError(f"bad variable name {v!r}")
            if v in seen:
                raise ValueError(f"duplicate variable name {v!r}")
            seen.add(v)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.variables)})

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        """Constant polynomial from an int, Fraction or field element."""
        c = self.coerce(c)
        if self.field.is_zero(c):
            return Poly(self, {})
        return Poly(self, {(0,) * self.nvars: c})

    def coerce(self, c):
        f = self.field
        if isinstance(c, bool):
            c = int(c)
        if isinstance(c, int):
            return f.from_int(c)
        if isinstance(c, Fraction):
            return f.from_fraction(c)
        return c

    def pi(self) -> "Poly":
        return self.const(self.field.pi())

    def var(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): self.field.one})

    def gens(self) -> list:
        return [self.var(v) for v in self.variables]

    def parse(self, text: str) -> "Poly":
        return poly_parse(text, self)

    def with_field(self, field: CoefField) -> "RingCtx":
        return RingCtx(field, self.variables, self.order)

    def with_order(self, order: MonomialOrder) -> "RingCtx":
        return RingCtx(self.field, self.variables, order)

    def with_variables(self, variables) -> "RingCtx":
        return RingCtx(self.field, tuple(variables), self.order)

    def __repr__(self):
        return f"RingCtx({self.field.token()}, {list(self.variables)}, {self.order.name})"


def mk_ring(field: CoefField, variables, order: MonomialOrder | None = None) -> RingCtx:
    return RingCtx(field, tuple(variables), order or grevlex())


class Poly:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingCtx, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, ring: RingCtx, terms: dict) -> "Poly":
        z = ring.field.zero
        return cls(ring, {e: c for e, c in terms.items() if c != z})

    # -- arithmetic -------------------------------------------------------

    def _other(self, g) -> "Poly":
        if isinstance(g, Poly):
            if g.ring is not self.ring and g.ring != self.ring:
                raise RingMismatchError("operands live in different rings")
            return g
        return self.ring.const(g)

    def __add__(self, g):
        g = self._other(g)
        f = self.ring.field
        out = dict(self.terms)
        z = f.zero
        for e, c in g.terms.items():
            if e in out:
                s = f.add(out[e], c)
                if s == z:
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.field
        return Poly(self.ring, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, g):
        return self + (-self._other(g))

    def __rsub__(self, g):
        return self._other(g) - self

    def __mul__(self, g):
        g = self._other(g)
        f = self.ring.field
        z = f.zero
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in g.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = f.mul(c1, c2)
                if e in out:
                    s = f.add(out[e], c)
                    if s == z:
                        del out[e]
                    else:
                        out[e] = s
                elif c != z:
                    out[e] = c
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        r = self.ring.one()
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def scale(self, c) -> "Poly":
        f = self.ring.field
        c = self.ring.coerce(c)
        if f.is_zero(c):
            return self.ring.zero()
        return Poly(self.ring, {e: f.mul(x, c) for e, x in self.terms.items()})

    def mul_term(self, e: tuple, c) -> "Poly":
        f = self.ring.field
        return Poly(
            self.ring,
            {tuple(a + b for a, b in zip(e0, e)): f.mul(x, c) for e0, x in self.terms.items()},
        )

    # -- comparison -------------------------------------------------------

    def __eq__(self, g):
        if isinstance(g, Poly):
            return self.ring == g.ring and self.terms == g.terms
        try:
            return self.terms == self.ring.const(g).terms
        except (TypeError, FieldError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- structure --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def coeff(self, e: tuple):
        return self.terms.get(tuple(e), self.ring.field.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables_used(self) -> list:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return [self.ring.variables[i] for i in sorted(used)]

    def sorted_terms(self, order: MonomialOrder | None = None) -> list:
        key = (order or self.ring.order).key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder | None = None):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = (order or self.ring.order).key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def lm(self, order=None) -> tuple:
        return self.leading_term(order)[0]

    def lc(self, order=None):
        return self.leading_term(order)[1]

    def monic(self, order=None) -> "Poly":
        if not self.terms:
            return self
        f = self.ring.field
        return self.scale(f.inv(self.lc(order)))

    def diff(self, name: str) -> "Poly":
        i = self.ring.index(name)
        f = self.ring.field
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                c2 = f.mul(c, f.from_int(k))
                if c2 != f.zero:
                    e2 = e[:i] + (k - 1,) + e[i + 1:]
                    out[e2] = c2
        return Poly(self.ring, out)

    # -- evaluation and substitution -------------------------------------

    def evaluate(self, point) -> object:
        """Value at ``point`` (mapping name -> field element, or a sequence)."""
        f = self.ring.field
        vals = _point_values(self.ring, point)
        acc = f.zero
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    t = f.mul(t, f.pow(vals[i], k))
            acc = f.add(acc, t)
        return acc

    def subs(self, mapping: dict, target: RingCtx | None = None) -> "Poly":
        """Substitute polynomials for variables.

        ``mapping`` sends variable names of this ring to Polys in ``target``
        (default: this ring); unmapped variables are carried over by name.
        """
        target = target or self.ring
        images = []
        for v in self.ring.variables:
            if v in mapping:
                g = mapping[v]
                images.append(g if isinstance(g, Poly) else target.const(g))
            else:
                images.append(target.var(v))
        out = target.zero()
        powers = {}
        conv = _coef_converter(self.ring.field, target.field)
        for e, c in self.terms.items():
            t = target.const(conv(c))
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = images[i] ** k
                    t = t * powers[key]
            out = out + t
        return out

    def to_ring(self, target: RingCtx) -> "Poly":
        """Rename into ``target`` by variable name, converting coefficients."""
        conv = _coef_converter(self.ring.field, target.field)
        # variables absent from the target must not occur in self
        idx = [target._index.get(v) for v in self.ring.variables]
        n = target.nvars
        z = target.field.zero
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * n
            for i, k in enumerate(e):
                if k:
                    j = idx[i]
                    if j is None:
                        raise KeyError(f"variable {self.ring.variables[i]!r} not in target ring")
                    e2[j] = k
            c2 = conv(c)
            if c2 == z:
                continue
            e2 = tuple(e2)
            if e2 in out:
                s = target.field.add(out[e2], c2)
                if s == z:
                    del out[e2]
                else:
                    out[e2] = s
            else:
                out[e2] = c2
        return Poly(target, out)

    # -- printing ---------------------------------------------------------

    def __str__(self):
        return poly_print(self)

    def __repr__(self):
        return f"Poly({poly_print(self)!r})"


def _point_values(ring: RingCtx, point) -> list:
    if isinstance(point, dict):
        vals = []
        for v in ring.variables:
            if v not in point:
                raise KeyError(f"missing assignment for variable {v!r}")
            vals.append(ring.coerce(point[v]))
        return vals
    vals = list(point)
    if len(vals) != ring.nvars:
        raise KeyError("point length does not match the variable count")
    return [ring.coerce(x) for x in vals]


def _coef_converter(src: CoefField, dst: CoefField):
    if src == dst:
        return lambda c: c
    if dst.kind == PRIME_FIELD:
        if src.kind == "RAMIFIED_QUADRATIC":
            # pi -> 0
            return lambda c: dst.from_fraction(Fraction(c[0]))
        return lambda c: dst.from_fraction(Fraction(c))
    if dst.kind == "RAMIFIED_QUADRATIC" and src.kind == "RATIONAL":
        return lambda c: (c, 0)
    if dst.kind == "RATIONAL" and src.kind == "RAMIFIED_QUADRATIC":
        def conv(c):
            if c[1] != 0:
                raise FieldError("coefficient involves pi")
            return c[0]
        return conv
    raise FieldError(f"no coefficient map {src.token()} -> {dst.token()}")


def convert_coefficient(c, src: CoefField, dst: CoefField):
    return _coef_converter(src, dst)(c)


# -- printing -----------------------------------------------------------


def _monomial_str(ring: RingCtx, e: tuple) -> str:
    parts = []
    for v, k in zip(ring.variables, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def poly_print(f: Poly) -> str:
    if not f.terms:
        return "0"
    field = f.ring.field
    out = []
    for e, c in f.sorted_terms():
        m = _monomial_str(f.ring, e)
        cs = field.format(c)
        if not m:
            s = cs
        elif cs == "1":
            s = m
        elif cs == "-1":
            s = "-" + m
        else:
            s = f"{cs}*{m}"
        if not out:
            out.append(s)
        elif s.startswith("-"):
            out.append(" - " + s[1:])
        else:
            out.append(" + " + s)
    return "".join(out)


# -- parsing ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(\S))")


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, op = m.groups()
        if num is not None:
            toks.append(("num", int(num), m.start(1)))
        elif name is not None:
            toks.append(("name", name, m.start(2)))
        else:
            if op not in "+-*^/()":
                raise PolyParseError(f"unexpected character {op!r} at {m.start(3)}")
            toks.append(("op", op, m.start(3)))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: RingCtx):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise PolyParseError(f"expected {op!r} at position {t[2]}")

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            raise PolyParseError("empty expression")
        f = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolyParseError(f"unexpected token {t[1]!r} at position {t[2]}")
        return f

    def expr(self) -> Poly:
        f = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                g = self.term()
                f = f + g if t[1] == "+" else f - g
            else:
                return f

    def term(self) -> Poly:
        f = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                g = self.unary()
                if t[1] == "*":
                    f = f * g
                else:
                    if not g.is_constant() or g.is_zero():
                        raise PolyParseError(f"division by a non-constant or zero at position {t[2]}")
                    field = self.ring.field
                    f = f.scale(field.inv(g.constant_coeff()))
            else:
                return f

    def unary(self) -> Poly:
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            f = self.unary()
            return -f if t[1] == "-" else f
        return self.power()

    def power(self) -> Poly:
        f = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            k = self.take()
            if k[0] != "num":
                raise PolyParseError(f"exponent must be a nonnegative integer literal at position {k[2]}")
            f = f ** k[1]
        return f

    def atom(self) -> Poly:
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return self.ring.const(val)
        if kind == "name":
            if val == "pi":
                try:
                    return self.ring.pi()
                except FieldError as exc:
                    raise PolyParseError(str(exc)) from None
            try:
                return self.ring.var(val)
            except KeyError:
                raise PolyParseError(f"unknown variable {val!r} at position {pos}") from None
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect_op(")")
            return f
        if kind == "end":
            raise PolyParseError("unexpected end of input")
        raise PolyParseError(f"unexpected token {val!r} at position {pos}")


def poly_parse(text: str, ring: RingCtx) -> Poly:
    try:
        return _Parser(text, ring).parse()
    except ZeroDivisionError:
        raise PolyParseError("coefficient not representable (division by zero in the field)") from None
    except FieldError as exc:
        raise PolyParseError(str(exc)) from None
