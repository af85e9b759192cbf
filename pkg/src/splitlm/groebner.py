"""Buchberger's algorithm and the ideal operations built on it.

Internally a polynomial is a dict from packed monomial keys to coefficients.
A key is ``(order_int(e) << EB) | exp_int(e)``: the high part sorts by the
monomial order, the low part carries the raw exponents with guard bits for
divisibility tests, and the whole thing is additive under multiplication.
"""
from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass

from .orders import FIELD_BITS, MonomialOrder, block, grevlex, parse_order
from .poly import Poly, RingCtx, mk_ring, poly_parse
from .fields import parse_field

DEFAULT_PAIR_GUARD = 200_000
EMPTY = "EMPTY"


class ResourceGuardError(RuntimeError):
    pass


class _Codec:
    def __init__(self, ring: RingCtx, order: MonomialOrder):
        self.ring = ring
        self.order = order
        self.n = ring.nvars
        self.packer = order.packer(self.n)
        self.eb = FIELD_BITS * self.n
        self.emask = (1 << self.eb) - 1
        self.guard = self.packer.guard

    def key(self, e) -> int:
        p = self.packer
        return (p.order_int(e) << self.eb) | p.exp_int(e)

    def exps(self, K: int) -> tuple:
        return self.packer.exp_tuple(K & self.emask)

    def pack(self, f: Poly) -> dict:
        return {self.key(e): c for e, c in f.terms.items()}

    def unpack(self, d: dict) -> Poly:
        return Poly(self.ring, {self.exps(K): c for K, c in d.items()})


class _Elem:
    __slots__ = ("K", "E", "exps", "supp", "tail", "sugar", "deg")

    def __init__(self, codec: _Codec, d: dict, sugar: int):
        K = max(d)
        self.K = K
        self.E = K & codec.emask
        self.exps = codec.exps(K)
        self.supp = sum(1 << i for i, x in enumerate(self.exps) if x)
        self.deg = sum(self.exps)
        self.tail = [(k, c) for k, c in d.items() if k != K]
        self.sugar = sugar

    def as_dict(self, one) -> dict:
        d = dict(self.tail)
        d[self.K] = one
        return d


def _monic(field, d: dict) -> dict:
    lc = d[max(d)]
    if lc == field.one:
        return d
    inv = field.inv(lc)
    mul = field.mul
    return {k: mul(c, inv) for k, c in d.items()}


def _reduce(field, guard, emask, d: dict, basis) -> dict:
    """Full reduction of ``d`` (consumed) modulo ``basis`` (list of _Elem)."""
    if not d or not basis:
        return d
    mul = field.mul
    sub = field.sub
    neg = field.neg
    zero = field.zero
    heap = [-k for k in d]
    heapq.heapify(heap)
    push = heapq.heappush
    pop = heapq.heappop
    rem = {}
    while heap:
        K = -pop(heap)
        c = d.pop(K, None)
        if c is None:
            continue
        E = K & emask
        EG = E | guard
        for g in basis:
            if (EG - g.E) & guard == guard:
                break
        else:
            rem[K] = c
            continue
        shift = K - g.K
        for kt, ct in g.tail:
            k2 = kt + shift
            v = d.get(k2)
            m = mul(c, ct)
            if v is None:
                d[k2] = neg(m)
                push(heap, -k2)
            else:
                v = sub(v, m)
                if v == zero:
                    del d[k2]
                else:
                    d[k2] = v
    return rem


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass
class GroebnerBasis:
    ring: RingCtx
    order: MonomialOrder
    polys: list

    def __post_init__(self):
        self._codec = _Codec(self.ring, self.order)
        self._elems = [_Elem(self._codec, self._codec.pack(g), 0) for g in self.polys]

    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant() and not self.polys[0].is_zero()

    def leading_monomials(self) -> list:
        return [e.exps for e in self._elems]

    def reduce(self, f: Poly) -> Poly:
        if f.ring != self.ring:
            raise ValueError("polynomial and basis live in different rings")
        c = self._codec
        d = _reduce(self.ring.field, c.guard, c.emask, c.pack(f), self._elems)
        return c.unpack(d)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (self.ring == other.ring and self.order == other.order
                and set(self.polys) == set(other.polys))


def buchberger(ideal, order: MonomialOrder | None = None,
               guard: int = DEFAULT_PAIR_GUARD) -> GroebnerBasis:
    """Reduced Groebner basis of ``ideal`` (an Ideal or a list of Polys)."""
    if isinstance(ideal, Ideal):
        ring, gens = ideal.ring, ideal.generators
    else:
        gens = list(ideal)
        if not gens:
            raise ValueError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    order = order or ring.order
    polys = _buchberger(ring, order, gens, guard)
    return GroebnerBasis(ring, order, polys)


def _buchberger(ring: RingCtx, order: MonomialOrder, gens, guard: int) -> list:
    field = ring.field
    codec = _Codec(ring, order)
    G_guard, emask = codec.guard, codec.emask
    one = field.one

    def unit():
        return [ring.one()]

    work = []
    for g in gens:
        if g.ring != ring:
            raise ValueError("generator from a different ring")
        if g.is_zero():
            continue
        if g.is_constant():
            return unit()
        work.append((codec.pack(g), g.total_degree()))
    if not work:
        return []

    elems: list = []
    G: list = []
    B: list = []  # pairs (sugar, lcmK, i, j, lcm exps)

    def update(ih: int):
        nonlocal G, B
        h = elems[ih]
        mh = h.exps
        C = list(G)
        D = []
        lcms = {ig: _lcm(mh, elems[ig].exps) for ig in C}
        for idx, ig in enumerate(C):
            g = elems[ig]
            L = lcms[ig]
            if h.supp & g.supp == 0:
                D.append(ig)
                continue
            redundant = False
            for ix in C[idx + 1:]:
                if _divides(lcms[ix], L):
                    redundant = True
                    break
            if not redundant:
                for ix in D:
                    if _divides(lcms[ix], L):
                        redundant = True
                        break
            if not redundant:
                D.append(ig)
        newpairs = []
        for ig in D:
            g = elems[ig]
            if h.supp & g.supp == 0:
                continue
            L = lcms[ig]
            degL = sum(L)
            sugar = max(h.sugar + degL - h.deg, g.sugar + degL - g.deg)
            newpairs.append((sugar, codec.key(L), ig, ih, L))
        kept = []
        for pr in B:
            _, _, i1, i2, L12 = pr
            if (not _divides(mh, L12) or _lcm(elems[i1].exps, mh) == L12
                    or _lcm(elems[i2].exps, mh) == L12):
                kept.append(pr)
        kept.extend(newpairs)
        B = kept
        G = [ig for ig in G if not _divides(mh, elems[ig].exps)]
        G.append(ih)

    # seed with the inputs, smallest leading term first
    work.sort(key=lambda t: max(t[0]))
    for d, sug in work:
        basis = [elems[i] for i in G]
        d = _reduce(field, G_guard, emask, d, basis)
        if not d:
            continue
        if max(d) >> codec.eb == 0:
            return unit()
        elems.append(_Elem(codec, _monic(field, d), sug))
        update(len(elems) - 1)

    done = 0
    while B:
        best = min(range(len(B)), key=lambda k: (B[k][0], B[k][1]))
        sugar, _, i, j, L = B.pop(best)
        done += 1
        if done > guard:
            raise ResourceGuardError(f"Groebner pair guard exceeded ({guard} S-pairs)")
        gi, gj = elems[i], elems[j]
        LK = codec.key(L)
        si = LK - gi.K
        sj = LK - gj.K
        d = {}
        for k, c in gi.tail:
            d[k + si] = c
        sub = field.sub
        neg = field.neg
        zero = field.zero
        for k, c in gj.tail:
            k2 = k + sj
            v = d.get(k2)
            if v is None:
                d[k2] = neg(c)
            else:
                v = sub(v, c)
                if v == zero:
                    del d[k2]
                else:
                    d[k2] = v
        if not d:
            continue
        d = _reduce(field, G_guard, emask, d, [elems[g] for g in G])
        if not d:
            continue
        if max(d) >> codec.eb == 0:
            return unit()
        elems.append(_Elem(codec, _monic(field, d), sugar))
        update(len(elems) - 1)

    # minimal basis, then interreduce
    final = [elems[i] for i in G]
    final = [
        e for e in final
        if not any(o is not e and _divides(o.exps, e.exps) for o in final)
    ]
    out = []
    for e in final:
        others = [o for o in final if o is not e]
        tail = _reduce(field, G_guard, emask, dict(e.tail), others)
        tail[e.K] = one
        out.append(tail)
    out.sort(key=max)
    return [codec.unpack(d) for d in out]


class Ideal:
    def __init__(self, ring: RingCtx, generators=()):
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = poly_parse(g, ring)
            if g.ring != ring:
                raise ValueError("generator from a different ring")
            gens.append(g)
        self.ring = ring
        self.generators = gens
        self._gb = {}
        self._lock = threading.Lock()

    def gb(self, order: MonomialOrder | None = None,
           guard: int = DEFAULT_PAIR_GUARD) -> GroebnerBasis:
        order = order or self.ring.order
        with self._lock:
            if order not in self._gb:
                self._gb[order] = buchberger(self, order, guard)
            return self._gb[order]

    def __add__(self, other: "Ideal") -> "Ideal":
        if isinstance(other, Ideal):
            if other.ring != self.ring:
                raise ValueError("ideals live in different rings")
            return Ideal(self.ring, self.generators + other.generators)
        return Ideal(self.ring, self.generators + list(other))

    def nonzero_generators(self) -> list:
        return [g for g in self.generators if not g.is_zero()]

    def to_ring(self, ring: RingCtx) -> "Ideal":
        return Ideal(ring, [g.to_ring(ring) for g in self.generators])

    def __repr__(self):
        return f"Ideal({self.ring!r}, {[str(g) for g in self.generators]})"


def _as_gb(x, guard=DEFAULT_PAIR_GUARD) -> GroebnerBasis:
    if isinstance(x, GroebnerBasis):
        return x
    if isinstance(x, Ideal):
        return x.gb(guard=guard)
    return buchberger(list(x), guard=guard)


def normal_form(f: Poly, gb) -> Poly:
    return _as_gb(gb).reduce(f)


def is_member(f: Poly, ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    if f.is_zero():
        return True
    return normal_form(f, _as_gb(ideal, guard)).is_zero()


def is_unit_ideal(ideal: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    return ideal.gb(guard=guard).is_unit()


def _fresh(ring: RingCtx, base: str) -> str:
    name = base
    k = 0
    while name in ring.variables:
        k += 1
        name = f"{base}{k}"
    return name


def eliminate(ideal: Ideal, drop, guard: int = DEFAULT_PAIR_GUARD) -> Ideal:
    """Generators of the elimination ideal, in the same ring."""
    drop = list(drop)
    ring = ideal.ring
    if not drop:
        return Ideal(ring, list(ideal.generators))
    for v in drop:
        ring.index(v)
    keep = [v for v in ring.variables if v not in drop]
    r2 = RingCtx(ring.field, tuple(drop + keep), block(len(drop)))
    gens = [g.to_ring(r2) for g in ideal.generators]
    gb = buchberger(gens, r2.order, guard) if gens else GroebnerBasis(r2, r2.order, [])
    k = len(drop)
    out = [g.to_ring(ring) for g in gb.polys if all(not any(e[:k]) for e in g.terms)]
    return Ideal(ring, out)


def _extend(ring: RingCtx, base: str):
    t = _fresh(ring, base)
    return mk_ring(ring.field, (t,) + ring.variables, ring.order), t


def intersect(a: Ideal, b: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> Ideal:
    if a.ring != b.ring:
        raise ValueError("ideals live in different rings")
    r2, t = _extend(a.ring, "t")
    tv = r2.var(t)
    gens = [tv * g.to_ring(r2) for g in a.generators]
    gens += [(1 - tv) * g.to_ring(r2) for g in b.generators]
    el = eliminate(Ideal(r2, gens), [t], guard)
    return Ideal(a.ring, [g.to_ring(a.ring) for g in el.generators])


def saturate(ideal: Ideal, f: Poly, guard: int = DEFAULT_PAIR_GUARD) -> Ideal:
    """I : f^infinity via the Rabinowitsch variable."""
    r2, t = _extend(ideal.ring, "t")
    gens = [g.to_ring(r2) for g in ideal.generators]
    gens.append(1 - r2.var(t) * f.to_ring(r2))
    el = eliminate(Ideal(r2, gens), [t], guard)
    return Ideal(ideal.ring, [g.to_ring(ideal.ring) for g in el.generators])


def radical_member(f: Poly, ideal: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    if f.is_zero():
        return True
    r2, t = _extend(ideal.ring, "t")
    gens = [g.to_ring(r2) for g in ideal.generators]
    gens.append(1 - r2.var(t) * f.to_ring(r2))
    return buchberger(gens, r2.order, guard).is_unit()


def min_hitting_set(sets: list, nvars: int) -> int:
    """Size of the smallest variable set meeting every support bitmask."""
    sets = sorted(set(sets), key=lambda s: bin(s).count("1"))
    # keep only inclusion-minimal supports
    minimal = []
    for s in sets:
        if not any(m & s == m for m in minimal):
            minimal.append(s)
    best = [nvars + 1]

    def search(chosen: int, size: int):
        if size >= best[0]:
            return
        unhit = None
        for s in minimal:
            if s & chosen == 0:
                if unhit is None or bin(s).count("1") < bin(unhit).count("1"):
                    unhit = s
        if unhit is None:
            best[0] = size
            return
        s = unhit
        while s:
            low = s & -s
            search(chosen | low, size + 1)
            s ^= low

    search(0, 0)
    return best[0]


def krull_dim(ideal: Ideal, guard: int = DEFAULT_PAIR_GUARD):
    """Krull dimension, or ``EMPTY`` for the unit ideal."""
    gb = ideal.gb(grevlex(), guard)
    if gb.is_unit():
        return EMPTY
    n = ideal.ring.nvars
    supports = [sum(1 << i for i, x in enumerate(e) if x) for e in gb.leading_monomials()]
    if not supports:
        return n
    return n - min_hitting_set(supports, n)


# -- text format ----------------------------------------------------------


def ideal_to_text(ideal: Ideal) -> str:
    r = ideal.ring
    lines = [f"ring {r.field.token()} vars {','.join(r.variables)} order {r.order.name}"]
    lines += [str(g) for g in ideal.generators]
    return "\n".join(lines) + "\n"


def ideal_from_text(text: str) -> Ideal:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty ideal text")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "ring" or head[2] != "vars" or head[4] != "order":
        raise ValueError(f"malformed ideal header {lines[0]!r}")
    field = parse_field(head[1])
    variables = [v for v in head[3].split(",") if v]
    ring = mk_ring(field, variables, parse_order(head[5]))
    return Ideal(ring, [poly_parse(ln, ring) for ln in lines[1:]])
