"""Finite-field points of chart special fibers and the rank-parity spin test."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product

from .charts import SPECIAL, ChartIdeal, fiber_ring
from .fibers import generic_emptiness, specialize
from .groebner import Ideal, is_unit_ideal
from .matrix import PolyMatrix, mat_mul
from .poly import Poly

DEFAULT_ENUM_GUARD = 10_000_000


class EnumerationGuardError(RuntimeError):
    pass


# -- fast evaluation over F_p ----------------------------------------------


class CompiledPoly:
    """Integer-coefficient evaluator for a polynomial over F_p."""

    __slots__ = ("terms", "vars", "p")

    def __init__(self, f: Poly):
        self.p = f.ring.field.p
        self.terms = [(c, tuple((i, k) for i, k in enumerate(e) if k)) for e, c in f.terms.items()]
        self.vars = frozenset(i for _, t in self.terms for i, _ in t)

    def __call__(self, vals) -> int:
        acc = 0
        for c, t in self.terms:
            for i, k in t:
                c *= vals[i] if k == 1 else vals[i] ** k
            acc += c
        return acc % self.p


def _special_matrix(m: PolyMatrix):
    ring = fiber_ring(m.ring, SPECIAL)
    return [[CompiledPoly(m[i, j].to_ring(ring)) for j in range(m.cols)] for i in range(m.rows)]


def _eval_matrix(cm, vals) -> list:
    return [[f(vals) for f in row] for row in cm]


def rref_mod(rows: list, p: int) -> tuple:
    """Row-reduce an integer matrix over F_p. Returns (rows, pivot columns)."""
    a = [[x % p for x in r] for r in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        if inv != 1:
            a[r] = [x * inv % p for x in a[r]]
        pr = a[r]
        for i in range(nr):
            f = a[i][c]
            if i != r and f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], pr)]
        pivots.append(c)
        r += 1
    return a, pivots


def rank_mod(rows: list, p: int) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref_mod(rows, p)[1])


def solve_mod(rows: list, rhs: list, p: int, nc: int):
    """Solve rows * v = rhs over F_p: (particular, nullspace basis) or None."""
    a, piv = rref_mod([r + [b] for r, b in zip(rows, rhs)], p)
    if nc in piv:
        return None
    base = [0] * nc
    for r, pc in enumerate(piv):
        base[pc] = a[r][nc]
    pset = set(piv)
    basis = []
    for fcol in range(nc):
        if fcol in pset:
            continue
        w = [0] * nc
        w[fcol] = 1
        for r, pc in enumerate(piv):
            w[pc] = (-a[r][fcol]) % p
        basis.append(w)
    return base, basis


# -- enumeration of an ideal's points ---------------------------------------


def _check_q(ring, q):
    p = ring.field.p
    if q is None:
        return p
    if q != p:
        raise ValueError(f"only q = p is supported (got q={q}, p={p})")
    return q


def enumerate_ideal(ideal: Ideal, guard: int = DEFAULT_ENUM_GUARD):
    """All F_p-points of an ideal over a prime field, as value tuples.

    One variable in which every generator has degree <= 1 is solved for;
    the rest are scanned.
    """
    ring = ideal.ring
    p = ring.field.p
    gens = ideal.nonzero_generators()
    n = ring.nvars
    if any(g.is_constant() for g in gens):
        return
    if gens and is_unit_ideal(ideal):
        return
    solve_for = None
    if gens:
        for v in ring.variables:
            degs = [g.degree_in(v) for g in gens]
            if max(degs) == 1:
                solve_for = ring.index(v)
                break
    free = [i for i in range(n) if i != solve_for]
    if p ** len(free) > guard:
        raise EnumerationGuardError(f"search space {p}^{len(free)} exceeds guard {guard}")
    if solve_for is None:
        comp = [CompiledPoly(g) for g in gens]
        for vals in product(range(p), repeat=n):
            if all(f(vals) == 0 for f in comp):
                yield vals
        return
    v = solve_for
    # g = a*v + b with a, b free of v
    parts = []
    for g in gens:
        a = {}
        b = {}
        for e, c in g.terms.items():
            if e[v]:
                a[e[:v] + (0,) + e[v + 1:]] = c
            else:
                b[e] = c
        parts.append((CompiledPoly(Poly(ring, a)), CompiledPoly(Poly(ring, b))))
    vals = [0] * n
    for choice in product(range(p), repeat=n - 1):
        for i, x in zip(free, choice):
            vals[i] = x
        forced = None
        ok = True
        for a, b in parts:
            av = a(vals)
            bv = b(vals)
            if av:
                val = (-bv * pow(av, -1, p)) % p
                if forced is None:
                    forced = val
                elif forced != val:
                    ok = False
                    break
            elif bv:
                ok = False
                break
        if not ok:
            continue
        if forced is None:
            for x in range(p):
                vals[v] = x
                yield tuple(vals)
        else:
            vals[v] = forced
            # the forced value must also satisfy the generators with a = 0
            if all((a(vals) * forced + b(vals)) % p == 0 for a, b in parts):
                yield tuple(vals)


def solve_layered(ideal: Ideal, stages, guard: int = DEFAULT_ENUM_GUARD):
    """Points of ``ideal`` over F_p, fixing variables stage by stage.

    ``stages`` is a list of ("scan" | "linear", [variable names]) covering
    every variable once.  In a linear stage, generators that become affine
    in the stage variables are solved by Gaussian elimination; the rest are
    checked on each solution.
    """
    ring = ideal.ring
    p = ring.field.p
    n = ring.nvars
    stage_idx = [(kind, [ring.index(v) for v in names]) for kind, names in stages]
    seen = sorted(i for _, ix in stage_idx for i in ix)
    if seen != list(range(n)):
        raise ValueError("stages must cover every variable exactly once")
    gens = [CompiledPoly(g) for g in ideal.nonzero_generators()]
    if any(not g.vars and g.terms for g in gens):
        return
    known = set()
    per_stage = []
    for kind, ix in stage_idx:
        now = known | set(ix)
        per_stage.append([g for g in gens if g.vars <= now and not g.vars <= known])
        known = now
    compiled = [_stage_groups(polys, ix) if kind == "linear" else None
                for (kind, ix), polys in zip(stage_idx, per_stage)]
    budget = [guard]
    vals = [0] * n

    def spend(k):
        budget[0] -= k
        if budget[0] < 0:
            raise EnumerationGuardError(f"enumeration guard {guard} exceeded")

    def rec(level):
        if level == len(stage_idx):
            yield tuple(vals)
            return
        kind, ix = stage_idx[level]
        polys = per_stage[level]
        if kind == "scan":
            spend(p ** len(ix))
            for choice in product(range(p), repeat=len(ix)):
                for i, x in zip(ix, choice):
                    vals[i] = x
                if all(g(vals) == 0 for g in polys):
                    yield from rec(level + 1)
            return
        rows, rhs, deferred = [], [], []
        for g, groups in compiled[level]:
            row = [0] * len(ix)
            const = 0
            nonlinear = False
            for slot, terms in groups:
                v = 0
                for c, kf in terms:
                    for i, k in kf:
                        c *= vals[i] if k == 1 else vals[i] ** k
                    v += c
                v %= p
                if not v:
                    continue
                if slot is None:
                    const = v
                elif slot < 0:
                    nonlinear = True
                    break
                else:
                    row[slot] = v
            if nonlinear:
                deferred.append(g)
            elif any(row):
                rows.append(row)
                rhs.append((-const) % p)
            elif const:
                return
        sol = solve_mod(rows, rhs, p, len(ix)) if rows else ([0] * len(ix), _unit_basis(len(ix)))
        if sol is None:
            return
        base, basis = sol
        spend(p ** len(basis))
        for coeffs in product(range(p), repeat=len(basis)):
            for k, i in enumerate(ix):
                x = base[k]
                for c, b in zip(coeffs, basis):
                    if c:
                        x += c * b[k]
                vals[i] = x % p
            if all(g(vals) == 0 for g in deferred):
                yield from rec(level + 1)

    yield from rec(0)


def _stage_groups(polys, ix) -> list:
    """Per polynomial, terms grouped by their stage monomial.

    Slot is None for the constant part, the stage position for a linear
    monomial and -1 for anything of higher degree in the stage variables.
    """
    local = {i: k for k, i in enumerate(ix)}
    out = []
    for g in polys:
        groups = {}
        for c, t in g.terms:
            stage = [(local[i], k) for i, k in t if i in local]
            known = tuple((i, k) for i, k in t if i not in local)
            if not stage:
                slot = None
            elif len(stage) == 1 and stage[0][1] == 1:
                slot = stage[0][0]
            else:
                slot = ("hi",) + tuple(stage)
            groups.setdefault(slot, []).append((c, known))
        # higher-degree groups stay keyed by monomial so their coefficients sum correctly
        out.append((g, [(-1 if isinstance(s, tuple) else s, terms) for s, terms in groups.items()]))
    return out


def _unit_basis(k):
    return [[1 if i == j else 0 for i in range(k)] for j in range(k)]


# -- chart points ------------------------------------------------------------


def _cache(chart: ChartIdeal) -> dict:
    c = getattr(chart, "_spin_cache", None)
    if c is None:
        c = {}
        chart._spin_cache = c
    return c


def _simplified_layout(chart: ChartIdeal):
    """Map a reduced-ring point to simplified-ring values."""
    cache = _cache(chart)
    if "layout" not in cache:
        red = chart.reduced.ring
        sring = chart.simplified.ring
        pos = {v: i for i, v in enumerate(red.variables)}
        layout = []
        for v in sring.variables:
            if v in chart.pivot_values:
                layout.append(("const", chart.pivot_values[v]))
            else:
                layout.append(("var", pos[chart.renaming.get(v, v)]))
        cache["layout"] = layout
    return cache["layout"]


@dataclass
class ChartPoint:
    chart: ChartIdeal
    values: tuple

    @property
    def spec(self):
        return self.chart.spec

    @property
    def assignment(self) -> dict:
        return dict(zip(self.chart.reduced.ring.variables, self.values))

    def simplified_values(self) -> list:
        p = self.spec.p
        return [c % p if kind == "const" else self.values[c] for kind, c in _simplified_layout(self.chart)]

    def derived(self, name: str) -> list:
        """Evaluate a named simplified-ring matrix at this point (pi -> 0)."""
        cache = _cache(self.chart)
        key = ("mat", name)
        if key not in cache:
            cache[key] = _special_matrix(_flat_matrix(self.chart, name))
        return _eval_matrix(cache[key], self.simplified_values())

    def raw_values(self) -> tuple:
        cache = _cache(self.chart)
        if "phi" not in cache:
            sring = fiber_ring(self.chart.simplified.ring, SPECIAL)
            cache["phi"] = [CompiledPoly(self.chart.phi[v].to_ring(sring))
                            for v in self.chart.raw.ring.variables]
        vals = self.simplified_values()
        return tuple(f(vals) for f in cache["phi"])


def _flat_matrix(chart: ChartIdeal, name: str) -> PolyMatrix:
    nm = chart.named_matrices
    if name == "Zt":
        if chart.spec.chart == 1:
            return mat_mul(nm["Ytilde"], nm["D"]).T()
        z1t = nm["Z_1_simplified"].T()
        z2t = nm["Z_2_simplified"].T()
        rows = [a + b for a, b in zip(z1t.to_rows(), z2t.to_rows())]
        return PolyMatrix.from_rows(z1t.ring, rows)
    return nm[name]


def enumerate_points(chart: ChartIdeal, q: int | None = None, guard: int = DEFAULT_ENUM_GUARD):
    sp = specialize(chart.reduced, SPECIAL)
    _check_q(sp.ring, q)
    for vals in enumerate_ideal(sp, guard):
        yield ChartPoint(chart, vals)


def rank_t_plus_pi(pt: ChartPoint) -> int:
    """rank of (t + pi) on F_1 at a flat-chart point, via Z^t (or [Z_1^t Z_2^t])."""
    return rank_mod(pt.derived("Zt"), pt.spec.p)


def d_rank(pt: ChartPoint) -> int:
    return rank_mod(pt.derived("D"), pt.spec.p) if pt.chart.d_vars or pt.spec.chart == 1 else 0


def isotropy_rank(pt: ChartPoint) -> int:
    return rank_mod(pt.derived("Q"), pt.spec.p)


def is_worst_point(pt: ChartPoint) -> bool:
    return all(x == 0 for row in pt.derived("D") for x in row)


@dataclass
class SpinAudit:
    spec: object
    q: int
    points: int
    violations: int
    isotropy_histogram: dict
    worst_fiber_points: int
    rank_histogram: dict
    d_rank_mismatches: int = 0
    a_zero_mismatches: int = 0

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "q": self.q,
            "points": self.points,
            "violations": self.violations,
            "isotropy_histogram": {str(k): v for k, v in sorted(self.isotropy_histogram.items())},
            "worst_fiber_points": self.worst_fiber_points,
            "rank_histogram": {str(k): v for k, v in sorted(self.rank_histogram.items())},
            "d_rank_mismatches": self.d_rank_mismatches,
            "a_zero_mismatches": self.a_zero_mismatches,
        }


def spin_audit(chart: ChartIdeal, q: int | None = None, guard: int = DEFAULT_ENUM_GUARD) -> SpinAudit:
    s = chart.spec.s
    npts = viol = worst = dmis = amis = 0
    iso = Counter()
    ranks = Counter()
    has_d = chart.spec.chart == 1 or bool(chart.d_vars)
    has_q = "Q" in chart.named_matrices
    for pt in enumerate_points(chart, q, guard):
        npts += 1
        r = rank_t_plus_pi(pt)
        ranks[r] += 1
        if r % 2 != s % 2:
            viol += 1
        if has_q:
            iso[isotropy_rank(pt)] += 1
        if has_d:
            dzero = is_worst_point(pt)
            worst += dzero
            if chart.spec.chart == 1:
                if r != d_rank(pt):
                    dmis += 1
                azero = all(x == 0 for row in _raw_a(pt) for x in row)
                amis += azero != dzero
    return SpinAudit(chart.spec, chart.spec.p, npts, viol, dict(iso), worst, dict(ranks), dmis, amis)


def _raw_a(pt: ChartPoint) -> list:
    cache = _cache(pt.chart)
    if "rawA" not in cache:
        cache["rawA"] = _special_matrix(pt.chart.named_matrices["A"])
    return _eval_matrix(cache["rawA"], pt.raw_values())


# -- raw chart and the census ----------------------------------------------


def raw_stages(chart: ChartIdeal) -> list:
    spec = chart.spec
    ring = chart.raw.ring
    names = ring.variables
    if spec.chart == 1:
        piv = [f"y{i}_{j}" for i in spec.pivots for j in range(1, spec.s + 1)]
        ys = [v for v in names if v.startswith("y") and v not in piv]
        zs = [v for v in names if v.startswith("z")]
        return [("linear", piv), ("scan", ys), ("linear", zs)]
    piv = [f"a{i}_{c}" for i in spec.pivots for c in range(1, spec.s + 1)]
    aa = [v for v in names if v.startswith("a") and v not in piv]
    zp = [v for v in names if v.startswith("zp")]
    rest = [v for v in names if v.startswith("b") or (v.startswith("z") and not v.startswith("zp"))]
    stages = [("linear", piv), ("scan", aa), ("linear", zp), ("linear", rest), ("scan", ["x"])]
    return [st for st in stages if st[1]]


def raw_points(chart: ChartIdeal, guard: int = DEFAULT_ENUM_GUARD):
    sp = specialize(chart.raw, SPECIAL)
    return solve_layered(sp, raw_stages(chart), guard)


def raw_parity_matrix(chart: ChartIdeal) -> PolyMatrix:
    """(M_t + pi I) F_1 in raw coordinates; F_1 = [A; I] (chart 1) or [I; A] (chart 2)."""
    nm = chart.named_matrices
    ring = chart.raw.ring
    n = chart.spec.n
    A = nm["A"]
    I = PolyMatrix.identity(ring, n)
    rows = (A.to_rows() + I.to_rows()) if chart.spec.chart == 1 else (I.to_rows() + A.to_rows())
    F1 = PolyMatrix.from_rows(ring, rows)
    Mt = nm["M_t"] + PolyMatrix.identity(ring, 2 * n, ring.pi())
    return mat_mul(Mt, F1)


def raw_rank(chart: ChartIdeal, vals) -> int:
    cache = _cache(chart)
    if "rawpar" not in cache:
        cache["rawpar"] = _special_matrix(raw_parity_matrix(chart))
    return rank_mod(_eval_matrix(cache["rawpar"], vals), chart.spec.p)


@dataclass
class Census:
    spec: object
    q: int
    flat_points: int
    raw_points: int
    raw_passing: int
    equal: bool
    generic_empty: bool
    raw_validated: bool
    scope: str = "chart-local"
    only_flat: list = field(default_factory=list)
    only_raw: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(), "q": self.q, "flat_points": self.flat_points,
            "raw_points": self.raw_points, "raw_passing_parity": self.raw_passing,
            "equal": self.equal, "generic_empty": self.generic_empty,
            "raw_validated": self.raw_validated, "scope": self.scope,
        }


def spin_splitting_census(chart: ChartIdeal, q: int | None = None,
                          guard: int = DEFAULT_ENUM_GUARD) -> Census:
    """Flat-chart points (mapped to raw coordinates) vs raw points passing parity."""
    s = chart.spec.s
    sp_raw = specialize(chart.raw, SPECIAL)
    _check_q(sp_raw.ring, q)
    empty = generic_emptiness(chart)
    flat = set()
    if not empty:
        flat = {pt.raw_values() for pt in enumerate_points(chart, q, guard)}
    comp = [CompiledPoly(g) for g in sp_raw.nonzero_generators()]
    total = 0
    passing = set()
    valid = True
    for vals in raw_points(chart, guard):
        total += 1
        if any(g(vals) for g in comp):
            valid = False
        if raw_rank(chart, vals) % 2 == s % 2:
            passing.add(vals)
    only_f = sorted(flat - passing)[:5]
    only_r = sorted(passing - flat)[:5]
    return Census(chart.spec, chart.spec.p, len(flat), total, len(passing),
                  flat == passing and valid, empty, valid, only_flat=only_f, only_raw=only_r)


def spin_equals_splitting_census(charts, q: int | None = None, guard: int = DEFAULT_ENUM_GUARD) -> bool:
    if isinstance(charts, ChartIdeal):
        charts = [charts]
    return all(spin_splitting_census(c, q, guard).equal for c in charts)
