"""Generic and special fibers of chart ideals, and their geometry."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .charts import GENERIC, SPECIAL, ChartIdeal, fiber_ring
from .groebner import (DEFAULT_PAIR_GUARD, EMPTY, Ideal, intersect, is_member,
                       is_unit_ideal, krull_dim)
from .matrix import scalar_rank
from .poly import Poly


class ComponentSplitError(ValueError):
    pass


def specialize(ideal: Ideal, fiber: str) -> Ideal:
    """SPECIAL: a + b*pi -> a mod p; GENERIC: unchanged."""
    ring = fiber_ring(ideal.ring, fiber)
    if ring == ideal.ring:
        return ideal
    return Ideal(ring, [g.to_ring(ring) for g in ideal.generators])


def specialize_poly(f: Poly, fiber: str = SPECIAL) -> Poly:
    return f.to_ring(fiber_ring(f.ring, fiber))


def generic_emptiness(chart: ChartIdeal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    return is_unit_ideal(chart.reduced, guard)


def _d_var(chart: ChartIdeal) -> str:
    if len(chart.d_vars) != 1:
        raise ComponentSplitError("component split needs exactly one d variable (s in {2, 3})")
    return chart.d_vars[0]


def special_components(chart: ChartIdeal) -> tuple:
    """(I1, I2) = (<d>, <cofactor>) from the special-fiber generator d * cofactor."""
    if chart.principal is None:
        raise ComponentSplitError("the chart is not principal after pivot substitution")
    d = _d_var(chart)
    fbar = specialize_poly(chart.principal)
    ring = fbar.ring
    i = ring.index(d)
    if fbar.is_zero() or any(e[i] == 0 for e in fbar.terms):
        raise ComponentSplitError(f"special-fiber generator {fbar} is not divisible by {d}")
    cof = Poly(ring, {e[:i] + (e[i] - 1,) + e[i + 1:]: c for e, c in fbar.terms.items()})
    return Ideal(ring, [ring.var(d)]), Ideal(ring, [cof])


def same_ideal(a: Ideal, b: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    return (all(is_member(g, b, guard) for g in a.generators)
            and all(is_member(g, a, guard) for g in b.generators))


def is_intersection(j: Ideal, i1: Ideal, i2: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    return same_ideal(intersect(i1, i2, guard), j, guard)


def reducedness_check(chart: ChartIdeal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    i1, i2 = special_components(chart)
    return is_intersection(specialize(chart.reduced, SPECIAL), i1, i2, guard)


def jacobian_minors(gens: list, size: int, limit: int = 5000) -> list:
    ring = gens[0].ring
    jac = [[g.diff(v) for v in ring.variables] for g in gens]
    rows = list(range(len(gens)))
    cols = list(range(ring.nvars))
    out = []
    for rs in combinations(rows, size):
        for cs in combinations(cols, size):
            out.append(_det([[jac[r][c] for c in cs] for r in rs]))
            if len(out) > limit:
                raise ValueError("too many Jacobian minors")
    return [m for m in out if not m.is_zero()]


def _det(m: list) -> Poly:
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = m[0][0].ring.zero()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in m[1:]]
        t = m[0][j] * _det(sub)
        acc = acc + t if j % 2 == 0 else acc - t
    return acc


def smoothness_check(component: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    """Jacobian criterion: ideal + c x c minors is the unit ideal, c = codimension."""
    dim = krull_dim(component, guard)
    if dim == EMPTY:
        return True
    gens = component.nonzero_generators()
    c = component.ring.nvars - dim
    if c == 0:
        return True
    minors = jacobian_minors(gens, c)
    return is_unit_ideal(Ideal(component.ring, gens + minors), guard)


def transversality_check(i1: Ideal, i2: Ideal, guard: int = DEFAULT_PAIR_GUARD) -> bool:
    s = i1 + i2
    d1 = krull_dim(i1, guard)
    ds = krull_dim(s, guard)
    if d1 == EMPTY or ds == EMPTY:
        return False
    return ds == d1 - 1 and smoothness_check(s, guard)


def quadric_rank(f: Poly) -> int:
    """Rank of the symmetric matrix of f homogenized by an extra variable (deg f <= 2, p odd)."""
    if f.total_degree() > 2:
        raise ValueError("not a quadric")
    field = f.ring.field
    n = f.ring.nvars
    half = field.inv(field.from_int(2))
    m = [[field.zero] * (n + 1) for _ in range(n + 1)]
    for e, c in f.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = (idx + [n, n])[:2]
        if i == j:
            m[i][i] = field.add(m[i][i], c)
        else:
            h = field.mul(c, half)
            m[i][j] = field.add(m[i][j], h)
            m[j][i] = field.add(m[j][i], h)
    return scalar_rank(field, m)


def irreducibility_evidence(component: Ideal) -> str:
    """'linear', 'quadric-rank-r' (absolutely irreducible iff r >= 3), or 'per-construction'."""
    gens = component.nonzero_generators()
    if all(g.total_degree() <= 1 for g in gens):
        return "linear"
    if len(gens) == 1 and gens[0].total_degree() == 2 and component.ring.field.p != 2:
        r = quadric_rank(gens[0])
        return f"quadric-rank-{r}" if r >= 3 else "reducible"
    return "per-construction"


def is_irreducible(component: Ideal) -> bool | None:
    ev = irreducibility_evidence(component)
    if ev == "reducible":
        return False
    return None if ev == "per-construction" else True


def flatness_principal_check(arg) -> bool:
    """Principal generator f over Q(pi): flat iff f mod pi is nonzero."""
    if isinstance(arg, ChartIdeal):
        if arg.principal is None:
            raise ValueError("chart is not principal after pivot substitution")
        f = arg.principal
    else:
        f = arg
    return not specialize_poly(f).is_zero()


def worst_locus(chart: ChartIdeal) -> Ideal:
    """D = 0 (chart 1) or A = 0 up to the free z_{1,k} (chart 2) on the special fiber."""
    sp = specialize(chart.reduced, SPECIAL)
    ring = sp.ring
    extra = [ring.var(d) for d in chart.d_vars]
    if chart.spec.chart == 2:
        extra.append(ring.var("x"))
        extra += [ring.var(v) for v in ring.variables if v.startswith("a") and v.endswith("_1")]
    return Ideal(ring, sp.generators + extra)


def worst_fiber_dimension(chart: ChartIdeal, guard: int = DEFAULT_PAIR_GUARD):
    return krull_dim(worst_locus(chart), guard)


def strict_worst_dimension(chart: ChartIdeal, guard: int = DEFAULT_PAIR_GUARD):
    """Chart 2 only: additionally force z_{1,k} = 0, i.e. exactly A = 0."""
    loc = worst_locus(chart)
    ring = loc.ring
    extra = [ring.var(v) for v in ring.variables if v.startswith("z1_")]
    return krull_dim(Ideal(ring, loc.generators + extra), guard)


def isotropic_locus(chart: ChartIdeal) -> Ideal:
    loc = worst_locus(chart)
    ring = loc.ring
    q = _reduced_q_entries(chart, ring)
    return Ideal(ring, loc.generators + q)


def _reduced_q_entries(chart: ChartIdeal, ring) -> list:
    from .charts import _reduce_pivots
    qm = chart.named_matrices["Q"]
    simp = Ideal(qm.ring, [x for x in qm.entries if not x.is_zero()])
    red, _ = _reduce_pivots(simp, chart.pivot_values, chart.renaming)
    return [g.to_ring(ring) for g in red.generators]


def isotropic_dimension(chart: ChartIdeal, guard: int = DEFAULT_PAIR_GUARD):
    return krull_dim(isotropic_locus(chart), guard)


@dataclass
class Component:
    ideal: Ideal
    dim: object
    smooth: bool | None
    irreducible: str | None = None

    def to_json(self) -> dict:
        return {"generators": [str(g) for g in self.ideal.generators],
                "dim": self.dim, "smooth": self.smooth, "irreducible": self.irreducible}


@dataclass
class FiberReport:
    spec: object
    fiber: str
    empty: bool
    dimension: object
    components: list = field(default_factory=list)
    reduced: bool | None = None
    transverse: bool | None = None
    intersection_dim: object = None
    principal: Poly | None = None
    flat_principal: bool | None = None
    worst_fiber_dim: object = None
    isotropic_dim: object = None
    strict_worst_dim: object = None
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "fiber": self.fiber,
            "empty": self.empty,
            "dimension": self.dimension,
            "components": [c.to_json() for c in self.components],
            "reduced": self.reduced,
            "transverse": self.transverse,
            "intersection_dim": self.intersection_dim,
            "principal": str(self.principal) if self.principal is not None else None,
            "flat_principal": self.flat_principal,
            "worst_fiber_dim": self.worst_fiber_dim,
            "isotropic_dim": self.isotropic_dim,
            "strict_worst_dim": self.strict_worst_dim,
            "flags": list(self.flags),
        }


def fiber_report(chart: ChartIdeal, fiber: str, guard: int = DEFAULT_PAIR_GUARD) -> FiberReport:
    ideal = specialize(chart.reduced, fiber)
    dim = krull_dim(ideal, guard)
    flags = list(chart.notes)
    if chart.spec.case == 2:
        flags.append("case-2")
    rep = FiberReport(chart.spec, fiber, dim == EMPTY, dim, principal=chart.principal, flags=flags)
    if chart.principal is not None:
        rep.flat_principal = flatness_principal_check(chart)
    if rep.empty:
        return rep
    if fiber == GENERIC:
        smooth = smoothness_check(ideal, guard) if ideal.nonzero_generators() else True
        rep.components = [Component(ideal, dim, smooth)]
        return rep
    if chart.principal is not None and len(chart.d_vars) == 1:
        i1, i2 = special_components(chart)
        for i in (i1, i2):
            sm = smoothness_check(i, guard)
            rep.components.append(Component(i, krull_dim(i, guard), sm,
                                             irreducibility_evidence(i)))
        rep.reduced = is_intersection(ideal, i1, i2, guard)
        rep.intersection_dim = krull_dim(i1 + i2, guard)
        rep.transverse = transversality_check(i1, i2, guard)
    elif not ideal.nonzero_generators():
        rep.components = [Component(ideal, dim, True)]
        rep.reduced = True
    else:
        rep.components = [Component(ideal, dim, None)]
        flags.append("no-component-split")
    rep.worst_fiber_dim = worst_fiber_dimension(chart, guard)
    if chart.spec.chart == 1 and chart.d_vars:
        rep.isotropic_dim = isotropic_dimension(chart, guard)
    if chart.spec.chart == 2:
        rep.strict_worst_dim = strict_worst_dimension(chart, guard)
    return rep
