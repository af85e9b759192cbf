"""Point counts over F_q: ideals, Grassmannians and isotropic Grassmannians."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .charts import SPECIAL, ChartIdeal, antidiag, j_matrix
from .fibers import FiberReport, special_components, specialize
from .fields import is_prime, prime_field
from .groebner import EMPTY, Ideal, krull_dim
from .matrix import scalar_rank

DEFAULT_COUNT_GUARD = 10_000_000


class CountGuardError(RuntimeError):
    pass


def _check_prime(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")


# -- ideals ------------------------------------------------------------------


def brute_count(ideal: Ideal, q: int | None = None, guard: int = DEFAULT_COUNT_GUARD) -> int:
    """Number of F_q-points of an ideal over GF(q), by scanning every assignment."""
    ring = ideal.ring
    p = ring.field.p
    if q is not None and q != p:
        raise ValueError(f"q={q} differs from the field characteristic {p}")
    n = ring.nvars
    if p ** n > guard:
        raise CountGuardError(f"{p}^{n} assignments exceed guard {guard}")
    gens = ideal.nonzero_generators()
    if any(g.is_constant() for g in gens):
        return 0
    if not gens:
        return p ** n
    from .spin import CompiledPoly
    comp = [CompiledPoly(g) for g in gens]
    return sum(1 for vals in product(range(p), repeat=n) if all(f(vals) == 0 for f in comp))


def affine_count(dim: int, q: int) -> int:
    return q ** dim


# -- subspaces ---------------------------------------------------------------


def q_binomial_count(k: int, n: int, q: int) -> int:
    """Gaussian binomial [n choose k]_q."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rref_subspaces(k: int, n: int, q: int):
    """Each k-dimensional subspace of F_q^n once, as its k x n RREF basis."""
    _check_prime(q)
    for piv in combinations(range(n), k):
        # free slots: row i, column c > piv[i] with c not a pivot column
        slots = [(i, c) for i in range(k) for c in range(piv[i] + 1, n) if c not in piv]
        for vals in product(range(q), repeat=len(slots)):
            m = [[0] * n for _ in range(k)]
            for i, c in enumerate(piv):
                m[i][c] = 1
            for (i, c), x in zip(slots, vals):
                m[i][c] = x
            yield m


def span_subspaces(k: int, n: int, q: int) -> set:
    """All k-dimensional subspaces as frozensets of vectors (slow oracle)."""
    _check_prime(q)
    f = prime_field(q)
    vecs = list(product(range(q), repeat=n))
    out = set()
    for basis in combinations(vecs[1:], k):
        if scalar_rank(f, [list(v) for v in basis]) < k:
            continue
        span = frozenset(
            tuple(sum(c * v[j] for c, v in zip(cs, basis)) % q for j in range(n))
            for cs in product(range(q), repeat=k))
        out.add(span)
    return out


def _form_vanishes(basis, form, q) -> bool:
    for u in basis:
        fu = [sum(u[i] * form[i][j] for i in range(len(u))) % q for j in range(len(form))]
        for v in basis:
            if sum(a * b for a, b in zip(fu, v)) % q:
                return False
    return True


def isotropic_count(k: int, n: int, q: int, form=None, guard: int = DEFAULT_COUNT_GUARD) -> int:
    """k-dimensional totally isotropic subspaces of (F_q^n, form); default form J_n."""
    if form is None:
        if n % 2 or k > n // 2:
            raise ValueError(f"symplectic count needs n even and k <= n/2, got k={k}, n={n}")
        form = j_matrix(n)
    if q_binomial_count(k, n, q) > guard:
        raise CountGuardError(f"Gr({k},{n}) over F_{q} exceeds guard {guard}")
    return sum(1 for b in rref_subspaces(k, n, q) if _form_vanishes(b, form, q))


def isotropic_cell_count(k: int, n: int, q: int, pivots, form=None) -> int:
    """Isotropic k-subspaces whose coordinate rows ``pivots`` (1-based) form an invertible minor.

    These are the subspaces visible in one affine chart of the Grassmannian.
    """
    form = j_matrix(n) if form is None else form
    f = prime_field(q)
    cols = [i - 1 for i in pivots]
    total = 0
    for b in rref_subspaces(k, n, q):
        if scalar_rank(f, [[row[c] for c in cols] for row in b]) == k and _form_vanishes(b, form, q):
            total += 1
    return total


def ogr24_count(q: int) -> int:
    """Isotropic planes in F_q^4 for the split symmetric form x1*x4 + x2*x3."""
    _check_prime(q)
    if q == 2:
        raise ValueError("q must be odd")
    return sum(1 for b in rref_subspaces(2, 4, q) if _form_vanishes(b, antidiag(4), q))


# -- report ------------------------------------------------------------------


@dataclass
class CountReport:
    target: str
    q: int
    count: int
    method: str
    cross_checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.cross_checks)

    def to_json(self) -> dict:
        return {"target": self.target, "q": self.q, "count": self.count,
                "method": self.method, "cross_checks": list(self.cross_checks)}


def _xc(name, got, want) -> dict:
    return {"name": name, "value": got, "expected": want, "ok": got == want}


def grassmannian_report(k: int, n: int, q: int) -> CountReport:
    closed = q_binomial_count(k, n, q)
    checks = [_xc("rref_enumeration", sum(1 for _ in rref_subspaces(k, n, q)), closed),
              _xc("duality", q_binomial_count(n - k, n, q), closed)]
    if n <= 4:
        checks.append(_xc("span_enumeration", len(span_subspaces(k, n, q)), closed))
    return CountReport(f"Gr({k},{n})", q, closed, "closed_form", checks)


def component_counts(chart: ChartIdeal, guard: int = DEFAULT_COUNT_GUARD) -> dict:
    """Brute counts of the special fiber, its two components and their intersection."""
    sp = specialize(chart.reduced, SPECIAL)
    i1, i2 = special_components(chart)
    return {
        "fiber": brute_count(sp, guard=guard),
        "I1": brute_count(i1, guard=guard),
        "I2": brute_count(i2, guard=guard),
        "I1+I2": brute_count(i1 + i2, guard=guard),
        "dim_I1": krull_dim(i1),
    }


def component_count_check(arg, q: int | None = None, guard: int = DEFAULT_COUNT_GUARD) -> bool:
    """|V(I1)| = q^dim(I1) and |V(I)| = |V(I1)| + |V(I2)| - |V(I1+I2)|.

    Accepts a ChartIdeal, or a FiberReport whose two components are used.
    """
    if isinstance(arg, FiberReport):
        if len(arg.components) != 2:
            raise ValueError("fiber report has no two-component split")
        i1, i2 = arg.components[0].ideal, arg.components[1].ideal
        ring = i1.ring
        prod_gens = [a * b for a in i1.generators for b in i2.generators]
        whole = brute_count(Ideal(ring, prod_gens), q, guard)
        n1, n2 = brute_count(i1, q, guard), brute_count(i2, q, guard)
        n12 = brute_count(i1 + i2, q, guard)
        dim = arg.components[0].dim
        p = ring.field.p
    else:
        c = component_counts(arg, guard)
        whole, n1, n2, n12, dim = c["fiber"], c["I1"], c["I2"], c["I1+I2"], c["dim_I1"]
        p = arg.spec.p
        if q is not None and q != p:
            raise ValueError(f"q={q} differs from p={p}")
    if dim == EMPTY:
        return False
    return n1 == p ** dim and whole == n1 + n2 - n12
