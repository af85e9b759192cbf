"""Affine-chart ideals of the naive splitting model, raw and simplified.

Chart 1 lives around the standard point t*Lambda_m and is cut out by the
matrix relations on (Y, Z); chart 2 lives around Lambda' and uses
(x, B, M_2, Z_1, Z_2) with M_0 normalized.  Each chart also gets a
simplified presentation in skew variables d, and the two presentations are
compared by explicit mutually inverse ring maps.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .fields import prime_field, ramified
from .groebner import DEFAULT_PAIR_GUARD, Ideal, buchberger, ideal_to_text
from .matrix import PolyMatrix, block_matrix, mat_mul
from .orders import block, grevlex
from .poly import Poly, RingCtx, mk_ring

GENERIC = "GENERIC"
SPECIAL = "SPECIAL"


class ChartSpecError(ValueError):
    pass


@dataclass(frozen=True)
class ChartSpec:
    p: int
    n: int
    r: int
    s: int
    chart: int
    pivots: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pivots", tuple(self.pivots))
        self.validate()

    @property
    def m(self) -> int:
        return self.n // 2

    def validate(self) -> None:
        p, n, r, s = self.p, self.n, self.r, self.s
        try:
            ramified(p)
        except ValueError as exc:
            raise ChartSpecError(f"p: {exc}") from None
        if n < 4 or n % 2:
            raise ChartSpecError(f"n: must be even and at least 4, got {n}")
        if r + s != n:
            raise ChartSpecError(f"r, s: signature must satisfy r + s = n, got {r} + {s} != {n}")
        if not 1 <= s <= r:
            raise ChartSpecError(f"s: need 1 <= s <= r, got s={s}, r={r}")
        if self.chart not in (1, 2):
            raise ChartSpecError(f"chart: must be 1 or 2, got {self.chart}")
        piv = self.pivots
        if self.chart == 1:
            want, top = s, n
        else:
            want, top = (s - 1 if s >= 2 else 0), n - 2
        if len(piv) != want:
            raise ChartSpecError(f"pivots: chart {self.chart} with s={s} needs {want} pivot rows, got {len(piv)}")
        if any(not isinstance(i, int) or i < 1 or i > top for i in piv):
            raise ChartSpecError(f"pivots: rows must lie in [1, {top}], got {list(piv)}")
        if any(a >= b for a, b in zip(piv, piv[1:])):
            raise ChartSpecError(f"pivots: rows must be strictly increasing, got {list(piv)}")

    @property
    def case(self) -> int:
        """1 when all pivots sit on one side of the middle, else 2."""
        bound = self.m if self.chart == 1 else self.m - 1
        sides = {i <= bound for i in self.pivots}
        return 1 if len(sides) <= 1 else 2

    @property
    def verified_case(self) -> bool:
        return self.s <= 3

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "r": self.r, "s": self.s,
                "chart": self.chart, "pivots": list(self.pivots)}

    @classmethod
    def from_json(cls, obj) -> "ChartSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        keys = {"p", "n", "r", "s", "chart", "pivots"}
        extra = set(obj) - keys
        if extra:
            raise ChartSpecError(f"unknown ChartSpec keys: {sorted(extra)}")
        missing = keys - set(obj) - {"pivots"}
        if missing:
            raise ChartSpecError(f"missing ChartSpec keys: {sorted(missing)}")
        return cls(obj["p"], obj["n"], obj["r"], obj["s"], obj["chart"],
                   tuple(obj.get("pivots", ())))

    def __str__(self):
        piv = ",".join(map(str, self.pivots))
        return f"chart{self.chart}(p={self.p}, n={self.n}, r={self.r}, s={self.s}, pivots={{{piv}}})"


def default_pivots(n: int, s: int, chart: int, case: int = 1) -> tuple:
    m = n // 2
    if chart == 1:
        if case == 1:
            return tuple(range(1, s + 1))
        # straddle the middle: {m-s+2, ..., m, m+1}
        return tuple(range(m - s + 2, m + 2))
    if s == 1:
        return ()
    if case == 1:
        return tuple(range(1, s))
    return tuple(range(m - s + 2, m + 1))


def make_spec(p: int, n: int, s: int, chart: int, case: int = 1, pivots=None) -> ChartSpec:
    if pivots is None:
        pivots = default_pivots(n, s, chart, case)
    return ChartSpec(p, n, n - s, s, chart, tuple(pivots))


@dataclass
class ChartIdeal:
    spec: ChartSpec
    ring: RingCtx
    raw: Ideal
    simplified: Ideal
    named_matrices: dict
    phi: dict
    psi: dict
    reduced: Ideal
    pivot_values: dict
    renaming: dict
    d_vars: list
    q_poly: Poly | None = None
    principal: Poly | None = None
    notes: list = field(default_factory=list)

    @property
    def raw_ring(self) -> RingCtx:
        return self.raw.ring


# -- structure matrices ----------------------------------------------------


def _const_matrix(ring, rows):
    return PolyMatrix.from_rows(ring, rows)


def antidiag(k: int) -> list:
    return [[1 if i + j == k - 1 else 0 for j in range(k)] for i in range(k)]


def j_matrix(k: int) -> list:
    """J_k = [[0, -H], [H, 0]] with H the unit antidiagonal of size k/2."""
    h = k // 2
    H = antidiag(h)
    out = [[0] * k for _ in range(k)]
    for i in range(h):
        for j in range(h):
            out[i][h + j] = -H[i][j]
            out[h + i][j] = H[i][j]
    return out


def _blockdiag(a: list, b: list) -> list:
    na, nb = len(a), len(b)
    out = [[0] * (na + nb) for _ in range(na + nb)]
    for i in range(na):
        for j in range(na):
            out[i][j] = a[i][j]
    for i in range(nb):
        for j in range(nb):
            out[na + i][na + j] = b[i][j]
    return out


def structure_matrices(n: int, p: int = 3, ring: RingCtx | None = None) -> dict:
    """J_n, H_m, S and both charts' M_t as constant matrices."""
    if n < 4 or n % 2:
        raise ValueError(f"n must be even and at least 4, got {n}")
    ring = ring or mk_ring(ramified(p), ())
    m = n // 2
    J = j_matrix(n)
    J2 = j_matrix(2)
    J2t = [list(r) for r in zip(*J2)]
    S = _blockdiag(J2t, j_matrix(n - 2))
    # chart 1: t on the basis (Lambda_m, t*Lambda_m): [[0, p I], [I, 0]]
    Mt1 = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        Mt1[i][n + i] = p
        Mt1[n + i][i] = 1
    # chart 2: blocks of sizes 2, n-2, 2, n-2
    Mt2 = [[0] * (2 * n) for _ in range(2 * n)]
    t0 = [[0, p], [1, 0]]
    for i in range(2):
        for j in range(2):
            Mt2[i][j] = t0[i][j]
            Mt2[n + i][n + j] = t0[i][j]
    for i in range(n - 2):
        Mt2[2 + i][n + 2 + i] = 1
        Mt2[n + 2 + i][2 + i] = p
    return {
        "J_n": _const_matrix(ring, J),
        "H_m": _const_matrix(ring, antidiag(m)),
        "S": _const_matrix(ring, S),
        "M_t": _const_matrix(ring, Mt1),
        "M_t2": _const_matrix(ring, Mt2),
    }


def _entries(m: PolyMatrix) -> list:
    return [e for e in m.entries if not e.is_zero()]


def _var_matrix(ring, rows, cols, name) -> PolyMatrix:
    return PolyMatrix.from_rows(
        ring, [[ring.var(name(i, j)) for j in range(1, cols + 1)] for i in range(1, rows + 1)])


# -- chart 1 ----------------------------------------------------------------


def _c1_names(spec):
    n, s = spec.n, spec.s
    ys = [f"y{i}_{j}" for i in range(1, n + 1) for j in range(1, s + 1)]
    zs = [f"z{i}_{j}" for i in range(1, n + 1) for j in range(1, s + 1)]
    return ys, zs


def _c1_dvars(spec) -> dict:
    """(p, q) with p < q  ->  (name, raw z variable, sign sigma_q)."""
    n, s, m = spec.n, spec.s, spec.m
    out = {}
    for p in range(1, s + 1):
        for q in range(p + 1, s + 1):
            name = "d" if s == 2 else f"d{p}{q}"
            iq = spec.pivots[q - 1]
            sigma = -1 if iq <= m else 1
            out[(p, q)] = (name, f"z{n + 1 - iq}_{p}", sigma)
    return out


def _skew(ring, s, dv) -> PolyMatrix:
    rows = [[ring.zero() for _ in range(s)] for _ in range(s)]
    for (p, q), (name, _, sigma) in dv.items():
        v = ring.var(name)
        rows[q - 1][p - 1] = v * sigma
        rows[p - 1][q - 1] = v * (-sigma)
    return PolyMatrix.from_rows(ring, rows)


def _ytilde(ring, Y: PolyMatrix, m: int) -> PolyMatrix:
    n = Y.rows
    rows = []
    for i in range(1, n + 1):
        src = Y.row(n - i)
        rows.append(src if i <= m else [-x for x in src])
    return PolyMatrix.from_rows(ring, rows)


def build_chart1_raw(spec: ChartSpec) -> tuple:
    """Raw ring, ideal and matrices of chart 1."""
    if spec.chart != 1:
        raise ChartSpecError("build_chart1_raw needs chart = 1")
    n, s = spec.n, spec.s
    ys, zs = _c1_names(spec)
    # z variables first: the simplification eliminates them
    dv = _c1_dvars(spec)
    dz = {z for (_, z, _) in dv.values()}
    zs_order = [z for z in zs if z not in dz] + [z for z in zs if z in dz]
    ring = mk_ring(ramified(spec.p), zs_order + ys, grevlex())
    Y = _var_matrix(ring, n, s, lambda i, j: f"y{i}_{j}")
    Z = _var_matrix(ring, n, s, lambda i, j: f"z{i}_{j}")
    st = structure_matrices(n, spec.p, ring)
    J = st["J_n"]
    pi = ring.pi()
    gens = []
    for k, i in enumerate(spec.pivots):
        for j in range(s):
            gens.append(Y[i - 1, j] - (1 if j == k else 0))
    Yt, Zt = Y.T(), Z.T()
    gens += mat_mul(Z, Yt).entries
    cond1 = mat_mul(Z, Yt) + mat_mul(mat_mul(mat_mul(J, Y), Zt), J)
    gens = gens[:s * s] + cond1.entries
    cond3 = mat_mul(mat_mul(Y, Zt), Y) - Y.scale(pi * 2)
    gens += cond3.entries
    A = mat_mul(Y, Zt) - PolyMatrix.identity(ring, n, pi)
    mats = {"J_n": J, "H_m": st["H_m"], "M_t": st["M_t"], "Y": Y, "Z": Z, "A": A}
    return ring, Ideal(ring, gens), mats


def build_chart1_simplified(spec: ChartSpec) -> tuple:
    if spec.chart != 1:
        raise ChartSpecError("build_chart1_simplified needs chart = 1")
    n, s, m = spec.n, spec.s, spec.m
    ys, _ = _c1_names(spec)
    dv = _c1_dvars(spec)
    dnames = [v[0] for v in dv.values()]
    ring = mk_ring(ramified(spec.p), dnames + ys, grevlex())
    Y = _var_matrix(ring, n, s, lambda i, j: f"y{i}_{j}")
    Yt_ = _ytilde(ring, Y, m)
    Q = mat_mul(Yt_.T(), Y)
    D = _skew(ring, s, dv)
    pi = ring.pi()
    gens = []
    for k, i in enumerate(spec.pivots):
        for j in range(s):
            gens.append(Y[i - 1, j] - (1 if j == k else 0))
    DQ = mat_mul(D, Q) + PolyMatrix.identity(ring, s, pi * 2)
    gens += _entries(DQ)
    mats = {"Y": Y, "Ytilde": Yt_, "D": D, "Q": Q}
    return ring, Ideal(ring, gens), mats


def _chart1(spec: ChartSpec) -> ChartIdeal:
    rring, raw, rmats = build_chart1_raw(spec)
    sring, simp, smats = build_chart1_simplified(spec)
    n, s = spec.n, spec.s
    dv = _c1_dvars(spec)
    # phi: raw -> simplified, Z = Ytilde * D
    Zs = mat_mul(smats["Ytilde"], smats["D"])
    phi = {}
    for i in range(1, n + 1):
        for j in range(1, s + 1):
            phi[f"z{i}_{j}"] = Zs[i - 1, j - 1]
            phi[f"y{i}_{j}"] = sring.var(f"y{i}_{j}")
    # psi: simplified -> raw, d is a z entry
    psi = {name: rring.var(z) for (name, z, _) in dv.values()}
    for i in range(1, n + 1):
        for j in range(1, s + 1):
            psi[f"y{i}_{j}"] = rring.var(f"y{i}_{j}")
    pivot_values = {}
    for k, i in enumerate(spec.pivots):
        for j in range(1, s + 1):
            pivot_values[f"y{i}_{j}"] = 1 if j == k + 1 else 0
    renaming = {}
    if s == 2:
        for i in range(1, n + 1):
            renaming[f"y{i}_1"] = f"x{i}"
            renaming[f"y{i}_2"] = f"y{i}"
    mats = {}
    mats.update(rmats)
    mats.update({"Ytilde": smats["Ytilde"], "D": smats["D"], "Q": smats["Q"],
                 "Y_simplified": smats["Y"]})
    reduced, red_q = _reduce_pivots(simp, pivot_values, renaming,
                                    q=smats["Q"][0, 1] if s == 2 else None)
    ci = ChartIdeal(spec, sring, raw, simp, mats, phi, psi, reduced, pivot_values,
                    renaming, [v[0] for v in dv.values()], q_poly=red_q)
    _finish(ci)
    return ci


# -- chart 2 ----------------------------------------------------------------


def _c2_dvars(spec) -> dict:
    """(p, q) with 2 <= p < q <= s  ->  (name, raw z' variable, tau_p)."""
    n, s, m = spec.n, spec.s, spec.m
    out = {}
    for p in range(2, s + 1):
        for q in range(p + 1, s + 1):
            name = "d" if s == 3 else f"d{p}{q}"
            ip = spec.pivots[p - 2]
            tau = 1 if ip <= m - 1 else -1
            out[(p, q)] = (name, f"zp{n - 1 - ip}_{q}", tau)
    return out


def q_entry(ring, n: int, i: int, j: int) -> Poly:
    m = n // 2
    a = lambda k, c: ring.var(f"a{k}_{c}")
    acc = ring.zero()
    for k in range(1, m):
        acc = acc + a(k, i) * a(n - 1 - k, j) - a(n - 1 - k, i) * a(k, j)
    return acc


def build_chart2_raw(spec: ChartSpec) -> tuple:
    if spec.chart != 2:
        raise ChartSpecError("build_chart2_raw needs chart = 2")
    n, s = spec.n, spec.s
    dv = _c2_dvars(spec)
    names_b = [f"b{r}_{j}" for r in (1, 2) for j in range(1, n - 1)]
    names_a = [f"a{k}_{i}" for k in range(1, n - 1) for i in range(1, s + 1)]
    names_z1 = [f"z{c}_{k}" for k in range(1, s + 1) for c in (1, 2)]
    names_z2 = [f"zp{j}_{k}" for k in range(1, s + 1) for j in range(1, n - 1)]
    dz = {z for (_, z, _) in dv.values()}
    z2_order = [z for z in names_z2 if z not in dz] + [z for z in names_z2 if z in dz]
    z1_free = {f"z1_{k}" for k in range(2, s + 1)}
    z1_order = [z for z in names_z1 if z not in z1_free] + [z for z in names_z1 if z in z1_free]
    ring = mk_ring(ramified(spec.p), names_b + z1_order + z2_order + ["x"] + names_a, grevlex())
    pi = ring.pi()
    B = _var_matrix(ring, 2, n - 2, lambda r, j: f"b{r}_{j}")
    M2 = _var_matrix(ring, n - 2, s, lambda k, i: f"a{k}_{i}")
    Z1t = _var_matrix(ring, s, 2, lambda k, c: f"z{c}_{k}")
    Z2t = _var_matrix(ring, s, n - 2, lambda k, j: f"zp{j}_{k}")
    M0 = PolyMatrix.from_rows(ring, [[1 if k == 0 else 0 for k in range(s)]])
    M1 = PolyMatrix.from_rows(ring, [[pi * x for x in M0.row(0)], M0.row(0)])
    J2 = _const_matrix(ring, j_matrix(2))
    Jn2 = _const_matrix(ring, j_matrix(n - 2))
    B1 = PolyMatrix.from_rows(ring, [B.row(0)])
    B2 = PolyMatrix.from_rows(ring, [B.row(1)])
    P = mat_mul(M2, Z2t)
    C = mat_mul(M2, Z1t)
    gens = []
    for k, i in enumerate(spec.pivots):
        for c in range(s):
            gens.append(M2[i - 1, c] - (1 if c == k + 1 else 0))
    rel = [
        C - mat_mul(mat_mul(Jn2, B.T()), J2),
        P.T() + mat_mul(mat_mul(Jn2, P), Jn2),
        mat_mul(P, P) - P.scale(pi * 2),
        mat_mul(B1, M2) - mat_mul(B2, M2).scale(pi),
        B1 + B2.scale(pi) - mat_mul(B2, P),
        mat_mul(M0, Z2t),
        mat_mul(M0, Z1t) - PolyMatrix.from_rows(ring, [[1, pi]]),
        mat_mul(C, M1) + mat_mul(P, M2) - M2.scale(pi * 2),
    ]
    for r in rel:
        gens += r.entries
    Y = P - PolyMatrix.identity(ring, n - 2, pi)
    T = PolyMatrix.identity(ring, 2, ring.var("x"))
    A = block_matrix(ring, [[T, B], [C, Y]])
    st = structure_matrices(n, spec.p, ring)
    mats = {"J_n": st["J_n"], "H_m": st["H_m"], "S": st["S"], "M_t": st["M_t2"],
            "A": A, "B": B, "C": C, "M_0": M0, "M_1": M1, "M_2": M2,
            "Z_1": Z1t.T(), "Z_2": Z2t.T(), "Y": Y}
    return ring, Ideal(ring, gens), mats


def build_chart2_simplified(spec: ChartSpec) -> tuple:
    if spec.chart != 2:
        raise ChartSpecError("build_chart2_simplified needs chart = 2")
    if spec.s < 2:
        raise ChartSpecError("s = 1: the chart is an affine space; use build_chart2_smooth")
    n, s = spec.n, spec.s
    dv = _c2_dvars(spec)
    dnames = [v[0] for v in dv.values()]
    z1 = [f"z1_{k}" for k in range(2, s + 1)]
    names_a = [f"a{k}_{i}" for k in range(1, n - 1) for i in range(1, s + 1)]
    ring = mk_ring(ramified(spec.p), ["x"] + z1 + dnames + names_a, grevlex())
    pi = ring.pi()
    # rows/cols 2..s of D and Q are stored at offset 0
    rows = [[ring.zero() for _ in range(s - 1)] for _ in range(s - 1)]
    for (p, q), (name, _, _) in dv.items():
        v = ring.var(name)
        rows[p - 2][q - 2] = v
        rows[q - 2][p - 2] = -v
    D = PolyMatrix.from_rows(ring, rows)
    Qfull = PolyMatrix.from_rows(ring, [[q_entry(ring, n, i, j) for j in range(1, s + 1)]
                                        for i in range(2, s + 1)])
    Q = Qfull.submatrix(range(s - 1), range(1, s))
    gens = []
    for k, i in enumerate(spec.pivots):
        for c in range(s):
            gens.append(ring.var(f"a{i}_{c + 1}") - (1 if c == k + 1 else 0))
    gens += _entries(mat_mul(D, Q) + PolyMatrix.identity(ring, s - 1, pi * 2))
    M2 = _var_matrix(ring, n - 2, s, lambda k, i: f"a{k}_{i}")
    mats = {"D": D, "Q": Q, "Q_full": Qfull, "M_2": M2}
    return ring, Ideal(ring, gens), mats


def build_chart2_smooth(spec: ChartSpec) -> tuple:
    """s = 1: the chart is free on x, a_1, ..., a_{n-2}."""
    if spec.chart != 2 or spec.s != 1:
        raise ChartSpecError("build_chart2_smooth needs chart = 2 and s = 1")
    n = spec.n
    ring = mk_ring(ramified(spec.p), ["x"] + [f"a{k}_1" for k in range(1, n - 1)], grevlex())
    M2 = _var_matrix(ring, n - 2, 1, lambda k, i: f"a{k}_{i}")
    return ring, Ideal(ring, []), {"M_2": M2}


def _chart2(spec: ChartSpec) -> ChartIdeal:
    rring, raw, rmats = build_chart2_raw(spec)
    n, s, m = spec.n, spec.s, spec.m
    if s == 1:
        sring, simp, smats = build_chart2_smooth(spec)
    else:
        sring, simp, smats = build_chart2_simplified(spec)
    pi = sring.pi()
    dv = _c2_dvars(spec)
    M2 = smats["M_2"]
    # Z_2^t = [0; D~] * M~_2  (rows of M~_2 indexed by columns 2..s of M_2)
    Z2t = PolyMatrix.zeros(sring, s, n - 2)
    z1col = [sring.one()] + [sring.var(f"z1_{k}") for k in range(2, s + 1)]
    z2col = [pi] + [sring.zero()] * (s - 1)
    if s >= 2:
        Mt = PolyMatrix.from_rows(sring, [
            [M2[n - 2 - j, i - 1] * (1 if j <= m - 1 else -1) for j in range(1, n - 1)]
            for i in range(2, s + 1)])
        Dt = PolyMatrix.zeros(sring, s - 1, s - 1)
        rows = [[sring.zero() for _ in range(s - 1)] for _ in range(s - 1)]
        for (p, q), (name, _, tau) in dv.items():
            v = sring.var(name)
            rows[p - 2][q - 2] = v
            rows[q - 2][p - 2] = -v
        Dt = PolyMatrix.from_rows(sring, rows)
        Z2t = PolyMatrix.from_rows(sring, [[sring.zero()] * (n - 2)] + mat_mul(Dt, Mt).to_rows())
        # second column of Z_1^t from the first one
        v1 = PolyMatrix.from_rows(sring, [[x] for x in z1col])
        w = mat_mul(mat_mul(Dt, smats["Q_full"]), v1)
        for k in range(2, s + 1):
            z2col[k - 1] = w[k - 2, 0] + pi * z1col[k - 1]
    Z1t = PolyMatrix.from_rows(sring, [[a, b] for a, b in zip(z1col, z2col)])
    C = mat_mul(M2, Z1t)
    J2 = _const_matrix(sring, j_matrix(2))
    Jn2 = _const_matrix(sring, j_matrix(n - 2))
    B = mat_mul(mat_mul(J2, C.T()), Jn2)
    phi = {"x": sring.var("x")}
    for k in range(1, n - 1):
        for i in range(1, s + 1):
            phi[f"a{k}_{i}"] = M2[k - 1, i - 1]
    for r in range(2):
        for j in range(n - 2):
            phi[f"b{r + 1}_{j + 1}"] = B[r, j]
    for k in range(s):
        phi[f"z1_{k + 1}"] = Z1t[k, 0]
        phi[f"z2_{k + 1}"] = Z1t[k, 1]
        for j in range(n - 2):
            phi[f"zp{j + 1}_{k + 1}"] = Z2t[k, j]
    psi = {"x": rring.var("x")}
    for k in range(1, n - 1):
        for i in range(1, s + 1):
            psi[f"a{k}_{i}"] = rring.var(f"a{k}_{i}")
    for k in range(2, s + 1):
        psi[f"z1_{k}"] = rring.var(f"z1_{k}")
    for (name, z, tau) in dv.values():
        psi[name] = rring.var(z) * tau
    pivot_values = {}
    for k, i in enumerate(spec.pivots):
        for c in range(1, s + 1):
            pivot_values[f"a{i}_{c}"] = 1 if c == k + 2 else 0
    mats = {}
    mats.update(rmats)
    for key in ("D", "Q", "Q_full"):
        if key in smats:
            mats[key] = smats[key]
    mats["M_2_simplified"] = M2
    mats["Z_1_simplified"] = Z1t.T()
    mats["Z_2_simplified"] = Z2t.T()
    q = smats["Q"][0, 1] if s == 3 else None
    reduced, red_q = _reduce_pivots(simp, pivot_values, {}, q=q)
    ci = ChartIdeal(spec, sring, raw, simp, mats, phi, psi, reduced, pivot_values, {},
                    [v[0] for v in dv.values()], q_poly=red_q)
    if s == 1:
        ci.notes.append("s = 1: free on x and the a_k")
    _finish(ci)
    return ci


# -- shared -----------------------------------------------------------------


def _reduce_pivots(simp: Ideal, values: dict, renaming: dict, q=None):
    """Substitute the pivot constants and drop/rename the pivot variables."""
    ring = simp.ring
    keep = [v for v in ring.variables if v not in values]
    names = [renaming.get(v, v) for v in keep]
    if renaming:
        # d's, then the x's, then the y's
        rank = {v: (0 if v not in renaming else 1 if renaming[v].startswith("x") else 2)
                for v in keep}
        keep.sort(key=lambda v: rank[v])
        names = [renaming.get(v, v) for v in keep]
    red_ring = mk_ring(ring.field, names, ring.order)
    pos = {v: i for i, v in enumerate(ring.variables)}
    src = [pos[v] for v in keep]
    mapping = {v: ring.const(c) for v, c in values.items()}

    def red(f: Poly) -> Poly:
        g = f.subs(mapping)
        return Poly(red_ring, {tuple(e[i] for i in src): c for e, c in g.terms.items()})

    gens = []
    seen = set()
    for g in simp.generators:
        g = red(g)
        if g.is_zero() or g.monic() in seen:
            continue
        seen.add(g.monic())
        gens.append(g)
    return Ideal(red_ring, gens), (red(q) if q is not None else None)


def _canonical_principal(f: Poly) -> Poly:
    # scale so the constant term is -2*pi
    field = f.ring.field
    c = f.constant_coeff()
    if field.is_zero(c):
        return f.monic()
    target = field.mul(field.from_int(-2), field.pi())
    return f.scale(field.div(target, c))


def _finish(ci: ChartIdeal) -> None:
    gens = ci.reduced.nonzero_generators()
    if len(gens) == 1:
        ci.principal = _canonical_principal(gens[0])
        ci.reduced = Ideal(ci.reduced.ring, [ci.principal])
    if not ci.spec.verified_case:
        ci.notes.append("unverified-case")


def build_chart(spec: ChartSpec) -> ChartIdeal:
    return _chart1(spec) if spec.chart == 1 else _chart2(spec)


# -- fibers and the simplification check ------------------------------------


def fiber_ring(ring: RingCtx, fiber: str) -> RingCtx:
    if fiber == GENERIC:
        return ring
    if fiber == SPECIAL:
        return ring.with_field(prime_field(ring.field.p))
    raise ValueError(f"fiber must be GENERIC or SPECIAL, got {fiber!r}")


def _on_fiber(ideal: Ideal, fiber: str) -> Ideal:
    r = fiber_ring(ideal.ring, fiber)
    if r == ideal.ring:
        return ideal
    return Ideal(r, [g.to_ring(r) for g in ideal.generators])


@dataclass
class SimplificationCertificate:
    forward: bool
    backward: bool
    left_inverse: bool
    right_inverse: bool
    failures: list

    @property
    def ok(self) -> bool:
        return self.forward and self.backward and self.left_inverse and self.right_inverse


def certify_simplification(chart: ChartIdeal, fiber: str,
                           guard: int = DEFAULT_PAIR_GUARD) -> SimplificationCertificate:
    """Check that phi and psi induce inverse isomorphisms of coordinate rings.

    (a) phi(raw generators) lie in the simplified ideal,
    (b) psi(simplified generators) lie in the raw ideal,
    (c) v - phi(psi(v)) lies in the simplified ideal for simplified variables,
    (d) v - psi(phi(v)) lies in the raw ideal for raw variables.
    """
    raw = _on_fiber(chart.raw, fiber)
    simp = _on_fiber(chart.simplified, fiber)
    kept = set()
    for g in chart.psi.values():
        kept.update(g.variables_used())
    # raw variables solved for by phi go first, under an elimination order
    solved = [v for v in raw.ring.variables if v not in kept]
    rr = mk_ring(raw.ring.field, solved + [v for v in raw.ring.variables if v in kept],
                 block(len(solved)))
    sr = simp.ring
    raw = Ideal(rr, [g.to_ring(rr) for g in raw.generators])
    phi = {v: g.to_ring(sr) for v, g in chart.phi.items()}
    psi = {v: g.to_ring(rr) for v, g in chart.psi.items()}
    gb_raw = buchberger(raw, rr.order, guard) if raw.nonzero_generators() else None
    gb_simp = buchberger(simp, sr.order, guard) if simp.nonzero_generators() else None

    def member(f, gb):
        if f.is_zero():
            return True
        return gb is not None and gb.reduce(f).is_zero()

    fails = []
    fa = all([_chk(member(g.subs(phi, sr), gb_simp), fails, f"phi(raw) {g}")
              for g in raw.generators])
    fb = all([_chk(member(g.subs(psi, rr), gb_raw), fails, f"psi(simp) {g}")
              for g in simp.generators])
    fc = all([_chk(member(sr.var(v) - psi[v].subs(phi, sr), gb_simp), fails, f"phi.psi {v}")
              for v in sr.variables])
    fd = all([_chk(member(rr.var(v) - phi[v].subs(psi, rr), gb_raw), fails, f"psi.phi {v}")
              for v in rr.variables])
    return SimplificationCertificate(fa, fb, fc, fd, fails)


def _chk(ok: bool, fails: list, what: str) -> bool:
    if not ok:
        fails.append(what)
    return ok


def verify_simplification(chart: ChartIdeal, fiber: str,
                          guard: int = DEFAULT_PAIR_GUARD) -> bool:
    return certify_simplification(chart, fiber, guard).ok


# -- serialization ----------------------------------------------------------


def chart_to_text(chart: ChartIdeal, which: str = "simplified") -> str:
    ideal = {"raw": chart.raw, "simplified": chart.simplified, "reduced": chart.reduced}[which]
    out = ideal_to_text(ideal)
    lines = ["# matrices"]
    for name in sorted(chart.named_matrices):
        mtx = chart.named_matrices[name]
        lines.append(f"# {name} {mtx.rows}x{mtx.cols}")
        for row in mtx.to_rows():
            lines.append("#   [" + ", ".join(str(x) for x in row) + "]")
    return out + "\n".join(lines) + "\n"
