"""Polynomial matrices and exact scalar linear algebra."""
from __future__ import annotations

from .fields import CoefField
from .poly import Poly, RingCtx, RingMismatchError


class PolyMatrix:
    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: RingCtx, rows: int, cols: int, entries):
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match the shape")
        for x in entries:
            if x.ring != ring:
                raise RingMismatchError("matrix entries must share the ring")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, ring: RingCtx, rows) -> "PolyMatrix":
        rows = [[x if isinstance(x, Poly) else ring.const(x) for x in r] for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise ValueError("ragged rows")
        return cls(ring, nr, nc, [x for r in rows for x in r])

    @classmethod
    def zeros(cls, ring, rows, cols) -> "PolyMatrix":
        z = ring.zero()
        return cls(ring, rows, cols, [z] * (rows * cols))

    @classmethod
    def identity(cls, ring, n, scale=1) -> "PolyMatrix":
        z = ring.zero()
        c = scale if isinstance(scale, Poly) else ring.const(scale)
        return cls(ring, n, n, [c if i == j else z for i in range(n) for j in range(n)])

    def __getitem__(self, ij) -> Poly:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i) -> list:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list:
        return [self.row(i) for i in range(self.rows)]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def T(self) -> "PolyMatrix":
        return PolyMatrix(
            self.ring, self.cols, self.rows,
            [self[i, j] for j in range(self.cols) for i in range(self.rows)],
        )

    def _check(self, other):
        if not isinstance(other, PolyMatrix):
            raise TypeError("expected a PolyMatrix")
        if other.ring != self.ring:
            raise RingMismatchError("matrices live in different rings")

    def __add__(self, other):
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.ring, self.rows, self.cols,
                          [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(self.ring, self.rows, self.cols,
                          [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return PolyMatrix(self.ring, self.rows, self.cols, [-a for a in self.entries])

    def __matmul__(self, other):
        return mat_mul(self, other)

    def scale(self, c) -> "PolyMatrix":
        c = c if isinstance(c, Poly) else self.ring.const(c)
        return PolyMatrix(self.ring, self.rows, self.cols, [c * a for a in self.entries])

    def map(self, fn, ring: RingCtx | None = None) -> "PolyMatrix":
        return PolyMatrix(ring or self.ring, self.rows, self.cols, [fn(a) for a in self.entries])

    def submatrix(self, rows, cols) -> "PolyMatrix":
        rows = list(rows)
        cols = list(cols)
        return PolyMatrix(self.ring, len(rows), len(cols),
                          [self[i, j] for i in rows for j in cols])

    def __eq__(self, other):
        return (isinstance(other, PolyMatrix) and self.ring == other.ring
                and self.shape == other.shape and self.entries == other.entries)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.entries)

    def evaluate(self, point) -> list:
        return [[self[i, j].evaluate(point) for j in range(self.cols)] for i in range(self.rows)]

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.to_rows())
        return f"PolyMatrix({self.rows}x{self.cols}: [{body}])"


def mat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.ring != b.ring:
        raise RingMismatchError("matrices live in different rings")
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    out = []
    for i in range(a.rows):
        ra = a.row(i)
        for j in range(b.cols):
            acc = a.ring.zero()
            for k in range(a.cols):
                x = ra[k]
                if x.terms:
                    y = b.entries[k * b.cols + j]
                    if y.terms:
                        acc = acc + x * y
            out.append(acc)
    return PolyMatrix(a.ring, a.rows, b.cols, out)


def block_matrix(ring: RingCtx, blocks) -> PolyMatrix:
    """Assemble a matrix from a grid of PolyMatrix blocks."""
    rows = []
    for brow in blocks:
        h = brow[0].rows
        for i in range(h):
            r = []
            for b in brow:
                if b.rows != h:
                    raise ValueError("block heights differ")
                r.extend(b.row(i))
            rows.append(r)
    return PolyMatrix.from_rows(ring, rows)


# -- scalar linear algebra over any of the fields ------------------------


def rref(field: CoefField, m) -> tuple:
    """Row-reduce a list-of-lists scalar matrix. Returns (rref, pivots)."""
    a = [list(r) for r in m]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    z = field.zero
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = None
        for i in range(r, nr):
            if a[i][c] != z:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = field.inv(a[r][c])
        a[r] = [field.mul(x, inv) for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != z:
                f = a[i][c]
                a[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def scalar_rank(field: CoefField, m) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(field, m)[1])


def nullspace(field: CoefField, m, ncols: int | None = None) -> list:
    """Basis of {v : m v = 0}."""
    nc = ncols if ncols is not None else (len(m[0]) if m else 0)
    if not m:
        return [[field.one if i == j else field.zero for i in range(nc)] for j in range(nc)]
    a, piv = rref(field, m)
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for fcol in free:
        v = [field.zero] * nc
        v[fcol] = field.one
        for r, pc in enumerate(piv):
            v[pc] = field.neg(a[r][fcol])
        basis.append(v)
    return basis


def solve_affine(field: CoefField, m, rhs) -> tuple | None:
    """Solve m v = rhs. Returns (particular, nullspace basis) or None."""
    nc = len(m[0]) if m else 0
    aug = [list(r) + [b] for r, b in zip(m, rhs)]
    if not aug:
        return [field.zero] * nc, nullspace(field, [], nc)
    a, piv = rref(field, aug)
    if nc in piv:
        return None
    v = [field.zero] * nc
    for r, pc in enumerate(piv):
        v[pc] = a[r][nc]
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for fcol in free:
        w = [field.zero] * nc
        w[fcol] = field.one
        for r, pc in enumerate(piv):
            w[pc] = field.neg(a[r][fcol])
        basis.append(w)
    return v, basis


def mat_eval_rank(m: PolyMatrix, point) -> int:
    return scalar_rank(m.ring.field, m.evaluate(point))
