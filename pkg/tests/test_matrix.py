from __future__ import annotations

from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from splitlm.charts import structure_matrices
from splitlm.fields import prime_field, ramified
from splitlm.matrix import PolyMatrix, mat_eval_rank, mat_mul, nullspace, scalar_rank, solve_affine
from splitlm.poly import mk_ring


def test_j_squares_to_minus_identity():
    for n in (4, 6, 8):
        sm = structure_matrices(n)
        J = sm["J_n"]
        assert mat_mul(J, J) == PolyMatrix.identity(J.ring, n, -1)


def test_s_squares_to_minus_identity():
    S = structure_matrices(6)["S"]
    assert mat_mul(S, S) == PolyMatrix.identity(S.ring, 6, -1)


def test_identity_is_neutral():
    r = mk_ring(ramified(3), ["a", "b"])
    M = PolyMatrix.from_rows(r, [[r.var("a"), r.pi()], [r.one(), r.var("b")]])
    assert mat_mul(PolyMatrix.identity(r, 2), M) == M


def test_mt_squares_to_p():
    sm = structure_matrices(4, p=3)
    M = sm["M_t"]
    assert mat_mul(M, M) == PolyMatrix.identity(M.ring, 8, 3)
    M2 = sm["M_t2"]
    assert mat_mul(M2, M2) == PolyMatrix.identity(M2.ring, 8, 3)


def test_skew_rank_examples():
    r = mk_ring(prime_field(3), ["d"])
    d = r.var("d")
    D = PolyMatrix.from_rows(r, [[r.zero(), d], [-d, r.zero()]])
    assert mat_eval_rank(D, {"d": 0}) == 0
    assert mat_eval_rank(D, {"d": 1}) == 2


def _skew(n, vals):
    m = [[0] * n for _ in range(n)]
    it = iter(vals)
    for i in range(n):
        for j in range(i + 1, n):
            v = next(it)
            m[i][j] = v
            m[j][i] = -v
    return m


def test_skew_rank_even_exhaustive_f3():
    F = prime_field(3)
    for n in range(1, 5):
        k = n * (n - 1) // 2
        seen = set()
        for vals in product(range(3), repeat=k):
            r = scalar_rank(F, [[x % 3 for x in row] for row in _skew(n, vals)])
            assert r % 2 == 0
            seen.add(r)
        assert seen == set(range(0, n + 1, 2))


def test_skew_rank_3x3_f5_exhaustive():
    F = prime_field(5)
    ranks = {scalar_rank(F, [[x % 5 for x in row] for row in _skew(3, v)])
             for v in product(range(5), repeat=3)}
    assert ranks == {0, 2}


@settings(max_examples=1000, deadline=None)
@given(st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 6), min_size=n * (n - 1) // 2,
                                             max_size=n * (n - 1) // 2))))
def test_skew_rank_even_random_f7(t):
    n, vals = t
    m = [[x % 7 for x in row] for row in _skew(n, vals)]
    assert scalar_rank(prime_field(7), m) % 2 == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=4, max_size=4), min_size=1, max_size=4),
       st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_solve_affine_and_nullspace(rows, x):
    F = prime_field(5)
    rhs = [sum(a * b for a, b in zip(r, x)) % 5 for r in rows]
    sol = solve_affine(F, rows, rhs)
    assert sol is not None
    base, basis = sol
    assert [sum(a * b for a, b in zip(r, base)) % 5 for r in rows] == rhs
    assert len(basis) == 4 - scalar_rank(F, rows)
    for v in nullspace(F, rows):
        assert all(sum(a * b for a, b in zip(r, v)) % 5 == 0 for r in rows)
