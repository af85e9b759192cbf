from __future__ import annotations

import random

import pytest

from splitlm.charts import build_chart, make_spec
from splitlm.fibers import specialize
from splitlm.fields import prime_field
from splitlm.groebner import Ideal
from splitlm.poly import mk_ring
from splitlm.spin import (EnumerationGuardError, enumerate_ideal, enumerate_points, is_worst_point,
                          isotropy_rank, rank_t_plus_pi, raw_points, spin_audit, spin_equals_splitting_census,
                          spin_splitting_census)


def test_enumerate_135_points(chart):
    c = chart(4, 2, 1)
    pts = list(enumerate_points(c))
    assert len(pts) == 135
    f = specialize(c.reduced, "SPECIAL").generators[0]
    for pt in pts:
        assert f.evaluate(pt.assignment) == 0


def test_enumerate_matches_full_scan(chart):
    c = chart(4, 2, 1, 2)
    sp = specialize(c.reduced, "SPECIAL")
    f = sp.generators[0]
    n = sp.ring.nvars
    from itertools import product
    scan = {v for v in product(range(3), repeat=n) if f.evaluate(list(v)) == 0}
    assert set(enumerate_ideal(sp)) == scan


def test_enumerate_trivial_ideals():
    r = mk_ring(prime_field(3), ["u", "v"])
    assert len(list(enumerate_ideal(Ideal(r, [])))) == 9
    assert list(enumerate_ideal(Ideal(r, ["1"]))) == []


def test_enumeration_independent_of_variable_order():
    r = mk_ring(prime_field(3), ["a", "b", "c", "d"])
    gens = ["a*b - c*d", "a + b^2 - c"]
    pts = set(enumerate_ideal(Ideal(r, gens)))
    rv = mk_ring(prime_field(3), ["d", "c", "b", "a"])
    back = {tuple(reversed(v)) for v in enumerate_ideal(Ideal(rv, gens))}
    assert pts == back


def test_guard(chart):
    with pytest.raises(EnumerationGuardError):
        list(enumerate_points(chart(4, 2, 1), guard=10))


def test_q_must_be_p(chart):
    with pytest.raises(ValueError):
        list(enumerate_points(chart(4, 2, 1), q=9))


def test_rank_examples(chart):
    c = chart(4, 2, 1)
    pts = list(enumerate_points(c))
    for pt in pts:
        if is_worst_point(pt):
            assert rank_t_plus_pi(pt) == 0
        else:
            assert rank_t_plus_pi(pt) == 2
    assert all(rank_t_plus_pi(pt) == 1 for pt in enumerate_points(chart(4, 1, 2)))


def test_isotropy_rank_examples(chart):
    c = chart(4, 2, 1)
    ranks = {}
    for pt in enumerate_points(c):
        a = pt.assignment
        r = isotropy_rank(pt)
        ranks.setdefault(r, 0)
        ranks[r] += 1
        assert r == (0 if (a["x3"] - a["y4"]) % 3 == 0 else 2)
    assert set(ranks) == {0, 2}


def test_derived_matrices_follow_assignment(chart):
    c = chart(4, 2, 1)
    pt = next(p for p in enumerate_points(c) if p.assignment["d"] == 1)
    assert pt.derived("D") == [[0, 1], [2, 0]]


@pytest.mark.parametrize("n,s,which,case", [(4, 2, 1, 1), (4, 2, 1, 2), (4, 1, 2, 1), (6, 3, 2, 1), (6, 2, 1, 1)])
def test_no_parity_violations(chart, n, s, which, case):
    audit = spin_audit(chart(n, s, which, case))
    assert audit.points > 0 and audit.violations == 0
    assert audit.d_rank_mismatches == 0 and audit.a_zero_mismatches == 0


def test_parity_over_f5():
    c = build_chart(make_spec(5, 4, 1, 2))
    audit = spin_audit(c, 5)
    assert audit.points == 125 and audit.violations == 0


def test_wrong_family_violates_everywhere(chart):
    audit = spin_audit(chart(4, 1, 1))
    assert audit.violations == audit.points == 27


def test_raw_points_satisfy_raw_ideal(chart):
    c = chart(4, 2, 1)
    sp = specialize(c.raw, "SPECIAL")
    pts = list(raw_points(c))
    assert len(pts) == 135
    for v in random.Random(0).sample(pts, 20):
        assert all(g.evaluate(list(v)) == 0 for g in sp.generators)


@pytest.mark.parametrize("n,s,which", [(4, 2, 1), (4, 1, 2), (4, 1, 1), (4, 2, 2), (6, 1, 2)])
def test_census(chart, n, s, which):
    census = spin_splitting_census(chart(n, s, which))
    assert census.equal and census.raw_validated
    if census.generic_empty:
        assert census.flat_points == census.raw_passing == 0


def test_census_detects_a_broken_parity_filter(chart, monkeypatch):
    import splitlm.spin as spin
    monkeypatch.setattr(spin, "raw_rank", lambda c, v: 0)
    assert not spin_equals_splitting_census(chart(4, 1, 2))


def test_census_json(chart):
    js = spin_audit(chart(4, 2, 1)).to_json()
    assert set(js) >= {"spec", "q", "points", "violations", "isotropy_histogram", "worst_fiber_points"}
    assert js["points"] == 135 and js["worst_fiber_points"] == 81
