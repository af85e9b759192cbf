from __future__ import annotations

import json

import pytest

from splitlm.charts import (GENERIC, SPECIAL, ChartSpec, ChartSpecError, build_chart, certify_simplification,
                            chart_to_text, default_pivots, make_spec, structure_matrices,
                            verify_simplification)
from splitlm.groebner import ideal_from_text


def test_spec_validation_names_field():
    with pytest.raises(ChartSpecError, match="^pivots"):
        ChartSpec(3, 4, 2, 2, 1, (1, 5))
    with pytest.raises(ChartSpecError, match="r, s"):
        ChartSpec(3, 4, 3, 2, 1, (1, 2))
    with pytest.raises(ChartSpecError, match="^p"):
        ChartSpec(2, 4, 2, 2, 1, (1, 2))
    with pytest.raises(ChartSpecError, match="^n"):
        ChartSpec(3, 5, 3, 2, 1, (1, 2))


def test_spec_json_round_trip():
    spec = make_spec(3, 6, 3, 2, case=2)
    assert ChartSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec


def test_default_pivots():
    assert default_pivots(4, 2, 1, 1) == (1, 2)
    assert default_pivots(4, 2, 1, 2) == (2, 3)
    assert default_pivots(6, 3, 2, 1) == (1, 2)
    assert default_pivots(6, 3, 2, 2) == (2, 3)


def test_j4_display():
    J = structure_matrices(4)["J_n"]
    assert [[x.constant_coeff()[0] for x in row] for row in J.to_rows()] == [
        [0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]


def test_raw_chart1_generator_count(chart):
    c = chart(4, 1, 1)
    assert len(c.raw.generators) == 1 + 16 + 4
    assert str(c.raw.generators[0]) == "y1_1 - 1"


def test_chart1_principal_case_1(chart):
    assert str(chart(4, 2, 1).principal) == "d*x3 - d*y4 - 2*pi"


def test_chart1_principal_case_2(chart):
    r = chart(4, 2, 1, 2).reduced.ring
    assert chart(4, 2, 1, 2).principal == r.parse("d*(1 + x1*y4 - x4*y1) - 2*pi")


def test_chart2_principals(chart):
    c1 = chart(6, 3, 2, 1)
    assert c1.principal == c1.reduced.ring.parse("d*(a4_3 - a3_2) - 2*pi")
    c2 = chart(6, 3, 2, 2)
    assert c2.principal == c2.reduced.ring.parse("d*(1 + a1_2*a4_3 - a4_2*a1_3) - 2*pi")


def test_chart2_smooth_has_free_ring(chart):
    for n in (4, 6):
        c = chart(n, 1, 2)
        assert c.reduced.nonzero_generators() == []
        assert c.reduced.ring.nvars == n - 1


def test_chart2_raw_relations_present(chart):
    c = chart(4, 1, 2)
    assert any("zp1_1^2*a1_1^2" in str(g) for g in c.raw.generators)


@pytest.mark.parametrize("n,s", [(4, 2), (6, 2), (6, 3), (8, 3)])
def test_q_and_d_skew(chart, n, s):
    for which in (1, 2):
        c = chart(n, s, which)
        for name in ("Q", "D"):
            m = c.named_matrices[name]
            assert (m + m.T()).is_zero()


@pytest.mark.parametrize("n,s,which,case", [
    (4, 2, 1, 1), (4, 2, 1, 2), (4, 1, 2, 1), (4, 1, 1, 1), (4, 2, 2, 1), (6, 3, 2, 1), (6, 3, 2, 2)])
@pytest.mark.parametrize("fiber", [GENERIC, SPECIAL])
def test_verify_simplification(chart, n, s, which, case, fiber):
    assert verify_simplification(chart(n, s, which, case), fiber)


def test_broken_map_fails_certificate():
    c = build_chart(make_spec(3, 4, 2, 1))
    some = sorted(c.phi)[-1]
    c.phi[some] = c.phi[some] + c.simplified.ring.one()
    cert = certify_simplification(c, GENERIC)
    assert not cert.ok and cert.failures


def test_chart_text_parses_back(chart):
    c = chart(4, 2, 1)
    text = chart_to_text(c, "reduced")
    assert ideal_from_text(text).generators == c.reduced.generators


def test_unverified_case_is_flagged():
    c = build_chart(make_spec(3, 8, 4, 1))
    assert "unverified-case" in c.notes
