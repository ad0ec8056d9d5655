from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SIGNATURES, SMALL_SIGNATURES, bihomogeneous
from quadricops.exactalg import ParamPoly, Poly, Signature
from quadricops.opfactory import (
    TermLabel,
    build_explicit_terms,
    build_invariant_basis,
    build_operator_set,
    build_pipeline_E,
    build_swapped_pipeline,
    closed_form,
    confirm_table,
    four_term_form,
    homogeneous_normal_form,
    latex_export,
    printed_closed_coefficients,
    shape_census,
    shifted,
    sum_ops,
    term_components,
)
from quadricops.weyl import WeylOp, deriv_index

LAM, MU = ParamPoly.lam(), ParamPoly.mu()


def ab(sig: Signature):
    return shifted(sig, 2, "lam"), shifted(sig, 0, "mu")


def derived_formulas(sig: Signature) -> dict[str, ParamPoly]:
    """The coefficient table worked out by hand from the conjugation pipeline
    and confirmed by the function-value solve in ``confirm_table``."""
    a, b = ab(sig)
    return {
        "I": a * (a - 1) * b * (b - 1),
        "II": a * (a - 1) * b * 2,
        "III": a * (a - 1) * MU * 4,
        "IV": a * (a - 1) * 4,
        "V": a * (a - 1),
        "VI": a * (b + 1) * b * 2,
        "VII": a * (b + 1) * 4,
        "VIII": a * (b + 1) * 4,
        "IX.contraction": a * 4,
        "IX.E_y_dx_box_y": a * 2,
        "X": (b + 2) * (b + 1),
        "XI": (b + 2) * 2,
        "XII": ParamPoly.const(1),
    }


# -- building blocks -----------------------------------------------------------------


def test_box_in_coordinates():
    sig = Signature(2, 1)
    n = sig.n
    B = build_invariant_basis(sig)
    expected = (
        WeylOp.derivative(sig, deriv_index(n, x=[2, 0, 0]))
        + WeylOp.derivative(sig, deriv_index(n, x=[0, 2, 0]))
        - WeylOp.derivative(sig, deriv_index(n, x=[0, 0, 2]))
    )
    assert B["box_x"] == expected


def test_signed_contraction_in_two_variables():
    sig = Signature(1, 1)
    B = build_invariant_basis(sig)
    d11 = WeylOp.derivative(sig, deriv_index(2, x=[1, 0], y=[1, 0]))
    d22 = WeylOp.derivative(sig, deriv_index(2, x=[0, 1], y=[0, 1]))
    assert B["Q_dx_dy"] == d11 - d22


@pytest.mark.parametrize("sig", SMALL_SIGNATURES)
def test_euler_contraction_is_unsigned(sig):
    n = sig.n
    B = build_invariant_basis(sig)
    expected = sum(
        (WeylOp.term(sig, Poly.x(n, j), 0, tuple(int(i == n + j) for i in range(2 * n))) for j in range(n)),
        WeylOp.zero(sig),
    )
    assert B["E_x_dy"] == expected
    assert B["E_y_dx"] == expected.swap_xy()


# -- the pipeline and its table --------------------------------------------------------


@pytest.mark.parametrize("sig", SIGNATURES)
def test_derived_table_is_frozen(sig, opsets):
    opset = opsets[sig]
    want = derived_formulas(sig)
    assert opset.table.coefficients == want
    assert opset.table.chosen["IX.contraction"] == "signed"


@pytest.mark.parametrize("sig", SIGNATURES)
def test_errata_rows(sig, opsets):
    rows = {r.component: r for r in opsets[sig].errata}
    assert set(rows) == {"II", "III", "VII", "VIII", "IX.contraction"}
    a, b = ab(sig)
    assert rows["II"].printed == a * (a - 1) * 2
    assert rows["III"].printed == a * (a - 1) * (Fraction(2 * sig.n - 4) + MU * 4)
    assert rows["VII"].printed == rows["VIII"].printed == a * (b + 1) * 2
    ix = rows["IX.contraction"]
    assert ix.printed == a * -4 and ix.printed_shape == "unsigned" and ix.derived_shape == "signed"


@pytest.mark.parametrize("sig", SIGNATURES)
def test_pipeline_is_the_corrected_table(sig, opsets):
    opset = opsets[sig]
    rebuilt = sum_ops(sig, opset.table.labelled_terms().values())
    assert rebuilt == opset.pipeline
    # the printed table disagrees with the pipeline
    assert sum_ops(sig, opset.explicit_terms.values()) != opset.pipeline


def test_printed_transcription_examples():
    sig = Signature(2, 1)
    n = sig.n
    B = build_invariant_basis(sig)
    terms = build_explicit_terms(sig)
    a, b = ab(sig)
    assert terms[TermLabel.XII] == B["Qxy"] @ B["box_y"] @ B["box_x"]
    iii = terms[TermLabel.III]
    coef = iii.coefficient((0,) * (2 * n))
    assert coef.qxy_exp == -1 and iii.order() == 0
    assert coef.num == Poly.from_param(n, a * (a - 1) * (Fraction(2 * n - 4) + MU * 4))
    i_term = terms[TermLabel.I]
    assert i_term == WeylOp.mult(sig, sig.qx * sig.qy * Poly.from_param(n, a * (a - 1) * b * (b - 1)), -3)
    assert len(term_components(sig)) == 13 and len(terms) == 12


@pytest.mark.parametrize("sig", SIGNATURES)
def test_shape_census(sig, opsets):
    opset = opsets[sig]
    s_pipe, s_table = shape_census(opset.pipeline, [c.printed_shape for c in opset.components])
    assert s_pipe == s_table
    assert opset.pipeline.min_qxy_exp() == -3


def test_degeneration_kills_leading_factor():
    sig = Signature(2, 2)
    E = build_pipeline_E(sig).specialize(Fraction(sig.n, 2) - 2, 5)
    # only terms without the factor -n/2+2+lambda survive: (X), (XI), (XII)
    terms = build_operator_set(sig).table.labelled_terms()
    survivors = terms[TermLabel.X] + terms[TermLabel.XI] + terms[TermLabel.XII]
    assert E == survivors.specialize(Fraction(sig.n, 2) - 2, 5)


def test_confirm_table_independently():
    opset = build_operator_set(Signature(2, 1))
    ok, rows = confirm_table(opset, trials=3, seed=1)
    assert ok
    by_name = {r.component: r for r in rows}
    assert all(r.confirmed == r.trials == 3 for r in rows)
    for name in ("II", "III", "VII", "VIII"):
        assert by_name[name].printed_refuted == 3
    assert by_name["I"].printed_refuted == 0


# -- decomposition -------------------------------------------------------------------------


@pytest.mark.parametrize("sig", SIGNATURES)
def test_singular_plus_regular_is_pipeline(sig, opsets):
    opset = opsets[sig]
    assert opset.e_sing + opset.e_reg == opset.pipeline
    a, b = ab(sig)
    assert opset.f_multiple == a * (b + 1) * 4


@pytest.mark.parametrize("sig", SMALL_SIGNATURES)
def test_f_basic_kills_y_independent(sig, opsets):
    n = sig.n
    for f in [sig.qx, Poly.x(n, 0) ** 3 + Poly.x(n, 1), Poly.const(n, 7)]:
        assert opsets[sig].f_basic.apply(f).is_zero()


@pytest.mark.parametrize("sig", SIGNATURES)
def test_regular_part_is_symmetric(sig, opsets):
    opset = opsets[sig]
    assert opset.swapped_pipeline != opset.pipeline
    assert opset.e_reg_swapped == opset.e_reg


@pytest.mark.parametrize("sig", SMALL_SIGNATURES)
def test_swapped_pipeline_at_equal_parameters(sig):
    # with lambda = mu the middle power is 1 and the two boxes commute
    E, S = build_pipeline_E(sig), build_swapped_pipeline(sig)
    for t in [Fraction(1), Fraction(-2), Fraction(1, 3)]:
        assert E.specialize(t, t) == S.specialize(t, t)
    assert E.specialize(1, 2) != S.specialize(1, 2)


# -- closed forms ------------------------------------------------------------------------------


@pytest.mark.parametrize("sig", SIGNATURES)
def test_closed_form_errata(sig, opsets):
    opset = opsets[sig]
    a1, m1 = shifted(sig, 1, "lam"), shifted(sig, 1, "mu")
    a2, m2 = shifted(sig, 2, "lam"), shifted(sig, 2, "mu")
    printed = printed_closed_coefficients(sig)
    assert printed["Q_dx_dy"] == a1 * m1 * 4
    rows = {r.component: (r.printed, r.derived) for r in opset.closed_errata}
    assert rows == {
        "xy_box_x": (m1 * 2, m2 * 2),
        "yx_box_y": (a1 * 2, a2 * 2),
        "Q_dx_dy": (a1 * m1 * 4, a2 * m2 * 4),
    }
    assert opset.f_closed_corrected == closed_form(sig, m2 * 2, a2 * 2, a2 * m2 * 4)


def test_f_closed_last_coefficient_spot_value():
    sig = Signature(2, 2)
    assert printed_closed_coefficients(sig)["Q_dx_dy"].evaluate(0, 0) == 4


def test_euler_rewrite_of_transvection():
    sig = Signature(2, 1)
    B = build_invariant_basis(sig)
    assert B["E_y_dx"] == (B["E_y_dx"] - B["E_x_dx"]) + B["E_x_dx"]
    lam = Fraction(-2)
    # on x-degree 2 functions the Euler operator acts as 2
    nf = homogeneous_normal_form(B["E_x_dx"], -lam, None)
    assert nf == WeylOp.identity(sig) * 2


@pytest.mark.parametrize("sig", SMALL_SIGNATURES)
def test_closed_form_reduces_to_four_terms(sig, opsets):
    c = printed_closed_coefficients(sig)
    four = four_term_form(sig, c["xy_box_x"], c["yx_box_y"], c["Q_dx_dy"])
    rng = random.Random(3)
    for a, b in [(1, 1), (2, 1), (2, 3)]:
        lhs = homogeneous_normal_form(opsets[sig].f_closed.specialize(-a, -b), a, b)
        rhs = homogeneous_normal_form(four.specialize(-a, -b), a, b)
        assert lhs == rhs
        from quadricops.verify import random_bihomogeneous

        for _ in range(5):
            f = random_bihomogeneous(rng, sig.n, a, b, 3)
            assert opsets[sig].f_closed.specialize(-a, -b).apply(f) == four.specialize(-a, -b).apply(f)


@settings(max_examples=15)
@given(st.data())
def test_box_past_form_on_critical_degree(data):
    """[box, Q(x)] = 4E + 2n vanishes against x-degree -n/2 and acts as
    4a + 2n on x-degree a polynomials."""
    sig = Signature(2, 2)
    B = build_invariant_basis(sig)
    q = WeylOp.mult(sig, sig.qx)
    diff = B["box_x"] @ q - q @ B["box_x"]
    assert homogeneous_normal_form(diff, Fraction(-sig.n, 2), None).is_zero()
    f = data.draw(bihomogeneous(sig.n, 2, 1))
    assert diff.apply(f).as_poly() == f * (4 * 2 + 2 * sig.n)


# -- exports ------------------------------------------------------------------------------------


def test_json_export_carries_errata(opsets):
    data = json.loads(json.dumps(opsets[Signature(2, 1)].to_json()))
    assert {r["component"] for r in data["errata"]} == {"II", "III", "VII", "VIII", "IX.contraction"}


def test_latex_export_keeps_labels(opsets):
    text = latex_export(opsets[Signature(2, 1)], "explicit")
    for lbl in TermLabel:
        assert rf"(\mathrm{{{lbl.value}}})" in text
    assert latex_export(opsets[Signature(2, 1)], "F")
