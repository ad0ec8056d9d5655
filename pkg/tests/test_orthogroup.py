from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SIGNATURES, polys
from quadricops.exactalg import AffExp, Poly, Signature
from quadricops.opfactory import build_invariant_basis
from quadricops.orthogroup import (
    GroupElem,
    QAntisym,
    SingularCayleyError,
    act,
    base_isotropic,
    cayley,
    free_parameter_count,
    gram,
    identity_matrix,
    isotropic_pairs,
    isotropic_points,
    mat_mul,
    sample_group_elements,
    sample_qantisym,
    transpose,
)
from quadricops.powfun import BaseForm, PowerFunc

SIG = Signature(2, 1)
N = SIG.n


def test_cayley_of_zero_is_identity():
    zero = QAntisym(SIG, [[0] * N for _ in range(N)])
    assert cayley(zero).matrix == identity_matrix(N)


def test_cayley_hyperbolic_example():
    sig = Signature(1, 1)
    g = cayley(QAntisym(sig, [[0, Fraction(1, 2)], [Fraction(1, 2), 0]]))
    F = Fraction
    assert g.matrix == ((F(5, 3), F(-4, 3)), (F(-4, 3), F(5, 3)))
    assert g.matrix[0][0] ** 2 - g.matrix[0][1] ** 2 == 1


def test_singular_cayley_is_rejected():
    sig = Signature(1, 1)
    with pytest.raises(SingularCayleyError):
        cayley(QAntisym(sig, [[0, 1], [1, 0]]))


def test_non_antisymmetric_matrix_is_rejected():
    with pytest.raises(ValueError):
        QAntisym(SIG, [[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    with pytest.raises(ValueError):
        GroupElem(SIG, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.mark.parametrize("p,q", [(p, q) for n in range(2, 6) for p in range(1, n) for q in [n - p]])
def test_free_parameter_count_by_nullspace(p, q):
    """Dimension of {A : A^T J + J A = 0} computed by sympy linear algebra."""
    sig = Signature(p, q)
    n = sig.n
    J = sympy.diag(*sig.signs)
    syms = sympy.symbols(f"a0:{n * n}")
    A = sympy.Matrix(n, n, syms)
    eqs = list(A.T * J + J * A)
    M = sympy.Matrix([[sympy.diff(e, s) for s in syms] for e in eqs])
    assert len(M.nullspace()) == free_parameter_count(n) == n * (n - 1) // 2


@pytest.mark.parametrize("sig", SIGNATURES)
def test_sampling_is_deterministic_and_valid(sig):
    a = sample_qantisym(7, 3, sig)
    b = sample_qantisym(7, 3, sig)
    assert a == b
    J = gram(sig)
    lhs = mat_mul(transpose(a.matrix), J)
    rhs = mat_mul(J, a.matrix)
    assert all(x + y == 0 for r, s in zip(lhs, rhs) for x, y in zip(r, s))
    assert all(abs(v.numerator) <= 3 * 3 and v.denominator <= 3 for row in a.matrix for v in row)
    g1 = sample_group_elements(sig, 3, 4)
    g2 = sample_group_elements(sig, 3, 4)
    assert [g.matrix for g in g1] == [g.matrix for g in g2]


@pytest.mark.parametrize("sig", SIGNATURES)
def test_group_laws(sig):
    gs = sample_group_elements(sig, 11, 6)
    e = GroupElem.identity(sig)
    for g, h in itertools.combinations(gs, 2):
        gh = g @ h  # constructor re-checks the form is preserved
        assert (gh @ gh.inv()).matrix == e.matrix
        assert gh.inv().matrix == (h.inv() @ g.inv()).matrix


def test_reflections_reach_other_components():
    gs = sample_group_elements(SIG, 0, 4)
    dets = {sympy.Matrix(g.matrix).det() for g in gs}
    assert dets == {1, -1}


# -- action -------------------------------------------------------------------------


@settings(max_examples=20)
@given(polys(N, max_deg=1, max_terms=4), st.integers(0, 50))
def test_action_is_homomorphism(f, seed):
    g, h = sample_group_elements(SIG, seed, 2)
    assert act(g, act(h, f)) == act(g @ h, f)
    assert act(GroupElem.identity(SIG), f) == f


@settings(max_examples=20)
@given(st.integers(0, 50))
def test_action_on_power_functions(seed):
    g, h = sample_group_elements(SIG, seed, 2)
    f = PowerFunc.product(
        SIG, Poly.x(N, 0) * Poly.y(N, 1),
        {BaseForm.lin_x([1, 0, 1]): AffExp(0, 1, 0), BaseForm("Qxy"): AffExp(Fraction(1, 2), 0, 1)},
    )
    assert act(g, act(h, f)) == act(g @ h, f)
    moved = act(g, f)
    assert moved.homogeneity() == f.homogeneity()
    # linear base forms stay linear
    assert {b.kind for t in moved.terms for b, _ in t.factors} == {"lin_x", "Qxy"}


@pytest.mark.parametrize("sig", SIGNATURES)
def test_forms_are_invariant(sig):
    for g in sample_group_elements(sig, 2, 5):
        assert act(g, sig.qx) == sig.qx
        assert act(g, sig.qy) == sig.qy
        assert act(g, sig.qxy) == sig.qxy


@pytest.mark.parametrize("sig", [Signature(2, 1), Signature(2, 2), Signature(1, 3)])
def test_basis_operators_commute_with_action(sig):
    B = build_invariant_basis(sig)
    n = sig.n
    fs = [Poly.x(n, 0) ** 2 * Poly.y(n, 1), sig.qxy * Poly.y(n, 0) + Poly.x(n, n - 1) ** 3]
    for g in sample_group_elements(sig, 4, 3):
        for name, D in B.items():
            for f in fs:
                lhs = D.apply(act(g, f))
                rhs = D.apply(f)
                # Q(x,y) is invariant, so the localized exponent carries over
                assert lhs.qxy_exp == rhs.qxy_exp, name
                assert lhs.num == act(g, rhs.num), name


# -- isotropic points ------------------------------------------------------------------


@pytest.mark.parametrize("sig", SIGNATURES)
def test_isotropic_points(sig):
    base = base_isotropic(sig)
    assert sig.q_vector(base) == 0
    pts = isotropic_points(sig, 1, 6)
    assert pts[0] == base
    assert all(sig.q_vector(v) == 0 and any(v) for v in pts)
    for g in sample_group_elements(sig, 9, 3):
        assert sig.q_vector(g.apply_vector(base)) == 0
    for x, y in isotropic_pairs(sig, 1, 4):
        assert sig.q_bilinear(x, y) != 0


def test_hyperbolic_pair_example():
    sig = Signature(1, 1)
    assert sig.q_bilinear((1, 1), (1, -1)) == 2
