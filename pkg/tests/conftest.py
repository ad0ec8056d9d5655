from __future__ import annotations

import os
from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from quadricops.exactalg import ParamPoly, Poly, Signature

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SIGNATURES = [Signature(p, q) for p, q in [(1, 2), (2, 1), (2, 2), (1, 3), (3, 1), (2, 3), (3, 2)]]
SMALL_SIGNATURES = [Signature(1, 2), Signature(2, 1), Signature(2, 2)]

rationals = st.fractions(min_value=-9, max_value=9, max_denominator=6)
nonzero_rationals = rationals.filter(bool)


def param_polys(max_deg: int = 2):
    keys = st.tuples(st.integers(0, max_deg), st.integers(0, max_deg))
    return st.dictionaries(keys, rationals, max_size=4).map(ParamPoly)


def polys(n: int, max_deg: int = 2, max_terms: int = 5, params: bool = False):
    exps = st.lists(st.integers(0, max_deg), min_size=2 * n, max_size=2 * n)
    coeff = param_polys(1) if params else rationals.map(ParamPoly.const)
    term = st.tuples(exps, coeff)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: Poly.sum(n, (Poly.monomial(n, e[:n], e[n:], c) for e, c in ts))
    )


def bihomogeneous(n: int, a: int, b: int, max_terms: int = 4):
    def mono(draw_x, draw_y):
        return draw_x, draw_y

    def split(total):
        return st.lists(st.integers(0, n - 1), min_size=total, max_size=total).map(
            lambda idx: [idx.count(j) for j in range(n)]
        )

    term = st.tuples(split(a), split(b), nonzero_rationals)
    return st.lists(term, min_size=1, max_size=max_terms).map(
        lambda ts: Poly.sum(n, (Poly.monomial(n, x, y, c) for x, y, c in ts))
    )


LAM, MU = sympy.symbols("lam mu")


def sympy_vars(n: int):
    xs = sympy.symbols(f"x1:{n + 1}")
    ys = sympy.symbols(f"y1:{n + 1}")
    return list(xs), list(ys)


def to_sympy(p: Poly):
    """Independent conversion used by oracle tests."""
    xs, ys = sympy_vars(p.n)
    gens = xs + ys + [LAM, MU]
    expr = 0
    for key, v in p.terms.items():
        term = sympy.Rational(v.numerator, v.denominator)
        for g, e in zip(gens, key):
            term *= g**e
        expr += term
    return sympy.expand(expr)


def sympy_form(sig: Signature, which: str):
    xs, ys = sympy_vars(sig.n)
    eps = [1] * sig.p + [-1] * sig.q
    if which == "x":
        return sum(e * x**2 for e, x in zip(eps, xs))
    if which == "y":
        return sum(e * y**2 for e, y in zip(eps, ys))
    return sum(e * x * y for e, x, y in zip(eps, xs, ys))


@pytest.fixture(scope="session")
def opsets():
    from quadricops.opfactory import build_operator_set

    return {sig: build_operator_set(sig) for sig in SIGNATURES}


def frac(s) -> Fraction:
    return Fraction(s)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
