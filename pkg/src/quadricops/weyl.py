"""Normal-ordered differential operators on V x V.

A ``WeylOp`` is a finite sum ``sum_alpha c_alpha(x, y) d^alpha`` with every
multiplication to the left of every derivative.  Coefficients are
``LocCoef`` values ``N * Q(x,y)^k``: polynomials with Q(x,y) (and only
Q(x,y)) inverted.  Canonical form cancels Q(x,y) eagerly, so two operators
are equal iff their term dictionaries are equal.

A ``TwistedOp`` allows formal powers ``Q(x,y)^e`` with e affine in
(lambda, mu).  It exists to evaluate conjugation pipelines such as
``Q^r3 o box_y o Q^r2 o box_x o Q^r1``; once the exponents add up to
integers the result converts to a ``WeylOp``.

All symbolic work is done on the branch Q(x,y) > 0, where |Q|^r = Q^r.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exactalg import (
    AffExp,
    Key,
    ParamPoly,
    Poly,
    Scalar,
    Signature,
    as_rat,
    monomial_latex,
    monomial_str,
    var_name,
)

DerivIndex = tuple[int, ...]


class PipelineIntegralityError(ValueError):
    """A twisted pipeline left a non-integral power of Q(x,y)."""


def _qxy_power(sig: Signature, k: int) -> Poly:
    cache = sig.__dict__.setdefault("_qxy_powers", [Poly.const(sig.n, 1)])
    while len(cache) <= k:
        cache.append(cache[-1] * sig.qxy)
    return cache[k]


def _dqxy(sig: Signature, var: int) -> Poly:
    """d Q(x,y) / d var."""
    cache = sig.__dict__.setdefault("_dqxy", {})
    if var not in cache:
        cache[var] = sig.qxy.diff(var)
    return cache[var]


# ---------------------------------------------------------------------------
# LocCoef
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocCoef:
    """``num * Q(x,y)**qxy_exp``; canonical when built through ``make``."""

    num: Poly
    qxy_exp: int = 0

    @classmethod
    def make(cls, num: Poly, k: int, sig: Signature) -> "LocCoef":
        if num.is_zero():
            return cls(num, 0)
        if k > 0:
            return cls(num * _qxy_power(sig, k), 0)
        div = sig.qxy_divisor
        while k < 0:
            q = div.divide_exact(num)
            if q is None:
                break
            num, k = q, k + 1
        return cls(num, k)

    @classmethod
    def sum(cls, coefs: Sequence["LocCoef"], sig: Signature) -> "LocCoef":
        coefs = [c for c in coefs if not c.num.is_zero()]
        if not coefs:
            return cls(Poly.zero(sig.n), 0)
        if len(coefs) == 1:
            c = coefs[0]
            return c if c.qxy_exp == 0 else cls.make(c.num, c.qxy_exp, sig)
        kmin = min(c.qxy_exp for c in coefs)
        total = Poly.sum(
            sig.n,
            (c.num if c.qxy_exp == kmin else c.num * _qxy_power(sig, c.qxy_exp - kmin) for c in coefs),
        )
        return cls.make(total, kmin, sig)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.qxy_exp >= 0

    def as_poly(self) -> Poly:
        if self.qxy_exp < 0:
            raise ValueError("coefficient has a pole along Q(x,y) = 0")
        return self.num

    def mul(self, other: "LocCoef", sig: Signature) -> "LocCoef":
        return LocCoef.make(self.num * other.num, self.qxy_exp + other.qxy_exp, sig)

    def scale(self, c) -> "LocCoef":
        num = self.num * c
        return LocCoef(num, self.qxy_exp if not num.is_zero() else 0)

    def diff(self, var: int, sig: Signature) -> "LocCoef":
        k = self.qxy_exp
        if k == 0:
            return LocCoef(self.num.diff(var), 0)
        num = sig.qxy * self.num.diff(var) + self.num * _dqxy(sig, var) * k
        return LocCoef.make(num, k - 1, sig)

    def specialize(self, lam: Scalar, mu: Scalar, sig: Signature) -> "LocCoef":
        return LocCoef.make(self.num.specialize(lam, mu), self.qxy_exp, sig)

    def __str__(self) -> str:
        if self.qxy_exp == 0:
            return str(self.num)
        return f"Q(x,y)^{self.qxy_exp}*({self.num})"


def _is_zero_scalar(c) -> bool:
    if isinstance(c, ParamPoly):
        return c.is_zero()
    return c == 0


def deriv_index(n: int, x: Iterable[int] = (), y: Iterable[int] = ()) -> DerivIndex:
    x, y = list(x) or [0] * n, list(y) or [0] * n
    if len(x) != n or len(y) != n:
        raise ValueError("derivative exponent vectors must have length n")
    return tuple(x) + tuple(y)


def _unit(n: int, var: int) -> DerivIndex:
    k = [0] * (2 * n)
    k[var] = 1
    return tuple(k)


def _sub_indices(alpha: DerivIndex):
    """All gamma <= alpha with the multinomial weight prod C(alpha_i, gamma_i)."""
    ranges = [range(a + 1) for a in alpha]
    for gamma in itertools.product(*ranges):
        w = 1
        for a, g in zip(alpha, gamma):
            if a:
                w *= comb(a, g)
        yield gamma, w


class _DerivCache:
    """Memoised multi-index derivatives of one coefficient."""

    def __init__(self, base, step):
        self._d = {}
        self._base = base
        self._step = step

    def get(self, gamma: DerivIndex):
        if gamma in self._d:
            return self._d[gamma]
        if not any(gamma):
            val = self._base
        else:
            var = next(i for i, g in enumerate(gamma) if g)
            prev = list(gamma)
            prev[var] -= 1
            val = self._step(self.get(tuple(prev)), var)
        self._d[gamma] = val
        return val


# ---------------------------------------------------------------------------
# WeylOp
# ---------------------------------------------------------------------------


class WeylOp:
    """Normal-ordered differential operator with Q(x,y)-localized coefficients."""

    __slots__ = ("sig", "_t", "_hash")

    def __init__(self, sig: Signature, terms: Optional[Mapping[DerivIndex, LocCoef]] = None):
        self.sig = sig
        t: dict[DerivIndex, LocCoef] = {}
        if terms:
            for k, c in terms.items():
                if len(k) != 2 * sig.n:
                    raise ValueError("derivative index has wrong length")
                c = LocCoef.make(c.num, c.qxy_exp, sig)
                if not c.is_zero():
                    t[tuple(k)] = c
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, sig: Signature, t: dict) -> "WeylOp":
        obj = cls.__new__(cls)
        obj.sig = sig
        obj._t = t
        obj._hash = None
        return obj

    @classmethod
    def _from_lists(cls, sig: Signature, acc: Mapping[DerivIndex, list]) -> "WeylOp":
        t = {}
        for k, coefs in acc.items():
            c = LocCoef.sum(coefs, sig)
            if not c.is_zero():
                t[k] = c
        return cls._raw(sig, t)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, sig: Signature) -> "WeylOp":
        return cls._raw(sig, {})

    @classmethod
    def identity(cls, sig: Signature) -> "WeylOp":
        return cls.mult(sig, Poly.const(sig.n, 1))

    @classmethod
    def mult(cls, sig: Signature, poly, qxy_exp: int = 0) -> "WeylOp":
        """Multiplication by ``poly * Q(x,y)**qxy_exp``."""
        if not isinstance(poly, Poly):
            poly = Poly.const(sig.n, poly)
        c = LocCoef.make(poly, qxy_exp, sig)
        if c.is_zero():
            return cls.zero(sig)
        return cls._raw(sig, {(0,) * (2 * sig.n): c})

    @classmethod
    def partial(cls, sig: Signature, var: int) -> "WeylOp":
        return cls._raw(sig, {_unit(sig.n, var): LocCoef(Poly.const(sig.n, 1), 0)})

    @classmethod
    def derivative(cls, sig: Signature, index: DerivIndex, coeff=1) -> "WeylOp":
        return cls._raw(sig, {tuple(index): LocCoef(Poly.const(sig.n, 1), 0)}).scale(coeff)

    @classmethod
    def term(cls, sig: Signature, poly: Poly, qxy_exp: int, index: DerivIndex) -> "WeylOp":
        c = LocCoef.make(poly, qxy_exp, sig)
        return cls._raw(sig, {tuple(index): c} if not c.is_zero() else {})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Mapping[DerivIndex, LocCoef]:
        return self._t

    def is_zero(self) -> bool:
        return not self._t

    def order(self) -> int:
        return max((sum(k) for k in self._t), default=-1)

    def min_qxy_exp(self) -> int:
        return min((c.qxy_exp for c in self._t.values()), default=0)

    def is_polynomial(self) -> bool:
        return all(c.qxy_exp >= 0 for c in self._t.values())

    def has_params(self) -> bool:
        return any(c.num.has_params() for c in self._t.values())

    def is_constant_coefficient(self) -> bool:
        return all(c.qxy_exp == 0 and c.num.is_param_constant() for c in self._t.values())

    def coefficient(self, index: DerivIndex) -> LocCoef:
        return self._t.get(tuple(index), LocCoef(Poly.zero(self.sig.n), 0))

    # -- linear structure ---------------------------------------------------
    def _check(self, other: "WeylOp") -> None:
        if not isinstance(other, WeylOp):
            raise TypeError(f"expected WeylOp, got {type(other).__name__}")
        if other.sig != self.sig:
            raise ValueError(f"operators over different forms: {self.sig} vs {other.sig}")

    def __add__(self, other: "WeylOp") -> "WeylOp":
        self._check(other)
        acc: dict[DerivIndex, list] = {k: [c] for k, c in self._t.items()}
        for k, c in other._t.items():
            acc.setdefault(k, []).append(c)
        return WeylOp._from_lists(self.sig, acc)

    def __neg__(self) -> "WeylOp":
        return WeylOp._raw(self.sig, {k: LocCoef(-c.num, c.qxy_exp) for k, c in self._t.items()})

    def __sub__(self, other: "WeylOp") -> "WeylOp":
        return self + (-other)

    def scale(self, c) -> "WeylOp":
        """Multiply by a scalar (rational or ParamPoly)."""
        if isinstance(c, AffExp):
            c = c.as_param()
        if _is_zero_scalar(c):
            return WeylOp.zero(self.sig)
        t = {}
        for k, coef in self._t.items():
            num = coef.num * c
            if not num.is_zero():
                t[k] = LocCoef.make(num, coef.qxy_exp, self.sig)
        return WeylOp._raw(self.sig, t)

    def __mul__(self, c) -> "WeylOp":
        if isinstance(c, WeylOp):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "WeylOp") -> "WeylOp":
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylOp):
            return NotImplemented
        return self.sig == other.sig and self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.sig, frozenset(self._t.items())))
        return self._hash

    # -- transformations --------------------------------------------------
    def specialize(self, lam: Scalar, mu: Scalar) -> "WeylOp":
        t = {}
        for k, c in self._t.items():
            c2 = c.specialize(lam, mu, self.sig)
            if not c2.is_zero():
                t[k] = c2
        return WeylOp._raw(self.sig, t)

    def swap_xy(self) -> "WeylOp":
        """Exchange x <-> y (and lambda <-> mu); Q(x,y) is symmetric."""
        n = self.sig.n
        return WeylOp._raw(
            self.sig,
            {k[n:] + k[:n]: LocCoef(c.num.swap_xy(), c.qxy_exp) for k, c in self._t.items()},
        )

    def rebase(self, sig: Signature) -> "WeylOp":
        """Re-express over ``sig`` whose form is +/- this one's form."""
        if sig == self.sig:
            return self
        if (sig.p, sig.q) != (self.sig.p, self.sig.q):
            raise ValueError("can only rebase between Q and -Q")
        return WeylOp._raw(
            sig,
            {k: LocCoef(c.num * (-1) ** (c.qxy_exp % 2), c.qxy_exp) for k, c in self._t.items()},
        )

    def apply(self, f: Poly) -> LocCoef:
        return apply_to_poly(self, f)

    # -- rendering --------------------------------------------------------
    def sorted_items(self) -> list[tuple[DerivIndex, LocCoef]]:
        return sorted(self._t.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def expanded_terms(self) -> list[tuple[ParamPoly, int, Key, DerivIndex]]:
        """Flat list of (coefficient, qxy_exp, monomial, derivative)."""
        out = []
        for d, c in self.sorted_items():
            for mono, pp in sorted(c.num.collect().items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))):
                out.append((pp, c.qxy_exp, mono, d))
        return out

    def __str__(self) -> str:
        return render_text(self)

    def __repr__(self) -> str:
        return f"WeylOp[{self.sig.label()}]({self})"


def deriv_str(n: int, d: DerivIndex) -> str:
    parts = []
    for i, e in enumerate(d):
        if e:
            parts.append(f"d{var_name(n, i)}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def deriv_latex(n: int, d: DerivIndex) -> str:
    total = sum(d)
    if not total:
        return ""
    den = []
    for i, e in enumerate(d):
        if e:
            v = f"x_{{{i + 1}}}" if i < n else f"y_{{{i - n + 1}}}"
            den.append(f"\\partial {v}" + (f"^{{{e}}}" if e > 1 else ""))
    top = "\\partial" if total == 1 else f"\\partial^{{{total}}}"
    return f"\\frac{{{top}}}{{{' '.join(den)}}}"


def render_text(op: WeylOp) -> str:
    if op.is_zero():
        return "0"
    n = op.sig.n
    parts = []
    for pp, k, mono, d in op.expanded_terms():
        factors = []
        ms = monomial_str(n, mono)
        if ms:
            factors.append(ms)
        if k:
            factors.append(f"Q(x,y)^{k}" if k != 1 else "Q(x,y)")
        ds = deriv_str(n, d)
        if ds:
            factors.append(ds)
        body = "*".join(factors)
        if pp.is_constant():
            v = pp.constant_value()
            if not body:
                parts.append(str(v))
            elif v == 1:
                parts.append(body)
            elif v == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{v}*{body}")
        else:
            parts.append(f"({pp})" + (f"*{body}" if body else ""))
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def render_latex(op: WeylOp) -> str:
    if op.is_zero():
        return "0"
    n = op.sig.n
    parts = []
    for pp, k, mono, d in op.expanded_terms():
        body = " ".join(
            s
            for s in (
                monomial_latex(n, mono),
                (f"Q(\\mathbf x,\\mathbf y)^{{{k}}}" if k != 1 else "Q(\\mathbf x,\\mathbf y)") if k else "",
                deriv_latex(n, d),
            )
            if s
        )
        if pp.is_constant():
            v = pp.constant_value()
            if not body:
                coef = _frac_latex(v)
            elif v == 1:
                coef = ""
            elif v == -1:
                coef = "-"
            else:
                coef = _frac_latex(v) + " "
            parts.append(coef + body)
        else:
            parts.append(f"\\left({pp.latex()}\\right)" + (" " + body if body else ""))
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _frac_latex(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    sign = "-" if v < 0 else ""
    return f"{sign}\\tfrac{{{abs(v.numerator)}}}{{{v.denominator}}}"


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def compose(a: WeylOp, b: WeylOp) -> WeylOp:
    """Normal-ordered product ``a o b`` by the generalized Leibniz rule."""
    a._check(b)
    sig = a.sig
    acc: dict[DerivIndex, list] = {}
    caches = {
        beta: _DerivCache(coef, lambda c, v: c.diff(v, sig)) for beta, coef in b._t.items()
    }
    for alpha, ca in a._t.items():
        for gamma, w in _sub_indices(alpha):
            rem = tuple(x - y for x, y in zip(alpha, gamma))
            for beta, cache in caches.items():
                db = cache.get(gamma)
                if db.is_zero():
                    continue
                prod = ca.mul(db, sig)
                if w != 1:
                    prod = LocCoef(prod.num * w, prod.qxy_exp)
                key = tuple(x + y for x, y in zip(rem, beta))
                acc.setdefault(key, []).append(prod)
    return WeylOp._from_lists(sig, acc)


def commutator(a: WeylOp, b: WeylOp) -> WeylOp:
    return compose(a, b) - compose(b, a)


def apply_to_poly(op: WeylOp, f: Poly) -> LocCoef:
    """Apply ``op`` to the polynomial ``f``."""
    sig = op.sig
    if f.n != sig.n:
        raise ValueError("dimension mismatch")
    cache = _DerivCache(f, lambda p, v: p.diff(v))
    parts = []
    for alpha, c in op._t.items():
        df = cache.get(alpha)
        if df.is_zero():
            continue
        parts.append(LocCoef(c.num * df, c.qxy_exp))
    return LocCoef.sum(parts, sig)


def apply_poly_result(op: WeylOp, f: Poly) -> Poly:
    """Like ``apply_to_poly`` but insists on a polynomial result."""
    return apply_to_poly(op, f).as_poly()


def specialize(op: WeylOp, lam: Scalar, mu: Scalar) -> WeylOp:
    return op.specialize(lam, mu)


def weyl_equal(a: WeylOp, b: WeylOp) -> bool:
    return a == b


def op_to_json(op: WeylOp) -> list[dict]:
    """One entry per (derivative, monomial) with a ParamPoly coefficient."""
    n = op.sig.n
    out = []
    for pp, k, mono, d in op.expanded_terms():
        out.append(
            {
                "coeff": pp.to_json(),
                "qxy_exp": k,
                "mono": {"x": list(mono[:n]), "y": list(mono[n : 2 * n])},
                "deriv": {"x": list(d[:n]), "y": list(d[n:])},
            }
        )
    return out


def op_from_json(sig: Signature, data: Sequence[Mapping]) -> WeylOp:
    n = sig.n
    acc: dict[DerivIndex, list] = {}
    for t in data:
        pp = ParamPoly.from_json(t["coeff"])
        d = tuple(t["deriv"]["x"]) + tuple(t["deriv"]["y"])
        if len(d) != 2 * n:
            raise ValueError("derivative index has the wrong number of variables")
        num = Poly.monomial(n, t["mono"]["x"], t["mono"]["y"], pp)
        acc.setdefault(d, []).append(LocCoef(num, int(t["qxy_exp"])))
    return WeylOp(sig, {d: LocCoef.sum(cs, sig) for d, cs in acc.items()})


# ---------------------------------------------------------------------------
# TwistedOp
# ---------------------------------------------------------------------------


class TwistedOp:
    """Sum of ``P(x,y) * Q(x,y)^e * d^beta`` with ``e`` affine in lambda, mu.

    Canonical form: one entry per (derivative, exponent class mod Z) holding
    the lowest exponent, with Q(x,y) cancelled from the numerator.
    """

    __slots__ = ("sig", "_t")

    def __init__(self, sig: Signature, terms: Iterable[tuple[Poly, AffExp, DerivIndex]] = ()):
        self.sig = sig
        self._t = _twisted_normalize(sig, ((p, AffExp.coerce(e), tuple(d)) for p, e, d in terms))

    @classmethod
    def _raw(cls, sig: Signature, t: dict) -> "TwistedOp":
        obj = cls.__new__(cls)
        obj.sig = sig
        obj._t = t
        return obj

    @classmethod
    def power(cls, sig: Signature, exp) -> "TwistedOp":
        return cls(sig, [(Poly.const(sig.n, 1), AffExp.coerce(exp), (0,) * (2 * sig.n))])

    @classmethod
    def from_weyl(cls, op: WeylOp) -> "TwistedOp":
        return cls(op.sig, [(c.num, AffExp(c.qxy_exp), d) for d, c in op.terms.items()])

    def terms(self) -> list[tuple[Poly, AffExp, DerivIndex]]:
        return [(p, e, d) for (d, _), (p, e) in self._t.items()]

    def is_zero(self) -> bool:
        return not self._t

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwistedOp):
            return NotImplemented
        return self.sig == other.sig and self._t == other._t

    def __add__(self, other: "TwistedOp") -> "TwistedOp":
        return TwistedOp._raw(self.sig, _twisted_normalize(self.sig, self.terms() + other.terms()))

    def __neg__(self) -> "TwistedOp":
        return TwistedOp._raw(self.sig, {k: (-p, e) for k, (p, e) in self._t.items()})

    def __sub__(self, other: "TwistedOp") -> "TwistedOp":
        return self + (-other)

    def times_power(self, exp) -> "TwistedOp":
        """Left multiplication by Q(x,y)^exp."""
        exp = AffExp.coerce(exp)
        return TwistedOp(self.sig, [(p, e + exp, d) for p, e, d in self.terms()])

    def compose_left(self, op: WeylOp) -> "TwistedOp":
        """``op o self``."""
        sig = self.sig
        if op.sig != sig:
            raise ValueError("form mismatch")
        out: list[tuple[Poly, AffExp, DerivIndex]] = []
        for p, e, beta in self.terms():
            ep = e.as_param()

            def step(val, var, e=e, ep=ep):
                num, shift = val
                ee = (e - shift).as_param() if shift else ep
                return (sig.qxy * num.diff(var) + num * _dqxy(sig, var) * ee, shift + 1)

            cache = _DerivCache((p, 0), step)
            for gamma, c in op.terms.items():
                for delta, w in _sub_indices(gamma):
                    num, shift = cache.get(delta)
                    if num.is_zero():
                        continue
                    rem = tuple(x - y for x, y in zip(gamma, delta))
                    key = tuple(x + y for x, y in zip(rem, beta))
                    out.append((c.num * num * w, e - shift + c.qxy_exp, key))
        return TwistedOp(sig, out)

    def specialize(self, lam: Scalar, mu: Scalar) -> "TwistedOp":
        return TwistedOp(
            self.sig, [(p.specialize(lam, mu), e.specialize(lam, mu), d) for p, e, d in self.terms()]
        )

    def is_integral(self) -> bool:
        return all(e.is_integer() for _, e, _ in self.terms())

    def to_weyl(self) -> WeylOp:
        acc: dict[DerivIndex, list] = {}
        for p, e, d in self.terms():
            if not e.is_integer():
                raise PipelineIntegralityError(f"residual exponent {e} of Q(x,y) is not an integer")
            acc.setdefault(d, []).append(LocCoef(p, e.as_int()))
        return WeylOp._from_lists(self.sig, acc)

    def __str__(self) -> str:
        n = self.sig.n
        parts = []
        for p, e, d in sorted(self.terms(), key=lambda t: (-sum(t[2]), tuple(-x for x in t[2]))):
            parts.append(f"({p})*Q(x,y)^({e})" + (f"*{deriv_str(n, d)}" if any(d) else ""))
        return " + ".join(parts) if parts else "0"


def _twisted_normalize(sig: Signature, terms) -> dict:
    groups: dict[tuple, list[tuple[Poly, AffExp]]] = {}
    for p, e, d in terms:
        if p.is_zero():
            continue
        groups.setdefault((d, e.class_key()), []).append((p, e))
    out = {}
    div = sig.qxy_divisor
    for key, items in groups.items():
        emin = min(items, key=lambda it: it[1].const)[1]
        total = Poly.sum(sig.n, (p * _qxy_power(sig, (e - emin).as_int()) for p, e in items))
        if total.is_zero():
            continue
        while True:
            q = div.divide_exact(total)
            if q is None:
                break
            total, emin = q, emin + 1
        out[key] = (total, emin)
    return out


Stage = Union[AffExp, int, Fraction, WeylOp]


def twisted_pipeline(sig: Signature, stages: Sequence[Stage], integral: bool = True):
    """Compose ``stages[0] o stages[1] o ... o stages[-1]``.

    Numbers and ``AffExp`` entries are multiplications by Q(x,y)^e; ``WeylOp``
    entries are applied as operators.  Evaluation runs right to left.  With
    ``integral=True`` the result must have integral exponents and is returned
    as a ``WeylOp``; otherwise the ``TwistedOp`` is returned as is.
    """
    acc = TwistedOp.power(sig, 0)
    for stage in reversed(stages):
        if isinstance(stage, WeylOp):
            acc = acc.compose_left(stage)
        else:
            acc = acc.times_power(AffExp.coerce(stage))
    return acc.to_weyl() if integral else acc
