"""Sums of polynomial prefactors times symbolic powers of base forms.

``PowerFunc`` is the smallest convenient class of functions that contains
homogeneous test functions such as ``l(x)^(-lambda) * m(y)^(-mu)``, the
conjugating powers ``Q(x,y)^rho``, and is closed under partial derivatives.

Canonical form: terms are grouped by the set of bases carrying a
non-integral exponent (together with that exponent modulo Z).  Inside a group
every base is brought to its lowest exponent, prefactors are added, and then
every base dividing the prefactor is cancelled back into the exponent.
Non-negative integral exponents are folded into the prefactor.  With
pairwise non-proportional irreducible bases this representation is unique,
so a PowerFunc is zero iff it has no terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .exactalg import (
    AffExp,
    LeadingDivisor,
    ParamPoly,
    Poly,
    Scalar,
    Signature,
    as_rat,
    cone_remainder,
)
from .weyl import TwistedOp, WeylOp, _DerivCache

KINDS = ("lin_x", "lin_y", "Qx", "Qy", "Qxy")
_BIDEG = {"lin_x": (1, 0), "lin_y": (0, 1), "Qx": (2, 0), "Qy": (0, 2), "Qxy": (1, 1)}


@dataclass(frozen=True)
class BaseForm:
    kind: str
    vector: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown base form {self.kind!r}")
        if self.kind in ("lin_x", "lin_y"):
            if self.vector is None:
                raise ValueError("linear base forms need a coefficient vector")
            vec = tuple(as_rat(v) for v in self.vector)
            if not any(vec):
                raise ValueError("linear base form must be nonzero")
            object.__setattr__(self, "vector", vec)
        elif self.vector is not None:
            raise ValueError(f"{self.kind} takes no vector")

    @classmethod
    def lin_x(cls, vector: Iterable[Scalar]) -> "BaseForm":
        return cls("lin_x", tuple(vector))

    @classmethod
    def lin_y(cls, vector: Iterable[Scalar]) -> "BaseForm":
        return cls("lin_y", tuple(vector))

    @property
    def bidegree(self) -> tuple[int, int]:
        return _BIDEG[self.kind]

    def sort_key(self) -> tuple:
        return (KINDS.index(self.kind), self.vector or ())

    def poly(self, sig: Signature) -> Poly:
        if self.kind == "lin_x":
            return Poly.linear(sig.n, self.vector, "x")
        if self.kind == "lin_y":
            return Poly.linear(sig.n, self.vector, "y")
        return {"Qx": sig.qx, "Qy": sig.qy, "Qxy": sig.qxy}[self.kind]

    def divisor(self, sig: Signature) -> LeadingDivisor:
        cache = sig.__dict__.setdefault("_base_divisors", {})
        if self not in cache:
            cache[self] = LeadingDivisor.from_poly(self.poly(sig))
        return cache[self]

    def transform(self, ginv: Sequence[Sequence[Fraction]]) -> "BaseForm":
        """The base composed with v -> ginv v (diagonally on x and y)."""
        if self.vector is None:
            return self
        n = len(self.vector)
        vec = tuple(sum((self.vector[k] * ginv[k][j] for k in range(n)), Fraction(0)) for j in range(n))
        return BaseForm(self.kind, vec)

    def swap(self) -> "BaseForm":
        swapped = {"lin_x": "lin_y", "lin_y": "lin_x", "Qx": "Qy", "Qy": "Qx", "Qxy": "Qxy"}[self.kind]
        return BaseForm(swapped, self.vector)

    def label(self) -> str:
        if self.vector is None:
            return {"Qx": "Q(x)", "Qy": "Q(y)", "Qxy": "Q(x,y)"}[self.kind]
        v = "x" if self.kind == "lin_x" else "y"
        inner = " + ".join(f"{c}*{v}{i + 1}" for i, c in enumerate(self.vector) if c)
        return f"({inner})"

    def to_json(self) -> dict:
        out: dict = {"base": self.kind}
        if self.vector is not None:
            out["vector"] = [str(c) for c in self.vector]
        return out


@dataclass(frozen=True)
class PowerTerm:
    prefactor: Poly
    factors: tuple[tuple[BaseForm, AffExp], ...] = ()

    def factor_dict(self) -> dict[BaseForm, AffExp]:
        return dict(self.factors)


def _sort_factors(factors: Mapping[BaseForm, AffExp]) -> tuple[tuple[BaseForm, AffExp], ...]:
    return tuple(sorted(factors.items(), key=lambda kv: kv[0].sort_key()))


def _term_key(t: PowerTerm) -> tuple:
    return tuple((b.sort_key(), e.const, e.lam, e.mu) for b, e in t.factors)


def _canonicalize(sig: Signature, raw: Iterable[tuple[Poly, Mapping[BaseForm, AffExp]]]) -> tuple[PowerTerm, ...]:
    groups: dict[frozenset, list[tuple[Poly, dict]]] = {}
    for pre, facs in raw:
        if pre.is_zero():
            continue
        keep: dict[BaseForm, AffExp] = {}
        for b, e in facs.items():
            e = AffExp.coerce(e)
            if e.is_integer():
                k = e.as_int()
                if k == 0:
                    continue
                if k > 0:
                    pre = pre * b.poly(sig) ** k
                    continue
            keep[b] = keep[b] + e if b in keep else e
        key = frozenset((b, e.class_key()) for b, e in keep.items() if not e.is_integer())
        groups.setdefault(key, []).append((pre, keep))

    terms = []
    for items in groups.values():
        bases = {b for _, facs in items for b in facs}
        low: dict[BaseForm, AffExp] = {}
        for b in bases:
            exps = [facs.get(b, AffExp(0)) for _, facs in items]
            low[b] = min(exps, key=lambda e: e.const)
        total = Poly.sum(
            sig.n,
            (
                _times_powers(sig, pre, {b: (facs.get(b, AffExp(0)) - low[b]).as_int() for b in bases})
                for pre, facs in items
            ),
        )
        if total.is_zero():
            continue
        changed = True
        while changed:
            changed = False
            for b in sorted(bases, key=BaseForm.sort_key):
                e = low[b]
                if e.is_integer() and e.as_int() >= 0:
                    continue
                q = b.divisor(sig).divide_exact(total)
                if q is not None:
                    total, low[b] = q, e + 1
                    changed = True
        facs = {b: e for b, e in low.items() if not (e.is_integer() and e.as_int() == 0)}
        terms.append(PowerTerm(total, _sort_factors(facs)))
    terms.sort(key=_term_key)
    return tuple(terms)


def _times_powers(sig: Signature, pre: Poly, powers: Mapping[BaseForm, int]) -> Poly:
    for b, k in powers.items():
        if k:
            pre = pre * b.poly(sig) ** k
    return pre


class PowerFunc:
    """Finite sum of ``prefactor * prod B_i ** e_i`` in canonical form."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: Signature, terms: Iterable = ()):
        self.sig = sig
        raw = []
        for t in terms:
            if isinstance(t, PowerTerm):
                raw.append((t.prefactor, t.factor_dict()))
            else:
                pre, facs = t
                raw.append((pre, dict(facs)))
        self.terms = _canonicalize(sig, raw)

    @classmethod
    def _raw(cls, sig: Signature, terms: tuple[PowerTerm, ...]) -> "PowerFunc":
        obj = cls.__new__(cls)
        obj.sig = sig
        obj.terms = terms
        return obj

    @classmethod
    def from_poly(cls, sig: Signature, p: Poly) -> "PowerFunc":
        return cls(sig, [(p, {})])

    @classmethod
    def power(cls, sig: Signature, base: BaseForm, exp, prefactor: Optional[Poly] = None) -> "PowerFunc":
        pre = prefactor if prefactor is not None else Poly.const(sig.n, 1)
        return cls(sig, [(pre, {base: AffExp.coerce(exp)})])

    @classmethod
    def product(cls, sig: Signature, prefactor: Poly, factors: Mapping[BaseForm, object]) -> "PowerFunc":
        return cls(sig, [(prefactor, {b: AffExp.coerce(e) for b, e in factors.items()})])

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerFunc):
            return NotImplemented
        return self.sig == other.sig and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.sig, self.terms))

    def __add__(self, other: "PowerFunc") -> "PowerFunc":
        return PowerFunc(self.sig, self.terms + other.terms)

    def __neg__(self) -> "PowerFunc":
        return PowerFunc._raw(self.sig, tuple(PowerTerm(-t.prefactor, t.factors) for t in self.terms))

    def __sub__(self, other: "PowerFunc") -> "PowerFunc":
        return self + (-other)

    def scale(self, c) -> "PowerFunc":
        return PowerFunc(self.sig, [(t.prefactor * c, t.factor_dict()) for t in self.terms])

    def mul_poly(self, p: Poly) -> "PowerFunc":
        return PowerFunc(self.sig, [(t.prefactor * p, t.factor_dict()) for t in self.terms])

    def times_power(self, base: BaseForm, exp) -> "PowerFunc":
        exp = AffExp.coerce(exp)
        raw = []
        for t in self.terms:
            facs = t.factor_dict()
            facs[base] = facs[base] + exp if base in facs else exp
            raw.append((t.prefactor, facs))
        return PowerFunc(self.sig, raw)

    def _diff_raw(self, var: int, weight=1) -> list:
        sig = self.sig
        raw = []
        for t in self.terms:
            facs = t.factor_dict()
            d0 = t.prefactor.diff(var)
            if not d0.is_zero():
                raw.append((d0 * weight if weight != 1 else d0, facs))
            for b, e in t.factors:
                db = b.poly(sig).diff(var)
                if db.is_zero():
                    continue
                f2 = dict(facs)
                f2[b] = e - 1
                raw.append((t.prefactor * db * (e.as_param() * weight), f2))
        return raw

    def diff(self, var: int) -> "PowerFunc":
        """Partial derivative by the chain rule on every power."""
        return PowerFunc(self.sig, self._diff_raw(var))

    def second_diff_sum(self, pairs: Sequence[tuple[int, int, object]]) -> "PowerFunc":
        """sum of w * d^2 f / dv dv' over (v, v', w), canonicalized once."""
        raw = []
        firsts: dict[int, PowerFunc] = {}
        for v, v2, w in pairs:
            if v not in firsts:
                firsts[v] = self.diff(v)
            raw.extend(firsts[v]._diff_raw(v2, w))
        return PowerFunc(self.sig, raw)

    def diff_multi(self, index: Sequence[int]) -> "PowerFunc":
        f = self
        for var, e in enumerate(index):
            for _ in range(e):
                f = f.diff(var)
        return f

    def specialize(self, lam: Scalar, mu: Scalar) -> "PowerFunc":
        return PowerFunc(
            self.sig,
            [
                (t.prefactor.specialize(lam, mu), {b: e.specialize(lam, mu) for b, e in t.factors})
                for t in self.terms
            ],
        )

    def as_poly(self) -> Optional[Poly]:
        """The polynomial this function equals, if it is one."""
        if not self.terms:
            return Poly.zero(self.sig.n)
        if len(self.terms) == 1 and not self.terms[0].factors:
            return self.terms[0].prefactor
        return None

    def swap_xy(self) -> "PowerFunc":
        return PowerFunc(
            self.sig,
            [(t.prefactor.swap_xy(), {b.swap(): e.swap() for b, e in t.factors}) for t in self.terms],
        )

    def homogeneity(self) -> Optional[tuple[AffExp, AffExp]]:
        return func_homogeneity(self)

    def vanishes_on_cone(self) -> bool:
        return func_vanishes_on_cone(self)

    def to_json(self) -> dict:
        return {
            "terms": [
                {
                    "prefactor": t.prefactor.to_json(),
                    "factors": [dict(b.to_json(), exp=e.to_json()) for b, e in t.factors],
                }
                for t in self.terms
            ]
        }

    @classmethod
    def from_json(cls, sig: Signature, data: Mapping) -> "PowerFunc":
        raw = []
        for t in data["terms"]:
            pre = Poly.from_json(sig.n, t.get("prefactor", [{"coeff": 1}]))
            facs: dict[BaseForm, AffExp] = {}
            for f in t.get("factors", []):
                vec = f.get("vector")
                b = BaseForm(f["base"], tuple(as_rat(str(v)) for v in vec) if vec is not None else None)
                if b.vector is not None and len(b.vector) != sig.n:
                    raise ValueError("linear form vector has wrong length")
                e = AffExp.from_json(f.get("exp", {"const": 1}))
                facs[b] = facs[b] + e if b in facs else e
            raw.append((pre, facs))
        return cls(sig, raw)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            pieces = [f"({t.prefactor})"] if t.factors else [str(t.prefactor)]
            for b, e in t.factors:
                pieces.append(f"{b.label()}^({e})")
            parts.append("*".join(pieces))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PowerFunc({self})"


def func_diff(f: PowerFunc, var: int) -> PowerFunc:
    return f.diff(var)


def func_apply_weyl(op, f: PowerFunc) -> PowerFunc:
    """Apply a ``WeylOp`` or ``TwistedOp`` term by term."""
    sig = f.sig
    if op.sig != sig:
        raise ValueError("form mismatch")
    qxy = BaseForm("Qxy")
    cache = _DerivCache(f, lambda g, v: g.diff(v))
    if isinstance(op, WeylOp):
        items = [(c.num, AffExp(c.qxy_exp), d) for d, c in op.terms.items()]
    elif isinstance(op, TwistedOp):
        items = op.terms()
    else:
        raise TypeError(f"cannot apply {type(op).__name__}")
    raw = []
    for num, e, d in items:
        g = cache.get(tuple(d))
        for t in g.terms:
            facs = t.factor_dict()
            facs[qxy] = facs[qxy] + e if qxy in facs else e
            raw.append((t.prefactor * num, facs))
    return PowerFunc(sig, raw)


def func_homogeneity(f: PowerFunc) -> Optional[tuple[AffExp, AffExp]]:
    """Common (x-degree, y-degree) of all terms, or None when they disagree."""
    degs = set()
    for t in f.terms:
        if not t.prefactor.is_bihomogeneous():
            return None
        a, b = t.prefactor.bidegree()
        dx, dy = AffExp(a), AffExp(b)
        for base, e in t.factors:
            bx, by = base.bidegree
            for _ in range(bx):
                dx = dx + e
            for _ in range(by):
                dy = dy + e
        degs.add((dx, dy))
    if len(degs) != 1:
        return None
    return degs.pop()


def func_vanishes_on_cone(f: PowerFunc) -> bool:
    """Whether ``f`` vanishes on the generic part of the cone Q(x) = Q(y) = 0.

    Every factor other than Q(x), Q(y) is treated as invertible there; the
    Q(x), Q(y) exponents must be non-negative integers.
    """
    for t in f.terms:
        for b, e in t.factors:
            if b.kind in ("Qx", "Qy"):
                raise ValueError(
                    f"exponent {e} of {b.label()} is not a non-negative integer; vanishing is undecidable"
                )
    return all(cone_remainder(t.prefactor, f.sig).is_zero() for t in f.terms)


def common_coordinates(funcs: Sequence[PowerFunc]) -> list[dict]:
    """Coordinate dictionaries of several functions in one shared basis.

    Terms are grouped by exponent class as in the canonical form, every base
    is brought to the lowest exponent seen across *all* inputs, and the
    resulting prefactors are read off monomial by monomial.  The map is
    linear, so linear relations among the inputs become linear relations
    among the dictionaries.
    """
    def group_key(t: PowerTerm) -> frozenset:
        return frozenset((b, e.class_key()) for b, e in t.factors if not e.is_integer())

    low: dict[tuple, AffExp] = {}
    for f in funcs:
        for t in f.terms:
            g = group_key(t)
            for b, e in t.factors:
                k = (g, b)
                if k not in low or e.const < low[k].const:
                    low[k] = e
    out = []
    for f in funcs:
        coords: dict = {}
        for t in f.terms:
            g = group_key(t)
            facs = t.factor_dict()
            bases = [b for (gg, b) in low if gg == g]
            pre = _times_powers(
                f.sig, t.prefactor, {b: (facs.get(b, AffExp(0)) - low[(g, b)]).as_int() for b in bases}
            )
            for mono, v in pre.terms.items():
                coords[(g, mono)] = coords.get((g, mono), 0) + v
        out.append({k: v for k, v in coords.items() if v})
    return out


def box_x_func(f: PowerFunc) -> PowerFunc:
    """The x-d'Alembertian applied directly by differentiation."""
    sig = f.sig
    return f.second_diff_sum([(j, j, sig.signs[j]) for j in range(sig.n)])


def box_y_func(f: PowerFunc) -> PowerFunc:
    sig = f.sig
    return f.second_diff_sum([(sig.n + j, sig.n + j, sig.signs[j]) for j in range(sig.n)])
