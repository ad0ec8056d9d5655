"""Exact scalar and polynomial arithmetic.

Three rings live here:

* ``ParamPoly`` -- polynomials in the two formal parameters lambda and mu
  with rational coefficients.
* ``Poly`` -- polynomials in x_1..x_n, y_1..y_n whose coefficients are
  ``ParamPoly``.  Internally a term is keyed by one flat exponent tuple of
  length 2n+2: the x block, the y block, then the lambda and mu degrees.
* ``AffExp`` -- exponents of the form c + a*lambda + b*mu.

Variables are addressed by a 0-based index into the 2n-long x/y block:
index j < n is x_{j+1}, index n + j is y_{j+1}.

The monomial order used for division is graded lexicographic on the x/y
block with x_1 > ... > x_n > y_1 > ... > y_n.  Division by the quadratic
forms is done in closed form by rewriting the leading monomial, which is
valid because every divisor used here has the shape ``c*u + tail`` where
``tail`` shares no variable with the leading monomial ``u``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

Rat = Fraction
Scalar = Union[int, Fraction]

LAMBDA = "λ"
MU = "μ"


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and "a/b" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


# ---------------------------------------------------------------------------
# ParamPoly
# ---------------------------------------------------------------------------


class ParamPoly:
    """Polynomial in lambda and mu over the rationals.

    Immutable; zero coefficients are never stored.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Optional[Mapping[tuple[int, int], Scalar]] = None):
        c: dict[tuple[int, int], Fraction] = {}
        if coeffs:
            for k, v in coeffs.items():
                v = as_rat(v)
                if v:
                    c[(int(k[0]), int(k[1]))] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> "ParamPoly":
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def const(cls, value: Scalar) -> "ParamPoly":
        return cls({(0, 0): value})

    @classmethod
    def lam(cls) -> "ParamPoly":
        return cls({(1, 0): 1})

    @classmethod
    def mu(cls) -> "ParamPoly":
        return cls({(0, 1): 1})

    @classmethod
    def coerce(cls, value) -> "ParamPoly":
        if isinstance(value, ParamPoly):
            return value
        if isinstance(value, AffExp):
            return value.as_param()
        return cls.const(as_rat(value))

    @property
    def coeffs(self) -> Mapping[tuple[int, int], Fraction]:
        return self._c

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self._c)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._c.get((0, 0), Fraction(0))

    def degree(self) -> int:
        return max((i + j for i, j in self._c), default=-1)

    def __add__(self, other) -> "ParamPoly":
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return ParamPoly._raw(c)

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other) -> "ParamPoly":
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ParamPoly":
        return (-self) + other

    def __mul__(self, other) -> "ParamPoly":
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        c: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), v1 in self._c.items():
            for (i2, j2), v2 in other._c.items():
                k = (i1 + i2, j1 + j2)
                s = c.get(k, 0) + v1 * v2
                if s:
                    c[k] = s
                else:
                    c.pop(k, None)
        return ParamPoly._raw(c)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "ParamPoly":
        if e < 0:
            raise ValueError("negative power of a ParamPoly")
        out = ParamPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def evaluate(self, lam: Scalar, mu: Scalar) -> Fraction:
        lam, mu = as_rat(lam), as_rat(mu)
        return sum((v * lam**i * mu**j for (i, j), v in self._c.items()), Fraction(0))

    def swap(self) -> "ParamPoly":
        """Exchange lambda and mu."""
        return ParamPoly._raw({(j, i): v for (i, j), v in self._c.items()})

    def sorted_items(self) -> list[tuple[tuple[int, int], Fraction]]:
        return sorted(self._c.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0]))

    def to_json(self) -> list[dict]:
        return [
            {"num": v.numerator, "den": v.denominator, "degλ": i, "degμ": j}
            for (i, j), v in self.sorted_items()
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "ParamPoly":
        out: dict[tuple[int, int], Fraction] = {}
        for t in data:
            k = (int(t.get("degλ", 0)), int(t.get("degμ", 0)))
            out[k] = out.get(k, 0) + Fraction(int(t["num"]), int(t.get("den", 1)))
        return cls(out)

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in self.sorted_items():
            mono = "*".join(
                s for s in (_pow_str(LAMBDA, i), _pow_str(MU, j)) if s
            )
            parts.append(_join_coeff(v, mono))
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"ParamPoly({self})"

    def latex(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in self.sorted_items():
            mono = "".join(
                s for s in (_pow_latex(r"\lambda", i), _pow_latex(r"\mu", j)) if s
            )
            parts.append(_join_coeff_latex(v, mono))
        return _join_signed(parts)


def _coerce_param(value):
    if isinstance(value, ParamPoly):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return ParamPoly.const(value)
    if isinstance(value, AffExp):
        return value.as_param()
    return NotImplemented


def _pow_str(name: str, e: int) -> str:
    if e == 0:
        return ""
    return name if e == 1 else f"{name}^{e}"


def _pow_latex(name: str, e: int) -> str:
    if e == 0:
        return ""
    return name if e == 1 else f"{name}^{{{e}}}"


def _join_coeff(v: Fraction, mono: str) -> str:
    if not mono:
        return str(v)
    if v == 1:
        return mono
    if v == -1:
        return "-" + mono
    return f"{v}*{mono}"


def _join_coeff_latex(v: Fraction, mono: str) -> str:
    if v.denominator == 1:
        num = str(v.numerator)
    else:
        sign = "-" if v < 0 else ""
        num = f"{sign}\\tfrac{{{abs(v.numerator)}}}{{{v.denominator}}}"
    if not mono:
        return num
    if v == 1:
        return mono
    if v == -1:
        return "-" + mono
    return num + mono


def _join_signed(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


# ---------------------------------------------------------------------------
# AffExp
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffExp:
    """Exponent ``const + lam*lambda + mu*mu`` with integer parameter slopes."""

    const: Fraction = Fraction(0)
    lam: int = 0
    mu: int = 0

    def __post_init__(self):
        object.__setattr__(self, "const", as_rat(self.const))
        if not isinstance(self.lam, int) or not isinstance(self.mu, int):
            raise TypeError("parameter slopes of an AffExp must be integers")

    @classmethod
    def coerce(cls, value) -> "AffExp":
        if isinstance(value, AffExp):
            return value
        return cls(as_rat(value))

    def __add__(self, other) -> "AffExp":
        other = AffExp.coerce(other)
        return AffExp(self.const + other.const, self.lam + other.lam, self.mu + other.mu)

    __radd__ = __add__

    def __neg__(self) -> "AffExp":
        return AffExp(-self.const, -self.lam, -self.mu)

    def __sub__(self, other) -> "AffExp":
        return self + (-AffExp.coerce(other))

    def __rsub__(self, other) -> "AffExp":
        return AffExp.coerce(other) - self

    def is_integer(self) -> bool:
        return self.lam == 0 and self.mu == 0 and self.const.denominator == 1

    def as_int(self) -> int:
        if not self.is_integer():
            raise ValueError(f"exponent {self} is not an integer constant")
        return int(self.const)

    def class_key(self) -> tuple[Fraction, int, int]:
        """Key identifying the exponent modulo integer shifts."""
        return (self.const - math.floor(self.const), self.lam, self.mu)

    def as_param(self) -> ParamPoly:
        return ParamPoly({(0, 0): self.const, (1, 0): self.lam, (0, 1): self.mu})

    def specialize(self, lam: Scalar, mu: Scalar) -> "AffExp":
        return AffExp(self.const + self.lam * as_rat(lam) + self.mu * as_rat(mu))

    def swap(self) -> "AffExp":
        return AffExp(self.const, self.mu, self.lam)

    def to_json(self) -> dict:
        return {"const": str(self.const), "dλ": self.lam, "dμ": self.mu}

    @classmethod
    def from_json(cls, data: Mapping) -> "AffExp":
        return cls(as_rat(str(data.get("const", 0))), int(data.get("dλ", 0)), int(data.get("dμ", 0)))

    def __str__(self) -> str:
        return str(self.as_param()) if (self.lam or self.mu or self.const) else "0"

    def latex(self) -> str:
        return self.as_param().latex()


# ---------------------------------------------------------------------------
# Signature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Quadratic form ``sum_j signs[j] * x_j**2`` of signature (p, q).

    ``flipped=True`` gives the opposite form -Q in the same coordinates; it is
    only used to check the sign-flip identity.
    """

    p: int
    q: int
    flipped: bool = False

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)):
            raise TypeError("p and q must be integers")
        if self.p < 1 or self.q < 1:
            raise ValueError(f"signature ({self.p},{self.q}) needs p >= 1 and q >= 1")

    @classmethod
    def parse(cls, text: str) -> "Signature":
        p, q = (int(t) for t in text.split(","))
        return cls(p, q)

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def standard(self) -> bool:
        """Whether n >= 3, the range in which the cone ideal is prime."""
        return self.n >= 3

    def require_standard(self) -> None:
        if not self.standard:
            raise ValueError(f"signature ({self.p},{self.q}) needs p + q >= 3")

    @cached_property
    def signs(self) -> tuple[int, ...]:
        s = [1] * self.p + [-1] * self.q
        if self.flipped:
            s = [-v for v in s]
        return tuple(s)

    def negated(self) -> "Signature":
        return Signature(self.p, self.q, not self.flipped)

    def label(self) -> str:
        return f"{self.p},{self.q}" + ("(-)" if self.flipped else "")

    # quadratic forms, cached per signature
    @cached_property
    def qx(self) -> "Poly":
        n = self.n
        return Poly.sum(n, (Poly.var(n, j) ** 2 * self.signs[j] for j in range(n)))

    @cached_property
    def qy(self) -> "Poly":
        n = self.n
        return Poly.sum(n, (Poly.var(n, n + j) ** 2 * self.signs[j] for j in range(n)))

    @cached_property
    def qxy(self) -> "Poly":
        n = self.n
        return Poly.sum(
            n, (Poly.var(n, j) * Poly.var(n, n + j) * self.signs[j] for j in range(n))
        )

    def q_vector(self, v: Iterable[Scalar]) -> Fraction:
        return sum((s * as_rat(a) ** 2 for s, a in zip(self.signs, v)), Fraction(0))

    def q_bilinear(self, v: Iterable[Scalar], w: Iterable[Scalar]) -> Fraction:
        return sum(
            (s * as_rat(a) * as_rat(b) for s, a, b in zip(self.signs, v, w)), Fraction(0)
        )

    @cached_property
    def qx_divisor(self) -> "LeadingDivisor":
        return LeadingDivisor.from_poly(self.qx)

    @cached_property
    def qy_divisor(self) -> "LeadingDivisor":
        return LeadingDivisor.from_poly(self.qy)

    @cached_property
    def qxy_divisor(self) -> "LeadingDivisor":
        return LeadingDivisor.from_poly(self.qxy)


# ---------------------------------------------------------------------------
# Poly
# ---------------------------------------------------------------------------

Key = tuple[int, ...]


def _key_add(a: Key, b: Key) -> Key:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Polynomial in x_1..x_n, y_1..y_n with coefficients in Q[lambda, mu]."""

    __slots__ = ("n", "_t", "_hash")

    def __init__(self, n: int, terms: Optional[Mapping[Key, Scalar]] = None):
        self.n = n
        t: dict[Key, Fraction] = {}
        if terms:
            width = 2 * n + 2
            for k, v in terms.items():
                if len(k) != width:
                    raise ValueError(f"monomial {k} has wrong length for n={n}")
                v = as_rat(v)
                if v:
                    t[tuple(k)] = v
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, n: int, t: dict) -> "Poly":
        obj = cls.__new__(cls)
        obj.n = n
        obj._t = t
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, n: int, value) -> "Poly":
        return cls.from_param(n, ParamPoly.coerce(value))

    @classmethod
    def from_param(cls, n: int, pp: ParamPoly) -> "Poly":
        z = (0,) * (2 * n)
        return cls._raw(n, {z + k: v for k, v in pp.coeffs.items()})

    @classmethod
    def var(cls, n: int, index: int) -> "Poly":
        if not 0 <= index < 2 * n:
            raise IndexError(f"variable index {index} out of range for n={n}")
        k = [0] * (2 * n + 2)
        k[index] = 1
        return cls._raw(n, {tuple(k): Fraction(1)})

    @classmethod
    def x(cls, n: int, j: int) -> "Poly":
        """x_{j+1} (0-based j)."""
        return cls.var(n, j)

    @classmethod
    def y(cls, n: int, j: int) -> "Poly":
        """y_{j+1} (0-based j)."""
        return cls.var(n, n + j)

    @classmethod
    def monomial(cls, n: int, xexp: Iterable[int], yexp: Iterable[int], coeff=1) -> "Poly":
        xexp, yexp = tuple(xexp), tuple(yexp)
        if len(xexp) != n or len(yexp) != n:
            raise ValueError("exponent vectors must have length n")
        pp = ParamPoly.coerce(coeff)
        return cls._raw(n, {xexp + yexp + k: v for k, v in pp.coeffs.items()})

    @classmethod
    def linear(cls, n: int, vector: Iterable[Scalar], block: str = "x") -> "Poly":
        off = 0 if block == "x" else n
        t = {}
        for j, c in enumerate(vector):
            c = as_rat(c)
            if c:
                k = [0] * (2 * n + 2)
                k[off + j] = 1
                t[tuple(k)] = c
        return cls._raw(n, t)

    @classmethod
    def sum(cls, n: int, polys: Iterable["Poly"]) -> "Poly":
        t: dict[Key, Fraction] = {}
        for p in polys:
            for k, v in p._t.items():
                s = t.get(k, 0) + v
                if s:
                    t[k] = s
                else:
                    t.pop(k, None)
        return cls._raw(n, t)

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Mapping[Key, Fraction]:
        return self._t

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_param_constant(self) -> bool:
        """True when no x or y variable occurs."""
        m = 2 * self.n
        return all(not any(k[:m]) for k in self._t)

    def as_param(self) -> ParamPoly:
        if not self.is_param_constant():
            raise ValueError("polynomial depends on x or y")
        m = 2 * self.n
        return ParamPoly._raw({k[m:]: v for k, v in self._t.items()})

    def has_params(self) -> bool:
        m = 2 * self.n
        return any(k[m] or k[m + 1] for k in self._t)

    def collect(self) -> dict[Key, ParamPoly]:
        """Group terms by x/y monomial, giving ParamPoly coefficients."""
        m = 2 * self.n
        out: dict[Key, dict] = {}
        for k, v in self._t.items():
            out.setdefault(k[:m], {})[k[m:]] = v
        return {k: ParamPoly._raw(c) for k, c in out.items()}

    def coefficient(self, xexp: Iterable[int], yexp: Iterable[int]) -> ParamPoly:
        mono = tuple(xexp) + tuple(yexp)
        m = 2 * self.n
        return ParamPoly._raw({k[m:]: v for k, v in self._t.items() if k[:m] == mono})

    def degree(self) -> int:
        m = 2 * self.n
        return max((sum(k[:m]) for k in self._t), default=-1)

    def bidegree(self) -> tuple[int, int]:
        """(x-degree, y-degree) of a nonzero bihomogeneous polynomial."""
        if not self._t:
            raise ValueError("the zero polynomial has no bidegree")
        n = self.n
        degs = {(sum(k[:n]), sum(k[n : 2 * n])) for k in self._t}
        if len(degs) != 1:
            raise ValueError(f"polynomial is not bihomogeneous: bidegrees {sorted(degs)}")
        return degs.pop()

    def is_bihomogeneous(self) -> bool:
        try:
            self.bidegree()
        except ValueError:
            return False
        return True

    def leading_monomial(self) -> Key:
        """Leading x/y exponent vector in graded lex order (x_1 largest)."""
        if not self._t:
            raise ValueError("zero polynomial has no leading monomial")
        m = 2 * self.n
        return max((k[:m] for k in self._t), key=lambda e: (sum(e), e))

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError(f"mixing polynomials with n={self.n} and n={other.n}")
            return other
        if isinstance(other, ParamPoly):
            return Poly.from_param(self.n, other)
        if isinstance(other, AffExp):
            return Poly.from_param(self.n, other.as_param())
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(self.n, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self._t)
        for k, v in other._t.items():
            s = t.get(k, 0) + v
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        return Poly._raw(self.n, t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n, {k: -v for k, v in self._t.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self._t)
        for k, v in other._t.items():
            s = t.get(k, 0) - v
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        return Poly._raw(self.n, t)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return Poly.zero(self.n)
            return Poly._raw(self.n, {k: v * other for k, v in self._t.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = (self._t, other._t) if len(self._t) >= len(other._t) else (other._t, self._t)
        t: dict[Key, Fraction] = {}
        for k2, v2 in b.items():
            for k1, v1 in a.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                s = t.get(k, 0) + v1 * v2
                if s:
                    t[k] = s
                else:
                    del t[k]
        return Poly._raw(self.n, t)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(self.n, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.n == other.n and self._t == other._t
        other = _coerce_param(other)
        if other is NotImplemented:
            return NotImplemented
        return self.is_param_constant() and self.as_param() == other

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._t.items())))
        return self._hash

    # -- calculus and evaluation -----------------------------------------
    def diff(self, var: int) -> "Poly":
        """Partial derivative by variable index (0..2n-1)."""
        if not 0 <= var < 2 * self.n:
            raise IndexError(f"variable index {var} out of range")
        t: dict[Key, Fraction] = {}
        for k, v in self._t.items():
            e = k[var]
            if e:
                nk = list(k)
                nk[var] = e - 1
                t[tuple(nk)] = v * e
        return Poly._raw(self.n, t)

    def diff_multi(self, index: Iterable[int]) -> "Poly":
        """Apply the derivative multi-index (length 2n)."""
        p = self
        for var, e in enumerate(index):
            for _ in range(e):
                if not p._t:
                    return p
                p = p.diff(var)
        return p

    def eval_at(self, xs: Iterable[Scalar], ys: Iterable[Scalar]) -> ParamPoly:
        point = [as_rat(v) for v in xs] + [as_rat(v) for v in ys]
        if len(point) != 2 * self.n:
            raise ValueError("point has wrong dimension")
        m = 2 * self.n
        out: dict[tuple[int, int], Fraction] = {}
        for k, v in self._t.items():
            val = v
            for e, a in zip(k[:m], point):
                if e:
                    val *= a**e
            if val:
                pk = k[m:]
                s = out.get(pk, 0) + val
                if s:
                    out[pk] = s
                else:
                    out.pop(pk, None)
        return ParamPoly._raw(out)

    def specialize(self, lam: Scalar, mu: Scalar) -> "Poly":
        lam, mu = as_rat(lam), as_rat(mu)
        if not self.has_params():
            return self
        m = 2 * self.n
        t: dict[Key, Fraction] = {}
        for k, v in self._t.items():
            nk = k[:m] + (0, 0)
            s = t.get(nk, 0) + v * lam ** k[m] * mu ** k[m + 1]
            if s:
                t[nk] = s
            else:
                t.pop(nk, None)
        return Poly._raw(self.n, t)

    def swap_xy(self) -> "Poly":
        """Exchange x <-> y and lambda <-> mu."""
        n = self.n
        return Poly._raw(
            n,
            {k[n : 2 * n] + k[:n] + (k[2 * n + 1], k[2 * n]): v for k, v in self._t.items()},
        )

    def substitute_linear(self, x_images: list["Poly"], y_images: list["Poly"]) -> "Poly":
        """Replace x_j by x_images[j] and y_j by y_images[j]."""
        n = self.n
        images = list(x_images) + list(y_images)
        powers: dict[tuple[int, int], Poly] = {}

        def power(var: int, e: int) -> Poly:
            key = (var, e)
            if key not in powers:
                powers[key] = images[var] if e == 1 else power(var, e - 1) * images[var]
            return powers[key]

        out: dict[Key, Fraction] = {}
        m = 2 * n
        for k, v in self._t.items():
            term = Poly._raw(n, {(0,) * m + k[m:]: v})
            for var in range(m):
                if k[var]:
                    term = term * power(var, k[var])
            for tk, tv in term._t.items():
                s = out.get(tk, 0) + tv
                if s:
                    out[tk] = s
                else:
                    out.pop(tk, None)
        return Poly._raw(n, out)

    # -- rendering --------------------------------------------------------
    def sorted_keys(self) -> list[Key]:
        m = 2 * self.n
        return sorted(self._t, key=lambda k: (-sum(k[:m]), tuple(-e for e in k[:m]), -k[m], -k[m + 1]))

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for mono, pp in sorted(self.collect().items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))):
            ms = monomial_str(self.n, mono)
            if pp.is_constant():
                parts.append(_join_coeff(pp.constant_value(), ms))
            else:
                parts.append(f"({pp})*{ms}" if ms else f"({pp})")
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"Poly(n={self.n}: {self})"

    def latex(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for mono, pp in sorted(self.collect().items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))):
            ms = monomial_latex(self.n, mono)
            if pp.is_constant():
                parts.append(_join_coeff_latex(pp.constant_value(), ms))
            else:
                parts.append(f"\\left({pp.latex()}\\right){ms}" if ms else pp.latex())
        return _join_signed(parts)

    def to_json(self) -> list[dict]:
        n = self.n
        return [
            {"coeff": pp.to_json(), "x": list(mono[:n]), "y": list(mono[n:])}
            for mono, pp in sorted(self.collect().items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
        ]

    @classmethod
    def from_json(cls, n: int, data: Iterable[Mapping]) -> "Poly":
        polys = []
        for t in data:
            coeff = t.get("coeff", [{"num": 1, "den": 1}])
            if isinstance(coeff, (int, str)):
                coeff = ParamPoly.const(as_rat(coeff))
            else:
                coeff = ParamPoly.from_json(coeff)
            polys.append(cls.monomial(n, t.get("x", [0] * n), t.get("y", [0] * n), coeff))
        return cls.sum(n, polys)


def var_name(n: int, var: int) -> str:
    return f"x{var + 1}" if var < n else f"y{var - n + 1}"


def monomial_str(n: int, mono: Key) -> str:
    return "*".join(_pow_str(var_name(n, i), e) for i, e in enumerate(mono[: 2 * n]) if e)


def monomial_latex(n: int, mono: Key) -> str:
    out = []
    for i, e in enumerate(mono[: 2 * n]):
        if e:
            base = f"x_{{{i + 1}}}" if i < n else f"y_{{{i - n + 1}}}"
            out.append(base if e == 1 else f"{base}^{{{e}}}")
    return " ".join(out)


# ---------------------------------------------------------------------------
# Division
# ---------------------------------------------------------------------------


@dataclass
class LeadingDivisor:
    """Divisor ``d = c*u + tail`` where the monomial ``u`` shares no variable
    with ``tail``.

    Division rewrites each occurrence of ``u`` as ``v = -tail/c``; the
    identity ``u^k - v^k = (u - v) * sum_i u^(k-1-i) v^i`` yields the quotient.
    The remainder has no monomial divisible by ``u``, so it is the normal form
    with respect to ``d``.
    """

    divisor: Poly
    u: Key  # leading x/y exponent vector (length 2n)
    c: Fraction
    v: Poly
    _vpow: list = field(default_factory=list, repr=False)
    _geo: list = field(default_factory=list, repr=False)
    _point: list = field(default_factory=list, repr=False)
    _powcache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_poly(cls, d: Poly) -> "LeadingDivisor":
        if d.has_params():
            raise ValueError("divisor must not involve the parameters")
        n = d.n
        u = d.leading_monomial()
        uk = u + (0, 0)
        c = d.terms[uk]
        tail = d - Poly._raw(n, {uk: c})
        used = {i for i, e in enumerate(u) if e}
        for k in tail.terms:
            if any(k[i] for i in used):
                raise ValueError("leading monomial shares variables with the tail")
        return cls(d, u, c, tail * (-1 / c))

    def _v_power(self, k: int) -> Poly:
        n = self.divisor.n
        if not self._vpow:
            self._vpow.append(Poly.const(n, 1))
        while len(self._vpow) <= k:
            self._vpow.append(self._vpow[-1] * self.v)
        return self._vpow[k]

    def _geo_sum(self, k: int) -> Poly:
        # G_k = sum_{i<k} u^(k-1-i) v^i, G_0 = 0, G_k = u*G_{k-1} + v^(k-1)
        n = self.divisor.n
        if not self._geo:
            self._geo.append(Poly.zero(n))
        upoly = Poly._raw(n, {self.u + (0, 0): Fraction(1)})
        while len(self._geo) <= k:
            j = len(self._geo)
            self._geo.append(upoly * self._geo[j - 1] + self._v_power(j - 1))
        return self._geo[k]

    def divmod(self, p: Poly, want_quotient: bool = True) -> tuple[Optional[Poly], Poly]:
        n = p.n
        if n != self.divisor.n:
            raise ValueError("dimension mismatch")
        u = self.u
        used = [(i, e) for i, e in enumerate(u) if e]
        rem: dict[Key, Fraction] = {}
        quo_parts: dict[int, dict[Key, Fraction]] = {}
        # group monomials by the power k of u they contain
        by_k: dict[int, dict[Key, Fraction]] = {}
        for key, val in p.terms.items():
            k = min(key[i] // e for i, e in used)
            if k == 0:
                s = rem.get(key, 0) + val
                if s:
                    rem[key] = s
                else:
                    rem.pop(key, None)
                continue
            rest = list(key)
            for i, e in used:
                rest[i] -= k * e
            rk = tuple(rest)
            bucket = by_k.setdefault(k, {})
            bucket[rk] = bucket.get(rk, 0) + val
        quotient = Poly.zero(n) if want_quotient else None
        remainder = Poly._raw(n, rem)
        for k, bucket in by_k.items():
            rest_poly = Poly._raw(n, {kk: vv for kk, vv in bucket.items() if vv})
            remainder = remainder + rest_poly * self._v_power(k)
            if want_quotient:
                quotient = quotient + rest_poly * self._geo_sum(k)
        if want_quotient:
            quotient = quotient * (1 / self.c)
        return quotient, remainder

    def _remainder_at_point(self, p: Poly) -> Optional[int]:
        """The remainder of ``p`` evaluated at a fixed random point mod a prime.

        The remainder is reduced, so a nonzero value proves that the divisor
        does not divide ``p``.  None when a denominator hits the prime.
        """
        P = _PRIME
        if not self._point:
            rng = random.Random(len(self.divisor.terms) * 7919 + sum(self.u))
            self._point.extend(rng.randrange(2, P - 1) for _ in range(2 * self.divisor.n + 2))
            self._point.append(_eval_mod(self.v, self._point))
        pt = self._point
        vpt = pt[-1]
        if vpt is None:
            return None
        used = [(i, e) for i, e in enumerate(self.u) if e]
        pw = self._powcache
        total = 0
        for key, val in p.terms.items():
            den = val.denominator
            if den == 1:
                term = val.numerator % P
            else:
                if den % P == 0:
                    return None
                term = val.numerator % P * _inv_mod(den) % P
            k = min(key[i] // e for i, e in used)
            if k:
                key = tuple(e - k * self.u[i] if i < len(self.u) else e for i, e in enumerate(key))
                key = key + (k,)
            for i, e in enumerate(key):
                if e:
                    x = pw.get((i, e))
                    if x is None:
                        x = pw[(i, e)] = pow(pt[i] if i < len(pt) - 1 else vpt, e, P)
                    term = term * x % P
            total = (total + term) % P
        return total

    def divide_exact(self, p: Poly) -> Optional[Poly]:
        if self._remainder_at_point(p):
            return None
        q, r = self.divmod(p)
        return q if r.is_zero() else None


_PRIME = (1 << 61) - 1


@lru_cache(maxsize=4096)
def _inv_mod(d: int) -> int:
    return pow(d, _PRIME - 2, _PRIME)


def _eval_mod(p: Poly, pt: Sequence[int]) -> Optional[int]:
    P = _PRIME
    total = 0
    for key, val in p.terms.items():
        if val.denominator % P == 0:
            return None
        term = val.numerator % P * pow(val.denominator, P - 2, P) % P
        for i, e in enumerate(key):
            if e:
                term = term * pow(pt[i], e, P) % P
        total = (total + term) % P
    return total


def reduce_mod_cone_ideal(p: Poly, sig: Signature) -> tuple[tuple[Poly, Poly], Poly]:
    """Return ``((g, h), r)`` with ``p = Q(x) g + Q(y) h + r``.

    ``r`` is the normal form modulo the ideal (Q(x), Q(y)); it vanishes iff
    ``p`` lies in the ideal, since the two generators have coprime leading
    monomials x_1^2 and y_1^2.
    """
    g, r1 = sig.qx_divisor.divmod(p)
    h, r = sig.qy_divisor.divmod(r1)
    return (g, h), r


def cone_remainder(p: Poly, sig: Signature) -> Poly:
    _, r1 = sig.qx_divisor.divmod(p, want_quotient=False)
    _, r = sig.qy_divisor.divmod(r1, want_quotient=False)
    return r


def in_cone_ideal(p: Poly, sig: Signature) -> bool:
    return cone_remainder(p, sig).is_zero()


def divide_exact_qxy(p: Poly, sig: Signature) -> Optional[Poly]:
    """``p / Q(x,y)`` when the division is exact, else ``None``."""
    return sig.qxy_divisor.divide_exact(p)


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def poly_diff(p: Poly, var: int) -> Poly:
    return p.diff(var)


def poly_eval(p: Poly, xs: Iterable[Scalar], ys: Iterable[Scalar]) -> ParamPoly:
    return p.eval_at(xs, ys)


def poly_bidegree(p: Poly) -> tuple[int, int]:
    return p.bidegree()


def iter_vars(n: int) -> Iterator[int]:
    return iter(range(2 * n))
