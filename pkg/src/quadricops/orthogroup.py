"""Exact rational elements of O(p,q) and their action on functions.

Elements come from Cayley transforms g = (I - A)(I + A)^-1 of matrices with
A^T J = -J A, plus coordinate reflections so that every connected component
gets exercised.  A group element acts on functions by f -> f o g^-1,
diagonally on the x and y blocks.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exactalg import Poly, Signature, as_rat
from .powfun import PowerFunc

Matrix = tuple[tuple[Fraction, ...], ...]


def _mat(rows) -> Matrix:
    return tuple(tuple(as_rat(v) for v in r) for r in rows)


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def mat_add(a: Matrix, b: Matrix, sign: int = 1) -> Matrix:
    return tuple(tuple(x + sign * y for x, y in zip(r, s)) for r, s in zip(a, b))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_inverse(a: Matrix) -> Optional[Matrix]:
    """Gauss-Jordan inverse over Q; None when singular."""
    n = len(a)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for i in range(n):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return tuple(tuple(r[n:]) for r in m)


def gram(sig: Signature) -> Matrix:
    n = sig.n
    return tuple(tuple(Fraction(sig.signs[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class QAntisym:
    """A with A^T J = -J A; equivalently A = J S with S antisymmetric."""

    sig: Signature
    matrix: Matrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", _mat(self.matrix))
        J = gram(self.sig)
        lhs = mat_mul(transpose(self.matrix), J)
        rhs = mat_mul(J, self.matrix)
        if mat_add(lhs, rhs) != tuple(tuple(Fraction(0) for _ in r) for r in J):
            raise ValueError("matrix is not antisymmetric for the form")

    @classmethod
    def from_params(cls, sig: Signature, params: Sequence) -> "QAntisym":
        """Fill the strictly upper triangle of S row by row, then A = J S."""
        n = sig.n
        if len(params) != free_parameter_count(n):
            raise ValueError(f"need {free_parameter_count(n)} parameters")
        S = [[Fraction(0)] * n for _ in range(n)]
        it = iter(params)
        for i in range(n):
            for j in range(i + 1, n):
                v = as_rat(next(it))
                S[i][j], S[j][i] = v, -v
        return cls(sig, tuple(tuple(sig.signs[i] * S[i][j] for j in range(n)) for i in range(n)))


def free_parameter_count(n: int) -> int:
    return n * (n - 1) // 2


class SingularCayleyError(ValueError):
    """I + A is singular; draw another A."""


@dataclass(frozen=True)
class GroupElem:
    sig: Signature
    matrix: Matrix
    inverse: Matrix = field(default=(), compare=False)

    def __post_init__(self):
        m = _mat(self.matrix)
        object.__setattr__(self, "matrix", m)
        J = gram(self.sig)
        if mat_mul(mat_mul(transpose(m), J), m) != J:
            raise ValueError("matrix does not preserve the form")
        # g^-1 = J g^T J for an isometry
        object.__setattr__(self, "inverse", mat_mul(mat_mul(J, transpose(m)), J))

    @classmethod
    def identity(cls, sig: Signature) -> "GroupElem":
        return cls(sig, identity_matrix(sig.n))

    @classmethod
    def reflection(cls, sig: Signature, index: int) -> "GroupElem":
        m = [list(r) for r in identity_matrix(sig.n)]
        m[index][index] = Fraction(-1)
        return cls(sig, m)

    def __matmul__(self, other: "GroupElem") -> "GroupElem":
        return GroupElem(self.sig, mat_mul(self.matrix, other.matrix))

    def inv(self) -> "GroupElem":
        return GroupElem(self.sig, self.inverse)

    def apply_vector(self, v: Sequence) -> tuple[Fraction, ...]:
        return tuple(sum((a * as_rat(b) for a, b in zip(row, v)), Fraction(0)) for row in self.matrix)

    def to_json(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.matrix]


def cayley(A: QAntisym) -> GroupElem:
    n = A.sig.n
    eye = identity_matrix(n)
    inv = mat_inverse(mat_add(eye, A.matrix))
    if inv is None:
        raise SingularCayleyError("I + A is singular")
    return GroupElem(A.sig, mat_mul(mat_add(eye, A.matrix, -1), inv))


def random_rational(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def sample_qantisym(seed: int, bound: int, sig: Signature) -> QAntisym:
    rng = random.Random(seed)
    return QAntisym.from_params(sig, [random_rational(rng, bound) for _ in range(free_parameter_count(sig.n))])


def sample_group_elements(sig: Signature, seed: int, count: int, bound: int = 3, reflections: bool = True) -> list[GroupElem]:
    """Cayley images, every other one composed with a reflection.

    Alternates the reflections x_1 -> -x_1 and x_(p+1) -> -x_(p+1) so both
    components of each factor of O(p) x O(q) show up.
    """
    out: list[GroupElem] = []
    refl = [GroupElem.reflection(sig, 0), GroupElem.reflection(sig, sig.p)]
    k = 0
    attempt = 0
    while len(out) < count:
        if attempt > 100 * (count + 1):
            raise RuntimeError("could not draw enough invertible Cayley transforms")
        try:
            g = cayley(sample_qantisym(seed * 1_000_003 + attempt, bound, sig))
        except SingularCayleyError:
            attempt += 1
            continue
        attempt += 1
        if reflections and k % 2 == 1:
            g = g @ refl[(k // 2) % 2]
        out.append(g)
        k += 1
    return out


def _images(g: GroupElem) -> tuple[list[Poly], list[Poly]]:
    n = g.sig.n
    ginv = g.inverse
    xs = [Poly.linear(n, ginv[j], "x") for j in range(n)]
    ys = [Poly.linear(n, ginv[j], "y") for j in range(n)]
    return xs, ys


def act_on_poly(g: GroupElem, f: Poly) -> Poly:
    """f o g^-1, diagonally."""
    xs, ys = _images(g)
    return f.substitute_linear(xs, ys)


def act_on_powerfunc(g: GroupElem, f: PowerFunc) -> PowerFunc:
    xs, ys = _images(g)
    raw = []
    for t in f.terms:
        raw.append((t.prefactor.substitute_linear(xs, ys), {b.transform(g.inverse): e for b, e in t.factors}))
    return PowerFunc(f.sig, raw)


def act(g: GroupElem, f):
    if isinstance(f, Poly):
        return act_on_poly(g, f)
    if isinstance(f, PowerFunc):
        return act_on_powerfunc(g, f)
    raise TypeError(f"cannot act on {type(f).__name__}")


def base_isotropic(sig: Signature) -> tuple[Fraction, ...]:
    """e_1 + e_(p+1)."""
    v = [Fraction(0)] * sig.n
    v[0] = Fraction(1)
    v[sig.p] += 1
    return tuple(v)


def isotropic_points(sig: Signature, seed: int, count: int, bound: int = 3) -> list[tuple[Fraction, ...]]:
    """Nonzero rational points with Q(v) = 0, the first being e_1 + e_(p+1)."""
    base = base_isotropic(sig)
    pts = [base]
    for g in sample_group_elements(sig, seed, max(count - 1, 0), bound):
        pts.append(g.apply_vector(base))
    for v in pts:
        assert sig.q_vector(v) == 0 and any(v)
    return pts[:count]


def isotropic_pairs(sig: Signature, seed: int, count: int, bound: int = 3, max_tries: int = 1000) -> list[tuple[tuple, tuple]]:
    """Pairs of isotropic points with Q(x,y) != 0."""
    out = []
    pts = isotropic_points(sig, seed, max(4 * count, 8), bound)
    rng = random.Random(seed)
    for _ in range(max_tries):
        x, y = rng.sample(pts, 2)
        if sig.q_bilinear(x, y) != 0:
            out.append((x, y))
            if len(out) == count:
                return out
    raise RuntimeError("ran out of retries looking for pairs with Q(x,y) != 0")
