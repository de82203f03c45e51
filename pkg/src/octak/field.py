"""Exact arithmetic in Q, real quadratic fields Q(sqrt d) and Q(i).

Every field comes with one archimedean absolute value |x| = |sigma(x)|.  For
real quadratic fields the embedding sigma is fixed by a sign: sigma(sqrt d) is
``+sqrt d`` or ``-sqrt d``.  All decisions are made on exact rationals; sums of
square roots are compared by grouping rationally dependent radicands (which
decides equality exactly) followed by dyadic interval refinement.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from sympy import factorint

from .errors import NotUnitNorm, PrecisionExhausted

DEFAULT_MAX_BITS = 4096
MAX_BITS_ENV = "OCTAK_MAX_BITS"

Rational = Union[int, Fraction]


def max_bits() -> int:
    """The precision cap; read from ``OCTAK_MAX_BITS`` when set."""
    raw = os.environ.get(MAX_BITS_ENV)
    return int(raw) if raw else DEFAULT_MAX_BITS


class Ordering(enum.Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"

    @classmethod
    def from_sign(cls, s: int) -> "Ordering":
        return cls.LT if s < 0 else cls.GT if s > 0 else cls.EQ


class FieldKind(enum.Enum):
    RATIONALS = "Q"
    REAL_QUADRATIC = "RQ"
    GAUSSIAN = "Q(i)"


def _is_squarefree(d: int) -> bool:
    return d > 1 and all(e == 1 for e in factorint(d).values())


@dataclass(frozen=True)
class FieldDescriptor:
    """One of Q, Q(sqrt d) with a chosen real embedding, or Q(i).

    For every variant the unit circle E = {|x| = 1} lies in K^x and |K^x| is
    dense around 1 (the rationals (k-1)/k already accumulate at 1); zero is the
    only element of norm 0.
    """

    kind: FieldKind
    d: int = 0
    embedding_sign: int = 1

    def __post_init__(self):
        if self.kind is FieldKind.REAL_QUADRATIC:
            if not _is_squarefree(self.d):
                raise ValueError(f"radicand must be a squarefree integer > 1, got {self.d}")
            if self.embedding_sign not in (1, -1):
                raise ValueError("embedding_sign must be +1 or -1")
        elif self.d != 0 or self.embedding_sign != 1:
            raise ValueError(f"{self.kind.value} takes no radicand or embedding")

    @classmethod
    def rationals(cls) -> "FieldDescriptor":
        return cls(FieldKind.RATIONALS)

    @classmethod
    def real_quadratic(cls, d: int, embedding_sign: int = 1) -> "FieldDescriptor":
        return cls(FieldKind.REAL_QUADRATIC, d, embedding_sign)

    @classmethod
    def gaussian(cls) -> "FieldDescriptor":
        return cls(FieldKind.GAUSSIAN)

    @property
    def square_of_generator(self) -> int:
        """g^2 for the generator g (sqrt d or i); 0 for Q."""
        if self.kind is FieldKind.REAL_QUADRATIC:
            return self.d
        if self.kind is FieldKind.GAUSSIAN:
            return -1
        return 0

    def __str__(self) -> str:
        if self.kind is FieldKind.REAL_QUADRATIC:
            tail = "" if self.embedding_sign == 1 else ",-"
            return f"Q(sqrt({self.d}){tail})"
        return self.kind.value

    # element constructors
    def __call__(self, a: Rational = 0, b: Rational = 0) -> "FieldElement":
        return FieldElement(Fraction(a), Fraction(b), self)

    def zero(self) -> "FieldElement":
        return self(0)

    def one(self) -> "FieldElement":
        return self(1)


QQ = FieldDescriptor.rationals()
QQ_I = FieldDescriptor.gaussian()


@dataclass(frozen=True)
class FieldElement:
    """a + b*g with g = sqrt(d) or i; b is 0 over Q."""

    a: Fraction
    b: Fraction
    field: FieldDescriptor

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.field.kind is FieldKind.RATIONALS and self.b:
            raise ValueError("elements of Q have no irrational part")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"cannot mix elements of {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(Fraction(other), Fraction(0), self.field)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        g2 = self.field.square_of_generator
        return FieldElement(self.a * o.a + g2 * self.b * o.b, self.a * o.b + self.b * o.a, self.field)

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        """The Galois conjugate (complex conjugation over Q(i))."""
        return FieldElement(self.a, -self.b, self.field)

    def field_norm(self) -> Fraction:
        """N(x) = x * conj(x), a rational."""
        return self.a * self.a - self.field.square_of_generator * self.b * self.b

    def inverse(self) -> "FieldElement":
        n = self.field_norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conjugate()
        return FieldElement(c.a / n, c.b / n, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def is_zero(self) -> bool:
        return not self

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"FieldElement({self}, {self.field})"


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_element(x: FieldElement) -> str:
    """Canonical text form: ``a``, ``a+c*i``, ``-c*sqrt(D)`` and so on."""
    if x.field.kind is FieldKind.RATIONALS or not x.b:
        return _fmt_rational(x.a)
    gen = "i" if x.field.kind is FieldKind.GAUSSIAN else f"sqrt({x.field.d})"
    mag = abs(x.b)
    irr = gen if mag == 1 else f"{_fmt_rational(mag)}*{gen}"
    if not x.a:
        return irr if x.b > 0 else "-" + irr
    return f"{_fmt_rational(x.a)}{'+' if x.b > 0 else '-'}{irr}"


# ---------------------------------------------------------------------------
# exact sign of  q + sum_k c_k sqrt(r_k)


def rational_sqrt(q: Fraction) -> Fraction | None:
    """sqrt(q) if q >= 0 is the square of a rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt_bounds(r: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    n, m = r.numerator, r.denominator
    s = math.isqrt((n * m) << (2 * bits))
    scale = m << bits
    return Fraction(s, scale), Fraction(s + 1, scale)


def surd_sum_sign(rational: Fraction, terms: Iterable[tuple[Fraction, Fraction]],
                  cap: int | None = None) -> int:
    """Exact sign of ``rational + sum(c * sqrt(r) for c, r in terms)``, r >= 0.

    Terms whose radicands differ by a rational square are merged.  Square
    roots of pairwise independent non-square radicands are linearly
    independent over Q, so after merging the sum is zero iff every merged
    coefficient and the rational part vanish.  A nonzero sum is separated
    from 0 by interval refinement, doubling the bit precision up to ``cap``.
    """
    cap = max_bits() if cap is None else cap
    rational = Fraction(rational)
    groups: list[list[Fraction]] = []
    for c, r in terms:
        c, r = Fraction(c), Fraction(r)
        if r < 0:
            raise ValueError("negative radicand")
        if not c or not r:
            continue
        root = rational_sqrt(r)
        if root is not None:
            rational += c * root
            continue
        for g in groups:
            link = rational_sqrt(r * g[0])
            if link is not None:
                # sqrt(r) = sqrt(r*g0) / g0 * sqrt(g0)
                g[1] += c * link / g[0]
                break
        else:
            groups.append([r, c])
    live = [(r, c) for r, c in groups if c]
    if not live:
        return (rational > 0) - (rational < 0)
    bits = min(64, cap)
    while True:
        lo = hi = rational
        for r, c in live:
            a, b = _sqrt_bounds(r, bits)
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if bits >= cap:
            raise PrecisionExhausted(cap)
        bits = min(2 * bits, cap)


def real_sign(x: FieldElement) -> int:
    """Sign of sigma(x) for Q or a real quadratic field."""
    F = x.field
    if F.kind is FieldKind.GAUSSIAN:
        raise ValueError("Q(i) has no real embedding")
    if F.kind is FieldKind.RATIONALS:
        return (x.a > 0) - (x.a < 0)
    # a + b*s*sqrt(d): compare a^2 against b^2 d when the signs disagree
    c = x.b * F.embedding_sign
    return surd_sum_sign(x.a, [(1 if c > 0 else -1, c * c * F.d)])


# ---------------------------------------------------------------------------
# absolute values


@dataclass(frozen=True, eq=False)
class NormValue:
    """A nonnegative real ``rational + coef * sqrt(radicand)``.

    ``kind`` is ExactRational (coef = 0), SqrtOfRational (rational = 0, coef = 1)
    or QuadraticSurd (the absolute value of a real quadratic number).
    Equality and ordering are exact value comparisons.
    """

    rational: Fraction
    coef: Fraction = Fraction(0)
    radicand: Fraction = Fraction(0)

    @classmethod
    def exact(cls, q: Rational) -> "NormValue":
        return cls(Fraction(q))

    @classmethod
    def sqrt_of(cls, q: Rational) -> "NormValue":
        q = Fraction(q)
        root = rational_sqrt(q)
        if root is not None:
            return cls(root)
        return cls(Fraction(0), Fraction(1), q)

    @classmethod
    def surd(cls, q0: Rational, q1: Rational, d: int) -> "NormValue":
        q1 = Fraction(q1)
        if not q1:
            return cls(Fraction(q0))
        return cls(Fraction(q0), q1, Fraction(d))

    @property
    def kind(self) -> str:
        if not self.coef:
            return "ExactRational"
        if not self.rational and self.coef == 1:
            return "SqrtOfRational"
        return "QuadraticSurd"

    def terms(self) -> tuple[Fraction, list[tuple[Fraction, Fraction]]]:
        return self.rational, ([(self.coef, self.radicand)] if self.coef else [])

    def compare(self, other: "NormValue | Rational") -> Ordering:
        if not isinstance(other, NormValue):
            other = NormValue.exact(other)
        q, ts = self.terms()
        q2, ts2 = other.terms()
        return Ordering.from_sign(surd_sum_sign(q - q2, ts + [(-c, r) for c, r in ts2]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, (NormValue, int, Fraction)):
            return NotImplemented
        return self.compare(other) is Ordering.EQ

    def __lt__(self, other) -> bool:
        return self.compare(other) is Ordering.LT

    __hash__ = None

    def __mul__(self, other: "NormValue") -> "NormValue":
        if not isinstance(other, NormValue):
            other = NormValue.exact(other)
        if not self.coef or not other.coef:
            k, v = (self.rational, other) if not self.coef else (other.rational, self)
            if v.kind == "SqrtOfRational":
                return NormValue.sqrt_of(k * k * v.radicand)
            return NormValue(k * v.rational, k * v.coef, v.radicand) if v.coef else NormValue(k * v.rational)
        if self.kind == other.kind == "SqrtOfRational":
            return NormValue.sqrt_of(self.radicand * other.radicand)
        if self.radicand == other.radicand:
            r = self.radicand
            return NormValue.surd(self.rational * other.rational + self.coef * other.coef * r,
                                  self.rational * other.coef + self.coef * other.rational, int(r))
        raise ValueError("product of surds over different radicands is not representable")

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.kind == "ExactRational":
            return _fmt_rational(self.rational)
        if self.kind == "SqrtOfRational":
            return f"sqrt({_fmt_rational(self.radicand)})"
        mag = abs(self.coef)
        root = f"sqrt({_fmt_rational(self.radicand)})"
        irr = root if mag == 1 else f"{_fmt_rational(mag)}*{root}"
        sign = "+" if self.coef > 0 else "-"
        return f"{_fmt_rational(self.rational)}{sign}{irr}" if self.rational else f"{'' if sign == '+' else '-'}{irr}"

    def __repr__(self) -> str:
        return f"NormValue({self.kind}: {self})"


def norm(x: FieldElement) -> NormValue:
    """|sigma(x)| exactly."""
    F = x.field
    if F.kind is FieldKind.RATIONALS:
        return NormValue.exact(abs(x.a))
    if F.kind is FieldKind.GAUSSIAN:
        return NormValue.sqrt_of(x.a * x.a + x.b * x.b)
    s = real_sign(x)
    return NormValue.surd(s * x.a, s * x.b * F.embedding_sign, F.d)


def _norm_terms(xs: Iterable[FieldElement], sign: int):
    q = Fraction(0)
    ts: list[tuple[Fraction, Fraction]] = []
    for x in xs:
        q0, t = norm(x).terms()
        q += sign * q0
        ts.extend((sign * c, r) for c, r in t)
    return q, ts


def cmp_norm_sum(xs: Sequence[FieldElement], bound: Rational, cap: int | None = None) -> Ordering:
    """Exact trichotomy of sum |x_i| against a rational bound >= 0."""
    bound = Fraction(bound)
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    q, ts = _norm_terms(xs, 1)
    return Ordering.from_sign(surd_sum_sign(q - bound, ts, cap))


def compare_norm_sums(lhs: Sequence[FieldElement], rhs: Sequence[FieldElement],
                      cap: int | None = None) -> Ordering:
    """Exact trichotomy of sum |lhs_i| against sum |rhs_j|."""
    q1, t1 = _norm_terms(lhs, 1)
    q2, t2 = _norm_terms(rhs, -1)
    return Ordering.from_sign(surd_sum_sign(q1 + q2, t1 + t2, cap))


def is_unit_norm(x: FieldElement) -> bool:
    F = x.field
    if F.kind is FieldKind.GAUSSIAN:
        return x.a * x.a + x.b * x.b == 1
    return norm(x).compare(1) is Ordering.EQ


def require_unit(x: FieldElement) -> FieldElement:
    if not is_unit_norm(x):
        raise NotUnitNorm(f"|{x}| != 1")
    return x


def element_near_one(F: FieldDescriptor, k: int) -> FieldElement:
    """An element with 1 - 1/k <= |x| < 1, witnessing that |K^x| accumulates at 1."""
    return F(Fraction(k - 1, k))


# ---------------------------------------------------------------------------
# Gaussian integers and the pythagorean part of E for Q(i)

GaussInt = tuple[int, int]


def _gmul(x: GaussInt, y: GaussInt) -> GaussInt:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gdivmod(x: GaussInt, y: GaussInt) -> tuple[GaussInt, GaussInt]:
    n = y[0] * y[0] + y[1] * y[1]
    num = _gmul(x, (y[0], -y[1]))
    q = ((2 * num[0] + n) // (2 * n), (2 * num[1] + n) // (2 * n))
    p = _gmul(q, y)
    return q, (x[0] - p[0], x[1] - p[1])


def _ggcd(x: GaussInt, y: GaussInt) -> GaussInt:
    while y != (0, 0):
        x, y = y, _gdivmod(x, y)[1]
    return x


def gaussian_prime_over(p: int) -> GaussInt:
    """The canonical prime a + bi (a > b > 0) above a rational prime p = 1 mod 4."""
    if p % 4 != 1:
        raise ValueError(f"{p} does not split in Z[i]")
    c = 2
    while True:
        t = pow(c, (p - 1) // 4, p)
        if t * t % p == p - 1:
            break
        c += 1
    g = _ggcd((p, 0), (t, 1))
    a, b = abs(g[0]), abs(g[1])
    return (max(a, b), min(a, b))


@dataclass(frozen=True)
class PythagFactorization:
    """x = i^unit * prod over primes pi of (pi / conj(pi))^e."""

    unit: int
    exponents: tuple[tuple[GaussInt, int], ...]

    def recompose(self) -> FieldElement:
        x = QQ_I(1)
        for _ in range(self.unit):
            x = x * QQ_I(0, 1)
        for (a, b), e in self.exponents:
            ratio = QQ_I(a, b) / QQ_I(a, -b)
            if e < 0:
                ratio, e = ratio.inverse(), -e
            for _ in range(e):
                x = x * ratio
        return x

    def as_dict(self) -> dict[str, int]:
        return {format_element(QQ_I(a, b)): e for (a, b), e in self.exponents}


def _gaussian_valuation(z: GaussInt, pi: GaussInt) -> tuple[int, GaussInt]:
    k = 0
    while z != (0, 0):
        q, r = _gdivmod(z, pi)
        if r != (0, 0):
            break
        z, k = q, k + 1
    return k, z


def pythag_factor(x: FieldElement) -> PythagFactorization:
    """Coordinates of a norm-one element of Q(i) in E = mu_4 + Z^(primes = 1 mod 4)."""
    if x.field.kind is not FieldKind.GAUSSIAN:
        raise ValueError("pythagorean factorization lives in Q(i)")
    if not is_unit_norm(x):
        raise NotUnitNorm(f"|{x}| != 1")
    D = math.lcm(x.a.denominator, x.b.denominator)
    z = (int(x.a * D), int(x.b * D))
    exps = []
    for p, k in sorted(factorint(D).items()):
        if p % 4 != 1:
            continue
        pi = gaussian_prime_over(p)
        s, _ = _gaussian_valuation(z, pi)
        t, _ = _gaussian_valuation(z, (pi[0], -pi[1]))
        # |z|^2 = D^2 forces s + t = 2k
        assert s + t == 2 * k, (x, p, s, t, k)
        if s != k:
            exps.append((pi, s - k))
    partial = PythagFactorization(0, tuple(exps)).recompose()
    u = x / partial
    units = [QQ_I(1), QQ_I(0, 1), QQ_I(-1), QQ_I(0, -1)]
    if u not in units:
        raise AssertionError(f"residual {u} of {x} is not a fourth root of unity")
    result = PythagFactorization(units.index(u), tuple(exps))
    assert result.recompose() == x
    return result
