"""Exact arithmetic over Q_p, its unramified quadratic extension, truncated
residue rings, and Laurent polynomials in q^(1/2).

All values are immutable and all operations pure. Scalars are kept as exact
rationals whose valuation at the working prime is computed on demand; nothing
is ever rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

INF = math.inf


class NegativeValuation(ValueError):
    """Reduction to O/pi^N was asked for a scalar with a pole at p."""


class ZeroInput(ValueError):
    pass


class NonResidue(ValueError):
    pass


def padic_val(x, p: int):
    """p-adic valuation of an int or Fraction; +inf for 0."""
    if isinstance(x, ExactScalar):
        return x.valuation()
    x = Fraction(x)
    if x == 0:
        return INF
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^val(x) as an exact rational (0 for 0)."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    v = padic_val(x, p)
    return x / Fraction(p) ** v


@dataclass(frozen=True)
class ExactScalar:
    """Element u * p^e of Q_p with u a rational unit at p (or zero).

    Canonical form: `rational` is an exact Fraction; p never divides the
    stored unit part. Addition, multiplication and division are exact, and
    valuation(x*y) = valuation(x) + valuation(y).
    """

    p: int
    rational: Fraction

    @staticmethod
    def of(value, p: int) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            if value.p != p:
                raise ValueError("prime mismatch")
            return value
        return ExactScalar(p, Fraction(value))

    @property
    def numerator(self) -> int:
        """Numerator of the unit part (spec canonical form: not divisible by p)."""
        return unit_part(self.rational, self.p).numerator

    @property
    def p_exponent(self):
        return self.valuation()

    def valuation(self):
        return padic_val(self.rational, self.p)

    def is_zero(self) -> bool:
        return self.rational == 0

    def is_integral(self) -> bool:
        return self.rational == 0 or self.valuation() >= 0

    def is_unit(self) -> bool:
        return self.rational != 0 and self.valuation() == 0

    def __add__(self, other):
        other = ExactScalar.of(other, self.p)
        return ExactScalar(self.p, self.rational + other.rational)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(self.p, -self.rational)

    def __sub__(self, other):
        other = ExactScalar.of(other, self.p)
        return ExactScalar(self.p, self.rational - other.rational)

    def __rsub__(self, other):
        return ExactScalar.of(other, self.p) - self

    def __mul__(self, other):
        other = ExactScalar.of(other, self.p)
        return ExactScalar(self.p, self.rational * other.rational)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ExactScalar.of(other, self.p)
        return ExactScalar(self.p, self.rational / other.rational)

    def __rtruediv__(self, other):
        return ExactScalar.of(other, self.p) / self

    def __pow__(self, k: int):
        return ExactScalar(self.p, self.rational**k)

    def __eq__(self, other):
        if isinstance(other, ExactScalar):
            return self.p == other.p and self.rational == other.rational
        return self.rational == other

    def __hash__(self):
        return hash((self.p, self.rational))

    def reduce(self, precision: int) -> "ResidueElement":
        return reduce_scalar(self, precision)

    def __repr__(self):
        return f"ExactScalar({self.rational}, p={self.p})"


def valuation(x):
    """p-adic valuation of an ExactScalar or QuadExtScalar; +inf exactly for 0."""
    if isinstance(x, QuadExtScalar):
        return x.valuation()
    if isinstance(x, ExactScalar):
        return x.valuation()
    raise TypeError(f"no prime attached to {type(x).__name__}")


@dataclass(frozen=True)
class QuadExt:
    """Unramified quadratic extension E = F(omega), omega^2 = u, with u a unit
    non-residue mod p (p odd). Conjugation sends omega to -omega."""

    p: int
    u: int

    def __post_init__(self):
        if self.p == 2:
            raise NonResidue("residue characteristic 2 is out of scope")
        if pow(self.u % self.p, (self.p - 1) // 2, self.p) != self.p - 1:
            raise NonResidue(f"{self.u} is a square mod {self.p}")

    @staticmethod
    def default(p: int) -> "QuadExt":
        u = 2
        while pow(u, (p - 1) // 2, p) != p - 1:
            u += 1
        return QuadExt(p, u)

    def scalar(self, a, b=0) -> "QuadExtScalar":
        return QuadExtScalar(
            ExactScalar.of(a, self.p), ExactScalar.of(b, self.p), self
        )

    def omega(self) -> "QuadExtScalar":
        return self.scalar(0, 1)


@dataclass(frozen=True)
class QuadExtScalar:
    """a + b*omega in the unramified quadratic extension."""

    a: ExactScalar
    b: ExactScalar
    ext: QuadExt

    @property
    def p(self) -> int:
        return self.ext.p

    def _coerce(self, other) -> "QuadExtScalar":
        if isinstance(other, QuadExtScalar):
            if other.ext != self.ext:
                raise ValueError("extension mismatch")
            return other
        return self.ext.scalar(other)

    def conj(self) -> "QuadExtScalar":
        return QuadExtScalar(self.a, -self.b, self.ext)

    def trace(self) -> ExactScalar:
        return self.a + self.a

    def norm(self) -> ExactScalar:
        return self.a * self.a - self.b * self.b * self.ext.u

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def valuation(self):
        # Unramified: v(a + b*omega) = min(v(a), v(b)).
        return min(self.a.valuation(), self.b.valuation())

    def is_integral(self) -> bool:
        return self.is_zero() or self.valuation() >= 0

    def __add__(self, other):
        other = self._coerce(other)
        return QuadExtScalar(self.a + other.a, self.b + other.b, self.ext)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtScalar(-self.a, -self.b, self.ext)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        a = self.a * other.a + self.b * other.b * self.ext.u
        b = self.a * other.b + self.b * other.a
        return QuadExtScalar(a, b, self.ext)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        n = other.norm()
        if n.is_zero():
            raise ZeroDivisionError
        inv = QuadExtScalar(other.a / n, -other.b / n, other.ext)
        return self * inv

    def __eq__(self, other):
        if isinstance(other, QuadExtScalar):
            return self.a == other.a and self.b == other.b and self.ext == other.ext
        return self.b.is_zero() and self.a == other

    def __hash__(self):
        return hash((self.a, self.b, self.ext))

    def __repr__(self):
        return f"({self.a.rational} + {self.b.rational}*w)"


def conj(x):
    """Conjugation of the quadratic extension; fixes base scalars."""
    if isinstance(x, QuadExtScalar):
        return x.conj()
    return x


@dataclass(frozen=True)
class ResidueElement:
    """Element of O_F/pi^N (pair=None) or O_E/pi^N (pair=(a,b) mod p^N)."""

    p: int
    precision: int
    value: int
    pair: tuple | None = None
    u: int | None = None

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    def _coerce(self, other):
        if isinstance(other, ResidueElement):
            if (other.p, other.precision, other.u) != (self.p, self.precision, self.u):
                raise ValueError("residue ring mismatch")
            return other
        m = self.modulus
        if self.pair is None:
            return ResidueElement(self.p, self.precision, int(other) % m)
        return ResidueElement(self.p, self.precision, 0, (int(other) % m, 0), self.u)

    def __add__(self, other):
        other = self._coerce(other)
        m = self.modulus
        if self.pair is None:
            return ResidueElement(self.p, self.precision, (self.value + other.value) % m)
        a = (self.pair[0] + other.pair[0]) % m
        b = (self.pair[1] + other.pair[1]) % m
        return ResidueElement(self.p, self.precision, 0, (a, b), self.u)

    __radd__ = __add__

    def __neg__(self):
        m = self.modulus
        if self.pair is None:
            return ResidueElement(self.p, self.precision, (-self.value) % m)
        return ResidueElement(
            self.p, self.precision, 0, ((-self.pair[0]) % m, (-self.pair[1]) % m), self.u
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        m = self.modulus
        if self.pair is None:
            return ResidueElement(self.p, self.precision, (self.value * other.value) % m)
        a1, b1 = self.pair
        a2, b2 = other.pair
        return ResidueElement(
            self.p,
            self.precision,
            0,
            ((a1 * a2 + self.u * b1 * b2) % m, (a1 * b2 + b1 * a2) % m),
            self.u,
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self._coerce(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, ResidueElement):
            other = self._coerce(other)
        return (
            self.p == other.p
            and self.precision == other.precision
            and self.value == other.value
            and self.pair == other.pair
        )

    def __hash__(self):
        return hash((self.p, self.precision, self.value, self.pair))

    def __repr__(self):
        if self.pair is None:
            return f"{self.value} (mod {self.p}^{self.precision})"
        return f"{self.pair[0]}+{self.pair[1]}w (mod {self.p}^{self.precision})"


def reduce_scalar(x, precision: int) -> ResidueElement:
    """Ring-map image of an integral ExactScalar/QuadExtScalar in O/pi^N."""
    if isinstance(x, QuadExtScalar):
        if not x.is_integral():
            raise NegativeValuation(f"valuation {x.valuation()} < 0")
        m = x.p**precision
        a = _frac_mod(x.a.rational, x.p, m)
        b = _frac_mod(x.b.rational, x.p, m)
        return ResidueElement(x.p, precision, 0, (a, b), x.ext.u)
    x = x if isinstance(x, ExactScalar) else None
    if x is None:
        raise TypeError("reduce expects ExactScalar or QuadExtScalar")
    if not x.is_integral():
        raise NegativeValuation(f"valuation {x.valuation()} < 0")
    return ResidueElement(x.p, precision, _frac_mod(x.rational, x.p, x.p**precision))


def _frac_mod(x: Fraction, p: int, modulus: int) -> int:
    den = x.denominator
    if math.gcd(den, p) != 1 and x.numerator % den != 0:
        raise NegativeValuation("denominator not invertible mod p^N")
    return x.numerator * pow(den, -1, modulus) % modulus


def reduce(x, precision: int) -> ResidueElement:
    return reduce_scalar(x, precision)


def teichmuller(t: int, p: int, precision: int) -> ResidueElement:
    """Multiplicative section of O_F^* -> F_q^*: the (p-1)-th root of unity
    congruent to t mod p, to the requested precision (Hensel on x^(p-1)=1)."""
    t = t % p
    if t == 0:
        raise ZeroInput("teichmuller lift of 0")
    m = p**precision
    x = t
    # x -> x^p converges quadratically to the Teichmuller representative.
    for _ in range(max(1, precision.bit_length() + 2)):
        x = pow(x, p, m)
    return ResidueElement(p, precision, x)


def teichmuller_int(t: int, p: int, precision: int) -> int:
    return teichmuller(t, p, precision).value


class LaurentHalfQ:
    """Laurent polynomial in q^(1/2) with integer coefficients.

    Exponents are stored doubled (so integers throughout); `q_value` is the
    concrete prime power the symbol stands for. Evaluation is exact and only
    allowed when it lands in Q (integer exponents, or q a perfect square).
    """

    __slots__ = ("coeffs", "q_value")

    def __init__(self, coeffs=None, q_value: int | None = None):
        self.q_value = q_value
        self.coeffs = {}
        if coeffs:
            for e2, c in coeffs.items():
                if c:
                    self.coeffs[e2] = self.coeffs.get(e2, 0) + c
            self.coeffs = {e: c for e, c in self.coeffs.items() if c}

    @staticmethod
    def const(c: int, q_value=None) -> "LaurentHalfQ":
        return LaurentHalfQ({0: c}, q_value)

    @staticmethod
    def q_pow(half_exponent: Fraction | int, q_value=None, coeff: int = 1) -> "LaurentHalfQ":
        e2 = Fraction(half_exponent) * 2
        if e2.denominator != 1:
            raise ValueError("exponents must be half-integers")
        return LaurentHalfQ({int(e2): coeff}, q_value)

    def _q(self, other):
        return self.q_value if self.q_value is not None else getattr(other, "q_value", None)

    def __add__(self, other):
        if not isinstance(other, LaurentHalfQ):
            other = LaurentHalfQ.const(int(other))
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentHalfQ(out, self._q(other))

    __radd__ = __add__

    def __neg__(self):
        return LaurentHalfQ({e: -c for e, c in self.coeffs.items()}, self.q_value)

    def __sub__(self, other):
        if not isinstance(other, LaurentHalfQ):
            other = LaurentHalfQ.const(int(other))
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentHalfQ):
            other = LaurentHalfQ.const(int(other))
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentHalfQ(out, self._q(other))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, LaurentHalfQ):
            other = LaurentHalfQ.const(int(other))
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def divide_exact(self, other: "LaurentHalfQ") -> "LaurentHalfQ":
        """Exact division in Z[q^(±1/2)]; raises ValueError if not divisible."""
        if other.is_zero():
            raise ZeroDivisionError
        rem = dict(self.coeffs)
        out = {}
        div = sorted(other.coeffs.items())
        lead_e, lead_c = div[-1]
        while rem:
            e_max = max(rem)
            c = rem[e_max]
            if c % lead_c:
                raise ValueError("not divisible")
            qe, qc = e_max - lead_e, c // lead_c
            out[qe] = out.get(qe, 0) + qc
            for e, cc in div:
                k = e + qe
                rem[k] = rem.get(k, 0) - cc * qc
                if rem[k] == 0:
                    del rem[k]
        return LaurentHalfQ(out, self.q_value)

    def divisible_by(self, other: "LaurentHalfQ") -> bool:
        try:
            self.divide_exact(other)
            return True
        except ValueError:
            return False

    def min_half_exponent(self):
        return Fraction(min(self.coeffs), 2) if self.coeffs else None

    def evaluate(self, q_value: int | None = None) -> Fraction:
        """Exact evaluation at the concrete q."""
        q = q_value if q_value is not None else self.q_value
        if q is None:
            raise ValueError("no q to evaluate at")
        if any(e % 2 for e in self.coeffs):
            r = math.isqrt(q)
            if r * r != q:
                raise ValueError("half-integer exponents need a square q")
            base, scale = r, 1
        else:
            base, scale = q, 2
        out = Fraction(0)
        for e, c in self.coeffs.items():
            out += c * Fraction(base) ** (e // scale if scale == 2 else e)
        return out

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            ex = Fraction(e, 2)
            if e == 0:
                terms.append(f"{c}")
            else:
                s = f"q^{ex}" if ex.denominator == 2 or ex != 1 else "q"
                terms.append(f"{c}*{s}" if c != 1 else s)
        return " + ".join(terms)


def laurent_eval(f: LaurentHalfQ, q_value: int | None = None) -> Fraction:
    return f.evaluate(q_value)
