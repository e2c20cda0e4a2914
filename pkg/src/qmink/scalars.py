"""Exact coefficient arithmetic for the symbolic engine.

Scalars are Laurent polynomials in a single formal unit q with Gaussian
rational coefficients.  Numerically q stands for e^{2s} (s the deformation
parameter), so every deformation constant occurring in the builtin algebras
is an integer power of q; in particular t = e^{-8s} = q^-4.  q is a formal
*positive real* unit, so the star operation conjugates coefficients and
fixes q.

All arithmetic is exact: rational components are `fractions.Fraction`
(arbitrary-precision integers underneath), and the only lossy operation is
the explicit bridge `Scalar.eval(s)` into complex doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class EvalOverflowError(ArithmeticError):
    """Raised when Scalar.eval would overflow a double; never silently saturated."""


def _fr(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot coerce {value!r} to an exact rational")


@dataclass(frozen=True)
class GaussianRational:
    """An element re + im*i of Q(i), held exactly."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re, im=0) -> "GaussianRational":
        return GaussianRational(_fr(re), _fr(im))

    def __add__(self, other):
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.im == 1:
            imag = "i"
        elif self.im == -1:
            imag = "-i"
        else:
            imag = f"{self.im}*i"
        if self.re == 0:
            return imag
        sign = "-" if imag.startswith("-") else "+"
        return f"({self.re}{sign}{imag.lstrip('-')})"


GR_ZERO = GaussianRational(Fraction(0), Fraction(0))
GR_ONE = GaussianRational(Fraction(1), Fraction(0))
GR_I = GaussianRational(Fraction(0), Fraction(1))


class Scalar:
    """A Laurent polynomial sum_k c_k q^k with Gaussian rational c_k.

    Instances are immutable; every operation returns a fresh canonical
    value (no stored zero coefficients).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        canon = {}
        if terms:
            for k, c in terms.items():
                if not isinstance(c, GaussianRational):
                    c = GaussianRational.of(c)
                if not c.is_zero():
                    canon[int(k)] = c
        object.__setattr__(self, "_terms", canon)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Scalar":
        return Scalar()

    @staticmethod
    def one() -> "Scalar":
        return Scalar({0: GR_ONE})

    @staticmethod
    def of(value, exponent: int = 0) -> "Scalar":
        """Scalar c * q^exponent for a rational/Gaussian-rational c."""
        if isinstance(value, GaussianRational):
            return Scalar({exponent: value})
        return Scalar({exponent: GaussianRational.of(value)})

    @staticmethod
    def q_power(k: int) -> "Scalar":
        return Scalar({k: GR_ONE})

    @staticmethod
    def imag_unit() -> "Scalar":
        return Scalar({0: GR_I})

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        """Exponent -> coefficient, sorted by exponent."""
        return {k: self._terms[k] for k in sorted(self._terms)}

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {0: GR_ONE}

    def is_unit(self) -> bool:
        """True iff invertible in the Laurent ring (a single monomial)."""
        return len(self._terms) == 1

    def __eq__(self, other):
        return isinstance(other, Scalar) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Scalar") -> "Scalar":
        terms = dict(self._terms)
        for k, c in other._terms.items():
            acc = terms.get(k)
            terms[k] = c if acc is None else acc + c
        return Scalar(terms)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __neg__(self) -> "Scalar":
        return Scalar({k: -c for k, c in self._terms.items()})

    def __mul__(self, other: "Scalar") -> "Scalar":
        terms = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                p = c1 * c2
                acc = terms.get(k)
                terms[k] = p if acc is None else acc + p
        return Scalar(terms)

    def star(self) -> "Scalar":
        """Complex conjugation; q is a formal positive real, hence fixed."""
        return Scalar({k: c.conjugate() for k, c in self._terms.items()})

    def inverse(self) -> "Scalar":
        if not self.is_unit():
            raise ZeroDivisionError(
                f"scalar {self} is not invertible in the Laurent ring"
            )
        ((k, c),) = self._terms.items()
        return Scalar({-k: c.inverse()})

    # -- bridges -------------------------------------------------------------

    def eval(self, s: float) -> complex:
        """Numeric value with q = e^{2s}, in complex double precision."""
        if not math.isfinite(s):
            raise ValueError("deformation parameter must be finite")
        total = 0j
        for k, c in self._terms.items():
            try:
                factor = math.exp(2.0 * s * k)
            except OverflowError as exc:
                raise EvalOverflowError(
                    f"q^{k} overflows at s={s} (exponent {2.0 * s * k})"
                ) from exc
            if factor != 0.0 and math.isinf(factor):
                raise EvalOverflowError(f"q^{k} overflows at s={s}")
            total += complex(c) * factor
        return total

    def subs_q_one(self) -> GaussianRational:
        """Exact classical limit q -> 1 (collapse all exponents)."""
        acc = GR_ZERO
        for c in self._terms.values():
            acc = acc + c
        return acc

    # -- rendering -----------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms):
            parts.append(_render_monomial(self._terms[k], k))
        out = parts[0]
        for part in parts[1:]:
            if part.startswith("-"):
                out += " - " + part[1:]
            else:
                out += " + " + part
        return out

    def __repr__(self):
        return f"Scalar({self})"


def _render_monomial(coeff: GaussianRational, k: int) -> str:
    if k == 0:
        return str(coeff)
    qpart = "q" if k == 1 else f"q^{k}"
    if coeff == GR_ONE:
        return qpart
    if coeff == -GR_ONE:
        return "-" + qpart
    return f"{coeff}*{qpart}"


ONE = Scalar.one()
ZERO = Scalar.zero()
MINUS_ONE = Scalar.of(-1)
