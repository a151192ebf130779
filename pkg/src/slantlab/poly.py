"""Exact sparse polynomials and harmonic symbols over the rationals.

Conventions used throughout the package:

* An analytic polynomial is a finite sum sum_n a_n z^n with Fraction
  coefficients, stored sparsely as {degree: coefficient} with no zero
  entries.
* The Bergman inner product of monomials is <z^m, z^n> = delta_mn/(n+1),
  so ||sum a_n z^n||^2 = sum a_n^2/(n+1).
* A harmonic symbol is phi(z) + pbar(zbar) where phi is analytic and the
  co-analytic part carries powers zbar^j with j >= 1 only; any zbar^0
  contribution is folded into the analytic constant term at construction.
"""

from __future__ import annotations

from fractions import Fraction


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class AnalyticPoly:
    """Sparse exact polynomial in one variable.

    The zero polynomial has degree() == -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        if coeffs:
            for n, c in coeffs.items():
                if n < 0:
                    raise ValueError(f"negative exponent {n}")
                c = _as_fraction(c)
                if c != 0:
                    clean[int(n)] = c
        self.coeffs = clean

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial(cls, n, c=1):
        return cls({n: c})

    def coeff(self, n):
        """Coefficient of z^n; 0 for any n outside the support."""
        if n < 0:
            return Fraction(0)
        return self.coeffs.get(n, Fraction(0))

    def degree(self):
        return max(self.coeffs) if self.coeffs else -1

    @property
    def is_zero(self):
        return not self.coeffs

    def terms(self):
        """Yield (degree, coefficient) pairs in increasing degree."""
        for n in sorted(self.coeffs):
            yield n, self.coeffs[n]

    def __eq__(self, other):
        if not isinstance(other, AnalyticPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        if not isinstance(other, AnalyticPoly):
            return NotImplemented
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            s = out.get(n, Fraction(0)) + c
            if s == 0:
                out.pop(n, None)
            else:
                out[n] = s
        return AnalyticPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AnalyticPoly({n: -c for n, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, AnalyticPoly):
            out = {}
            for n, c in self.coeffs.items():
                for m, d in other.coeffs.items():
                    out[n + m] = out.get(n + m, Fraction(0)) + c * d
            return AnalyticPoly(out)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c):
        c = _as_fraction(c)
        if c == 0:
            return AnalyticPoly()
        return AnalyticPoly({n: c * a for n, a in self.coeffs.items()})

    def substitute_z_squared(self):
        """Replace z by z^2, doubling every exponent."""
        return AnalyticPoly({2 * n: c for n, c in self.coeffs.items()})

    def bergman_norm_squared(self):
        """Exact squared Bergman norm: sum a_n^2/(n+1)."""
        return sum((c * c / (n + 1) for n, c in self.coeffs.items()), Fraction(0))

    def __repr__(self):
        if self.is_zero:
            return "AnalyticPoly(0)"
        parts = [f"{c}*z^{n}" for n, c in self.terms()]
        return "AnalyticPoly(" + " + ".join(parts) + ")"


def bergman_inner(p, q):
    """Exact Bergman inner product of two analytic polynomials."""
    total = Fraction(0)
    for n, c in p.coeffs.items():
        d = q.coeffs.get(n)
        if d is not None:
            total += c * d / (n + 1)
    return total


class HarmonicSymbol:
    """Symbol phi(z) + sum_{j>=1} c_j zbar^j with exact coefficients.

    The co-analytic part is an AnalyticPoly read in the zbar variable;
    its constant term is canonicalized into the analytic part.
    """

    __slots__ = ("analytic", "coanalytic")

    def __init__(self, analytic=None, coanalytic=None):
        analytic = analytic if analytic is not None else AnalyticPoly()
        coanalytic = coanalytic if coanalytic is not None else AnalyticPoly()
        c0 = coanalytic.coeff(0)
        if c0 != 0:
            analytic = analytic + AnalyticPoly({0: c0})
            coanalytic = coanalytic - AnalyticPoly({0: c0})
        self.analytic = analytic
        self.coanalytic = coanalytic

    @classmethod
    def from_analytic(cls, p):
        return cls(analytic=p)

    @classmethod
    def zbar_power(cls, j, c=1):
        """The symbol c*zbar^j."""
        return cls(coanalytic=AnalyticPoly({j: c}))

    @property
    def is_zero(self):
        return self.analytic.is_zero and self.coanalytic.is_zero

    @property
    def is_analytic(self):
        return self.coanalytic.is_zero

    def coanalytic_degree(self):
        """Largest j with a zbar^j term, -1 if the symbol is analytic."""
        return self.coanalytic.degree()

    def __eq__(self, other):
        if not isinstance(other, HarmonicSymbol):
            return NotImplemented
        return self.analytic == other.analytic and self.coanalytic == other.coanalytic

    def __hash__(self):
        return hash((self.analytic, self.coanalytic))

    def __add__(self, other):
        if not isinstance(other, HarmonicSymbol):
            return NotImplemented
        return HarmonicSymbol(self.analytic + other.analytic,
                              self.coanalytic + other.coanalytic)

    def __sub__(self, other):
        if not isinstance(other, HarmonicSymbol):
            return NotImplemented
        return HarmonicSymbol(self.analytic - other.analytic,
                              self.coanalytic - other.coanalytic)

    def __neg__(self):
        return HarmonicSymbol(-self.analytic, -self.coanalytic)

    def scale(self, c):
        return HarmonicSymbol(self.analytic.scale(c), self.coanalytic.scale(c))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"HarmonicSymbol({self.analytic!r}, zbar:{self.coanalytic!r})"
