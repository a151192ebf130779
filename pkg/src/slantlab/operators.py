"""Toeplitz and slant operators acting on analytic polynomials.

All actions are exact. The single source of truth for every co-analytic
Toeplitz action is the projection rule

    P(zbar^j z^k) = ((k+1-j)/(k+1)) z^(k-j)   if k >= j, else 0.

The slant operator W sends z^(2n) to z^n and kills odd powers; its
adjoint satisfies W* z^n = ((2n+1)/(n+1)) z^(2n). A slant Toeplitz
operator is the composition B_sym = W T_sym.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import AnalyticPoly, HarmonicSymbol


def project_monomial(j, k):
    """Bergman projection of zbar^j z^k as an analytic polynomial."""
    if j < 0 or k < 0:
        raise ValueError("exponents must be nonnegative")
    if k < j:
        return AnalyticPoly()
    return AnalyticPoly({k - j: Fraction(k + 1 - j, k + 1)})


def toeplitz_apply(sym, p):
    """Apply T_sym = P(sym * .) to an analytic polynomial."""
    out = sym.analytic * p
    for j, c in sym.coanalytic.terms():
        for k, a in p.terms():
            out = out + project_monomial(j, k).scale(c * a)
    return out


def slant_apply(p):
    """W: z^(2n) -> z^n, odd powers -> 0."""
    return AnalyticPoly({n // 2: c for n, c in p.coeffs.items() if n % 2 == 0})


def slant_adjoint_apply(p):
    """W*: z^n -> ((2n+1)/(n+1)) z^(2n)."""
    return AnalyticPoly({2 * n: c * Fraction(2 * n + 1, n + 1)
                         for n, c in p.coeffs.items()})


def slant_toeplitz_apply(sym, p):
    """Apply B_sym = W T_sym."""
    return slant_apply(toeplitz_apply(sym, p))


class _Slant:
    """Sentinel atom for W in operator words."""

    __slots__ = ()

    def __repr__(self):
        return "W"

    def __eq__(self, other):
        return isinstance(other, _Slant)

    def __hash__(self):
        return hash(_Slant)


class _SlantAdjoint:
    """Sentinel atom for W* in operator words."""

    __slots__ = ()

    def __repr__(self):
        return "W*"

    def __eq__(self, other):
        return isinstance(other, _SlantAdjoint)

    def __hash__(self):
        return hash(_SlantAdjoint)


W = _Slant()
W_STAR = _SlantAdjoint()


@dataclass(frozen=True)
class Toeplitz:
    """Atom T_sym in operator words."""

    sym: HarmonicSymbol

    def __repr__(self):
        return f"T({self.sym!r})"


def _apply_atom(atom, p):
    if isinstance(atom, _Slant):
        return slant_apply(p)
    if isinstance(atom, _SlantAdjoint):
        return slant_adjoint_apply(p)
    if isinstance(atom, Toeplitz):
        return toeplitz_apply(atom.sym, p)
    raise TypeError(f"unknown operator atom {atom!r}")


class OperatorExpr:
    """A finite word over the atoms {T(sym), W, W*}.

    The word is applied right to left, matching operator composition:
    OperatorExpr([A, B]).apply(p) computes A(B(p)). The empty word is
    the identity operator.
    """

    __slots__ = ("word",)

    def __init__(self, word=()):
        word = tuple(word)
        for atom in word:
            if not isinstance(atom, (_Slant, _SlantAdjoint, Toeplitz)):
                raise TypeError(f"unknown operator atom {atom!r}")
        self.word = word

    @classmethod
    def identity(cls):
        return cls(())

    @classmethod
    def toeplitz(cls, sym):
        return cls((Toeplitz(sym),))

    @classmethod
    def slant_toeplitz(cls, sym):
        """The word for B_sym = W T_sym."""
        return cls((W, Toeplitz(sym)))

    def __mul__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return OperatorExpr(self.word + other.word)

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self.word == other.word

    def apply(self, p):
        for atom in reversed(self.word):
            p = _apply_atom(atom, p)
        return p

    def __repr__(self):
        return "OperatorExpr(" + " ".join(repr(a) for a in self.word) + ")"


def apply_expr(expr, p):
    """Apply an operator word to an analytic polynomial."""
    return expr.apply(p)
