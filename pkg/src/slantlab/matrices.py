"""Matrix views of operator words and exact commutator scans.

Matrices are taken with respect to the monomial family {z^j}: column j of
an operator word holds the coefficients of the image of z^j. An optional
orthonormal-basis export rescales entry (i, j) by sqrt((i+1)/(j+1)) and
returns floats.

A commutator scan feeds monomial columns z^k through
[B_f, B_g] = B_f B_g - B_g B_f and looks for the first nonzero entry in
lexicographic (k, s) order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .poly import AnalyticPoly, HarmonicSymbol
from .operators import slant_toeplitz_apply


class OperatorMatrix:
    """Dense exact matrix of an operator word on monomial columns."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValueError("entry grid does not match the declared shape")
        self.rows = rows
        self.cols = cols
        self.entries = [[Fraction(x) for x in row] for row in entries]

    @classmethod
    def from_expr(cls, expr, rows, cols):
        entries = [[Fraction(0)] * cols for _ in range(rows)]
        for j in range(cols):
            image = expr.apply(AnalyticPoly.monomial(j))
            for i, c in image.terms():
                if i < rows:
                    entries[i][j] = c
        return cls(rows, cols, entries)

    def entry(self, i, j):
        return self.entries[i][j]

    def column(self, j):
        return [row[j] for row in self.entries]

    def orthonormal_entries(self):
        """Float entries rescaled by sqrt((i+1)/(j+1))."""
        return [[float(self.entries[i][j]) * math.sqrt((i + 1) / (j + 1))
                 for j in range(self.cols)]
                for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"OperatorMatrix({self.rows}x{self.cols})"


def build_matrix(expr, rows, cols):
    """Exact rows x cols matrix of an operator word."""
    return OperatorMatrix.from_expr(expr, rows, cols)


def commutator_column(f, g, k):
    """(B_f B_g - B_g B_f) z^k as an analytic polynomial."""
    x = AnalyticPoly.monomial(k)
    fg = slant_toeplitz_apply(f, slant_toeplitz_apply(g, x))
    gf = slant_toeplitz_apply(g, slant_toeplitz_apply(f, x))
    return fg - gf


def default_kmax(f, g):
    """Default scan bound 2*(deg phi + deg psi + 2N + 4).

    Degrees of zero parts count as 0; N is the largest zbar-degree
    appearing in either symbol.
    """
    dphi = max(f.analytic.degree(), 0)
    dpsi = max(g.analytic.degree(), 0)
    n = max(f.coanalytic_degree(), g.coanalytic_degree(), 0)
    return 2 * (dphi + dpsi + 2 * n + 4)


@dataclass
class CommutatorReport:
    """Result of scanning [B_f, B_g] on monomial columns z^k, k <= kmax."""

    f: HarmonicSymbol
    g: HarmonicSymbol
    kmax: int
    first_witness: tuple | None
    max_abs_entry: Fraction

    @property
    def all_zero(self):
        return self.first_witness is None


def _column_items(args):
    f, g, k = args
    col = commutator_column(f, g, k)
    return sorted(col.coeffs.items())


def scan_commutator(f, g, kmax, jobs=1):
    """Scan commutator columns for k = 0..kmax.

    The witness, if any, is the first nonzero entry in lexicographic
    (k, s) order. jobs > 1 fans the columns out over worker processes;
    the reduction is deterministic and matches the sequential scan.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    tasks = [(f, g, k) for k in range(kmax + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            columns = list(pool.map(_column_items, tasks, chunksize=8))
    else:
        columns = [_column_items(t) for t in tasks]

    first_witness = None
    max_abs = Fraction(0)
    for k, items in enumerate(columns):
        for s, c in items:
            if abs(c) > max_abs:
                max_abs = abs(c)
        if items and first_witness is None:
            s, c = items[0]
            first_witness = (k, s, c)
    return CommutatorReport(f=f, g=g, kmax=kmax,
                            first_witness=first_witness, max_abs_entry=max_abs)


COMMUTE = "commute"
NON_COMMUTE_WITNESS = "non-commute-witness"
INCONCLUSIVE_WITHIN_BOUND = "inconclusive-within-bound"


@dataclass
class Verdict:
    """Outcome of a commutation decision procedure.

    kind is one of COMMUTE, NON_COMMUTE_WITNESS,
    INCONCLUSIVE_WITHIN_BOUND. For a witness, witness = (k, s, value).
    For a commuting proportional pair, ratio holds the exact c with
    f = c * g when one exists.
    """

    kind: str
    kmax: int
    witness: tuple | None = None
    ratio: Fraction | None = None


def theorem_verdict(pbar, phi, psi, kmax=None, jobs=1):
    """Decide commutation of B_(pbar+phi) and B_(pbar+psi).

    pbar must be purely co-analytic with at least one zbar term; phi and
    psi are analytic polynomials. Equal analytic parts commute; otherwise
    the scan either finds a witness or reports the bound it exhausted.
    """
    if not isinstance(pbar, HarmonicSymbol):
        pbar = HarmonicSymbol(coanalytic=pbar)
    if not pbar.analytic.is_zero:
        raise ValueError("the shared symbol part must be purely co-analytic")
    if pbar.coanalytic.is_zero:
        raise ValueError("the shared co-analytic part must be nonzero")
    f = HarmonicSymbol(phi, pbar.coanalytic)
    g = HarmonicSymbol(psi, pbar.coanalytic)
    if kmax is None:
        kmax = default_kmax(f, g)
    report = scan_commutator(f, g, kmax, jobs=jobs)
    if phi == psi:
        # Sufficiency is exact; the scan is a consistency check.
        if not report.all_zero:
            raise AssertionError("scan contradicts equal analytic parts")
        return Verdict(kind=COMMUTE, kmax=kmax)
    if report.first_witness is not None:
        return Verdict(kind=NON_COMMUTE_WITNESS, kmax=kmax,
                       witness=report.first_witness)
    return Verdict(kind=INCONCLUSIVE_WITHIN_BOUND, kmax=kmax)


def _proportionality(f, g):
    """Exact c with f = c*g, or None when no such rational exists."""
    if g.is_zero:
        return Fraction(0) if f.is_zero else None
    for part in ("analytic", "coanalytic"):
        gp = getattr(g, part)
        if not gp.is_zero:
            n = gp.degree()
            c = getattr(f, part).coeff(n) / gp.coeff(n)
            break
    return c if f == g.scale(c) else None


def lemma_verdict(a, b, n, phi, psi, kmax=None, jobs=1):
    """Decide commutation for f = a*zbar^n + phi, g = b*zbar^n + psi.

    When f and g are exact rational multiples of each other the verdict
    is COMMUTE and ratio carries c with f = c*g; otherwise the scan
    produces a witness or stays inconclusive within its bound.
    """
    if n < 1:
        raise ValueError("the zbar power must be at least 1")
    f = HarmonicSymbol(phi, AnalyticPoly({n: a}))
    g = HarmonicSymbol(psi, AnalyticPoly({n: b}))
    if kmax is None:
        kmax = default_kmax(f, g)
    ratio = _proportionality(f, g)
    report = scan_commutator(f, g, kmax, jobs=jobs)
    if ratio is not None:
        if not report.all_zero:
            raise AssertionError("scan contradicts a proportional pair")
        return Verdict(kind=COMMUTE, kmax=kmax, ratio=ratio)
    if report.first_witness is not None:
        return Verdict(kind=NON_COMMUTE_WITNESS, kmax=kmax,
                       witness=report.first_witness)
    return Verdict(kind=INCONCLUSIVE_WITHIN_BOUND, kmax=kmax)


def _z():
    return AnalyticPoly.monomial(1)


def remark_counterexample(variant, phi=None, psi=None):
    """Exact two-sided evaluation for the zbar^2 / zbar^3 counterexamples.

    The pair under test is f = phi + zbar^n, g = psi + zbar (n = 2 or 3,
    default phi = psi = z). Both sides drop the shared B_phi B_psi /
    B_psi B_phi term, so the phi = psi = 0 override degenerates to the
    plain commutator of B_zbar^n and B_zbar.

    zbar2 compares the two sides on the input z^4 (constant terms 0 vs
    3/10). zbar3 tabulates constant terms on odd inputs z^(2k+1) for
    k = 0..10 and reports the first disagreement, along with an audit of
    the circulated integer pair (5, 9), which matches no k in range.
    """
    if variant not in ("zbar2", "zbar3"):
        raise ValueError(f"unknown variant {variant!r}")
    phi = phi if phi is not None else _z()
    psi = psi if psi is not None else _z()
    n = 2 if variant == "zbar2" else 3
    zbar_n = HarmonicSymbol.zbar_power(n)
    zbar = HarmonicSymbol.zbar_power(1)
    sphi = HarmonicSymbol.from_analytic(phi)
    spsi = HarmonicSymbol.from_analytic(psi)
    f = sphi + zbar_n
    g = spsi + zbar

    def b(sym, p):
        return slant_toeplitz_apply(sym, p)

    def lhs_side(x):
        return b(sphi, b(zbar, x)) + b(zbar_n, b(spsi, x)) + b(zbar_n, b(zbar, x))

    def rhs_side(x):
        return b(spsi, b(zbar_n, x)) + b(zbar, b(sphi, x)) + b(zbar, b(zbar_n, x))

    if variant == "zbar2":
        x = AnalyticPoly.monomial(4)
        lhs = lhs_side(x)
        rhs = rhs_side(x)
        col = commutator_column(f, g, 4)
        return {
            "variant": variant,
            "phi": phi,
            "psi": psi,
            "k": 4,
            "lhsConst": lhs.coeff(0),
            "rhsConst": rhs.coeff(0),
            "equal": lhs.coeff(0) == rhs.coeff(0),
            "commutatorConstAtInput4": col.coeff(0),
        }

    table = []
    first = None
    for k in range(11):
        x = AnalyticPoly.monomial(2 * k + 1)
        lc = lhs_side(x).coeff(0)
        rc = rhs_side(x).coeff(0)
        equal = lc == rc
        table.append({"k": k, "inputDegree": 2 * k + 1,
                      "lhsConst": lc, "rhsConst": rc, "equal": equal})
        if not equal and first is None:
            first = {"k": k, "inputDegree": 2 * k + 1, "lhsConst": lc, "rhsConst": rc}
    claimed = (Fraction(5), Fraction(9))
    claim_hit = any(row["lhsConst"] == claimed[0] and row["rhsConst"] == claimed[1]
                    for row in table)
    return {
        "variant": variant,
        "phi": phi,
        "psi": psi,
        "table": table,
        "firstDisagreement": first,
        "integerConstantsClaim": {
            "lhsConst": claimed[0],
            "rhsConst": claimed[1],
            "matchesComputation": claim_hit,
            "note": "flagged only; the exact constants above are authoritative",
        },
    }
