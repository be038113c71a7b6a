"""
Functional decomposition f = g(h(x)) over the rationals, the divided
differences polynomial, and recognition of polynomials equivalent to x^n or
to a Chebyshev polynomial.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from polymonodromy.core.errors import InputError, NumericInconsistencyError
from polymonodromy.core.polycore import (
    DEFAULT_CLUSTER_TOL,
    BiPoly,
    LinearMap,
    RatPoly,
    chebyshev,
    compose,
    critical_data,
    normalize_linear,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Decomposition:
    """f = g(h(x)) with h monic, h(0) = 0 and both factors of degree >= 2."""

    g: RatPoly
    h: RatPoly

    def verify(self, f: RatPoly) -> bool:
        return compose(self.g, self.h) == f

    def to_json(self) -> Dict[str, str]:
        return {"g": str(self.g), "h": str(self.h)}


def h_adic_expansion(f: RatPoly, h: RatPoly) -> Optional[RatPoly]:
    """
    Write f as a polynomial in h by repeated division.

    Returns:
        g with f = g(h(x)), or None when some remainder is not constant.
    """
    if h.degree < 1:
        raise InputError("h-adic expansion needs a nonconstant h")
    digits: List[Fraction] = []
    cur = f
    while cur.degree >= h.degree:
        cur, rem = divmod(cur, h)
        if rem.degree > 0:
            return None
        digits.append(rem.coeff(0))
    if cur.degree > 0:
        return None
    digits.append(cur.coeff(0))
    return RatPoly(tuple(digits))


def _root_head(monic: RatPoly, r: int, d: int) -> RatPoly:
    """
    Polynomial part (without constant) of monic^(1/r), of degree d.

    Uses the reversed series F(y) = y^n monic(1/y) = 1 + F_1 y + ... and the
    power recursion H_k = (1/k) sum_{j=1..k} ((1/r + 1) j - k) F_j H_{k-j}.
    """
    n = monic.degree
    F = [monic.coeff(n - j) for j in range(d + 1)]
    alpha = Fraction(1, r)
    H = [Fraction(1)]
    for k in range(1, d):
        acc = sum(((alpha + 1) * j - k) * F[j] * H[k - j] for j in range(1, k + 1))
        H.append(Fraction(acc) / k)
    return RatPoly(tuple([Fraction(0)] + [H[d - i] for i in range(1, d)] + [H[0]]))


def _divisors(n: int) -> List[int]:
    return [d for d in range(2, n) if n % d == 0]


def right_components(f: RatPoly) -> List[Decomposition]:
    """
    Every decomposition f = g(h) with 1 < deg h < deg f, one per degree.

    Works on the canonical form of f: for each proper divisor d the only
    monic candidate h of degree d is the polynomial part of the
    (n/d)-th root of f at infinity, and it is kept when the h-adic
    expansion of f has constant digits. Results are sorted by deg h.
    """
    n = f.degree
    if n < 2:
        raise InputError(f"right_components needs degree >= 2, got {n}")
    canonical, pre, post = normalize_linear(f)
    out: List[Decomposition] = []
    for d in _divisors(n):
        h_c = _root_head(canonical, n // d, d)
        g_c = h_adic_expansion(canonical, h_c)
        if g_c is None:
            continue
        h_full = h_c.compose(pre.as_poly())
        shift = h_full.coeff(0)
        h = h_full - shift
        g = post.as_poly().compose(g_c.compose(RatPoly((shift, Fraction(1)))))
        found = Decomposition(g, h)
        if not found.verify(f):
            raise NumericInconsistencyError(f"Decomposition of {f} through degree {d} failed to verify")
        out.append(found)
    logger.debug(f"right_components({f}): degrees {[c.h.degree for c in out]}")
    return out


def is_decomposable(f: RatPoly) -> bool:
    return bool(right_components(f))


def fiber_partition(h: RatPoly, roots: np.ndarray, tol: float = 1e-8) -> Tuple[Tuple[int, ...], ...]:
    """Partition root indices by the value of h, clustered with relative tolerance."""
    values = h(np.asarray(roots, dtype=complex))
    scale = max(1.0, float(np.max(np.abs(values))))
    groups: List[List[int]] = []
    for k, v in enumerate(values):
        for group in groups:
            if abs(values[group[0]] - v) <= tol * scale:
                group.append(k)
                break
        else:
            groups.append([k])
    return tuple(tuple(g) for g in groups)


# --- divided differences ------------------------------------------------------


@dataclass(frozen=True)
class DividedDifference:
    """Delta(x, y) = (f(x) - f(y)) / (x - y)."""

    poly: BiPoly

    def verify(self, f: RatPoly) -> bool:
        x_minus_y = BiPoly.from_dict({(1, 0): 1, (0, 1): -1})
        f_y = BiPoly.from_dict({(0, i): c for i, c in enumerate(f.coeffs)})
        return x_minus_y * self.poly == BiPoly.in_x(f) - f_y

    def is_symmetric(self) -> bool:
        terms = self.poly.as_dict()
        return all(terms.get((j, i)) == c for (i, j), c in terms.items())

    def grid(self) -> List[List[Fraction]]:
        """Dense coefficients, grid[i][j] of x^i y^j."""
        size = self.poly.degree_x + 1
        terms = self.poly.as_dict()
        return [[terms.get((i, j), Fraction(0)) for j in range(size)] for i in range(size)]


def divided_difference(f: RatPoly) -> DividedDifference:
    if f.degree < 2:
        raise InputError(f"divided_difference needs degree >= 2, got {f.degree}")
    terms: Dict[Tuple[int, int], Fraction] = {}
    for k, a in enumerate(f.coeffs):
        for i in range(k):
            key = (i, k - 1 - i)
            terms[key] = terms.get(key, Fraction(0)) + a
    return DividedDifference(BiPoly.from_dict(terms))


# --- exceptional shapes -------------------------------------------------------


@dataclass(frozen=True)
class ExceptionalTag:
    """
    PowerEquiv, ChebyshevEquiv or Neither.

    For the first two, f = post(T(pre(x))) with T = x^n or T_n. When the
    Chebyshev scale is irrational only scale_squared is known over Q and the
    maps are None.
    """

    kind: str
    pre: Optional[LinearMap] = None
    post: Optional[LinearMap] = None
    scale_squared: Optional[Fraction] = None

    def to_json(self) -> Dict[str, Optional[str]]:
        return {
            "kind": self.kind,
            "pre": str(self.pre) if self.pre else None,
            "post": str(self.post) if self.post else None,
            "scale_squared": str(self.scale_squared) if self.scale_squared is not None else None,
        }


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    num, den = isqrt(q.numerator), isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _power_equivalence(f: RatPoly) -> Optional[ExceptionalTag]:
    n = f.degree
    df = f.derivative()
    c = -df.coeff(n - 2) / ((n - 1) * df.leading)
    if df != RatPoly((-c, Fraction(1))) ** (n - 1) * df.leading:
        return None
    return ExceptionalTag("PowerEquiv", LinearMap(Fraction(1), -c), LinearMap(f.leading, f(c)))


def _chebyshev_equivalence(f: RatPoly) -> ExceptionalTag:
    n = f.degree
    canon_f, pre_f, post_f = normalize_linear(f)
    T = chebyshev(n)
    canon_t, pre_t, post_t = normalize_linear(T)
    if canon_f.coeff(n - 2) == 0:
        raise NumericInconsistencyError(f"{f} passed the Chebyshev screen but has no quadratic term")
    mu2 = canon_t.coeff(n - 2) / canon_f.coeff(n - 2)
    for m in range(n):
        gap = n - m
        expected = Fraction(0) if gap % 2 else canon_t.coeff(m) * mu2 ** (-(gap // 2))
        if canon_f.coeff(m) != expected:
            raise NumericInconsistencyError(
                f"{f} passed the Chebyshev screen but coefficient {m} does not match T_{n}"
            )
    mu = _rational_sqrt(mu2)
    if mu is None:
        logger.info(f"{f} is Chebyshev equivalent with irrational scale, mu^2 = {mu2}")
        return ExceptionalTag("ChebyshevEquiv", scale_squared=mu2)
    scale_out = LinearMap(1 / mu ** n, Fraction(0))
    outer = post_t.inverse().then(scale_out).then(post_f)
    inner = pre_f.then(LinearMap(mu, Fraction(0))).then(pre_t.inverse())
    if outer.as_poly().compose(T.compose(inner.as_poly())) != f:
        raise NumericInconsistencyError(f"Chebyshev maps for {f} failed to verify")
    return ExceptionalTag("ChebyshevEquiv", inner, outer, mu2)


def recognize_exceptional(f: RatPoly, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> ExceptionalTag:
    """
    Decide whether f is linearly equivalent to x^n or to T_n.

    The power test is exact. The Chebyshev test screens numerically for two
    critical values over simple critical points, then certifies by matching
    canonical forms and composing the linear maps back to f.

    Raises:
        NumericInconsistencyError: positive screen, failed certificate.
    """
    if f.degree < 2:
        raise InputError(f"recognize_exceptional needs degree >= 2, got {f.degree}")
    power = _power_equivalence(f)
    if power is not None:
        return power
    crit = critical_data(f, cluster_tol)
    simple = all(p.multiplicity == 1 for p in crit.points)
    if crit.r == 2 and simple and len(crit.points) == f.degree - 1:
        return _chebyshev_equivalence(f)
    return ExceptionalTag("Neither")
