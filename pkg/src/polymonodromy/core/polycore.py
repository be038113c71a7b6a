"""
Exact polynomial arithmetic over the rationals, its floating complex image,
bivariate polynomials and 1-forms, Chebyshev polynomials, critical data and
the linear normalization used to compare polynomials up to equivalence.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Tuple, Union

import numpy as np

from polymonodromy.core.errors import DegenerateInputError, InputError, TrackingError
from polymonodromy.core.utils import fraction_str, parse_rational_list

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
DEFAULT_CLUSTER_TOL = 1e-8
ROOT_RESIDUAL_TOL = 1e-12


def _strip(coeffs: Iterable[Scalar]) -> Tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class RatPoly:
    """Univariate polynomial with Fraction coefficients, lowest degree first."""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    # --- construction -------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Scalar]) -> "RatPoly":
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def parse(cls, text: str) -> "RatPoly":
        """Parse the comma-separated text format, e.g. "0,-3,0,4"."""
        return cls(tuple(parse_rational_list(text)))

    @classmethod
    def x(cls) -> "RatPoly":
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def constant(cls, c: Scalar) -> "RatPoly":
        return cls((Fraction(c),))

    @classmethod
    def monomial(cls, k: int, c: Scalar = 1) -> "RatPoly":
        return cls(tuple([Fraction(0)] * k + [Fraction(c)]))

    # --- basic properties ---------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    # --- ring operations ----------------------------------------------
    def __add__(self, other: Union["RatPoly", Scalar]) -> "RatPoly":
        o = other if isinstance(other, RatPoly) else RatPoly.constant(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return RatPoly(tuple(self.coeff(k) + o.coeff(k) for k in range(n)))

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Union["RatPoly", Scalar]) -> "RatPoly":
        o = other if isinstance(other, RatPoly) else RatPoly.constant(other)
        return self + (-o)

    def __rsub__(self, other: Scalar) -> "RatPoly":
        return RatPoly.constant(other) - self

    def __mul__(self, other: Union["RatPoly", Scalar]) -> "RatPoly":
        if not isinstance(other, RatPoly):
            c = Fraction(other)
            return RatPoly(tuple(a * c for a in self.coeffs))
        if self.is_zero or other.is_zero:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RatPoly":
        if k < 0:
            raise ValueError("Negative powers are not polynomials")
        result = RatPoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: "RatPoly") -> Tuple["RatPoly", "RatPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("Polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RatPoly(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.leading
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RatPoly(tuple(quot)), RatPoly(tuple(rem[: len(other.coeffs) - 1]))

    def __floordiv__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[1]

    # --- calculus and evaluation -------------------------------------
    def derivative(self) -> "RatPoly":
        return RatPoly(tuple(k * c for k, c in enumerate(self.coeffs))[1:])

    def integral(self, constant: Scalar = 0) -> "RatPoly":
        """Primitive with the given value at 0."""
        return RatPoly(
            (Fraction(constant),)
            + tuple(c / (k + 1) for k, c in enumerate(self.coeffs))
        )

    def __call__(self, value: Any) -> Any:
        """Horner evaluation; exact for int/Fraction input, complex otherwise."""
        if isinstance(value, (int, Fraction)):
            exact = Fraction(0)
            for c in reversed(self.coeffs):
                exact = exact * value + c
            return exact
        acc: Any = 0j * value
        for c in reversed(self.coeffs):
            acc = acc * value + complex(c)
        return acc

    def compose(self, inner: "RatPoly") -> "RatPoly":
        """Return self(inner(x)) by Horner's scheme."""
        result = RatPoly()
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def monic(self) -> "RatPoly":
        if self.is_zero:
            return self
        return self * (1 / self.leading)

    def to_cpoly(self) -> "CPoly":
        return CPoly(np.array([complex(c) for c in self.coeffs], dtype=complex))

    # --- text ----------------------------------------------------------
    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return ",".join(fraction_str(c) for c in self.coeffs)

    def pretty(self, var: str = "x") -> str:
        """Human readable form such as 4*x^3 - 3*x."""
        if self.is_zero:
            return "0"
        terms: List[str] = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{fraction_str(mag)}*{mono}"
            else:
                body = fraction_str(mag)
            terms.append(f"{sign} {body}")
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def compose(g: RatPoly, h: RatPoly) -> RatPoly:
    """g(h(x)) exactly."""
    return g.compose(h)


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd by the Euclidean algorithm."""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def squarefree_parts(p: RatPoly) -> Dict[int, RatPoly]:
    """
    Yun's squarefree decomposition.

    Returns:
        multiplicity -> monic squarefree factor, omitting constant factors.
    """
    parts: Dict[int, RatPoly] = {}
    if p.degree < 1:
        return parts
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b // a
        c = d // a if not d.is_zero else RatPoly()
        if a.degree > 0:
            parts[i] = a.monic()
        i += 1
        d = c - b.derivative()
    return parts


def chebyshev(n: int) -> RatPoly:
    """T_n by the recurrence T_{n+1} = 2x T_n - T_{n-1}."""
    if n < 1:
        raise InputError(f"Chebyshev index must be positive, got {n}")
    prev, cur = RatPoly.constant(1), RatPoly.x()
    two_x = RatPoly.monomial(1, 2)
    for _ in range(n - 1):
        prev, cur = cur, two_x * cur - prev
    return cur


@dataclass(frozen=True)
class LinearMap:
    """The affine map x -> a*x + b with a != 0."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a == 0:
            raise InputError("Linear map needs a nonzero slope")

    @classmethod
    def identity(cls) -> "LinearMap":
        return cls(Fraction(1), Fraction(0))

    def __call__(self, value: Any) -> Any:
        return self.a * value + self.b

    def as_poly(self) -> RatPoly:
        return RatPoly((self.b, self.a))

    def inverse(self) -> "LinearMap":
        return LinearMap(1 / self.a, -self.b / self.a)

    def then(self, outer: "LinearMap") -> "LinearMap":
        """outer(self(x))."""
        return LinearMap(outer.a * self.a, outer.a * self.b + outer.b)

    @property
    def is_identity(self) -> bool:
        return self.a == 1 and self.b == 0

    def __str__(self) -> str:
        return str(self.as_poly())


def normalize_linear(f: RatPoly) -> Tuple[RatPoly, LinearMap, LinearMap]:
    """
    Canonical monic, depressed, zero-constant representative of f.

    Returns:
        (canonical, pre, post) with f = post ∘ canonical ∘ pre.
    """
    n = f.degree
    if n < 2:
        raise InputError(f"normalize_linear needs degree >= 2, got {n}")
    lead = f.leading
    s = f.coeff(n - 1) / (n * lead)
    shifted = f.compose(RatPoly((-s, Fraction(1))))
    c0 = shifted.coeff(0)
    canonical = (shifted - c0) * (1 / lead)
    return canonical, LinearMap(Fraction(1), s), LinearMap(lead, c0)


# --- floating complex image ------------------------------------------------


@dataclass(frozen=True, eq=False)
class CPoly:
    """Complex double polynomial, lowest degree first."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: Any) -> Any:
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def derivative(self) -> "CPoly":
        return CPoly(np.polynomial.polynomial.polyder(self.coeffs))

    def shifted(self, t: complex) -> "CPoly":
        """Coefficients of f - t."""
        c = np.array(self.coeffs, dtype=complex)
        c[0] -= t
        return CPoly(c)

    def scale(self, x: np.ndarray) -> np.ndarray:
        """Sum of |c_k| |x|^k, the natural size for residuals."""
        return np.polynomial.polynomial.polyval(np.abs(x), np.abs(self.coeffs))

    def residual(self, x: np.ndarray) -> np.ndarray:
        return np.abs(self(x)) / np.maximum(self.scale(x), 1e-300)


def polish_roots(p: CPoly, roots: np.ndarray, iterations: int = 3) -> np.ndarray:
    """A few Newton steps on each root; stops early where the derivative vanishes."""
    dp = p.derivative()
    x = np.array(roots, dtype=complex)
    for _ in range(iterations):
        d = dp(x)
        safe = np.abs(d) > 1e-300
        step = np.zeros_like(x)
        step[safe] = p(x[safe]) / d[safe]
        x = x - step
    return x


def numeric_roots(p: CPoly) -> np.ndarray:
    """Companion-matrix roots refined by Newton."""
    if p.degree < 1:
        return np.array([], dtype=complex)
    raw = np.roots(p.coeffs[::-1])
    return polish_roots(p, raw)


# --- critical data -----------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    multiplicity: int
    value_index: int


@dataclass(frozen=True)
class CriticalData:
    """Critical points of f grouped by their (clustered) critical values."""

    points: Tuple[CriticalPoint, ...]
    values: Tuple[complex, ...]
    groups: Tuple[Tuple[int, ...], ...]
    scale: float = 1.0

    @property
    def r(self) -> int:
        return len(self.values)

    @property
    def turning_counts(self) -> Tuple[int, ...]:
        """r_i: number of distinct critical points above each value."""
        return tuple(len(g) for g in self.groups)

    @property
    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.points)

    def points_over(self, value_index: int) -> List[CriticalPoint]:
        return [self.points[k] for k in self.groups[value_index]]

    @property
    def max_abs_value(self) -> float:
        return max((abs(v) for v in self.values), default=0.0)


def _sort_key(z: complex) -> Tuple[float, float]:
    return (round(z.real, 9), round(z.imag, 9))


def critical_data(f: RatPoly, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> CriticalData:
    """
    Critical points with exact multiplicities and clustered critical values.

    Multiplicities come from the squarefree decomposition of f', so only the
    locations and the values are floating point.

    Args:
        f: Polynomial of degree >= 2.
        cluster_tol: Relative tolerance for merging critical values.

    Raises:
        InputError: degree below 2.
        TrackingError: a root of f' could not be found to the residual bound.
        DegenerateInputError: two values sit just outside the cluster radius.
    """
    if f.degree < 2:
        raise InputError(f"critical_data needs degree >= 2, got {f.degree}")
    fc = f.to_cpoly()
    located: List[Tuple[complex, int]] = []
    for mult, part in sorted(squarefree_parts(f.derivative()).items()):
        cp = part.to_cpoly()
        roots = numeric_roots(cp)
        res = cp.residual(roots)
        if len(roots) and float(np.max(res)) > ROOT_RESIDUAL_TOL:
            logger.error(f"Root finder did not converge on factor {part}")
            raise TrackingError(
                f"Critical points of {f} not found to residual {ROOT_RESIDUAL_TOL}",
                detail=str(part),
            )
        located.extend((complex(z), mult) for z in roots)

    raw_values = [complex(fc(z)) for z, _ in located]
    radius = max([1.0] + [abs(z) for z, _ in located])
    scale = max(
        [abs(float(f.leading)) * radius ** f.degree] + [abs(v) for v in raw_values]
    )

    # single-linkage clustering of critical values
    parent = list(range(len(raw_values)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(len(raw_values)):
        for b in range(a + 1, len(raw_values)):
            gap = abs(raw_values[a] - raw_values[b])
            if gap <= cluster_tol * scale:
                parent[find(a)] = find(b)
            elif gap <= 10 * cluster_tol * scale:
                raise DegenerateInputError(
                    f"Critical values {raw_values[a]} and {raw_values[b]} of {f} "
                    "are too close to separate"
                )

    clusters: Dict[int, List[int]] = {}
    for k in range(len(raw_values)):
        clusters.setdefault(find(k), []).append(k)
    centers = {
        root: complex(np.mean([raw_values[k] for k in members]))
        for root, members in clusters.items()
    }
    ordered_roots = sorted(clusters, key=lambda c: _sort_key(centers[c]))
    values = tuple(centers[c] for c in ordered_roots)

    points: List[CriticalPoint] = []
    groups: List[Tuple[int, ...]] = []
    for vi, c in enumerate(ordered_roots):
        members = sorted(clusters[c], key=lambda k: _sort_key(located[k][0]))
        idx = []
        for k in members:
            idx.append(len(points))
            points.append(CriticalPoint(located[k][0], located[k][1], vi))
        groups.append(tuple(idx))

    data = CriticalData(tuple(points), values, tuple(groups), scale)
    logger.debug(f"critical_data({f}): r={data.r}, values={values}")
    return data


# --- bivariate polynomials and 1-forms --------------------------------------

Monomial = Tuple[int, int]


def _clean(terms: Dict[Monomial, Fraction]) -> Tuple[Tuple[Monomial, Fraction], ...]:
    return tuple(sorted((m, c) for m, c in terms.items() if c != 0))


@dataclass(frozen=True)
class BiPoly:
    """Polynomial in x and y; terms map (i, j) to the coefficient of x^i y^j."""

    terms: Tuple[Tuple[Monomial, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, terms: Dict[Monomial, Scalar]) -> "BiPoly":
        return cls(_clean({m: Fraction(c) for m, c in terms.items()}))

    @classmethod
    def constant(cls, c: Scalar) -> "BiPoly":
        return cls.from_dict({(0, 0): c})

    @classmethod
    def y_power(cls, j: int, c: Scalar = 1) -> "BiPoly":
        return cls.from_dict({(0, j): c})

    @classmethod
    def in_x(cls, p: RatPoly) -> "BiPoly":
        return cls.from_dict({(i, 0): c for i, c in enumerate(p.coeffs)})

    @classmethod
    def from_y_coefficients(cls, rows: Dict[int, RatPoly]) -> "BiPoly":
        terms: Dict[Monomial, Scalar] = {}
        for j, p in rows.items():
            for i, c in enumerate(p.coeffs):
                terms[(i, j)] = c
        return cls.from_dict(terms)

    @classmethod
    def parse(cls, text: str) -> "BiPoly":
        """
        Parse y-rows separated by '|', each row a coefficient list in x.

        "0,1|2" is x + 2y; an empty string is the zero polynomial.
        """
        if text is None or not text.strip():
            return cls()
        rows = {j: RatPoly.parse(row) for j, row in enumerate(text.split("|"))}
        return cls.from_y_coefficients(rows)

    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree_y(self) -> int:
        return max((m[1] for m, _ in self.terms), default=-1)

    @property
    def degree_x(self) -> int:
        return max((m[0] for m, _ in self.terms), default=-1)

    def y_coefficients(self) -> Dict[int, RatPoly]:
        rows: Dict[int, Dict[int, Fraction]] = {}
        for (i, j), c in self.terms:
            rows.setdefault(j, {})[i] = c
        return {
            j: RatPoly(tuple(row.get(i, Fraction(0)) for i in range(max(row) + 1)))
            for j, row in rows.items()
        }

    def __add__(self, other: "BiPoly") -> "BiPoly":
        terms = self.as_dict()
        for m, c in other.terms:
            terms[m] = terms.get(m, Fraction(0)) + c
        return BiPoly(_clean(terms))

    def __neg__(self) -> "BiPoly":
        return BiPoly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other: Union["BiPoly", Scalar]) -> "BiPoly":
        if not isinstance(other, BiPoly):
            c = Fraction(other)
            return BiPoly(_clean({m: a * c for m, a in self.terms}))
        terms: Dict[Monomial, Fraction] = {}
        for (i1, j1), a in self.terms:
            for (i2, j2), b in other.terms:
                key = (i1 + i2, j1 + j2)
                terms[key] = terms.get(key, Fraction(0)) + a * b
        return BiPoly(_clean(terms))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BiPoly":
        result = BiPoly.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def dx(self) -> "BiPoly":
        return BiPoly(_clean({(i - 1, j): c * i for (i, j), c in self.terms if i > 0}))

    def dy(self) -> "BiPoly":
        return BiPoly(_clean({(i, j - 1): c * j for (i, j), c in self.terms if j > 0}))

    def evaluate(self, x: Any, y: Any) -> Any:
        """Evaluate at numbers or numpy arrays."""
        total = 0 * x + 0 * y
        for (i, j), c in self.terms:
            total = total + complex(c) * x ** i * y ** j
        return total

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        rows = self.y_coefficients()
        return "|".join(str(rows.get(j, RatPoly())) for j in range(self.degree_y + 1))


@dataclass(frozen=True)
class OneForm:
    """The polynomial 1-form P dx + Q dy."""

    P: BiPoly = field(default_factory=BiPoly)
    Q: BiPoly = field(default_factory=BiPoly)

    @classmethod
    def exact(cls, B: BiPoly) -> "OneForm":
        """dB."""
        return cls(B.dx(), B.dy())

    @classmethod
    def relative(cls, A: BiPoly, f: RatPoly) -> "OneForm":
        """A dF for F = y^2 + f(x)."""
        return cls(A * BiPoly.in_x(f.derivative()), A * BiPoly.y_power(1, 2))

    @classmethod
    def y_times(cls, g: RatPoly) -> "OneForm":
        """y g(x) dx."""
        return cls(BiPoly.in_x(g) * BiPoly.y_power(1), BiPoly())

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.P + other.P, self.Q + other.Q)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.P - other.P, self.Q - other.Q)

    @property
    def is_zero(self) -> bool:
        return self.P.is_zero and self.Q.is_zero


def hamiltonian(f: RatPoly) -> BiPoly:
    """F = y^2 + f(x)."""
    return BiPoly.y_power(2) + BiPoly.in_x(f)
