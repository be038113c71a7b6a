"""
Homology of the level curves F = y^2 + f(x) = t and its monodromy.

Over a basepoint the curve has n branch points x_1..x_n, ranked like the
fiber of f. L_k is the cycle of the k-th ranked branch point; the L_k span
the homology with closed support and the differences L_k - L_{k+1} span the
ordinary first homology. Vectors are coordinates in the L basis, acted on
covariantly: when the roots in ranks i and i+1 exchange counterclockwise,
L_{i+1} goes to L_i and L_i to 2L_i - L_{i+1}; a clockwise exchange acts by
the inverse. Modulo 2 every exchange is the transposition of the two ranks.

The second half of the module reduces polynomial 1-forms to y g(x) dx
modulo relatively exact forms and decides whether a Morse point of F is a
tangential center.
"""

import cmath
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from polymonodromy.core.chebwitness import period_integral
from polymonodromy.core.config import QuadratureSettings, Tolerances
from polymonodromy.core.decompose import Decomposition, h_adic_expansion, right_components
from polymonodromy.core.errors import InputError, NumericInconsistencyError, TrackingError
from polymonodromy.core.linalg import ExactSpan, Gf2Span, determinant, identity, matmul, matvec, mod2, rank
from polymonodromy.core.permlab import PermAction, Permutation, Word
from polymonodromy.core.polycore import (
    BiPoly,
    OneForm,
    RatPoly,
    compose,
    critical_data,
    hamiltonian,
    numeric_roots,
)
from polymonodromy.core.tracker import (
    LoopPath,
    MonodromyData,
    TrackOptions,
    approach,
    compute_monodromy,
    root_spread,
    track_loop,
    track_path,
)
from polymonodromy.core.utils import complex_pair, fraction_str

logger = logging.getLogger(__name__)

IntMatrix = List[List[int]]
RINGS = ("Z", "Z2", "Q")
SHRINK_FACTOR = 0.25
MAX_SHRINKS = 12
WITNESS_ANGLES = (0.3, 1.3, 2.3)


# --- homology vectors and swap matrices -----------------------------------------


@dataclass(frozen=True)
class HomologyVector:
    """Coordinates over L_1..L_n; a class of the ordinary homology when they sum to zero."""

    coords: Tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Sequence[Any]) -> "HomologyVector":
        return cls(tuple(Fraction(v) for v in values))

    @classmethod
    def basis(cls, n: int, k: int) -> "HomologyVector":
        return cls.of([1 if j == k else 0 for j in range(n)])

    @classmethod
    def difference(cls, n: int, i: int, j: int) -> "HomologyVector":
        """L_i - L_j, 0-based."""
        return cls.of([(1 if m == i else 0) - (1 if m == j else 0) for m in range(n)])

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def is_cycle(self) -> bool:
        return sum(self.coords) == 0

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __add__(self, other: "HomologyVector") -> "HomologyVector":
        return HomologyVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "HomologyVector") -> "HomologyVector":
        return HomologyVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def mod2(self) -> Tuple[int, ...]:
        if not self.is_integral:
            raise InputError("Only integral vectors reduce mod 2")
        return tuple(int(c) % 2 for c in self.coords)

    def to_json(self) -> List[str]:
        return [fraction_str(c) for c in self.coords]


def swap_matrix(n: int, letter: int) -> IntMatrix:
    """
    Matrix of the signed exchange `letter` (+-i, 1 <= i <= n-1) on L coordinates.

    Raises:
        InputError: letter out of range.
    """
    i = abs(letter)
    if not 1 <= i <= n - 1:
        raise InputError(f"Swap index {letter} outside 1..{n - 1}")
    m = identity(n)
    a, b = i - 1, i
    block = [[2, 1], [-1, 0]] if letter > 0 else [[0, -1], [1, 2]]
    m[a][a], m[a][b] = block[0]
    m[b][a], m[b][b] = block[1]
    return m


def swap_apply(v: HomologyVector, i: int, ring: str = "Z") -> HomologyVector:
    """Apply the exchange i (signed, 1-based) to v over Z, Z2 or Q."""
    if ring not in RINGS:
        raise InputError(f"Unknown ring {ring!r}, expected one of {RINGS}")
    if ring == "Z" and not v.is_integral:
        raise InputError("Vector has non-integral coordinates")
    out = HomologyVector.of(matvec(swap_matrix(v.n, i), v.coords))
    if ring == "Z2":
        return HomologyVector.of(out.mod2())
    return out


def word_matrix(n: int, word: Sequence[int]) -> IntMatrix:
    """S_{w_k} ... S_{w_1} for the swap word w_1 .. w_k."""
    m = identity(n)
    for letter in word:
        m = matmul(swap_matrix(n, letter), m)
    return m


def inverse_word(word: Sequence[int]) -> Tuple[int, ...]:
    return tuple(-letter for letter in reversed(word))


def permutation_matrix(perm: Permutation) -> IntMatrix:
    """P[perm(k)][k] = 1."""
    m = [[0] * perm.n for _ in range(perm.n)]
    for k in range(perm.n):
        m[perm(k)][k] = 1
    return m


def check_loop_matrix(matrix: IntMatrix, perm: Permutation) -> None:
    """
    Raises:
        NumericInconsistencyError: determinant not +-1 or the reduction mod 2
            differs from the tracked permutation.
    """
    det = determinant(matrix)
    if abs(det) != 1:
        raise NumericInconsistencyError(f"Loop matrix has determinant {det}")
    if mod2(matrix) != permutation_matrix(perm):
        logger.error(f"Loop matrix mod 2 does not match permutation {perm.one_line()}")
        raise NumericInconsistencyError("Loop matrix mod 2 disagrees with the tracked permutation")


def loop_homology_action(
    f: RatPoly, loop: LoopPath, opts: Optional[TrackOptions] = None
) -> IntMatrix:
    """Track `loop` and return the checked matrix of its swap word."""
    result = track_loop(f.to_cpoly(), loop, opts or TrackOptions())
    matrix = word_matrix(f.degree, result.swap_word)
    check_loop_matrix(matrix, result.permutation)
    return matrix


def loop_matrices(mono: MonodromyData) -> List[IntMatrix]:
    """Matrices of the small loops, in loop order, from their recorded words."""
    out = []
    for result in mono.results:
        matrix = word_matrix(mono.n, result.swap_word)
        check_loop_matrix(matrix, result.permutation)
        out.append(matrix)
    return out


def critical_variation_rank(mono: MonodromyData, value_index: int) -> int:
    """Rank of M - id for the small loop around one critical value."""
    matrix = loop_matrices(mono)[mono.loop_for_value(value_index)]
    n = mono.n
    return rank([[matrix[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)])


# --- vanishing cycles -------------------------------------------------------------


@dataclass(frozen=True)
class VanishingCycle:
    """A Morse vanishing cycle, pulled back to the basepoint frame."""

    vector: HomologyVector
    value_index: int
    point: complex
    pair: Tuple[int, int]
    path_word: Tuple[int, ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "vector": self.vector.to_json(),
            "critical_value_index": self.value_index + 1,
            "colliding_roots": [self.pair[0] + 1, self.pair[1] + 1],
            "path_word": list(self.path_word),
        }


def vanishing_cycle_data(
    f: RatPoly,
    value_index: int,
    mono: Optional[MonodromyData] = None,
    opts: Optional[TrackOptions] = None,
    point_index: int = 0,
) -> VanishingCycle:
    """
    Track toward a Morse critical value and name the collapsing cycle.

    The path follows the approach ray of the small loop around the value and
    shrinks toward it until the two roots nearest the critical point are
    adjacent in rank and clearly closer to it than the rest. There the cycle
    is L_r - L_{r+1} (upper rank minus lower); the inverse swaps of the path
    carry it back to the basepoint.

    Raises:
        InputError: bad index or a critical point of multiplicity above one.
        TrackingError: the pair never separates from the other roots.
    """
    mono = mono or compute_monodromy(f, opts=opts)
    crit = mono.crit
    if not 0 <= value_index < crit.r:
        raise InputError(f"Critical value index {value_index + 1} outside 1..{crit.r}")
    points = crit.points_over(value_index)
    if not 0 <= point_index < len(points):
        raise InputError(f"Critical point index {point_index + 1} outside 1..{len(points)}")
    point = points[point_index]
    if point.multiplicity != 1:
        raise InputError(
            f"Critical point {point.location:.6g} has multiplicity {point.multiplicity}; "
            "only Morse points have a vanishing cycle"
        )

    fc = f.to_cpoly()
    t_c = crit.values[value_index]
    entry, _ = approach(list(crit.values), value_index, mono.basepoint)
    guard = mono.opts.collision_guard * root_spread(mono.fiber)
    roots = np.array(mono.fiber, dtype=complex)
    word: List[int] = []
    order: Tuple[int, ...] = tuple(range(mono.n))
    prev, target = mono.basepoint, entry
    for attempt in range(MAX_SHRINKS):
        stage = track_path(fc, roots, [prev, target], mono.opts, guard_abs=guard)
        roots, order = stage.roots, stage.order
        word.extend(stage.swap_word)
        dist = np.abs(roots - point.location)
        near = [int(k) for k in np.argsort(dist)]
        i1, i2 = near[0], near[1]
        rank_of = {label: r for r, label in enumerate(order)}
        adjacent = abs(rank_of[i1] - rank_of[i2]) == 1
        separated = len(near) < 3 or dist[i2] < 0.5 * dist[near[2]]
        if adjacent and separated:
            break
        prev, target = target, t_c + (target - t_c) * SHRINK_FACTOR
    else:
        logger.error(f"No collapsing pair found near critical value {t_c}")
        raise TrackingError(f"Could not isolate the vanishing pair near t={t_c}")

    r = min(rank_of[i1], rank_of[i2])
    local = HomologyVector.difference(mono.n, r, r + 1)
    vector = HomologyVector.of(matvec(word_matrix(mono.n, inverse_word(word)), local.coords))
    expected = tuple(1 if k in (i1, i2) else 0 for k in range(mono.n))
    if vector.mod2() != expected:
        raise NumericInconsistencyError("Vanishing cycle mod 2 is not the colliding pair")
    logger.info(
        f"Vanishing cycle at t={t_c:.6g}: roots {i1 + 1},{i2 + 1} collide, "
        f"{len(word)} swaps on the path after {attempt + 1} stage(s)"
    )
    pair = (min(i1, i2), max(i1, i2))
    return VanishingCycle(vector, value_index, point.location, pair, tuple(word))


def vanishing_cycle(
    f: RatPoly,
    value_index: int,
    mono: Optional[MonodromyData] = None,
    opts: Optional[TrackOptions] = None,
    point_index: int = 0,
) -> HomologyVector:
    return vanishing_cycle_data(f, value_index, mono, opts, point_index).vector


# --- orbit spans ------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSpan:
    dimension: int
    ring: str
    basis: Tuple[HomologyVector, ...]
    words: Tuple[Word, ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "dimension": self.dimension,
            "ring": self.ring,
            "basis": [v.to_json() for v in self.basis],
            "words": [list(w) for w in self.words],
        }


def _signed_generators(mono: MonodromyData) -> List[Tuple[int, IntMatrix]]:
    moves = []
    for k, result in enumerate(mono.results):
        moves.append((k + 1, word_matrix(mono.n, result.swap_word)))
        moves.append((-(k + 1), word_matrix(mono.n, inverse_word(result.swap_word))))
    return moves


def orbit_span(
    f: RatPoly,
    delta: HomologyVector,
    mono: Optional[MonodromyData] = None,
    opts: Optional[TrackOptions] = None,
    ring: str = "Q",
) -> OrbitSpan:
    """
    Span of the monodromy orbit of delta, over Q or Z2.

    Breadth-first search over loop matrices and their inverses; only images
    that enlarge the span are queued, so the search ends once the span is
    invariant under every generator.
    """
    if ring not in ("Q", "Z2"):
        raise InputError(f"orbit_span works over Q or Z2, got {ring!r}")
    mono = mono or compute_monodromy(f, opts=opts)
    if delta.n != mono.n:
        raise InputError(f"Vector has {delta.n} coordinates, the fiber {mono.n} points")
    if not delta.is_cycle:
        raise InputError("orbit_span needs a vector with coordinate sum zero")
    span = ExactSpan(mono.n) if ring == "Q" else Gf2Span(mono.n)
    basis: List[HomologyVector] = []
    words: List[Word] = []
    if span.add(delta.coords):
        basis.append(delta)
        words.append(())
    queue = deque(zip(list(basis), list(words)))
    moves = _signed_generators(mono)
    while queue:
        v, w = queue.popleft()
        for label, matrix in moves:
            image = HomologyVector.of(matvec(matrix, v.coords))
            if span.add(image.coords):
                basis.append(image)
                words.append(w + (label,))
                queue.append((image, w + (label,)))
    logger.info(f"Orbit span over {ring}: dimension {span.dimension} of {mono.n - 1}")
    return OrbitSpan(span.dimension, ring, tuple(basis), tuple(words))


@dataclass(frozen=True)
class AdjacentCertificate:
    """
    Loop words moving delta onto every L_k - L_{k+1} modulo 2.

    Row k of `matrix` holds the coordinates of the k-th image in the basis
    L_1 - L_2, ..., L_{n-1} - L_n; it is the identity modulo 2, so its
    determinant is odd and the images span a space of rank n - 1.
    """

    words: Tuple[Word, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]
    det: Fraction

    def verify(self) -> bool:
        m = [list(row) for row in self.matrix]
        n = len(m)
        if any(c.denominator != 1 for row in m for c in row):
            return False
        ident = identity(n)
        return mod2([[int(c) for c in row] for row in m]) == ident and determinant(m) % 2 == 1

    def to_json(self) -> Dict[str, object]:
        return {
            "words": [list(w) for w in self.words],
            "matrix": [[fraction_str(c) for c in row] for row in self.matrix],
            "determinant": fraction_str(self.det),
        }


def difference_coordinates(v: HomologyVector) -> Tuple[Fraction, ...]:
    """Coordinates of a cycle in the basis L_k - L_{k+1}: the partial sums."""
    if not v.is_cycle:
        raise InputError("Only vectors with coordinate sum zero lie in the difference basis")
    out, acc = [], Fraction(0)
    for c in v.coords[:-1]:
        acc += c
        out.append(acc)
    return tuple(out)


def _apply_word(moves: Dict[int, IntMatrix], word: Word, v: HomologyVector) -> HomologyVector:
    coords: Sequence[Fraction] = v.coords
    for label in word:
        coords = matvec(moves[label], coords)
    return HomologyVector.of(coords)


def adjacent_difference_certificate(
    vc: VanishingCycle, mono: MonodromyData
) -> Optional[AdjacentCertificate]:
    """
    Certificate that the orbit of a vanishing cycle has rank n - 1.

    Returns None when some adjacent pair {k, k+1} is missing from the orbit
    of the colliding pair, which cannot happen for a 2-transitive group.
    """
    action = PermAction(mono.n, mono.generators)
    orbit = action.pair_orbit(vc.pair, ordered=False)
    moves = dict(_signed_generators(mono))
    words: List[Word] = []
    rows: List[Tuple[Fraction, ...]] = []
    for k in range(mono.n - 1):
        word = orbit.get((k, k + 1))
        if word is None:
            logger.info(f"Adjacent pair {k + 1},{k + 2} is not in the orbit of {vc.pair}")
            return None
        image = _apply_word(moves, word, vc.vector)
        words.append(word)
        rows.append(difference_coordinates(image))
    cert = AdjacentCertificate(tuple(words), tuple(rows), determinant([list(r) for r in rows]))
    if not cert.verify():
        raise NumericInconsistencyError("Adjacent-difference matrix is not the identity mod 2")
    return cert


@dataclass(frozen=True)
class HyperSpanEntry:
    cycle: VanishingCycle
    span_q: OrbitSpan
    span_z2: OrbitSpan
    certificate: Optional[AdjacentCertificate]

    def to_json(self) -> Dict[str, object]:
        return {
            "cycle": self.cycle.to_json(),
            "dimension_q": self.span_q.dimension,
            "dimension_z2": self.span_z2.dimension,
            "words": [list(w) for w in self.span_q.words],
            "adjacent_certificate": self.certificate.to_json() if self.certificate else None,
        }


@dataclass(frozen=True)
class HyperSpanReport:
    """
    Orbit spans of every Morse vanishing cycle of y^2 + f.

    verdict is FullSpan when every span has dimension n - 1, Decomposes when
    some span is smaller and f has a right component, and Partial when a
    smaller span meets an indecomposable f.
    """

    verdict: str
    n: int
    entries: Tuple[HyperSpanEntry, ...]
    loop_matrices: Tuple[Tuple[Tuple[int, ...], ...], ...]
    decompositions: Tuple[Decomposition, ...] = field(default_factory=tuple)

    def to_json(self) -> Dict[str, object]:
        return {
            "verdict": self.verdict,
            "degree": self.n,
            "expected_dimension": self.n - 1,
            "cycles": [e.to_json() for e in self.entries],
            "loop_matrices": [[list(row) for row in m] for m in self.loop_matrices],
            "decompositions": [d.to_json() for d in self.decompositions],
        }


def hyper_span(
    f: RatPoly, mono: Optional[MonodromyData] = None, opts: Optional[TrackOptions] = None
) -> HyperSpanReport:
    mono = mono or compute_monodromy(f, opts=opts)
    matrices = loop_matrices(mono)
    entries: List[HyperSpanEntry] = []
    for vi in range(mono.crit.r):
        for pi, point in enumerate(mono.crit.points_over(vi)):
            if point.multiplicity != 1:
                continue
            vc = vanishing_cycle_data(f, vi, mono, point_index=pi)
            span_q = orbit_span(f, vc.vector, mono, ring="Q")
            span_z2 = orbit_span(f, vc.vector, mono, ring="Z2")
            cert = adjacent_difference_certificate(vc, mono)
            entries.append(HyperSpanEntry(vc, span_q, span_z2, cert))
    if not entries:
        raise InputError(f"y^2 + {f.pretty()} has no Morse point")
    full = all(e.span_q.dimension == mono.n - 1 for e in entries)
    decompositions: Tuple[Decomposition, ...] = ()
    if full:
        verdict = "FullSpan"
    else:
        decompositions = tuple(right_components(f))
        verdict = "Decomposes" if decompositions else "Partial"
        if not decompositions:
            logger.warning(f"Orbit span below {mono.n - 1} for indecomposable f = {f}")
    return HyperSpanReport(
        verdict,
        mono.n,
        tuple(entries),
        tuple(tuple(tuple(row) for row in m) for m in matrices),
        decompositions,
    )


# --- 1-form reduction ---------------------------------------------------------------


@dataclass(frozen=True)
class ReducedForm:
    """omega = A dF + dB + y g(x) dx."""

    A: BiPoly
    B: BiPoly
    g: RatPoly

    def as_form(self, f: RatPoly) -> OneForm:
        return OneForm.relative(self.A, f) + OneForm.exact(self.B) + OneForm.y_times(self.g)

    def to_json(self) -> Dict[str, str]:
        return {"A": str(self.A), "B": str(self.B), "g": str(self.g)}


def reduce_one_form(omega: OneForm, f: RatPoly) -> ReducedForm:
    """
    Bring omega to A dF + dB + y g(x) dx with F = y^2 + f.

    The dy part is a y-derivative and goes into B. For the dx part
    sum a_j(x) y^j dx, each power j >= 2 is lowered with

        a y^j dx = d(A_j y^j) - (j/2) A_j y^(j-2) dF + (j/2) A_j f' y^(j-2) dx,

    where A_j is a primitive of a_j, until only y^0 and y^1 remain; the y^0
    part is exact.
    """
    B_terms: Dict[Tuple[int, int], Fraction] = {}
    for (i, j), c in omega.Q.terms:
        B_terms[(i, j + 1)] = c / (j + 1)
    B = BiPoly.from_dict(B_terms)
    rows = (omega.P - B.dx()).y_coefficients()
    A = BiPoly()
    f_prime = f.derivative()
    top = max(rows, default=-1)
    for j in range(top, 1, -1):
        a_j = rows.pop(j, RatPoly())
        if a_j.is_zero:
            continue
        prim = a_j.integral()
        half_j = Fraction(j, 2)
        B = B + BiPoly.in_x(prim) * BiPoly.y_power(j)
        A = A - BiPoly.in_x(prim * half_j) * BiPoly.y_power(j - 2)
        rows[j - 2] = rows.get(j - 2, RatPoly()) + prim * f_prime * half_j
    B = B + BiPoly.in_x(rows.get(0, RatPoly()).integral())
    return ReducedForm(A, B, rows.get(1, RatPoly()))


def verify_reduction(omega: OneForm, f: RatPoly, reduced: ReducedForm) -> bool:
    return (omega - reduced.as_form(f)).is_zero


# --- tangential centers of y^2 + f ----------------------------------------------------


def _shift_x(p: BiPoly, c: Fraction) -> BiPoly:
    """p(x + c, y)."""
    moved = RatPoly((c, Fraction(1)))
    return BiPoly.from_y_coefficients({j: row.compose(moved) for j, row in p.y_coefficients().items()})


def _truncate(p: RatPoly, order: int) -> RatPoly:
    return RatPoly(p.coeffs[: order + 1])


def _compose_truncated(outer: RatPoly, inner: RatPoly, order: int) -> RatPoly:
    result = RatPoly()
    for c in reversed(outer.coeffs):
        result = _truncate(result * inner + c, order)
    return result


def local_involution(f_s: RatPoly, order: int) -> RatPoly:
    """
    sigma = -x + O(x^2) with f_s(sigma(x)) = f_s(x) up to x^(order+1).

    f_s must be a x^2 + O(x^3) with a != 0. Coefficient s_k is fixed by the
    x^(k+1) coefficient of f_s(sigma) - f_s.
    """
    a = f_s.coeff(2)
    if f_s.coeff(0) != 0 or f_s.coeff(1) != 0 or a == 0:
        raise InputError(f"{f_s} does not have a Morse point at the origin")
    sigma = RatPoly((Fraction(0), Fraction(-1)))
    for k in range(2, order + 1):
        gap = _compose_truncated(f_s, sigma, k + 1) - _truncate(f_s, k + 1)
        s_k = gap.coeff(k + 1) / (2 * a)
        sigma = sigma + RatPoly.monomial(k, s_k)
    return sigma


def _fiberwise_primitive(phi: RatPoly, f: RatPoly) -> Tuple[BiPoly, BiPoly]:
    """
    (A, B) with y phi(f) f' dx = A dF + dB.

    Psi(F, y) = integral from 0 to y of -2 s^2 phi(F - s^2) ds gives
    B = Psi(y^2 + f, y) and A = y phi(f) - dPsi/dF(y^2 + f, y).
    """
    F = hamiltonian(f)
    psi = BiPoly()
    psi_F = BiPoly()
    # phi(F - s^2) expanded binomially in F and s^2, integrated term by term in s
    for m, coeff in enumerate(phi.coeffs):
        if coeff == 0:
            continue
        for i in range(m + 1):
            scale = -2 * coeff * comb(m, i) * (-1) ** i / Fraction(2 * i + 3)
            y_part = BiPoly.y_power(2 * i + 3, scale)
            psi = psi + y_part * F ** (m - i)
            # dPsi/dF
            if m - i > 0:
                psi_F = psi_F + y_part * F ** (m - i - 1) * (m - i)
    A = BiPoly.in_x(phi.compose(f)) * BiPoly.y_power(1) - psi_F
    return A, psi


@dataclass(frozen=True)
class HyperCenterCertificate:
    """
    RelativelyExact with (A, B), Decomposes with (h, g, r), or
    NoTangentialCenter with nonzero periods near the Morse point.
    """

    verdict: str
    morse_point: Fraction
    reduced: ReducedForm
    A: Optional[BiPoly] = None
    B: Optional[BiPoly] = None
    h: Optional[RatPoly] = None
    g: Optional[RatPoly] = None
    r: Optional[RatPoly] = None
    series_order: int = 0
    witness: Tuple[Tuple[complex, complex], ...] = ()

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "verdict": self.verdict,
            "morse_point": fraction_str(self.morse_point),
            "reduced": self.reduced.to_json(),
        }
        if self.verdict == "RelativelyExact":
            out.update({"A": str(self.A), "B": str(self.B)})
        elif self.verdict == "Decomposes":
            out.update({"h": str(self.h), "g": str(self.g), "r": str(self.r), "series_order": self.series_order})
        else:
            out["witness"] = [{"t": complex_pair(t), "period": complex_pair(v)} for t, v in self.witness]
        return out


def _morse_point(f: RatPoly, morse: Optional[Fraction]) -> Fraction:
    c = Fraction(0) if morse is None else Fraction(morse)
    df = f.derivative()
    if df(c) != 0:
        hint = "" if morse is not None else "; pass the Morse point explicitly"
        raise InputError(f"x = {fraction_str(c)} is not a critical point of f{hint}")
    if df.derivative()(c) == 0:
        raise InputError(f"Critical point x = {fraction_str(c)} of f is not Morse")
    return c


def _witness_periods(
    f_s: RatPoly, omega_s: OneForm, quadrature: Optional[QuadratureSettings]
) -> List[Tuple[complex, complex]]:
    """Periods over the cycle vanishing at the origin, at three small t."""
    crit = critical_data(f_s)
    others = [abs(v) for v in crit.values if abs(v) > 1e-12]
    eps = 0.25 * min([1.0] + others)
    out = []
    fc = f_s.to_cpoly()
    for angle in WITNESS_ANGLES:
        t = eps * cmath.exp(1j * angle)
        roots = numeric_roots(fc.shifted(t))
        near = sorted(roots, key=abs)[:2]
        out.append((t, period_integral(f_s, t, (complex(near[0]), complex(near[1])), omega_s, quadrature)))
    return out


def hyper_center_test(
    f: RatPoly,
    omega: OneForm,
    morse: Optional[Fraction] = None,
    quadrature: Optional[QuadratureSettings] = None,
    tolerances: Optional[Tolerances] = None,
) -> HyperCenterCertificate:
    """
    Decide whether the periods of omega vanish on the cycle of a Morse point of y^2 + f.

    Works in coordinates where the Morse point is the origin. After the
    reduction omega = A dF + dB + y k(x) dx the periods vanish identically
    exactly when K = integral of 2k is a polynomial in a right component h
    of f that is invariant under the local involution sigma of the Morse
    point. K a polynomial in f itself means omega is relatively exact, and
    explicit A, B are returned.

    Raises:
        InputError: the Morse point is not a rational Morse critical point.
        NumericInconsistencyError: no certificate, yet the periods vanish
            numerically.
    """
    tol = tolerances or Tolerances()
    c = _morse_point(f, morse)
    moved = RatPoly((c, Fraction(1)))
    back = RatPoly((-c, Fraction(1)))
    f_c = f(c)
    f_s = f.compose(moved) - f_c
    omega_s = OneForm(_shift_x(omega.P, c), _shift_x(omega.Q, c))
    reduced = reduce_one_form(omega, f)
    red_s = reduce_one_form(omega_s, f_s)
    k = red_s.g

    if k.is_zero:
        logger.info("hyper_center_test: reduction leaves no y g dx part")
        return HyperCenterCertificate(
            "RelativelyExact", c, reduced, A=_shift_x(red_s.A, -c), B=_shift_x(red_s.B, -c)
        )

    K = (k * 2).integral()
    Phi = h_adic_expansion(K, f_s)
    if Phi is not None:
        A_k, B_k = _fiberwise_primitive(Phi.derivative() * Fraction(1, 2), f_s)
        A = _shift_x(red_s.A + A_k, -c)
        B = _shift_x(red_s.B + B_k, -c)
        if not (omega - OneForm.relative(A, f) - OneForm.exact(B)).is_zero:
            raise NumericInconsistencyError("Relative exactness certificate failed to verify")
        logger.info("hyper_center_test: form is relatively exact")
        return HyperCenterCertificate("RelativelyExact", c, reduced, A=A, B=B)

    order = K.degree * f.degree + 1
    sigma = local_involution(f_s, order)
    for comp in right_components(f_s):
        h = comp.h
        if _compose_truncated(h, sigma, order) != _truncate(h, order):
            continue
        r = h_adic_expansion(K, h)
        if r is None:
            continue
        logger.info(f"hyper_center_test: tangential center through h = {h.pretty()}")
        return HyperCenterCertificate(
            "Decomposes", c, reduced, h=h.compose(back), g=comp.g + f_c, r=r, series_order=order
        )

    witness = _witness_periods(f_s, omega_s, quadrature)
    if all(abs(v) < tol.period_vanish_tol for _, v in witness):
        logger.error("Periods vanish numerically but no certificate was found")
        raise NumericInconsistencyError(
            f"Periods of omega vanish at {len(witness)} samples without a decomposition over Q"
        )
    return HyperCenterCertificate("NoTangentialCenter", c, reduced, series_order=order, witness=tuple(witness))


def verify_hyper_certificate(
    f: RatPoly,
    omega: OneForm,
    cert: HyperCenterCertificate,
    quadrature: Optional[QuadratureSettings] = None,
    tolerances: Optional[Tolerances] = None,
) -> bool:
    """Re-check a hyper_center_test certificate from scratch."""
    tol = tolerances or Tolerances()
    if not verify_reduction(omega, f, cert.reduced):
        return False
    if cert.verdict == "RelativelyExact":
        assert cert.A is not None and cert.B is not None
        return (omega - OneForm.relative(cert.A, f) - OneForm.exact(cert.B)).is_zero
    c = cert.morse_point
    k = reduce_one_form(
        OneForm(_shift_x(omega.P, c), _shift_x(omega.Q, c)),
        f.compose(RatPoly((c, Fraction(1)))) - f(c),
    ).g
    K = (k * 2).integral()
    if cert.verdict == "Decomposes":
        assert cert.h is not None and cert.g is not None and cert.r is not None
        h_s = cert.h.compose(RatPoly((c, Fraction(1))))
        return compose(cert.g, cert.h) == f and compose(cert.r, h_s) == K
    f_s = f.compose(RatPoly((c, Fraction(1)))) - f(c)
    omega_s = OneForm(_shift_x(omega.P, c), _shift_x(omega.Q, c))
    values = [v for _, v in _witness_periods(f_s, omega_s, quadrature)]
    return any(abs(v) >= tol.period_vanish_tol for v in values)
