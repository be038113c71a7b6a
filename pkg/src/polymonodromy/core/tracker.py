"""
Continuation of the roots of f(x) = t along polygonal paths in the t-plane.

Roots are ranked by decreasing imaginary part, ties by increasing real part.
Every change of that ranking along a path is recorded as a signed letter:
+i when the roots in ranks i and i+1 (1-based) exchange counterclockwise
(the rising root lies to the right), -i when they exchange clockwise.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from polymonodromy.core.errors import (
    DegenerateInputError,
    DegeneratePathError,
    InputError,
    TrackingError,
)
from polymonodromy.core.permlab import Permutation
from polymonodromy.core.polycore import (
    CPoly,
    CriticalData,
    DEFAULT_CLUSTER_TOL,
    RatPoly,
    critical_data,
    numeric_roots,
)
from polymonodromy.core.utils import complex_pair

logger = logging.getLogger(__name__)

FIBER_RESIDUAL_TOL = 1e-10
POLYGON_SIDES = 16
BIG_LOOP_SIDES = 64
NEWTON_ITERATIONS = 8
SIMULTANEITY_TOL = 1e-3
CROSSING_RESOLUTION = 1e-3
BASEPOINT_CANDIDATES = 96
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class TrackOptions:
    """Step control for predictor-corrector continuation.

    Steps are measured in the parameter s in [0, 1] of each path segment.
    collision_guard is relative to the root spread at the start of a path.
    """

    initial_step: float = 0.05
    max_step: float = 0.25
    min_step: float = 1e-9
    corrector_tol: float = 1e-10
    collision_guard: float = 1e-6

    def validate(self) -> None:
        if not (0 < self.min_step <= self.initial_step <= self.max_step):
            raise InputError(
                "Tracking steps must satisfy 0 < min_step <= initial_step <= max_step, "
                f"got {self.min_step}, {self.initial_step}, {self.max_step}"
            )
        if self.corrector_tol <= 0:
            raise InputError(f"corrector_tol must be positive, got {self.corrector_tol}")
        if self.collision_guard <= 0:
            raise InputError(f"collision_guard must be positive, got {self.collision_guard}")

    def halved(self) -> "TrackOptions":
        """Options with every step size halved, used for cross-checking."""
        return TrackOptions(
            initial_step=self.initial_step / 2,
            max_step=self.max_step / 2,
            min_step=min(self.min_step, self.initial_step / 2),
            corrector_tol=self.corrector_tol,
            collision_guard=self.collision_guard,
        )


# --- ordering helpers ---------------------------------------------------------


def rank_order(roots: Sequence[complex]) -> List[int]:
    """Indices of roots by decreasing imaginary part, ties by increasing real part."""
    return sorted(range(len(roots)), key=lambda k: (-roots[k].imag, roots[k].real))


def pairwise_distances(roots: np.ndarray) -> np.ndarray:
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    return d


def root_spread(roots: np.ndarray) -> float:
    if len(roots) < 2:
        return 1.0
    d = np.abs(roots[:, None] - roots[None, :])
    return float(np.max(d))


def segment_distance(p: complex, a: complex, b: complex) -> float:
    """Euclidean distance from p to the segment [a, b]."""
    ab = b - a
    if ab == 0:
        return abs(p - a)
    s = ((p - a) * ab.conjugate()).real / abs(ab) ** 2
    s = min(1.0, max(0.0, s))
    return abs(p - (a + s * ab))


def solve_fiber(f: CPoly, t: complex, collision_guard: float = 1e-6) -> np.ndarray:
    """
    All roots of f(x) = t, in rank order.

    Raises:
        TrackingError: a root fails the residual bound.
        DegenerateInputError: two roots lie within collision_guard times the
            root spread, i.e. t is too close to a critical value.
    """
    g = f.shifted(t)
    roots = numeric_roots(g)
    res = g.residual(roots)
    if len(roots) and float(np.max(res)) > FIBER_RESIDUAL_TOL:
        logger.error(f"Fiber at t={t} did not converge, residual {float(np.max(res)):.3e}")
        raise TrackingError(f"Root finder did not converge on the fiber over t={t}")
    spread = root_spread(roots)
    if len(roots) > 1 and float(np.min(pairwise_distances(roots))) <= collision_guard * spread:
        raise DegenerateInputError(f"t={t} is too close to a critical value of f")
    return roots[rank_order(list(roots))]


# --- loops ---------------------------------------------------------------------


@dataclass(frozen=True)
class LoopPath:
    """A closed polyline based at `basepoint`, avoiding the critical values."""

    basepoint: complex
    vertices: Tuple[complex, ...]
    min_sigma_distance: float
    critical_value_index: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.vertices) < 2 or self.vertices[0] != self.vertices[-1]:
            raise InputError("Loop vertices must form a closed polyline")
        if self.vertices[0] != self.basepoint:
            raise InputError("Loop must start at its basepoint")

    @property
    def is_big_loop(self) -> bool:
        return self.critical_value_index is None

    def reversed(self) -> "LoopPath":
        return LoopPath(
            self.basepoint,
            tuple(reversed(self.vertices)),
            self.min_sigma_distance,
            self.critical_value_index,
        )

    def to_json(self) -> Dict[str, List]:
        return {
            "basepoint": complex_pair(self.basepoint),
            "vertices": [complex_pair(v) for v in self.vertices],
        }

    @classmethod
    def from_json(cls, data: Dict, sigma: Sequence[complex]) -> "LoopPath":
        base = complex(*data["basepoint"])
        verts = tuple(complex(*v) for v in data["vertices"])
        return cls(base, verts, path_sigma_distance(verts, sigma))


def path_sigma_distance(vertices: Sequence[complex], sigma: Sequence[complex]) -> float:
    if not sigma:
        return math.inf
    return min(
        segment_distance(t, a, b)
        for a, b in zip(vertices[:-1], vertices[1:])
        for t in sigma
    )


def _radii(values: Sequence[complex], basepoint: complex) -> List[float]:
    radii = []
    for i, t in enumerate(values):
        others = [abs(t - s) for j, s in enumerate(values) if j != i]
        rho = 0.5 * abs(t - basepoint)
        if others:
            rho = min(rho, 0.5 * min(others))
        radii.append(rho)
    return radii


def _approach_point(t: complex, rho: float, basepoint: complex) -> complex:
    u = (basepoint - t) / abs(basepoint - t)
    return t + rho * u


def approach(values: Sequence[complex], index: int, basepoint: complex) -> Tuple[complex, float]:
    """Entry point and radius of the small loop around values[index]."""
    rho = _radii(values, basepoint)[index]
    return _approach_point(values[index], rho, basepoint), rho


def _approach_blocker(
    values: Sequence[complex], radii: Sequence[float], basepoint: complex
) -> Optional[Tuple[int, int]]:
    """First (i, j) whose approach segment to t_i enters the disk around t_j."""
    for i, t in enumerate(values):
        a = _approach_point(t, radii[i], basepoint)
        for j, s in enumerate(values):
            if j != i and segment_distance(s, basepoint, a) <= radii[j]:
                return i, j
    return None


def _guard_radius(values: Sequence[complex], opts: TrackOptions) -> float:
    return opts.collision_guard * max([1.0] + [abs(t) for t in values])


def loop_basis(
    f: RatPoly,
    basepoint: complex,
    crit: Optional[CriticalData] = None,
    opts: Optional[TrackOptions] = None,
) -> List[LoopPath]:
    """
    One small counterclockwise loop per critical value plus a loop at infinity.

    Small loops go straight toward t_i, run once around a regular 16-gon of
    radius rho_i and come back; they are ordered by arg(t_i - basepoint), ties
    by modulus. The loop at infinity is last: a 64-gon of radius
    2*max|t_i| + 1 entered along the spoke farthest from the critical values.

    Raises:
        InputError: basepoint within the collision guard of a critical value, or
            an approach segment that passes through the disk of another loop.
    """
    opts = opts or TrackOptions()
    crit = crit or critical_data(f)
    values = list(crit.values)
    guard = _guard_radius(values, opts)
    for i, t in enumerate(values):
        if abs(basepoint - t) <= guard:
            raise InputError(
                f"Basepoint {basepoint} lies within the collision guard of critical value {t}"
            )
    radii = _radii(values, basepoint)
    blocked = _approach_blocker(values, radii, basepoint)
    if blocked is not None:
        i, j = blocked
        raise InputError(
            f"Straight approach from {basepoint} to {values[i]} passes too close to "
            f"{values[j]}; choose another basepoint"
        )

    order = sorted(
        range(len(values)),
        key=lambda i: (cmath.phase(values[i] - basepoint), abs(values[i] - basepoint)),
    )
    loops: List[LoopPath] = []
    for i in order:
        t, rho = values[i], radii[i]
        a = _approach_point(t, rho, basepoint)
        u = a - t
        ring = [t + u * cmath.exp(2j * math.pi * k / POLYGON_SIDES) for k in range(1, POLYGON_SIDES)]
        verts = tuple([basepoint, a] + ring + [a, basepoint])
        loops.append(LoopPath(basepoint, verts, path_sigma_distance(verts, values), i))

    radius = 2.0 * crit.max_abs_value + 1.0
    spokes = [radius * cmath.exp(2j * math.pi * k / BIG_LOOP_SIDES) for k in range(BIG_LOOP_SIDES)]
    clearance = [min(segment_distance(t, basepoint, s) for t in values) for s in spokes]
    start = int(np.argmax(clearance))
    ring = [spokes[(start + k) % BIG_LOOP_SIDES] for k in range(BIG_LOOP_SIDES + 1)]
    verts = tuple([basepoint] + ring + [basepoint])
    loops.append(LoopPath(basepoint, verts, path_sigma_distance(verts, values), None))
    logger.debug(f"loop_basis: {len(loops) - 1} small loops around {values}")
    return loops


def choose_basepoint(
    f: RatPoly, crit: Optional[CriticalData] = None, opts: Optional[TrackOptions] = None
) -> complex:
    """
    Deterministic generic basepoint.

    Candidates spiral around the centroid of the critical values; the first
    one that keeps clear of every critical value, whose straight approaches
    do not cross other loops, and whose fiber has well separated imaginary
    parts is returned.

    Raises:
        DegenerateInputError: no candidate qualifies.
    """
    opts = opts or TrackOptions()
    crit = crit or critical_data(f)
    values = list(crit.values)
    scale = max([1.0] + [abs(t) for t in values])
    center = complex(np.mean(values)) if values else 0j
    gaps = [abs(a - b) for i, a in enumerate(values) for b in values[i + 1:]]
    min_gap = min(gaps) if gaps else scale
    fc = f.to_cpoly()

    for k in range(BASEPOINT_CANDIDATES):
        radius = scale * (0.3 + 0.7 * ((0.618034 * (k + 1)) % 1.0))
        b = center + radius * cmath.exp(1j * (0.4 + GOLDEN_ANGLE * k))
        if min(abs(b - t) for t in values) < 0.25 * min_gap:
            continue
        if _approach_blocker(values, _radii(values, b), b) is not None:
            continue
        try:
            fiber = solve_fiber(fc, b, opts.collision_guard)
        except (TrackingError, InputError):
            continue
        im_gap = float(np.min(np.abs(np.diff(fiber.imag))))
        if im_gap <= 1e-6 * root_spread(fiber):
            continue
        logger.info(f"Chose basepoint {b:.6g} after {k + 1} candidate(s)")
        return b
    raise DegenerateInputError(f"No generic basepoint found for f = {f}")


# --- continuation ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PathResult:
    """Outcome of continuing a root tuple along an open polyline."""

    roots: np.ndarray
    swap_word: Tuple[int, ...]
    order: Tuple[int, ...]
    step_count: int
    rejected_steps: int


@dataclass(frozen=True, eq=False)
class TrackResult:
    """Outcome of continuing the basepoint fiber once around a loop."""

    permutation: Permutation
    swap_word: Tuple[int, ...]
    step_count: int
    rejected_steps: int = 0
    final_roots: np.ndarray = field(default_factory=lambda: np.array([], dtype=complex))

    def to_json(self) -> Dict[str, object]:
        return {
            "permutation": self.permutation.one_line(),
            "swap_word": list(self.swap_word),
            "step_count": self.step_count,
        }


def _newton(
    f: CPoly, df: CPoly, x: np.ndarray, t: complex, tol: float
) -> Optional[np.ndarray]:
    g = f.shifted(t)
    for _ in range(NEWTON_ITERATIONS):
        d = df(x)
        if np.any(d == 0):
            return None
        dx = g(x) / d
        x = x - dx
        if float(np.max(np.abs(dx) / np.maximum(1.0, np.abs(x)))) < tol:
            return x
    return None


RootsAt = Callable[[float], Optional[np.ndarray]]


def _roots_between(
    f: CPoly,
    df: CPoly,
    x0: np.ndarray,
    x1: np.ndarray,
    ta: complex,
    tb: complex,
    tol: float,
    near: np.ndarray,
) -> RootsAt:
    """Corrected fiber at fraction u of the step from ta to tb."""

    def at(u: float) -> Optional[np.ndarray]:
        guess = x0 + u * (x1 - x0)
        x = _newton(f, df, guess, ta + u * (tb - ta), tol)
        # a correction that jumps to a neighbour loses root identity
        if x is None or not np.all(np.abs(x - guess) < 0.2 * near):
            return None
        return x

    return at


def _bisect_crossing(a: int, b: int, at: RootsAt) -> Optional[Tuple[float, np.ndarray]]:
    """Step fraction where Im(x_a - x_b) changes sign, and the fiber there.

    Root a ranks above root b at the start of the step.
    """
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        x_mid = at(mid)
        if x_mid is None:
            return None
        if hi - lo < CROSSING_RESOLUTION:
            return mid, x_mid
        if (x_mid[a] - x_mid[b]).imag > 0:
            lo = mid
        else:
            hi = mid


def _crossing_letters(
    x0: np.ndarray,
    x1: np.ndarray,
    order: List[int],
    at: Optional[RootsAt] = None,
) -> Optional[Tuple[List[int], List[int]]]:
    """
    Signed letters for the rank changes between two consecutive samples.

    Each crossing is located by bisection on the sign of Im(x_a - x_b) until
    the bracket is below CROSSING_RESOLUTION of the step, evaluating the
    fiber through `at` (linear interpolation when omitted). Crossings are
    then applied as adjacent transpositions, earliest first, each signed by
    the corrected roots at its own crossing. Returns None when a correction
    fails or the sequence cannot be realized without reordering events by
    more than SIMULTANEITY_TOL of the step; both ask the caller for a
    smaller step.
    """
    target = rank_order(list(x1))
    if target == order:
        return [], order
    def linear(u: float) -> Optional[np.ndarray]:
        return x0 + u * (x1 - x0)

    locate = at or linear
    rank_before = {k: r for r, k in enumerate(order)}
    rank_after = {k: r for r, k in enumerate(target)}
    pending: Dict[Tuple[int, int], Tuple[float, np.ndarray]] = {}
    for a in range(len(x0)):
        for b in range(len(x0)):
            if rank_before[a] < rank_before[b] and rank_after[a] > rank_after[b]:
                located = _bisect_crossing(a, b, locate)
                if located is None:
                    return None
                pending[(a, b)] = located

    current = list(order)
    letters: List[int] = []
    while pending:
        candidates = [
            (pending[(current[r], current[r + 1])][0], r)
            for r in range(len(current) - 1)
            if (current[r], current[r + 1]) in pending
        ]
        if not candidates:
            return None
        s, r = min(candidates)
        if s - min(p[0] for p in pending.values()) > SIMULTANEITY_TOL:
            return None
        upper, lower = current[r], current[r + 1]
        fiber = pending.pop((upper, lower))[1]
        # the lower root rises; counterclockwise when it passes on the right
        letters.append(r + 1 if fiber[lower].real > fiber[upper].real else -(r + 1))
        current[r], current[r + 1] = lower, upper
    if current != target:
        return None
    return letters, current


def _snap(roots: np.ndarray, targets: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(targets))))
    out = np.array(roots, dtype=complex)
    for k, x in enumerate(roots):
        j = int(np.argmin(np.abs(targets - x)))
        if abs(targets[j] - x) <= 1e-8 * scale:
            out[k] = targets[j]
    return out


def track_path(
    f: CPoly,
    start_roots: np.ndarray,
    vertices: Sequence[complex],
    opts: TrackOptions,
    guard_abs: Optional[float] = None,
    end_roots: Optional[np.ndarray] = None,
) -> PathResult:
    """
    Continue every root of f(x) = vertices[0] along the polyline.

    Root k of the result is the continuation of start_roots[k].

    Args:
        f: The polynomial.
        start_roots: The fiber over vertices[0], any order.
        vertices: Polyline in the t-plane.
        opts: Step control.
        guard_abs: Absolute collision distance; defaults to
            opts.collision_guard times the spread of start_roots.
        end_roots: Known fiber over the last vertex. Arriving roots are
            snapped onto it so ties in the ranking resolve exactly as there.

    Raises:
        DegeneratePathError: the step size fell below opts.min_step.
        TrackingError: two roots came within the collision guard.
    """
    roots = np.array(start_roots, dtype=complex)
    order = rank_order(list(roots))
    if guard_abs is None:
        guard_abs = opts.collision_guard * root_spread(roots)
    df = f.derivative()
    word: List[int] = []
    steps = rejected = 0
    h = opts.initial_step

    last_segment = len(vertices) - 2
    for seg, (t0, t1) in enumerate(zip(vertices[:-1], vertices[1:])):
        delta = t1 - t0
        if delta == 0:
            continue
        s = 0.0
        while s < 1.0:
            h_eff = min(h, 1.0 - s)
            s_new = s + h_eff
            t_new = t1 if s_new >= 1.0 else t0 + s_new * delta
            near = np.min(pairwise_distances(roots), axis=1) if len(roots) > 1 else np.array([np.inf])
            predicted = roots + (h_eff * delta) / df(roots)
            corrected = _newton(f, df, predicted, t_new, opts.corrector_tol)
            if corrected is not None and end_roots is not None and seg == last_segment and s_new >= 1.0:
                corrected = _snap(corrected, end_roots)
            outcome = None
            if corrected is not None and np.all(np.abs(corrected - predicted) < 0.2 * near):
                if len(corrected) > 1 and float(np.min(pairwise_distances(corrected))) < guard_abs:
                    logger.error(f"Roots collided near t={t_new}")
                    raise TrackingError(
                        f"Path passes too close to a critical value near t={t_new}; "
                        "perturb the loop"
                    )
                at = _roots_between(
                    f, df, roots, corrected, t0 + s * delta, t_new, opts.corrector_tol, near
                )
                outcome = _crossing_letters(roots, corrected, order, at)
            if outcome is None or corrected is None:
                rejected += 1
                h = h_eff / 2
                if h < opts.min_step:
                    logger.error(f"Step underflow at t={t0 + s * delta}")
                    raise DegeneratePathError(
                        f"Step size fell below {opts.min_step} near t={t0 + s * delta}; "
                        "perturb the basepoint or loop"
                    )
                continue
            letters, order = outcome
            word.extend(letters)
            roots = corrected
            s = 1.0 if s_new >= 1.0 else s_new
            steps += 1
            if h_eff == h:
                h = min(1.5 * h, opts.max_step)

    return PathResult(roots, tuple(word), tuple(order), steps, rejected)


def track_loop(f: CPoly, loop: LoopPath, opts: TrackOptions) -> TrackResult:
    """
    Continue the basepoint fiber once around `loop`.

    The permutation sends k to the index (in the basepoint fiber) of the
    point where root k arrives. It is derived twice, from the final positions
    and from the swap word, and the two must agree.

    Raises:
        TrackingError: the endpoints do not match the fiber or disagree with
            the swap word.
    """
    fiber = solve_fiber(f, loop.basepoint, opts.collision_guard)
    result = track_path(f, fiber, loop.vertices, opts, end_roots=fiber)
    scale = max(1.0, float(np.max(np.abs(fiber))))
    tol = max(10 * opts.corrector_tol * scale, 1e-9 * scale)
    dist = np.abs(result.roots[:, None] - fiber[None, :])
    images = [int(np.argmin(row)) for row in dist]
    if sorted(images) != list(range(len(fiber))) or any(
        dist[k, images[k]] > tol for k in range(len(fiber))
    ):
        logger.error(f"Loop endpoints do not match the fiber (max gap {float(np.max(np.min(dist, axis=1))):.3e})")
        raise TrackingError("Tracked roots did not return to the basepoint fiber")
    perm = Permutation(tuple(images))
    # rank r at the end holds root order[r], which sits at fiber index r
    if list(perm.inverse().images) != list(result.order):
        raise TrackingError("Swap word disagrees with the tracked permutation")
    return TrackResult(perm, result.swap_word, result.step_count, result.rejected_steps, result.roots)


@dataclass(frozen=True, eq=False)
class MonodromyData:
    """Basepoint, fiber, loop basis and the tracked action of every loop."""

    f: RatPoly
    basepoint: complex
    fiber: np.ndarray
    crit: CriticalData
    loops: Tuple[LoopPath, ...]
    results: Tuple[TrackResult, ...]
    big_loop: LoopPath
    big_result: TrackResult
    opts: TrackOptions

    @property
    def n(self) -> int:
        return self.f.degree

    @property
    def generators(self) -> List[Permutation]:
        return [r.permutation for r in self.results]

    def loop_for_value(self, value_index: int) -> int:
        """Position in `loops` of the small loop around critical value `value_index`."""
        for pos, loop in enumerate(self.loops):
            if loop.critical_value_index == value_index:
                return pos
        raise InputError(f"No loop around critical value {value_index}")

    @property
    def ramification_total(self) -> int:
        """Sum of n - #cycles over the small loops; n - 1 for any polynomial."""
        return sum(self.n - len(r.permutation.cycles()) for r in self.results)

    def to_json(self, include_paths: bool = False) -> Dict[str, object]:
        loops = []
        for loop, result in zip(self.loops, self.results):
            assert loop.critical_value_index is not None
            entry: Dict[str, object] = {
                "critical_value": complex_pair(self.crit.values[loop.critical_value_index]),
                "critical_value_index": loop.critical_value_index + 1,
                **result.to_json(),
            }
            if include_paths:
                entry["path"] = loop.to_json()["vertices"]
            loops.append(entry)
        return {
            "degree": self.n,
            "basepoint": complex_pair(self.basepoint),
            "fiber": [complex_pair(z) for z in self.fiber],
            "loops": loops,
            "big_loop": self.big_result.to_json(),
            "ramification_total": self.ramification_total,
        }


def compute_monodromy(
    f: RatPoly,
    basepoint: Optional[complex] = None,
    opts: Optional[TrackOptions] = None,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> MonodromyData:
    """
    Track the loop basis of f and check it against the loop at infinity.

    The small-loop permutations composed in loop order must have the cycle
    type of the big loop, which must be a single n-cycle.

    Raises:
        InputError: degree below 2 or unusable basepoint.
        TrackingError: any tracking failure or failed consistency check.
    """
    if f.degree < 2:
        raise InputError(f"Monodromy needs degree >= 2, got {f.degree}")
    opts = opts or TrackOptions()
    opts.validate()
    crit = critical_data(f, cluster_tol)
    base = basepoint if basepoint is not None else choose_basepoint(f, crit, opts)
    fc = f.to_cpoly()
    fiber = solve_fiber(fc, base, opts.collision_guard)
    all_loops = loop_basis(f, base, crit, opts)
    small, big = all_loops[:-1], all_loops[-1]

    results = tuple(track_loop(fc, loop, opts) for loop in small)
    big_result = track_loop(fc, big, opts)
    logger.info(
        f"Tracked {len(small)} loops for f = {f}: "
        f"{sum(r.step_count for r in results) + big_result.step_count} steps"
    )

    n = f.degree
    if big_result.permutation.cycle_type() != (n,):
        raise TrackingError(
            f"Loop at infinity gave cycle type {big_result.permutation.cycle_type()}, not an {n}-cycle"
        )
    product = Permutation.identity(n)
    for r in results:
        product = product.then(r.permutation)
    if product.cycle_type() != big_result.permutation.cycle_type():
        raise TrackingError("Product of the small loops is not conjugate to the loop at infinity")

    return MonodromyData(f, base, fiber, crit, tuple(small), results, big, big_result, opts)
