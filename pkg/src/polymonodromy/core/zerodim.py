"""
0-cycles on the fibers of f, their Abelian integrals I(t) = sum n_i w(x_i(t)),
and the two decisions built on them: whether I vanishes identically for a
simple cycle (tangential center) and whether the monodromy orbit of a simple
cycle spans the reduced homology of the fiber.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from polymonodromy.core.config import Tolerances
from polymonodromy.core.decompose import (
    Decomposition,
    fiber_partition,
    h_adic_expansion,
    right_components,
)
from polymonodromy.core.errors import InputError, NumericInconsistencyError
from polymonodromy.core.linalg import rank
from polymonodromy.core.permlab import PermAction, Word
from polymonodromy.core.polycore import RatPoly, compose, critical_data
from polymonodromy.core.tracker import (
    MonodromyData,
    TrackOptions,
    choose_basepoint,
    compute_monodromy,
    segment_distance,
    solve_fiber,
    track_path,
)

logger = logging.getLogger(__name__)

Weight = Union[Fraction, complex]
WITNESS_SAMPLES = 40
VERIFY_SAMPLES = 20


@dataclass(frozen=True)
class ZeroCycle:
    """sum n_i x_i(t) over basepoint fiber indices, with sum n_i = 0."""

    weights: Dict[int, Weight]

    def __post_init__(self) -> None:
        if not any(w != 0 for w in self.weights.values()):
            raise InputError("A 0-cycle needs a nonzero weight")
        total = sum(self.weights.values())
        if abs(complex(total)) > 1e-12:
            raise InputError(f"0-cycle weights must sum to zero, got {total}")

    @classmethod
    def simple(cls, i: int, j: int) -> "ZeroCycle":
        return cls({i: Fraction(1), j: Fraction(-1)})

    def vector(self, n: int) -> List[Weight]:
        return [self.weights.get(k, Fraction(0)) for k in range(n)]


@dataclass(frozen=True)
class SimpleCycle:
    """x_i(t) - x_j(t), indices into the basepoint fiber."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise InputError("A simple cycle needs two different roots")

    def cycle(self) -> ZeroCycle:
        return ZeroCycle.simple(self.i, self.j)

    def check(self, n: int) -> None:
        if not (0 <= self.i < n and 0 <= self.j < n):
            raise InputError(f"Cycle indices {self.i + 1},{self.j + 1} outside 1..{n}")

    def to_json(self) -> List[int]:
        return [self.i + 1, self.j + 1]


# --- evaluation ---------------------------------------------------------------


def detoured_path(
    start: complex, end: complex, sigma: Sequence[complex], margin: float
) -> List[complex]:
    """
    Straight path with a left-hand detour around each critical value near it.

    Raises:
        InputError: an endpoint sits on a critical value.
    """
    length = abs(end - start)
    if length == 0:
        return [start, end]
    u = (end - start) / length
    normal = 1j * u
    near: List[Tuple[float, complex, float]] = []
    for c in sigma:
        local = min(margin, 0.5 * abs(c - start), 0.5 * abs(c - end))
        if local <= 1e-12 * max(1.0, abs(c)):
            raise InputError(f"Path endpoint {start} or {end} lies on critical value {c}")
        if segment_distance(c, start, end) < local:
            proj = ((c - start) * u.conjugate()).real
            near.append((proj, c, local))
    verts = [start]
    for _, c, local in sorted(near, key=lambda item: item[0]):
        verts.append(c + 2 * local * normal)
    verts.append(end)
    return verts


def _margin(sigma: Sequence[complex]) -> float:
    scale = max([1.0] + [abs(t) for t in sigma])
    gaps = [abs(a - b) for k, a in enumerate(sigma) for b in sigma[k + 1:]]
    return 0.25 * (min(gaps) if gaps else scale)


def eval_zero_integral(
    f: RatPoly,
    omega: RatPoly,
    delta: ZeroCycle,
    t_samples: Sequence[complex],
    basepoint: Optional[complex] = None,
    opts: Optional[TrackOptions] = None,
) -> List[complex]:
    """
    Values of sum n_i omega(x_i(t)) at each sample.

    Roots are continued from the basepoint fiber along straight segments,
    detoured around critical values, so the labels x_i stay those of the
    basepoint.
    """
    opts = opts or TrackOptions()
    crit = critical_data(f)
    sigma = list(crit.values)
    base = basepoint if basepoint is not None else choose_basepoint(f, crit, opts)
    fc = f.to_cpoly()
    fiber = solve_fiber(fc, base, opts.collision_guard)
    for k in delta.weights:
        if not 0 <= k < len(fiber):
            raise InputError(f"0-cycle index {k + 1} outside 1..{len(fiber)}")
    margin = _margin(sigma)
    values = []
    for t in t_samples:
        path = detoured_path(base, complex(t), sigma, margin)
        roots = track_path(fc, fiber, path, opts).roots
        values.append(complex(sum(complex(w) * complex(omega(complex(roots[k]))) for k, w in delta.weights.items())))
    return values


def witness_circle(f: RatPoly, count: int = WITNESS_SAMPLES) -> List[complex]:
    radius = max(2.0 * critical_data(f).max_abs_value, 1.0)
    return [radius * cmath.exp(2j * math.pi * (k + 0.5) / count) for k in range(count)]


# --- tangential centers -------------------------------------------------------


@dataclass(frozen=True)
class CenterCertificate:
    """Vanishes with (h, g, eta), or DoesNotVanish with a witness sample."""

    verdict: str
    cycle: SimpleCycle
    basepoint: complex
    h: Optional[RatPoly] = None
    g: Optional[RatPoly] = None
    eta: Optional[RatPoly] = None
    witness_t: Optional[complex] = None
    witness_value: Optional[complex] = None

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {"verdict": self.verdict, "cycle": self.cycle.to_json()}
        if self.verdict == "Vanishes":
            out.update({"h": str(self.h), "g": str(self.g), "eta": str(self.eta)})
        else:
            out.update({"witness_t": self.witness_t, "witness_value": self.witness_value})
        return out


def _candidates(f: RatPoly) -> List[Decomposition]:
    """Right components by increasing degree, ending with f itself."""
    lead, c0 = f.leading, f.coeff(0)
    itself = Decomposition(RatPoly((c0, lead)), (f - c0) * (1 / lead))
    return list(right_components(f)) + [itself]


def _cofiber_samples(base: complex, f: RatPoly) -> List[complex]:
    step = 0.1 * max(1.0, critical_data(f).max_abs_value)
    return [base, base + step * cmath.exp(1j * math.pi / 3), base + step * cmath.exp(-2j * math.pi / 3)]


def center_test(
    f: RatPoly,
    omega: RatPoly,
    delta: SimpleCycle,
    basepoint: Optional[complex] = None,
    opts: Optional[TrackOptions] = None,
    tolerances: Optional[Tolerances] = None,
) -> CenterCertificate:
    """
    Decide whether sum omega(x_i(t)) - omega(x_j(t)) vanishes identically.

    Candidates h are the right components of f (smallest degree first) and
    f itself. A candidate survives when h(x_i) = h(x_j) numerically at three
    points; it certifies when omega is a polynomial in h. Without a
    certificate a witness with |I| above the threshold is searched on a
    circle enclosing the critical values.

    Raises:
        NumericInconsistencyError: no certificate and no witness either.
    """
    opts = opts or TrackOptions()
    tol = tolerances or Tolerances()
    base = basepoint if basepoint is not None else choose_basepoint(f, opts=opts)
    delta.check(f.degree)
    cycle = delta.cycle()

    samples = _cofiber_samples(base, f)
    roots = solve_fiber(f.to_cpoly(), base, opts.collision_guard)
    for cand in _candidates(f):
        values = eval_zero_integral(f, cand.h, cycle, samples, base, opts)
        scale = max(1.0, abs(complex(cand.h(complex(roots[delta.i])))))
        if max(abs(v) for v in values) > tol.cofiber_tol * scale:
            continue
        eta = h_adic_expansion(omega, cand.h)
        if eta is not None:
            logger.info(f"center_test: vanishes through h = {cand.h}")
            return CenterCertificate("Vanishes", delta, base, cand.h, cand.g, eta)

    circle = witness_circle(f)
    values = eval_zero_integral(f, omega, cycle, circle, base, opts)
    best = int(np.argmax([abs(v) for v in values]))
    if abs(values[best]) <= tol.witness_threshold:
        logger.error("Abelian integral vanishes numerically but no certificate exists")
        raise NumericInconsistencyError(
            f"Integral of {omega} over the cycle vanishes at {len(circle)} samples "
            "without a decomposition over Q"
        )
    logger.info(f"center_test: witness |I| = {abs(values[best]):.3e} at t = {circle[best]:.4g}")
    return CenterCertificate(
        "DoesNotVanish", delta, base, witness_t=circle[best], witness_value=values[best]
    )


def verify_center_certificate(
    f: RatPoly,
    omega: RatPoly,
    cert: CenterCertificate,
    opts: Optional[TrackOptions] = None,
    tolerances: Optional[Tolerances] = None,
) -> bool:
    """Re-check a certificate exactly and at VERIFY_SAMPLES numeric samples."""
    tol = tolerances or Tolerances()
    if cert.verdict == "DoesNotVanish":
        assert cert.witness_t is not None
        value = eval_zero_integral(f, omega, cert.cycle.cycle(), [cert.witness_t], cert.basepoint, opts)[0]
        return abs(value) > tol.witness_threshold
    assert cert.h is not None and cert.g is not None and cert.eta is not None
    if compose(cert.g, cert.h) != f or compose(cert.eta, cert.h) != omega:
        return False
    samples = witness_circle(f, VERIFY_SAMPLES)
    values = eval_zero_integral(f, omega, cert.cycle.cycle(), samples, cert.basepoint, opts)
    scale = max([1.0] + [abs(complex(c)) for c in omega.coeffs])
    radius = abs(samples[0])
    scale *= max(1.0, radius) ** max(1, omega.degree)
    return all(abs(v) < tol.vanish_tol * scale for v in values)


# --- span of a simple cycle ---------------------------------------------------


@dataclass(frozen=True)
class SpanEdge:
    """x_a - x_b = sign * (image of the cycle under `word`)."""

    a: int
    b: int
    word: Word
    sign: int

    def to_json(self) -> Dict[str, object]:
        return {"edge": [self.a + 1, self.b + 1], "word": list(self.word), "sign": self.sign}


@dataclass(frozen=True)
class SpanResult:
    verdict: str
    cycle: SimpleCycle
    edges: Tuple[SpanEdge, ...] = ()
    rank: int = 0
    decomposition: Optional[Decomposition] = None
    components: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {"verdict": self.verdict, "cycle": self.cycle.to_json()}
        if self.verdict == "FullSpan":
            out.update({"rank": self.rank, "spanning_tree": [e.to_json() for e in self.edges]})
        else:
            assert self.decomposition is not None
            out.update(
                {
                    "decomposition": self.decomposition.to_json(),
                    "components": [[p + 1 for p in c] for c in self.components],
                }
            )
        return out


def orbit_graph(action: PermAction, delta: SimpleCycle) -> nx.Graph:
    """Roots as vertices, the monodromy orbit of {i, j} as edges labelled by words."""
    graph = nx.Graph()
    graph.add_nodes_from(range(action.n))
    for (a, b), word in action.pair_orbit((delta.i, delta.j), ordered=False).items():
        graph.add_edge(a, b, word=word)
    return graph


def span_test(
    f: RatPoly,
    delta: SimpleCycle,
    mono: Optional[MonodromyData] = None,
    opts: Optional[TrackOptions] = None,
    tolerances: Optional[Tolerances] = None,
) -> SpanResult:
    """
    Decide whether the monodromy images of x_i - x_j span all of sum n_k = 0.

    Connected orbit graph: FullSpan, with a BFS spanning tree whose edges
    are realized as signed images of the cycle. Disconnected: the components
    are blocks, and the decomposition whose h has exactly these level sets
    is returned.

    Raises:
        NumericInconsistencyError: disconnected graph but no matching h.
    """
    tol = tolerances or Tolerances()
    mono = mono or compute_monodromy(f, opts=opts)
    n = f.degree
    delta.check(n)
    action = PermAction(n, mono.generators)
    graph = orbit_graph(action, delta)

    if nx.is_connected(graph):
        edges = []
        for parent, child in nx.bfs_edges(graph, 0):
            word = graph.edges[parent, child]["word"]
            image = action.word_permutation(word)
            sign = 1 if (image(delta.i), image(delta.j)) == (parent, child) else -1
            edges.append(SpanEdge(parent, child, word, sign))
        rows = [[(1 if k == e.a else -1 if k == e.b else 0) for k in range(n)] for e in edges]
        r = rank(rows)
        if r != n - 1:
            raise NumericInconsistencyError(f"Spanning tree gave rank {r}, expected {n - 1}")
        logger.info(f"span_test: full span of rank {r}")
        return SpanResult("FullSpan", delta, tuple(edges), r)

    components = tuple(sorted(tuple(sorted(c)) for c in nx.connected_components(graph)))
    target = {frozenset(c) for c in components}
    decompositions = right_components(f)
    chosen: Optional[Decomposition] = None
    for dec in decompositions:
        if {frozenset(p) for p in fiber_partition(dec.h, mono.fiber, tol.cofiber_tol)} == target:
            chosen = dec
            break
    if chosen is None:
        raise NumericInconsistencyError(
            f"Orbit graph of {f} is disconnected but no right component has matching level sets"
        )
    logger.info(f"span_test: decomposes through h = {chosen.h}")
    return SpanResult("Decomposes", delta, decomposition=chosen, components=components)


def verify_span_result(f: RatPoly, result: SpanResult, mono: MonodromyData) -> bool:
    """Replay the words of a FullSpan tree, or recheck a Decomposes certificate."""
    n = f.degree
    if result.verdict == "FullSpan":
        action = PermAction(n, mono.generators)
        for e in result.edges:
            image = action.word_permutation(e.word)
            pair = (image(result.cycle.i), image(result.cycle.j))
            if pair != ((e.a, e.b) if e.sign > 0 else (e.b, e.a)):
                return False
        rows = [[(1 if k == e.a else -1 if k == e.b else 0) for k in range(n)] for e in result.edges]
        return rank(rows) == n - 1
    dec = result.decomposition
    if dec is None or not dec.verify(f):
        return False
    # level sets of h must be exactly the orbit graph components
    parts = {frozenset(p) for p in fiber_partition(dec.h, mono.fiber)}
    if parts != {frozenset(c) for c in result.components}:
        return False
    values = dec.h(np.asarray(mono.fiber))
    scale = max(1.0, float(np.max(np.abs(values))))
    return bool(abs(values[result.cycle.i] - values[result.cycle.j]) <= 1e-8 * scale)
