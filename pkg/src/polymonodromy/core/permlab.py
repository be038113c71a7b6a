"""
Permutations and permutation actions given by generators: orbits,
2-transitivity, block systems, and the classification of polynomial
monodromy into its four possible shapes.

Points are 0-based inside the library; one_line() and to_json() shift to
1-based for reports.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from polymonodromy.core.decompose import (
    Decomposition,
    ExceptionalTag,
    recognize_exceptional,
    right_components,
)
from polymonodromy.core.errors import InputError, NumericInconsistencyError
from polymonodromy.core.polycore import DEFAULT_CLUSTER_TOL, RatPoly

if TYPE_CHECKING:
    from polymonodromy.core.tracker import TrackOptions

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]

TWO_TRANSITIVE = "TwoTransitive"
IMPRIMITIVE = "Imprimitive"
CHEBYSHEV_PRIME = "ChebyshevPrime"
POWER_PRIME = "PowerPrime"


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0..n-1}; images[k] is the image of k."""

    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise InputError(f"Not a permutation: {list(self.images)}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from 0-based cycles, e.g. from_cycles(3, [(0, 1, 2)])."""
        images = list(range(n))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for k, v in enumerate(self.images):
            inv[v] = k
        return Permutation(tuple(inv))

    def then(self, other: "Permutation") -> "Permutation":
        """Apply self first, then other (concatenation of loops)."""
        return Permutation(tuple(other.images[v] for v in self.images))

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in enumerate(self.images))

    def cycles(self) -> List[Tuple[int, ...]]:
        seen: Set[int] = set()
        out = []
        for start in range(self.n):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            k = self.images[start]
            while k != start:
                cycle.append(k)
                seen.add(k)
                k = self.images[k]
            out.append(tuple(cycle))
        return out

    def cycle_type(self) -> Tuple[int, ...]:
        """Cycle lengths, fixed points included, in decreasing order."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def one_line(self) -> List[int]:
        return [v + 1 for v in self.images]


@dataclass(frozen=True)
class BlockSystem:
    """A partition of {0..n-1} into blocks of equal size d, 1 < d < n."""

    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", blocks)
        sizes = {len(b) for b in blocks}
        points = sorted(p for b in blocks for p in b)
        if len(sizes) != 1 or points != list(range(len(points))):
            raise InputError(f"Not an equal partition: {blocks}")

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self, point: int) -> Tuple[int, ...]:
        return next(b for b in self.blocks if point in b)

    def is_preserved_by(self, generators: Sequence[Permutation]) -> bool:
        """Every generator maps each block onto a block."""
        as_sets = {frozenset(b) for b in self.blocks}
        return all(
            frozenset(g(p) for p in b) in as_sets for g in generators for b in self.blocks
        )

    def to_json(self) -> List[List[int]]:
        return [[p + 1 for p in b] for b in self.blocks]


class PermAction:
    """
    A permutation group on {0..n-1} known only through its generators.

    Inverses are adjoined implicitly wherever a search needs them.
    """

    def __init__(self, n: int, generators: Sequence[Permutation]):
        for g in generators:
            if g.n != n:
                raise InputError(f"Generator of degree {g.n} in an action of degree {n}")
        self.n = n
        self.generators = list(generators)
        self._inverses = [g.inverse() for g in self.generators]

    def _moves(self) -> List[Tuple[int, Permutation]]:
        """(signed 1-based generator label, permutation) pairs, inverses as -k."""
        moves = [(k + 1, g) for k, g in enumerate(self.generators)]
        moves += [(-(k + 1), g) for k, g in enumerate(self._inverses)]
        return moves

    def orbit(self, point: int) -> List[int]:
        """Points reachable from `point`, in BFS order."""
        if not 0 <= point < self.n:
            raise InputError(f"Point {point} outside 0..{self.n - 1}")
        seen = {point}
        queue = deque([point])
        out = [point]
        while queue:
            p = queue.popleft()
            for _, g in self._moves():
                q = g(p)
                if q not in seen:
                    seen.add(q)
                    out.append(q)
                    queue.append(q)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.n

    def pair_orbit(self, pair: Tuple[int, int], ordered: bool = True) -> Dict[Tuple[int, int], Word]:
        """
        Orbit of a pair under the diagonal action, with a word reaching each member.

        Words list signed 1-based generator labels in the order applied.
        With ordered=False pairs are stored with the smaller point first.
        """
        a, b = pair
        if a == b:
            raise InputError("Pair points must differ")

        def norm(p: int, q: int) -> Tuple[int, int]:
            return (p, q) if ordered or p < q else (q, p)

        start = norm(a, b)
        words: Dict[Tuple[int, int], Word] = {start: ()}
        queue = deque([start])
        while queue:
            p, q = queue.popleft()
            for label, g in self._moves():
                nxt = norm(g(p), g(q))
                if nxt not in words:
                    words[nxt] = words[(p, q)] + (label,)
                    queue.append(nxt)
        return words

    def word_permutation(self, word: Word) -> Permutation:
        """The element obtained by applying the labelled generators left to right."""
        result = Permutation.identity(self.n)
        for label in word:
            g = self.generators[label - 1] if label > 0 else self._inverses[-label - 1]
            result = result.then(g)
        return result

    def is_two_transitive(self) -> bool:
        if self.n < 2:
            raise InputError("2-transitivity needs at least two points")
        return len(self.pair_orbit((0, 1))) == self.n * (self.n - 1)

    def minimal_block(self, pair: Tuple[int, int]) -> Optional[BlockSystem]:
        """
        Finest block system with both points of `pair` in one block.

        Union-find refinement: merge the pair, then keep merging the images
        of merged classes under every generator. Returns None when the only
        such system is the trivial one-block partition.
        """
        if not self.is_transitive():
            raise InputError("Block systems need a transitive action")
        a, b = pair
        if a == b:
            raise InputError("Pair points must differ")
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x: int, y: int) -> bool:
            rx, ry = find(x), find(y)
            if rx == ry:
                return False
            parent[max(rx, ry)] = min(rx, ry)
            return True

        union(a, b)
        queue = deque([(a, b)])
        while queue:
            x, y = queue.popleft()
            for g in self.generators:
                u, v = find(g(x)), find(g(y))
                if union(u, v):
                    queue.append((u, v))

        classes: Dict[int, List[int]] = {}
        for p in range(self.n):
            classes.setdefault(find(p), []).append(p)
        if len(classes) == 1:
            return None
        return BlockSystem(tuple(tuple(c) for c in classes.values()))

    def block_systems(self) -> List[BlockSystem]:
        """The distinct minimal blocks through point 0, finest first."""
        found = {self.minimal_block((0, b)) for b in range(1, self.n)}
        systems = [s for s in found if s is not None]
        return sorted(systems, key=lambda s: (s.block_size, s.blocks))

    def is_primitive(self) -> bool:
        return not self.block_systems()

    def group_closure(self, limit_degree: int = 8) -> Set[Tuple[int, ...]]:
        """All group elements as image tuples; only for small degree."""
        if self.n > limit_degree:
            raise InputError(f"Closure enumeration is limited to degree {limit_degree}")
        identity = Permutation.identity(self.n)
        elements = {identity.images}
        queue = deque([identity])
        while queue:
            p = queue.popleft()
            for g in self.generators:
                q = p.then(g)
                if q.images not in elements:
                    elements.add(q.images)
                    queue.append(q)
        return elements


@dataclass(frozen=True)
class MonodromyClass:
    """Which of the four monodromy shapes f has, with its witness."""

    tag: str
    n: int
    generators: Tuple[Permutation, ...]
    two_transitive: bool
    blocks: Optional[BlockSystem] = None
    exceptional: Optional[ExceptionalTag] = None
    decompositions: Tuple[Decomposition, ...] = field(default_factory=tuple)

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "tag": self.tag,
            "degree": self.n,
            "two_transitive": self.two_transitive,
            "generators": [g.one_line() for g in self.generators],
            "blocks": self.blocks.to_json() if self.blocks else [],
        }
        if self.exceptional is not None:
            out["witness"] = self.exceptional.to_json()
        return out


def classify(
    f: RatPoly,
    opts: Optional["TrackOptions"] = None,
    basepoint: Optional[complex] = None,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> MonodromyClass:
    """
    Classify Mon(f) as Imprimitive, ChebyshevPrime, PowerPrime or TwoTransitive.

    The loop basis is tracked twice, the second time with halved steps, and
    the generators must agree. Tests run in the order imprimitive, exceptional
    shape, 2-transitive; the first that holds decides the tag. Imprimitivity
    is cross-checked against exact decomposability.

    Args:
        f: Polynomial of degree >= 2.
        opts: TrackOptions; defaults apply when None.
        basepoint: Optional basepoint; a generic one is chosen otherwise.
        cluster_tol: Critical value clustering tolerance.

    Raises:
        NumericInconsistencyError: when the two trackings disagree, the
            action is not transitive, block structure and decomposability
            disagree, or no case applies.
    """
    from polymonodromy.core.tracker import TrackOptions, compute_monodromy

    track_opts = opts or TrackOptions()
    mono = compute_monodromy(f, basepoint, track_opts, cluster_tol)
    check = compute_monodromy(f, mono.basepoint, track_opts.halved(), cluster_tol)
    if [g.images for g in mono.generators] != [g.images for g in check.generators]:
        logger.error("Generators changed when re-tracking with halved steps")
        raise NumericInconsistencyError(
            "Tracking with halved steps produced different generators"
        )

    n = f.degree
    action = PermAction(n, mono.generators)
    if not action.is_transitive():
        raise NumericInconsistencyError("Tracked monodromy is not transitive")
    two_transitive = action.is_two_transitive()
    systems = action.block_systems()
    decompositions = tuple(right_components(f))
    generators = tuple(mono.generators)

    if systems:
        if not decompositions:
            raise NumericInconsistencyError(
                f"Monodromy of {f} is imprimitive but no decomposition over Q was found"
            )
        logger.info(f"classify({f}): Imprimitive, blocks of size {systems[0].block_size}")
        return MonodromyClass(
            IMPRIMITIVE, n, generators, two_transitive, systems[0], None, decompositions
        )
    if decompositions:
        raise NumericInconsistencyError(
            f"{f} decomposes but its tracked monodromy is primitive"
        )

    exceptional = recognize_exceptional(f, cluster_tol)
    if exceptional.kind == "PowerEquiv":
        tag = POWER_PRIME
    elif exceptional.kind == "ChebyshevEquiv":
        tag = CHEBYSHEV_PRIME
    elif two_transitive:
        tag = TWO_TRANSITIVE
    else:
        raise NumericInconsistencyError(
            f"{f}: primitive, not 2-transitive, and not equivalent to x^p or T_p"
        )
    logger.info(f"classify({f}): {tag}")
    return MonodromyClass(
        tag,
        n,
        generators,
        two_transitive,
        None,
        exceptional if exceptional.kind != "Neither" else None,
        decompositions,
    )
