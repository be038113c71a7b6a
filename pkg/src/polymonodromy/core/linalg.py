"""Exact rational linear algebra on small dense matrices."""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

Scalar = Union[int, Fraction]
Vector = List[Fraction]
Matrix = List[List[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> List[List[int]]:
    """Product of two integer (or Fraction) matrices."""
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    if a and len(a[0]) != m:
        raise ValueError("Inner dimensions do not agree")
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        row = a[i]
        for k in range(m):
            aik = row[k]
            if aik == 0:
                continue
            bk = b[k]
            for j in range(p):
                out[i][j] += aik * bk[j]
    return out


def matvec(a: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def row_echelon(rows: Sequence[Sequence[Scalar]]) -> Tuple[Matrix, List[int]]:
    """
    Reduced row echelon form over the rationals.

    Args:
        rows: The matrix as a sequence of rows.

    Returns:
        (reduced nonzero rows, pivot columns).
    """
    m = to_fraction_matrix(rows)
    if not m:
        return [], []
    n_rows, n_cols = len(m), len(m[0])
    pivots: List[int] = []
    piv_r = 0
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        fp = m[piv_r][piv_c]
        m[piv_r] = [x / fp for x in m[piv_r]]
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = m[r][piv_c]
            if fr == 0:
                continue
            m[r] = [x - fr * y for x, y in zip(m[r], m[piv_r])]
        pivots.append(piv_c)
        piv_r += 1
        if piv_r == n_rows:
            break
    return m[:piv_r], pivots


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    return len(row_echelon(rows)[1])


def determinant(rows: Sequence[Sequence[Scalar]]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    m = to_fraction_matrix(rows)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("Determinant needs a square matrix")
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            factor = m[r][c] / m[c][c]
            if factor:
                m[r] = [x - factor * y for x, y in zip(m[r], m[c])]
    return det


def mod2(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    return [[int(x) % 2 for x in row] for row in rows]


class ExactSpan:
    """Incrementally grown rational span that remembers the vectors added."""

    def __init__(self, dim: int):
        self.dim = dim
        self._reduced: List[Tuple[int, Vector]] = []
        self.basis: List[Vector] = []

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _reduce(self, v: Sequence[Scalar]) -> Vector:
        w = [Fraction(x) for x in v]
        if len(w) != self.dim:
            raise ValueError(f"Expected a vector of length {self.dim}")
        for pivot, row in self._reduced:
            if w[pivot] != 0:
                factor = w[pivot]
                w = [x - factor * y for x, y in zip(w, row)]
        return w

    def contains(self, v: Sequence[Scalar]) -> bool:
        return not any(self._reduce(v))

    def add(self, v: Sequence[Scalar]) -> bool:
        """Add v; return True when the span grew."""
        w = self._reduce(v)
        pivot: Optional[int] = next((i for i, x in enumerate(w) if x != 0), None)
        if pivot is None:
            return False
        lead = w[pivot]
        w = [x / lead for x in w]
        # keep earlier rows reduced against the new pivot
        updated = []
        for p, row in self._reduced:
            if row[pivot] != 0:
                factor = row[pivot]
                row = [x - factor * y for x, y in zip(row, w)]
            updated.append((p, row))
        updated.append((pivot, w))
        self._reduced = updated
        self.basis.append([Fraction(x) for x in v])
        return True


class Gf2Span:
    """Span over the field with two elements, vectors stored as bitmasks."""

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: List[int] = []

    @property
    def dimension(self) -> int:
        return len(self._rows)

    def _reduce(self, mask: int) -> int:
        for row in self._rows:
            mask = min(mask, mask ^ row)
        return mask

    def add(self, v: Sequence[Scalar]) -> bool:
        """Add v reduced mod 2; return True when the span grew."""
        mask = sum(1 << i for i, x in enumerate(v) if int(x) % 2)
        mask = self._reduce(mask)
        if not mask:
            return False
        self._rows.append(mask)
        self._rows.sort(reverse=True)
        return True
