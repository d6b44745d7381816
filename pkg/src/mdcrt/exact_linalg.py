"""Exact integer matrix arithmetic and the two classic normal forms.

Everything here is arbitrary precision: entries are Python ints, rational
intermediates are ``fractions.Fraction``. No floats are ever produced on a
correctness path.

Conventions, fixed once and used everywhere:

* Hermite normal form (HNF): column operations only, lower-triangular result
  with positive diagonal and ``0 <= H[i][j] < H[i][i]`` for ``j < i``.
  ``m = h @ u`` with ``u`` unimodular, and ``h`` depends only on the column
  lattice of ``m``.
* Smith normal form (SNF): ``u @ m @ v = lam`` with unimodular ``u``, ``v``
  and nonnegative diagonal ``lam`` whose entries divide their successors.
  Rectangular input is supported (needed for coprimality blocks).
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, RankDeficient, SingularMatrix

Scalar = Union[int, Fraction]
IntVec = tuple[int, ...]
RatVec = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# vectors (plain tuples)

def vec(entries: Iterable[Scalar]) -> tuple:
    return tuple(entries)


def vec_add(a: Sequence[Scalar], b: Sequence[Scalar]) -> tuple:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Sequence[Scalar], b: Sequence[Scalar]) -> tuple:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(k: Scalar, a: Sequence[Scalar]) -> tuple:
    return tuple(k * x for x in a)


def vec_dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    return sum(x * y for x, y in zip(a, b, strict=True))


def vec_norm_sq(a: Sequence[Scalar]) -> Scalar:
    return sum(x * x for x in a)


def zero_vec(d: int) -> IntVec:
    return (0,) * d


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored as a tuple of row tuples.

    Square matrices are the common case (moduli, normal forms); rectangular
    ones appear only as stacked blocks fed to the SNF/HNF routines.
    """

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix must have at least one row and column")
        width = len(self.rows[0])
        for r in self.rows:
            if len(r) != width:
                raise ValueError("ragged rows")
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise ValueError(f"non-integer entry {x!r}")

    # construction ---------------------------------------------------------

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(x) for x in r) for r in rows))

    @staticmethod
    def identity(d: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)))

    @staticmethod
    def diag(*entries: int) -> "IntMatrix":
        d = len(entries)
        return IntMatrix(tuple(tuple(entries[i] if i == j else 0 for j in range(d)) for i in range(d)))

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(c[i]) for c in cols) for i in range(len(cols[0]))))

    # shape ----------------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    @property
    def dim(self) -> int:
        if not self.is_square:
            raise DimensionMismatch("dim is only defined for square matrices")
        return self.nrows

    def column(self, j: int) -> IntVec:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[IntVec]:
        return [self.column(j) for j in range(self.ncols)]

    # arithmetic -----------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        ot = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in ot) for row in self.rows))

    def apply(self, v: Sequence[Scalar]) -> tuple:
        """Matrix-vector product; accepts integer or rational entries."""
        if len(v) != self.ncols:
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} applied to length-{len(v)} vector")
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.rows)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(k * x for x in r) for r in self.rows))

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise DimensionMismatch("hstack needs equal row counts")
        return IntMatrix(tuple(a + b for a, b in zip(self.rows, other.rows)))

    # determinant and friends ------------------------------------------------

    @cached_property
    def det(self) -> int:
        return det(self)

    @cached_property
    def adj(self) -> "IntMatrix":
        return adjugate(self)

    def inverse_apply(self, v: Sequence[Scalar]) -> RatVec:
        """Exact ``m^{-1} v`` as a tuple of Fractions."""
        d = self.det
        if d == 0:
            raise SingularMatrix("cannot invert a singular matrix")
        return tuple(Fraction(x, d) if isinstance(x, int) else x / d for x in self.adj.apply(v))

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def is_unimodular(self) -> bool:
        return self.is_square and abs(self.det) == 1

    def divides_left(self, other: "IntMatrix") -> bool:
        """True when ``self^{-1} @ other`` is an integer matrix."""
        d = self.det
        if d == 0:
            raise SingularMatrix("left divisor must be nonsingular")
        prod = self.adj @ other
        return all(x % d == 0 for r in prod.rows for x in r)

    # text form --------------------------------------------------------------

    def __str__(self) -> str:
        return "[" + ",".join("[" + ",".join(str(x) for x in r) + "]" for r in self.rows) + "]"


def parse_matrix(text: str) -> IntMatrix:
    """Parse the row-major bracketed form, e.g. ``[[3,1],[2,2]]``.

    Raises ValueError with a character offset for malformed input.
    """
    try:
        obj = ast.literal_eval(text.strip())
    except SyntaxError as e:
        raise ValueError(f"malformed matrix literal at offset {e.offset}: {text!r}") from None
    except ValueError:
        raise ValueError(f"malformed matrix literal (offset 0): {text!r}") from None
    if not isinstance(obj, (list, tuple)) or not all(isinstance(r, (list, tuple)) for r in obj):
        raise ValueError(f"matrix literal must be a list of rows: {text!r}")
    return IntMatrix.from_rows(obj)


def parse_vector(text: str) -> IntVec:
    try:
        obj = ast.literal_eval(text.strip())
    except SyntaxError as e:
        raise ValueError(f"malformed vector literal at offset {e.offset}: {text!r}") from None
    if not isinstance(obj, (list, tuple)) or not all(isinstance(x, int) for x in obj):
        raise ValueError(f"vector literal must be a flat integer list: {text!r}")
    return tuple(int(x) for x in obj)


def format_vector(v: Sequence[Scalar]) -> str:
    return "[" + ",".join(str(x) for x in v) + "]"


# ---------------------------------------------------------------------------
# determinant / adjugate


def det(m: IntMatrix) -> int:
    """Exact determinant: cofactor expansion for D <= 3, Bareiss beyond."""
    if not m.is_square:
        raise DimensionMismatch("determinant of a non-square matrix")
    r = m.rows
    n = m.nrows
    if n == 1:
        return r[0][0]
    if n == 2:
        return r[0][0] * r[1][1] - r[0][1] * r[1][0]
    if n == 3:
        return (
            r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
        )
    return _det_bareiss([list(row) for row in r])


def _det_bareiss(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def adjugate(m: IntMatrix) -> IntMatrix:
    """Adjugate matrix: ``m @ adjugate(m) == det(m) * I`` exactly."""
    if not m.is_square:
        raise DimensionMismatch("adjugate of a non-square matrix")
    n = m.nrows
    r = m.rows
    if n == 1:
        return IntMatrix(((1,),))
    if n == 2:
        return IntMatrix(((r[1][1], -r[0][1]), (-r[1][0], r[0][0])))
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[r[a][b] for b in range(n) if b != j] for a in range(n) if a != i]
            c = det(IntMatrix.from_rows(minor))
            out[j][i] = -c if (i + j) % 2 else c
    return IntMatrix.from_rows(out)


# ---------------------------------------------------------------------------
# Hermite normal form


@dataclass(frozen=True)
class HnfDecomposition:
    h: IntMatrix
    u: IntMatrix


def hnf(m: IntMatrix) -> HnfDecomposition:
    """Column-operation HNF of a nonsingular square matrix: ``m == h @ u``."""
    if not m.is_square:
        raise DimensionMismatch("hnf expects a square matrix; use hnf_block for stacks")
    if m.det == 0:
        raise SingularMatrix("hnf requires a nonsingular matrix")
    h_full, w = _hnf_columns(m)
    u = _unimodular_inverse(w)
    return HnfDecomposition(h=h_full, u=u)


def hnf_block(block: IntMatrix) -> IntMatrix:
    """Left D x D factor of the column HNF of a full-row-rank D x K block.

    Column-reduces ``block`` to ``(G 0)`` and returns ``G``.
    """
    h_full, _ = _hnf_columns(block)
    d = block.nrows
    for i in range(d):
        for j in range(d, block.ncols):
            if h_full.rows[i][j] != 0:
                raise RankDeficient("block does not reduce to (G 0); rank below row count")
    g = IntMatrix(tuple(r[:d] for r in h_full.rows))
    if g.det == 0:
        raise RankDeficient("block has rank below its row count")
    return g


def _hnf_columns(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Shared column-reduction. Returns (H, W) with ``m @ W == H`` and W unimodular."""
    nr, nc = m.nrows, m.ncols
    a = [list(col) for col in zip(*m.rows)]  # work column-major
    w = [[1 if i == j else 0 for i in range(nc)] for j in range(nc)]

    def combine(j_dst: int, q: int, j_src: int) -> None:
        a[j_dst] = [x - q * y for x, y in zip(a[j_dst], a[j_src])]
        w[j_dst] = [x - q * y for x, y in zip(w[j_dst], w[j_src])]

    def swap(j1: int, j2: int) -> None:
        a[j1], a[j2] = a[j2], a[j1]
        w[j1], w[j2] = w[j2], w[j1]

    p = 0
    for i in range(nr):
        if p >= nc:
            break
        while True:
            live = [j for j in range(p, nc) if a[j][i] != 0]
            if not live:
                break
            j0 = min(live, key=lambda j: abs(a[j][i]))
            if j0 != p:
                swap(p, j0)
            done = True
            for j in range(p + 1, nc):
                if a[j][i] != 0:
                    q = a[j][i] // a[p][i]
                    combine(j, q, p)
                    if a[j][i] != 0:
                        done = False
            if done:
                break
        if a[p][i] == 0:
            continue  # zero row beyond the rank; no pivot consumed
        if a[p][i] < 0:
            a[p] = [-x for x in a[p]]
            w[p] = [-x for x in w[p]]
        for j in range(p):
            q = a[j][i] // a[p][i]
            if q:
                combine(j, q, p)
        p += 1

    h = IntMatrix(tuple(tuple(col[i] for col in a) for i in range(nr)))
    wmat = IntMatrix(tuple(tuple(col[i] for col in w) for i in range(nc)))
    return h, wmat


def _unimodular_inverse(w: IntMatrix) -> IntMatrix:
    d = w.det
    if abs(d) != 1:
        raise ValueError("internal: transform is not unimodular")
    return w.adj if d == 1 else -w.adj


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfDecomposition:
    u: IntMatrix
    v: IntMatrix
    lam: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        k = min(self.lam.nrows, self.lam.ncols)
        return tuple(self.lam.rows[i][i] for i in range(k))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal() if x != 0)


def snf(m: IntMatrix) -> SnfDecomposition:
    """Smith normal form ``u @ m @ v = lam``; rectangular input allowed."""
    nr, nc = m.nrows, m.ncols
    a = [list(r) for r in m.rows]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_combine(i_dst: int, q: int, i_src: int) -> None:
        a[i_dst] = [x - q * y for x, y in zip(a[i_dst], a[i_src])]
        u[i_dst] = [x - q * y for x, y in zip(u[i_dst], u[i_src])]

    def col_combine(j_dst: int, q: int, j_src: int) -> None:
        for row in a:
            row[j_dst] -= q * row[j_src]
        for row in v:
            row[j_dst] -= q * row[j_src]

    def row_swap(i1: int, i2: int) -> None:
        a[i1], a[i2] = a[i2], a[i1]
        u[i1], u[i2] = u[i2], u[i1]

    def col_swap(j1: int, j2: int) -> None:
        for row in a:
            row[j1], row[j2] = row[j2], row[j1]
        for row in v:
            row[j1], row[j2] = row[j2], row[j1]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        pivots = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j] != 0]
        if not pivots:
            break
        _, pi, pj = min(pivots)
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_combine(i, q, t)
                    if a[i][t] != 0:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_combine(j, q, t)
                    if a[t][j] != 0:
                        col_swap(t, j)
                        dirty = True
        # enforce the divisibility chain before moving on
        pivot = a[t][t]
        culprit = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % pivot != 0:
                    culprit = i
                    break
            if culprit is not None:
                break
        if culprit is not None:
            row_combine(t, -1, culprit)  # fold the offending row in and redo
            continue
        t += 1

    for i in range(min(nr, nc)):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            u[i] = [-x for x in u[i]]

    return SnfDecomposition(
        u=IntMatrix.from_rows(u),
        v=IntMatrix.from_rows(v),
        lam=IntMatrix.from_rows(a),
    )


# ---------------------------------------------------------------------------
# integer linear systems


def solve_diophantine(a: IntMatrix, b: Sequence[int]) -> IntVec | None:
    """Integer solution of ``a @ x = b`` for a full-row-rank D x K block.

    Returns None when the system is solvable over the rationals but not the
    integers. Raises RankDeficient when rank(a) < D.
    """
    if len(b) != a.nrows:
        raise DimensionMismatch("right-hand side length must match the row count")
    dec = snf(a)
    if dec.rank < a.nrows:
        raise RankDeficient(f"rank {dec.rank} < {a.nrows}")
    c = dec.u.apply(b)
    diag = dec.diagonal()
    y = [0] * a.ncols
    for i in range(a.nrows):
        if c[i] % diag[i] != 0:
            return None
        y[i] = c[i] // diag[i]
    return dec.v.apply(y)
