"""Exact integer and rational matrix kernel.

Everything here works over Python ints and :class:`fractions.Fraction`, so no
operation can overflow.  Matrices are immutable and hashable.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatch, Inconsistent, NotSquare, NotSymmetric, Singular, Underdetermined

Vector = tuple


def _entry(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"exact entries only (int or Fraction), got {type(x).__name__}")


class Matrix:
    """Immutable dense matrix with exact entries.

    Entries are ints, or Fractions in lowest terms for non-integral values
    (Fractions with denominator 1 are stored as ints).
    """

    __slots__ = ("rows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(_entry(x) for x in row) for row in rows)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise DimensionMismatch("ragged rows")
            if ncols is not None and ncols != width:
                raise DimensionMismatch("ncols disagrees with row width")
        else:
            width = 0 if ncols is None else ncols
        self.rows = rows
        self.ncols = width
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        columns = [tuple(c) for c in columns]
        if not columns:
            return cls([[] for _ in range(nrows or 0)], ncols=0)
        return cls(zip(*columns))

    # shape and access -----------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @property
    def is_square(self) -> bool:
        return len(self.rows) == self.ncols

    @property
    def T(self) -> "Matrix":
        return Matrix(zip(*self.rows), ncols=self.nrows) if self.rows else Matrix.zeros(self.ncols, 0)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self.rows for x in row)

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def row(self, i: int) -> Vector:
        return self.rows[i]

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], ncols=len(cols))

    # arithmetic -----------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
            return Matrix(
                ([sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows),
                ncols=other.ncols,
            )
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"cannot apply {self.shape} matrix to length-{len(vec)} vector")
        return tuple(_entry(sum(a * b for a, b in zip(row, vec))) for row in self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix(([a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)), ncols=self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix(([-a for a in r] for r in self.rows), ncols=self.ncols)

    def __mul__(self, scalar) -> "Matrix":
        if isinstance(scalar, Matrix):
            return NotImplemented
        return Matrix(([a * scalar for a in r] for r in self.rows), ncols=self.ncols)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square:
            raise NotSquare("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Matrix.identity(self.nrows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r})"

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"

    def det(self):
        return det(self)

    def inverse(self) -> "Matrix":
        return inverse(self)


def as_matrix(m) -> Matrix:
    return m if isinstance(m, Matrix) else Matrix(m)


# scalar / vector helpers ------------------------------------------------------


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def is_primitive(v: Iterable[int]) -> bool:
    return vec_gcd(v) == 1


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def row_rank(m: Matrix) -> int:
    return len(_rational_echelon([list(map(Fraction, r)) for r in m.rows], m.ncols)[1])


# determinant and inverse -------------------------------------------------------


def det(m: Matrix):
    """Exact determinant; Bareiss elimination for integer input."""
    m = as_matrix(m)
    if not m.is_square:
        raise NotSquare(f"determinant of a {m.shape} matrix")
    n = m.nrows
    if n == 0:
        return 1
    if not m.is_integral:
        a = [list(map(Fraction, r)) for r in m.rows]
        result = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                result = -result
            result *= a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return _entry(result)
    a = [list(r) for r in m.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(m: Matrix) -> Matrix:
    """Exact inverse over the rationals (integral entries come back as ints)."""
    m = as_matrix(m)
    if not m.is_square:
        raise NotSquare(f"inverse of a {m.shape} matrix")
    n = m.nrows
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.rows)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return Matrix(r[n:] for r in a)


# Smith and Hermite normal forms -------------------------------------------------


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return unimodular ``U``, ``V`` and diagonal ``D`` with ``U @ m @ V == D``.

    Diagonal entries are nonnegative and each divides the next.
    """
    m = as_matrix(m)
    if not m.is_integral:
        raise TypeError("Smith normal form needs an integer matrix")
    r, c = m.shape
    a = [list(row) for row in m.rows]
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    v = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            clean = True
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return Matrix(u, ncols=r), Matrix(a, ncols=c), Matrix(v, ncols=c)


def invariant_factors(m: Matrix) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [d[i, i] for i in range(min(d.shape))]


def _row_echelon(a: list[list[int]], ncols: int) -> int:
    """Integer row reduction of ``a`` in place on the first ``ncols`` columns.

    Leaves a Hermite form on those columns (positive pivots, reduced above)
    and returns the number of pivot rows.
    """
    m = len(a)
    r = 0
    for col in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][col]))
            a[r], a[piv] = a[piv], a[r]
            clean = True
            for i in range(r + 1, m):
                if a[i][col]:
                    q = a[i][col] // a[r][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    clean = clean and a[i][col] == 0
            if clean:
                break
        if r < m and a[r][col]:
            if a[r][col] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][col] // a[r][col]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return r


def hermite_normal_form(m: Matrix) -> Matrix:
    """Row-style Hermite normal form with zero rows dropped."""
    m = as_matrix(m)
    a = [list(row) for row in m.rows]
    r = _row_echelon(a, m.ncols)
    return Matrix(a[:r], ncols=m.ncols)


def integer_kernel(m: Matrix) -> list[Vector]:
    """Basis of the saturated integer kernel ``{v : m v = 0}``, Hermite-reduced."""
    m = as_matrix(m)
    if not m.is_integral:
        raise TypeError("integer kernel needs an integer matrix")
    r, n = m.shape
    aug = [[m.rows[i][j] for i in range(r)] + [int(j == k) for k in range(n)] for j in range(n)]
    rank = _row_echelon(aug, r)
    kernel = [row[r:] for row in aug[rank:]]
    if not kernel:
        return []
    rank = _row_echelon(kernel, n)
    return [tuple(row) for row in kernel[:rank]]


# rational systems and inertia ----------------------------------------------------


def _rational_echelon(a: list[list[Fraction]], ncols: int):
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a, pivots


def solve_rational(a: Matrix, b: Sequence) -> Vector:
    """Unique rational solution of ``a x = b``.

    Raises :class:`Inconsistent` when there is no solution and
    :class:`Underdetermined` when it is not unique.
    """
    a = as_matrix(a)
    if len(b) != a.nrows:
        raise DimensionMismatch("right-hand side length")
    k = a.ncols
    rows = [list(map(Fraction, row)) + [Fraction(y)] for row, y in zip(a.rows, b)]
    rows, pivots = _rational_echelon(rows, k)
    if any(row[k] != 0 and all(x == 0 for x in row[:k]) for row in rows):
        raise Inconsistent("linear system has no solution")
    if len(pivots) < k:
        raise Underdetermined(f"system has rank {len(pivots)} < {k} unknowns")
    x = [Fraction(0)] * k
    for i, col in enumerate(pivots):
        x[col] = rows[i][k]
    return tuple(_entry(v) for v in x)


def signature(s: Matrix) -> tuple[int, int, int]:
    """Inertia ``(n_plus, n_minus, n_zero)`` of a symmetric rational matrix."""
    s = as_matrix(s)
    if not s.is_square:
        raise NotSquare("signature of a non-square matrix")
    if s != s.T:
        raise NotSymmetric("signature needs a symmetric matrix")
    a = [list(map(Fraction, r)) for r in s.rows]
    pos = neg = zero = 0
    while a:
        n = len(a)
        if a[0][0] == 0:
            j = next((j for j in range(1, n) if a[j][j] != 0), None)
            if j is not None:
                a[0], a[j] = a[j], a[0]
                for row in a:
                    row[0], row[j] = row[j], row[0]
                continue
            j = next((j for j in range(1, n) if a[0][j] != 0), None)
            if j is None:
                zero += 1
                a = [row[1:] for row in a[1:]]
                continue
            # every diagonal entry vanishes: e_0 += e_j makes the pivot 2*a[0][j]
            a[0] = [x + y for x, y in zip(a[0], a[j])]
            for row in a:
                row[0] += row[j]
            continue
        p = a[0][0]
        if p > 0:
            pos += 1
        else:
            neg += 1
        a = [[a[i][j] - a[i][0] * a[0][j] / p for j in range(1, n)] for i in range(1, n)]
    return pos, neg, zero
