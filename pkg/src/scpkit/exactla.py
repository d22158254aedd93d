"""Exact rational linear algebra for small dense matrices.

Everything here works over :class:`fractions.Fraction`; there is no floating
point anywhere.  Determinant and rank use fraction-free (Bareiss) elimination
on row-scaled integer copies of the input, positive semi-definiteness is
decided by diagonal pivoting on Schur complements, and range/kernel questions
go through the reduced row echelon form.

:class:`QuadExt` holds numbers of the form ``p + q*sqrt(v)`` with ``p, q, v``
rational, which is all that is needed for the atoms of two-atomic measures.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from .errors import ConsistencyError, RangeError

Rat = Fraction
Scalar = Union[int, Fraction]


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected on purpose: a float has already been rounded.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    if isinstance(value, QuadExt) and value.is_rational:
        return value.p
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class Mat:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable[Scalar]], ncols: int | None = None):
        data = tuple(tuple(as_rat(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(row) != width for row in data):
                raise ValueError("ragged matrix rows")
        else:
            width = ncols or 0
        self._rows = data
        self._ncols = width

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Mat":
        return cls([[0] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def column(cls, values: Iterable[Scalar]) -> "Mat":
        return cls([[v] for v in values], ncols=1)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Mat"]]) -> "Mat":
        rows = []
        for block_row in blocks:
            height = block_row[0].nrows
            for i in range(height):
                row = []
                for blk in block_row:
                    if blk.nrows != height:
                        raise ValueError("block heights disagree")
                    row.extend(blk._rows[i])
                rows.append(row)
        return cls(rows)

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self._rows)

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self._rows]

    @property
    def T(self) -> "Mat":
        return Mat(zip(*self._rows), ncols=self.nrows) if self._rows else Mat([], ncols=0)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self._rows[i][j] for j in cols] for i in rows], ncols=len(cols))

    def hstack(self, other: "Mat") -> "Mat":
        if self.nrows != other.nrows:
            raise ValueError("row counts disagree")
        return Mat([a + b for a, b in zip(self._rows, other._rows)],
                   ncols=self.ncols + other.ncols)

    def is_symmetric(self) -> bool:
        n = self.nrows
        return self.is_square and all(
            self._rows[i][j] == self._rows[j][i] for i in range(n) for j in range(i + 1, n))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._rows for x in row)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.T._rows if other._rows else ()
        return Mat([[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols]
                    for row in self._rows], ncols=other.ncols)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                   ncols=self.ncols)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in row] for row in self._rows], ncols=self.ncols)

    def scale(self, factor: Scalar) -> "Mat":
        factor = as_rat(factor)
        return Mat([[factor * a for a in row] for row in self._rows], ncols=self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._ncols, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self._rows)
        return f"Mat([{body}])"


def _integer_rows(m: Mat) -> tuple[list[list[int]], int]:
    """Scale each row to integers; return the rows and the product of scalings."""
    rows = []
    scale = 1
    for row in m.tolist():
        mult = reduce(math.lcm, (x.denominator for x in row), 1)
        rows.append([int(x * mult) for x in row])
        scale *= mult
    return rows, scale


def det(m: Mat) -> Fraction:
    """Determinant by Bareiss elimination with row pivoting."""
    if not m.is_square:
        raise ValueError(f"det needs a square matrix, got {m.shape}")
    n = m.nrows
    if n == 0:
        return Fraction(1)
    a, scale = _integer_rows(m)
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
                return Fraction(0)
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return Fraction(sign * a[n - 1][n - 1], scale)


def rank(m: Mat) -> int:
    """Rank by Bareiss elimination with full pivoting."""
    a, _ = _integer_rows(m)
    nrows, ncols = m.shape
    prev = 1
    r = 0
    while r < min(nrows, ncols):
        pivot_at = next(((i, j) for i in range(r, nrows) for j in range(r, ncols) if a[i][j]),
                        None)
        if pivot_at is None:
            break
        pi, pj = pivot_at
        a[r], a[pi] = a[pi], a[r]
        if pj != r:
            for row in a:
                row[r], row[pj] = row[pj], row[r]
        pivot = a[r][r]
        for i in range(r + 1, nrows):
            air = a[i][r]
            row_i, row_r = a[i], a[r]
            for j in range(r + 1, ncols):
                row_i[j] = (row_i[j] * pivot - air * row_r[j]) // prev
            row_i[r] = 0
        prev = pivot
        r += 1
    return r


def is_psd(m: Mat) -> bool:
    """Decide positive semi-definiteness exactly.

    Each step takes the next diagonal entry as pivot: a negative pivot, or a
    zero pivot whose remaining row is not zero, proves indefiniteness;
    otherwise the pivot is eliminated and the test recurses on the Schur
    complement.
    """
    if not m.is_symmetric():
        raise ValueError("is_psd needs a symmetric matrix")
    a = m.tolist()
    live = list(range(m.nrows))
    while live:
        i = live.pop(0)
        d = a[i][i]
        if d < 0:
            return False
        if d == 0:
            if any(a[i][j] != 0 for j in live):
                return False
            continue
        for j in live:
            f = a[j][i] / d
            if f:
                for k in live:
                    a[j][k] -= f * a[i][k]
    return True


def rref(m: Mat) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = m.tolist()
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def kernel_basis(m: Mat) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space, one vector per free column of the RREF.

    The vector for free column ``f`` has a 1 in position ``f``, zeros at the
    other free columns, and is therefore supported on columns ``<= f``.
    """
    r, pivots = rref(m)
    ncols = m.ncols
    basis = []
    for f in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in enumerate(pivots):
            v[p] = -r[row][f]
        basis.append(tuple(v))
    return basis


def solve_in_range(a: Mat, b: Mat) -> Mat:
    """Return W with ``a @ W == b``; raise RangeError if Ran b is not in Ran a.

    Free variables of the eliminated system are set to zero.
    """
    if not a.is_symmetric():
        raise ValueError("solve_in_range needs a symmetric left-hand side")
    if a.nrows != b.nrows:
        raise ValueError("row counts disagree")
    aug = a.hstack(b)
    if rank(aug) != rank(a):
        raise RangeError("right-hand side is not in the range of the matrix")
    r, pivots = rref(aug)
    n = a.ncols
    w = [[Fraction(0)] * b.ncols for _ in range(n)]
    for row, p in enumerate(pivots):
        w[p] = r[row][n:]
    w_mat = Mat(w, ncols=b.ncols)
    if a @ w_mat != b:
        raise ConsistencyError("solve_in_range produced a wrong solution")
    return w_mat


def flat_complete(a: Mat, b: Mat) -> Mat:
    """The corner ``C = W^T a W`` making ``[[a, b], [b^T, C]]`` rank-preserving."""
    w = solve_in_range(a, b)
    c = w.T @ a @ w
    kernel = kernel_basis(a)
    if kernel:
        # shift W by kernel directions; C must not move
        shift = Mat([[sum(v[i] for v in kernel)] * b.ncols for i in range(a.ncols)],
                    ncols=b.ncols)
        w2 = w + shift
        if w2.T @ a @ w2 != c:
            raise ConsistencyError("flat completion depends on the choice of W")
    return c


# -- quadratic surds ---------------------------------------------------------

_SMALL_PRIMES_LIMIT = 10**5


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n = k*k*s``; ``s`` is squarefree unless ``n`` has huge factors."""
    k, s = 1, 1
    p = 2
    while p * p * p <= n and p <= _SMALL_PRIMES_LIMIT:
        while n % (p * p) == 0:
            n //= p * p
            k *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(n)
    if r * r == n:
        k *= r
    else:
        s *= n
    return k, s


class QuadExt:
    """Exact number ``p + q*sqrt(radicand)`` with rational parts.

    Values are normalized so the radicand is a squarefree integer (or 0 with
    ``q == 0`` for plain rationals).  Arithmetic between two irrational values
    requires them to share the radicand.
    """

    __slots__ = ("p", "q", "radicand")

    def __init__(self, p: Scalar = 0, q: Scalar = 0, radicand: Scalar = 0):
        p, q, v = as_rat(p), as_rat(q), as_rat(radicand)
        if v < 0:
            raise ValueError("negative radicand")
        if q == 0 or v == 0:
            q, v = Fraction(0), Fraction(0)
        else:
            k, s = _squarefree_split(v.numerator * v.denominator)
            q = q * k / v.denominator
            if s == 1:
                p, q, v = p + q, Fraction(0), Fraction(0)
            else:
                v = Fraction(s)
        self.p, self.q, self.radicand = p, q, v

    @classmethod
    def _rat(cls, p: Fraction) -> "QuadExt":
        out = object.__new__(cls)
        out.p, out.q, out.radicand = p, Fraction(0), Fraction(0)
        return out

    @classmethod
    def coerce(cls, value) -> "QuadExt":
        if isinstance(value, QuadExt):
            return value
        return cls(as_rat(value))

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.q != 0:
            raise ValueError(f"{self} is irrational")
        return self.p

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.p, -self.q, self.radicand)

    def _field(self, other: "QuadExt") -> Fraction:
        if self.q and other.q and self.radicand != other.radicand:
            raise ValueError(f"incompatible radicands {self.radicand} and {other.radicand}")
        return self.radicand if self.q else other.radicand

    def __add__(self, other) -> "QuadExt":
        other = QuadExt.coerce(other)
        if not (self.q or other.q):
            return QuadExt._rat(self.p + other.p)
        v = self._field(other)
        return QuadExt(self.p + other.p, self.q + other.q, v)

    __radd__ = __add__

    def __neg__(self) -> "QuadExt":
        return QuadExt(-self.p, -self.q, self.radicand)

    def __sub__(self, other) -> "QuadExt":
        return self + (-QuadExt.coerce(other))

    def __rsub__(self, other) -> "QuadExt":
        return QuadExt.coerce(other) - self

    def __mul__(self, other) -> "QuadExt":
        other = QuadExt.coerce(other)
        if not (self.q or other.q):
            return QuadExt._rat(self.p * other.p)
        v = self._field(other)
        return QuadExt(self.p * other.p + self.q * other.q * v,
                       self.p * other.q + self.q * other.p, v)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QuadExt":
        other = QuadExt.coerce(other)
        norm = other.p * other.p - other.q * other.q * other.radicand
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return (self * other.conjugate()) * QuadExt(1 / norm)

    def __rtruediv__(self, other) -> "QuadExt":
        return QuadExt.coerce(other) / self

    def __pow__(self, n: int) -> "QuadExt":
        if n < 0:
            return QuadExt(1) / self ** (-n)
        out = QuadExt(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self) -> int:
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0 or sp == sq:
            return sp or sq
        if sp == 0:
            return sq
        return sp if self.p * self.p > self.q * self.q * self.radicand else sq

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        if not isinstance(other, QuadExt):
            return NotImplemented
        return (self.p, self.q, self.radicand) == (other.p, other.q, other.radicand)

    def __hash__(self) -> int:
        return hash(self.p) if self.q == 0 else hash((self.p, self.q, self.radicand))

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def __bool__(self) -> bool:
        return self.p != 0 or self.q != 0

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        mag = abs(self.q)
        surd = f"√{self.radicand}" if mag == 1 else f"{mag}√{self.radicand}"
        if self.p == 0:
            return surd if self.q > 0 else f"-{surd}"
        return f"{self.p}{'+' if self.q > 0 else '-'}{surd}"

    def __repr__(self) -> str:
        return f"QuadExt({self.p}, {self.q}, {self.radicand})"
