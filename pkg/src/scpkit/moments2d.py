"""Two-variable truncated moment sequences and the matrices built from them.

Index convention: ``gamma[i, j]`` is the integral of ``y**i * x**j``, so the
first index is the y-degree.  Monomial bases are graded and, within a degree,
ordered by increasing y-degree::

    1, X, Y, X^2, YX, Y^2, X^3, YX^2, Y^2X, Y^3, ...
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, NamedTuple, Sequence

from .exactla import Mat, Scalar, as_rat, kernel_basis


class Monomial(NamedTuple):
    """The monomial ``y**ydeg * x**xdeg``."""

    ydeg: int
    xdeg: int

    @property
    def degree(self) -> int:
        return self.ydeg + self.xdeg

    def __add__(self, other):  # exponent sum, not tuple concatenation
        return Monomial(self.ydeg + other[0], self.xdeg + other[1])

    def label(self) -> str:
        if self.degree == 0:
            return "1"
        parts = []
        for var, e in (("Y", self.ydeg), ("X", self.xdeg)):
            if e == 1:
                parts.append(var)
            elif e > 1:
                parts.append(f"{var}^{e}")
        return "".join(parts)


def monomial_basis(n: int) -> list[Monomial]:
    """All monomials of total degree <= n in graded, increasing-y order."""
    return [Monomial(i, d - i) for d in range(n + 1) for i in range(d + 1)]


@dataclass(frozen=True)
class MomentSeq2:
    """Moments ``gamma[i, j]`` for all ``i + j <= degree``."""

    degree: int
    table: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        table = {Monomial(*k): as_rat(v) for k, v in dict(self.table).items()}
        missing = [m for m in monomial_basis(self.degree) if m not in table]
        if missing:
            raise ValueError(f"moment table incomplete, missing {missing[:3]}")
        extra = [k for k in table if k.degree > self.degree or min(k) < 0]
        if extra:
            raise ValueError(f"moment table has entries beyond degree {self.degree}")
        if table[Monomial(0, 0)] <= 0:
            raise ValueError("gamma_00 must be positive")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]]) -> "MomentSeq2":
        """Build from rows by degree: row d lists gamma[0,d], gamma[1,d-1], ..., gamma[d,0]."""
        table = {}
        for d, row in enumerate(rows):
            if len(row) != d + 1:
                raise ValueError(f"degree-{d} row must have {d + 1} entries")
            for i, v in enumerate(row):
                table[(i, d - i)] = v
        return cls(len(rows) - 1, table)

    def rows(self) -> list[list[Fraction]]:
        return [[self.table[Monomial(i, d - i)] for i in range(d + 1)]
                for d in range(self.degree + 1)]

    def __getitem__(self, ij) -> Fraction:
        return self.table[Monomial(*ij)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MomentSeq2):
            return NotImplemented
        return self.degree == other.degree and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.degree, tuple(sorted(self.table.items()))))

    def truncate(self, degree: int) -> "MomentSeq2":
        return MomentSeq2(degree, {k: v for k, v in self.table.items() if k.degree <= degree})


@dataclass(frozen=True)
class MomentMat:
    """A moment-type matrix together with its monomial row/column labels.

    ``kind`` is ``"moment"``, ``"localizing-x"``, ``"localizing-y"`` or
    ``"hyponormality"``; ``shift`` is the exponent added to every entry.
    """

    n: int
    basis: tuple[Monomial, ...]
    mat: Mat
    kind: str = "moment"
    shift: Monomial = Monomial(0, 0)

    def entry(self, p: Monomial, q: Monomial) -> Fraction:
        return self.mat[self.basis.index(p), self.basis.index(q)]


class PolyRelation(NamedTuple):
    """A polynomial ``sum(coef * monomial)``, normalized to leading coefficient 1."""

    terms: tuple[tuple[Monomial, Fraction], ...]

    @classmethod
    def from_vector(cls, basis: Sequence[Monomial], vec: Sequence[Fraction]) -> "PolyRelation":
        nonzero = [(m, c) for m, c in zip(basis, vec) if c != 0]
        if not nonzero:
            raise ValueError("zero relation")
        lead = nonzero[-1][1]
        return cls(tuple((m, c / lead) for m, c in reversed(nonzero)))

    @classmethod
    def from_dict(cls, poly: Mapping[Monomial, Scalar]) -> "PolyRelation":
        basis = sorted((Monomial(*m) for m in poly), key=lambda m: (m.degree, m.ydeg))
        return cls.from_vector(basis, [as_rat(poly[m]) for m in basis])

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.as_dict().get(Monomial(*m), Fraction(0))

    def vector(self, basis: Sequence[Monomial]) -> list[Fraction]:
        d = self.as_dict()
        return [d.get(m, Fraction(0)) for m in basis]

    def evaluate(self, x, y):
        """Value at the point ``(x, y)``; works for Fractions and QuadExt alike."""
        total = 0
        for m, c in self.terms:
            total = total + c * (y ** m.ydeg) * (x ** m.xdeg)
        return total

    def __str__(self) -> str:
        out = ""
        for k, (m, c) in enumerate(self.terms):
            mag = abs(c)
            body = m.label() if mag == 1 and m.degree else (
                str(mag) if m.degree == 0 else f"{mag}{m.label()}")
            if k == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


def _need(seq: MomentSeq2, degree: int) -> None:
    if seq.degree < degree:
        raise ValueError(f"need moments up to degree {degree}, have {seq.degree}")


def _shifted(seq: MomentSeq2, n: int, shift: Monomial, kind: str) -> MomentMat:
    _need(seq, 2 * n + shift.degree)
    basis = tuple(monomial_basis(n))
    mat = Mat([[seq.table[p + q + shift] for q in basis] for p in basis])
    return MomentMat(n, basis, mat, kind, shift)


def moment_matrix(seq: MomentSeq2, n: int) -> MomentMat:
    """M(n): entry at (p, q) is the moment of the monomial p*q."""
    return _shifted(seq, n, Monomial(0, 0), "moment")


def localizing_matrix(seq: MomentSeq2, n: int, axis: str) -> MomentMat:
    """M(n) with every entry carrying one extra power of ``axis`` ("x" or "y")."""
    if axis == "x":
        return _shifted(seq, n, Monomial(0, 1), "localizing-x")
    if axis == "y":
        return _shifted(seq, n, Monomial(1, 0), "localizing-y")
    raise ValueError(f"axis must be 'x' or 'y', not {axis!r}")


def hyponormality_matrix(seq: MomentSeq2, u: tuple[int, int], ell: int) -> MomentMat:
    """M_u(ell) = (gamma[u + m + p]) over monomials m, p of degree <= ell.

    ``u`` uses the moment-table convention (y-degree, x-degree), so
    ``u=(0, 1)`` gives the x-localizing matrix.
    """
    return _shifted(seq, ell, Monomial(*u), "hyponormality")


def is_moment_matrix(m: MomentMat) -> bool:
    """True iff entries whose labels have the same exponent sum agree."""
    seen: dict[Monomial, Fraction] = {}
    for i, p in enumerate(m.basis):
        for j, q in enumerate(m.basis):
            key = p + q
            value = m.mat[i, j]
            if seen.setdefault(key, value) != value:
                return False
    return True


def riesz_eval(seq: MomentSeq2, poly: Mapping[Monomial, Scalar] | PolyRelation) -> Fraction:
    """Apply the Riesz functional ``y**i x**j -> gamma[i, j]`` to a polynomial."""
    if isinstance(poly, PolyRelation):
        poly = poly.as_dict()
    total = Fraction(0)
    for mono, coef in poly.items():
        mono = Monomial(*mono)
        if mono.degree > seq.degree:
            raise ValueError(f"monomial {mono.label()} exceeds degree bound {seq.degree}")
        total += as_rat(coef) * seq.table[mono]
    return total


def _shift_poly(i: int, j: int, h: Fraction, k: Fraction) -> dict[Monomial, Fraction]:
    """Expand ``(y + k)**i * (x + h)**j``."""
    return {Monomial(a, b): comb(i, a) * k ** (i - a) * comb(j, b) * h ** (j - b)
            for a in range(i + 1) for b in range(j + 1)}


def translate(seq: MomentSeq2, h: Scalar, k: Scalar) -> MomentSeq2:
    """Moments of the measure moved by ``h`` along x and ``k`` along y."""
    h, k = as_rat(h), as_rat(k)
    return MomentSeq2(seq.degree, {m: riesz_eval(seq, _shift_poly(m.ydeg, m.xdeg, h, k))
                                   for m in monomial_basis(seq.degree)})


def column_relations(m: MomentMat) -> list[PolyRelation]:
    """Column dependencies of a moment matrix as polynomials in X and Y."""
    if m.kind != "moment":
        raise ValueError("column relations are defined for moment matrices only")
    return [PolyRelation.from_vector(m.basis, v) for v in kernel_basis(m.mat)]
