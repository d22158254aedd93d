"""Weighted-shift weights, their moments, and finitely atomic Berger measures.

Weights are stored squared.  Weight families use the shift index
``k = (k1, k2)`` where ``k1`` counts steps in the x direction (the ``alpha``
weights) and ``k2`` steps in the y direction (the ``beta`` weights).  The
moment tables of :mod:`scpkit.moments2d` are indexed the other way round
(y-degree first); :func:`shift_to_table` and :func:`table_to_shift` are the
only places where the two conventions meet.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ConsistencyError, OrderError, PositivityError
from .exactla import QuadExt, Scalar, as_rat
from .moments2d import Monomial, MomentSeq2, monomial_basis

Index = tuple[int, int]


def shift_to_table(k: Index) -> Monomial:
    """Shift index (x-steps, y-steps) to moment-table key (y-degree, x-degree)."""
    return Monomial(k[1], k[0])


def table_to_shift(m: Sequence[int]) -> Index:
    return (m[1], m[0])


def _indices(m: int) -> list[Index]:
    return [(k1, d - k1) for d in range(m + 1) for k1 in range(d, -1, -1)]


@dataclass(frozen=True)
class WeightFamily2:
    """Squared weights ``alpha_k**2`` and ``beta_k**2`` for ``|k| <= m``."""

    m: int
    alpha_sq: Mapping[Index, Fraction]
    beta_sq: Mapping[Index, Fraction]

    def __post_init__(self):
        need = set(_indices(self.m))
        for name in ("alpha_sq", "beta_sq"):
            table = {tuple(k): as_rat(v) for k, v in dict(getattr(self, name)).items()}
            if set(table) != need:
                raise ValueError(f"{name} must have exactly the indices |k| <= {self.m}")
            if any(v <= 0 for v in table.values()):
                raise ValueError(f"{name} entries must be positive")
            object.__setattr__(self, name, table)

    def __hash__(self) -> int:
        return hash((self.m, tuple(sorted(self.alpha_sq.items())),
                     tuple(sorted(self.beta_sq.items()))))

    def truncate(self, m: int) -> "WeightFamily2":
        keep = set(_indices(m))
        return WeightFamily2(m, {k: v for k, v in self.alpha_sq.items() if k in keep},
                             {k: v for k, v in self.beta_sq.items() if k in keep})


def check_commutative(w: WeightFamily2) -> bool:
    """Squared commutativity ``beta[k+e1] alpha[k] == alpha[k+e2] beta[k]``."""
    for k1, k2 in _indices(w.m - 1):
        if w.beta_sq[(k1 + 1, k2)] * w.alpha_sq[(k1, k2)] != \
                w.alpha_sq[(k1, k2 + 1)] * w.beta_sq[(k1, k2)]:
            return False
    return True


def _path_moment(w: WeightFamily2, k: Index, x_first: bool) -> Fraction:
    k1, k2 = k
    g = Fraction(1)
    if x_first:
        for t in range(k1):
            g *= w.alpha_sq[(t, 0)]
        for t in range(k2):
            g *= w.beta_sq[(k1, t)]
    else:
        for t in range(k2):
            g *= w.beta_sq[(0, t)]
        for t in range(k1):
            g *= w.alpha_sq[(t, k2)]
    return g


def moments_from_weights(w: WeightFamily2) -> MomentSeq2:
    """Moments up to degree ``m + 1``, computed along two lattice paths."""
    if not check_commutative(w):
        raise ValueError("weight family is not commutative")
    table = {}
    for k in _indices(w.m + 1):
        g = _path_moment(w, k, x_first=True)
        if g != _path_moment(w, k, x_first=False):
            raise ConsistencyError(f"moment {k} depends on the path")
        table[shift_to_table(k)] = g
    return MomentSeq2(w.m + 1, table)


def weights_from_moments(seq: MomentSeq2, m: int | None = None) -> WeightFamily2:
    """Squared weights as quotients of consecutive moments."""
    m = seq.degree - 1 if m is None else m
    alpha, beta = {}, {}
    for k in _indices(m):
        g = seq.table[shift_to_table(k)]
        if g == 0:
            raise PositivityError(f"moment at shift index {k} vanishes")
        alpha[k] = seq.table[shift_to_table((k[0] + 1, k[1]))] / g
        beta[k] = seq.table[shift_to_table((k[0], k[1] + 1))] / g
        if alpha[k] == 0 or beta[k] == 0:
            raise PositivityError(f"a moment next to shift index {k} vanishes")
    return WeightFamily2(m, alpha, beta)


# -- measures -------------------------------------------------------------

def _as_quad(value) -> QuadExt:
    return QuadExt.coerce(value)


def _check_conjugate_closed(keys: list, densities: list[QuadExt], conj) -> None:
    pairs = dict(zip(keys, densities))
    for key, rho in pairs.items():
        ck = conj(key)
        if ck != key and pairs.get(ck) != rho.conjugate():
            raise ValueError("irrational atoms must come with their conjugates")


@dataclass(frozen=True)
class AtomicMeasure1:
    """``sum(density * delta_atom)`` on the half line, atoms sorted increasingly."""

    atoms: tuple[QuadExt, ...]
    densities: tuple[QuadExt, ...]

    def __post_init__(self):
        atoms = [_as_quad(t) for t in self.atoms]
        rhos = [_as_quad(r) for r in self.densities]
        if len(atoms) != len(rhos) or not atoms:
            raise ValueError("need one density per atom and at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atoms must be distinct")
        if any(r.sign() <= 0 for r in rhos):
            raise ValueError("densities must be positive")
        if sum(rhos, QuadExt(0)) != 1:
            raise ValueError("densities must sum to 1")
        _check_conjugate_closed(atoms, rhos, QuadExt.conjugate)
        order = sorted(range(len(atoms)), key=lambda i: _SortKey(atoms[i]))
        object.__setattr__(self, "atoms", tuple(atoms[i] for i in order))
        object.__setattr__(self, "densities", tuple(rhos[i] for i in order))

    @classmethod
    def point(cls, t) -> "AtomicMeasure1":
        return cls((t,), (1,))

    def moment(self, n: int) -> Fraction:
        total = sum((r * t ** n for t, r in zip(self.atoms, self.densities)), QuadExt(0))
        if not total.is_rational:
            raise ConsistencyError("irrational moment from a conjugate-closed measure")
        return total.p

    def moments(self, n: int) -> list[Fraction]:
        return [self.moment(i) for i in range(n + 1)]

    def __str__(self) -> str:
        return format_measure(self)


@dataclass(frozen=True)
class AtomicMeasure2:
    """``sum(density * delta_(x, y))`` on the closed quadrant, atoms sorted."""

    atoms: tuple[tuple[QuadExt, QuadExt], ...]
    densities: tuple[QuadExt, ...]

    def __post_init__(self):
        atoms = [(_as_quad(x), _as_quad(y)) for x, y in self.atoms]
        rhos = [_as_quad(r) for r in self.densities]
        if len(atoms) != len(rhos) or not atoms:
            raise ValueError("need one density per atom and at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atoms must be distinct")
        if any(r.sign() <= 0 for r in rhos):
            raise ValueError("densities must be positive")
        if sum(rhos, QuadExt(0)) != 1:
            raise ValueError("densities must sum to 1")
        _check_conjugate_closed(atoms, rhos, lambda a: (a[0].conjugate(), a[1].conjugate()))
        order = sorted(range(len(atoms)),
                       key=lambda i: (_SortKey(atoms[i][0]), _SortKey(atoms[i][1])))
        object.__setattr__(self, "atoms", tuple(atoms[i] for i in order))
        object.__setattr__(self, "densities", tuple(rhos[i] for i in order))

    @classmethod
    def point(cls, x, y) -> "AtomicMeasure2":
        return cls(((x, y),), (1,))

    def swapped(self) -> "AtomicMeasure2":
        """Image under ``(x, y) -> (y, x)``."""
        return AtomicMeasure2(tuple((y, x) for x, y in self.atoms), self.densities)

    def in_closed_quadrant(self) -> bool:
        return all(x.sign() >= 0 and y.sign() >= 0 for x, y in self.atoms)

    def has_open_quadrant_atom(self) -> bool:
        return any(x.sign() > 0 and y.sign() > 0 for x, y in self.atoms)

    def __str__(self) -> str:
        return format_measure(self)


class _SortKey:
    """Total order on QuadExt values for canonical atom ordering."""

    __slots__ = ("v",)

    def __init__(self, v: QuadExt):
        self.v = v

    def __lt__(self, other: "_SortKey") -> bool:
        try:
            return self.v < other.v
        except ValueError:  # different quadratic fields; fall back to a fixed order
            return (self.v.radicand, self.v.p, self.v.q) < (other.v.radicand, other.v.p, other.v.q)

    def __eq__(self, other) -> bool:
        return self.v == other.v


def format_measure(mu) -> str:
    """Render a measure in delta notation, e.g. ``1/2 δ_{(0,1)} + 1/2 δ_{(2,3)}``."""
    terms = []
    for atom, rho in zip(mu.atoms, mu.densities):
        where = f"({atom[0]},{atom[1]})" if isinstance(atom, tuple) else str(atom)
        delta = f"δ_{{{where}}}"
        terms.append(delta if rho == 1 else f"({rho}) {delta}" if not rho.is_rational
                     else f"{rho} {delta}")
    return " + ".join(terms)


def moments_of_measure(mu: AtomicMeasure2, degree: int) -> MomentSeq2:
    """Exact moments ``gamma[i, j] = sum(rho * y**i * x**j)`` up to ``degree``."""
    table = {}
    if all(r.is_rational and x.is_rational and y.is_rational
           for (x, y), r in zip(mu.atoms, mu.densities)):
        # plain Fractions are much faster than QuadExt for the common case
        pts = [(x.p, y.p, r.p) for (x, y), r in zip(mu.atoms, mu.densities)]
        for m in monomial_basis(degree):
            table[m] = sum((r * y ** m.ydeg * x ** m.xdeg for x, y, r in pts), Fraction(0))
        return MomentSeq2(degree, table)
    for m in monomial_basis(degree):
        total = sum((rho * y ** m.ydeg * x ** m.xdeg
                     for (x, y), rho in zip(mu.atoms, mu.densities)), QuadExt(0))
        if not total.is_rational:
            raise ConsistencyError(f"moment {m} of a conjugate-closed measure is irrational")
        table[m] = total.p
    return MomentSeq2(degree, table)


def weights_from_measure(mu: AtomicMeasure2, depth: int) -> WeightFamily2:
    """Squared weights of the shift whose Berger measure is ``mu``, for ``|k| <= depth``."""
    if not mu.in_closed_quadrant():
        raise ValueError("atoms must lie in the closed first quadrant")
    w = weights_from_moments(moments_of_measure(mu, depth + 1), depth)
    if not check_commutative(w):
        raise ConsistencyError("weights of a measure failed commutativity")
    return w


def marginals(mu: AtomicMeasure2) -> tuple[AtomicMeasure1, AtomicMeasure1]:
    """The x- and y-marginals of a product-space measure."""
    out = []
    for axis in (0, 1):
        mass: dict[QuadExt, QuadExt] = {}
        for atom, rho in zip(mu.atoms, mu.densities):
            mass[atom[axis]] = mass.get(atom[axis], QuadExt(0)) + rho
        out.append(AtomicMeasure1(tuple(mass), tuple(mass.values())))
    return out[0], out[1]


def restricted_measure(xi: AtomicMeasure1, h: int) -> AtomicMeasure1:
    """Berger measure ``t**h dxi / gamma_h`` of the shift with ``h`` basis vectors removed."""
    gamma_h = xi.moment(h)
    if gamma_h == 0:
        raise PositivityError(f"gamma_{h} vanishes")
    kept = [(t, r * t ** h / gamma_h) for t, r in zip(xi.atoms, xi.densities)]
    kept = [(t, r) for t, r in kept if r]
    return AtomicMeasure1(tuple(t for t, _ in kept), tuple(r for _, r in kept))


# -- one-variable recursive shifts -----------------------------------------

@dataclass(frozen=True)
class RecursiveMeasure1:
    """Moments generated by ``gamma[n+2] = phi0*gamma[n] + phi1*gamma[n+1]``."""

    phi0: Fraction
    phi1: Fraction
    gamma0: Fraction
    gamma1: Fraction

    def __post_init__(self):
        for name in ("phi0", "phi1", "gamma0", "gamma1"):
            object.__setattr__(self, name, as_rat(getattr(self, name)))

    def check_positive(self, n: int) -> bool:
        return all(g > 0 for g in recursive_moments(self, n))


def recursive_moments(r: RecursiveMeasure1, n: int) -> list[Fraction]:
    """``[gamma_0, ..., gamma_n]`` under the two-step recursion."""
    out = [r.gamma0, r.gamma1]
    while len(out) < n + 1:
        out.append(r.phi0 * out[-2] + r.phi1 * out[-1])
    return out[:n + 1]


def two_atom_from_recursion(phi0: Fraction, phi1: Fraction, gamma1: Fraction) -> AtomicMeasure1:
    """Probability measure on the roots of ``t**2 - phi1*t - phi0`` with first moment ``gamma1``."""
    disc = phi1 * phi1 + 4 * phi0
    if disc <= 0:
        raise ValueError("generating function has no two distinct real roots")
    t0 = QuadExt(phi1 / 2, Fraction(-1, 2), disc)
    t1 = QuadExt(phi1 / 2, Fraction(1, 2), disc)
    rho1 = (QuadExt(gamma1) - t0) / (t1 - t0)
    return AtomicMeasure1((t0, t1), (1 - rho1, rho1))


def abc_measure(a: Scalar, b: Scalar, c: Scalar) -> tuple[RecursiveMeasure1, AtomicMeasure1]:
    """Two-atomic Berger measure of the shift with squared weights ``a < b < c``."""
    a, b, c = as_rat(a), as_rat(b), as_rat(c)
    if not 0 < a < b < c:
        raise OrderError(f"need 0 < a < b < c, got {a}, {b}, {c}")
    g1, g2, g3 = a, a * b, a * b * c
    # g2 = phi0 + phi1*g1 and g3 = phi0*g1 + phi1*g2
    det = g2 - g1 * g1
    phi1 = (g3 - g1 * g2) / det
    phi0 = g2 - phi1 * g1
    rec = RecursiveMeasure1(phi0, phi1, Fraction(1), g1)
    mu = two_atom_from_recursion(phi0, phi1, g1)
    for t in mu.atoms:
        if t.sign() < 0 or t * t - phi1 * t - phi0 != 0:
            raise ConsistencyError("abc atoms are not nonnegative roots of the generating function")
    if mu.moments(3) != [1, g1, g2, g3]:
        raise ConsistencyError("abc measure does not interpolate its data")
    return rec, mu


def measure1(pairs: Iterable[tuple[Scalar, Scalar]]) -> AtomicMeasure1:
    """Convenience constructor from ``(atom, density)`` pairs."""
    pairs = list(pairs)
    return AtomicMeasure1(tuple(t for t, _ in pairs), tuple(r for _, r in pairs))


def measure2(triples: Iterable[tuple[Scalar, Scalar, Scalar]]) -> AtomicMeasure2:
    """Convenience constructor from ``(x, y, density)`` triples."""
    triples = list(triples)
    return AtomicMeasure2(tuple((x, y) for x, y, _ in triples), tuple(r for *_, r in triples))
