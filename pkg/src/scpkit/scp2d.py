"""Two-variable subnormal completion.

Three solvers live here:

* :func:`quadratic_scp` completes any quadratic weight family (five squared
  weights) whose 3x3 moment matrix is positive semi-definite, by choosing four
  new weights so the quartic moment matrix is a flat extension with positive
  localizing matrices, and reading the Berger measure off its column
  relations.
* :func:`singular_m2` completes a degree-two family whose quadratic moment
  matrix is singular, using range inclusion and the flat corner ``W^T A W``.
* :func:`flat_obstruction_check` proves that a rank-deficient M(2) with a
  single relation ``(X - h)(Y - k) = 0`` has no flat extension M(3).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Optional

from .errors import ConsistencyError, NoCompletion, NotSingular, RangeError
from .exactla import Mat, as_rat, det, flat_complete, is_psd, rank, rref
from .moments2d import (Monomial, MomentMat, MomentSeq2, PolyRelation, column_relations,
                        hyponormality_matrix, is_moment_matrix, localizing_matrix,
                        moment_matrix, monomial_basis)
from .shifts import (AtomicMeasure2, WeightFamily2, check_commutative, moments_from_weights,
                     moments_of_measure, two_atom_from_recursion, weights_from_measure)

ONE, X, Y = Monomial(0, 0), Monomial(0, 1), Monomial(1, 0)
X2, YX, Y2 = Monomial(0, 2), Monomial(1, 1), Monomial(2, 0)
X3 = Monomial(0, 3)


@dataclass(frozen=True)
class QuadraticData:
    """Squared weights a=alpha00, b=beta00, c=alpha10, d=beta01, e=alpha01.

    The sixth weight f=beta10 is forced by commutativity: ``a*f == b*e``.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction

    def __post_init__(self):
        for name in "abcde":
            v = as_rat(getattr(self, name))
            if v <= 0:
                raise ValueError(f"weight {name} must be positive, got {v}")
            object.__setattr__(self, name, v)

    @property
    def f(self) -> Fraction:
        return self.b * self.e / self.a

    def swapped(self) -> "QuadraticData":
        """Exchange the roles of x and y."""
        return QuadraticData(self.b, self.a, self.d, self.c, self.f)

    def moments(self) -> MomentSeq2:
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.e
        return MomentSeq2.from_rows([[1], [a, b], [a * c, b * e, b * d]])

    def family(self) -> WeightFamily2:
        return WeightFamily2(1, {(0, 0): self.a, (1, 0): self.c, (0, 1): self.e},
                             {(0, 0): self.b, (1, 0): self.f, (0, 1): self.d})

    @classmethod
    def from_family(cls, w: WeightFamily2) -> "QuadraticData":
        if w.m != 1:
            raise ValueError("quadratic data come from a family with m = 1")
        if not check_commutative(w):
            raise ValueError("weight family is not commutative")
        al, be = w.alpha_sq, w.beta_sq
        return cls(al[(0, 0)], be[(0, 0)], al[(1, 0)], be[(0, 1)], al[(0, 1)])

    def m1(self) -> Mat:
        return moment_matrix(self.moments(), 1).mat


@dataclass(frozen=True)
class CompletionResult:
    case_tag: str
    rank_m1: int
    p: Fraction
    q: Fraction
    r: Fraction
    s: Fraction
    m2: MomentMat
    mx: MomentMat
    my: MomentMat
    measure: AtomicMeasure2
    completion: WeightFamily2
    z: Optional[Fraction] = None
    y0: Optional[Fraction] = None
    yc: Optional[Fraction] = None
    swapped: bool = False
    checks: Mapping[str, bool] = field(default_factory=dict)


def _ensure(cond: bool, msg: str) -> None:
    if not cond:
        raise ConsistencyError(msg)


def _upper_block(seq: MomentSeq2) -> Mat:
    """Rows 1, X, Y against columns X^2, YX, Y^2."""
    return Mat([[seq.table[p + q] for q in (X2, YX, Y2)] for p in (ONE, X, Y)])


def build_flat_m2(d: QuadraticData) -> tuple[Fraction, Fraction, Fraction, Fraction, MomentMat]:
    """New squared weights p, q, r, s and the flat quartic moment matrix.

    Requires ``M(1) >= 0``, ``e <= c`` and ``a < c``.
    """
    a, b, c, dd, e, f = d.a, d.b, d.c, d.d, d.e, d.f
    m1 = d.m1()
    if not is_psd(m1):
        raise NoCompletion("M(1) is not positive semi-definite")
    if not (e <= c and a < c):
        raise ValueError("build_flat_m2 needs e <= c and a < c")
    p = q = c
    if e == c:
        r, s = c, dd
    else:
        r = e * f / dd
        s = (a * a * c * dd * dd - 2 * a * b * dd * e * e + b * b * e ** 3) / (a * a * dd * (c - e))
        _ensure(s - dd == e * (a * dd - b * e) ** 2 / (a * a * dd * (c - e)), "s - d identity")
    bmat = Mat([[a * c, b * e, b * dd],
                [a * c * p, b * e * q, b * dd * r],
                [b * e * q, b * dd * r, b * dd * s]])
    try:
        cmat = flat_complete(m1, bmat)
    except RangeError as exc:
        raise ConsistencyError("upper block escaped the range of M(1)") from exc
    m2 = MomentMat(2, tuple(monomial_basis(2)), Mat.block([[m1, bmat], [bmat.T, cmat]]))
    _ensure(is_moment_matrix(m2), "flat corner is not Hankel")
    return p, q, r, s, m2


def _solve_square(v: Mat, rhs: list[Fraction]) -> list[Fraction]:
    red, pivots = rref(v.hstack(Mat.column(rhs)))
    if pivots != list(range(v.ncols)):
        raise ConsistencyError("singular interpolation system")
    return [red[i][-1] for i in range(v.ncols)]


def _densities(m2: MomentMat, atoms: list[tuple[Fraction, Fraction]]) -> list[Fraction]:
    """Solve for densities against the moments of the leading independent columns."""
    _, pivots = rref(m2.mat)
    basis = [m2.basis[i] for i in pivots]
    v = Mat([[x ** mono.xdeg * y ** mono.ydeg for x, y in atoms] for mono in basis])
    return _solve_square(v, [m2.entry(ONE, mono) for mono in basis])


def measure_from_flat(d: QuadraticData, m2: MomentMat) -> AtomicMeasure2:
    """Atoms from the variety of the column relations, densities by interpolation."""
    a, b, c, dd, e, f = d.a, d.b, d.c, d.d, d.e, d.f
    rk = rank(m2.mat)
    rels = column_relations(m2)
    if rk == 1:
        atoms = [(a, b)]
    elif rk == 2:
        atoms = [(Fraction(0), b * (c - e) / (c - a)), (c, f)]
    elif rk == 3 and c > e:
        z = (c * dd - e * f) / (c - e)
        atoms = [(Fraction(0), Fraction(0)), (Fraction(0), z), (c, f)]
        expected = [PolyRelation.from_dict({X2: 1, X: -c}),
                    PolyRelation.from_dict({YX: 1, X: -f}),
                    PolyRelation.from_dict({Y2: 1, X: -b * e * (f - dd) / (a * (c - e)), Y: -z})]
        _ensure(sorted(rels) == sorted(expected), "column relations differ from closed form")
    elif rk == 3:
        atoms = [(Fraction(0), Fraction(0)), (c, Fraction(0)), (c, dd)]
    else:
        raise ConsistencyError(f"unexpected rank {rk} for a flat M(2)")
    for rel in rels:
        for x, y in atoms:
            _ensure(rel.evaluate(x, y) == 0, f"atom ({x},{y}) misses relation {rel}")
    rho = _densities(m2, atoms)
    if rk == 3 and c > e:
        dm1 = det(d.m1())
        _ensure(rho == [dm1 / (a * b * (c * dd - e * f)),
                        b * (c - e) ** 2 / (c * (c * dd - e * f)), a / c],
                "densities differ from closed form")
    try:
        mu = AtomicMeasure2(tuple(atoms), tuple(rho))
    except ValueError as exc:
        raise ConsistencyError(f"invalid measure from flat extension: {exc}") from exc
    _ensure(moment_matrix(moments_of_measure(mu, 4), 2).mat == m2.mat,
            "measure does not interpolate M(2)")
    return mu


def _point_or_vertical(a: Fraction, b: Fraction, dd: Fraction) -> AtomicMeasure2:
    if b == dd:
        return AtomicMeasure2.point(a, b)
    return AtomicMeasure2(((a, Fraction(0)), (a, dd)), (1 - b / dd, b / dd))


def _finish(tag: str, rk: int, mu: AtomicMeasure2, family: WeightFamily2, depth: int,
            **extra) -> CompletionResult:
    seq = moments_of_measure(mu, 4)
    m2 = moment_matrix(seq, 2)
    mx = localizing_matrix(seq, 1, "x")
    my = localizing_matrix(seq, 1, "y")
    n_x0 = sum(1 for x, _ in mu.atoms if x == 0)
    n_y0 = sum(1 for _, y in mu.atoms if y == 0)
    checks = {
        "flat": rank(m2.mat) == rk,
        "psd_m2": is_psd(m2.mat),
        "psd_mx": is_psd(mx.mat),
        "psd_my": is_psd(my.mat),
        "hankel": is_moment_matrix(m2),
        "interpolates": verify_completion(family, mu),
        "atom_count": len(mu.atoms) == rk,
        "atoms_on_x_axis": n_x0 == rk - rank(mx.mat),
        "atoms_on_y_axis": n_y0 == rk - rank(my.mat),
    }
    failed = [k for k, ok in checks.items() if not ok]
    _ensure(not failed, f"completion invariants failed: {failed}")
    completion = weights_from_measure(mu, depth)
    al, be = completion.alpha_sq, completion.beta_sq
    return CompletionResult(tag, rk, al[(2, 0)], al[(1, 1)], al[(0, 2)], be[(0, 2)],
                            m2, mx, my, mu, completion, checks=checks, **extra)


def quadratic_scp(d: QuadraticData, depth: int = 6) -> CompletionResult:
    """Subnormal completion of quadratic data, or NoCompletion when M(1) is not PSD."""
    if depth < 2:
        raise ValueError("depth must be at least 2")
    a, b, c, dd, e, f = d.a, d.b, d.c, d.d, d.e, d.f
    m1 = d.m1()
    if not is_psd(m1):
        raise NoCompletion("M(1) is not positive semi-definite")
    rk = rank(m1)
    family = d.family()
    if rk == 1:
        return _finish("rank1", rk, AtomicMeasure2.point(a, b), family, depth)
    if a == c:
        _ensure(e == a and f == b and b <= dd, "a = c branch without a = e, b = f <= d")
        return _finish("a_eq_c", rk, _point_or_vertical(a, b, dd), family, depth)
    if c < e:
        inner = quadratic_scp(d.swapped(), depth)
        return _finish(inner.case_tag + "_swapped", rk, inner.measure.swapped(), family, depth,
                       z=inner.z, y0=inner.y0, yc=inner.yc, swapped=True)
    p, q, r, s, m2 = build_flat_m2(d)
    mu = measure_from_flat(d, m2)
    extra = {}
    if rk == 2:
        tag = "rank2"
        extra["y0"] = b * (c - e) / (c - a)
        extra["yc"] = (c * f - b * e) / (c - a)
        _ensure(extra["yc"] == f, "y_c differs from f")
    elif e == c:
        tag = "rank3_e_eq_c"
    else:
        tag = "rank3_e_lt_c"
        extra["z"] = (c * dd - e * f) / (c - e)
    result = _finish(tag, rk, mu, family, depth, **extra)
    _ensure((result.p, result.q, result.r, result.s) == (p, q, r, s),
            "completion weights differ from the constructed extension")
    _ensure(result.m2.mat == m2.mat, "measure moments differ from the flat extension")
    return result


def verify_completion(w: WeightFamily2, mu: AtomicMeasure2) -> bool:
    """Does ``mu`` reproduce every moment of ``w`` from a closed-quadrant support?"""
    if not (mu.in_closed_quadrant() and mu.has_open_quadrant_atom()):
        return False
    if not check_commutative(w):
        return False
    try:
        got = moments_of_measure(mu, w.m + 1)
    except ConsistencyError:
        return False
    return got == moments_from_weights(w)


# -- singular m = 2 ----------------------------------------------------------

def singular_weight_identities(w: WeightFamily2) -> dict[str, Optional[bool]]:
    """Closed-form consistency identities for singular degree-two data.

    Each value is True/False, or None when the formula's denominator vanishes.
    """
    al, be = w.alpha_sq, w.beta_sq
    a00, a10, a01 = al[(0, 0)], al[(1, 0)], al[(0, 1)]
    a20, a11, a02 = al[(2, 0)], al[(1, 1)], al[(0, 2)]
    b00, b01, b02 = be[(0, 0)], be[(0, 1)], be[(0, 2)]
    out: dict[str, Optional[bool]] = {}

    def check(name, num, den, actual):
        out[name] = None if den == 0 else num / den == actual

    check("beta01", a00 * b00 * a10 - 2 * a00 * b00 * a01 + b00 * a01 ** 2,
          a00 * (a10 - a00), b01)
    check("alpha20", a00 * a10 ** 2 - a00 * a10 * a01 + a00 * a01 * a11 - a10 * a01 * a11,
          a10 * (a00 - a01), a20)
    check("alpha11", a00 * a10 * a01 - a00 * a01 ** 2 - a00 * a10 * a02
          + 2 * a00 * a01 * a02 - a01 ** 2 * a02,
          a01 * (a00 - a01), a11)
    check("alpha02", a00 * (b00 * a10 - b00 * a01 + a00 * b02 - a10 * b02),
          b00 * (a00 - a01), a02)
    return out


def _two_atom_measure(m2: MomentMat, seq: MomentSeq2) -> AtomicMeasure2:
    rels = {rel.terms[0][0]: rel for rel in column_relations(m2)}
    # pick the variable that is independent of the constant column
    main, other, main_sq = (X, Y, X2) if X not in rels else (Y, X, Y2)
    if main in rels or main_sq not in rels or other not in rels:
        raise ConsistencyError("rank-two M(2) without the expected column relations")
    sq_rel, lin_rel = rels[main_sq], rels[other]
    lam2, lam1 = -sq_rel.coefficient(main), -sq_rel.coefficient(ONE)
    slope, icpt = -lin_rel.coefficient(main), -lin_rel.coefficient(ONE)
    first = seq.table[main]
    try:
        marginal = two_atom_from_recursion(lam1, lam2, first)
    except ValueError as exc:
        raise NoCompletion(f"no real two-point support: {exc}") from exc
    pts = []
    for t in marginal.atoms:
        u = t * slope + icpt
        pts.append((t, u) if main == X else (u, t))
    return AtomicMeasure2(tuple(pts), marginal.densities)


def singular_m2(w: WeightFamily2, depth: int = 6) -> CompletionResult:
    """Completion of a degree-two family whose quadratic moment matrix is singular."""
    if w.m != 2:
        raise ValueError("singular_m2 needs a weight family with m = 2")
    if not check_commutative(w):
        raise ValueError("weight family is not commutative")
    seq = moments_from_weights(w)
    amat = moment_matrix(seq, 1).mat
    if not is_psd(amat):
        raise NoCompletion("M(1) is not positive semi-definite")
    if det(amat) != 0:
        raise NotSingular("M(1) is invertible")
    bmat = _upper_block(seq)
    try:
        cmat = flat_complete(amat, bmat)
    except RangeError as exc:
        raise NoCompletion("Ran B is not contained in Ran M(1)") from exc
    m2 = MomentMat(2, tuple(monomial_basis(2)), Mat.block([[amat, bmat], [bmat.T, cmat]]))
    if not is_moment_matrix(m2):
        raise NoCompletion("flat corner W^T A W is not Hankel")
    mx, my = localizing_matrix(seq, 1, "x"), localizing_matrix(seq, 1, "y")
    if not (is_psd(mx.mat) and is_psd(my.mat)):
        raise NoCompletion("a localizing matrix is not positive semi-definite")
    identities = singular_weight_identities(w)
    _ensure(all(v is not False for v in identities.values()),
            f"closed-form identities disagree with range inclusion: {identities}")
    rk = rank(amat)
    if rk == 1:
        mu = AtomicMeasure2.point(seq[(0, 1)], seq[(1, 0)])
    else:
        mu = _two_atom_measure(m2, seq)
    if not (mu.in_closed_quadrant() and mu.has_open_quadrant_atom()):
        raise NoCompletion("representing measure leaves the quadrant")
    _ensure(moment_matrix(moments_of_measure(mu, 4), 2).mat == m2.mat,
            "two-atom measure does not interpolate M(2)")
    result = _finish(f"singular_rank{rk}", rk, mu, w, depth)
    checks = dict(result.checks)
    checks.update({f"identity_{k}": v for k, v in identities.items() if v is not None})
    return replace(result, checks=checks)


# -- obstruction to flat extensions -----------------------------------------

@dataclass(frozen=True)
class AffineForm:
    """``const + sum(coef * param)`` over rationals."""

    const: Fraction = Fraction(0)
    coeffs: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def param(cls, name: str) -> "AffineForm":
        return cls(Fraction(0), ((name, Fraction(1)),))

    @classmethod
    def of(cls, value) -> "AffineForm":
        return value if isinstance(value, AffineForm) else cls(as_rat(value))

    @staticmethod
    def _norm(coeffs: Mapping[str, Fraction]) -> tuple[tuple[str, Fraction], ...]:
        return tuple(sorted((k, v) for k, v in coeffs.items() if v != 0))

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, name: str) -> Fraction:
        return dict(self.coeffs).get(name, Fraction(0))

    def __add__(self, other) -> "AffineForm":
        other = AffineForm.of(other)
        merged = dict(self.coeffs)
        for k, v in other.coeffs:
            merged[k] = merged.get(k, Fraction(0)) + v
        return AffineForm(self.const + other.const, self._norm(merged))

    __radd__ = __add__

    def __neg__(self) -> "AffineForm":
        return AffineForm(-self.const, tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other) -> "AffineForm":
        return self + (-AffineForm.of(other))

    def __mul__(self, other) -> "AffineForm":
        other = AffineForm.of(other)
        if not other.is_constant:
            if not self.is_constant:
                raise ValueError("product of two non-constant affine forms")
            self, other = other, self
        k = other.const
        return AffineForm(self.const * k, self._norm({n: v * k for n, v in self.coeffs}))

    __rmul__ = __mul__

    def __str__(self) -> str:
        out = str(self.const) if self.const or not self.coeffs else ""
        for name, v in self.coeffs:
            term = name if abs(v) == 1 else f"{abs(v)}*{name}"
            if not out:
                out = term if v > 0 else f"-{term}"
            else:
                out += f" + {term}" if v > 0 else f" - {term}"
        return out


FREE_X5, FREE_Y5 = "g05", "g50"
_BLOCK = (ONE, X, Y, X2, Y2)
_BLOCK_LABELS = ("1", "X", "Y", "X^2", "Y^2")


@dataclass(frozen=True)
class ObstructionReport:
    status: str  # "Obstructed", "FlatFeasible" or "Unsupported"
    rank: Optional[int] = None
    relation: Optional[PolyRelation] = None
    h: Optional[Fraction] = None
    k: Optional[Fraction] = None
    propagated: Mapping[Monomial, Optional[AffineForm]] = field(default_factory=dict)
    coefficients: Mapping[str, AffineForm] = field(default_factory=dict)
    witness: Optional[tuple[Fraction, Fraction]] = None
    witness_row: Optional[Monomial] = None
    reason: str = ""


def _propagate(seq: MomentSeq2, h: Fraction, k: Fraction) -> dict[Monomial, Optional[AffineForm]]:
    """Moments up to degree 6 forced by ``y x = k x + h y - h k`` in a recursive extension."""
    g: dict[Monomial, Optional[AffineForm]] = {
        m: AffineForm(seq.table[m]) for m in monomial_basis(4)}
    g[Monomial(0, 5)] = AffineForm.param(FREE_X5)
    g[Monomial(5, 0)] = AffineForm.param(FREE_Y5)
    g[Monomial(0, 6)] = None
    g[Monomial(6, 0)] = None

    def rule(i, j):
        return (k * g[Monomial(i - 1, j)] + h * g[Monomial(i, j - 1)]
                - h * k * g[Monomial(i - 1, j - 1)])

    for deg in range(2, 5):
        for i in range(1, deg):
            _ensure(rule(i, deg - i) == g[Monomial(i, deg - i)],
                    "relation is not a column relation of M(2)")
    for deg in (5, 6):
        for i in range(1, deg):
            g[Monomial(i, deg - i)] = rule(i, deg - i)
    return g


def flat_obstruction_check(seq: MomentSeq2) -> ObstructionReport:
    """Look for a row of a recursively generated M(3) that breaks flatness."""
    if seq.degree < 4:
        return ObstructionReport("Unsupported", reason="need moments up to degree 4")
    m2 = moment_matrix(seq.truncate(4), 2)
    rk = rank(m2.mat)
    if not is_psd(m2.mat):
        return ObstructionReport("Unsupported", rk, reason="M(2) is not positive semi-definite")
    rels = column_relations(m2)
    if len(rels) != 1:
        return ObstructionReport("Unsupported", rk,
                                 reason=f"expected one column relation, found {len(rels)}")
    rel = rels[0]
    support = {m for m, _ in rel.terms}
    if rel.terms[0][0] != YX or not support <= {ONE, X, Y, YX}:
        return ObstructionReport("Unsupported", rk, rel, reason="relation is not (X-h)(Y-k)")
    k, h = -rel.coefficient(X), -rel.coefficient(Y)
    if rel.coefficient(ONE) != h * k:
        return ObstructionReport("Unsupported", rk, rel, reason="relation is not (X-h)(Y-k)")
    comp = m2.mat.submatrix([m2.basis.index(b) for b in _BLOCK],
                            [m2.basis.index(b) for b in _BLOCK])
    if det(comp) == 0:
        return ObstructionReport("Unsupported", rk, rel, h, k,
                                 reason="compression to 1, X, Y, X^2, Y^2 is singular")

    g = _propagate(seq, h, k)
    rhs = [g[b + X3] for b in _BLOCK]
    params = sorted({n for form in rhs for n, _ in form.coeffs})
    consts = _solve_square(comp, [f.const for f in rhs])
    parts = {n: _solve_square(comp, [f.coeff(n) for f in rhs]) for n in params}
    coeffs = {}
    for idx, label in enumerate(_BLOCK_LABELS):
        form = AffineForm(consts[idx])
        for n in params:
            form = form + parts[n][idx] * AffineForm.param(n)
        coeffs[label] = form

    witness = witness_row = None
    for row in monomial_basis(3):
        entries = [g[row + b] for b in _BLOCK]
        target = g[row + X3]
        if target is None or any(e is None for e in entries):
            continue
        try:
            combo = sum((coeffs[lbl] * e for lbl, e in zip(_BLOCK_LABELS, entries)),
                        AffineForm())
        except ValueError:
            continue
        if not (combo.is_constant and target.is_constant):
            continue
        if combo.const != target.const:
            witness, witness_row = (combo.const, target.const), row
            break
    status = "Obstructed" if witness else "FlatFeasible"
    return ObstructionReport(status, rk, rel, h, k, g, coeffs, witness, witness_row)


def hyponormality_window(mu: AtomicMeasure2, depth: int, ell: int = 1) -> dict[tuple[int, int], bool]:
    """PSD verdict of M_u(ell) on the completion's moments for every ``|u| <= depth - 2``."""
    seq = moments_of_measure(mu, depth - 2 + 2 * ell)
    return {tuple(u): is_psd(hyponormality_matrix(seq, u, ell).mat)
            for u in monomial_basis(depth - 2)}
