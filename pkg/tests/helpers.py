"""Shared generators and oracles for the solver tests."""
from fractions import Fraction
import random

import sympy

from scpkit.exactla import is_psd
from scpkit.scp2d import QuadraticData, quadratic_scp
from scpkit.shifts import measure2, moments_of_measure


def random_rat(rng: random.Random, num: int = 9, den: int = 6) -> Fraction:
    return Fraction(rng.randint(1, num), rng.randint(1, den))


def random_quadratic(rng: random.Random) -> QuadraticData:
    return QuadraticData(*(random_rat(rng) for _ in range(5)))


def quadratic_from_measure(rng: random.Random) -> QuadraticData:
    """Data read off a random atomic measure with an open-quadrant atom, so M(1) is PSD."""
    while True:
        n = rng.randint(1, 4)
        pts = {(Fraction(rng.randint(0, 4)), Fraction(rng.randint(0, 4))) for _ in range(n)}
        pts.add((Fraction(rng.randint(1, 4)), Fraction(rng.randint(1, 4))))
        pts = sorted(pts)
        ws = [rng.randint(1, 5) for _ in pts]
        mu = measure2((x, y, Fraction(w, sum(ws))) for (x, y), w in zip(pts, ws))
        seq = moments_of_measure(mu, 2)
        if seq[(0, 1)] == 0 or seq[(1, 0)] == 0 or seq[(1, 1)] == 0:
            continue
        a, b = seq[(0, 1)], seq[(1, 0)]
        return QuadraticData(a, b, seq[(0, 2)] / a, seq[(2, 0)] / b, seq[(1, 1)] / b)


def sym(x) -> sympy.Rational:
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def variety_oracle(result):
    """Independent recomputation with sympy: solve the column relations of M(2),
    fit densities to the degree <= 2 moments and integrate directly."""
    x, y = sympy.symbols("x y")
    mono = {(0, 0): 1, (0, 1): x, (1, 0): y, (0, 2): x ** 2, (1, 1): x * y, (2, 0): y ** 2}
    basis = [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    m2 = sympy.Matrix([[sym(v) for v in row] for row in result.m2.mat.tolist()])
    polys = [sum(v[i] * mono[basis[i]] for i in range(6)) for v in m2.nullspace()]
    pts = sympy.solve(polys, [x, y], dict=True) if polys else []
    atoms = sorted({(s[x], s[y]) for s in pts})
    gammas = [m2[0, i] for i in range(6)]
    rho = sympy.symbols(f"r0:{len(atoms)}")
    eqs = [sum(r * mono[basis[i]].subs({x: px, y: py}) if basis[i] != (0, 0) else r
               for r, (px, py) in zip(rho, atoms)) - gammas[i] for i in range(6)]
    sol = sympy.solve(eqs, rho, dict=True)
    assert len(sol) == 1
    return {atom: sol[0][r] for atom, r in zip(atoms, rho)}


def m1_is_psd(d: QuadraticData) -> bool:
    return is_psd(d.m1())


def solve(d: QuadraticData):
    return quadratic_scp(d)
