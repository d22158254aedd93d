"""One-variable subnormal completion: the Hankel criterion and small-m completions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConsistencyError, NoCompletion, RangeError, UnsupportedDegree
from .exactla import Mat, as_rat, is_psd, solve_in_range
from .shifts import AtomicMeasure1, abc_measure


@dataclass(frozen=True)
class WeightSeq1:
    """Squared initial weights ``alpha_0**2, ..., alpha_m**2``."""

    alpha_sq: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(as_rat(v) for v in self.alpha_sq)
        if not vals:
            raise ValueError("need at least one weight")
        if any(v <= 0 for v in vals):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "alpha_sq", vals)

    @property
    def m(self) -> int:
        return len(self.alpha_sq) - 1

    def moments(self) -> list[Fraction]:
        """``gamma_0, ..., gamma_{m+1}``."""
        out = [Fraction(1)]
        for a in self.alpha_sq:
            out.append(out[-1] * a)
        return out


@dataclass(frozen=True)
class SCCVerdict:
    m: int
    k: int
    ell: int
    hk: Mat
    hx: Mat
    psd_hk: bool
    psd_hx: bool
    range_ok: bool

    @property
    def admits_completion(self) -> bool:
        return self.psd_hk and self.psd_hx and self.range_ok


def _hankel(gammas: Sequence[Fraction], size: int, offset: int) -> Mat:
    return Mat([[gammas[i + j + offset] for j in range(size)] for i in range(size)])


def scc_check(w: WeightSeq1) -> SCCVerdict:
    """Positivity of H(k) and H_x(ell-1) plus the parity-dependent range condition."""
    m = w.m
    k = (m + 1) // 2
    ell = m // 2 + 1
    g = w.moments()
    hk = _hankel(g, k + 1, 0)
    hx = _hankel(g, ell, 1)
    psd_hk, psd_hx = is_psd(hk), is_psd(hx)
    if m % 2 == 0:
        target, lhs = Mat.column(g[k + 1:2 * k + 2]), hk
    else:
        target, lhs = Mat.column(g[ell + 1:2 * ell + 1]), hx
    try:
        solve_in_range(lhs, target)
        range_ok = True
    except RangeError:
        range_ok = False
    return SCCVerdict(m, k, ell, hk, hx, psd_hk, psd_hx, range_ok)


def _complete_increasing(alpha_sq: Sequence[Fraction]) -> AtomicMeasure1:
    if len(alpha_sq) == 1:
        return AtomicMeasure1.point(alpha_sq[0])
    if len(alpha_sq) == 2:
        a0, a1 = alpha_sq
        if a0 == a1:
            return AtomicMeasure1.point(a0)
        return AtomicMeasure1((Fraction(0), a1), (1 - a0 / a1, a0 / a1))
    return abc_measure(*alpha_sq)[1]


def scc_complete(w: WeightSeq1) -> AtomicMeasure1:
    """Berger measure of the canonical subnormal completion, for ``m <= 2``."""
    if w.m > 2:
        raise UnsupportedDegree("explicit completions are implemented for m <= 2 only")
    if not scc_check(w).admits_completion:
        raise NoCompletion(f"weights {[str(a) for a in w.alpha_sq]} admit no subnormal completion")
    vals = list(w.alpha_sq)
    # a repeated weight forces the rest of the tail to repeat it
    for i in range(len(vals) - 1):
        if vals[i] == vals[i + 1]:
            vals = vals[:i + 1]
            break
    mu = _complete_increasing(vals)
    if mu.moments(w.m + 1) != w.moments():
        raise ConsistencyError("completion does not reproduce the initial weights")
    return mu
