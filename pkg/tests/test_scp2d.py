from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from helpers import quadratic_from_measure, random_quadratic, sym, variety_oracle
from scpkit.errors import NoCompletion, NotSingular
from scpkit.exactla import det, is_psd, rank
from scpkit.moments2d import MomentSeq2, translate
from scpkit.scp2d import (FREE_X5, QuadraticData, build_flat_m2, singular_weight_identities,
                          flat_obstruction_check, hyponormality_window, measure_from_flat,
                          quadratic_scp, singular_m2, verify_completion)
from scpkit.shifts import (AtomicMeasure2, WeightFamily2, marginals, measure2,
                           moments_of_measure, weights_from_measure)

F = Fraction
SHIFTED = MomentSeq2.from_rows([[1], [4, 5], [17, 19, 27], [76, 77, 97, 157],
                                [354, 331, 371, 535, 972]])


def test_reference_instance():
    res = quadratic_scp(QuadraticData(1, 1, 2, 2, 1))
    assert res.case_tag == "rank3_e_lt_c"
    assert (res.p, res.q, res.r, res.s, res.z) == (2, 2, F(1, 2), F(5, 2), 3)
    assert res.measure == measure2([(0, 0, F(1, 3)), (0, 3, F(1, 6)), (2, 1, F(1, 2))])
    oracle = variety_oracle(res)
    assert oracle == {(0, 0): sym(F(1, 3)), (0, 3): sym(F(1, 6)), (2, 1): sym(F(1, 2))}


def test_build_flat_m2_examples():
    p, q, r, s, m2 = build_flat_m2(QuadraticData(1, 1, 2, 2, 1))
    assert (p, q, r, s) == (2, 2, F(1, 2), F(5, 2)) and rank(m2.mat) == 3
    p, q, r, s, m2 = build_flat_m2(QuadraticData(1, 1, 2, 3, 2))
    assert (r, s) == (2, 3)
    with pytest.raises(ValueError):
        build_flat_m2(QuadraticData(2, 1, 2, 3, 2))


def test_measure_from_flat_rank2():
    d = QuadraticData(1, 2, 2, F(5, 2), F(3, 2))
    mu = measure_from_flat(d, build_flat_m2(d)[4])
    assert mu == measure2([(0, 1, F(1, 2)), (2, 3, F(1, 2))])


@pytest.mark.parametrize("data, tag, measure", [
    ((1, 1, 1, 1, 1), "rank1", [(1, 1, 1)]),
    ((1, 2, 2, F(5, 2), F(3, 2)), "rank2", [(0, 1, F(1, 2)), (2, 3, F(1, 2))]),
    ((2, 1, 2, 3, 2), "a_eq_c", [(2, 0, F(2, 3)), (2, 3, F(1, 3))]),
    ((1, 1, 2, 3, 2), "rank3_e_eq_c", [(0, 0, F(1, 2)), (2, 0, F(1, 6)), (2, 3, F(1, 3))]),
])
def test_branches(data, tag, measure):
    res = quadratic_scp(QuadraticData(*data))
    assert res.case_tag == tag
    assert res.measure == measure2(measure)
    assert verify_completion(res.completion, res.measure)


def test_swapped_branch():
    d = QuadraticData(1, 2, 2, F(5, 2), F(3, 2))
    res = quadratic_scp(d.swapped())
    assert res.case_tag == "rank2_swapped" and res.swapped
    assert res.measure == quadratic_scp(d).measure.swapped()


def test_no_completion():
    with pytest.raises(NoCompletion):
        quadratic_scp(QuadraticData(1, 1, F(1, 2), 1, 1))


def test_verify_completion_rejects_wrong_measure():
    d = QuadraticData(1, 1, 2, 2, 1)
    assert not verify_completion(d.family(), AtomicMeasure2.point(0, 1))
    assert verify_completion(d.family(), quadratic_scp(d).measure)


def check_invariants(d, res):
    assert rank(res.m2.mat) == res.rank_m1 == rank(d.m1())
    for m in (res.m2, res.mx, res.my):
        assert is_psd(m.mat)
    assert len(res.measure.atoms) == res.rank_m1
    assert sum(res.measure.densities) == 1
    assert all(r.sign() > 0 for r in res.measure.densities)
    assert res.measure.has_open_quadrant_atom()
    assert verify_completion(d.family(), res.measure)
    assert all(res.checks.values())
    if res.case_tag == "rank3_e_lt_c":
        assert res.s >= d.d and res.r >= d.e * d.f / d.d


@given(st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_random_data(rng):
    d = random_quadratic(rng) if rng.random() < 0.5 else quadratic_from_measure(rng)
    if is_psd(d.m1()):
        check_invariants(d, quadratic_scp(d, depth=3))
        if det(d.m1()) > 0:
            assert d.c * d.d - d.e * d.f > 0
    else:
        with pytest.raises(NoCompletion):
            quadratic_scp(d)


@given(st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_swap_coherence(rng):
    d = quadratic_from_measure(rng)
    direct = quadratic_scp(d, depth=3)
    flipped = quadratic_scp(d.swapped(), depth=3)
    # both answers complete the same data, though not always with the same measure
    assert verify_completion(d.family(), flipped.measure.swapped())
    if flipped.swapped or direct.swapped or direct.rank_m1 == 1:
        assert flipped.measure.swapped() == direct.measure


def test_hyponormality_window():
    res = quadratic_scp(QuadraticData(1, 1, 2, 2, 1))
    window = hyponormality_window(res.measure, 6)
    assert len(window) == 15 and all(window.values())


def test_marginal_recursion():
    res = quadratic_scp(QuadraticData(1, 1, 2, 2, 1))
    f, z = res.completion.beta_sq[(1, 0)], res.z
    _, my = marginals(res.measure)
    g = my.moments(13)
    for n in range(1, 11):
        assert g[n + 2] == -f * z * g[n] + (f + z) * g[n + 1]


# -- singular m = 2 ------------------------------------------------------------

def family_of(*triples):
    return weights_from_measure(measure2(triples), 2)


def test_singular_two_atoms():
    w = family_of((0, 1, F(1, 2)), (2, 3, F(1, 2)))
    assert (w.alpha_sq[(2, 0)], w.alpha_sq[(1, 1)], w.alpha_sq[(0, 2)], w.beta_sq[(0, 2)]) == \
        (2, 2, F(9, 5), F(14, 5))
    res = singular_m2(w)
    assert res.case_tag == "singular_rank2"
    assert res.measure == measure2([(0, 1, F(1, 2)), (2, 3, F(1, 2))])
    assert singular_weight_identities(w) == {"beta01": True, "alpha20": True, "alpha11": True,
                                  "alpha02": True}


def test_singular_perturbed():
    w = family_of((0, 1, F(1, 2)), (2, 3, F(1, 2)))
    alpha = dict(w.alpha_sq)
    alpha[(2, 0)] = F(3)
    with pytest.raises(NoCompletion):
        singular_m2(WeightFamily2(2, alpha, w.beta_sq))


def test_singular_zero_denominators():
    w = family_of((0, 1, F(1, 2)), (2, 1, F(1, 2)))
    assert None in singular_weight_identities(w).values()
    assert singular_m2(w).measure == measure2([(0, 1, F(1, 2)), (2, 1, F(1, 2))])


def test_singular_point_mass_and_surd_atoms():
    assert singular_m2(family_of((2, 3, 1))).measure == AtomicMeasure2.point(2, 3)
    # line y = x + 1 through the roots of t^2 - 4t + 2
    from scpkit.exactla import QuadExt
    t0, t1 = QuadExt(2, -1, 2), QuadExt(2, 1, 2)
    mu = AtomicMeasure2(((t0, t0 + 1), (t1, t1 + 1)),
                        (QuadExt(F(1, 2), F(1, 4), 2), QuadExt(F(1, 2), F(-1, 4), 2)))
    res = singular_m2(weights_from_measure(mu, 2))
    assert res.measure == mu


def test_singular_rejects_invertible():
    w = family_of((0, 0, F(1, 3)), (0, 3, F(1, 6)), (2, 1, F(1, 2)))
    with pytest.raises(NotSingular):
        singular_m2(w)


# -- obstruction ----------------------------------------------------------------

def test_obstruction_reference():
    rep = flat_obstruction_check(SHIFTED)
    assert rep.status == "Obstructed" and rep.witness == (7376, 7375)
    assert (rep.h, rep.k) == (3, 4)
    assert rep.coefficients["Y"].const == 1


def test_obstruction_parameter_cancels():
    rep = flat_obstruction_check(SHIFTED)
    row = rep.witness_row
    from scpkit.scp2d import _BLOCK, _BLOCK_LABELS
    combo = sum((rep.coefficients[lbl] * rep.propagated[row + b]
                 for lbl, b in zip(_BLOCK_LABELS, _BLOCK)), start=type(rep.coefficients["1"])())
    assert combo.coeff(FREE_X5) == 0 and combo.is_constant


@pytest.mark.parametrize("h, k", [(0, 0), (1, 2), (F(1, 2), 5)])
def test_obstruction_under_translation(h, k):
    base = translate(SHIFTED, -3, -4)
    rep = flat_obstruction_check(translate(base, h, k))
    assert rep.status == "Obstructed" and (rep.h, rep.k) == (h, k)


def test_obstruction_out_of_scope():
    res = quadratic_scp(QuadraticData(1, 1, 2, 2, 1))
    assert flat_obstruction_check(moments_of_measure(res.measure, 4)).status == "Unsupported"
    assert flat_obstruction_check(SHIFTED.truncate(3)).status == "Unsupported"
