from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from scpkit.errors import NoCompletion, UnsupportedDegree
from scpkit.scp1d import WeightSeq1, scc_check, scc_complete
from scpkit.shifts import AtomicMeasure1, measure1

F = Fraction
weights = st.fractions(F(1, 4), 4, max_denominator=4)


def expected_verdict(a):
    """Closed-form answer for at most three weights: strictly increasing, then flat."""
    for i in range(len(a) - 1):
        if a[i] > a[i + 1]:
            return False
        if a[i] == a[i + 1]:
            return all(x == a[i] for x in a[i:])
    return True


def test_small_completions():
    assert scc_complete(WeightSeq1((F(3, 2),))) == AtomicMeasure1.point(F(3, 2))
    assert scc_complete(WeightSeq1((1, 3))) == measure1([(0, F(2, 3)), (3, F(1, 3))])
    assert scc_complete(WeightSeq1((2, 2))) == AtomicMeasure1.point(2)
    assert scc_complete(WeightSeq1((1, 3, 3))) == measure1([(0, F(2, 3)), (3, F(1, 3))])
    assert scc_complete(WeightSeq1((F(3, 2), F(5, 3), F(9, 5)))) == \
        measure1([(1, F(1, 2)), (2, F(1, 2))])


def test_negative_verdicts():
    assert not scc_check(WeightSeq1((2, 1))).admits_completion
    assert not scc_check(WeightSeq1((1, 1, 2))).admits_completion
    with pytest.raises(NoCompletion):
        scc_complete(WeightSeq1((1, 1, 2)))


def test_degree_limit_and_validation():
    with pytest.raises(UnsupportedDegree):
        scc_complete(WeightSeq1((1, 2, 3, 4)))
    with pytest.raises(ValueError):
        WeightSeq1((1, 0))
    with pytest.raises(ValueError):
        WeightSeq1(())


def test_criterion_indices():
    v = scc_check(WeightSeq1((1, 2, 3)))
    assert (v.k, v.ell, v.hk.shape, v.hx.shape) == (1, 2, (2, 2), (2, 2))
    v = scc_check(WeightSeq1((1, 2, 3, 4)))
    assert (v.k, v.ell, v.hk.shape, v.hx.shape) == (2, 2, (3, 3), (2, 2))


@given(st.lists(weights, min_size=1, max_size=3))
@settings(max_examples=300, deadline=None)
def test_verdict_matches_closed_form(a):
    w = WeightSeq1(tuple(a))
    assert scc_check(w).admits_completion == expected_verdict(a)
    if expected_verdict(a):
        assert scc_complete(w).moments(len(a)) == w.moments()


@given(st.lists(st.tuples(st.fractions(0, 5, max_denominator=3), st.integers(1, 4)),
                min_size=1, max_size=4, unique_by=lambda p: p[0]), st.integers(0, 5))
@settings(max_examples=150, deadline=None)
def test_weights_of_a_measure_pass_the_check(pairs, m):
    total = sum(w for _, w in pairs)
    mu = measure1((t, F(w, total)) for t, w in pairs)
    g = mu.moments(m + 2)
    if any(x == 0 for x in g[:m + 2]):
        return
    w = WeightSeq1(tuple(g[i + 1] / g[i] for i in range(m + 1)))
    assert scc_check(w).admits_completion
