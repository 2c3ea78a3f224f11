import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from ltsab import reference_tables
from ltsab.coefficients import (
    CoefficientCache,
    DuplicateNodes,
    InsufficientHistory,
    NonMonotonicTimes,
    UndefinedStep,
    WrongKind,
    WrongSetCount,
    ab_coefficients,
    accumulate_full_step,
    lagrange_eval,
    lagrange_integral,
    lagrange_monomials,
    lts_small_step_beta,
    marginalize_volume,
    pair_step_table,
    standard_ab,
    two_set_beta,
)
from ltsab.selftest import eligible_steps, eligible_union_steps, random_dyadic_sets
from ltsab.time_grid import StepSequence, merge_union

from oracles import THIRD_ORDER_STEADY, steady_pattern
from strategies import distinct_nodes, dyadic_sets, increasing_times, rational


def test_lagrange_eval_examples():
    assert lagrange_eval(F(0), [F(0), F(-1), F(-2)], 0) == 1
    assert lagrange_eval(F(1), [F(0), F(-1), F(-2)], 0) == 3
    with pytest.raises(DuplicateNodes):
        lagrange_eval(F(1), [F(0), F(0)], 0)


@given(distinct_nodes(min_size=1, max_size=6), st.data())
def test_lagrange_cardinal(nodes, data):
    j = data.draw(st.integers(0, len(nodes) - 1))
    for i, x in enumerate(nodes):
        assert lagrange_eval(x, nodes, j) == (1 if i == j else 0)


@given(distinct_nodes(min_size=1, max_size=6), rational, st.data())
def test_monomials_match_evaluation(nodes, t, data):
    j = data.draw(st.integers(0, len(nodes) - 1))
    coeffs = lagrange_monomials(nodes, j)
    assert sum(c * t ** p for p, c in enumerate(coeffs)) == lagrange_eval(t, nodes, j)


def test_lagrange_integral_examples():
    assert lagrange_integral(F(0), F(1), [F(0), F(-1)], 0) == F(3, 2)
    assert lagrange_integral(F(0), F(1), [F(0), F(-1)], 1) == F(-1, 2)
    assert lagrange_integral(F(5), F(5), [F(0), F(-1), F(3)], 2) == 0


def test_ab_examples():
    assert ab_coefficients([F(0)], F(1)).alpha == (1,)
    assert ab_coefficients([F(0), F(-1)], F(1)).alpha == (F(3, 2), F(-1, 2))
    assert ab_coefficients([F(0), F(-1), F(-2)], F(1)).alpha == (F(23, 12), F(-4, 3), F(5, 12))
    assert standard_ab(3) == (F(23, 12), F(-4, 3), F(5, 12))


def test_ab_errors():
    with pytest.raises(NonMonotonicTimes):
        ab_coefficients([F(0), F(1)], F(2))
    with pytest.raises(NonMonotonicTimes):
        ab_coefficients([F(0), F(-1)], F(0))
    with pytest.raises(InsufficientHistory):
        ab_coefficients([], F(1))


def test_ab_step_is_returned():
    c = ab_coefficients([F(2), F(1)], F(5))
    assert c.step == 3 and c.order == 2


@given(increasing_times(min_size=2, max_size=7))
def test_ab_variable_step_integrates_polynomials(times):
    # exact for polynomials of degree < k: check t^p against its antiderivative
    *past, t_next = times
    past = past[::-1]
    c = ab_coefficients(past, t_next)
    for p in range(len(past)):
        lhs = c.step * sum(a * t ** p for a, t in zip(c.alpha, past))
        assert lhs == (t_next ** (p + 1) - past[0] ** (p + 1)) / (p + 1)


def test_float_mode_ab():
    c = ab_coefficients([0.0, -1.0, -2.0], 1.0)
    assert all(isinstance(a, float) for a in c.alpha)
    assert c.alpha == pytest.approx([23 / 12, -4 / 3, 5 / 12], rel=1e-15)


def steady_grid(history=12):
    a, b = steady_pattern(history)
    return merge_union([StepSequence("A", a), StepSequence("B", b)]), a, b


def keyed(table, a, b):
    return {(a[qa], b[qb]): v for (qa, qb), v in table.entries.items()}


def test_full_step_third_order_steady():
    g, a, b = steady_grid()
    for (s, t0, _), want in THIRD_ORDER_STEADY.items():
        times = a if s == "A" else b
        assert keyed(accumulate_full_step(g, 3, s, times.index(t0)), a, b) == want
    assert keyed(accumulate_full_step(g, 3, "A", a.index(0)), a, b)[(0, 1)] == F(115, 64)


def test_full_step_second_order_large():
    g, a, b = steady_grid()
    got = keyed(accumulate_full_step(g, 2, "A", a.index(0)), a, b)
    assert got == {(0, 1): F(9, 8), (0, 0): F(1, 2), (0, -1): F(-1, 8), (-2, 1): F(-3, 8), (-2, -1): F(-1, 8)}


def test_marginals_of_third_order_tables():
    g, a, b = steady_grid()
    table_a = accumulate_full_step(g, 3, "A", a.index(0))
    table_b = accumulate_full_step(g, 3, "B", b.index(0))
    assert marginalize_volume(table_a, "A").alpha == standard_ab(3)
    assert marginalize_volume(table_b, "B").alpha == standard_ab(3)
    with pytest.raises(WrongKind):
        marginalize_volume(table_a, "B")
    with pytest.raises(WrongKind):
        marginalize_volume(lts_small_step_beta(g, 3, 20), "A")


def test_identical_grids_are_diagonal():
    times = list(range(-5, 5))
    g = merge_union([StepSequence(0, times), StepSequence(1, times)])
    for n in range(3, 8):
        beta = lts_small_step_beta(g, 3, n)
        alpha = ab_coefficients([times[n - i] for i in range(3)], times[n + 1]).alpha
        assert beta.entries == {(n - i, n - i): alpha[i] for i in range(3)}
        assert two_set_beta(g, 3, n).entries == beta.entries
    full = accumulate_full_step(g, 3, 0, 4)
    assert marginalize_volume(full, 0).alpha == standard_ab(3)
    assert all(q[0] == q[1] for q in full.entries)


def test_transition_entry_two_thirds():
    a = list(range(-12, 12, 2))
    b = [t for t in range(-12, 12) if t >= 0 or t % 2 == 0]
    g = merge_union([StepSequence("A", a), StepSequence("B", b)])
    n = g.times.index(1)
    small = two_set_beta(g, 3, n)
    # normalized by the small step, which is 1 here
    assert small[(a.index(-4), b.index(1))] == F(2, 3)


def test_small_step_errors():
    g = merge_union([StepSequence(0, [0, 1, 2, 3]), StepSequence(1, [0, 2, 3])])
    with pytest.raises(InsufficientHistory):
        lts_small_step_beta(g, 3, 1)
    with pytest.raises(UndefinedStep):
        accumulate_full_step(g, 2, 0, 3)
    three = merge_union([StepSequence(i, [0, 1, 2, 3]) for i in range(3)])
    with pytest.raises(WrongSetCount):
        two_set_beta(three, 2, 2)


def test_float_agrees_with_rational_on_reference_patterns():
    for name in ("steady", "lts_decrease", "lts_increase", "gts_decrease", "gts_increase"):
        a, b = reference_tables.pattern(name)
        exact = merge_union([StepSequence("A", a), StepSequence("B", b)])
        approx = merge_union([StepSequence("A", [float(t) for t in a]), StepSequence("B", [float(t) for t in b])])
        for k in (2, 3, 4):
            for s, times in (("A", a), ("B", b)):
                for m in range(times.index(-2), times.index(6)):
                    ex = accumulate_full_step(exact, k, s, m).entries
                    fl = accumulate_full_step(approx, k, s, m).entries
                    assert ex.keys() == fl.keys()
                    for q, v in ex.items():
                        assert math.isclose(fl[q], float(v), rel_tol=1e-13, abs_tol=1e-13)


@settings(max_examples=200)
@given(st.integers(2, 6).flatmap(lambda k: st.tuples(st.just(k), dyadic_sets(k))))
def test_two_set_collapse_matches_general(arg):
    k, seqs = arg
    g = merge_union(seqs)
    for n in eligible_union_steps(g, k):
        assert two_set_beta(g, k, n).entries == lts_small_step_beta(g, k, n).entries


def test_three_sets_volume_identity():
    rng = random.Random(3)
    for k in (2, 3):
        for _ in range(5):
            seqs = random_dyadic_sets(rng, n_sets=3, length=k + 4)
            g = merge_union(seqs)
            for s in g.set_ids:
                times = g.set_times[s]
                for m in eligible_steps(g, k, s):
                    got = marginalize_volume(accumulate_full_step(g, k, s, m), s).alpha
                    assert got == ab_coefficients(times[m - k + 1:m + 1][::-1], times[m + 1]).alpha


def test_pair_table_matches_full_grid():
    g, a, b = steady_grid()
    m = a.index(0)
    full = keyed(accumulate_full_step(g, 3, "A", m), a, b)
    own = tuple(a[m - 2:m + 2])
    other = tuple(t for t in b if -2 <= t < 2)
    assert pair_step_table(3, own, other) == full


def test_cache_is_translation_and_scale_invariant():
    cache = CoefficientCache()
    base = cache.pair(3, [-4, -2, 0, 2], [-2, -1, 0, 1])
    shifted = cache.pair(3, [96, 98, 100, 102], [98, 99, 100, 101])
    scaled = cache.pair(3, [-32, -16, 0, 16], [-16, -8, 0, 8])
    assert cache.misses == 1
    assert [c for *_, c in base] == [c for *_, c in shifted] == [c for *_, c in scaled]
    assert [(a + 100, b + 100) for a, b, _ in base] == [(a, b) for a, b, _ in shifted]
    assert cache.ab([0, -1, -2], 1) == cache.ab([80, 72, 64], 88)
