from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ltsab.time_grid import (
    NonMonotonic,
    NonRepresentable,
    StepSequence,
    TickTime,
    UnknownSet,
    UnsynchronizedStart,
    dump_grid,
    index_maps,
    load_grid,
    merge_union,
    to_ticks,
)


def test_to_ticks_examples():
    assert to_ticks(0, -40).ticks == 0
    assert to_ticks(Fraction(-1, 8), -40).ticks == -(2 ** 37)
    with pytest.raises(NonRepresentable):
        to_ticks(Fraction(1, 3), -40)


def test_to_ticks_rejects_below_resolution():
    with pytest.raises(NonRepresentable):
        to_ticks(Fraction(1, 2 ** 41), -40)


@given(st.integers(-(2 ** 60), 2 ** 60))
def test_tick_round_trip(ticks):
    t = TickTime(ticks)
    assert to_ticks(t.to_fraction()) == t


def test_tick_arithmetic_and_order():
    a, b = TickTime(5), TickTime(3)
    assert a - b == TickTime(2) and a + b == TickTime(8)
    assert b < a
    assert float(TickTime(2 ** 40)) == 1.0


def figure_pattern():
    # A evaluated at union indices {0, 2, 3, 4}, B at {0, 1, 4}
    return [StepSequence("A", [0, 2, 3, 4]), StepSequence("B", [0, 1, 4])]


def test_index_maps_example_pattern():
    g = merge_union(figure_pattern())
    assert g.times == (0, 1, 2, 3, 4)
    m_a, n_a = index_maps(g, "A")
    m_b, n_b = index_maps(g, "B")
    assert list(m_a) == [0, 0, 1, 2, 3]
    assert list(m_b) == [0, 1, 1, 1, 2]
    assert n_a[3] == 4 and n_b[1] == 1 and n_b[2] == 4


def test_identical_grids():
    g = merge_union([StepSequence(0, [0, 1, 2]), StepSequence(1, [0, 1, 2])])
    assert g.times == (0, 1, 2)
    assert g.m_map == ((0, 1, 2), (0, 1, 2))
    assert all(sel == {0, 1} for sel in g.selection)


def test_two_to_one_merge():
    g = merge_union([StepSequence("A", [0, 2, 4]), StepSequence("B", [0, 1, 2, 3, 4])])
    assert g.times == (0, 1, 2, 3, 4)
    assert list(index_maps(g, "A")[0]) == [0, 0, 1, 1, 2]
    assert list(index_maps(g, "A")[1]) == [0, 2, 4]


def test_merge_errors():
    with pytest.raises(UnsynchronizedStart):
        merge_union([StepSequence(0, [0, 1]), StepSequence(1, [1, 2])])
    with pytest.raises(NonMonotonic):
        StepSequence(0, [0, 2, 1])
    with pytest.raises(NonMonotonic):
        StepSequence(0, [])
    with pytest.raises(UnknownSet):
        merge_union(figure_pattern()).position("C")


def test_single_sequence_round_trip():
    g = merge_union([StepSequence(0, [0, 3, 7])])
    assert g.times == (0, 3, 7)
    assert g.m_map == ((0, 1, 2),) and g.n_map == ((0, 1, 2),)


@st.composite
def tick_sets(draw):
    n = draw(st.integers(1, 4))
    out = []
    for s in range(n):
        rest = draw(st.lists(st.integers(1, 200), min_size=0, max_size=12, unique=True))
        out.append(StepSequence(s, [0] + sorted(rest)))
    return out


@given(tick_sets())
def test_union_invariants(seqs):
    g = merge_union(seqs)
    assert list(g.times) == sorted(set().union(*(s.times for s in seqs)))
    for p, s in enumerate(seqs):
        for n, t in enumerate(g.times):
            m = g.m_map[p][n]
            assert s.times[m] <= t
            if m + 1 < len(s.times):
                assert t < s.times[m + 1]
            # n(m(n)) <= n, equality iff t is an evaluation of s
            assert g.n_map[p][m] <= n
            assert (g.n_map[p][m] == n) == (p in g.selection[n])
        for m, n in enumerate(g.n_map[p]):
            assert g.times[n] == s.times[m]
    assert all(g.selection)


@given(tick_sets(), st.randoms())
def test_merge_order_insensitive(seqs, rnd):
    shuffled = list(seqs)
    rnd.shuffle(shuffled)
    a, b = merge_union(seqs), merge_union(shuffled)
    assert a.times == b.times
    for s in seqs:
        assert index_maps(a, s.set_id) == index_maps(b, s.set_id)


@given(st.lists(st.integers(-(2 ** 50), 2 ** 50), min_size=2, max_size=40, unique=True))
def test_dyadic_times_compare_exactly(ticks):
    times = [TickTime(t) for t in ticks]
    assert len(set(times)) == len(ticks)
    assert sorted(times) == [TickTime(t) for t in sorted(ticks)]


@given(tick_sets(), st.integers(-60, 0))
def test_grid_text_round_trip(seqs, r):
    text = dump_grid(seqs, r)
    r2, loaded = load_grid(text)
    assert r2 == r
    assert [[t.ticks for t in s.times] for s in loaded] == [list(s.times) for s in seqs]
