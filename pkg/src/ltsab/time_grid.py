"""Exact evaluation-time sequences and the union grid of several sets.

Runtime times are integer tick counts at a global binary resolution, so that
merging the step sequences of neighbouring sets never depends on floating
point equality.  The grid machinery itself only needs ordered, hashable time
values, so the coefficient generator can also feed it ints or ``Fraction``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

DEFAULT_RESOLUTION = -40


class TimeGridError(ValueError):
    pass


class NonRepresentable(TimeGridError):
    pass


class UnsynchronizedStart(TimeGridError):
    pass


class NonMonotonic(TimeGridError):
    pass


class UnknownSet(TimeGridError, KeyError):
    pass


@dataclass(frozen=True, order=True)
class TickTime:
    """A dyadic time, ``ticks * 2**resolution_exponent``."""

    ticks: int
    resolution_exponent: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not isinstance(self.ticks, int):
            raise TypeError("tick count must be an integer")

    def _check(self, other: TickTime) -> None:
        if self.resolution_exponent != other.resolution_exponent:
            raise TimeGridError("tick resolutions differ")

    def __add__(self, other: TickTime) -> TickTime:
        self._check(other)
        return TickTime(self.ticks + other.ticks, self.resolution_exponent)

    def __sub__(self, other: TickTime) -> TickTime:
        self._check(other)
        return TickTime(self.ticks - other.ticks, self.resolution_exponent)

    def to_fraction(self) -> Fraction:
        return Fraction(self.ticks) * Fraction(2) ** self.resolution_exponent

    def __float__(self) -> float:
        return float(self.to_fraction())


def to_ticks(t, resolution_exponent: int = DEFAULT_RESOLUTION) -> TickTime:
    """Convert an exact rational time to ticks, refusing anything inexact."""
    if isinstance(t, float):
        t = Fraction(t)
    q = Fraction(t) / Fraction(2) ** resolution_exponent
    if q.denominator != 1:
        raise NonRepresentable(f"{t} is not a multiple of 2**{resolution_exponent}")
    return TickTime(q.numerator, resolution_exponent)


def ticks_to_float(ticks: int, resolution_exponent: int = DEFAULT_RESOLUTION) -> float:
    # exact for |ticks| < 2**53
    return float(ticks) * 2.0 ** resolution_exponent


@dataclass(frozen=True)
class StepSequence:
    set_id: Hashable
    times: tuple

    def __init__(self, set_id, times: Iterable):
        times = tuple(times)
        if not times:
            raise NonMonotonic(f"set {set_id!r} has no evaluation times")
        for a, b in zip(times, times[1:]):
            if not a < b:
                raise NonMonotonic(f"set {set_id!r}: times not strictly increasing at {a!r}, {b!r}")
        object.__setattr__(self, "set_id", set_id)
        object.__setattr__(self, "times", times)

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class UnionGrid:
    """Merged evaluation times with the per-set index maps.

    ``m_map[s][n]`` is the index of the last evaluation of set ``s`` at or
    before ``times[n]`` (``-1`` if the set has not started yet, which only
    happens for unsynchronized windows).  ``n_map[s][m]`` is the union index
    of the ``m``-th evaluation of ``s``.  ``selection[n]`` holds the set
    positions evaluated at ``times[n]``.
    """

    times: tuple
    set_ids: tuple
    set_times: tuple
    m_map: tuple
    n_map: tuple
    selection: tuple = field(repr=False)

    @property
    def n_sets(self) -> int:
        return len(self.set_ids)

    def position(self, set_id) -> int:
        try:
            return self.set_ids.index(set_id)
        except ValueError:
            raise UnknownSet(set_id) from None

    def is_evaluation(self, set_id, n: int) -> bool:
        return self.position(set_id) in self.selection[n]


def merge_union(sequences: Sequence[StepSequence], synchronized: bool = True) -> UnionGrid:
    if not sequences:
        raise TimeGridError("no sequences to merge")
    seqs = [s if isinstance(s, StepSequence) else StepSequence(i, s) for i, s in enumerate(sequences)]
    ids = tuple(s.set_id for s in seqs)
    if len(set(ids)) != len(ids):
        raise TimeGridError("duplicate set ids")
    if synchronized:
        first = seqs[0].times[0]
        for s in seqs[1:]:
            if s.times[0] != first:
                raise UnsynchronizedStart(f"set {s.set_id!r} starts at {s.times[0]!r}, not {first!r}")

    union = tuple(sorted(set().union(*(s.times for s in seqs))))
    where = {t: n for n, t in enumerate(union)}
    m_map, n_map = [], []
    for s in seqs:
        n_map.append(tuple(where[t] for t in s.times))
        m_map.append(tuple(bisect.bisect_right(s.times, t) - 1 for t in union))
    selection = [set() for _ in union]
    for p, ns in enumerate(n_map):
        for n in ns:
            selection[n].add(p)
    selection = tuple(frozenset(sel) for sel in selection)
    return UnionGrid(union, ids, tuple(s.times for s in seqs), tuple(m_map), tuple(n_map), selection)


def index_maps(grid: UnionGrid, set_id) -> tuple[tuple, tuple]:
    p = grid.position(set_id)
    return grid.m_map[p], grid.n_map[p]


def dump_grid(sequences: Sequence[StepSequence], resolution_exponent: int = DEFAULT_RESOLUTION) -> str:
    """Serialize tick sequences: a resolution header, then one line per set."""
    lines = [f"resolution {resolution_exponent}"]
    for s in sequences:
        ticks = [t.ticks if isinstance(t, TickTime) else int(t) for t in s.times]
        lines.append(" ".join(str(t) for t in ticks))
    return "\n".join(lines) + "\n"


def load_grid(text: str) -> tuple[int, list[StepSequence]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("resolution"):
        raise TimeGridError("missing resolution header")
    r = int(lines[0].split()[1])
    seqs = [StepSequence(i, (TickTime(int(tok), r) for tok in ln.split())) for i, ln in enumerate(lines[1:])]
    return r, seqs
