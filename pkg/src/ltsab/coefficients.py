"""Adams-Bashforth and local-time-stepping coefficient generation.

Every routine works on either exact values (ints, ``Fraction``, ``TickTime``)
or floats.  If any input time is a float the whole computation is carried out
in floating point, otherwise everything is an exact ``Fraction``.
"""

from __future__ import annotations

import functools
import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .time_grid import StepSequence, TickTime, UnionGrid, merge_union


class CoefficientError(ValueError):
    pass


class DuplicateNodes(CoefficientError):
    pass


class NonMonotonicTimes(CoefficientError):
    pass


class InsufficientHistory(CoefficientError):
    pass


class UndefinedStep(CoefficientError):
    pass


class WrongSetCount(CoefficientError):
    pass


class WrongKind(CoefficientError):
    pass


def _is_float(t) -> bool:
    return isinstance(t, (float, np.floating))


def _coerce(values):
    """Exact ``Fraction`` values unless a float shows up anywhere."""
    values = list(values)
    if any(_is_float(v) for v in values):
        return [float(v.to_fraction()) if isinstance(v, TickTime) else float(v) for v in values]
    return [v.to_fraction() if isinstance(v, TickTime) else Fraction(v) for v in values]


def _check_distinct(nodes):
    if len(set(nodes)) != len(nodes):
        raise DuplicateNodes(f"interpolation nodes not distinct: {nodes!r}")


def lagrange_eval(t, nodes: Sequence, j: int):
    """Value at ``t`` of the ``j``-th Lagrange basis polynomial on ``nodes``."""
    t, *nodes = _coerce([t, *nodes])
    _check_distinct(nodes)
    if not 0 <= j < len(nodes):
        raise IndexError(j)
    out = nodes[j] - nodes[j] + 1  # one, in the working number type
    for i, x in enumerate(nodes):
        if i != j:
            out *= (t - x) / (nodes[j] - x)
    return out


def _poly_mul_linear(coeffs, root, scale):
    # coeffs in increasing degree; returns coeffs * (x - root) * scale
    out = [0 * scale] * (len(coeffs) + 1)
    for p, c in enumerate(coeffs):
        out[p + 1] += c * scale
        out[p] -= c * root * scale
    return out


def lagrange_monomials(nodes: Sequence, j: int) -> list:
    """Monomial coefficients (increasing degree) of the ``j``-th basis polynomial."""
    nodes = _coerce(nodes)
    _check_distinct(nodes)
    one = nodes[j] - nodes[j] + 1
    coeffs = [one]
    for i, x in enumerate(nodes):
        if i != j:
            coeffs = _poly_mul_linear(coeffs, x, one / (nodes[j] - x))
    return coeffs


def lagrange_integral(a, b, nodes: Sequence, j: int):
    """Integral of the ``j``-th Lagrange basis polynomial over ``[a, b]``."""
    a, b, *nodes = _coerce([a, b, *nodes])
    coeffs = lagrange_monomials(nodes, j)
    return sum(c * (b ** (p + 1) - a ** (p + 1)) / (p + 1) for p, c in enumerate(coeffs))


@dataclass(frozen=True)
class AbCoeffs:
    order: int
    alpha: tuple
    step: object

    def __iter__(self):
        return iter(self.alpha)


def ab_coefficients(past_times: Sequence, t_next) -> AbCoeffs:
    """Variable-step Adams-Bashforth coefficients.

    ``past_times`` runs backwards from the current time ``t_n``; the returned
    ``alpha[j]`` multiplies the derivative at ``past_times[j]``, and the step
    is ``dt * sum(alpha[j] * D_j)``.
    """
    t_next, *past = _coerce([t_next, *past_times])
    if not past:
        raise InsufficientHistory("need at least one past time")
    for a, b in zip(past, past[1:]):
        if not b < a:
            raise NonMonotonicTimes("past times must be strictly decreasing")
    if not t_next > past[0]:
        raise NonMonotonicTimes("next time must follow the current time")
    dt = t_next - past[0]
    # Shift and scale to the unit step: exact in rational mode, well conditioned otherwise.
    rel = [(t - past[0]) / dt for t in past]
    zero, one = rel[0], rel[0] + 1
    alpha = tuple(lagrange_integral(zero, one, rel, j) for j in range(len(rel)))
    return AbCoeffs(len(rel), alpha, dt)


@dataclass
class BetaTable:
    """Sparse coefficient table indexed by per-set evaluation indices.

    ``kind`` is ``"small"`` for one union step (entries carry the factor of
    the union step size) or ``"full"`` for one complete step of ``set_id``
    (entries normalized by that step size).
    """

    kind: str
    step: object
    set_ids: tuple
    entries: dict = field(default_factory=dict)
    scale: object = None
    set_id: object = None

    def total(self):
        return sum(self.entries.values())

    def __getitem__(self, q):
        return self.entries.get(tuple(q), 0)

    def __len__(self):
        return len(self.entries)


def _set_nodes(grid: UnionGrid, p: int, m: int, k: int):
    if m - (k - 1) < 0:
        raise InsufficientHistory(f"set {grid.set_ids[p]!r} has fewer than {k} evaluations")
    times = grid.set_times[p]
    return [times[m - j] for j in range(k)]


def _union_history(grid: UnionGrid, n: int, k: int):
    if n - (k - 1) < 0:
        raise InsufficientHistory(f"union grid has fewer than {k} times before step {n}")
    if n + 1 >= len(grid.times):
        raise UndefinedStep(f"union step {n} has no end time")
    return [grid.times[n - i] for i in range(k)], grid.times[n + 1]


def lts_small_step_beta(grid: UnionGrid, k: int, n: int) -> BetaTable:
    """Coefficients of one union step, general number of sets."""
    past, t_next = _union_history(grid, n, k)
    vals = _coerce([*past, t_next, *itertools.chain.from_iterable(grid.set_times)])
    # re-split the coerced values
    past_v, t_next_v = vals[:k], vals[k]
    alpha = ab_coefficients(past_v, t_next_v)
    dU = t_next_v - past_v[0]

    offset = k + 1
    set_vals = []
    for times in grid.set_times:
        set_vals.append(vals[offset:offset + len(times)])
        offset += len(times)

    ms = [grid.m_map[p][n] for p in range(grid.n_sets)]
    interp = []  # interp[p][i][j] = ell_j(U_{n-i}; nodes of set p)
    for p, m in enumerate(ms):
        if m - (k - 1) < 0:
            raise InsufficientHistory(f"set {grid.set_ids[p]!r} has fewer than {k} evaluations")
        nodes = [set_vals[p][m - j] for j in range(k)]
        interp.append([[lagrange_eval(past_v[i], nodes, j) for j in range(k)] for i in range(k)])

    entries = {}
    for js in itertools.product(range(k), repeat=grid.n_sets):
        acc = 0
        for i in range(k):
            term = alpha.alpha[i]
            for p, j in enumerate(js):
                term = term * interp[p][i][j]
                if term == 0:
                    break
            acc = acc + term
        if acc != 0:
            entries[tuple(m - j for m, j in zip(ms, js))] = dU * acc
    return BetaTable("small", n, grid.set_ids, entries, scale=dU)


def two_set_beta(grid: UnionGrid, k: int, n: int) -> BetaTable:
    """Small-step table for two sets via the selection-function decomposition."""
    if grid.n_sets != 2:
        raise WrongSetCount(f"expected 2 sets, got {grid.n_sets}")
    past, t_next = _union_history(grid, n, k)
    vals = _coerce([*past, t_next, *grid.set_times[0], *grid.set_times[1]])
    past_v, t_next_v = vals[:k], vals[k]
    times = (vals[k + 1:k + 1 + len(grid.set_times[0])], vals[k + 1 + len(grid.set_times[0]):])
    alpha = ab_coefficients(past_v, t_next_v).alpha
    dU = t_next_v - past_v[0]
    ms = [grid.m_map[0][n], grid.m_map[1][n]]
    nodes = []
    for p in (0, 1):
        if ms[p] - (k - 1) < 0:
            raise InsufficientHistory(f"set {grid.set_ids[p]!r} has fewer than {k} evaluations")
        nodes.append([times[p][ms[p] - j] for j in range(k)])

    entries = {}

    def add(key, value):
        if value != 0:
            entries[key] = entries.get(key, 0) + value

    for ja, jb in itertools.product(range(k), repeat=2):
        qa, qb = ms[0] - ja, ms[1] - jb
        na, nb = grid.n_map[0][qa], grid.n_map[1][qb]
        # only set A evaluated at its own time t^A_{qA}
        if n - na < k and grid.selection[na] == {0}:
            add((qa, qb), dU * alpha[n - na] * lagrange_eval(times[0][qa], nodes[1], jb))
        if n - nb < k and grid.selection[nb] == {1}:
            add((qa, qb), dU * alpha[n - nb] * lagrange_eval(times[1][qb], nodes[0], ja))
        if na == nb and n - na < k:
            add((qa, qb), dU * alpha[n - na])
    entries = {q: v for q, v in entries.items() if v != 0}
    return BetaTable("small", n, grid.set_ids, entries, scale=dU)


def accumulate_full_step(grid: UnionGrid, k: int, set_id, m: int, small_step=lts_small_step_beta) -> BetaTable:
    """Full-step table for step ``m`` of ``set_id``, normalized by its step size."""
    p = grid.position(set_id)
    n_of = grid.n_map[p]
    if not 0 <= m < len(n_of) - 1:
        raise UndefinedStep(f"step {m} of set {set_id!r} has no end time in the grid")
    total = {}
    for n in range(n_of[m], n_of[m + 1]):
        for q, v in small_step(grid, k, n).entries.items():
            total[q] = total.get(q, 0) + v
    t0, t1 = _coerce([grid.set_times[p][m], grid.set_times[p][m + 1]])
    dt = t1 - t0
    entries = {q: v / dt for q, v in total.items() if v != 0}
    return BetaTable("full", m, grid.set_ids, entries, scale=dt, set_id=set_id)


def marginalize_volume(table: BetaTable, set_id) -> AbCoeffs:
    """Sum a full-step table over every other set's index.

    Returns coefficients ordered from the most recent evaluation of ``set_id``
    backwards, i.e. in the same layout as ``ab_coefficients``.
    """
    if table.kind != "full" or table.set_id != set_id:
        raise WrongKind("need the accumulated full-step table of this set")
    p = table.set_ids.index(set_id)
    sums = {}
    for q, v in table.entries.items():
        sums[q[p]] = sums.get(q[p], 0) + v
    m = table.step
    lo = min(sums) if sums else m
    alpha = tuple(sums.get(m - j, 0) for j in range(m - lo + 1))
    return AbCoeffs(len(alpha), alpha, table.scale)


# -- runtime tables ---------------------------------------------------------

def _window_grid(own: Sequence[int], other: Sequence[int]) -> UnionGrid:
    return merge_union([StepSequence(0, own), StepSequence(1, other)], synchronized=False)


def pair_step_table(k: int, own: tuple, other: tuple) -> dict:
    """Exact full-step coupling coefficients keyed by evaluation times.

    ``own`` holds the stepping set's last ``k`` times followed by the end of
    the step; ``other`` holds the neighbour's evaluation times from its
    ``k``-th latest at or before the step start up to (excluding) the end.
    Keys are ``(own_time, other_time)``; values are normalized by the step.
    """
    grid = _window_grid(own, other)
    table = accumulate_full_step(grid, k, 0, len(own) - 2)
    return {(own[qa], other[qb]): v for (qa, qb), v in table.entries.items()}


def _normalize(origin: int, values: Sequence[int]) -> tuple[int, tuple]:
    offsets = [v - origin for v in values]
    g = 0
    for o in offsets:
        g = math.gcd(g, o)
    g = g or 1
    return g, tuple(o // g for o in offsets)


class CoefficientCache:
    """Float coefficient tables memoized on the normalized step pattern.

    Tables are invariant under translation and (for normalized full-step
    tables) under scaling, so the key is the pattern relative to the step
    start in units of the gcd of all offsets.
    """

    def __init__(self):
        self._pair = {}
        self._ab = {}
        self._lock = threading.Lock()
        self.misses = 0

    def pair(self, k: int, own: Sequence[int], other: Sequence[int]) -> list:
        """Full-step coupling table as ``[(own_time, other_time, coef), ...]``."""
        origin = own[-2]
        g, norm = _normalize(origin, [*own, *other])
        key = (k, len(own), norm)
        entries = self._pair.get(key)
        if entries is None:
            own_n, other_n = norm[:len(own)], norm[len(own):]
            exact = pair_step_table(k, own_n, other_n)
            # fixed summation order: lexicographic in (own, other) time
            entries = tuple((a, b, float(v)) for (a, b), v in sorted(exact.items()))
            with self._lock:
                self._pair[key] = entries
                self.misses += 1
        return [(origin + a * g, origin + b * g, v) for a, b, v in entries]

    def ab(self, past: Sequence[int], t_next: int) -> tuple:
        """Float AB coefficients for integer times, most recent first."""
        origin = past[0]
        g, norm = _normalize(origin, [t_next, *past])
        entries = self._ab.get(norm)
        if entries is None:
            entries = tuple(float(a) for a in ab_coefficients(norm[1:], norm[0]).alpha)
            with self._lock:
                self._ab[norm] = entries
                self.misses += 1
        return entries


@functools.lru_cache(maxsize=None)
def standard_ab(k: int) -> tuple:
    """Constant-step Adams-Bashforth coefficients as exact fractions."""
    return ab_coefficients(list(range(0, -k, -1)), 1).alpha
