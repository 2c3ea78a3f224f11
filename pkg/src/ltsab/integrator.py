"""Adams-Bashforth time evolution with conservative local time stepping.

A *system* is any object offering the following (duck-typed) interface, for
sets numbered ``0 .. n_sets - 1``:

``n_sets``
    number of degree-of-freedom sets.
``couplings(s)``
    list of ``(other_set, key)`` pairs: the face-local couplings of set ``s``.
``volume(s, y, t)``
    derivative contribution that depends on set ``s`` alone (``t`` is a
    float; it lets boundary data enter the volume part).
``trace(s, y)``
    whatever a neighbour needs to evaluate its coupling to ``s``.
``coupling(s, key, own_trace, other_trace)``
    coupling value; anything supporting ``+`` and scalar ``*``.
``lift(s, key, value)``
    turns an accumulated coupling value into a state increment shape.
``cfl_bound(s, y)``
    optional, largest stable step (time units) for set ``s``.
``conserved(states)``
    optional, a linear conserved quantity.

The derivative of set ``s`` is ``volume + sum(lift(coupling))`` over its
couplings.  Volume terms are always advanced with the set's own
Adams-Bashforth coefficients; coupling terms use the full-step LTS tables of
the two-set union grid, which is what makes the scheme conservative.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .coefficients import AbCoeffs, CoefficientCache, InsufficientHistory

log = logging.getLogger(__name__)


class IntegratorError(RuntimeError):
    pass


class MissingCouplingRecord(IntegratorError):
    pass


class StepTooSmall(IntegratorError):
    pass


@dataclass
class Record:
    time: int
    state: np.ndarray
    volume: np.ndarray
    trace: object
    deriv: Optional[np.ndarray] = None


class History:
    """Per-set records in time order, plus per-coupling value caches."""

    def __init__(self, n_sets: int):
        self.times: list[list[int]] = [[] for _ in range(n_sets)]
        self.records: list[dict[int, Record]] = [{} for _ in range(n_sets)]
        self.coupling_values: dict[tuple, dict] = {}

    @property
    def n_sets(self) -> int:
        return len(self.times)

    def append(self, s: int, record: Record) -> None:
        times = self.times[s]
        if times and record.time <= times[-1]:
            raise IntegratorError(f"set {s}: record at {record.time} does not follow {times[-1]}")
        times.append(record.time)
        self.records[s][record.time] = record

    def latest(self, s: int) -> Record:
        return self.records[s][self.times[s][-1]]

    def __len__(self):
        return sum(len(t) for t in self.times)

    def count(self, s: int) -> int:
        return len(self.times[s])

    def last_times(self, s: int, k: int, at_or_before: Optional[int] = None) -> list[int]:
        """The ``k`` most recent times at or before a time, newest first."""
        times = self.times[s]
        hi = len(times) if at_or_before is None else bisect.bisect_right(times, at_or_before)
        if hi < k:
            raise InsufficientHistory(f"set {s} has {hi} records, need {k}")
        return times[hi - 1:hi - k - 1 if hi - k - 1 >= 0 else None:-1]

    def window(self, s: int, start: int, end: int) -> list[int]:
        times = self.times[s]
        return times[bisect.bisect_left(times, start):bisect.bisect_left(times, end)]

    def prune(self, s: int, keep_from: int) -> None:
        times = self.times[s]
        cut = bisect.bisect_left(times, keep_from)
        if cut:
            for t in times[:cut]:
                del self.records[s][t]
            del times[:cut]


@dataclass
class SchedulerState:
    order: int
    time: list
    step: list
    equal_steps: list
    max_step: int
    union_index: int = 0


def largest_power_of_two_at_most(x) -> int:
    if not x >= 1:
        raise StepTooSmall(f"step bound {x} ticks is below one tick")
    if math.isinf(x):
        raise ValueError("unbounded step")
    return 1 << (int(x).bit_length() - 1)


def step_controller(state: SchedulerState, s: int, cfl_bound) -> int:
    """Next power-of-two step (ticks) for set ``s``.

    Decreases to the largest power of two under the bound happen at once.
    Increases are by a factor of two only, only after ``order - 1`` equal
    steps, and only when the doubled step stays aligned.
    """
    if not cfl_bound > 0:
        raise ValueError("CFL bound must be positive")
    current = state.step[s]
    target = largest_power_of_two_at_most(min(cfl_bound, state.max_step))
    if target < current:
        return target
    doubled = 2 * current
    if (
        target >= doubled
        and state.equal_steps[s] >= state.order - 1
        and state.time[s] % doubled == 0
    ):
        return doubled
    return current


def gts_ab_step(derivs: Sequence, coeffs: AbCoeffs):
    """State increment ``dt * sum(alpha_j * D_j)``; ``derivs`` newest first."""
    if len(derivs) < coeffs.order:
        raise InsufficientHistory(f"need {coeffs.order} derivatives, have {len(derivs)}")
    acc = coeffs.alpha[0] * derivs[0]
    for a, d in zip(coeffs.alpha[1:], derivs[1:coeffs.order]):
        acc = acc + a * d
    return coeffs.step * acc


def lts_coupling_step(table, dt, coupling: Callable):
    """``dt * sum(a_q * B(q))`` over a full-step table.

    ``table`` is either an iterable of ``(q_own, q_other, coef)`` or a mapping
    from ``(q_own, q_other)`` to coefficients; ``coupling(q_own, q_other)``
    returns the coupling value at those evaluations.
    """
    items = table.items() if hasattr(table, "items") else (((a, b), c) for a, b, c in table)
    acc = 0
    for (qa, qb), c in items:
        try:
            value = coupling(qa, qb)
        except KeyError as exc:
            raise MissingCouplingRecord(f"no coupling data for {qa!r}, {qb!r}") from exc
        acc = acc + c * value
    return dt * acc


def full_derivative(system, s: int, state, t: float, traces) -> np.ndarray:
    d = system.volume(s, state, t)
    for other, key in system.couplings(s):
        d = d + system.lift(s, key, system.coupling(s, key, traces[s], traces[other]))
    return d


def self_start(system, states, t0: int, k: int, initial_step: int, resolution: int = -40, counters=None, cache=None) -> History:
    """Bootstrap ``k`` synchronized records with an Euler, AB2, ... ramp."""
    tick = 2.0 ** resolution
    cache = cache or CoefficientCache()
    history = History(system.n_sets)
    states = [np.asarray(y, dtype=float) for y in states]
    t = t0
    for j in range(k):
        traces = [system.trace(s, y) for s, y in enumerate(states)]
        tf = t * tick
        for s, y in enumerate(states):
            rec = Record(t, y, system.volume(s, y, tf), traces[s])
            rec.deriv = full_derivative(system, s, y, tf, traces)
            history.append(s, rec)
        if counters is not None:
            counters["volume"] += system.n_sets
            counters["coupling"] += sum(len(system.couplings(s)) for s in range(system.n_sets))
        if j == k - 1:
            break
        # order j + 1 step on the synchronized history
        past = history.last_times(0, j + 1)
        coeffs = cache.ab(past, t + initial_step)
        ab = AbCoeffs(j + 1, coeffs, initial_step * tick)
        states = [
            y + gts_ab_step([history.records[s][tp].deriv for tp in past], ab)
            for s, y in enumerate(states)
        ]
        t += initial_step
    return history


@dataclass
class StepLog:
    """Step-pattern records ``(set, start ticks, size ticks)``."""

    entries: list = field(default_factory=list)
    sink: Optional[object] = None

    def add(self, s: int, start: int, size: int) -> None:
        if self.sink is not None:
            self.sink.write(f"{s} {start} {size}\n")
        else:
            self.entries.append((s, start, size))


MODES = ("lts", "lts-constant", "gts")


class Evolution:
    """Event-ordered evolution of a coupled system.

    ``mode`` is ``"lts"`` (independent steps per set), ``"lts-constant"`` (LTS
    machinery with one global step) or ``"gts"`` (plain Adams-Bashforth on the
    full derivative).  All times are integer ticks.

    Passing ``history`` skips the self-start and continues from those
    records; ``first_steps`` then fixes the first step of every set.
    """

    def __init__(
        self,
        system,
        states,
        t0: int,
        order: int,
        *,
        resolution: int = -40,
        initial_step: int = 1 << 13,
        max_step: Optional[int] = None,
        mode: str = "lts",
        cfl_scale: float = 1.0,
        cache: Optional[CoefficientCache] = None,
        step_log: Optional[StepLog] = None,
        fixed_steps: Optional[Sequence[int]] = None,
        history: Optional[History] = None,
        first_steps: Optional[Sequence[int]] = None,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if order < 1:
            raise ValueError("order must be positive")
        if history is None and t0 % initial_step:
            raise IntegratorError("initial step not aligned with the start time")
        self.system = system
        self.order = order
        self.mode = mode
        self.resolution = resolution
        self.tick = 2.0 ** resolution
        self.cfl_scale = cfl_scale
        self.cache = cache or CoefficientCache()
        self.step_log = step_log
        self.fixed_steps = fixed_steps
        n = system.n_sets
        self.counters = {"volume": 0, "coupling": 0, "steps": [0] * n}
        if history is None:
            self.history = self_start(system, states, t0, order, initial_step, resolution, self.counters, self.cache)
            for s in range(n):
                self.counters["steps"][s] = order - 1
                if step_log is not None:
                    for a, b in zip(self.history.times[s], self.history.times[s][1:]):
                        step_log.add(s, a, b - a)
        else:
            # continuing from supplied records, e.g. a hand-built step pattern
            self.history = history
        times = [self.history.times[s][-1] for s in range(n)]
        steps = list(first_steps) if first_steps is not None else [initial_step] * n
        self.state = SchedulerState(
            order,
            times,
            steps,
            [order - 1] * n,
            max_step if max_step is not None else initial_step << 40,
        )
        # the ramp steps count as equal steps of the initial size
        self._last_size = list(steps)
        self.conserved_trace = []
        self._record_conserved()
        if first_steps is None:
            self._choose_steps(list(range(n)))

    # -- bookkeeping ---------------------------------------------------

    @property
    def n_sets(self) -> int:
        return self.system.n_sets

    def states(self) -> list[np.ndarray]:
        return [self.history.latest(s).state for s in range(self.n_sets)]

    def time(self) -> int:
        return min(self.state.time)

    def synchronized(self) -> bool:
        return len(set(self.state.time)) == 1

    def _record_conserved(self):
        if hasattr(self.system, "conserved") and self.synchronized():
            self.conserved_trace.append((self.state.time[0], self.system.conserved(self.states())))

    def _bound_ticks(self, s: int) -> float:
        if not hasattr(self.system, "cfl_bound"):
            return math.inf
        return self.cfl_scale * self.system.cfl_bound(s, self.history.latest(s).state) / self.tick

    def _choose_steps(self, stepped: list[int]) -> None:
        st = self.state
        if self.fixed_steps is not None:
            idx = st.union_index
            size = self.fixed_steps[idx] if idx < len(self.fixed_steps) else self.fixed_steps[-1]
            for s in stepped:
                st.step[s] = size
            return
        if self.mode == "lts":
            for s in stepped:
                st.step[s] = step_controller(st, s, self._bound_ticks(s))
            return
        # one global step, decided when every set has arrived
        bound = min(self._bound_ticks(s) for s in range(self.n_sets))
        new = step_controller(st, 0, bound)
        for s in range(self.n_sets):
            st.step[s] = new

    # -- stepping ------------------------------------------------------

    def _coupling_value(self, s: int, other: int, key, t_own: int, t_other: int):
        cache = self.history.coupling_values.setdefault((s, key), {})
        value = cache.get((t_own, t_other))
        if value is None:
            try:
                own = self.history.records[s][t_own]
                oth = self.history.records[other][t_other]
            except KeyError as exc:
                raise MissingCouplingRecord(f"set {s} coupling {key!r} at ({t_own}, {t_other})") from exc
            value = self.system.coupling(s, key, own.trace, oth.trace)
            cache[(t_own, t_other)] = value
            self.counters["coupling"] += 1
        return value

    def _increment(self, s: int, start: int, end: int) -> np.ndarray:
        k = self.order
        h = self.history
        own = h.last_times(s, k, start)
        dt = (end - start) * self.tick
        alpha = self.cache.ab(own, end)
        if self.mode == "gts":
            return dt * _combine(alpha, [h.records[s][t].deriv for t in own])
        inc = dt * _combine(alpha, [h.records[s][t].volume for t in own])
        own_window = own[::-1] + [end]
        for other, key in self.system.couplings(s):
            first = h.last_times(other, k, start)[-1]
            other_window = h.window(other, first, end)
            acc = 0.0
            for t_own, t_other, c in self.cache.pair(k, own_window, other_window):
                acc = acc + c * self._coupling_value(s, other, key, t_own, t_other)
            inc = inc + self.system.lift(s, key, dt * acc)
        return inc

    def advance(self) -> int:
        """Advance every set whose current step ends at the next union time."""
        st = self.state
        ends = [t + h for t, h in zip(st.time, st.step)]
        union_time = min(ends)
        stepped = [s for s in range(self.n_sets) if ends[s] == union_time]
        increments = {s: self._increment(s, st.time[s], union_time) for s in stepped}
        tf = union_time * self.tick
        for s in stepped:
            y = self.history.latest(s).state + increments[s]
            self.history.append(s, Record(union_time, y, self.system.volume(s, y, tf), self.system.trace(s, y)))
            self.counters["volume"] += 1
            self.counters["steps"][s] += 1
            if self.step_log is not None:
                self.step_log.add(s, st.time[s], st.step[s])
            st.time[s] = union_time
        if self.mode == "gts":
            traces = [self.history.latest(s).trace for s in range(self.n_sets)]
            for s in stepped:
                rec = self.history.latest(s)
                rec.deriv = full_derivative(self.system, s, rec.state, tf, traces)
                self.counters["coupling"] += len(self.system.couplings(s))
        self._update_counters(stepped)
        st.union_index += 1
        if self.mode == "lts" or self.synchronized():
            self._choose_steps(stepped)
        self._prune(stepped)
        self._record_conserved()
        return union_time

    def _update_counters(self, stepped):
        st = self.state
        for s in stepped:
            if st.step[s] == self._last_size[s]:
                st.equal_steps[s] += 1
            else:
                st.equal_steps[s] = 1
            self._last_size[s] = st.step[s]

    def _needed_from(self, s: int) -> int:
        k = self.order
        h = self.history
        earliest = h.last_times(s, k)[-1]
        for other, _ in self.system.couplings(s):
            earliest = min(earliest, h.last_times(s, k, self.state.time[other])[-1])
        return earliest

    def _prune(self, stepped):
        touched = set(stepped)
        for s in stepped:
            touched.update(o for o, _ in self.system.couplings(s))
        for s in touched:
            self.history.prune(s, self._needed_from(s))
        for (s, key), cache in self.history.coupling_values.items():
            if len(cache) > 64:
                lo_own = self.history.times[s][0]
                other = dict((kk, o) for o, kk in self.system.couplings(s))[key]
                lo_other = self.history.times[other][0]
                for q in [q for q in cache if q[0] < lo_own or q[1] < lo_other]:
                    del cache[q]

    def run(self, t_end: int, callback: Optional[Callable] = None) -> None:
        while self.time() < t_end:
            st = self.state
            for s in range(self.n_sets):
                if st.time[s] + st.step[s] > t_end:
                    raise IntegratorError("step overshoots the final time; max_step must divide it")
            self.advance()
            if callback is not None:
                callback(self)


def _combine(alpha, values):
    acc = alpha[0] * values[0]
    for a, v in zip(alpha[1:], values[1:]):
        acc = acc + a * v
    return acc


def split_rk2_step(system, states, t: float, dt: float):
    """Midpoint RK2 written as two half steps in volume/coupling split form.

    Returns ``(first, second)`` lists of per-set increments:
    ``u1 - u0 = h (V(u0) + B(u0, v0))`` and
    ``u2 - u1 = -(u1 - u0) + 2 h (V(u1) + B(u1, v1))`` with ``h = dt / 2``.
    """
    h = 0.5 * dt
    states = [np.asarray(y, dtype=float) for y in states]
    traces = [system.trace(s, y) for s, y in enumerate(states)]
    first = [h * full_derivative(system, s, y, t, traces) for s, y in enumerate(states)]
    mid = [y + d for y, d in zip(states, first)]
    traces = [system.trace(s, y) for s, y in enumerate(mid)]
    second = [-d + 2 * h * full_derivative(system, s, y, t + h, traces) for s, (y, d) in enumerate(zip(mid, first))]
    return first, second
