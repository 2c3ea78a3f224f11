"""Fast end-to-end gates behind ``ltsab selftest``."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from . import reference_tables
from .coefficients import ab_coefficients, accumulate_full_step, marginalize_volume
from .experiments import RunConfig, evolve
from .time_grid import StepSequence, merge_union


def random_dyadic_sets(rng: random.Random, n_sets: int = 2, length: int = 8, max_level: int = 3):
    """Synchronized sets with independent random power-of-two steps."""
    seqs = []
    for s in range(n_sets):
        t = Fraction(0)
        times = [t]
        for _ in range(length - 1):
            t += Fraction(1, 2 ** rng.randint(0, max_level))
            times.append(t)
        seqs.append(StepSequence(s, times))
    return seqs


def eligible_steps(grid, k: int, set_id):
    """Steps of ``set_id`` at whose start every set has ``k`` evaluations."""
    p = grid.position(set_id)
    times = grid.set_times[p]
    for m in range(k - 1, len(times) - 1):
        n = grid.n_map[p][m]
        if all(grid.m_map[o][n] >= k - 1 for o in range(grid.n_sets)):
            yield m


def eligible_union_steps(grid, k: int):
    for n in range(len(grid.times) - 1):
        if all(grid.m_map[o][n] >= k - 1 for o in range(grid.n_sets)):
            yield n


def volume_identity_holds(seqs, k: int) -> bool:
    grid = merge_union(seqs)
    for s in grid.set_ids:
        times = grid.set_times[grid.position(s)]
        for m in eligible_steps(grid, k, s):
            table = accumulate_full_step(grid, k, s, m)
            got = marginalize_volume(table, s).alpha
            want = ab_coefficients(times[m - k + 1:m + 1][::-1], times[m + 1]).alpha
            if tuple(got) != tuple(want):
                return False
    return True


def _golden() -> bool:
    return all(
        all(t == reference_tables.entries(*key) for t in reference_tables.reproduce(*key).values())
        for key in reference_tables.TABLES
    )


def _volume() -> bool:
    rng = random.Random(1)
    return all(volume_identity_holds(random_dyadic_sets(rng), k) for k in (2, 3, 4) for _ in range(5))


def _conservation() -> bool:
    cfg = RunConfig.wave(order=3, elements=4, nodes=6, t_end=Fraction(1, 32), threshold=2.0 ** -9)
    return evolve(cfg).max_drift <= 1e-12


def _gts_equivalence() -> bool:
    cfg = RunConfig.wave(order=3, elements=4, nodes=6, t_end=Fraction(1, 64), threshold=2.0 ** -9)
    a = evolve(cfg.replace(mode="gts")).states
    b = evolve(cfg.replace(mode="lts-constant")).states
    scale = max(float(np.max(np.abs(u))) for u in a)
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a, b)) <= 1e-14 * scale


GATES = {
    "golden tables": _golden,
    "volume identity": _volume,
    "conservation": _conservation,
    "global/local equivalence": _gts_equivalence,
}


def run(verbose: bool = False) -> list[str]:
    failures = []
    for name, gate in GATES.items():
        ok = gate()
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failures.append(name)
    return failures
