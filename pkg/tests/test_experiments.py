from fractions import Fraction as F

import numpy as np
import pytest

from ltsab.experiments import (
    ConfigError,
    RunConfig,
    aligned_max_step,
    evolve,
    fit_slope,
    run_conservation,
    run_convergence,
    run_speed,
)
from ltsab.integrator import Evolution

from systems import ExchangeSystem

SMALL_WAVE = dict(order=3, elements=4, nodes=6, t_end=F(1, 32), threshold=2.0 ** -9)


def test_config_defaults_match_bump_setup():
    cfg = RunConfig()
    assert (cfg.elements, cfg.nodes, cfg.left, cfg.right) == (16, 10, F(-9, 8), F(1, 8))
    assert (cfg.t_start, cfg.t_end, cfg.periodic) == (F(-1, 8), F(3, 2), False)
    assert cfg.initial_step_ticks == 2 ** 13  # 2**-27 at the default resolution


def test_config_from_text():
    cfg = RunConfig.from_text(
        "# comment\norder = 5\nthreshold = 1/4096\nperiodic = yes\nproblem = wave\n"
        "t-start = 0\nt_end = 1/2  # trailing\nmode = gts\noutput_dir = none\n"
    )
    assert cfg.order == 5 and cfg.threshold == 2.0 ** -12 and cfg.periodic
    assert cfg.t_end == F(1, 2) and cfg.mode == "gts" and cfg.output_dir is None


@pytest.mark.parametrize("text", ["order = 9", "mode = rk4", "bogus = 1", "order 4", "t_end = 1/3",
                                  "periodic = maybe", "initial_step_ticks = 3"])
def test_config_errors(text):
    with pytest.raises(ValueError):
        RunConfig.from_text(text)


def test_aligned_max_step():
    assert aligned_max_step(-(2 ** 37), 3 * 2 ** 39) == 2 ** 37
    assert aligned_max_step(0, 2 ** 39) == 2 ** 39
    with pytest.raises(ConfigError):
        aligned_max_step(0, 0)


def test_zero_length_run_is_interpolation_only():
    cfg = RunConfig(t_end=F(-1, 8))
    report = evolve(cfg)
    assert report.error == 0.0 and report.total_steps == 0


def test_fit_slope():
    th = [2.0 ** -e for e in range(10, 14)]
    assert fit_slope(th, [3 * t ** 4 for t in th]) == pytest.approx(4.0)


def test_wave_requires_periodic():
    with pytest.raises(ConfigError):
        evolve(RunConfig(problem="wave", t_start=0, t_end=F(1, 8)))
    with pytest.raises(ConfigError):
        run_conservation(RunConfig())


def test_small_conservation_run_and_gts_baseline():
    for mode in ("lts", "gts"):
        report = run_conservation(RunConfig.wave(mode=mode, **SMALL_WAVE))
        assert report.max_drift <= 1e-13
        times = [t for t, _ in report.conserved_trace]
        assert times == sorted(times)


def test_determinism():
    cfg = RunConfig.wave(**SMALL_WAVE)
    a, b = evolve(cfg), evolve(cfg)
    assert a.conserved_trace == b.conserved_trace
    assert a.step_counts == b.step_counts
    for x, y in zip(a.states, b.states):
        assert np.array_equal(x, y)


def test_constant_step_matches_global_at_cli_level():
    cfg = RunConfig.wave(**SMALL_WAVE)
    g = evolve(cfg.replace(mode="gts"))
    c = evolve(cfg.replace(mode="lts-constant"))
    assert g.step_counts == c.step_counts
    for x, y in zip(g.states, c.states):
        np.testing.assert_allclose(y, x, rtol=1e-14, atol=1e-14)


def test_uniform_speed_ratio_is_one():
    # a single element is trivially uniform
    sp = run_speed(RunConfig.wave(**SMALL_WAVE).replace(elements=1))
    assert sp.step_ratio == 1.0


def test_two_set_two_to_one_step_count():
    class Fixed(ExchangeSystem):
        def cfl_bound(self, s, y):
            return (1 + s) * 2.0 ** -20

    h = 1 << 20
    counts = {}
    for mode in ("gts", "lts"):
        ev = Evolution(Fixed(2), [np.array([1.0, 0.5, 0.0])] * 2, 0, 2, initial_step=h, mode=mode,
                       max_step=1 << 30)
        ev.run(16 * h)
        counts[mode] = ev.counters["steps"]
    # the slow set doubles at the first aligned time after its one ramp step
    assert counts["lts"] == [16, 2 + 7]
    assert counts["gts"] == [16, 16]
    assert sum(counts["gts"]) / sum(counts["lts"]) == 32 / 25


def test_convergence_table_shape():
    base = RunConfig(t_end=F(-1, 8) + F(1, 64), elements=4, nodes=6)
    rows = run_convergence(base, [2], [2.0 ** -8, 2.0 ** -9])
    assert [(r.order, r.threshold) for r in rows] == [(2, 2.0 ** -8), (2, 2.0 ** -9)]
    assert rows[0].slope == rows[1].slope
