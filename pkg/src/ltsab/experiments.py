"""Run configurations and the numerical experiments built on them."""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .coefficients import CoefficientCache
from .dg_burgers import BurgersSystem, DgMesh, bump_solution, wave_initial
from .integrator import MODES, Evolution, StepLog
from .time_grid import DEFAULT_RESOLUTION, to_ticks

PROBLEMS = ("bump", "wave")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    order: int = 4
    problem: str = "bump"
    elements: int = 16
    nodes: int = 10
    left: Fraction = Fraction(-9, 8)
    right: Fraction = Fraction(1, 8)
    periodic: bool = False
    t_start: Fraction = Fraction(-1, 8)
    t_end: Fraction = Fraction(3, 2)
    threshold: float = 2.0 ** -12
    mode: str = "lts"
    initial_step_ticks: int = 1 << 13
    resolution: int = DEFAULT_RESOLUTION
    output_dir: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        for name in ("left", "right", "t_start", "t_end"):
            setattr(self, name, Fraction(getattr(self, name)))
        if not 1 <= self.order <= 8:
            raise ConfigError("order must be in [1, 8]")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}")
        if self.t_end < self.t_start:
            raise ConfigError("time span is negative")
        if self.initial_step_ticks <= 0 or self.initial_step_ticks & (self.initial_step_ticks - 1):
            raise ConfigError("initial step must be a power of two in ticks")
        # both ends must be representable
        to_ticks(self.t_start, self.resolution)
        to_ticks(self.t_end, self.resolution)

    @classmethod
    def wave(cls, **overrides) -> RunConfig:
        base = dict(problem="wave", periodic=True, t_start=Fraction(0), t_end=Fraction(1, 2))
        base.update(overrides)
        return cls(**base)

    @classmethod
    def from_text(cls, text: str) -> RunConfig:
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        kwargs = {}
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected key = value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _parse_value(types[key], value)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> RunConfig:
        return cls.from_text(Path(path).read_text())

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


def _parse_value(kind, value: str):
    kind = str(kind)
    if "bool" in kind:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {value!r}")
    if "Fraction" in kind:
        return Fraction(value)
    if "float" in kind:
        return float(Fraction(value)) if "/" in value else float(value)
    if "int" in kind:
        return int(value)
    if "Optional" in kind and value.lower() in ("", "none"):
        return None
    return value


@dataclass
class RunReport:
    config: RunConfig
    error: Optional[float]
    conserved_trace: list
    step_counts: list
    volume_evaluations: int
    coupling_evaluations: int
    wall_time: float
    smallest_step: int
    states: list = field(repr=False, default_factory=list)

    @property
    def total_steps(self) -> int:
        return sum(self.step_counts)

    @property
    def evaluations(self) -> int:
        return self.volume_evaluations + self.coupling_evaluations

    @property
    def max_drift(self) -> float:
        if not self.conserved_trace:
            return 0.0
        c0 = self.conserved_trace[0][1]
        return max(abs(c - c0) for _, c in self.conserved_trace) / abs(c0)


def aligned_max_step(t_start: int, t_end: int) -> int:
    """Largest power of two (ticks) dividing both ends of the run."""
    span = [abs(t) for t in (t_start, t_end) if t]
    if not span:
        raise ConfigError("empty run")
    return min(t & -t for t in span)


def build_problem(cfg: RunConfig):
    mesh = DgMesh.uniform(float(cfg.left), float(cfg.right), cfg.elements, cfg.nodes, periodic=cfg.periodic)
    t0 = float(cfg.t_start)
    if cfg.problem == "bump":
        system = BurgersSystem(mesh, exterior=None if cfg.periodic else bump_solution, cfl_threshold=cfg.threshold)
        states = [bump_solution(t0, x) for x in mesh.coordinates()]
        exact = bump_solution
    else:
        if not cfg.periodic:
            raise ConfigError("the wave problem needs a periodic mesh")
        system = BurgersSystem(mesh, cfl_threshold=cfg.threshold)
        states = mesh.project(wave_initial)
        exact = None
    return mesh, system, states, exact


def evolve(
    cfg: RunConfig,
    step_log: Optional[StepLog] = None,
    cache: Optional[CoefficientCache] = None,
    fixed_steps=None,
) -> RunReport:
    mesh, system, states, exact = build_problem(cfg)
    start = to_ticks(cfg.t_start, cfg.resolution).ticks
    end = to_ticks(cfg.t_end, cfg.resolution).ticks
    clock = time.perf_counter()
    if end == start:
        trace = [(start, system.conserved(states))]
        counts, volume, coupling, smallest = [0] * mesh.n_elements, 0, 0, 0
    else:
        ev = Evolution(
            system,
            states,
            start,
            cfg.order,
            resolution=cfg.resolution,
            initial_step=cfg.initial_step_ticks,
            max_step=aligned_max_step(start, end),
            mode=cfg.mode,
            cache=cache,
            step_log=step_log,
            fixed_steps=fixed_steps,
        )
        smallest = [cfg.initial_step_ticks]

        def track(e):
            smallest[0] = min(smallest[0], min(e.state.step))

        ev.run(end, track)
        states = ev.states()
        trace = ev.conserved_trace
        counts = list(ev.counters["steps"])
        volume, coupling = ev.counters["volume"], ev.counters["coupling"]
        smallest = smallest[0]
    error = None
    if exact is not None:
        t = float(cfg.t_end)
        error = max(float(np.max(np.abs(u - exact(t, x)))) for u, x in zip(states, mesh.coordinates()))
    return RunReport(cfg, error, trace, counts, volume, coupling, time.perf_counter() - clock, smallest, states)


def fit_slope(thresholds, errors) -> float:
    """Least-squares slope of log(error) against log(threshold)."""
    x = np.log(np.asarray(thresholds, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ConvergenceRow:
    order: int
    threshold: float
    error: float
    slope: float


def run_convergence(base: RunConfig, orders, thresholds) -> list[ConvergenceRow]:
    """Bump-problem error at each threshold, with a fitted slope per order.

    ``thresholds`` is either one sequence shared by every order or a mapping
    from order to its own sequence.
    """
    rows = []
    cache = CoefficientCache()
    for k in orders:
        ths = thresholds[k] if isinstance(thresholds, dict) else thresholds
        errs = [evolve(base.replace(order=k, threshold=th), cache=cache).error for th in ths]
        slope = fit_slope(ths, errs) if len(ths) > 1 else math.nan
        rows.extend(ConvergenceRow(k, th, e, slope) for th, e in zip(ths, errs))
    return rows


def run_conservation(cfg: RunConfig) -> RunReport:
    if not cfg.periodic:
        raise ConfigError("conservation runs need a periodic mesh")
    return evolve(cfg)


@dataclass
class SpeedReport:
    reports: dict
    step_ratio: float
    evaluation_ratio: float
    wall_ratio: float
    constant_step_ratio: float


def run_speed(cfg: RunConfig) -> SpeedReport:
    """Compare global, local and constant-step local stepping on one problem.

    The global run takes, at every moment, the smallest step the local run's
    controller would allow anywhere, so its step count is the cost of
    stepping globally at the step the local evolution needs.
    """
    cache = CoefficientCache()
    reports = {mode: evolve(cfg.replace(mode=mode), cache=cache) for mode in ("gts", "lts", "lts-constant")}
    g, l, c = reports["gts"], reports["lts"], reports["lts-constant"]
    return SpeedReport(
        reports,
        step_ratio=g.total_steps / l.total_steps,
        evaluation_ratio=g.evaluations / l.evaluations,
        wall_ratio=g.wall_time / l.wall_time,
        constant_step_ratio=c.wall_time / g.wall_time,
    )
