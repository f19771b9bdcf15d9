"""Table builders behind the command-line subcommands.

Each builder maps an ExperimentConfig to a Table (column names and rows of
plain Python values). Writing and formatting live in ``cli``, so these are
usable directly from scripts and tests.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    AsymptoticParams,
    ClassicalSeed,
    asymptotic_photons,
    classical_yield,
    f_factors,
    lossless_log_negativity,
    asymptotic_log_negativity,
    occurrence_time,
)
from .config import ConfigError, ExperimentConfig, with_parameter
from .dynamics import RING, EvolutionTrace, evolve_linear, evolve_ring
from .floquet import monodromy, stability_map
from .gaussian import thermal_state
from .modulation import TwoStepModulation

# E_N below this is treated as roundoff when locating the first crossing
CROSSING_FLOOR_BITS = 1e-9


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]


def run_evolution(cfg: ExperimentConfig) -> EvolutionTrace:
    profile = cfg.profile()
    bath = cfg.bath_spec()
    modes = 2 if cfg.cavity == RING else 1
    state = thermal_state(bath.nbar, modes)
    evolve = evolve_ring if cfg.cavity == RING else evolve_linear
    return evolve(
        state, profile, bath, cfg.run.t_end,
        snapshot_interval=cfg.run.snapshot_interval, rtol=cfg.run.rel_tol, atol=cfg.run.abs_tol,
    )


def stability_map_table(cfg: ExperimentConfig) -> Table:
    if not isinstance(cfg.profile(), TwoStepModulation):
        raise ConfigError("stability-map needs a twostep modulation")
    if cfg.grid is None:
        raise ConfigError("stability-map needs a [grid] section")
    p = cfg.profile()
    smap = stability_map(p.ratio, cfg.grid.theta1.points(), cfg.grid.theta2.points(), f1=p.f1)
    return Table(("theta1", "theta2", "delta", "mu", "stable"), list(smap.rows()))


def evolve_table(cfg: ExperimentConfig) -> Table:
    tr = run_evolution(cfg)
    cols = ("t", "n_mean", "e_n", "nu_min", "nu_dfs", "trace_sigma")
    data = zip(tr.times, tr.n_mean, tr.e_n, tr.nu_min, tr.nu_dfs, tr.trace_sigma)
    return Table(cols, [tuple(float(v) for v in row) for row in data])


def compare_classical_table(cfg: ExperimentConfig) -> Table:
    """Quantum ``<N + 1>`` next to the classical yield with a thermal seed and with none.

    The thermal seed equals the initial quantum ``<N + 1>``, so both curves
    start together and differ only in how they grow.
    """
    tr = run_evolution(cfg)
    mu = monodromy(cfg.profile()).mu
    gamma, T = cfg.bath.gamma, cfg.profile().period
    thermal = ClassicalSeed(float(tr.n_mean[0]))
    zero = ClassicalSeed(0.0)
    rows = []
    for t, n in zip(tr.times, tr.n_mean):
        m = t / T
        rows.append((float(t), float(n), classical_yield(thermal, mu, gamma, m, T), classical_yield(zero, mu, gamma, m, T)))
    return Table(("t", "n_quantum", "n_classical_thermal_seed", "n_classical_zero_seed"), rows)


def asymptotics_table(cfg: ExperimentConfig) -> Table:
    """Asymptotic photon count, E_N and F factors at every period mark up to ``t_end``."""
    profile = cfg.profile()
    params = AsymptoticParams.from_profile(profile, cfg.bath_spec())
    T = params.T
    rows = []
    for m in range(1, int(math.floor(cfg.run.t_end / T * (1 + 1e-12))) + 1):
        n = asymptotic_photons(params, m)
        fp, fm = f_factors(params, m)
        if params.gamma > 0:
            e_n = asymptotic_log_negativity(params, m)
        else:
            e_n = lossless_log_negativity(params, m)
        rows.append((m, m * T, n.value, n.log_value, e_n, fp, fm))
    return Table(("m", "t", "n_mean", "log_n_mean", "e_n", "f_plus", "f_minus"), rows)


def first_crossing(trace: EvolutionTrace, floor: float = CROSSING_FLOOR_BITS) -> float:
    """Time of the first snapshot with ``E_N > floor``; ``inf`` if none."""
    hits = np.nonzero(trace.e_n > floor)[0]
    return float(trace.times[hits[0]]) if hits.size else math.inf


def _occurrence_point(cfg: ExperimentConfig) -> tuple[float, float]:
    params = AsymptoticParams.from_profile(cfg.profile(), cfg.bath_spec())
    analytic = occurrence_time(params).t_occ
    numeric = first_crossing(run_evolution(cfg))
    return analytic, numeric


def default_threads() -> int:
    env = os.environ.get("DCESIM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"DCESIM_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("DCESIM_THREADS must be at least 1")
        return n
    return 1


def occurrence_table(cfg: ExperimentConfig, threads: int | None = None) -> Table:
    """Analytic and numeric occurrence times across the configured sweep.

    Each sweep point is an independent evolution over ``[0, run.t_end]``;
    with ``threads > 1`` they run in worker processes and the rows keep the
    sweep order.
    """
    if cfg.cavity != RING:
        raise ConfigError("occurrence needs cavity = 'ring' (entanglement is between the ring modes)")
    if cfg.sweep is None:
        raise ConfigError("occurrence needs a [sweep] section")
    points = [with_parameter(cfg, cfg.sweep.parameter, v) for v in cfg.sweep.values]
    threads = default_threads() if threads is None else threads
    if threads > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(points))) as pool:
            results = list(pool.map(_occurrence_point, points))
    else:
        results = [_occurrence_point(p) for p in points]
    rows = [(v, a, n) for v, (a, n) in zip(cfg.sweep.values, results)]
    return Table(("sweep_value", "t_occ_analytic", "t_occ_numeric"), rows)


__all__ = [
    "CROSSING_FLOOR_BITS", "Table", "run_evolution", "stability_map_table", "evolve_table",
    "compare_classical_table", "asymptotics_table", "first_crossing", "occurrence_table",
    "default_threads",
]
