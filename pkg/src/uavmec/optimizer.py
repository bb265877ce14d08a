"""Outer block-coordinate loop and baseline methods.

The proposed method alternates, per outer iteration: (1) association by
relaxed LP + rounding, (2) per-UAV horizontal SCA step, (3) per-UAV
vertical SCA step, until the min-max completion time stops improving.

Baselines:
* hpo  — horizontal-only, altitudes pinned (60 m by default);
* vpo  — k-means horizontal placement + nearest-centroid association,
  altitude-only optimization;
* clbo — the full loop under the idealized pure-LoS rate; its report
  carries both the LoS-model objective and the deployment re-evaluated
  under the outage-rate model.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import association as assoc_mod
from . import placement
from .lp import Status
from .scenario import Scenario


@dataclass
class Deployment:
    q: np.ndarray        # (M, 2)
    h: np.ndarray        # (M,)

    def copy(self):
        return Deployment(q=self.q.copy(), h=self.h.copy())

    def clipped(self, box):
        return Deployment(
            q=np.column_stack([np.clip(self.q[:, 0], box.x_min, box.x_max),
                               np.clip(self.q[:, 1], box.y_min, box.y_max)]),
            h=np.clip(self.h, box.h_min, box.h_max))


@dataclass
class OptimizerConfig:
    max_outer_iters: int = 50
    rel_tol: float = 1e-4
    restarts: int = 3
    seed: int = 0
    hpo_altitude: float = 60.0
    solver_tol: float = 1e-8

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class SolveReport:
    method: str
    mu: float
    mu_trace: list
    deployment: Deployment
    association: np.ndarray
    per_uav_times: np.ndarray
    iterations: int
    wall_s: float
    converged: bool
    # per-UAV (v, z) variables of the last vertical subproblem, for
    # constraint-tightness diagnostics; None for methods without them
    tightness: list | None = None
    extras: dict = field(default_factory=dict)


def completion_time(scenario: Scenario, deployment: Deployment,
                    association, model="rician"):
    """(mu, per-UAV seconds) for a binary association; empty UAVs take 0."""
    association = np.asarray(association)
    times = assoc_mod.service_time_matrix(scenario, deployment, model=model)
    per_uav = np.sum(association * times, axis=0)
    return float(per_uav.max()), per_uav


def kmeans(points, k, seed=0, max_iters=100):
    """Lloyd's algorithm with k-means++ seeding; returns (centroids, labels)."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    if k > n:
        raise ValueError("k must not exceed the number of points")
    rng = np.random.default_rng(seed)
    centroids = np.empty((k, 2))
    centroids[0] = points[rng.integers(n)]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centroids[c] = points[rng.integers(n)]
        else:
            centroids[c] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centroids[c]) ** 2, axis=1))
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iters):
        dist = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2,
                      axis=-1)
        new_labels = np.argmin(dist, axis=1)
        for c in range(k):
            mask = new_labels == c
            if mask.any():
                centroids[c] = points[mask].mean(axis=0)
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return centroids, labels


def _random_deployment(scenario, rng) -> Deployment:
    box = scenario.fleet.box
    m = scenario.fleet.num_uavs
    q = np.column_stack([rng.uniform(box.x_min, box.x_max, m),
                         rng.uniform(box.y_min, box.y_max, m)])
    h = rng.uniform(box.h_min, box.h_max, m)
    return Deployment(q=q, h=h)


def _ue_data(scenario, served):
    return (scenario.data_bits[served], scenario.cycles[served],
            scenario.tx_powers[served], scenario.fleet.cpu_hz)


def _bcd(scenario, config, init: Deployment, model="rician",
         do_horizontal=True, do_vertical=True, fixed_association=None):
    """Core alternating loop; returns a SolveReport without the method tag."""
    box = scenario.fleet.box
    dep = init.clipped(box).copy()
    n, m = scenario.n_ues, scenario.fleet.num_uavs
    association = fixed_association
    mu_prev = np.inf
    trace = []
    tightness = [None] * m
    converged = False
    iterations = 0
    for it in range(config.max_outer_iters):
        iterations = it + 1
        if fixed_association is None:
            times = assoc_mod.service_time_matrix(scenario, dep, model=model)
            frac, _ = assoc_mod.solve_relaxed(times)
            new_assoc = assoc_mod.round_association(frac)
            if association is not None:
                # rounding can regress; keep the incumbent if it is better
                mu_new = float(np.sum(new_assoc * times, axis=0).max())
                mu_old = float(np.sum(association * times, axis=0).max())
                if mu_new > mu_old + 1e-12:
                    warnings.warn("association rounding regressed; keeping "
                                  "incumbent assignment", stacklevel=2)
                    new_assoc = association
            association = new_assoc
        for j in range(m):
            served = np.flatnonzero(association[:, j])
            if served.size == 0:
                tightness[j] = None
                continue
            ue_pos = scenario.positions[served]
            data = _ue_data(scenario, served)
            if do_horizontal:
                ep = placement.ExpansionPoint.at(
                    dep.q[j], dep.h[j], ue_pos, scenario.tx_powers[served],
                    scenario.channel, model=model)
                sol = placement.solve_horizontal(ep, data, box,
                                                 scenario.channel,
                                                 tol=config.solver_tol,
                                                 model=model)
                dep.q[j] = np.clip(sol.position,
                                   [box.x_min, box.y_min],
                                   [box.x_max, box.y_max])
            if do_vertical:
                ep = placement.ExpansionPoint.at(
                    dep.q[j], dep.h[j], ue_pos, scenario.tx_powers[served],
                    scenario.channel, model=model)
                sol = placement.solve_vertical(ep, data, box,
                                               scenario.channel,
                                               tol=config.solver_tol,
                                               model=model)
                dep.h[j] = float(np.clip(sol.position, box.h_min, box.h_max))
                tightness[j] = (served, sol.v.copy(), sol.z.copy(),
                                sol.accepted)
        mu, per_uav = completion_time(scenario, dep, association, model=model)
        trace.append(mu)
        if mu_prev < np.inf and abs(mu_prev - mu) <= config.rel_tol * max(
                mu_prev, 1e-12):
            converged = True
            break
        mu_prev = mu
    mu, per_uav = completion_time(scenario, dep, association, model=model)
    return SolveReport(method="", mu=mu, mu_trace=trace, deployment=dep,
                       association=association, per_uav_times=per_uav,
                       iterations=iterations, wall_s=0.0, converged=converged,
                       tightness=tightness)


def _best_of_restarts(scenario, config, runner):
    rng = np.random.default_rng(config.seed)
    best = None
    t0 = time.perf_counter()
    for _ in range(config.restarts):
        init = _random_deployment(scenario, rng)
        report = runner(init)
        if best is None or report.mu < best.mu:
            best = report
    best.wall_s = time.perf_counter() - t0
    return best


def solve_proposed(scenario: Scenario, config: OptimizerConfig | None = None):
    config = config or OptimizerConfig()
    report = _best_of_restarts(
        scenario, config, lambda init: _bcd(scenario, config, init))
    report.method = "proposed"
    return report


def solve_hpo(scenario: Scenario, config: OptimizerConfig | None = None):
    config = config or OptimizerConfig()
    box = scenario.fleet.box
    h_fix = float(np.clip(config.hpo_altitude, box.h_min, box.h_max))

    def runner(init):
        init.h[:] = h_fix
        return _bcd(scenario, config, init, do_vertical=False)

    report = _best_of_restarts(scenario, config, runner)
    report.method = "hpo"
    return report


def solve_vpo(scenario: Scenario, config: OptimizerConfig | None = None):
    config = config or OptimizerConfig()
    t0 = time.perf_counter()
    m = scenario.fleet.num_uavs
    centroids, labels = kmeans(scenario.positions, m, seed=config.seed)
    association = np.zeros((scenario.n_ues, m), dtype=int)
    association[np.arange(scenario.n_ues), labels] = 1
    box = scenario.fleet.box
    init = Deployment(q=centroids.copy(),
                      h=np.full(m, 0.5 * (box.h_min + box.h_max)))
    report = _bcd(scenario, config, init, do_horizontal=False,
                  fixed_association=association)
    report.method = "vpo"
    report.wall_s = time.perf_counter() - t0
    return report


def solve_clbo(scenario: Scenario, config: OptimizerConfig | None = None):
    config = config or OptimizerConfig()
    report = _best_of_restarts(
        scenario, config, lambda init: _bcd(scenario, config, init,
                                            model="los"))
    report.method = "clbo"
    mu_eval, per_uav_eval = completion_time(scenario, report.deployment,
                                            report.association)
    report.extras = {"mu_los": report.mu, "mu_eval": mu_eval}
    return report


_METHODS = {
    "proposed": solve_proposed,
    "hpo": solve_hpo,
    "vpo": solve_vpo,
    "clbo": solve_clbo,
}


def solve(scenario: Scenario, method: str,
          config: OptimizerConfig | None = None) -> SolveReport:
    try:
        fn = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method '{method}'") from None
    return fn(scenario, config)
