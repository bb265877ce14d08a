"""Command-line harness: gen / solve / sweep / verify.

Exit codes: 0 success (and convergence for `solve`), 2 iteration limit,
1 any error. All output files embed the seed, the git-describe string of
the working tree (when available), and the full configuration, so runs
can be reproduced bit-identically; wall-clock timings go to a separate
timings file to keep the result CSVs deterministic.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import oracle, optimizer, placement, scenario as scenario_mod, svg
from .channel import ChannelParams
from .scenario import FleetConfig, Box, ScenarioError

RESULTS_CSV_SCHEMA = "uavmec-sweep-v1"
METHODS = ("proposed", "hpo", "vpo", "clbo")


def _git_describe():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10,
                             cwd=Path(__file__).parent)
        return out.stdout.strip() or "unknown"
    except OSError:
        return "unknown"


def _file_hash(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _config_from_args(args, seed):
    return optimizer.OptimizerConfig(
        max_outer_iters=args.max_iters, rel_tol=args.tol,
        restarts=args.restarts, seed=seed)


def cmd_gen(args):
    box = Box()
    fleet = FleetConfig(num_uavs=args.uavs, box=box)
    sc = scenario_mod.generate(args.seed, args.ues, fleet, ChannelParams())
    scenario_mod.save(sc, args.out)
    print(f"wrote {args.out} ({args.ues} UEs, {args.uavs} UAVs, "
          f"seed {args.seed})")
    return 0


def _write_report(report, scenario_path, sc, args, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = report.method
    doc = {
        "method": report.method,
        "mu_s": report.mu,
        "mu_trace_s": list(report.mu_trace),
        "per_uav_times_s": report.per_uav_times.tolist(),
        "iterations": report.iterations,
        "converged": report.converged,
        "wall_s": report.wall_s,
        "extras": report.extras,
        "scenario_file": str(scenario_path),
        "scenario_hash": _file_hash(scenario_path),
        "scenario_seed": sc.seed,
        "git_describe": _git_describe(),
        "config": {
            "max_outer_iters": args.max_iters,
            "rel_tol": args.tol,
            "restarts": args.restarts,
            "seed": args.seed,
        },
    }
    with open(out_dir / f"report_{tag}.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    with open(out_dir / f"deployment_{tag}.csv", "w") as fh:
        fh.write(f"# schema={RESULTS_CSV_SCHEMA} seed={sc.seed} "
                 f"git={_git_describe()}\n")
        fh.write("uav_id,x_m,y_m,h_m\n")
        for j in range(sc.fleet.num_uavs):
            fh.write(f"{j},{report.deployment.q[j, 0]!r},"
                     f"{report.deployment.q[j, 1]!r},"
                     f"{report.deployment.h[j]!r}\n")
    with open(out_dir / f"association_{tag}.csv", "w") as fh:
        fh.write(f"# schema={RESULTS_CSV_SCHEMA} seed={sc.seed} "
                 f"git={_git_describe()}\n")
        fh.write("ue_id,uav_id\n")
        for i in range(sc.n_ues):
            fh.write(f"{i},{int(np.argmax(report.association[i]))}\n")


def cmd_solve(args):
    try:
        sc = scenario_mod.load(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    methods = METHODS if args.method == "all" else (args.method,)
    worst = 0
    for method in methods:
        config = _config_from_args(args, args.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = optimizer.solve(sc, method, config)
        _write_report(report, args.scenario, sc, args, args.out)
        print(f"{method}: mu={report.mu:.6f} s, iterations={report.iterations}, "
              f"converged={report.converged}")
        if not report.converged:
            worst = max(worst, 2)
    return worst


def _sweep_point(payload):
    (sweep_var, value, method, seed, n_ues, n_uavs, max_iters, tol,
     restarts) = payload
    if sweep_var == "num_ues":
        n_ues = value
    else:
        n_uavs = value
    sc = scenario_mod.generate(seed, n_ues, FleetConfig(num_uavs=n_uavs))
    config = optimizer.OptimizerConfig(max_outer_iters=max_iters, rel_tol=tol,
                                       restarts=restarts, seed=seed)
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = optimizer.solve(sc, method, config)
        mu = report.extras.get("mu_eval", report.mu) if method == "clbo" \
            else report.mu
        return (value, method, seed, mu, report.iterations, "ok",
                time.perf_counter() - t0)
    except Exception as exc:  # keep the sweep going; record the failure
        return (value, method, seed, float("nan"), 0,
                f"failed:{type(exc).__name__}", time.perf_counter() - t0)


def run_sweep(spec: dict, out_dir, jobs=1):
    sweep_var = spec["sweep_var"]
    if sweep_var not in ("num_ues", "num_uavs"):
        raise ValueError("sweep_var must be num_ues or num_uavs")
    values = spec["values"]
    if list(values) != sorted(set(values)):
        raise ValueError("sweep values must be strictly increasing")
    methods = spec["methods"]
    if not methods:
        raise ValueError("at least one method required")
    seeds = spec.get("seeds")
    if seeds is None:
        base = spec.get("base_seed", 0)
        seeds = [base + k for k in range(spec.get("seeds_per_point", 1))]
    n_ues = spec.get("num_ues", 30)
    n_uavs = spec.get("num_uavs", 5)
    max_iters = spec.get("max_iters", 50)
    tol = spec.get("rel_tol", 1e-4)
    restarts = spec.get("restarts", 1)

    points = [(sweep_var, v, m, s, n_ues, n_uavs, max_iters, tol, restarts)
              for v in values for m in methods for s in seeds]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = (f"# schema={RESULTS_CSV_SCHEMA} git={_git_describe()} "
              f"spec={json.dumps(spec, sort_keys=True)}\n")
    with open(out_dir / "results.csv", "w") as fh:
        fh.write(header)
        fh.write("sweep_var,value,method,seed,mu_s,iters,status\n")
        for (value, method, seed, mu, iters, status, _wall) in rows:
            fh.write(f"{sweep_var},{value},{method},{seed},{mu!r},"
                     f"{iters},{status}\n")
    with open(out_dir / "timings.csv", "w") as fh:
        fh.write(header)
        fh.write("sweep_var,value,method,seed,wall_ms\n")
        for (value, method, seed, _mu, _iters, _status, wall) in rows:
            fh.write(f"{sweep_var},{value},{method},{seed},{wall * 1e3:.1f}\n")

    # aggregate per (value, method)
    agg = {}
    for (value, method, seed, mu, _iters, status, _wall) in rows:
        if status == "ok":
            agg.setdefault((value, method), []).append(mu)
    with open(out_dir / "aggregate.csv", "w") as fh:
        fh.write(header)
        fh.write("sweep_var,value,method,mean_mu_s,std_mu_s,n\n")
        for (value, method) in sorted(agg, key=lambda k: (k[0], k[1])):
            mus = np.array(agg[(value, method)])
            fh.write(f"{sweep_var},{value},{method},{float(mus.mean())!r},"
                     f"{float(mus.std())!r},{len(mus)}\n")

    series = []
    for method in methods:
        xs = [v for v in values if (v, method) in agg]
        ys = [float(np.mean(agg[(v, method)])) for v in xs]
        if xs:
            series.append((method, xs, ys))
    if series:
        chart = svg.line_chart(series, xlabel=sweep_var,
                               ylabel="mean completion time (s)",
                               title=f"completion time vs {sweep_var}")
        (out_dir / "chart.svg").write_text(chart)
    return rows


def cmd_sweep(args):
    try:
        spec = json.loads(Path(args.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    run_sweep(spec, args.out, jobs=args.jobs)
    print(f"sweep complete; results in {args.out}")
    return 0


def _verify_checks(level):
    """Yield (name, passed, detail) for each verification suite."""
    n_samples = 10 ** 4 if level == "full" else 2000
    n_scen = 10 if level == "full" else 3
    # bound domination
    worst = -np.inf
    for k in range(n_scen):
        sc = scenario_mod.generate(100 + k, 10, FleetConfig(num_uavs=3))
        worst = max(worst, oracle.bound_domination_sample(sc, n_samples,
                                                          seed=k))
    yield ("bound-domination", worst <= 1e-9, f"max violation {worst:.3e}")

    # finite differences of the bound coefficients
    params = ChannelParams()
    rng = np.random.default_rng(0)
    max_err = 0.0
    n_pts = 1000 if level == "full" else 200
    for _ in range(n_pts):
        v_hat = rng.uniform(0.05, 0.999)
        d_sq = rng.uniform(1600.0, 3e4)
        gamma = params.gamma(0.1)
        ce, cq = placement.taylor_coefficients(v_hat, d_sq, gamma, params)

        def f(p):
            x, y = p
            e = np.exp(-(params.k3 + params.k4 * v_hat))
            xc, yc = 1 + e, d_sq
            return params.bandwidth_hz * np.log2(
                1 + (params.k1 + params.k2 / (x + xc))
                * gamma / (y + yc) ** (params.pathloss_exp / 2))

        e_hat = np.exp(-(params.k3 + params.k4 * v_hat))
        err = oracle.finite_diff_check(
            f, lambda p: np.array([-ce, -cq]), np.zeros(2),
            step=1e-5, scales=(1 + e_hat, d_sq))
        max_err = max(max_err, err)
    yield ("coefficient-finite-difference", max_err <= 1e-6,
           f"max rel error {max_err:.3e}")

    # convexity of the exact sine constraint v - h / sqrt(a3 + h^2):
    # its Hessian in (v, h) is diag(0, 3 a3 h / (a3 + h^2)^2.5); check the
    # eigenvalues and cross-validate the curvature entry by differences
    rng = np.random.default_rng(1)
    min_eig = np.inf
    max_fd_err = 0.0
    for _ in range(1000 if level == "full" else 200):
        h = rng.uniform(40.0, 80.0)
        a3 = rng.uniform(0.0, 2e4)
        hess = np.array([[0.0, 0.0],
                         [0.0, 3.0 * a3 * h / (a3 + h ** 2) ** 2.5]])
        min_eig = min(min_eig, float(np.linalg.eigvalsh(hess).min()))
        eps = 0.05
        def g(hh):
            return -hh / np.sqrt(a3 + hh ** 2)
        d2 = (g(h + eps) - 2 * g(h) + g(h - eps)) / eps ** 2
        max_fd_err = max(max_fd_err, abs(d2 - hess[1, 1]))
    yield ("sine-constraint-convexity",
           min_eig >= -1e-12 and max_fd_err <= 1e-9,
           f"min eigenvalue {min_eig:.3e}, curvature fd error {max_fd_err:.3e}")

    # small-instance grid comparison
    sc = scenario_mod.generate(5, 3, FleetConfig(num_uavs=2))
    grid = oracle.GridSpec(2.0, 1.0) if level == "fast" \
        else oracle.GridSpec(1.0, 0.5)
    ref = oracle.grid_search(sc, grid)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = optimizer.solve_proposed(
            sc, optimizer.OptimizerConfig(restarts=5, seed=0))
    ratio = rep.mu / ref.mu
    yield ("small-instance-grid-gap", ratio <= 1.10,
           f"proposed/grid ratio {ratio:.4f}")


def cmd_verify(args):
    failed = 0
    for name, ok, detail in _verify_checks(args.level):
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failed += 1
    return 1 if failed else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="uavmec")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random scenario file")
    p.add_argument("--ues", type=int, required=True)
    p.add_argument("--uavs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("solve", help="solve one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--method", default="proposed",
                   choices=METHODS + ("all",))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--out", default="out")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("sweep", help="run a parameter sweep from a spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default="sweep_out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--level", default="fast", choices=("fast", "full"))
    p.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
