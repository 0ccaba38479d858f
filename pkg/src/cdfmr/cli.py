"""Command line front end.

    cdfmr analyze  SCENARIO [--out DIR]
    cdfmr simulate SCENARIO [--seed S] [--samples N] [--workers W] [--out DIR]
    cdfmr sweep    SCENARIO [...]
    cdfmr reproduce {ergodic,outage,ser,snr_gain} [...]

Results are CSV on stdout, or files under ``--out`` written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import analytic
from .network import ClusterTopology, balanced_budget, modulation_from_name, unbalanced_budget
from .scenario import Scenario, ScenarioError, db_to_linear, parse_scenario, sweep_points
from .simulator import METRICS, SimulationConfig, estimate

SWEEP_COLUMNS = ("gamma_d_db", "metric", "analytic", "asymptotic", "mc_mean", "mc_stderr")
FIGURES = ("ergodic", "outage", "ser", "snr_gain")
FIGURE_TOPOLOGIES = ((2, 1), (3, 2), (3, 3), (2, 1, 1, 1, 1), (3, 2, 2, 2, 2), (3, 3, 3, 3, 3))
FIGURE_METRIC = {"ergodic": "capacity", "outage": "outage", "ser": "ser", "snr_gain": "snr_gain"}
FIGURE_DELTA = 4.0
FIGURE_RATE = 0.3
TREND_GAMMA_D_DB = 20.0
SNR_GAIN_GAMMA_D_DB = 0.0
SNR_GAIN_MU_DB = (0.0, 40.0, 2.0)


class RunError(RuntimeError):
    pass


def _num(v) -> str:
    return "" if v is None else f"{v:.9g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _metric_label(mu: float, scenario: Scenario) -> str:
    return "snr_gain" if scenario.mu_sweep is None else f"snr_gain@mu={mu:.9g}"


def _analytic_row(metric, topology, budget, scenario, mu=None):
    if metric == "outage":
        return (analytic.outage_probability(topology, budget, scenario.threshold),
                analytic.asymptotic_outage(topology, budget, scenario.threshold))
    if metric == "capacity":
        return analytic.ergodic_capacity(topology, budget), None
    if metric == "ser":
        return (analytic.ser(topology, budget, scenario.mod),
                analytic.asymptotic_ser(topology, budget, scenario.mod))
    return analytic.prob_snr_gain(topology, budget, mu), None


def _simulate_point(topology, budget, scenario, mus, workers):
    """MC estimates keyed by (metric, mu); every call reuses the same seed."""
    metrics = [m for m in METRICS if m in scenario.outputs]
    base = SimulationConfig(
        sample_count=scenario.samples,
        seed=scenario.seed,
        metrics=frozenset(metrics),
        threshold=scenario.threshold if "outage" in metrics else None,
        mod=scenario.mod if "ser" in metrics else None,
        mu=mus[0] if "snr_gain" in metrics else None,
        workers=workers,
    )
    result = {}
    for name, est in estimate(topology, budget, base).items():
        result[(name, mus[0] if name == "snr_gain" else None)] = est
    if "snr_gain" in metrics:
        for mu in mus[1:]:
            cfg = SimulationConfig(
                sample_count=scenario.samples, seed=scenario.seed,
                metrics=frozenset({"snr_gain"}), mu=mu, workers=workers,
            )
            result[("snr_gain", mu)] = estimate(topology, budget, cfg)["snr_gain"]
    return result


def sweep_rows(scenario: Scenario, mode: str = "sweep", workers: int = 1) -> list[tuple]:
    if mode not in ("analyze", "simulate", "sweep"):
        raise ValueError(f"unknown mode {mode!r}")
    topology = scenario.topology
    mus = scenario.mu_grid()
    rows = []
    for gd_db in scenario.gamma_d_grid_db():
        try:
            budget = scenario.budget(gd_db)
            mc = _simulate_point(topology, budget, scenario, mus, workers) if mode != "analyze" else {}
            for metric in METRICS:
                if metric not in scenario.outputs:
                    continue
                for mu in (mus if metric == "snr_gain" else [None]):
                    exact = asym = None
                    if mode != "simulate":
                        exact, asym = _analytic_row(metric, topology, budget, scenario, mu)
                    est = mc.get((metric, mu))
                    label = _metric_label(mu, scenario) if metric == "snr_gain" else metric
                    rows.append((gd_db, label, exact, asym,
                                 None if est is None else est.value,
                                 None if est is None else est.std_error))
        except (ValueError, ArithmeticError) as exc:
            raise RunError(f"topology {topology}, gamma_d_db={gd_db:g}: {exc}") from exc
    return rows


def run_sweep(scenario: Scenario, mode: str = "sweep", workers: int = 1) -> str:
    """CSV with one row per grid point and metric."""
    rows = sweep_rows(scenario, mode, workers)
    return _csv(SWEEP_COLUMNS, [(_num(g), m, *(_num(v) for v in rest)) for g, m, *rest in rows])


@dataclass(frozen=True)
class TrendCheck:
    name: str
    passed: bool
    detail: str


def _topo(sizes) -> ClusterTopology:
    return ClusterTopology(tuple(sizes))


def _unbalanced(sizes, gd_db):
    return unbalanced_budget(len(sizes), FIGURE_DELTA, db_to_linear(gd_db))


def _chain(name, values, decreasing):
    labels = [str(_topo(t)) for t, _ in values]
    nums = [v for _, v in values]
    ok = all((a > b) if decreasing else (a < b) for a, b in zip(nums, nums[1:]))
    rel = " > " if decreasing else " < "
    return TrendCheck(name, ok, rel.join(f"{lab}:{v:.6g}" for lab, v in zip(labels, nums)))


def trend_checks(figure_id: str) -> list[TrendCheck]:
    """Analytic curve-ordering checks for one figure."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure {figure_id!r}; expected one of {', '.join(FIGURES)}")
    gd = TREND_GAMMA_D_DB
    three, six = FIGURE_TOPOLOGIES[:3], FIGURE_TOPOLOGIES[3:]
    checks = []
    if figure_id == "ergodic":
        cap = {t: analytic.ergodic_capacity(_topo(t), _unbalanced(t, gd)) for t in FIGURE_TOPOLOGIES}
        checks.append(_chain("capacity increases with L_m (3-hop)", [(t, cap[t]) for t in three], False))
        checks.append(_chain("capacity increases with L_m (6-hop)", [(t, cap[t]) for t in six], False))
        for a, b in zip(three, six):
            checks.append(TrendCheck(
                f"capacity {_topo(a)} > {_topo(b)}", cap[a] > cap[b], f"{cap[a]:.6g} vs {cap[b]:.6g}"))
    elif figure_id in ("outage", "ser"):
        th = analytic.OutageThreshold(FIGURE_RATE)
        mod = modulation_from_name("BPSK")
        for group, label in ((three, "3-hop"), (six, "6-hop")):
            if figure_id == "outage":
                vals = [(t, analytic.outage_probability(_topo(t), _unbalanced(t, gd), th)) for t in group]
            else:
                vals = [(t, analytic.ser(_topo(t), _unbalanced(t, gd), mod)) for t in group]
            checks.append(_chain(f"{figure_id} decreases with L_m ({label})", vals, True))
    else:
        gd_lin = db_to_linear(SNR_GAIN_GAMMA_D_DB)
        for t in FIGURE_TOPOLOGIES:
            topo = _topo(t)
            bl = balanced_budget(topo.n_clusters, FIGURE_DELTA, gd_lin)
            ubl = unbalanced_budget(topo.n_clusters, FIGURE_DELTA, gd_lin)
            worst = min(
                analytic.prob_snr_gain(topo, bl, db_to_linear(m)) - analytic.prob_snr_gain(topo, ubl, db_to_linear(m))
                for m in sweep_points(SNR_GAIN_MU_DB)
            )
            checks.append(TrendCheck(f"BL >= UBL {topo}", worst >= 0.0, f"min(BL - UBL) = {worst:.6g}"))
    return checks


def _figure_name(figure_id: str, sizes) -> str:
    return f"{figure_id}_" + "-".join(map(str, sizes)) + ".csv"


def reproduce_figure(
    figure_id: str,
    samples: int = 1_000_000,
    seed: int = 42,
    workers: int = 1,
    gamma_d_sweep_db: tuple[float, float, float] = (0.0, 30.0, 2.0),
) -> dict[str, str]:
    """CSV documents (file name -> text) for one of the result figures."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure {figure_id!r}; expected one of {', '.join(FIGURES)}")
    docs = {}
    metric = FIGURE_METRIC[figure_id]
    for sizes in FIGURE_TOPOLOGIES:
        if figure_id != "snr_gain":
            sc = Scenario(
                clusters=sizes, budget_model="unbalanced", delta=FIGURE_DELTA,
                gamma_d_sweep_db=gamma_d_sweep_db, rate_threshold=FIGURE_RATE,
                modulation=("BPSK", None), samples=samples, seed=seed, outputs=(metric,),
            )
            docs[_figure_name(figure_id, sizes)] = run_sweep(sc, "sweep", workers)
            continue
        rows = []
        for model in ("balanced", "unbalanced"):
            sc = Scenario(
                clusters=sizes, budget_model=model, delta=FIGURE_DELTA,
                gamma_d_sweep_db=(SNR_GAIN_GAMMA_D_DB, SNR_GAIN_GAMMA_D_DB, 1.0),
                samples=samples, seed=seed, outputs=("snr_gain",),
            )
            budget = sc.budget(SNR_GAIN_GAMMA_D_DB)
            mus = [db_to_linear(m) for m in sweep_points(SNR_GAIN_MU_DB)]
            mc = _simulate_point(sc.topology, budget, sc, mus, workers)
            for mu_db, mu in zip(sweep_points(SNR_GAIN_MU_DB), mus):
                est = mc[("snr_gain", mu)]
                exact = analytic.prob_snr_gain(sc.topology, budget, mu)
                rows.append((model, _num(mu_db), _num(exact), _num(est.value), _num(est.std_error)))
        docs[_figure_name(figure_id, sizes)] = _csv(
            ("budget_model", "mu_db", "analytic", "mc_mean", "mc_stderr"), rows)
    checks = trend_checks(figure_id)
    summary = [(c.name, "pass" if c.passed else "fail", c.detail) for c in checks]
    summary.append(("all", "pass" if all(c.passed for c in checks) else "fail", ""))
    docs[f"{figure_id}_summary.csv"] = _csv(("check", "result", "detail"), summary)
    return docs


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(docs: dict[str, str], out: str | None) -> None:
    if out is None:
        for i, (name, text) in enumerate(docs.items()):
            if len(docs) > 1:
                sys.stdout.write(("\n" if i else "") + f"# {name}\n")
            sys.stdout.write(text)
        return
    # render everything before touching the output directory
    for name, text in docs.items():
        write_atomic(Path(out) / name, text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdfmr", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="override scenario seed")
        p.add_argument("--samples", type=int, default=None, help="override Monte Carlo sample count")
        p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo chunks")
        p.add_argument("--out", default=None, help="directory for CSV output (default: stdout)")

    for name, text in (("analyze", "closed forms and asymptotes"),
                       ("simulate", "Monte Carlo only"),
                       ("sweep", "closed forms and Monte Carlo")):
        p = sub.add_parser(name, help=text)
        p.add_argument("scenario", help="scenario file")
        common(p)
    p = sub.add_parser("reproduce", help="data tables for the result figures")
    p.add_argument("figure_id", choices=FIGURES)
    common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.workers < 1:
            raise RunError("--workers must be positive")
        if args.command == "reproduce":
            docs = reproduce_figure(
                args.figure_id,
                samples=1_000_000 if args.samples is None else args.samples,
                seed=42 if args.seed is None else args.seed,
                workers=args.workers,
            )
        else:
            scenario = parse_scenario(Path(args.scenario).read_text(encoding="utf-8"))
            overrides = {}
            if args.seed is not None:
                overrides["seed"] = args.seed
            if args.samples is not None:
                overrides["samples"] = args.samples
            if overrides:
                scenario = scenario.replace(**overrides)
            name = Path(args.scenario).stem + f"_{args.command}.csv"
            docs = {name: run_sweep(scenario, args.command, args.workers)}
        _emit(docs, args.out)
    except (OSError, ScenarioError, RunError, ValueError, ArithmeticError) as exc:
        print(f"cdfmr: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
