"""Command line entry point.

Subcommands: ingest, fit, bootstrap, score, compare, simulate, report.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapPlan, bootstrap_regression, read_replicates_csv, relative_slope
from .errors import InputError, SkillScoreError, UsageError
from .ingest import (
    ClampPolicy,
    Dataset,
    build_dataset,
    experience_quantile_table,
    read_boundaries_csv,
    read_gamelog_csv,
    read_halves_csv,
    write_boundaries_csv,
    write_gamelog_csv,
    write_halves,
    write_halves_csv,
)
from .kernels import BACKEND
from .report import AnalysisReport
from .scoring import (
    DEFAULT_TRANSFORMS,
    DEFAULT_WEIGHTS,
    BASE_WEIGHTS,
    TransformSpec,
    WeightSpec,
    compare_games,
    consensus,
    grid_scores,
    histogram,
    point_score,
    quantile_summary,
    score_distribution,
    scored_t,
    QuantileSummary,
)
from .simulate import GameModel, SimConfig, simulate_season
from .statmath import InferenceOptions, fit_ols

DISPLAY_NAMES = {
    "intercept": "Intercept",
    "probit_w1": "probit(First Half Win Proportion)",
    "e1": "First Half Experience",
    "e2": "Second Half Experience",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------ arg helpers


def _range(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError("rescale range needs LO < HI")
    return lo, hi


def _cutoffs(text):
    try:
        a, b = (float(v) for v in text.split(":"))
        return TransformSpec(a, b)
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(f"bad cutoffs {text!r}: {exc}") from None


def _weights(text):
    try:
        vals = [float(v) for v in text.split(":")]
        if len(vals) != 3:
            raise ValueError("need three weights")
        return WeightSpec.normalized(*vals)
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(f"bad weights {text!r}: {exc}") from None


def _triple(text):
    try:
        vals = [float(v) for v in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected t1:t2:t3, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected exactly three t-statistics")
    return vals


def _seed_value(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_input_args(p):
    p.add_argument("input", help="game-log or pre-aggregated halves CSV")
    p.add_argument("--format", choices=("gamelog", "halves"), default="gamelog")
    p.add_argument("--min-games", type=int, default=1, metavar="K")
    p.add_argument("--clamp", choices=("half", "epsilon"), default="half")
    p.add_argument("--experience", choices=("count", "rating"), default="count")
    p.add_argument("--rescale", type=_range, metavar="LO:HI")
    p.add_argument("--boundaries", metavar="FILE",
                   help="CSV player_id,boundary splitting each history at a game_index")


def _add_fit_args(p):
    p.add_argument("--reference", choices=("t", "normal"), default="t",
                   help="reference distribution for p-values")


def _add_bootstrap_args(p):
    p.add_argument("--bootstrap", type=int, default=1000, metavar="B")
    p.add_argument("--seed", type=_seed_value, metavar="S")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--ci", choices=("normal", "percentile", "both"), default="both")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--replicates-out", metavar="FILE")
    p.add_argument("--hist-dir", metavar="DIR",
                   help="write one coefficient histogram CSV per variable")


def _add_score_args(p):
    p.add_argument("--cutoffs", type=_cutoffs, action="append", metavar="a:b")
    p.add_argument("--weights", type=_weights, action="append", metavar="w1:w2:w3")
    p.add_argument("--grid", choices=("default",))
    p.add_argument("--label", default=None)
    p.add_argument("--scores-out", metavar="FILE")
    p.add_argument("--grid-out", metavar="FILE")
    p.add_argument("--hist-out", metavar="FILE")


def _add_output_args(p):
    p.add_argument("--out", metavar="FILE", help="report JSON path")
    p.add_argument("--json", action="store_true", help="print JSON instead of CSV tables")
    p.add_argument("--bins", type=int, default=50)


def build_parser():
    parser = _Parser(prog="skillscore", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"skillscore {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="split game logs into per-player halves")
    _add_input_args(p)
    p.add_argument("--out", metavar="FILE", help="halves CSV (default stdout)")
    p.add_argument("--quantile-groups", type=int, default=0, metavar="G",
                   help="also print mean win rates per experience quantile group")

    p = sub.add_parser("fit", help="fit the probit win-rate regression")
    _add_input_args(p)
    _add_fit_args(p)
    _add_output_args(p)

    p = sub.add_parser("bootstrap", help="paired bootstrap of the regression")
    _add_input_args(p)
    _add_fit_args(p)
    _add_bootstrap_args(p)
    _add_output_args(p)

    p = sub.add_parser("score", help="skill scores from t-statistics")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--replicates", metavar="FILE", help="bootstrap replicate CSV")
    src.add_argument("--t", type=_triple, metavar="t1:t2:t3")
    p.add_argument("--from-report", metavar="FILE",
                   help="take point t-statistics from a fit report")
    p.add_argument("--point", action="store_true", help="score a single fit")
    _add_score_args(p)
    _add_output_args(p)

    p = sub.add_parser("compare", help="partial order of games from score reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("simulate", help="simulate a season from the latent skill model")
    p.add_argument("--players", type=int, default=100)
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--skill-weight", type=float, default=1.0)
    p.add_argument("--learn", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=50.0)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--skill-sd", type=float, default=1.0)
    p.add_argument("--games-spread", type=float, default=0.5)
    p.add_argument("--pairing", choices=("uniform", "skill"), default="uniform")
    p.add_argument("--seed", type=_seed_value)
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--boundaries-out", metavar="FILE")

    p = sub.add_parser("report", help="fit, bootstrap and score in one pass")
    _add_input_args(p)
    _add_fit_args(p)
    _add_bootstrap_args(p)
    _add_score_args(p)
    _add_output_args(p)
    return parser


# --------------------------------------------------------------- pipeline


def load_dataset(args) -> Dataset:
    path = args.input
    if not Path(path).is_file():
        raise InputError(f"{path}: no such file")
    if args.format == "halves":
        if args.boundaries or args.experience != "count":
            raise UsageError("--boundaries and --experience apply to game logs only")
        ds = read_halves_csv(path)
        if args.min_games > 1:
            ds = ds.filter_min_games(args.min_games)
    else:
        rows = read_gamelog_csv(path)
        bounds = read_boundaries_csv(args.boundaries) if args.boundaries else None
        ds = build_dataset(rows, args.min_games, ClampPolicy(args.clamp), args.experience,
                           bounds, source=str(path))
    if args.rescale:
        ds = ds.rescaled(*args.rescale)
    return ds


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if isinstance(v, TransformSpec):
            v = [v.a, v.b]
        elif isinstance(v, list) and v and isinstance(v[0], TransformSpec):
            v = [[s.a, s.b] for s in v]
        elif isinstance(v, list) and v and isinstance(v[0], WeightSpec):
            v = [[w.perf, w.prev_exp, w.curr_exp] for w in v]
        elif isinstance(v, tuple):
            v = list(v)
        cfg[k] = v
    return cfg


def _meta(args, dataset: Dataset | None = None) -> dict:
    return {
        "tool": "skillscore",
        "version": __version__,
        "backend": BACKEND,
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "config": _config(args),
        "provenance": dict(dataset.provenance) if dataset is not None else None,
    }


def _resolve_seed(args):
    if getattr(args, "seed", None) is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)


def run_fit(args, dataset: Dataset) -> dict:
    X, y = dataset.design()
    n, k = X.shape
    if n <= k + 1:
        warnings.warn(f"only {n} rows for {k} coefficients: the fit is exact or nearly so")
    fit = fit_ols(X, y, ("intercept", "probit_w1", "e1", "e2"),
                  InferenceOptions(args.reference))
    out = fit.to_dict()
    for row in out["coefficients"]:
        row["label"] = DISPLAY_NAMES[row["variable"]]
    out["mean_w1"] = dataset.mean_first_half_win_rate()
    return out


def run_bootstrap(args, dataset: Dataset):
    plan = BootstrapPlan(args.bootstrap, args.seed, args.alpha)
    res = bootstrap_regression(dataset, plan, InferenceOptions(args.reference), n_jobs=args.jobs)
    out = res.to_dict()
    baseline = dataset.mean_first_half_win_rate()
    rel = {}
    for j, name in enumerate(res.names[1:], start=1):
        r = relative_slope(res.coef[:, j], baseline)
        rel[name] = {"median": float(np.median(r)), "mean": float(r.mean())}
    out["relative_slope"] = {"baseline_mean_w1": baseline, "coefficients": rel}
    if args.ci != "both":
        drop = "percentile_ci" if args.ci == "normal" else "normal_ci"
        for row in out["coefficients"]:
            row.pop(drop)
    if args.replicates_out:
        res.write_replicates_csv(args.replicates_out)
    if args.hist_dir:
        d = Path(args.hist_dir)
        d.mkdir(parents=True, exist_ok=True)
        for j, name in enumerate(res.names):
            col = res.coef[:, j]
            lo, hi = float(col.min()), float(col.max())
            if lo == hi:
                lo, hi = lo - 0.5, hi + 0.5
            _write_hist(d / f"hist_coef_{name}.csv", histogram(col, args.bins, lo, hi))
    return res, out


def _write_hist(path, bins):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in bins:
            w.writerow([repr(lo), repr(hi), c])


def _score_grid(args):
    if args.grid == "default" or not (args.cutoffs or args.weights):
        transforms, weights = DEFAULT_TRANSFORMS, DEFAULT_WEIGHTS
    else:
        transforms = tuple(args.cutoffs or DEFAULT_TRANSFORMS)
        weights = tuple(args.weights or DEFAULT_WEIGHTS)
    primary_t = args.cutoffs[0] if args.cutoffs else TransformSpec()
    primary_w = args.weights[0] if args.weights else BASE_WEIGHTS
    return transforms, weights, primary_t, primary_w


def run_score(args, t_reps: np.ndarray, label: str, point_t=None) -> dict:
    """Score t-statistic triples: distribution, grid and the final (median) score."""
    transforms, weights, primary_t, primary_w = _score_grid(args)
    dist = score_distribution(t_reps, primary_t, primary_w, label)
    summary = quantile_summary(dist)
    cells = grid_scores(t_reps, transforms, weights)
    out = {
        "label": label,
        "mode": "point" if point_t is not None else "bootstrap",
        "replicates": int(dist.scores.size),
        "primary": {
            "cutoffs": [primary_t.a, primary_t.b],
            "weights": [primary_w.perf, primary_w.prev_exp, primary_w.curr_exp],
            "q10": summary.q10, "q50": summary.q50, "q90": summary.q90,
        },
        "final_skill_score": summary.q50,
        "grid": [c.to_dict() for c in cells],
    }
    if point_t is not None:
        out["point_t"] = [float(v) for v in point_t]
        out["point_score"] = point_score(*point_t, primary_t, primary_w)
    if args.scores_out:
        with open(args.scores_out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["replicate", "score"])
            for i, s in enumerate(dist.scores):
                w.writerow([i, repr(float(s))])
    if args.hist_out:
        _write_hist(args.hist_out, histogram(dist.scores, args.bins))
    if args.grid_out:
        _write_grid_csv(args.grid_out, out["grid"])
    return out


def _write_grid_csv(path, grid):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["weights", "cutoffs", "q10", "q50", "q90"])
        for c in grid:
            w.writerow([":".join(f"{v:.6g}" for v in c["weights"]),
                        ":".join(f"{v:g}" for v in c["cutoffs"]),
                        f"{c['q10']:.6g}", f"{c['q50']:.6g}", f"{c['q90']:.6g}"])


def _emit(report: AnalysisReport, args, table_rows=None):
    if args.out:
        report.save(args.out)
    if args.json or table_rows is None:
        if not args.out:
            print(report.to_json())
        return
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(table_rows[0]))
    w.writeheader()
    w.writerows(table_rows)
    sys.stdout.write(buf.getvalue())


def _regression_rows(reg):
    return [{"Variable": r["label"], "Estimate": f"{r['estimate']:.6g}",
             "Std. Error": f"{r['std_error']:.6g}", "t": f"{r['t']:.4f}",
             "p": f"{r['p']:.4g}", "R2": f"{reg['r2']:.4f}"} for r in reg["coefficients"]]


def cmd_ingest(args):
    ds = load_dataset(args)
    if args.out:
        write_halves_csv(args.out, ds)
    else:
        write_halves(sys.stdout, ds)
    prov = ds.provenance
    print(f"{len(ds)} players kept, {prov.get('players_rejected', 0)} rejected",
          file=sys.stderr)
    if args.quantile_groups:
        for row in experience_quantile_table(ds, args.quantile_groups):
            print(json.dumps(row), file=sys.stderr)


def cmd_fit(args):
    ds = load_dataset(args)
    reg = run_fit(args, ds)
    report = AnalysisReport(meta=_meta(args, ds), regression=reg)
    _emit(report, args, _regression_rows(reg))


def cmd_bootstrap(args):
    _resolve_seed(args)
    ds = load_dataset(args)
    reg = run_fit(args, ds)
    _, boot = run_bootstrap(args, ds)
    report = AnalysisReport(meta=_meta(args, ds), regression=reg, bootstrap=boot)
    rows = []
    for r in boot["coefficients"]:
        row = {"Variable": DISPLAY_NAMES[r["variable"]], "Estimate": f"{r['estimate']:.6g}",
               "Bootstrap Mean": f"{r['bootstrap_mean']:.6g}",
               "Bootstrap Variance": f"{r['bootstrap_variance']:.6g}"}
        for key in ("normal_ci", "percentile_ci"):
            if key in r:
                row[key] = f"({r[key][0]:.6g}, {r[key][1]:.6g})"
        rows.append(row)
    _emit(report, args, rows)


def cmd_score(args):
    label = args.label
    point_t = None
    if args.replicates:
        if args.point:
            raise UsageError("--point cannot be combined with --replicates")
        _, _, t = read_replicates_csv(args.replicates)
        t_reps = scored_t(t)
        label = label or Path(args.replicates).stem
    elif args.point:
        if args.t is not None:
            point_t = args.t
        elif args.from_report:
            reg = AnalysisReport.load(args.from_report).regression
            if not reg:
                raise UsageError(f"{args.from_report} has no regression section")
            point_t = [c["t"] for c in reg["coefficients"][1:4]]
        else:
            raise UsageError("--point needs --t t1:t2:t3 or --from-report FILE")
        t_reps = np.array([point_t], dtype=float)
        label = label or "game"
    else:
        raise UsageError("no bootstrap replicates given; pass --replicates FILE or use --point")
    scores = run_score(args, t_reps, label, point_t)
    report = AnalysisReport(meta=_meta(args), scores=scores)
    _emit(report, args, None if args.json or args.out else _grid_rows(scores))


def _grid_rows(scores):
    return [{"weights": ":".join(f"{v:.6g}" for v in c["weights"]),
             "cutoffs": ":".join(f"{v:g}" for v in c["cutoffs"]),
             "q10": f"{c['q10']:.6g}", "q50": f"{c['q50']:.6g}", "q90": f"{c['q90']:.6g}"}
            for c in scores["grid"]]


def run_compare(reports: dict[str, AnalysisReport]) -> dict:
    """Per-cell verdict matrices plus the consensus order across cells."""
    if len(reports) < 2:
        raise UsageError("compare needs at least two game reports")
    labels = list(reports)
    grids = {}
    for lab, rep in reports.items():
        if not rep.scores or "grid" not in rep.scores:
            raise UsageError(f"report for {lab!r} has no score grid")
        grids[lab] = {(tuple(c["weights"]), tuple(c["cutoffs"])): c for c in rep.scores["grid"]}
    ref = labels[0]
    for lab in labels[1:]:
        if set(grids[lab]) != set(grids[ref]):
            diff = sorted(set(grids[lab]) ^ set(grids[ref]))
            raise UsageError(f"score grids differ between {ref!r} and {lab!r}: cells "
                             + "; ".join(f"weights={w} cutoffs={c}" for w, c in diff))
    per_cell = []
    comps = []
    for key in grids[ref]:
        summaries = {lab: QuantileSummary(grids[lab][key]["q10"], grids[lab][key]["q50"],
                                          grids[lab][key]["q90"]) for lab in labels}
        comp = compare_games(summaries)
        comps.append(comp)
        per_cell.append({"weights": list(key[0]), "cutoffs": list(key[1]),
                         "comparison": comp.to_dict()})
    return {"games": labels, "per_cell": per_cell, "consensus": consensus(comps).to_dict()}


def cmd_compare(args):
    reports = {}
    for path in args.reports:
        if not Path(path).is_file():
            raise InputError(f"{path}: no such file")
        try:
            rep = AnalysisReport.load(path)
        except (ValueError, KeyError) as exc:
            raise InputError(f"{path}: {exc}") from None
        label = (rep.scores or {}).get("label") or Path(path).stem
        if label in reports:
            label = f"{label}@{path}"
        reports[label] = rep
    result = run_compare(reports)
    report = AnalysisReport(meta=_meta(args), comparison=result)
    if args.out:
        report.save(args.out)
    else:
        print(json.dumps(result, indent=2))


def cmd_simulate(args):
    _resolve_seed(args)
    cfg = SimConfig(args.players, args.games, 0.0, args.skill_sd, args.games_spread,
                    args.seed, args.pairing)
    model = GameModel(args.skill_weight, args.learn, args.tau, args.noise)
    season = simulate_season(cfg, model)
    write_gamelog_csv(args.out, season.rows)
    bpath = args.boundaries_out or str(Path(args.out).with_suffix("")) + ".boundaries.csv"
    write_boundaries_csv(bpath, season.boundaries)
    print(f"wrote {len(season.rows)} rows to {args.out}; boundaries to {bpath}",
          file=sys.stderr)


def cmd_report(args):
    _resolve_seed(args)
    ds = load_dataset(args)
    reg = run_fit(args, ds)
    res, boot = run_bootstrap(args, ds)
    label = args.label or Path(args.input).stem
    scores = run_score(args, scored_t(res.t), label)
    scores["point_t"] = [c["t"] for c in reg["coefficients"][1:4]]
    _, _, pt, pw = _score_grid(args)
    scores["point_score"] = point_score(*scores["point_t"], pt, pw)
    report = AnalysisReport(meta=_meta(args, ds), regression=reg, bootstrap=boot,
                            scores=scores)
    if args.out:
        report.save(args.out)
    if args.json or not args.out:
        print(report.to_json())
    else:
        print(f"final skill score ({label}): {scores['final_skill_score']:.4f}",
              file=sys.stderr)


COMMANDS = {
    "ingest": cmd_ingest,
    "fit": cmd_fit,
    "bootstrap": cmd_bootstrap,
    "score": cmd_score,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand; see skillscore --help")
        COMMANDS[args.command](args)
    except SkillScoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
