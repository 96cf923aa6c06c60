"""Command line: gen, run, sweep, verify, summarize, plotdata."""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path

from . import exploration as ex
from .errors import InputError
from .experiments import (SUITES, ExperimentConfig, FIGURES, emit_plotdata, make_predictions, read_rows,
                          run_sweep, summarize, sweep_metadata, verify_bounds, write_summary)
from .instances import FAMILIES, LOWER_BOUNDS, InstanceSpec, dumps_instance, gen_instance, load_instance
from .planning import run_full_info
from .predictions import error_profile


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _names(text: str) -> list[str]:
    return [x for x in text.split(",") if x]


def cmd_gen(a) -> int:
    params = json.loads(a.params) if a.params else {}
    if a.n is not None:
        params["n"] = a.n
    inst = gen_instance(InstanceSpec(a.family, params, a.seed))
    if a.regime:
        inst = inst.with_predictions(make_predictions(a.regime, inst.goal_distances, a.magnitude, [a.seed, 2]))
    with _output(a.out) as fh:
        fh.write(dumps_instance(inst) + "\n")
    return 0


def cmd_run(a) -> int:
    inst = load_instance(a.instance)
    if a.strategy == "full_info":
        t = run_full_info(inst, a.which)
        out = {"strategy": f"full_info/{a.which}", "alg": t.alg, "opt": t.opt,
               "thresholds": t.thresholds, "visits": t.visits}
    else:
        if a.strategy == "pruned":
            if a.eps is None:
                raise InputError("--eps is required for the pruned strategy")
            t = ex.run_pruned_known_eps(inst, a.eps)
        elif a.strategy == "beta_weighted":
            t = ex.run_beta_weighted(inst, a.beta)
        elif a.strategy == "greedy":
            t = ex.run_greedy(inst, opportunistic=a.opportunistic)
        else:
            t = ex.STRATEGIES[a.strategy](inst)
        out = {"strategy": t.strategy, "alg": t.alg, "opt": t.opt, "ratio": t.ratio,
               "visits": t.visits, "step_costs": t.step_costs}
    p = error_profile(inst)
    out["profile"] = {"e0": p.e0, "e1": p.e1, "e1_minus": p.e1_minus, "einf_plus": p.einf_plus,
                      "eps_max": p.eps_max if p.eps_max != float("inf") else None}
    print(json.dumps(out))
    return 0


def _sweep_config(a) -> ExperimentConfig:
    base = ExperimentConfig.from_file(a.config).__dict__ if a.config else {}
    overrides = {
        "families": _names(a.families) if a.families else None,
        "strategies": _names(a.strategies) if a.strategies else None,
        "regime": a.regime,
        "grid": _floats(a.grid) if a.grid else None,
        "n": a.n,
        "trials": a.trials,
        "base_seed": a.seed,
        "beta": a.beta,
        "workers": a.workers,
        "output": a.out,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(base)


def cmd_sweep(a) -> int:
    cfg = _sweep_config(a)
    with _output(cfg.output) as fh:
        run_sweep(cfg, fh)
    if cfg.output not in (None, "-"):
        meta = Path(cfg.output).with_suffix(".meta.json")
        meta.write_text(json.dumps(sweep_metadata(cfg), indent=1, sort_keys=True) + "\n")
    return 0


def cmd_verify(a) -> int:
    names = list(SUITES) if a.suite == "all" else _names(a.suite)
    ok = True
    for name in names:
        report = verify_bounds(name, a.trials, a.seed, a.dump_dir)
        for line in report.lines():
            print(line)
        ok &= report.passed
    return 0 if ok else 1


def cmd_summarize(a) -> int:
    with open(a.rows, newline="") as fh:
        rows = read_rows(fh)
    with _output(a.out) as fh:
        write_summary(summarize(rows), fh)
    return 0


def cmd_plotdata(a) -> int:
    with open(a.rows, newline="") as fh:
        rows = read_rows(fh)
    with _output(a.out) as fh:
        emit_plotdata(rows, a.figure, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="predsearch", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True, choices=FAMILIES + LOWER_BOUNDS)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--params", help="extra family parameters as JSON")
    g.add_argument("--regime", choices=["absolute", "admissible", "relative"],
                   help="replace perfect predictions with noisy ones")
    g.add_argument("--magnitude", type=float, default=0.0, help="E1 or eps for --regime")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run one strategy on an instance file")
    r.add_argument("instance")
    r.add_argument("--strategy", default="greedy", choices=sorted(ex.STRATEGIES) + ["full_info"])
    r.add_argument("--eps", type=float)
    r.add_argument("--beta", type=float, default=2 / 3)
    r.add_argument("--which", default="phi1", choices=["phi0", "phi1"])
    r.add_argument("--opportunistic", action="store_true",
                   help="greedy only: count frontier vertices passed on the way as visited")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a parameter sweep, writing CSV rows")
    s.add_argument("--config", help="JSON file with ExperimentConfig fields")
    s.add_argument("--families")
    s.add_argument("--strategies")
    s.add_argument("--regime", choices=["absolute", "admissible", "relative"])
    s.add_argument("--grid", help="comma-separated E1 or eps values")
    s.add_argument("--n", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--beta", type=float)
    s.add_argument("--workers", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run bound-verification suites")
    v.add_argument("--suite", default="all", help=f"'all' or comma-separated from: {', '.join(SUITES)}")
    v.add_argument("--trials", type=int, help="override the suite's default trial count")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dump-dir", help="write the first counterexample of each failing check here")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("summarize", help="mean and std per sweep cell")
    m.add_argument("rows")
    m.add_argument("--out")
    m.set_defaults(func=cmd_summarize)

    q = sub.add_parser("plotdata", help="figure-ready CSV from sweep rows")
    q.add_argument("rows")
    q.add_argument("--figure", required=True, choices=sorted(FIGURES))
    q.add_argument("--out")
    q.set_defaults(func=cmd_plotdata)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
