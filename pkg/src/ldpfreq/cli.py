"""Experiment CLI: generate data, run experiments, sweep pi, oracle checks.

Subcommands
    gen           write a synthetic dataset plus a JSON sidecar
    run           Monte-Carlo run at one sampling plan and one estimator
    sweep         repeat a run over a grid of uniform sampling probabilities
    oracle-check  exhaustive-enumeration validation of the estimators

Flags can also come from a JSON config file (--config); explicit flags win.
Every output is reproducible byte-for-byte from (config, seed): all
randomness flows from --seed, and metadata carries no timestamps.

Exit codes: 0 success, 1 validation error, 2 oracle-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .estimators import biased_mean_under_sampling
from .mechanisms import DirectEncoding, ParameterError, PrivacyParams
from .metrics import (CLIP_RENORMALIZE, RAW_HALFSUM, run_trials,
                      summary_csv_rows)
from .oracle import exact_moments, exact_var_ordering
from .sampling import (Dataset, PerNodePlan, UniformPlan, balanced_pis,
                       expected_reports)
from .synthdata import (BIMODAL, BINOMIAL, DatasetSpec, generate,
                        read_dataset, true_frequencies, write_dataset)

TV_MODE_FLAGS = {"clip": CLIP_RENORMALIZE, "raw": RAW_HALFSUM}
ESTIMATOR_FLAGS = {"wang": "wang", "g": "g", "chat": "c_hat", "T": "T"}


class _Parser(argparse.ArgumentParser):
    # validation problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _dataset_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dist", choices=["binomial", "bimodal"],
                     help="synthetic distribution (default binomial)")
    sub.add_argument("--n-points", type=int, help="dataset size (default 50000)")
    sub.add_argument("--domain-size", type=int,
                     help="number of domain values (default 101)")
    sub.add_argument("--binom-trials", type=int)
    sub.add_argument("--binom-prob", type=float)
    sub.add_argument("--mix-trials1", type=int)
    sub.add_argument("--mix-prob1", type=float)
    sub.add_argument("--mix-trials2", type=int)
    sub.add_argument("--mix-prob2", type=float)
    sub.add_argument("--mix-weight", type=float)
    sub.add_argument("--mix-combine", choices=["mixture", "sum"])


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--seed", type=int, help="master seed (default 0)")
    sub.add_argument("--out", help="output path")


DATASET_DEFAULTS = {
    "dist": "binomial", "n_points": 50000, "domain_size": 101,
    "binom_trials": 100, "binom_prob": 0.5,
    "mix_trials1": 50, "mix_prob1": 0.6, "mix_trials2": 50, "mix_prob2": 0.4,
    "mix_weight": 0.5, "mix_combine": "mixture",
}

DEFAULTS = {
    "gen": {**DATASET_DEFAULTS, "seed": 0, "format": "txt"},
    "run": {**DATASET_DEFAULTS, "seed": 0, "estimator": "g", "trials": 20,
            "tv_mode": "clip", "no_plot": False, "data": None, "pi": None,
            "pi_file": None},
    "sweep": {**DATASET_DEFAULTS, "seed": 0, "estimator": "chat",
              "trials": 50, "tv_mode": "clip", "no_plot": False,
              "data": None,
              "pi_grid": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"},
    "oracle-check": {"seed": 0, "tol": 1e-10, "max_n": 6, "q_offset": 0.0,
                     "out": None},
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldpfreq",
                     description="frequency-estimation experiments for "
                                 "randomized-response reports under node "
                                 "sampling")
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=_Parser)

    gen = subs.add_parser("gen", help="generate a synthetic dataset")
    _common_flags(gen)
    _dataset_flags(gen)
    gen.add_argument("--format", choices=["txt", "csv"],
                     help="dataset file format (default txt)")

    run = subs.add_parser("run", help="run one experiment")
    _common_flags(run)
    _dataset_flags(run)
    run.add_argument("--data", help="dataset file from gen (else generated)")
    run.add_argument("--epsilon", type=float, help="privacy parameter (nats)")
    run.add_argument("--pi", type=float, help="uniform sampling probability")
    run.add_argument("--pi-file",
                     help="per-node probabilities, one per line (estimator T)")
    run.add_argument("--estimator", choices=sorted(ESTIMATOR_FLAGS))
    run.add_argument("--trials", type=int)
    run.add_argument("--tv-mode", choices=sorted(TV_MODE_FLAGS))
    run.add_argument("--no-plot", action="store_true", default=None,
                     help="skip the figure next to the CSV")

    sweep = subs.add_parser("sweep", help="sweep uniform pi over a grid")
    _common_flags(sweep)
    _dataset_flags(sweep)
    sweep.add_argument("--data", help="dataset file from gen (else generated)")
    sweep.add_argument("--epsilon", type=float)
    sweep.add_argument("--pi-grid",
                       help="comma list '0.1,0.5,0.9' or range '0.1:0.9:0.1'")
    sweep.add_argument("--estimator", choices=sorted(ESTIMATOR_FLAGS))
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--tv-mode", choices=sorted(TV_MODE_FLAGS))
    sweep.add_argument("--no-plot", action="store_true", default=None)

    check = subs.add_parser("oracle-check",
                            help="exact-enumeration validation grid")
    check.add_argument("--config", help="JSON config file; flags override it")
    check.add_argument("--out", help="optional JSON report path")
    check.add_argument("--tol", type=float,
                       help="max |E - closed form| allowed (default 1e-10)")
    check.add_argument("--max-n", type=int,
                       help="largest instance size in the grid (default 6)")
    check.add_argument("--q-offset", type=float,
                       help="self-test knob: corrupt the reference q")
    check.add_argument("--seed", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge CLI flags over an optional JSON config over defaults."""
    cfg = dict(DEFAULTS[args.command])
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ParameterError(f"config file not found: {path}")
        loaded = json.loads(path.read_text())
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in cfg and key not in ("out", "epsilon", "pi",
                                              "pi_file", "format"):
                raise ParameterError(f"unknown config key {key!r}")
            cfg[key] = value
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            cfg[key] = value
    return cfg


def _dataset_spec(cfg: dict) -> DatasetSpec:
    if cfg["dist"] == "binomial":
        return DatasetSpec(kind=BINOMIAL, n_points=cfg["n_points"],
                           domain_size=cfg["domain_size"], seed=cfg["seed"],
                           trials=cfg["binom_trials"], prob=cfg["binom_prob"])
    return DatasetSpec(kind=BIMODAL, n_points=cfg["n_points"],
                       domain_size=cfg["domain_size"], seed=cfg["seed"],
                       trials=cfg["mix_trials1"], prob=cfg["mix_prob1"],
                       trials2=cfg["mix_trials2"], prob2=cfg["mix_prob2"],
                       weight=cfg["mix_weight"], combine=cfg["mix_combine"])


def _load_or_generate(cfg: dict) -> tuple[Dataset, dict]:
    """Dataset plus a metadata echo of where it came from."""
    if cfg.get("data"):
        path = Path(cfg["data"])
        sidecar = path.with_name(path.name + ".meta.json")
        domain_size = cfg["domain_size"]
        if sidecar.exists():
            domain_size = json.loads(sidecar.read_text())["spec"]["domain_size"]
        data = read_dataset(path, domain_size)
        return data, {"data_file": str(path), "domain_size": domain_size}
    spec = _dataset_spec(cfg)
    return generate(spec), {"spec": spec.__dict__}


def _trial_seed(cfg: dict, *stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((cfg["seed"], 1, *stream))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def _write_meta(out: Path, payload: dict) -> Path:
    meta_path = out.with_name(out.name + ".meta.json")
    meta_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return meta_path


def cmd_gen(cfg: dict) -> int:
    if not cfg.get("out"):
        raise ParameterError("gen requires --out")
    spec = _dataset_spec(cfg)
    data = generate(spec)
    out = Path(cfg["out"])
    write_dataset(data, out, cfg["format"])
    _write_meta(out, {"command": "gen", "spec": spec.__dict__,
                      "seed": cfg["seed"], "format": cfg["format"],
                      "n_points": data.n})
    print(f"wrote {data.n} values to {out}")
    return 0


RESULT_HEADER = ["value_index", "true_count", "mean_estimate", "variance",
                 "estimator", "pi", "epsilon", "T"]


def cmd_run(cfg: dict) -> int:
    if not cfg.get("out"):
        raise ParameterError("run requires --out")
    if cfg.get("epsilon") is None:
        raise ParameterError("run requires --epsilon")
    if (cfg.get("pi") is None) == (cfg.get("pi_file") is None):
        raise ParameterError("run requires exactly one of --pi / --pi-file")
    if cfg["trials"] < 1:
        raise ParameterError("--trials must be >= 1")

    data, data_meta = _load_or_generate(cfg)
    mech = DirectEncoding(PrivacyParams(epsilon=cfg["epsilon"],
                                        domain_size=data.domain_size))
    if cfg.get("pi") is not None:
        plan = UniformPlan(pi=cfg["pi"])
        pi_label = repr(float(cfg["pi"]))
    else:
        pis = np.loadtxt(cfg["pi_file"], ndmin=1)
        plan = PerNodePlan(pis=pis)
        pi_label = "per-node"
    estimator_id = ESTIMATOR_FLAGS[cfg["estimator"]]
    tv_mode = TV_MODE_FLAGS[cfg["tv_mode"]]

    summary = run_trials(data, mech, plan, estimator_id, cfg["trials"],
                         _trial_seed(cfg), tv_mode=tv_mode)
    f_true = true_frequencies(data)

    rows = summary_csv_rows(summary, f_true, pi_label, cfg["epsilon"])
    rows.append(["tv_distance", "", repr(float(summary.tv_mean)), "",
                 estimator_id, pi_label, repr(float(cfg["epsilon"])),
                 cfg["trials"]])
    expected = expected_reports(plan, data.n)
    rows.append(["communication_cost", repr(float(expected)),
                 repr(summary.mean_sampled), "", estimator_id, pi_label,
                 repr(float(cfg["epsilon"])), cfg["trials"]])

    out = Path(cfg["out"])
    _write_csv(out, RESULT_HEADER, rows)
    _write_meta(out, {"command": "run", "dataset": data_meta,
                      "epsilon": cfg["epsilon"], "estimator": estimator_id,
                      "plan": summary.plan, "trials": cfg["trials"],
                      "seed": cfg["seed"], "tv_mode": tv_mode})
    if not cfg["no_plot"]:
        from .plotting import save_run_figure

        save_run_figure(out.with_suffix(".png"), f_true, summary,
                        cfg["epsilon"], pi_label)
    print(f"{summary.plan} estimator={estimator_id} trials={cfg['trials']} "
          f"tv={summary.tv_mean:.4f} cost={summary.mean_sampled:.1f} -> {out}")
    return 0


def parse_pi_grid(text: str) -> list[float]:
    text = text.strip()
    if not text:
        raise ParameterError("empty pi grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError("pi range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ParameterError("pi range step must be > 0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [round(start + k * step, 12) for k in range(count)]
    else:
        grid = [float(p) for p in text.split(",") if p.strip()]
    if not grid:
        raise ParameterError("empty pi grid")
    for pi in grid:
        if not 0 < pi <= 1:
            raise ParameterError(f"grid value {pi} outside (0, 1]")
    return grid


def cmd_sweep(cfg: dict) -> int:
    if not cfg.get("out"):
        raise ParameterError("sweep requires --out")
    if cfg.get("epsilon") is None:
        raise ParameterError("sweep requires --epsilon")
    if cfg["trials"] < 1:
        raise ParameterError("--trials must be >= 1")
    grid = parse_pi_grid(cfg["pi_grid"])

    data, data_meta = _load_or_generate(cfg)
    mech = DirectEncoding(PrivacyParams(epsilon=cfg["epsilon"],
                                        domain_size=data.domain_size))
    estimator_id = ESTIMATOR_FLAGS[cfg["estimator"]]
    tv_mode = TV_MODE_FLAGS[cfg["tv_mode"]]

    rows = []
    tv_means, realized = [], []
    for k, pi in enumerate(grid):
        plan = UniformPlan(pi=pi)
        summary = run_trials(data, mech, plan, estimator_id, cfg["trials"],
                             _trial_seed(cfg, k), tv_mode=tv_mode)
        expected = expected_reports(plan, data.n)
        tv_means.append(summary.tv_mean)
        realized.append(summary.mean_sampled)
        rows.append([repr(float(pi)), repr(float(summary.tv_mean)),
                     repr(float(expected)), repr(summary.mean_sampled)])
        print(f"pi={pi:g} tv_mean={summary.tv_mean:.4f} "
              f"expected_cost={expected:g} realized={summary.mean_sampled:.1f}")

    out = Path(cfg["out"])
    _write_csv(out, ["pi", "tv_mean", "expected_cost", "realized_cost_mean"],
               rows)
    _write_meta(out, {"command": "sweep", "dataset": data_meta,
                      "epsilon": cfg["epsilon"], "estimator": estimator_id,
                      "pi_grid": grid, "trials": cfg["trials"],
                      "seed": cfg["seed"], "tv_mode": tv_mode})
    if not cfg["no_plot"]:
        from .plotting import save_sweep_figure

        save_sweep_figure(out.with_suffix(".png"), np.asarray(grid),
                          np.asarray(tv_means),
                          np.asarray([expected_reports(UniformPlan(pi), data.n)
                                      for pi in grid]),
                          np.asarray(realized))
    return 0


def oracle_grid(max_n: int) -> list[dict]:
    """The small-instance validation grid: one cell per (n, d, eps, plan)."""
    cells = []
    for n in range(2, max_n + 1):
        for d in (2, 3):
            values = np.arange(n, dtype=np.int64) % d
            data = Dataset(values=values, domain_size=d)
            plans = [("uniform", UniformPlan(pi)) for pi in (0.3, 0.7, 1.0)]
            plans += [
                ("per-node", PerNodePlan(balanced_pis(values, 0.25, 0.75))),
                ("per-node", PerNodePlan(balanced_pis(values, 0.125, 0.875))),
            ]
            for eps in (math.log(2), math.log(3)):
                for kind, plan in plans:
                    cells.append({"n": n, "d": d, "epsilon": eps,
                                  "kind": kind, "plan": plan, "data": data})
    return cells


def cmd_oracle_check(cfg: dict) -> int:
    tol = cfg["tol"]
    q_offset = cfg["q_offset"]
    worst = {"wang": 0.0, "g": 0.0, "c_hat": 0.0, "T": 0.0}
    ordering = []

    for cell in oracle_grid(cfg["max_n"]):
        data, plan = cell["data"], cell["plan"]
        mech = DirectEncoding(PrivacyParams(epsilon=cell["epsilon"],
                                            domain_size=cell["d"]))
        f = true_frequencies(data).fractions
        n = data.n
        # reference q, possibly corrupted by the self-test knob
        q_ref = mech.q + q_offset

        estimators = ["g", "c_hat", "T"] if cell["kind"] == "uniform" else ["T"]
        for est_id in estimators:
            moments = exact_moments(data, mech, plan, est_id)
            dev = float(np.abs(moments.means - n * f).max())
            worst[est_id] = max(worst[est_id], dev)
        if cell["kind"] == "uniform":
            moments = exact_moments(data, mech, plan, "wang")
            closed = np.array([
                biased_mean_under_sampling(fi, n, plan.pi, mech.p, q_ref)
                for fi in f
            ])
            worst["wang"] = max(worst["wang"],
                                float(np.abs(moments.means - closed).max()))
            var_g, var_c_hat = exact_var_ordering(data, mech, plan)
            ordering.append({"n": n, "d": cell["d"],
                             "epsilon": cell["epsilon"], "pi": plan.pi,
                             "max_var_g_minus_c_hat":
                                 float((var_g - var_c_hat).max()),
                             "min_var_g_minus_c_hat":
                                 float((var_g - var_c_hat).min())})

    ok = all(dev <= tol for dev in worst.values())
    chat_never_worse = all(row["min_var_g_minus_c_hat"] >= -1e-12
                           for row in ordering)
    report = {"expectation_deviations": worst, "tolerance": tol,
              "passed": ok, "variance_ordering": ordering,
              "c_hat_variance_never_exceeds_g": chat_never_worse}

    for est_id, dev in sorted(worst.items()):
        status = "ok" if dev <= tol else "FAIL"
        print(f"E[{est_id}] vs closed form: max deviation {dev:.3e}  [{status}]")
    direction = ("Var(c_hat) <= Var(g) on every uniform cell"
                 if chat_never_worse else
                 "Var(c_hat) > Var(g) somewhere on the grid")
    print(f"variance ordering: {direction}")
    if cfg.get("out"):
        Path(cfg["out"]).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n")
    if not ok:
        print("oracle check FAILED")
        return 2
    print("oracle check passed")
    return 0


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep,
            "oracle-check": cmd_oracle_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except ParameterError as exc:
        print(f"ldpfreq: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
