"""Command-line harness: scenario generation, training, evaluation, oracle
runs and the four-policy comparison.

Every run is a pure function of (config file, seed): re-running a command
with the same inputs produces byte-identical output files. Failures exit
nonzero with one machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys

from . import baselines, drl, oracle
from .config import load_config
from .network import build_fat_tree
from .workload import GenerationError, Scenario, generate_scenario

POLICY_TAGS = ("random", "ddqn-cm", "lag", "sr-em")
_KIND_TO_TAG = {"sr_em": "sr-em", "server_only": "ddqn-cm"}

METRIC_FIELDS = ("acceptance_ratio", "it_cost", "bandwidth_cost",
                 "migration_cost", "programming_cost", "reconfig_cost",
                 "total_cost", "server_share", "lm_share", "em_share")


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _load_scenarios(directory: str) -> list[Scenario]:
    files = sorted(f for f in os.listdir(directory) if f.endswith(".json"))
    if not files:
        raise FileNotFoundError(f"no scenario files in {directory}")
    scenarios = []
    for name in files:
        with open(os.path.join(directory, name)) as fh:
            scenarios.append(Scenario.from_json(fh.read()))
    return scenarios


def _generate_set(net, gen, count: int, seed_start: int):
    """Generate ``count`` scenarios, skipping seeds whose random draw admits
    no feasible initial placement; returns (scenarios, used seeds, cursor)."""
    scenarios, seeds = [], []
    cursor = seed_start
    attempts_left = 50 * count + 50
    while len(scenarios) < count:
        if attempts_left <= 0:
            raise GenerationError(
                f"could not generate {count} feasible scenarios starting at "
                f"seed {seed_start}; loosen capacities or request_count")
        try:
            scenarios.append(generate_scenario(net, gen, cursor))
            seeds.append(cursor)
        except GenerationError:
            pass
        cursor += 1
        attempts_left -= 1
    return scenarios, seeds, cursor


def cmd_generate(args) -> None:
    cfg = load_config(args.config)
    net = build_fat_tree(cfg.switch_count, cfg.server_count, cfg.ranges, args.seed)
    manifest = {"seed": args.seed, "config": cfg.raw, "train": [], "test": []}
    cursor = args.seed + 1
    for split, count in (("train", cfg.train_count), ("test", cfg.test_count)):
        split_dir = os.path.join(args.out, split)
        os.makedirs(split_dir, exist_ok=True)
        scenarios, seeds, cursor = _generate_set(net, cfg.gen, count, cursor)
        for k, (sc, seed) in enumerate(zip(scenarios, seeds)):
            name = f"scenario_{k:04d}.json"
            with open(os.path.join(split_dir, name), "w") as fh:
                fh.write(sc.to_json())
                fh.write("\n")
            manifest[split].append({"file": f"{split}/{name}", "seed": seed})
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _train_one(scenarios, cfg, args, kind: str):
    training = dataclasses.replace(cfg.training, seed=args.seed)
    if args.filter_mode:
        training = dataclasses.replace(training, filter_mode=args.filter_mode)
    if kind == "server_only":
        return baselines.server_only_train(scenarios, training, cfg.weights)
    return drl.train(scenarios, training, cfg.weights)


def _write_training(out_dir: str, bank, trace) -> None:
    os.makedirs(out_dir, exist_ok=True)
    bank.save(os.path.join(out_dir, "policy.json"))
    _write_csv(os.path.join(out_dir, "trace.csv"),
               ["episode", "mean_reward", "epsilon"],
               [[ep, r, eps] for ep, r, eps in trace])


def cmd_train(args) -> None:
    cfg = load_config(args.config)
    scenarios = _load_scenarios(args.scenarios)
    kind = {"sr-em": "sr_em", "ddqn-cm": "server_only"}.get(args.policy)
    if kind is None:
        raise ValueError(f"policy: cannot train {args.policy!r}; "
                         "trainable policies are sr-em and ddqn-cm")
    bank, trace = _train_one(scenarios, cfg, args, kind)
    _write_training(args.out, bank, trace)


def _metric_rows(tag: str, rows: list[drl.EpochMetrics]) -> list[list]:
    out = []
    for r in rows:
        out.append([tag, r.scenario, r.epoch, r.working] +
                   [getattr(r, f) for f in METRIC_FIELDS])
    return out


def _mean_rows(tag: str, rows: list[drl.EpochMetrics]) -> list[list]:
    by_epoch: dict[int, list[drl.EpochMetrics]] = {}
    for r in rows:
        by_epoch.setdefault(r.epoch, []).append(r)
    out = []
    for epoch in sorted(by_epoch):
        group = by_epoch[epoch]
        means = [sum(getattr(r, f) for r in group) / len(group)
                 for f in METRIC_FIELDS]
        out.append([tag, epoch, group[0].working] + means)
    return out


def _run_eval(policies: list[tuple[str, object]], scenarios, weights, seed: int,
              out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    detail, means = [], []
    for tag, policy in policies:
        rows = drl.evaluate(policy, scenarios, weights, seed=seed)
        detail += _metric_rows(tag, rows)
        means += _mean_rows(tag, rows)
    _write_csv(os.path.join(out_dir, "metrics.csv"),
               ["policy", "scenario", "epoch", "working", *METRIC_FIELDS], detail)
    _write_csv(os.path.join(out_dir, "metrics_mean.csv"),
               ["policy", "epoch", "working", *METRIC_FIELDS], means)


def cmd_eval(args) -> None:
    cfg = load_config(args.config) if args.config else None
    weights = cfg.weights if cfg else None
    scenarios = _load_scenarios(args.scenarios)
    policies: list[tuple[str, object]] = []
    for path in args.policy_file or []:
        bank = drl.PolicyBank.load(path)
        policies.append((_KIND_TO_TAG[bank.kind], bank))
    for tag in args.policy or []:
        if tag not in ("random", "lag"):
            raise ValueError(f"policy: {tag!r} needs a trained --policy-file")
        policies.append((tag, tag))
    if not policies:
        raise ValueError("policy: nothing to evaluate; pass --policy-file or --policy")
    _run_eval(policies, scenarios, weights, args.seed, args.out)


def cmd_oracle(args) -> None:
    with open(args.scenario) as fh:
        scenario = Scenario.from_json(fh.read())
    cfg = load_config(args.config) if args.config else None
    weights = cfg.weights if cfg else None
    result = oracle.enumerate_optimal(scenario, weights, budget=args.budget)
    text = json.dumps(result.to_dict(), sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
            fh.write("\n")
    else:
        print(text)


def cmd_compare(args) -> None:
    cfg = load_config(args.config)
    scen_dir = os.path.join(args.out, "scenarios")
    gen_args = argparse.Namespace(config=args.config, seed=args.seed, out=scen_dir)
    cmd_generate(gen_args)
    train_set = _load_scenarios(os.path.join(scen_dir, "train"))
    test_set = _load_scenarios(os.path.join(scen_dir, "test"))
    policies: list[tuple[str, object]] = []
    for tag, kind in (("sr-em", "sr_em"), ("ddqn-cm", "server_only")):
        ns = argparse.Namespace(seed=args.seed, filter_mode=args.filter_mode)
        bank, trace = _train_one(train_set, cfg, ns, kind)
        _write_training(os.path.join(args.out, tag), bank, trace)
        policies.append((tag, bank))
    policies += [("lag", "lag"), ("random", "random")]
    _run_eval(policies, test_set, cfg.weights, args.seed, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfcem",
        description="SFC reconfiguration over servers and switch memories")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write scenario files and a manifest")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a policy on a scenario directory")
    p.add_argument("--config", required=True)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--policy", default="sr-em", choices=("sr-em", "ddqn-cm"))
    p.add_argument("--filter-mode", choices=drl.FILTER_MODES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="metrics CSVs for policies on a test set")
    p.add_argument("--config")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--policy-file", action="append")
    p.add_argument("--policy", action="append", choices=("random", "lag"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="exhaustive optimum of a tiny scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--config")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="generate, train and evaluate all policies")
    p.add_argument("--config", required=True)
    p.add_argument("--filter-mode", choices=drl.FILTER_MODES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
