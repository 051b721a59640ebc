"""Command line interface.

Subcommands:

* ``bounds``: print the bound set, preset weights and a certificate for
  given inputs (or certify explicitly supplied weights).
* ``estimate``: read a policy file and estimate the completion-time or
  cumulative-cost prior for a configured environment.
* ``oracle``: run the exhaustive verification suites on randomized
  instances; nonzero exit if any instance fails.
* ``train``: train one curriculum stage from a config, without estimates.
* ``run``: execute the full experiment for a config; the exit status
  reflects the config's embedded checks.
* ``bench``: run the weight-scaling comparison grid around a config.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .bounds import (
    COROLLARY_C1,
    THEOREM_T1,
    THEOREM_T2,
    certify,
    corollary1_bounds,
    preset_weights,
    theorem1_bounds,
    theorem2_bounds,
)
from .curriculum import SCHEME_BY_THEOREM, StageArtifact, build_plan
from .errors import ConfigurationError, RewardBoundError
from .harness import (
    DEFAULT_ABLATION_GRID,
    RecordingQTrainer,
    RecordingDPTrainer,
    WEIGHT_FIELDS,
    build_environment,
    build_weight_policy,
    load_config,
    resolve_config_path,
    run_ablation_grid,
    run_experiment,
    run_oracle_suite,
    series_lines,
    stage_certificates,
)
from .estimators import estimate_tau, estimate_tc
from .metrics import fail_value_for, objective_for
from .pomdp import RewardConfig
from .problem import unconstrained_variant, with_budget
from .solver import PolicyTable, evaluate_policy


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False))


def _parse_scales(items: Optional[List[str]]) -> Dict[str, float]:
    scales: Dict[str, float] = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigurationError(
                f"--scale expects weight=multiplier, got {item!r}"
            )
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in WEIGHT_FIELDS:
            raise ConfigurationError(
                f"--scale: unknown weight {name!r}; expected one of "
                f"{sorted(WEIGHT_FIELDS)}"
            )
        try:
            scales[name] = float(value)
        except ValueError:
            raise ConfigurationError(
                f"--scale: multiplier for {name!r} is not a number: {value!r}"
            ) from None
    return scales


def _cmd_bounds(args) -> int:
    theorem = args.theorem
    if theorem == THEOREM_T1:
        inputs = {"alpha": args.alpha, "tau": args.tau}
        if args.tau is None:
            raise ConfigurationError("bounds: T1 needs --tau")
        lambda_lower, beta_required, mu_lower = theorem1_bounds(
            args.alpha, args.tau
        )
        bound_values = {
            "lambda_lower": lambda_lower,
            "beta_required": beta_required,
            "mu_lower": mu_lower,
        }
    else:
        if args.gamma is None or args.t_max is None or args.rho is None:
            raise ConfigurationError(
                "bounds: T2 and C1 need --gamma, --t-max and --rho"
            )
        if theorem == THEOREM_T2:
            if args.t_c is None:
                raise ConfigurationError("bounds: T2 needs --t-c")
            inputs = {
                "alpha": args.alpha,
                "gamma_m": args.gamma,
                "t_c": args.t_c,
                "t_max": args.t_max,
                "rho": args.rho,
            }
            lambda_lower, beta_upper = theorem2_bounds(
                args.alpha, args.gamma, args.t_c, args.t_max, args.rho
            )
            bound_values = {"lambda_lower": lambda_lower, "beta_upper": beta_upper}
        else:
            inputs = {
                "alpha": args.alpha,
                "gamma_m": args.gamma,
                "t_max": args.t_max,
                "rho": args.rho,
            }
            lambda_required, beta_upper = corollary1_bounds(
                args.alpha, args.gamma, args.t_max, args.rho
            )
            bound_values = {
                "lambda_required": lambda_required,
                "beta_upper": beta_upper,
            }
    weights = preset_weights(theorem, inputs, epsilon=args.epsilon)
    certificate = certify(weights, theorem, inputs)
    _print_json(
        {
            "theorem": theorem,
            "inputs": inputs,
            "bounds": bound_values,
            "preset_weights": {
                "alpha": weights.alpha,
                "beta": weights.beta,
                "lambda": weights.lambda_pen,
                "mu": weights.mu,
                "discount": weights.discount,
            },
            "certificate": dataclasses.asdict(certificate),
        }
    )
    return 0


def _cmd_estimate(args) -> int:
    cfg = load_config(resolve_config_path(args.config))
    problem, _ = build_environment(cfg)
    lines = Path(args.policy).read_text().splitlines()
    policy = PolicyTable.from_lines(problem, lines, name=Path(args.policy).stem)
    if args.kind == "tau":
        estimate = estimate_tau(problem, policy)
    else:
        # The completion-time prior is defined on the relaxed problem.
        estimate = estimate_tc(unconstrained_variant(problem), policy)
    _print_json(
        {
            "kind": args.kind,
            "value": estimate.value,
            "per_initial_state": {
                repr(k): v for k, v in estimate.per_initial_state.items()
            },
            "policy_id": estimate.policy_id,
        }
    )
    return 0


def _cmd_oracle(args) -> int:
    suites = (
        (THEOREM_T1, THEOREM_T2, COROLLARY_C1)
        if args.suite == "all"
        else (args.suite,)
    )
    all_passed = True
    summary = {}
    for suite in suites:
        report = run_oracle_suite(
            suite,
            count=args.count,
            start_seed=args.start_seed,
            cap=args.cap,
            epsilon=args.epsilon,
        )
        summary[suite] = {
            "passed": report.passed,
            "pass_count": report.pass_count,
            "count": len(report.results),
            "failures": [
                {"seed": r.seed, "detail": r.detail}
                for r in report.results
                if not r.passed
            ],
        }
        all_passed = all_passed and report.passed
    _print_json(summary)
    return 0 if all_passed else 1


def _cmd_train(args) -> int:
    cfg = load_config(resolve_config_path(args.config))
    problem, guidance = build_environment(cfg)
    weight_policy = build_weight_policy(cfg, guidance)
    plan = build_plan(
        problem,
        xi=float(cfg.plan["xi"]),
        stages=int(cfg.plan["stages"]),
        steps_per_stage=cfg.plan["steps_per_stage"],
        weight_policy=weight_policy,
    )
    if not 1 <= args.stage <= len(plan.stages):
        raise ConfigurationError(
            f"--stage must lie in 1..{len(plan.stages)}, got {args.stage}"
        )
    stage = plan.stages[args.stage - 1]
    if stage.theorem == THEOREM_T1 and weight_policy.provisional_tau is None:
        raise ConfigurationError(
            "single-stage training of the final cost stage needs "
            "reward.provisional_tau in the config; a full run estimates it "
            "from the preceding stage instead"
        )
    # Without the preceding stages, provisional values stand in for the
    # mid-plan estimates.
    weights = weight_policy.weights_for(stage.theorem, problem.horizon)
    stage = dataclasses.replace(stage, weights=weights)
    reward_config = RewardConfig(
        weights=weights,
        guidance=weight_policy.guidance,
        scheme=SCHEME_BY_THEOREM[stage.theorem],
    )
    stage_problem = with_budget(problem, stage.budget)
    objective_fn = objective_for(problem)
    fail_value = fail_value_for(problem)
    trainer_cfg = cfg.trainer
    if trainer_cfg["kind"] == "exact_dp":
        trainer = RecordingDPTrainer(objective_fn, fail_value)
    else:
        trainer = RecordingQTrainer(
            seed=args.seed,
            eval_interval=int(cfg.metrics.get("eval_interval", 500)),
            objective_fn=objective_fn,
            objective_fail_value=fail_value,
            learning_rate=float(trainer_cfg.get("learning_rate", 0.5)),
            optimistic_start=bool(trainer_cfg.get("optimistic_start", True)),
        )
    result = trainer(stage_problem, reward_config, stage, None)
    evaluation = evaluate_policy(stage_problem, result.policy, reward_config)
    converged = evaluation.all_terminal and not evaluation.any_violation
    artifact = StageArtifact(
        stage=stage,
        policy=result.policy,
        evaluation=evaluation,
        converged=converged,
        episodes=result.episodes,
        steps=result.steps,
    )
    certificate = stage_certificates([artifact], weight_policy, problem.horizon)[0]

    out = Path(args.out) if args.out else Path(f"runs/{cfg.name}_train")
    out.mkdir(parents=True, exist_ok=True)
    policy_file = f"policy_stage{stage.index}_seed{args.seed}.txt"
    (out / policy_file).write_text(
        "\n".join(result.policy.to_lines(problem)) + "\n"
    )
    series_file = f"series_stage{stage.index}_seed{args.seed}.csv"
    (out / series_file).write_text("\n".join(series_lines(trainer.series)) + "\n")
    record = {
        "config_name": cfg.name,
        "stage": stage.index,
        "theorem": stage.theorem,
        "seed": args.seed,
        "steps": result.steps,
        "episodes": result.episodes,
        "converged": converged,
        "policy_file": policy_file,
        "series_file": series_file,
        "certificate": dataclasses.asdict(certificate),
    }
    (out / f"train_record_stage{stage.index}_seed{args.seed}.json").write_text(
        json.dumps(record, indent=2, sort_keys=True, allow_nan=False) + "\n"
    )
    _print_json(record)
    return 0 if converged else 1


def _cmd_run(args) -> int:
    multipliers = _parse_scales(args.scale)
    result = run_experiment(
        args.config,
        out_dir=args.out,
        seed=args.seed,
        multipliers=multipliers or None,
    )
    summary = {
        "out_dir": str(result.out_dir),
        "passed": result.passed,
        "seeds": {
            str(rec["seed"]): {
                "passed": rec["passed"],
                "converged_stages": sum(
                    1 for s in rec["stages"] if s["converged"]
                ),
                "stages": len(rec["stages"]),
                "estimates": rec["estimates"],
                "smoothed_tail": rec["smoothed_tail"],
                "uncertified": rec["uncertified"],
                "failure": rec["failure"],
            }
            for rec in result.seed_records
        },
    }
    if multipliers:
        summary["multipliers"] = multipliers
        if any(rec["uncertified"] for rec in result.seed_records):
            print(
                "warning: scaled weights violate their bound certificates; "
                "checks are advisory for this run",
                file=sys.stderr,
            )
    _print_json(summary)
    return 0 if result.passed else 1


def _cmd_bench(args) -> int:
    cells = None
    if args.cells:
        parsed = _parse_scales(args.cells)
        cells = tuple(sorted(parsed.items()))
    out = args.out or f"runs/{Path(args.config).stem}_bench"
    record = run_ablation_grid(
        args.config, out_dir=out, cells=cells, seed=args.seed
    )
    _print_json(record)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewardbound",
        description=(
            "Certified reward-weight ranges, staged training and "
            "brute-force verification for constrained goal-reaching control"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser(
        "bounds", help="print bound values, preset weights and a certificate"
    )
    p_bounds.add_argument(
        "--theorem", required=True, choices=[THEOREM_T1, THEOREM_T2, COROLLARY_C1]
    )
    p_bounds.add_argument("--alpha", type=float, required=True)
    p_bounds.add_argument("--tau", type=float, help="T1: cumulative-cost bound")
    p_bounds.add_argument("--gamma", type=float, help="T2/C1: discount factor")
    p_bounds.add_argument("--t-c", dest="t_c", type=int, help="T2: completion time")
    p_bounds.add_argument("--t-max", dest="t_max", type=int, help="T2/C1: step budget")
    p_bounds.add_argument("--rho", type=float, help="T2/C1: guidance bound")
    p_bounds.add_argument("--epsilon", type=float, default=0.05)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_estimate = sub.add_parser(
        "estimate", help="estimate tau or t_c from a policy file"
    )
    p_estimate.add_argument("--config", required=True)
    p_estimate.add_argument("--policy", required=True)
    p_estimate.add_argument("--kind", required=True, choices=["tau", "tc"])
    p_estimate.set_defaults(func=_cmd_estimate)

    p_oracle = sub.add_parser(
        "oracle", help="run the exhaustive verification suites"
    )
    p_oracle.add_argument(
        "--suite", default="all", choices=["all", THEOREM_T1, THEOREM_T2, COROLLARY_C1]
    )
    p_oracle.add_argument("--count", type=int, default=50)
    p_oracle.add_argument("--start-seed", dest="start_seed", type=int, default=0)
    p_oracle.add_argument("--cap", type=int, default=10**6)
    p_oracle.add_argument("--epsilon", type=float, default=0.05)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_train = sub.add_parser("train", help="train a single curriculum stage")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--stage", type=int, required=True)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out")
    p_train.set_defaults(func=_cmd_train)

    p_run = sub.add_parser("run", help="run the full configured experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out")
    p_run.add_argument(
        "--scale",
        action="append",
        metavar="WEIGHT=MULT",
        help="scale one weight at every stage (repeatable), e.g. lambda=0.1",
    )
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser(
        "bench", help="run the weight-scaling comparison grid"
    )
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--out")
    p_bench.add_argument(
        "--cells",
        action="append",
        metavar="WEIGHT=MULT",
        help=(
            "grid cells to run (repeatable); default: "
            + ", ".join(f"{w}={m:g}" for w, m in DEFAULT_ABLATION_GRID)
        ),
    )
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RewardBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
