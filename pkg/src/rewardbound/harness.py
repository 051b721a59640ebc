"""Experiment runner: configs in, trained policies and metric series out.

A configuration is one JSON document with sections ``environment``,
``reward``, ``plan``, ``trainer``, ``metrics``, ``seeds``, ``checks`` and
``output``. Running it executes the full curriculum once per seed, taps a
greedy evaluation into the metric series at a fixed step interval, and
writes everything a rerun needs to be compared byte for byte:

* ``series_seed{N}.csv``: ``step,p_m,p_s,objective,stage`` records;
* ``policy_seed{N}_stage{K}.txt``: sorted policy tables;
* ``record_seed{N}.json``: config snapshot, per-stage weights and
  certificates, estimates, check results, failure marker;
* ``experiment_record.json``: the per-seed roll-up.

Outputs carry no timestamps or absolute paths, and every float is written
through ``repr``, so identical config + seed gives identical bytes.

Ablation runs scale chosen weights at every stage through
``ScaledWeightPolicy``; certificates then report the violated bound and
the run proceeds (convergence checks are advisory for ablations).
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .bounds import (
    BoundCertificate,
    COROLLARY_C1,
    THEOREM_T1,
    THEOREM_T2,
    certify,
    preset_weights,
)
from .curriculum import (
    CurriculumPlan,
    CurriculumStage,
    PlanOutcome,
    PresetWeightPolicy,
    StageArtifact,
    TrainerResult,
    build_plan,
    optimistic_q_init,
    run_plan,
    stage_stream_seed,
)
from .envs.coverage import CoverageConfig, build, build_guidance, standard_config
from .envs.worlds import random_cost_instance, random_min_time_instance
from .errors import ConfigurationError, StageError, UsageError
from .estimators import TauEstimate, TcEstimate
from .metrics import (
    MetricSample,
    compute_metrics,
    fail_value_for,
    objective_for,
    smooth_metrics,
)
from .oracle import (
    CLASS_TERMINAL_CLEAN,
    TheoremVerdict,
    enumerate_traces,
    verify_corollary1,
    verify_theorem1,
    verify_theorem2,
)
from .pomdp import RewardConfig
from .problem import ControlProblem, unconstrained_variant
from .reward import (
    COST_SCHEME,
    GuidanceFunction,
    MIN_TIME_SCHEME,
    WeightVector,
    ZERO_GUIDANCE,
)
from .solver import (
    ExplorationSchedule,
    PolicyTable,
    QLearningParams,
    evaluate_policy,
    exact_dp,
    train_q,
)
from .tables import tabulate

# External weight names as they appear in configs, CLI flags and records.
WEIGHT_FIELDS = {"lambda": "lambda_pen", "beta": "beta", "mu": "mu"}

DEFAULT_ABLATION_GRID: Tuple[Tuple[str, float], ...] = (
    ("lambda", 0.1),
    ("lambda", 10.0),
    ("beta", 0.1),
    ("beta", 10.0),
    ("mu", 0.1),
    ("mu", 10.0),
)


@dataclass(frozen=True)
class ScaledWeightPolicy:
    """A preset weight policy with fixed multipliers on chosen weights.

    The multipliers apply at every stage, so a scaled penalty stays scaled
    after the completion-time estimate refreshes the preset. Scaling never
    touches the terminal bonus or the discount.
    """

    base: PresetWeightPolicy
    multipliers: Tuple[Tuple[str, float], ...]

    def __post_init__(self) -> None:
        for name, value in self.multipliers:
            if name not in WEIGHT_FIELDS:
                raise ConfigurationError(
                    f"unknown weight {name!r}; expected one of "
                    f"{sorted(WEIGHT_FIELDS)}"
                )
            if not value > 0.0:
                raise ConfigurationError(
                    f"multiplier for {name!r} must be > 0, got {value}"
                )

    @property
    def alpha(self) -> float:
        return self.base.alpha

    @property
    def discount(self) -> float:
        return self.base.discount

    @property
    def epsilon(self) -> float:
        return self.base.epsilon

    @property
    def guidance(self) -> GuidanceFunction:
        return self.base.guidance

    @property
    def provisional_t_c(self) -> Optional[int]:
        return self.base.provisional_t_c

    @property
    def provisional_tau(self) -> Optional[float]:
        return self.base.provisional_tau

    def weights_for(
        self,
        theorem: str,
        t_max: int,
        t_c: Optional[int] = None,
        tau: Optional[float] = None,
    ) -> WeightVector:
        weights = self.base.weights_for(theorem, t_max, t_c=t_c, tau=tau)
        changes = {}
        for name, value in self.multipliers:
            attr = WEIGHT_FIELDS[name]
            changes[attr] = getattr(weights, attr) * value
        return weights.replace(**changes) if changes else weights


def scaled_policy(
    base: PresetWeightPolicy, multipliers: Mapping[str, float]
) -> ScaledWeightPolicy:
    ordered = tuple(sorted(multipliers.items()))
    return ScaledWeightPolicy(base=base, multipliers=ordered)


# ---------------------------------------------------------------------------
# Configuration

_SECTIONS = (
    "environment",
    "reward",
    "plan",
    "trainer",
    "metrics",
    "seeds",
    "checks",
    "output",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed and validated configuration document."""

    name: str
    raw: Dict
    environment: Dict
    reward: Dict
    plan: Dict
    trainer: Dict
    metrics: Dict
    seeds: Tuple[int, ...]
    checks: Dict
    output: Dict


def _as_tuple(value):
    if isinstance(value, list):
        return tuple(_as_tuple(v) for v in value)
    return value


def _need(section: Dict, key: str, where: str, kinds, allow_none: bool = False):
    if key not in section:
        raise ConfigurationError(f"{where}: missing key {key!r}")
    value = section[key]
    if value is None and allow_none:
        return None
    if not isinstance(value, kinds):
        raise ConfigurationError(
            f"{where}.{key}: expected {kinds}, got {type(value).__name__}"
        )
    return value


def config_search_dir() -> Path:
    """Directory holding the bundled golden configurations."""
    return Path(__file__).resolve().parent / "configs"


def resolve_config_path(spec: Union[str, Path]) -> Path:
    """Accept a filesystem path or the bare name of a bundled config."""
    path = Path(spec)
    if path.exists():
        return path
    if path.suffix != ".json":
        bundled = config_search_dir() / f"{path.name}.json"
        if path.name == str(spec) and bundled.exists():
            return bundled
    raise ConfigurationError(
        f"no config file at {spec!r} and no bundled config of that name"
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    where = str(path)
    for key in raw:
        if key not in _SECTIONS:
            raise ConfigurationError(f"{where}: unknown section {key!r}")
    for key in ("environment", "reward", "plan", "trainer"):
        if key not in raw:
            raise ConfigurationError(f"{where}: missing section {key!r}")
        if not isinstance(raw[key], dict):
            raise ConfigurationError(f"{where}.{key}: must be an object")
    for key in ("metrics", "checks", "output"):
        if key in raw and not isinstance(raw[key], dict):
            raise ConfigurationError(f"{where}.{key}: must be an object")

    environment = raw["environment"]
    _need(environment, "kind", f"{where}.environment", str)

    reward = raw["reward"]
    _need(reward, "alpha", f"{where}.reward", (int, float))
    _need(reward, "discount", f"{where}.reward", (int, float))

    plan = raw["plan"]
    _need(plan, "xi", f"{where}.plan", (int, float))
    _need(plan, "stages", f"{where}.plan", int)
    _need(plan, "steps_per_stage", f"{where}.plan", (int, list))

    trainer = raw["trainer"]
    kind = _need(trainer, "kind", f"{where}.trainer", str)
    if kind not in ("q_learning", "exact_dp"):
        raise ConfigurationError(
            f"{where}.trainer.kind: expected 'q_learning' or 'exact_dp', "
            f"got {kind!r}"
        )

    metrics = raw.get("metrics", {})
    if "eval_interval" in metrics:
        _need(metrics, "eval_interval", f"{where}.metrics", int)
    if "smoothing_window" in metrics:
        _need(metrics, "smoothing_window", f"{where}.metrics", int)

    seeds_raw = raw.get("seeds", [0])
    if not isinstance(seeds_raw, list) or not seeds_raw or not all(
        isinstance(s, int) for s in seeds_raw
    ):
        raise ConfigurationError(f"{where}.seeds: must be a non-empty integer list")

    return ExperimentConfig(
        name=path.stem,
        raw=raw,
        environment=environment,
        reward=reward,
        plan=plan,
        trainer=trainer,
        metrics=metrics,
        seeds=tuple(seeds_raw),
        checks=raw.get("checks", {}),
        output=raw.get("output", {}),
    )


def build_environment(
    cfg: ExperimentConfig,
) -> Tuple[ControlProblem, GuidanceFunction]:
    env = dict(cfg.environment)
    kind = env.pop("kind")
    if kind == "coverage_standard":
        cost = env.pop("cost", "minimum_time")
        if env:
            raise ConfigurationError(
                f"environment.coverage_standard: unknown keys {sorted(env)}"
            )
        config = standard_config(cost=cost)
    elif kind == "coverage":
        converted = {key: _as_tuple(value) for key, value in env.items()}
        try:
            config = CoverageConfig(**converted)
        except TypeError as exc:
            raise ConfigurationError(f"environment.coverage: {exc}") from exc
    else:
        raise ConfigurationError(
            f"environment.kind: expected 'coverage_standard' or 'coverage', "
            f"got {kind!r}"
        )
    return build(config), build_guidance(config)


def build_weight_policy(
    cfg: ExperimentConfig,
    guidance: GuidanceFunction,
    multipliers: Optional[Mapping[str, float]] = None,
) -> Union[PresetWeightPolicy, ScaledWeightPolicy]:
    reward = cfg.reward
    base = PresetWeightPolicy(
        alpha=float(reward["alpha"]),
        discount=float(reward["discount"]),
        guidance=guidance,
        epsilon=float(reward.get("epsilon", 0.05)),
        provisional_t_c=reward.get("provisional_t_c"),
        provisional_tau=reward.get("provisional_tau"),
    )
    if multipliers:
        return scaled_policy(base, multipliers)
    return base


# ---------------------------------------------------------------------------
# Stage trainers that tap the metric series

SeriesPoint = Tuple[MetricSample, int]


class RecordingQTrainer:
    """Stage trainer recording greedy-evaluation metrics during training.

    Matches ``make_q_trainer`` exactly on the learning side (same per-stage
    stream seeds, same hyperparameters), adding a metric sample every
    ``eval_interval`` steps plus one at each stage boundary. Steps in the
    series are cumulative across stages.

    ``optimistic_start`` initializes the first stage's table above every
    achievable return, so the greedy policy sweeps unvisited actions
    systematically instead of waiting for a random walk to stumble onto
    the terminal set. Warm-started stages keep their inherited table.
    """

    def __init__(
        self,
        seed: int,
        eval_interval: int,
        objective_fn,
        objective_fail_value: float,
        learning_rate: float = 0.5,
        exploration: Optional[ExplorationSchedule] = None,
        backend: Optional[str] = None,
        optimistic_start: bool = True,
    ):
        if eval_interval <= 0:
            raise ConfigurationError(
                f"eval_interval must be > 0, got {eval_interval}"
            )
        self.seed = seed
        self.eval_interval = eval_interval
        self.objective_fn = objective_fn
        self.objective_fail_value = objective_fail_value
        self.learning_rate = learning_rate
        self.exploration = exploration if exploration is not None else ExplorationSchedule()
        self.backend = backend
        self.optimistic_start = optimistic_start
        self.series: List[SeriesPoint] = []
        self.steps_done = 0

    def _record(self, problem, reward_config, policy, step, stage_index) -> None:
        evaluation = evaluate_policy(problem, policy, reward_config)
        sample = compute_metrics(
            list(evaluation.outcomes.values()),
            self.objective_fail_value,
            self.objective_fn,
            step=step,
        )
        self.series.append((sample, stage_index))

    def __call__(
        self,
        problem: ControlProblem,
        reward_config: RewardConfig,
        stage: CurriculumStage,
        q_init: Optional[np.ndarray],
    ) -> TrainerResult:
        tab = tabulate(problem, reward_config)
        offset = self.steps_done
        if q_init is None and self.optimistic_start:
            q_init = optimistic_q_init(tab, reward_config)

        def tap(steps_so_far: int, greedy: np.ndarray) -> None:
            policy = PolicyTable.from_array(tab, greedy, name=f"stage{stage.index}_q")
            self._record(
                problem, reward_config, policy, offset + steps_so_far, stage.index
            )

        params = QLearningParams(
            max_steps=stage.training_steps,
            learning_rate=self.learning_rate,
            exploration=self.exploration,
            seed=stage_stream_seed(self.seed, stage.index),
        )
        outcome = train_q(
            problem,
            reward_config,
            params,
            q_init=q_init,
            eval_interval=self.eval_interval,
            eval_callback=tap,
            backend=self.backend,
            tab=tab,
            name=f"stage{stage.index}_q",
        )
        final_step = offset + outcome.steps
        if not self.series or self.series[-1][0].step != final_step:
            self._record(
                problem, reward_config, outcome.policy, final_step, stage.index
            )
        self.steps_done = final_step
        return TrainerResult(
            policy=outcome.policy,
            q=outcome.q,
            episodes=outcome.episodes,
            steps=outcome.steps,
        )


class RecordingDPTrainer:
    """Exact-solution stand-in for the learning trainer.

    Records a single metric sample per stage at the stage's planned step
    boundary so the series keeps the same shape as a learned run.
    """

    def __init__(self, objective_fn, objective_fail_value: float, backend=None):
        self.objective_fn = objective_fn
        self.objective_fail_value = objective_fail_value
        self.backend = backend
        self.series: List[SeriesPoint] = []
        self.steps_done = 0

    def __call__(
        self,
        problem: ControlProblem,
        reward_config: RewardConfig,
        stage: CurriculumStage,
        q_init: Optional[np.ndarray],
    ) -> TrainerResult:
        policy, _ = exact_dp(
            problem, reward_config, backend=self.backend, name=f"stage{stage.index}_dp"
        )
        self.steps_done += stage.training_steps
        evaluation = evaluate_policy(problem, policy, reward_config)
        sample = compute_metrics(
            list(evaluation.outcomes.values()),
            self.objective_fail_value,
            self.objective_fn,
            step=self.steps_done,
        )
        self.series.append((sample, stage.index))
        return TrainerResult(policy=policy, q=None, episodes=0, steps=0)


# ---------------------------------------------------------------------------
# Per-seed execution

@dataclass
class SeedRunResult:
    """Everything one seed produced, before any file is written."""

    seed: int
    outcome: PlanOutcome
    series: List[SeriesPoint]
    failure_stage: Optional[int] = None
    failure_message: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.failure_message is not None


def run_one_seed(
    problem: ControlProblem,
    plan: CurriculumPlan,
    cfg: ExperimentConfig,
    seed: int,
    halt_on_stage_failure: bool,
    backend: Optional[str] = None,
) -> SeedRunResult:
    objective_fn = objective_for(problem)
    fail_value = fail_value_for(problem)
    trainer_cfg = cfg.trainer
    if trainer_cfg["kind"] == "exact_dp":
        trainer = RecordingDPTrainer(objective_fn, fail_value, backend=backend)
    else:
        exploration = trainer_cfg.get("exploration")
        schedule = (
            ExplorationSchedule(**exploration)
            if isinstance(exploration, dict)
            else ExplorationSchedule()
        )
        trainer = RecordingQTrainer(
            seed=seed,
            eval_interval=int(cfg.metrics.get("eval_interval", 500)),
            objective_fn=objective_fn,
            objective_fail_value=fail_value,
            learning_rate=float(trainer_cfg.get("learning_rate", 0.5)),
            exploration=schedule,
            backend=backend,
            optimistic_start=bool(trainer_cfg.get("optimistic_start", True)),
        )
    failure_stage = None
    failure_message = None
    try:
        outcome = run_plan(
            plan, problem, trainer, halt_on_stage_failure=halt_on_stage_failure
        )
    except StageError as exc:
        outcome = exc.partial if exc.partial is not None else PlanOutcome(None, ())
        failure_stage = exc.stage_index
        failure_message = str(exc)
    return SeedRunResult(
        seed=seed,
        outcome=outcome,
        series=trainer.series,
        failure_stage=failure_stage,
        failure_message=failure_message,
    )


# ---------------------------------------------------------------------------
# Certificates and serialization

def stage_certificates(
    artifacts: Sequence[StageArtifact],
    weight_policy: Union[PresetWeightPolicy, ScaledWeightPolicy],
    t_max: int,
) -> List[BoundCertificate]:
    """Certify each stage's realized weights against its bound set.

    Threads the completion-time and cost estimates through the stages the
    same way the plan runner does, so each certificate checks the inputs
    the weights were actually built from.
    """
    alpha = weight_policy.alpha
    gamma = weight_policy.discount
    rho = weight_policy.guidance.rho
    tc_value = None
    tau_value = None
    certificates = []
    for artifact in artifacts:
        theorem = artifact.stage.theorem
        if theorem == THEOREM_T1:
            tau_used = tau_value if tau_value is not None else (
                weight_policy.provisional_tau
            )
            if tau_used is None:
                tau_used = float(t_max)
            inputs = {"alpha": alpha, "tau": float(tau_used)}
        elif theorem == THEOREM_T2:
            tc_used = tc_value if tc_value is not None else (
                weight_policy.provisional_t_c
            )
            if tc_used is None:
                tc_used = 1
            inputs = {
                "alpha": alpha,
                "gamma_m": gamma,
                "t_c": float(tc_used),
                "t_max": float(t_max),
                "rho": rho,
            }
        else:
            inputs = {
                "alpha": alpha,
                "gamma_m": gamma,
                "t_max": float(t_max),
                "rho": rho,
            }
        certificates.append(certify(artifact.stage.weights, theorem, inputs))
        if artifact.tc_estimate is not None:
            tc_value = artifact.tc_estimate.value
        if artifact.tau_estimate is not None:
            tau_value = artifact.tau_estimate.value
    return certificates


def _encode_budget(budget: float):
    return "inf" if math.isinf(budget) else budget


def _weights_json(weights: WeightVector) -> Dict[str, float]:
    return {
        "alpha": weights.alpha,
        "beta": weights.beta,
        "lambda": weights.lambda_pen,
        "mu": weights.mu,
        "discount": weights.discount,
    }


def _estimate_json(estimate: Union[TauEstimate, TcEstimate, None]):
    if estimate is None:
        return None
    return {
        "value": estimate.value,
        "per_initial_state": {
            repr(state): value
            for state, value in estimate.per_initial_state.items()
        },
        "policy_id": estimate.policy_id,
    }


def series_lines(series: Sequence[SeriesPoint]) -> List[str]:
    lines = ["step,p_m,p_s,objective,stage"]
    for sample, stage_index in series:
        lines.append(
            f"{sample.step},{sample.p_m!r},{sample.p_s!r},"
            f"{sample.objective!r},{stage_index}"
        )
    return lines


def smoothed_tail(
    series: Sequence[SeriesPoint], window: int
) -> Optional[Dict[str, float]]:
    """Smoothed value of each metric at the last sample, or None if empty."""
    if not series:
        return None
    samples = [point[0] for point in series]
    return {
        "p_m": smooth_metrics([s.p_m for s in samples], window)[-1],
        "p_s": smooth_metrics([s.p_s for s in samples], window)[-1],
        "objective": smooth_metrics([s.objective for s in samples], window)[-1],
    }


def _evaluate_checks(
    checks: Dict,
    result: SeedRunResult,
    certificates: Sequence[BoundCertificate],
    tail: Optional[Dict[str, float]],
) -> Dict[str, Dict]:
    outcome: Dict[str, Dict] = {}
    if checks.get("require_convergence"):
        converged = (
            not result.failed
            and bool(result.outcome.artifacts)
            and all(a.converged for a in result.outcome.artifacts)
        )
        outcome["require_convergence"] = {"passed": converged}
    if checks.get("require_certificates"):
        outcome["require_certificates"] = {
            "passed": bool(certificates) and all(c.satisfied for c in certificates)
        }
    for key, metric in (("max_smoothed_p_m", "p_m"), ("max_smoothed_p_s", "p_s")):
        if key in checks:
            limit = float(checks[key])
            value = None if tail is None else tail[metric]
            outcome[key] = {
                "limit": limit,
                "value": value,
                "passed": value is not None and value <= limit,
            }
    return outcome


# ---------------------------------------------------------------------------
# The experiment driver

@dataclass
class ExperimentResult:
    """In-memory mirror of everything ``run_experiment`` wrote."""

    config: ExperimentConfig
    out_dir: Path
    seed_results: List[SeedRunResult]
    seed_records: List[Dict]
    record: Dict

    @property
    def passed(self) -> bool:
        return bool(self.record["passed"])


def _dump_json(path: Path, payload: Dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"
    )


def run_experiment(
    config: Union[str, Path, ExperimentConfig],
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    multipliers: Optional[Mapping[str, float]] = None,
    backend: Optional[str] = None,
    max_workers: Optional[int] = None,
) -> ExperimentResult:
    """Run the configured curriculum for every seed and write all artifacts.

    ``seed`` restricts the run to a single seed. ``multipliers`` switches
    the run into ablation mode: the named weights are scaled at every
    stage, certificates record the violated bounds, and a stage failing
    its convergence check no longer halts the plan.
    """
    if isinstance(config, ExperimentConfig):
        cfg = config
    else:
        cfg = load_config(resolve_config_path(config))
    problem, guidance = build_environment(cfg)
    weight_policy = build_weight_policy(cfg, guidance, multipliers)
    plan = build_plan(
        problem,
        xi=float(cfg.plan["xi"]),
        stages=int(cfg.plan["stages"]),
        steps_per_stage=cfg.plan["steps_per_stage"],
        weight_policy=weight_policy,
    )
    ablation = bool(multipliers)
    halt = not ablation
    seeds = (seed,) if seed is not None else cfg.seeds

    target = Path(out_dir) if out_dir is not None else Path(
        cfg.output.get("dir") or f"runs/{cfg.name}"
    )
    target.mkdir(parents=True, exist_ok=True)

    workers = max_workers or min(len(seeds), os.cpu_count() or 1, 4)
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            seed_results = list(
                pool.map(
                    lambda s: run_one_seed(problem, plan, cfg, s, halt, backend),
                    seeds,
                )
            )
    else:
        seed_results = [
            run_one_seed(problem, plan, cfg, s, halt, backend) for s in seeds
        ]

    window = int(cfg.metrics.get("smoothing_window", 5))
    multiplier_map = dict(sorted(multipliers.items())) if multipliers else {}
    seed_records: List[Dict] = []
    for result in seed_results:
        certificates = stage_certificates(
            result.outcome.artifacts, weight_policy, problem.horizon
        )
        series_file = f"series_seed{result.seed}.csv"
        (target / series_file).write_text(
            "\n".join(series_lines(result.series)) + "\n"
        )
        stages_json = []
        for artifact, certificate in zip(result.outcome.artifacts, certificates):
            policy_file = f"policy_seed{result.seed}_stage{artifact.stage.index}.txt"
            (target / policy_file).write_text(
                "\n".join(artifact.policy.to_lines(problem)) + "\n"
            )
            stages_json.append(
                {
                    "index": artifact.stage.index,
                    "theorem": artifact.stage.theorem,
                    "budget": _encode_budget(artifact.stage.budget),
                    "weights": _weights_json(artifact.stage.weights),
                    "training_steps": artifact.stage.training_steps,
                    "steps": artifact.steps,
                    "episodes": artifact.episodes,
                    "converged": artifact.converged,
                    "policy_file": policy_file,
                    "certificate": dataclasses.asdict(certificate),
                    "tc_estimate": _estimate_json(artifact.tc_estimate),
                    "tau_estimate": _estimate_json(artifact.tau_estimate),
                }
            )
        tail = smoothed_tail(result.series, window)
        checks = _evaluate_checks(cfg.checks, result, certificates, tail)
        tc = result.outcome.tc_estimate
        tau = result.outcome.tau_estimate
        record = {
            "config": cfg.raw,
            "config_name": cfg.name,
            "seed": result.seed,
            "multipliers": multiplier_map,
            "uncertified": any(not c.satisfied for c in certificates),
            "stages": stages_json,
            "series_file": series_file,
            "smoothing_window": window,
            "smoothed_tail": tail,
            "estimates": {
                "t_c": None if tc is None else tc.value,
                "tau": None if tau is None else tau.value,
            },
            "checks": checks,
            "passed": all(c["passed"] for c in checks.values()),
            "failure": None
            if not result.failed
            else {
                "stage_index": result.failure_stage,
                "message": result.failure_message,
            },
        }
        _dump_json(target / f"record_seed{result.seed}.json", record)
        seed_records.append(record)

    experiment_record = {
        "config": cfg.raw,
        "config_name": cfg.name,
        "multipliers": multiplier_map,
        "seeds": list(seeds),
        "seed_record_files": [f"record_seed{r.seed}.json" for r in seed_results],
        "passed": all(r["passed"] for r in seed_records),
    }
    _dump_json(target / "experiment_record.json", experiment_record)
    return ExperimentResult(
        config=cfg,
        out_dir=target,
        seed_results=seed_results,
        seed_records=seed_records,
        record=experiment_record,
    )


def run_ablation_grid(
    config: Union[str, Path, ExperimentConfig],
    out_dir: Union[str, Path],
    cells: Optional[Sequence[Tuple[str, float]]] = None,
    seed: Optional[int] = None,
    backend: Optional[str] = None,
) -> Dict:
    """Run the weight-scaling comparison grid and a baseline, write a roll-up.

    Each cell scales one weight by one multiplier at every stage. The
    baseline runs the unscaled presets. Results land in per-cell
    subdirectories plus ``bench_record.json``.
    """
    if isinstance(config, ExperimentConfig):
        cfg = config
    else:
        cfg = load_config(resolve_config_path(config))
    grid = tuple(cells) if cells is not None else DEFAULT_ABLATION_GRID
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)

    def tail_by_seed(result: ExperimentResult) -> Dict[str, Optional[Dict]]:
        return {
            str(rec["seed"]): rec["smoothed_tail"] for rec in result.seed_records
        }

    baseline = run_experiment(
        cfg, out_dir=target / "baseline", seed=seed, backend=backend
    )
    cells_json = {}
    for weight, multiplier in grid:
        cell_name = f"{weight}_x{multiplier:g}"
        result = run_experiment(
            cfg,
            out_dir=target / cell_name,
            seed=seed,
            multipliers={weight: multiplier},
            backend=backend,
        )
        cells_json[cell_name] = {
            "weight": weight,
            "multiplier": multiplier,
            "dir": cell_name,
            "passed": result.passed,
            "uncertified": any(r["uncertified"] for r in result.seed_records),
            "smoothed_tail_by_seed": tail_by_seed(result),
        }
    record = {
        "config_name": cfg.name,
        "baseline": {
            "dir": "baseline",
            "passed": baseline.passed,
            "smoothed_tail_by_seed": tail_by_seed(baseline),
        },
        "cells": cells_json,
    }
    _dump_json(target / "bench_record.json", record)
    return record


# ---------------------------------------------------------------------------
# Brute-force verification suites over randomized instances

_PROBE_WEIGHTS = WeightVector(
    alpha=1.0, beta=0.0, lambda_pen=0.0, mu=0.0, discount=1.0
)
SUITE_ALPHA = 10.0


@dataclass(frozen=True)
class SuiteInstanceResult:
    seed: int
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    results: Tuple[SuiteInstanceResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def pass_count(self) -> int:
        return sum(1 for r in self.results if r.passed)


def _failure_detail(verdict: TheoremVerdict) -> str:
    parts = []
    for initial, item in verdict.failures().items():
        failed = sorted(k for k, ok in item.orderings.items() if not ok)
        parts.append(f"initial {initial!r}: {', '.join(failed)}")
    return "; ".join(parts)


def _probe_reports(problem: ControlProblem, cap: int, backend=None):
    """Classes and costs of every trace, under weights that cannot tilt them."""
    probe = RewardConfig(
        weights=_PROBE_WEIGHTS, guidance=ZERO_GUIDANCE, scheme=COST_SCHEME
    )
    return {
        s0: enumerate_traces(problem, probe, s0, cap=cap, backend=backend)
        for s0 in problem.initial_set
    }


def suite_tau(problem: ControlProblem, cap: int = 10**6, backend=None) -> float:
    """Cost bound for the undiscounted suite: the worst initial state's
    cheapest clean completion, read off the exhaustive sweep."""
    reports = _probe_reports(problem, cap, backend)
    return max(
        report.min_cost_in_class(CLASS_TERMINAL_CLEAN)
        for report in reports.values()
    )


def suite_tc(problem: ControlProblem, cap: int = 10**6, backend=None) -> int:
    """Completion-time input for the discounted suite: the fastest clean
    completion of the unconstrained problem over all initial states."""
    reports = _probe_reports(unconstrained_variant(problem), cap, backend)
    return min(
        report.min_length_in_class(CLASS_TERMINAL_CLEAN)
        for report in reports.values()
    )


def run_oracle_suite(
    suite: str,
    count: int = 50,
    start_seed: int = 0,
    cap: int = 10**6,
    epsilon: float = 0.05,
    backend: Optional[str] = None,
) -> SuiteReport:
    """Exhaustively verify one bound set on ``count`` randomized instances.

    Weights come from the presets at the given margin; the completion-time
    and cost inputs are read off a probe enumeration, so the check is
    self-contained per instance.
    """
    if suite not in (THEOREM_T1, THEOREM_T2, COROLLARY_C1):
        raise UsageError(f"unknown suite {suite!r}; expected T1, T2 or C1")
    if count < 1:
        raise UsageError(f"count must be >= 1, got {count}")
    results = []
    for seed in range(start_seed, start_seed + count):
        if suite == THEOREM_T1:
            instance = random_cost_instance(seed)
            tau = suite_tau(instance.problem, cap=cap, backend=backend)
            weights = preset_weights(
                THEOREM_T1, {"alpha": SUITE_ALPHA, "tau": tau}, epsilon=epsilon
            )
            config = RewardConfig(
                weights=weights, guidance=instance.guidance, scheme=COST_SCHEME
            )
            verdict = verify_theorem1(
                instance.problem, config, cap=cap, backend=backend
            )
        else:
            instance = random_min_time_instance(seed)
            gamma = instance.suggested_discount
            t_max = instance.problem.horizon
            rho = instance.guidance.rho
            if suite == THEOREM_T2:
                t_c = suite_tc(instance.problem, cap=cap, backend=backend)
                weights = preset_weights(
                    THEOREM_T2,
                    {
                        "alpha": SUITE_ALPHA,
                        "gamma_m": gamma,
                        "t_c": t_c,
                        "t_max": t_max,
                        "rho": rho,
                    },
                    epsilon=epsilon,
                )
                config = RewardConfig(
                    weights=weights, guidance=instance.guidance, scheme=MIN_TIME_SCHEME
                )
                verdict = verify_theorem2(
                    instance.problem, config, cap=cap, backend=backend
                )
            else:
                weights = preset_weights(
                    COROLLARY_C1,
                    {
                        "alpha": SUITE_ALPHA,
                        "gamma_m": gamma,
                        "t_max": t_max,
                        "rho": rho,
                    },
                    epsilon=epsilon,
                )
                config = RewardConfig(
                    weights=weights, guidance=instance.guidance, scheme=MIN_TIME_SCHEME
                )
                verdict = verify_corollary1(
                    unconstrained_variant(instance.problem),
                    config,
                    cap=cap,
                    backend=backend,
                )
        results.append(
            SuiteInstanceResult(
                seed=seed,
                passed=verdict.passed,
                detail="" if verdict.passed else _failure_detail(verdict),
            )
        )
    return SuiteReport(suite=suite, results=tuple(results))
