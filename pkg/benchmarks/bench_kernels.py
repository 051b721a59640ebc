"""Compare the compiled and pure-Python kernel backends.

Runs the exact solver, the tabular learner and the trace enumerator on the
bundled coverage instance with both backends, checks the outputs agree
bitwise, and prints wall-clock times. The compiled extension only buys
speed; any numeric divergence is a bug.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rewardbound import (
    ControlProblem,
    CostKind,
    QLearningParams,
    RewardConfig,
    UNCONSTRAINED,
    enumerate_traces,
    exact_dp,
    preset_weights,
    train_q,
)
from rewardbound._kernels import HAVE_COMPILED
from rewardbound.bounds import COROLLARY_C1
from rewardbound.envs import standard_instance
from rewardbound.reward import MIN_TIME_SCHEME, ZERO_GUIDANCE
from rewardbound.solver import ExplorationSchedule


def dense_chain(horizon: int) -> ControlProblem:
    """Single agent on a long chain whose goal is out of reach.

    Every one of the 2**(horizon - 1) action sequences runs to exhaustion,
    which makes the instance a worst case for the enumerator.
    """
    n = horizon + 1
    return ControlProblem(
        num_agents=1,
        state_space=tuple(range(n + 1)),
        action_space_per_agent=(0, 1),
        dynamics=lambda s, a: min(s + a[0], n),
        initial_set=(0,),
        terminal_set_predicate=lambda s: s == n,
        state_constraint=UNCONSTRAINED,
        horizon=horizon,
        cost_kind=CostKind.minimum_time(),
    )


def best_of(repeat, fn):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=400_000,
                        help="learning steps per backend (default 400000)")
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repeats, best-of (default 3)")
    args = parser.parse_args()

    if not HAVE_COMPILED:
        print("compiled backend not built; nothing to compare")
        return 1

    problem, guidance = standard_instance()
    weights = preset_weights(
        COROLLARY_C1,
        {
            "alpha": 10.0,
            "gamma_m": 0.62,
            "t_max": problem.horizon,
            "rho": guidance.rho,
        },
    )
    config = RewardConfig(
        weights=weights, guidance=guidance, scheme=MIN_TIME_SCHEME
    )
    params = QLearningParams(
        max_steps=args.steps,
        learning_rate=0.5,
        exploration=ExplorationSchedule(1.0, 0.05, 0.8),
        seed=7,
    )
    rows = []

    t_py, (pol_py, val_py) = best_of(
        args.repeat, lambda: exact_dp(problem, config, backend="python")
    )
    t_c, (pol_c, val_c) = best_of(
        args.repeat, lambda: exact_dp(problem, config, backend="compiled")
    )
    assert np.array_equal(val_py.values, val_c.values)
    assert pol_py.mapping == pol_c.mapping
    rows.append(("exact_dp", t_py, t_c))

    t_py, out_py = best_of(
        args.repeat, lambda: train_q(problem, config, params, backend="python")
    )
    t_c, out_c = best_of(
        args.repeat, lambda: train_q(problem, config, params, backend="compiled")
    )
    assert out_py.steps == out_c.steps and out_py.episodes == out_c.episodes
    assert np.array_equal(out_py.q, out_c.q)
    rows.append((f"train_q ({args.steps} steps)", t_py, t_c))

    chain = dense_chain(horizon=19)
    chain_config = RewardConfig(
        weights=weights.replace(lambda_pen=0.0),
        guidance=ZERO_GUIDANCE,
        scheme=MIN_TIME_SCHEME,
    )
    t_py, rep_py = best_of(
        args.repeat,
        lambda: enumerate_traces(chain, chain_config, 0, backend="python"),
    )
    t_c, rep_c = best_of(
        args.repeat,
        lambda: enumerate_traces(chain, chain_config, 0, backend="compiled"),
    )
    assert np.array_equal(rep_py.returns, rep_c.returns)
    assert np.array_equal(rep_py.classes, rep_c.classes)
    rows.append((f"enumerate ({len(rep_c.classes)} traces)", t_py, t_c))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_py, t_c in rows:
        print(
            f"{name:<{width}}  {t_py * 1e3:>8.1f}ms  {t_c * 1e3:>8.1f}ms"
            f"  {t_py / t_c:>7.1f}x"
        )
    print("outputs bitwise identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
