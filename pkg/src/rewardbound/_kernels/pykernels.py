"""Pure-Python reference kernels.

The compiled extension mirrors these routines operation for operation; both
consume the same tabulated arrays and the same pregenerated uniform streams,
so outputs agree bitwise. Keep the arithmetic order identical when editing
either side.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

BACKEND_NAME = "python"


def dp_backward(
    next_state: np.ndarray,
    reward: np.ndarray,
    done: np.ndarray,
    discount: float,
    horizon: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Exact finite-horizon backup over decision times 0 .. horizon-2.

    Returns value [T, S] and greedy action-index [T, S] arrays, ties broken
    by the lowest action index. A transition marked done, or taken at the
    last decision time, contributes its immediate reward only.
    """
    num_states, num_actions = reward.shape
    T = horizon - 1
    values = np.zeros((T, num_states), dtype=np.float64)
    policy = np.zeros((T, num_states), dtype=np.int32)
    for t in range(T - 1, -1, -1):
        for s in range(num_states):
            best_value = -np.inf
            best_action = 0
            for a in range(num_actions):
                q = reward[s, a]
                if t < T - 1 and not done[s, a]:
                    q = reward[s, a] + discount * values[t + 1, next_state[s, a]]
                if q > best_value:
                    best_value = q
                    best_action = a
            values[t, s] = best_value
            policy[t, s] = best_action
    return values, policy


def q_learn_chunk(
    next_state: np.ndarray,
    reward: np.ndarray,
    done: np.ndarray,
    discount: float,
    horizon: int,
    q: np.ndarray,
    u_init: np.ndarray,
    u_explore: np.ndarray,
    u_action: np.ndarray,
    initial_indices: np.ndarray,
    learning_rate: float,
    eps_start: float,
    eps_end: float,
    decay_basis: float,
    use_step_basis: bool,
    episode_offset: int,
    step_offset: int,
    max_episodes: int,
    max_steps: int,
) -> Tuple[int, int]:
    """Run whole episodes until an episode or step budget is met.

    ``q`` is a [T, S, A] table updated in place. Exploration randomness comes
    from the pregenerated ``u_*`` streams, indexed locally to this call while
    ``episode_offset``/``step_offset`` carry the global progress, which pins
    the trajectory regardless of backend or chunking. Returns the number of
    episodes and transitions consumed by this call.
    """
    T = horizon - 1
    num_actions = reward.shape[1]
    num_initial = len(initial_indices)
    episodes_done = 0
    steps_done = 0
    while episodes_done < max_episodes and step_offset + steps_done < max_steps:
        ep = episode_offset + episodes_done
        basis = float(step_offset + steps_done) if use_step_basis else float(ep)
        frac = basis / decay_basis if decay_basis > 0.0 else 1.0
        if frac > 1.0:
            frac = 1.0
        eps = eps_start + (eps_end - eps_start) * frac
        pick = int(u_init[episodes_done] * num_initial)
        if pick >= num_initial:
            pick = num_initial - 1
        s = int(initial_indices[pick])
        for t in range(T):
            if u_explore[episodes_done, t] < eps:
                a = int(u_action[episodes_done, t] * num_actions)
                if a >= num_actions:
                    a = num_actions - 1
            else:
                a = 0
                best = q[t, s, 0]
                for k in range(1, num_actions):
                    if q[t, s, k] > best:
                        best = q[t, s, k]
                        a = k
            ns = int(next_state[s, a])
            finished = bool(done[s, a]) or t == T - 1
            if finished:
                target = reward[s, a]
            else:
                best_next = q[t + 1, ns, 0]
                for k in range(1, num_actions):
                    if q[t + 1, ns, k] > best_next:
                        best_next = q[t + 1, ns, k]
                target = reward[s, a] + discount * best_next
            q[t, s, a] = q[t, s, a] + learning_rate * (target - q[t, s, a])
            steps_done += 1
            if finished:
                break
            s = ns
        episodes_done += 1
    return episodes_done, steps_done


def enumerate_chunk(
    next_state: np.ndarray,
    terminal: np.ndarray,
    violation: np.ndarray,
    reward: np.ndarray,
    cost: np.ndarray,
    discount: float,
    horizon: int,
    stack_state: np.ndarray,
    stack_action: np.ndarray,
    stack_taken: np.ndarray,
    stack_reward: np.ndarray,
    stack_cost: np.ndarray,
    top: int,
    out_class: np.ndarray,
    out_length: np.ndarray,
    out_return: np.ndarray,
    out_cost: np.ndarray,
    out_actions: np.ndarray,
) -> Tuple[int, int]:
    """Resumable depth-first sweep of every action sequence.

    Trace classes: 0 ends in a violation, 1 exhausts the horizon, 2 reaches
    the terminal set on a violating transition, 3 reaches it cleanly. Fills
    the ``out_*`` buffers and returns (records emitted, new stack top); the
    sweep is finished when the returned top is negative. Lexicographic
    action-sequence order, so the first record of the best return matches the
    backup's lowest-index tie break.
    """
    num_actions = reward.shape[1]
    capacity = out_class.shape[0]
    count = 0
    while top >= 0 and count < capacity:
        a = int(stack_action[top])
        if a == num_actions:
            top -= 1
            continue
        stack_action[top] = a + 1
        s = int(stack_state[top])
        ns = int(next_state[s, a])
        stack_taken[top] = a
        stack_reward[top] = reward[s, a]
        stack_cost[top + 1] = stack_cost[top] + cost[s, a]
        violates = bool(violation[s, a])
        if terminal[ns]:
            cls = 2 if violates else 3
        elif violates:
            cls = 0
        elif top + 1 == horizon - 1:
            cls = 1
        else:
            top += 1
            stack_state[top] = ns
            stack_action[top] = 0
            continue
        total = 0.0
        for i in range(top, -1, -1):
            total = stack_reward[i] + discount * total
        out_class[count] = cls
        out_length[count] = top + 1
        out_return[count] = total
        out_cost[count] = stack_cost[top + 1]
        for i in range(top + 1):
            out_actions[count, i] = stack_taken[i]
        count += 1
    return count, top
