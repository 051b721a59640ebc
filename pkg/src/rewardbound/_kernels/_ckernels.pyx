# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: initializedcheck=False
# cython: cdivision=True
"""Compiled kernels.

Operation-for-operation mirror of ``pykernels``; both sides consume the same
tabulated arrays and pregenerated uniform streams and must agree bitwise.
The build turns off fused multiply-add contraction for the same reason. Keep
any edit in lockstep with the reference module.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND_NAME = "compiled"


def dp_backward(
    const cnp.int32_t[:, ::1] next_state,
    const double[:, ::1] reward,
    const cnp.uint8_t[:, ::1] done,
    double discount,
    int horizon,
):
    """Exact finite-horizon backup; see the reference module for semantics."""
    cdef Py_ssize_t num_states = reward.shape[0]
    cdef Py_ssize_t num_actions = reward.shape[1]
    cdef Py_ssize_t T = horizon - 1
    values_arr = np.zeros((T, num_states), dtype=np.float64)
    policy_arr = np.zeros((T, num_states), dtype=np.int32)
    cdef double[:, ::1] values = values_arr
    cdef cnp.int32_t[:, ::1] policy = policy_arr
    cdef Py_ssize_t t, s, a, best_action
    cdef double best_value, q
    for t in range(T - 1, -1, -1):
        for s in range(num_states):
            best_value = -INFINITY
            best_action = 0
            for a in range(num_actions):
                q = reward[s, a]
                if t < T - 1 and not done[s, a]:
                    q = reward[s, a] + discount * values[t + 1, next_state[s, a]]
                if q > best_value:
                    best_value = q
                    best_action = a
            values[t, s] = best_value
            policy[t, s] = <cnp.int32_t>best_action
    return values_arr, policy_arr


def q_learn_chunk(
    const cnp.int32_t[:, ::1] next_state,
    const double[:, ::1] reward,
    const cnp.uint8_t[:, ::1] done,
    double discount,
    int horizon,
    double[:, :, ::1] q,
    const double[::1] u_init,
    const double[:, ::1] u_explore,
    const double[:, ::1] u_action,
    const cnp.int64_t[::1] initial_indices,
    double learning_rate,
    double eps_start,
    double eps_end,
    double decay_basis,
    bint use_step_basis,
    long long episode_offset,
    long long step_offset,
    long long max_episodes,
    long long max_steps,
):
    """Run whole episodes against step/episode budgets; updates ``q`` in place."""
    cdef Py_ssize_t T = horizon - 1
    cdef Py_ssize_t num_actions = reward.shape[1]
    cdef Py_ssize_t num_initial = initial_indices.shape[0]
    cdef long long episodes_done = 0
    cdef long long steps_done = 0
    cdef long long ep
    cdef double basis, frac, eps, best, best_next, target, qold
    cdef Py_ssize_t pick, s, t, a, k, ns
    cdef bint finished
    while episodes_done < max_episodes and step_offset + steps_done < max_steps:
        ep = episode_offset + episodes_done
        if use_step_basis:
            basis = <double>(step_offset + steps_done)
        else:
            basis = <double>ep
        frac = basis / decay_basis if decay_basis > 0.0 else 1.0
        if frac > 1.0:
            frac = 1.0
        eps = eps_start + (eps_end - eps_start) * frac
        pick = <Py_ssize_t>(u_init[episodes_done] * num_initial)
        if pick >= num_initial:
            pick = num_initial - 1
        s = <Py_ssize_t>initial_indices[pick]
        for t in range(T):
            if u_explore[episodes_done, t] < eps:
                a = <Py_ssize_t>(u_action[episodes_done, t] * num_actions)
                if a >= num_actions:
                    a = num_actions - 1
            else:
                a = 0
                best = q[t, s, 0]
                for k in range(1, num_actions):
                    if q[t, s, k] > best:
                        best = q[t, s, k]
                        a = k
            ns = <Py_ssize_t>next_state[s, a]
            finished = done[s, a] != 0 or t == T - 1
            if finished:
                target = reward[s, a]
            else:
                best_next = q[t + 1, ns, 0]
                for k in range(1, num_actions):
                    if q[t + 1, ns, k] > best_next:
                        best_next = q[t + 1, ns, k]
                target = reward[s, a] + discount * best_next
            qold = q[t, s, a]
            q[t, s, a] = qold + learning_rate * (target - qold)
            steps_done += 1
            if finished:
                break
            s = ns
        episodes_done += 1
    return int(episodes_done), int(steps_done)


def enumerate_chunk(
    const cnp.int32_t[:, ::1] next_state,
    const cnp.uint8_t[::1] terminal,
    const cnp.uint8_t[:, ::1] violation,
    const double[:, ::1] reward,
    const double[:, ::1] cost,
    double discount,
    int horizon,
    cnp.int32_t[::1] stack_state,
    cnp.int32_t[::1] stack_action,
    cnp.int16_t[::1] stack_taken,
    double[::1] stack_reward,
    double[::1] stack_cost,
    int top,
    cnp.uint8_t[::1] out_class,
    cnp.int32_t[::1] out_length,
    double[::1] out_return,
    double[::1] out_cost,
    cnp.int16_t[:, ::1] out_actions,
):
    """Resumable depth-first sweep; see the reference module for the classes."""
    cdef Py_ssize_t num_actions = reward.shape[1]
    cdef Py_ssize_t capacity = out_class.shape[0]
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t tp = top
    cdef Py_ssize_t a, s, ns, i
    cdef int cls
    cdef bint violates
    cdef double total
    while tp >= 0 and count < capacity:
        a = stack_action[tp]
        if a == num_actions:
            tp -= 1
            continue
        stack_action[tp] = <cnp.int32_t>(a + 1)
        s = stack_state[tp]
        ns = next_state[s, a]
        stack_taken[tp] = <cnp.int16_t>a
        stack_reward[tp] = reward[s, a]
        stack_cost[tp + 1] = stack_cost[tp] + cost[s, a]
        violates = violation[s, a] != 0
        if terminal[ns]:
            cls = 2 if violates else 3
        elif violates:
            cls = 0
        elif tp + 1 == horizon - 1:
            cls = 1
        else:
            tp += 1
            stack_state[tp] = <cnp.int32_t>ns
            stack_action[tp] = 0
            continue
        total = 0.0
        for i in range(tp, -1, -1):
            total = stack_reward[i] + discount * total
        out_class[count] = <cnp.uint8_t>cls
        out_length[count] = <cnp.int32_t>(tp + 1)
        out_return[count] = total
        out_cost[count] = stack_cost[tp + 1]
        for i in range(tp + 1):
            out_actions[count, i] = stack_taken[i]
        count += 1
    return int(count), int(tp)
