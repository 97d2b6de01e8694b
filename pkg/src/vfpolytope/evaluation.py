"""Exact policy evaluation and Bellman operators.

Everything here is model-based and exact: value functions come from dense
linear solves of (I - gamma * P_pi) v = r_pi, never from iteration. The
matrix is always invertible because the spectral radius of gamma * P_pi is
at most gamma < 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch
from .mdp import Mdp, Policy


def _check_policy_shape(mdp: Mdp, policy: Policy) -> None:
    if policy.probs.shape != (mdp.n_states, mdp.n_actions):
        raise ShapeMismatch(
            f"policy shape {policy.probs.shape} does not match MDP "
            f"({mdp.n_states}, {mdp.n_actions})"
        )


def _check_value_shape(mdp: Mdp, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (mdp.n_states,):
        raise ShapeMismatch(f"value vector must have length {mdp.n_states}")
    return v


@dataclass(frozen=True, eq=False)
class InducedChain:
    """State-to-state dynamics of a fixed policy.

    Attributes:
        p_pi: |S| x |S| transition matrix under the policy.
        r_pi: per-state expected reward vector.
        resolvent: (I - gamma * p_pi)^{-1}; column i spans the direction in
            which the value can move when only state i's action distribution
            is free.
    """

    p_pi: np.ndarray
    r_pi: np.ndarray
    resolvent: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return self.resolvent @ self.r_pi


def induce(mdp: Mdp, policy: Policy) -> InducedChain:
    """Collapse the MDP onto a policy: P_pi, r_pi and the resolvent."""
    _check_policy_shape(mdp, policy)
    p_pi = np.einsum("sa,sat->st", policy.probs, mdp.transition_tensor)
    r_pi = np.einsum("sa,sa->s", policy.probs, mdp.reward_matrix)
    eye = np.eye(mdp.n_states)
    resolvent = np.linalg.solve(eye - mdp.gamma * p_pi, eye)
    return InducedChain(p_pi=p_pi, r_pi=r_pi, resolvent=resolvent)


def value_function(mdp: Mdp, policy: Policy) -> np.ndarray:
    """Exact value of a policy via a dense linear solve."""
    _check_policy_shape(mdp, policy)
    p_pi = np.einsum("sa,sat->st", policy.probs, mdp.transition_tensor)
    r_pi = np.einsum("sa,sa->s", policy.probs, mdp.reward_matrix)
    return np.linalg.solve(np.eye(mdp.n_states) - mdp.gamma * p_pi, r_pi)


def value_function_batch(mdp: Mdp, probs: np.ndarray) -> np.ndarray:
    """Values of many policies at once.

    Args:
        probs: array of shape (n, |S|, |A|); each [i] is a row-stochastic
            policy matrix. Rows are trusted, not re-validated.

    Returns:
        (n, |S|) array of exact values, one row per policy.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 3 or probs.shape[1:] != (mdp.n_states, mdp.n_actions):
        raise ShapeMismatch(
            f"expected (n, {mdp.n_states}, {mdp.n_actions}) policies, got {probs.shape}"
        )
    p_pi = np.einsum("nsa,sat->nst", probs, mdp.transition_tensor)
    r_pi = np.einsum("nsa,sa->ns", probs, mdp.reward_matrix)
    systems = np.eye(mdp.n_states)[None, :, :] - mdp.gamma * p_pi
    return np.linalg.solve(systems, r_pi[:, :, None])[:, :, 0]


def bellman_apply(mdp: Mdp, policy: Policy, v: np.ndarray) -> np.ndarray:
    """One application of the policy's Bellman operator: r_pi + gamma P_pi v."""
    _check_policy_shape(mdp, policy)
    v = _check_value_shape(mdp, v)
    p_pi = np.einsum("sa,sat->st", policy.probs, mdp.transition_tensor)
    r_pi = np.einsum("sa,sa->s", policy.probs, mdp.reward_matrix)
    return r_pi + mdp.gamma * (p_pi @ v)


def q_values(mdp: Mdp, v: np.ndarray) -> np.ndarray:
    """State-action values r(s,a) + gamma * E[v(s')] as an |S| x |A| matrix."""
    v = _check_value_shape(mdp, v)
    return mdp.reward_matrix + mdp.gamma * (mdp.transition_tensor @ v)


def optimality_bellman_apply(mdp: Mdp, v: np.ndarray) -> tuple[np.ndarray, Policy]:
    """One application of the optimality operator, with its greedy policy.

    Ties in the per-state max are broken toward the lowest action index.
    """
    q = q_values(mdp, v)
    greedy_actions = np.argmax(q, axis=1)
    return q[np.arange(mdp.n_states), greedy_actions], Policy.deterministic(
        greedy_actions, mdp.n_actions
    )


def optimal_value(mdp: Mdp, tolerance: float = 1e-10) -> tuple[np.ndarray, Policy]:
    """Optimal value and a greedy optimal deterministic policy.

    Runs value iteration from zero until the sup-norm step is below
    tolerance * (1 - gamma) / gamma, extracts the greedy policy, then
    evaluates it exactly, so the returned value is the value of an actual
    policy rather than the truncated iterate.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    gamma = mdp.gamma
    threshold = np.inf if gamma == 0.0 else tolerance * (1.0 - gamma) / gamma
    v = np.zeros(mdp.n_states)
    while True:
        v_next, greedy = optimality_bellman_apply(mdp, v)
        if np.max(np.abs(v_next - v)) < threshold:
            break
        v = v_next
    return value_function(mdp, greedy), greedy
