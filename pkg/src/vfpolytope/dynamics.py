"""Model-based learning dynamics recorded as paths through value space.

Six algorithms: value iteration, policy iteration, vanilla and
entropy-regularized policy gradient, natural policy gradient, and the
cross-entropy method with or without covariance noise. All updates are
exact (no sampling noise except CEM's population draws, which are seeded),
and every run returns a Trajectory of exact value vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingPolicy, NonFiniteLogits, ShapeMismatch
from .evaluation import (
    optimal_value,
    optimality_bellman_apply,
    q_values,
    value_function,
    value_function_batch,
)
from .mdp import Mdp, Policy

INIT_KINDS = ("near_vertex", "near_boundary", "interior", "explicit_policy")


@dataclass(frozen=True)
class InitSpec:
    """Where a run starts: near a vertex, near a boundary, interior, or given.

    The near_* kinds smooth a one-hot row by epsilon toward uniform, since
    softmax parametrizations cannot sit exactly on the boundary.
    """

    kind: str
    epsilon: float = 0.01
    policy: Policy | None = None

    def __post_init__(self) -> None:
        if self.kind not in INIT_KINDS:
            raise ValueError(f"unknown init kind {self.kind!r}; known: {INIT_KINDS}")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ordered value-space points of a run plus per-step scalar metadata."""

    points: np.ndarray
    meta: list[dict]

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1:
            raise ValueError("trajectory needs at least one point")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class CemConfig:
    """Cross-entropy method knobs: population, elites, covariance handling."""

    population: int = 500
    elites: int = 50
    init_cov_scale: float = 0.1
    noise_scale: float = 0.0
    iterations: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 1 or not 1 <= self.elites <= self.population:
            raise ValueError("need 1 <= elites <= population")
        if self.init_cov_scale <= 0 or self.noise_scale < 0 or self.iterations < 1:
            raise ValueError("bad CEM configuration")


def _check_logits(mdp: Mdp, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (mdp.n_states, mdp.n_actions):
        raise ShapeMismatch(
            f"logits must have shape ({mdp.n_states}, {mdp.n_actions})"
        )
    if not np.all(np.isfinite(theta)):
        raise NonFiniteLogits("logits contain NaN or infinity")
    return theta


def softmax_policy(theta: np.ndarray) -> Policy:
    """Rowwise softmax of a logit matrix, stabilized by max subtraction."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2:
        raise ShapeMismatch("logits must be a 2-D matrix")
    if not np.all(np.isfinite(theta)):
        raise NonFiniteLogits("logits contain NaN or infinity")
    z = theta - theta.max(axis=1, keepdims=True)
    e = np.exp(z)
    return Policy(e / e.sum(axis=1, keepdims=True))


def _softmax_probs(theta: np.ndarray) -> np.ndarray:
    z = theta - theta.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _smoothed_one_hot(n_actions: int, action: int, epsilon: float) -> np.ndarray:
    row = np.full(n_actions, epsilon / n_actions)
    row[action] += 1.0 - epsilon
    return row


def resolve_init(mdp: Mdp, spec: InitSpec, seed=0) -> Policy:
    """Materialize an InitSpec as a concrete policy.

    near_vertex smooths the greedy optimal deterministic policy; near_boundary
    pins state 0 toward action 0 and leaves the rest uniform; interior is the
    uniform policy. The seed is accepted for signature stability; the current
    constructions are deterministic.
    """
    del seed
    if spec.kind == "interior":
        return Policy.uniform(mdp.n_states, mdp.n_actions)
    if spec.kind == "near_vertex":
        _, greedy = optimal_value(mdp)
        best_actions = np.argmax(greedy.probs, axis=1)
        probs = np.stack(
            [
                _smoothed_one_hot(mdp.n_actions, int(a), spec.epsilon)
                for a in best_actions
            ]
        )
        return Policy(probs)
    if spec.kind == "near_boundary":
        probs = np.full((mdp.n_states, mdp.n_actions), 1.0 / mdp.n_actions)
        probs[0] = _smoothed_one_hot(mdp.n_actions, 0, spec.epsilon)
        return Policy(probs)
    if spec.policy is None:
        raise MissingPolicy("explicit_policy init requires a policy")
    if spec.policy.probs.shape != (mdp.n_states, mdp.n_actions):
        raise ShapeMismatch("explicit init policy does not match the MDP")
    return spec.policy


# ---------------------------------------------------------------------------
# Value-space methods
# ---------------------------------------------------------------------------


def run_value_iteration(
    mdp: Mdp, v0: np.ndarray, iterations: int, stop_tol: float = 1e-10
) -> Trajectory:
    """Iterate the optimality operator from v0, recording every iterate.

    Stops early once the sup-norm step is below stop_tol. Iterates are raw
    vectors and need not be the value of any policy.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    v = np.asarray(v0, dtype=float).reshape(-1)
    if v.shape != (mdp.n_states,):
        raise ShapeMismatch(f"v0 must have length {mdp.n_states}")
    points = [v]
    meta = [{"iteration": 0, "step_norm": 0.0}]
    for k in range(1, iterations + 1):
        v_next, _ = optimality_bellman_apply(mdp, v)
        step = float(np.max(np.abs(v_next - v)))
        points.append(v_next)
        meta.append({"iteration": k, "step_norm": step})
        v = v_next
        if step < stop_tol:
            break
    return Trajectory(points=np.stack(points), meta=meta)


def run_policy_iteration(mdp: Mdp, v0: np.ndarray) -> Trajectory:
    """Greedy improvement + exact evaluation until the greedy policy repeats.

    Every point after v0 is the exact value of a deterministic policy.
    """
    v = np.asarray(v0, dtype=float).reshape(-1)
    if v.shape != (mdp.n_states,):
        raise ShapeMismatch(f"v0 must have length {mdp.n_states}")
    points = [v]
    meta = [{"iteration": 0, "step_norm": 0.0}]
    previous: Policy | None = None
    for k in range(1, mdp.n_actions**mdp.n_states + 2):
        _, greedy = optimality_bellman_apply(mdp, v)
        if previous is not None and greedy == previous:
            break
        v_next = value_function(mdp, greedy)
        points.append(v_next)
        meta.append(
            {"iteration": k, "step_norm": float(np.max(np.abs(v_next - v)))}
        )
        v = v_next
        previous = greedy
    return Trajectory(points=np.stack(points), meta=meta)


# ---------------------------------------------------------------------------
# Policy-gradient family
# ---------------------------------------------------------------------------


def discounted_distribution(
    mdp: Mdp, policy: Policy, rho0: np.ndarray | None = None
) -> np.ndarray:
    """Discounted state-visit distribution (1-gamma) * sum_t gamma^t P(s_t = s).

    rho0 defaults to uniform. The result is a probability vector.
    """
    if rho0 is None:
        rho0 = np.full(mdp.n_states, 1.0 / mdp.n_states)
    else:
        rho0 = np.asarray(rho0, dtype=float).reshape(-1)
        if rho0.shape != (mdp.n_states,):
            raise ShapeMismatch("rho0 must have one entry per state")
    p_pi = np.einsum("sa,sat->st", policy.probs, mdp.transition_tensor)
    d = (1.0 - mdp.gamma) * np.linalg.solve(
        np.eye(mdp.n_states) - mdp.gamma * p_pi.T, rho0
    )
    return d


def _entropy_rows(probs: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(probs > 0.0, probs * np.log(probs), 0.0)
    return -plogp.sum(axis=1)


def policy_gradient(
    mdp: Mdp, theta: np.ndarray, entropy_coeff: float = 0.0
) -> np.ndarray:
    """Exact gradient of the uniform-start objective J(theta) = mean_s V(s).

    For the tabular softmax the gradient contracts the advantage with the
    visitation weights:

        dJ/dtheta[s, a] = d(s)/(1-gamma) * pi(a|s) * (Q(s, a) - V(s))

    with d the discounted visitation distribution from a uniform start.
    A nonzero entropy_coeff adds that multiple of the gradient of
    sum_s d(s) * H(pi(.|s)), holding d fixed within the step.
    """
    theta = _check_logits(mdp, theta)
    probs = _softmax_probs(theta)
    policy = Policy(probs)
    v = value_function(mdp, policy)
    q = q_values(mdp, v)
    d = discounted_distribution(mdp, policy)
    advantage = q - v[:, None]
    grad = (d / (1.0 - mdp.gamma))[:, None] * probs * advantage
    if entropy_coeff != 0.0:
        h = _entropy_rows(probs)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = np.where(probs > 0.0, np.log(probs), 0.0)
        grad_h = d[:, None] * (-probs) * (log_p + h[:, None])
        grad = grad + entropy_coeff * grad_h
    return grad


def _logits_of(policy: Policy) -> np.ndarray:
    if np.any(policy.probs <= 0.0):
        raise NonFiniteLogits(
            "softmax runs need strictly positive initial probabilities"
        )
    return np.log(policy.probs)


def _resolve_start(mdp: Mdp, init, seed) -> Policy:
    if isinstance(init, Policy):
        return init
    if isinstance(init, InitSpec):
        return resolve_init(mdp, init, seed)
    raise TypeError("init must be a Policy or an InitSpec")


def run_policy_gradient(
    mdp: Mdp,
    init,
    eta: float,
    iterations: int,
    entropy_coeff: float = 0.0,
    seed=0,
) -> Trajectory:
    """Gradient ascent on logits from the resolved init, recording values."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    theta = _logits_of(_resolve_start(mdp, init, seed))
    v = value_function(mdp, softmax_policy(theta))
    points = [v]
    meta = [
        {
            "iteration": 0,
            "step_norm": 0.0,
            "grad_norm": 0.0,
            "entropy": float(_entropy_rows(_softmax_probs(theta)).mean()),
        }
    ]
    for k in range(1, iterations + 1):
        grad = policy_gradient(mdp, theta, entropy_coeff)
        theta = theta + eta * grad
        probs = _softmax_probs(theta)
        v_next = value_function(mdp, Policy(probs))
        meta.append(
            {
                "iteration": k,
                "step_norm": float(np.max(np.abs(v_next - v))),
                "grad_norm": float(np.max(np.abs(grad))),
                "entropy": float(_entropy_rows(probs).mean()),
            }
        )
        points.append(v_next)
        v = v_next
    return Trajectory(points=np.stack(points), meta=meta)


def fisher_information(mdp: Mdp, theta: np.ndarray) -> np.ndarray:
    """Fisher matrix of the softmax policy over the flattened logit vector.

    Expectation over states weighted by the discounted visitation
    distribution and actions by the policy; block-diagonal across states
    because a log-probability only depends on its own state's row.
    """
    theta = _check_logits(mdp, theta)
    probs = _softmax_probs(theta)
    d = discounted_distribution(mdp, Policy(probs))
    n = mdp.n_states * mdp.n_actions
    fisher = np.zeros((n, n))
    a = mdp.n_actions
    for s in range(mdp.n_states):
        p = probs[s]
        block = d[s] * (np.diag(p) - np.outer(p, p))
        fisher[s * a : (s + 1) * a, s * a : (s + 1) * a] = block
    return fisher


def natural_policy_gradient(
    mdp: Mdp, theta: np.ndarray, damping: float = 1e-6
) -> np.ndarray:
    """Damped natural gradient: solve (F + damping*I) g = grad J."""
    if damping <= 0:
        raise ValueError("damping must be positive")
    grad = policy_gradient(mdp, theta)
    fisher = fisher_information(mdp, theta)
    n = fisher.shape[0]
    flat = np.linalg.solve(fisher + damping * np.eye(n), grad.reshape(-1))
    return flat.reshape(mdp.n_states, mdp.n_actions)


def run_npg(
    mdp: Mdp,
    init,
    eta: float,
    iterations: int,
    damping: float = 1e-6,
    seed=0,
) -> Trajectory:
    """Natural-gradient ascent from the resolved init, recording values."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    theta = _logits_of(_resolve_start(mdp, init, seed))
    v = value_function(mdp, softmax_policy(theta))
    points = [v]
    meta = [{"iteration": 0, "step_norm": 0.0, "grad_norm": 0.0}]
    for k in range(1, iterations + 1):
        direction = natural_policy_gradient(mdp, theta, damping)
        theta = theta + eta * direction
        v_next = value_function(mdp, softmax_policy(theta))
        meta.append(
            {
                "iteration": k,
                "step_norm": float(np.max(np.abs(v_next - v))),
                "grad_norm": float(np.max(np.abs(direction))),
            }
        )
        points.append(v_next)
        v = v_next
    return Trajectory(points=np.stack(points), meta=meta)


# ---------------------------------------------------------------------------
# Cross-entropy method
# ---------------------------------------------------------------------------


def _uniform_start_score(mdp: Mdp, values: np.ndarray) -> np.ndarray:
    return values.mean(axis=1)


def _cov_sqrt(cov: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(cov)
    return u * np.sqrt(np.clip(w, 0.0, None))


def run_cem(mdp: Mdp, init_mean: np.ndarray, config: CemConfig) -> Trajectory:
    """Gaussian population search over flattened logits.

    Each iteration samples `population` parameter vectors, scores them by the
    uniform-start value of their softmax policy, refits mean and full
    maximum-likelihood covariance on the top `elites`, then adds
    noise_scale * I to the covariance. Per-member rng streams are derived
    from (seed, iteration, member), so results do not depend on how the
    population is batched.
    """
    theta0 = _check_logits(mdp, init_mean)
    dim = mdp.n_states * mdp.n_actions
    mean = theta0.reshape(-1).copy()
    cov = config.init_cov_scale * np.eye(dim)
    shape = (mdp.n_states, mdp.n_actions)

    def mean_value(m: np.ndarray) -> np.ndarray:
        return value_function(mdp, softmax_policy(m.reshape(shape)))

    v = mean_value(mean)
    points = [v]
    meta = [
        {
            "iteration": 0,
            "step_norm": 0.0,
            "cov_trace": float(np.trace(cov)),
            "best_score": float(v.mean()),
        }
    ]
    for k in range(1, config.iterations + 1):
        root = _cov_sqrt(cov)
        z = np.stack(
            [
                np.random.default_rng((config.seed, k, j)).standard_normal(dim)
                for j in range(config.population)
            ]
        )
        samples = mean[None, :] + z @ root.T
        logits = samples.reshape(config.population, *shape)
        policies = np.exp(logits - logits.max(axis=2, keepdims=True))
        policies /= policies.sum(axis=2, keepdims=True)
        scores = _uniform_start_score(mdp, value_function_batch(mdp, policies))
        elite_idx = np.argsort(-scores, kind="stable")[: config.elites]
        elites = samples[elite_idx]
        new_mean = elites.mean(axis=0)
        centered = elites - new_mean[None, :]
        cov = centered.T @ centered / config.elites
        if config.noise_scale > 0.0:
            cov = cov + config.noise_scale * np.eye(dim)
        mean = new_mean
        v_next = mean_value(mean)
        meta.append(
            {
                "iteration": k,
                "step_norm": float(np.max(np.abs(v_next - v))),
                "cov_trace": float(np.trace(cov)),
                "best_score": float(scores[elite_idx[0]]),
            }
        )
        points.append(v_next)
        v = v_next
    return Trajectory(points=np.stack(points), meta=meta)
