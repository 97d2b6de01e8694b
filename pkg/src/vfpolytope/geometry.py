"""Geometric structure of the set of attainable value functions.

Policies that agree everywhere except one state map to a monotone line
segment in value space, bracketed by one-hot choices at the free state;
fixing k states confines the image to an affine slice spanned by the
resolvent columns of the free states; and the whole image sits inside the
convex hull of the deterministic-policy values. The operations here
construct those objects exactly and support sampling-based checks of each
property.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionUnsupported,
    MuOutOfRange,
    NotAgreeing,
    OrderViolation,
    ShapeMismatch,
)
from .evaluation import induce, value_function, value_function_batch
from .mdp import ENUMERATION_CAP, Mdp, Policy, deterministic_policies

INCOMPARABLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AgreementSet:
    """A base policy together with the states on which others must agree."""

    base: Policy
    fixed_states: tuple[int, ...]

    def __post_init__(self) -> None:
        states = tuple(int(s) for s in self.fixed_states)
        if len(set(states)) != len(states):
            raise ValueError("fixed_states contains duplicates")
        if any(s < 0 or s >= self.base.n_states for s in states):
            raise ValueError("fixed_states out of range")
        object.__setattr__(self, "fixed_states", states)

    @property
    def free_states(self) -> tuple[int, ...]:
        fixed = set(self.fixed_states)
        return tuple(s for s in range(self.base.n_states) if s not in fixed)


@dataclass(frozen=True, eq=False)
class AffineSlice:
    """Affine space anchor + span(basis) containing an agreement class's values.

    basis has shape (|S|, m) with one column per free state; columns are the
    free-state resolvent columns of the base policy and are always linearly
    independent (they come from an invertible matrix).
    """

    anchor: np.ndarray
    basis: np.ndarray

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=float)
        if basis.size:
            norms = np.linalg.norm(basis, axis=0)
            if np.any(norms == 0) or np.linalg.svd(basis / norms, compute_uv=False)[-1] <= 1e-10:
                raise ValueError("slice basis is numerically rank-deficient")

    @property
    def dimension(self) -> int:
        return self.basis.shape[1] if self.basis.size else 0

    def projection_residual(self, point: np.ndarray) -> float:
        """Max-norm distance from a point to this affine space."""
        delta = np.asarray(point, dtype=float) - self.anchor
        if self.dimension == 0:
            return float(np.max(np.abs(delta))) if delta.size else 0.0
        coeffs, *_ = np.linalg.lstsq(self.basis, delta, rcond=None)
        return float(np.max(np.abs(delta - self.basis @ coeffs)))


@dataclass(frozen=True, eq=False)
class LineSegment:
    """Bracketing pair for policies that agree everywhere but one state.

    pi_low and pi_high are one-hot at `state`, agree with each other (and
    the generating policy) elsewhere, and satisfy v_low <= v_high
    elementwise.
    """

    pi_low: Policy
    pi_high: Policy
    v_low: np.ndarray
    v_high: np.ndarray
    state: int

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.v_high - self.v_low))


@dataclass(frozen=True, eq=False)
class InterpolationCurve:
    """The reparametrization mu -> rho(mu) along a single-state mixture.

    For policies p0, p1 agreeing off one state, the value of the mixture
    mu*p1 + (1-mu)*p0 equals v0 + rho(mu) * (v1 - v0) with

        rho(mu) = mu + gamma*mu*(1-mu) / (1 - omega*gamma*(1-mu)) * (beta/alpha)

    where, writing D = P_p0 - P_p1 (rank one, supported on the free state's
    row) and R for the resolvent of p1:
        omega = D[s, :] @ R[:, s],
        beta  = D[s, :] @ (v0 - v1),
        alpha = the coefficient with v0 - v1 = alpha * R[:, s].
    When v0 == v1 the whole mixture is constant and the curve is flagged.
    """

    mus: np.ndarray
    rhos: np.ndarray
    alpha: float
    beta: float
    omega: float
    constant: bool

    @property
    def rho_samples(self) -> list[tuple[float, float]]:
        return [(float(m), float(r)) for m, r in zip(self.mus, self.rhos)]


def mix_policies(p0: Policy, p1: Policy, mu: float) -> Policy:
    """Rowwise convex combination mu*p1 + (1-mu)*p0."""
    if not 0.0 <= mu <= 1.0:
        raise MuOutOfRange(f"mu must lie in [0, 1], got {mu!r}")
    if p0.probs.shape != p1.probs.shape:
        raise ShapeMismatch("policies have different shapes")
    return Policy(mu * p1.probs + (1.0 - mu) * p0.probs)


def _one_hot_variants(policy: Policy, state: int) -> list[Policy]:
    eye = np.eye(policy.n_actions)
    return [policy.with_row(state, eye[a]) for a in range(policy.n_actions)]


def line_segment(mdp: Mdp, policy: Policy, state: int) -> LineSegment:
    """Bracket the values of all policies agreeing with `policy` off `state`.

    Evaluates every one-hot replacement of the row at `state` and returns the
    elementwise-minimal and -maximal ones. Raises OrderViolation if two
    variants are elementwise incomparable beyond tolerance, which the
    single-state structure rules out up to float noise.
    """
    if not 0 <= state < mdp.n_states:
        raise ShapeMismatch(f"state {state} out of range for |S|={mdp.n_states}")
    variants = _one_hot_variants(policy, state)
    values = value_function_batch(mdp, np.stack([p.probs for p in variants]))
    for i in range(len(variants)):
        for j in range(i + 1, len(variants)):
            d = values[i] - values[j]
            if np.any(d > INCOMPARABLE_TOL) and np.any(d < -INCOMPARABLE_TOL):
                raise OrderViolation(
                    f"one-hot variants {i} and {j} at state {state} are "
                    f"elementwise incomparable (max gap {np.max(np.abs(d)):.3e})"
                )
    totals = values.sum(axis=1)
    low = int(np.argmin(totals))
    high = int(np.argmax(totals))
    return LineSegment(
        pi_low=variants[low],
        pi_high=variants[high],
        v_low=values[low],
        v_high=values[high],
        state=state,
    )


def _single_disagreement_state(p0: Policy, p1: Policy, state: int) -> None:
    if p0.probs.shape != p1.probs.shape:
        raise ShapeMismatch("policies have different shapes")
    for s in range(p0.n_states):
        if s != state and not np.array_equal(p0.probs[s], p1.probs[s]):
            raise NotAgreeing(
                f"policies must agree everywhere except state {state}; "
                f"they differ at state {s}"
            )


def interpolation_curve(
    mdp: Mdp, p0: Policy, p1: Policy, state: int, grid_size: int = 101
) -> InterpolationCurve:
    """Closed-form rho(mu) for the mixture path from p0 to p1 at one state."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    _single_disagreement_state(p0, p1, state)
    v0 = value_function(mdp, p0)
    v1 = value_function(mdp, p1)
    mus = np.linspace(0.0, 1.0, grid_size)
    if np.max(np.abs(v0 - v1)) < 1e-12:
        return InterpolationCurve(
            mus=mus,
            rhos=np.zeros(grid_size),
            alpha=0.0,
            beta=0.0,
            omega=0.0,
            constant=True,
        )
    chain1 = induce(mdp, p1)
    p_pi0 = np.einsum("sa,sat->st", p0.probs, mdp.transition_tensor)
    d_row = p_pi0[state] - chain1.p_pi[state]
    column = chain1.resolvent[:, state]
    omega = float(d_row @ column)
    beta = float(d_row @ (v0 - v1))
    # alpha from the best-conditioned component of the resolvent column.
    pivot = int(np.argmax(np.abs(column)))
    alpha = float((v0 - v1)[pivot] / column[pivot])
    gamma = mdp.gamma
    rhos = mus + (gamma * mus * (1.0 - mus)) / (
        1.0 - omega * gamma * (1.0 - mus)
    ) * (beta / alpha)
    return InterpolationCurve(
        mus=mus, rhos=rhos, alpha=alpha, beta=beta, omega=omega, constant=False
    )


def affine_slice(mdp: Mdp, agreement: AgreementSet) -> AffineSlice:
    """Slice containing the values of all policies in the agreement class."""
    chain = induce(mdp, agreement.base)
    free = list(agreement.free_states)
    return AffineSlice(
        anchor=chain.resolvent @ chain.r_pi,
        basis=chain.resolvent[:, free] if free else np.zeros((mdp.n_states, 0)),
    )


def _seed_key(seed) -> tuple[int, ...]:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def _policy_rng(seed, index: int) -> np.random.Generator:
    # Per-index streams keep sampling independent of any batching/worker split.
    return np.random.default_rng(_seed_key(seed) + (int(index),))


def sample_policy_probs(mdp: Mdp, n: int, seed) -> np.ndarray:
    """(n, |S|, |A|) stack of flat-Dirichlet policies, one rng stream per index."""
    ones = np.ones(mdp.n_actions)
    out = np.empty((n, mdp.n_states, mdp.n_actions))
    for i in range(n):
        out[i] = _policy_rng(seed, i).dirichlet(ones, size=mdp.n_states)
    return out


def sample_values(
    mdp: Mdp, n: int, seed, agreement: AgreementSet | None = None
) -> np.ndarray:
    """Values of n random policies, optionally constrained to an agreement class.

    Rows at the agreement's fixed states are overwritten by the base policy
    before evaluation. Returns an (n, |S|) array, deterministic per seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    probs = sample_policy_probs(mdp, n, seed)
    if agreement is not None:
        for s in agreement.fixed_states:
            probs[:, s, :] = agreement.base.probs[s]
    return value_function_batch(mdp, probs)


def polytope_vertices_det(
    mdp: Mdp, cap: int = ENUMERATION_CAP
) -> list[tuple[Policy, np.ndarray]]:
    """Every deterministic policy with its exact value, in lexicographic order."""
    policies = deterministic_policies(mdp, cap=cap)
    values = value_function_batch(mdp, np.stack([p.probs for p in policies]))
    return list(zip(policies, values))


def boundary_semidet_sample(
    mdp: Mdp, free_state: int, action: int, n: int, seed
) -> np.ndarray:
    """Values of n policies pinned to one action at one state, random elsewhere.

    The pinned state takes `action` with probability one; every other row is
    flat-Dirichlet. These families cover the boundary of the attainable set.
    """
    if not 0 <= free_state < mdp.n_states:
        raise ShapeMismatch(f"state {free_state} out of range")
    if not 0 <= action < mdp.n_actions:
        raise ShapeMismatch(f"action {action} out of range")
    probs = sample_policy_probs(mdp, n, seed)
    one_hot = np.zeros(mdp.n_actions)
    one_hot[action] = 1.0
    probs[:, free_state, :] = one_hot
    return value_function_batch(mdp, probs)


def path_between(mdp: Mdp, p_from: Policy, p_to: Policy) -> list[Policy]:
    """Policy path switching one state's row at a time, in state order.

    Consecutive policies differ at exactly one state, so each consecutive
    image is a line segment in value space. Length is at most |S| + 1.
    """
    if p_from.probs.shape != p_to.probs.shape:
        raise ShapeMismatch("policies have different shapes")
    path = [p_from]
    current = p_from
    for s in range(p_from.n_states):
        if not np.array_equal(current.probs[s], p_to.probs[s]):
            current = current.with_row(s, p_to.probs[s])
            path.append(current)
    return path


def slice_rank(values: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Numerical rank of the span of {v_i - v_0} over a set of value vectors."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < 2:
        raise ValueError("need at least two points")
    diffs = values[1:] - values[0]
    svals = np.linalg.svd(diffs, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > rel_tol * svals[0]))


# ---------------------------------------------------------------------------
# Planar hull helpers (2-state MDPs)
# ---------------------------------------------------------------------------


def _as_points_2d(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DimensionUnsupported(
            f"expected an (n, 2) point array, got shape {pts.shape}"
        )
    if pts.shape[0] < 1:
        raise DimensionUnsupported("need at least one point")
    return pts


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_2d(points) -> np.ndarray:
    """Counterclockwise convex hull of planar points (monotone chain).

    Collinear points interior to an edge are dropped; duplicate points are
    collapsed; the starting vertex is the lexicographic minimum.
    """
    pts = _as_points_2d(points)
    uniq = np.unique(pts, axis=0)  # lexicographic sort, exact duplicates out
    if uniq.shape[0] == 1:
        return uniq
    lower: list[np.ndarray] = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in uniq[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def point_in_hull(point, hull, tol: float = 1e-9) -> bool:
    """Whether a point is inside the hull or within tol of its boundary.

    The hull must be in counterclockwise order as produced by hull_2d;
    degenerate hulls (single point, segment) are handled by distance.
    """
    hull = _as_points_2d(hull)
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.shape != (2,):
        raise DimensionUnsupported("point must have exactly 2 components")
    if hull.shape[0] == 1:
        return bool(np.linalg.norm(p - hull[0]) <= tol)
    if hull.shape[0] == 2:
        return _segment_distance(p, hull[0], hull[1]) <= tol
    for i in range(hull.shape[0]):
        a = hull[i]
        b = hull[(i + 1) % hull.shape[0]]
        edge_len = float(np.linalg.norm(b - a))
        if edge_len == 0.0:
            continue
        if _cross(a, b, p) < -tol * edge_len:
            return False
    return True


def points_in_hull(points, hull, tol: float = 1e-9) -> np.ndarray:
    """Vectorized point_in_hull for an (n, 2) array; returns a boolean mask."""
    pts = _as_points_2d(points)
    hull = _as_points_2d(hull)
    if hull.shape[0] < 3:
        return np.array([point_in_hull(p, hull, tol) for p in pts])
    inside = np.ones(pts.shape[0], dtype=bool)
    for i in range(hull.shape[0]):
        a = hull[i]
        b = hull[(i + 1) % hull.shape[0]]
        edge = b - a
        edge_len = float(np.linalg.norm(edge))
        if edge_len == 0.0:
            continue
        cross = edge[0] * (pts[:, 1] - a[1]) - edge[1] * (pts[:, 0] - a[0])
        inside &= cross >= -tol * edge_len
    return inside


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = np.clip(float((p - a) @ ab) / denom, 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from each row of points to the segment [a, b]."""
    pts = np.asarray(points, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip((pts - a) @ ab / denom, 0.0, 1.0)
    return np.linalg.norm(pts - (a + t[:, None] * ab), axis=1)
