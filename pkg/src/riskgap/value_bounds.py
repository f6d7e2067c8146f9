"""Exact risk-averse value functions and certified bounds between models.

Everything here is oracle-grade: return distributions are enumerated, so
Q/V values are exact and the model-gap bounds can be checked against the
truth.  Two bound families are exposed — the uniform one driven by the
scalar gap epsilon, and the tighter one that dominates the simplified
return CDF by the cumulative gap function g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envelopes import (
    PointwiseEnvelope,
    SupportBounds,
    UniformEnvelope,
    dominated_cdf,
    lower_case_tag,
    uniform_lower,
    uniform_upper,
    upper_case_tag,
)
from .pomdp import (
    DEFAULT_LEAF_BUDGET,
    Belief,
    Policy,
    SimplifiedPair,
    enumerate_return_distribution,
    enumerate_trajectory_expectations,
)
from .risk import ConfidenceLevel, DiscreteDistribution, cvar_exact


@dataclass(frozen=True)
class ValueQuery:
    """A point value to evaluate: V when action is None, else Q."""

    belief: Belief
    alpha: ConfidenceLevel
    action: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.alpha, ConfidenceLevel):
            object.__setattr__(self, "alpha", ConfidenceLevel(float(self.alpha)))


@dataclass(frozen=True)
class BoundReport:
    q_true: float
    q_simplified: float
    lower_uniform: float
    upper_uniform: float
    lower_tight: float
    epsilon: float
    case_tags: dict


def _return_support(pair) -> SupportBounds:
    # the horizon return is a sum of T-k+1 belief costs, each in [-r_max, r_max]
    m = pair.original
    span = m.r_max * (m.horizon_T - m.start_k + 1)
    return SupportBounds(-span, span)


def q_exact(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
            model: str = "original",
            leaf_budget: int = DEFAULT_LEAF_BUDGET) -> float:
    """CVaR of the exact return distribution under the chosen model."""
    dist = enumerate_return_distribution(
        pair, policy, b_k=query.belief, model=model,
        first_action=query.action, leaf_budget=leaf_budget)
    return cvar_exact(dist, query.alpha)


def q_bounds_uniform(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
                     support: str = "worst_case",
                     epsilon_override: float | None = None,
                     leaf_budget: int = DEFAULT_LEAF_BUDGET,
                     ) -> tuple[float, float, float]:
    """(lower, upper, epsilon): scalar-gap sandwich around the true CVaR.

    ``support`` picks the return-range constant: "worst_case" uses
    +-r_max*(T-k+1); "enumerated" tightens it to the union of the two
    enumerated supports (diagnostic only).
    """
    dist_s = enumerate_return_distribution(
        pair, policy, b_k=query.belief, model="simplified",
        first_action=query.action, leaf_budget=leaf_budget)
    traj = enumerate_trajectory_expectations(
        pair, policy, b_k=query.belief, first_action=query.action,
        leaf_budget=leaf_budget)
    eps = traj.epsilon if epsilon_override is None else float(epsilon_override)
    if support == "worst_case":
        bounds = _return_support(pair)
    elif support == "enumerated":
        dist = enumerate_return_distribution(
            pair, policy, b_k=query.belief, model="original",
            first_action=query.action, leaf_budget=leaf_budget)
        bounds = SupportBounds(min(dist.inf_support, dist_s.inf_support),
                               max(dist.sup_support, dist_s.sup_support))
    else:
        raise ValueError(
            f"support must be 'worst_case' or 'enumerated', got {support!r}")
    env = UniformEnvelope(eps)
    lo = uniform_lower(dist_s, query.alpha, env, bounds)
    hi = uniform_upper(dist_s, query.alpha, env, bounds)
    return lo, hi, eps


def _conservative_grid_envelope(traj, grid_l) -> PointwiseEnvelope:
    """Step envelope >= g everywhere, built from grid evaluations.

    On [grid_j, grid_{j+1}) the exact g is bounded by its value at the
    right endpoint; past the last point by epsilon.  Mass the grid cannot
    locate (below grid_0 or inside an interval) is placed at or below its
    true position — never above — so the dominated law stays
    stochastically smaller and the bound direction survives coarseness.
    """
    grid = np.unique(np.asarray(grid_l, dtype=float))
    if grid.size == 0:
        raise ValueError("grid_l must contain at least one point")
    g_on_grid = traj.g_at(grid)
    first_jump = traj.thresholds[0] if traj.thresholds.size else grid[0]
    anchor = min(grid[0], first_jump) - 1.0
    breakpoints = np.concatenate(([anchor], grid))
    # epsilon and the last cumulative jump agree up to summation order
    tail = max(traj.epsilon, float(g_on_grid[-1]))
    values = np.concatenate((g_on_grid, [tail]))
    return PointwiseEnvelope(breakpoints, values)


def q_lower_tight(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
                  grid_l=None,
                  leaf_budget: int = DEFAULT_LEAF_BUDGET) -> float:
    """Lower bound from the gap-dominated simplified CDF min(1, F_s + g).

    With grid_l=None the exact step function g is used, which makes the
    bound as tight as the theory allows; an explicit grid evaluates g
    conservatively (never below the true g).
    """
    dist_s = enumerate_return_distribution(
        pair, policy, b_k=query.belief, model="simplified",
        first_action=query.action, leaf_budget=leaf_budget)
    traj = enumerate_trajectory_expectations(
        pair, policy, b_k=query.belief, first_action=query.action,
        leaf_budget=leaf_budget)
    if grid_l is None:
        env = traj.envelope()
    else:
        env = _conservative_grid_envelope(traj, grid_l)
    dominated = dominated_cdf(dist_s, env)
    return cvar_exact(dominated, query.alpha)


def default_grid(dist_s: DiscreteDistribution,
                 dist: DiscreteDistribution | None = None) -> np.ndarray:
    """Atoms of the given return distributions plus midpoints."""
    atoms = dist_s.values if dist is None else np.concatenate(
        (dist_s.values, dist.values))
    atoms = np.unique(atoms)
    if atoms.size < 2:
        return atoms
    return np.unique(np.concatenate((atoms, (atoms[:-1] + atoms[1:]) / 2.0)))


def bound_report(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
                 grid_l=None,
                 leaf_budget: int = DEFAULT_LEAF_BUDGET) -> BoundReport:
    """All exact values and bounds for one query, sharing the enumerations."""
    dist = enumerate_return_distribution(
        pair, policy, b_k=query.belief, model="original",
        first_action=query.action, leaf_budget=leaf_budget)
    dist_s = enumerate_return_distribution(
        pair, policy, b_k=query.belief, model="simplified",
        first_action=query.action, leaf_budget=leaf_budget)
    traj = enumerate_trajectory_expectations(
        pair, policy, b_k=query.belief, first_action=query.action,
        leaf_budget=leaf_budget)
    alpha = query.alpha
    bounds = _return_support(pair)
    env = UniformEnvelope(traj.epsilon)
    lo = uniform_lower(dist_s, alpha, env, bounds)
    hi = uniform_upper(dist_s, alpha, env, bounds)
    gap_env = traj.envelope() if grid_l is None else _conservative_grid_envelope(
        traj, grid_l)
    tight = cvar_exact(dominated_cdf(dist_s, gap_env), alpha)
    return BoundReport(
        q_true=cvar_exact(dist, alpha),
        q_simplified=cvar_exact(dist_s, alpha),
        lower_uniform=lo,
        upper_uniform=hi,
        lower_tight=tight,
        epsilon=traj.epsilon,
        case_tags={"upper": upper_case_tag(alpha, env),
                   "lower": lower_case_tag(alpha, env)},
    )
