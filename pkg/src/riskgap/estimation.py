"""Monte-Carlo estimation: particle-filter rollouts, importance-sampled
gap estimators, sample-size formulas, and certified value bounds.

Randomness contract: every operation takes either an explicit generator or
a RolloutConfig seed. Seeded entry points derive one independent PCG64
stream per logical task (rollout index, draw batch) via SeedSequence spawn
keys, so outputs are byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .envelopes import PointwiseEnvelope
from .pomdp import (
    DEFAULT_LEAF_BUDGET,
    PROB_FLOOR,
    Belief,
    BudgetExceededError,
    Policy,
    SimplifiedPair,
    _first_action,
    belief_cost,
    belief_mdp_step,
    tv_distance,
)
from .risk import DiscreteDistribution, cvar_estimate_sorted
from .value_bounds import ValueQuery

# spawn-key stream kinds; one namespace per source of randomness
_INIT, _ROLLOUT, _EPS, _GDRAW, _GINV = range(5)

_KEY_DECIMALS = 12  # merging resolution for (belief, prefix) support atoms


class DegenerateWeightsError(RuntimeError):
    """All particle weights underflowed after an observation reweight."""


class UnsupportedBeliefError(ValueError):
    """A belief with positive target probability has no proposal mass."""


class InapplicableCaseError(RuntimeError):
    """The estimated gap landed in a regime the certified bound does not cover."""


def _stream(seed: int, kind: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(kind, index)))


# ---------------------------------------------------------------------- types


@dataclass(frozen=True)
class RolloutConfig:
    num_rollouts_C: int
    num_particles_Nx: int
    rng_seed: int

    def __post_init__(self) -> None:
        if int(self.num_rollouts_C) < 1 or int(self.num_particles_Nx) < 1:
            raise ValueError("rollout and particle counts must be >= 1")
        if int(self.rng_seed) < 0:
            raise ValueError("rng_seed must be a non-negative integer")
        object.__setattr__(self, "num_rollouts_C", int(self.num_rollouts_C))
        object.__setattr__(self, "num_particles_Nx", int(self.num_particles_Nx))
        object.__setattr__(self, "rng_seed", int(self.rng_seed))


@dataclass(frozen=True)
class ParticleBelief:
    """Weighted particle set {(state_i, w_i)}; at least one positive weight."""

    states: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.states, dtype=np.int64)
        w = np.asarray(self.weights, dtype=float)
        if s.ndim != 1 or s.shape != w.shape or s.size == 0:
            raise ValueError("states and weights must be aligned non-empty vectors")
        if np.any(s < 0):
            raise ValueError("state indices must be >= 0")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and >= 0")
        if w.max() <= 0.0:
            raise ValueError("at least one particle weight must be positive")
        s.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_belief(cls, belief: Belief, n_particles: int,
                    rng: np.random.Generator) -> "ParticleBelief":
        """n_particles states sampled iid from the belief, unit weights."""
        cum = np.cumsum(belief.probs)
        states = np.searchsorted(cum, rng.random(int(n_particles)), side="left")
        states = np.minimum(states, belief.probs.size - 1)
        return cls(states, np.ones(int(n_particles)))

    def as_belief(self, n_states: int) -> Belief:
        probs = np.bincount(self.states, weights=self.weights, minlength=n_states)
        return Belief(probs / probs.sum())


@dataclass(frozen=True)
class ProposalQ0:
    """Finite proposal over (successor belief, prefix return) support atoms.

    ``target_probs[e, j]`` is the exact simplified-model probability of atom
    e at interior step ``first_step + j``; prefixes include the step's own
    belief cost. ``c0`` is the step-k belief cost of the queried action, used
    by the event thresholds in estimate_g.
    """

    beliefs: tuple
    prefix_returns: np.ndarray
    proposal_probs: np.ndarray
    target_probs: np.ndarray
    first_step: int
    c0: float

    def __post_init__(self) -> None:
        pref = np.asarray(self.prefix_returns, dtype=float)
        prop = np.asarray(self.proposal_probs, dtype=float)
        targ = np.asarray(self.target_probs, dtype=float)
        n = len(self.beliefs)
        if n == 0:
            raise ValueError("proposal support must be non-empty")
        if pref.shape != (n,) or prop.shape != (n,):
            raise ValueError("prefix_returns and proposal_probs must have one entry per atom")
        if targ.ndim != 2 or targ.shape[0] != n or targ.shape[1] < 1:
            raise ValueError("target_probs must be (n_atoms, n_steps) with n_steps >= 1")
        if np.any(targ < 0.0) or not np.all(np.isfinite(targ)):
            raise ValueError("target probabilities must be finite and >= 0")
        if np.any(prop <= 0.0):
            raise UnsupportedBeliefError("every support atom needs positive proposal mass")
        if abs(prop.sum() - 1.0) > 1e-9:
            raise ValueError("proposal probabilities must sum to 1")
        for arr in (pref, prop, targ):
            arr.flags.writeable = False
        object.__setattr__(self, "beliefs", tuple(self.beliefs))
        object.__setattr__(self, "prefix_returns", pref)
        object.__setattr__(self, "proposal_probs", prop)
        object.__setattr__(self, "target_probs", targ)
        object.__setattr__(self, "first_step", int(self.first_step))
        object.__setattr__(self, "c0", float(self.c0))

    @property
    def n_steps(self) -> int:
        return self.target_probs.shape[1]

    @property
    def importance_bound(self) -> float:
        """B = max over steps and atoms of target / proposal (always >= 1)."""
        return float((self.target_probs / self.proposal_probs[:, None]).max())


@dataclass(frozen=True)
class BinGrid:
    """Strictly increasing bin edges k_0 < ... < k_I for the return axis."""

    edges: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.edges, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise ValueError("need at least two bin edges")
        if not np.all(np.isfinite(e)) or np.any(np.diff(e) <= 0.0):
            raise ValueError("bin edges must be finite and strictly increasing")
        e.flags.writeable = False
        object.__setattr__(self, "edges", e)

    @property
    def n_bins(self) -> int:
        return self.edges.size - 1

    @classmethod
    def uniform(cls, pair: SimplifiedPair, n_bins: int) -> "BinGrid":
        span = _return_span(pair)
        return cls(np.linspace(-span, span, int(n_bins) + 1))

    def covers_return_range(self, pair: SimplifiedPair) -> bool:
        span = _return_span(pair)
        return self.edges[0] <= -span + 1e-9 and self.edges[-1] >= span - 1e-9


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant evaluator: values[i] on (breakpoints[i], breakpoints[i+1]],
    clamped to the end values outside the breakpoint range."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or bp.shape != vals.shape or bp.size == 0:
            raise ValueError("breakpoints and values must be aligned non-empty vectors")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def at(self, x) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.breakpoints, xs, side="left")
        return self.values[np.clip(idx - 1, 0, self.values.size - 1)]


@dataclass(frozen=True)
class CertifiedBound:
    """One certified bound value with the deviation radii that back it.

    ``v`` is the gap-accuracy parameter for the uniform kinds and the derived
    deviation radius for TightLower; ``radii`` holds the named radius terms.
    The certify_* constructors enforce that n_delta_used meets the matching
    sample-size requirement before building the bound.
    """

    value: float
    kind: str
    delta: float
    v: float
    eta: float
    n_delta_used: int
    c_used: int
    radii: dict

    def __post_init__(self) -> None:
        if self.kind not in ("L1", "L2", "U", "TightLower"):
            raise ValueError(f"unknown bound kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise ValueError("bound value must be finite")


def _return_span(pair: SimplifiedPair) -> float:
    m = pair.original
    return m.r_max * (m.horizon_T - m.start_k + 1)


# ------------------------------------------------------------------- rollouts


class _RolloutKernel:
    """Shared mechanics for genpf steps over one (pair, model) tensor set."""

    def __init__(self, pair: SimplifiedPair, model: str):
        trans, obs = pair.tensors(model)
        self.cum_trans = np.cumsum(trans, axis=2)
        self.obs = obs
        self.cum_obs = np.cumsum(obs, axis=1)
        self.costs = pair.original.state_cost
        self.n_states = trans.shape[1]

    def step(self, states, weights, a: int, rng: np.random.Generator):
        """One particle-filter transition; returns (successors, new weights, rho).

        Draw order is fixed (reference state, its successor, the observation,
        then the per-particle vector) so results are reproducible.
        """
        cum_w = np.cumsum(weights)
        total = cum_w[-1]
        j = min(int(np.searchsorted(cum_w, rng.random() * total, side="left")),
                states.size - 1)
        row = self.cum_trans[a, states[j]]
        x0p = min(int(np.searchsorted(row, rng.random(), side="left")), self.n_states - 1)
        z = min(int(np.searchsorted(self.cum_obs[x0p], rng.random(), side="left")),
                self.cum_obs.shape[1] - 1)
        u = rng.random(states.size)
        succ = (self.cum_trans[a][states] < u[:, None]).sum(axis=1)
        succ = np.minimum(succ, self.n_states - 1)
        # mean cost uses the *old* weights and the *current* states
        rho = float(weights @ self.costs[states, a] / total)
        new_w = weights * self.obs[succ, z]
        if new_w.sum() <= PROB_FLOOR:
            raise DegenerateWeightsError(
                "all particle weights underflowed on observation reweight"
            )
        return succ, new_w, rho

    def rollout(self, policy: Policy, states, weights, a: int, t: int,
                depth: int, rng: np.random.Generator) -> float:
        total = 0.0
        for step in range(depth):
            states, weights, rho = self.step(states, weights, a, rng)
            total += rho
            if step + 1 < depth:
                probs = np.bincount(states, weights=weights, minlength=self.n_states)
                a = policy.action(t + step + 1, Belief(probs / probs.sum()))
        return total


def genpf(pair: SimplifiedPair, b_bar: ParticleBelief, a: int, model: str,
          rng: np.random.Generator):
    """One generative particle-filter step: (new particle belief, mean cost)."""
    succ, new_w, rho = _RolloutKernel(pair, model).step(
        b_bar.states, b_bar.weights, a, rng)
    return ParticleBelief(succ, new_w), rho


def sample_return(pair: SimplifiedPair, policy: Policy, b_bar: ParticleBelief,
                  a: int, t: int, depth: int, model: str,
                  rng: np.random.Generator) -> float:
    """Sum of genpf mean costs over `depth` steps starting at time t; 0 at depth 0."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 0.0
    kernel = _RolloutKernel(pair, model)
    return kernel.rollout(policy, b_bar.states, b_bar.weights, a, t, depth, rng)


def rollout_returns(pair: SimplifiedPair, policy: Policy, b_bar: ParticleBelief,
                    a: int, t: int, depth: int, config: RolloutConfig,
                    model: str = "simplified", workers: int = 1) -> np.ndarray:
    """C independent rollout returns, one derived rng stream per rollout index."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    kernel = _RolloutKernel(pair, model)
    states, weights = b_bar.states, b_bar.weights

    def run(i: int) -> float:
        if depth == 0:
            return 0.0
        return kernel.rollout(policy, states, weights, a, t, depth,
                              _stream(config.rng_seed, _ROLLOUT, i))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(run, range(config.num_rollouts_C)))
    else:
        vals = [run(i) for i in range(config.num_rollouts_C)]
    return np.asarray(vals, dtype=float)


def estimate_q(pair: SimplifiedPair, policy: Policy, b_bar: ParticleBelief,
               a: int, t: int, depth: int, alpha, config: RolloutConfig,
               model: str = "simplified", workers: int = 1) -> float:
    """CVaR estimate over C rollout returns (sorted-form estimator)."""
    returns = rollout_returns(pair, policy, b_bar, a, t, depth, config, model, workers)
    return cvar_estimate_sorted(returns, alpha)


# ------------------------------------------------------- importance estimators


def build_default_proposal(pair: SimplifiedPair, policy: Policy,
                           b_k: Belief | None = None,
                           first_action=None,
                           leaf_budget: int = DEFAULT_LEAF_BUDGET) -> ProposalQ0:
    """Exact pooled proposal over reachable (belief, prefix-return) atoms.

    Enumerates the simplified model's interior steps k+1..T-1, merges atoms
    on rounded keys, and mixes 0.5 * (per-step marginal averaged over steps)
    with 0.5 * uniform over the pooled support, which keeps the importance
    ratio finite and exactly computable.
    """
    m = pair.original
    if b_k is None:
        b_k = Belief(m.initial_belief)
    n_steps = m.horizon_T - 1 - m.start_k
    if n_steps <= 0:
        raise ValueError("proposal needs at least one interior step (k+1 <= T-1)")
    a0 = _first_action(pair, policy, b_k, first_action)
    c0 = belief_cost(pair, b_k, a0)
    first_step = m.start_k + 1

    def key_of(b: Belief, r: float):
        return (tuple(np.round(b.probs, _KEY_DECIMALS)), round(r, _KEY_DECIMALS))

    pool: dict = {}       # key -> (belief, prefix)
    target: dict = {}     # key -> per-step probability row
    frontier: dict = {}   # key -> (belief, prefix, prob) at the current step
    for atom in belief_mdp_step(pair, b_k, a0, "simplified"):
        b = atom.successor
        r = belief_cost(pair, b, policy.action(first_step, b))
        k = key_of(b, r)
        prev = frontier.get(k)
        frontier[k] = (b, r, atom.probability + (prev[2] if prev else 0.0))

    expanded = 0
    for j in range(n_steps):
        t = first_step + j
        for k, (b, r, p) in frontier.items():
            if k not in pool:
                pool[k] = (b, r)
                target[k] = np.zeros(n_steps)
            target[k][j] += p
        if j + 1 == n_steps:
            break
        nxt: dict = {}
        for b, r, p in frontier.values():
            expanded += 1
            if expanded > leaf_budget:
                raise BudgetExceededError(
                    f"proposal enumeration exceeds {leaf_budget} nodes")
            a = policy.action(t, b)
            for atom in belief_mdp_step(pair, b, a, "simplified"):
                b2 = atom.successor
                r2 = r + belief_cost(pair, b2, policy.action(t + 1, b2))
                k2 = key_of(b2, r2)
                prev = nxt.get(k2)
                nxt[k2] = (b2, r2, p * atom.probability + (prev[2] if prev else 0.0))
        frontier = nxt

    keys = sorted(pool)
    beliefs = tuple(pool[k][0] for k in keys)
    prefixes = np.array([pool[k][1] for k in keys])
    targets = np.vstack([target[k] for k in keys])
    proposal = 0.5 * targets.mean(axis=1) + 0.5 / len(keys)
    return ProposalQ0(beliefs, prefixes, proposal, targets, first_step, c0)


def _delta_matrix(q0: ProposalQ0, pair: SimplifiedPair, policy: Policy,
                  delta_estimator) -> np.ndarray:
    """Gap values per (support atom, interior step) under the policy's action."""
    est = delta_estimator if delta_estimator is not None else (
        lambda b, a: tv_distance(pair, b, a))
    out = np.empty((len(q0.beliefs), q0.n_steps))
    for i, b in enumerate(q0.beliefs):
        for j in range(q0.n_steps):
            out[i, j] = est(b, policy.action(q0.first_step + j, b))
    return out


def _draw_counts(q0: ProposalQ0, n_delta: int, rng: np.random.Generator) -> np.ndarray:
    # N iid proposal draws realized as multinomial counts over the finite
    # support; every estimator here depends on the draw multiset only, so
    # this is distribution-identical to drawing one atom at a time.
    probs = q0.proposal_probs / q0.proposal_probs.sum()
    return rng.multinomial(int(n_delta), probs)


def estimate_epsilon(q0: ProposalQ0, pair: SimplifiedPair, policy: Policy,
                     n_delta: int, rng: np.random.Generator,
                     delta_estimator=None) -> float:
    """Importance-weighted estimate of the summed per-step expected gap.

    m_hat_i = (1/N) * sum_n [target_i(atom_n) / proposal(atom_n)] * gap(atom_n);
    returns sum_i m_hat_i. The default gap is the exact TV distance, which is
    unbiased; a Monte-Carlo plug-in callable(belief, action) is accepted but
    its accuracy is the caller's responsibility.
    """
    if n_delta < 1:
        raise ValueError("n_delta must be >= 1")
    counts = _draw_counts(q0, n_delta, rng)
    tv = _delta_matrix(q0, pair, policy, delta_estimator)
    ratio = q0.target_probs / q0.proposal_probs[:, None]
    m_hat = (counts[:, None] * ratio * tv).sum(axis=0) / float(n_delta)
    return float(m_hat.sum())


def estimate_g(q0: ProposalQ0, pair: SimplifiedPair, policy: Policy,
               n_delta: int, grid_l, rng: np.random.Generator,
               delta_estimator=None) -> np.ndarray:
    """Estimated CDF-gap curve on a grid of return levels.

    Each support atom carries its simulated prefix return, so the step-i
    indicator 1{prefix <= l - c0 + (T - i) * r_max} is evaluated exactly per
    draw; the result is right-continuous and saturates at the epsilon estimate.
    """
    if n_delta < 1:
        raise ValueError("n_delta must be >= 1")
    grid = np.atleast_1d(np.asarray(grid_l, dtype=float))
    counts = _draw_counts(q0, n_delta, rng)
    tv = _delta_matrix(q0, pair, policy, delta_estimator)
    ratio = q0.target_probs / q0.proposal_probs[:, None]
    contrib = (counts[:, None] * ratio * tv) / float(n_delta)

    m = pair.original
    t_axis = q0.first_step + np.arange(q0.n_steps)
    thresholds = q0.prefix_returns[:, None] + q0.c0 - (m.horizon_T - t_axis) * m.r_max
    order = np.argsort(thresholds, axis=None)
    cum = np.cumsum(contrib.ravel()[order])
    idx = np.searchsorted(thresholds.ravel()[order], grid, side="right")
    return np.concatenate(([0.0], cum))[idx]


# --------------------------------------------------------- sample-size formulas


def _check_rate_args(v: float, delta: float, B: float, gap: int) -> None:
    if v <= 0.0:
        raise ValueError("accuracy parameter must be > 0")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if B < 1.0:
        raise ValueError("importance bound B must be >= 1")
    if gap < 1:
        raise ValueError("horizon gap must be >= 1")


def n_delta_for_epsilon(v: float, delta: float, B: float, T: int, k: int) -> int:
    """Draws sufficient for |epsilon_hat - epsilon| <= 2v w.p. >= 1 - delta."""
    gap = T - 1 - k
    _check_rate_args(v, delta, B, gap)
    return math.ceil(-8.0 * B * B * math.log(delta / (4.0 * gap)) / (v / gap) ** 2)


def n_delta_for_g(v: float, delta: float, B: float, T: int, k: int) -> int:
    """Draws sufficient for one fixed level: |g_hat(l) - g(l)| <= v w.p. >= 1 - delta."""
    gap = T - 1 - k
    _check_rate_args(v, delta, B, gap)
    return math.ceil(-math.log((delta / gap) / 2.0) * 2.0 * B * B / (v / gap) ** 2)


def n_delta_for_h(v: float, delta: float, B: float, n_bins: int, T: int, k: int) -> int:
    """Draws sufficient for the binned envelopes to trap g uniformly within v."""
    gap = T - 1 - k
    _check_rate_args(v, delta, B, gap)
    if n_bins < 1:
        raise ValueError("need at least one bin")
    return math.ceil(
        -math.log(((delta / n_bins) / gap) / 2.0) * 2.0 * B * B / (v / gap) ** 2)


def n_delta_for_uniform_bounds(v: float, delta: float, B: float, T: int, k: int) -> int:
    """Precondition draw count for certify_uniform (note the T - k horizon term)."""
    gap = T - k
    _check_rate_args(v, delta, B, gap)
    return math.ceil(
        -8.0 * B * B * math.log((delta / 2.0) / (4.0 * gap)) / (v / gap) ** 2)


def n_delta_for_tight_lower(eta: float, delta: float, B: float, n_bins: int,
                            T: int, k: int) -> int:
    """Precondition draw count for certify_tight_lower (envelope rate at delta/4)."""
    return n_delta_for_h(eta, delta / 4.0, B, n_bins, T, k)


# ------------------------------------------------------------- binned envelopes


def binned_h(g_on_edges, grid: BinGrid):
    """Upper/lower step envelopes for g from its values on bin edges.

    h_plus takes the right-edge value on each bin, monotonized by running max
    (which can only raise it, preserving the upper-bound direction); h_minus
    takes the raw left-edge value.
    """
    g = np.asarray(g_on_edges, dtype=float)
    if g.shape != grid.edges.shape:
        raise ValueError("need exactly one g value per bin edge")
    if np.any(g < 0.0) or not np.all(np.isfinite(g)):
        raise ValueError("g values must be finite and >= 0")
    upper = np.maximum.accumulate(g)[1:]
    h_plus = PointwiseEnvelope(grid.edges[:-1], upper)
    h_minus = StepFunction(grid.edges, g)
    return h_plus, h_minus


# -------------------------------------------------------------- certified bounds


def _query_action(pair: SimplifiedPair, policy: Policy, query: ValueQuery) -> int:
    if query.action is not None:
        return int(query.action)
    return policy.action(pair.original.start_k, query.belief)


def _simplified_return_pool(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
                            config: RolloutConfig, workers: int) -> np.ndarray:
    m = pair.original
    b_bar = ParticleBelief.from_belief(
        query.belief, config.num_particles_Nx, _stream(config.rng_seed, _INIT, 0))
    a_k = _query_action(pair, policy, query)
    depth = m.horizon_T - m.start_k + 1
    return rollout_returns(pair, policy, b_bar, a_k, m.start_k, depth, config,
                           "simplified", workers)


def certify_uniform(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
                    config: RolloutConfig, q0: ProposalQ0, n_delta: int,
                    v: float, delta: float, workers: int = 1) -> list:
    """Certified lower and upper bounds from one pool of simplified rollouts.

    Emits L1 (small estimated gap) or L2 (gap too large for the shifted-tail
    form), plus U when alpha > epsilon_hat; each bound records its deviation
    radii. When alpha <= epsilon_hat the upper bound is omitted and the lower
    bound's radii carry a ``u_omitted`` tag.
    """
    m = pair.original
    T, k = m.horizon_T, m.start_k
    span = _return_span(pair)
    alpha = query.alpha.alpha
    required = n_delta_for_uniform_bounds(v, delta, q0.importance_bound, T, k)
    if n_delta < required:
        raise ValueError(
            f"n_delta {n_delta} is below the certified-rate requirement {required}")

    eps_hat = estimate_epsilon(q0, pair, policy, n_delta,
                               _stream(config.rng_seed, _EPS, 0))
    returns = _simplified_return_pool(pair, policy, query, config, workers)
    C = config.num_rollouts_C

    def q_hat(level: float) -> float:
        return cvar_estimate_sorted(returns, level)

    bounds = []
    if eps_hat + alpha < 1.0:
        second = 0.0
        if eps_hat > 0.0:
            shifted = eps_hat - 4.0 * v
            if not 0.0 < shifted < 1.0:
                raise InapplicableCaseError(
                    f"shifted tail level epsilon_hat - 4v = {shifted:.6g} "
                    "falls outside (0, 1); no certified lower bound applies")
            second = (eps_hat / alpha) * q_hat(shifted)
        value = ((alpha + eps_hat - 4.0 * v) / alpha) * q_hat(alpha + eps_hat) - second
        radii = {
            "epsilon_hat": eps_hat,
            # recorded verbatim; the first radius is negative as specified
            "lambda_1": -(2.0 * span / alpha) * math.sqrt(
                math.log(1.0 / (delta / 4.0)) / (2.0 * C)),
            "lambda_2": (math.sqrt(eps_hat) / alpha) * 2.0 * span * math.sqrt(
                5.0 * math.log(3.0 / (delta / 4.0)) / C),
        }
        lower = CertifiedBound(value, "L1", delta, v, 0.0, n_delta, C, radii)
    else:
        value = (float(returns.mean())
                 - (eps_hat + 4.0 * v) * q_hat(alpha)
                 - (alpha + eps_hat + 4.0 * v - 1.0) * span) / alpha
        radii = {
            "epsilon_hat": eps_hat,
            "eta_1": math.sqrt(-math.log(delta / 4.0) * span / (C * C * alpha * alpha)),
            "eta_2": (2.0 * math.sqrt(eps_hat + 4.0 * v) / alpha) * span * math.sqrt(
                5.0 * math.log(3.0 / (delta / 4.0)) / C),
        }
        lower = CertifiedBound(value, "L2", delta, v, 0.0, n_delta, C, radii)
    bounds.append(lower)

    if alpha > eps_hat:
        value = (((alpha - eps_hat + 4.0 * v) / alpha) * q_hat(alpha - eps_hat)
                 + (eps_hat / alpha) * span)
        radii = {
            "epsilon_hat": eps_hat,
            "lambda": 2.0 * span * (math.sqrt(alpha - eps_hat) / alpha) * math.sqrt(
                5.0 * math.log(3.0 / (delta / 2.0)) / C),
        }
        bounds.append(CertifiedBound(value, "U", delta, v, 0.0, n_delta, C, radii))
    else:
        lower.radii["u_omitted"] = 1.0
    return bounds


def lower_cdf_distribution(returns, h_plus: PointwiseEnvelope, eta: float,
                           edges) -> DiscreteDistribution:
    """Dominated step law min(1, empirical CDF + h_plus + eta) as a distribution.

    Breakpoints are the union of rollout returns and bin edges; the added mass
    lands at the first breakpoint at or above its true location, so the result
    is stochastically no larger than the law it dominates.
    """
    ret = np.sort(np.asarray(returns, dtype=float))
    pts = np.unique(np.concatenate((ret, np.asarray(edges, dtype=float))))
    ecdf = np.searchsorted(ret, pts, side="right") / ret.size
    cdf = np.minimum(1.0, ecdf + h_plus.at(pts) + eta)
    masses = np.diff(np.concatenate(([0.0], cdf)))
    return DiscreteDistribution(pts, masses)


def certify_tight_lower(pair: SimplifiedPair, policy: Policy, query: ValueQuery,
                        config: RolloutConfig, q0: ProposalQ0, n_delta: int,
                        eta: float, delta: float, grid: BinGrid,
                        workers: int = 1) -> CertifiedBound:
    """Certified lower bound via the estimated dominated CDF.

    Builds min(1, empirical simplified-return CDF + h_plus + eta), draws
    n_delta iid values from it by generalized inverse transform (ties resolve
    to the jump location), and returns their CVaR with the deviation radius
    recorded in ``v``.
    """
    m = pair.original
    T, k = m.horizon_T, m.start_k
    span = _return_span(pair)
    alpha = query.alpha.alpha
    if eta <= 0.0:
        raise ValueError("eta must be > 0")
    if not grid.covers_return_range(pair):
        raise ValueError("bin grid must span the full return range")
    required = n_delta_for_tight_lower(eta, delta, q0.importance_bound,
                                       grid.n_bins, T, k)
    if n_delta < required:
        raise ValueError(
            f"n_delta {n_delta} is below the certified-rate requirement {required}")

    g_hat = estimate_g(q0, pair, policy, n_delta, grid.edges,
                       _stream(config.rng_seed, _GDRAW, 0))
    h_plus, _ = binned_h(g_hat, grid)
    returns = _simplified_return_pool(pair, policy, query, config, workers)
    dist = lower_cdf_distribution(returns, h_plus, eta, grid.edges)

    u = _stream(config.rng_seed, _GINV, 0).random(int(n_delta))
    cum = np.cumsum(dist.probs)
    draws = dist.values[np.minimum(
        np.searchsorted(cum, u, side="left"), dist.values.size - 1)]
    value = cvar_estimate_sorted(draws, alpha)
    radius = (2.0 * span / alpha) * math.sqrt(
        math.log(1.0 / (delta / 4.0)) / (2.0 * n_delta))
    return CertifiedBound(value, "TightLower", delta, radius, eta,
                          int(n_delta), config.num_rollouts_C, {"v": radius})
