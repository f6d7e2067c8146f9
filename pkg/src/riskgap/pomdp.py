"""Finite tabular POMDPs paired with a simplified variant.

A model pair shares states, actions, observations, costs, horizon and
initial belief; only the transition/observation tensors differ.  Both
induce a belief-MDP whose transition kernel has one atom per observation,
so everything here — belief updates, successor-law TV distance, and the
full return distribution under a policy — is computed exactly by finite
enumeration.  These exact quantities are the ground truth the bound and
estimator modules are validated against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .envelopes import PointwiseEnvelope
from .risk import MERGE_TOL, DiscreteDistribution

ROW_TOL = 1e-12
ATOM_MATCH_TOL = 1e-9  # componentwise identification of successor beliefs
PROB_FLOOR = 1e-300
DEFAULT_LEAF_BUDGET = 10**7


class ImpossibleObservationError(ValueError):
    """Conditioning on an observation of probability (numerically) zero."""


class BudgetExceededError(RuntimeError):
    """Exact enumeration would expand more leaves than allowed."""


def _check_rows(mat: np.ndarray, what: str) -> None:
    if np.any(mat < 0.0) or not np.all(np.isfinite(mat)):
        raise ValueError(f"{what} entries must be finite and >= 0")
    sums = mat.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > ROW_TOL):
        raise ValueError(f"{what} rows must sum to 1 within {ROW_TOL}")


@dataclass(frozen=True)
class Belief:
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("belief must be a non-empty vector")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)):
            raise ValueError("belief entries must be finite and >= 0")
        if abs(p.sum() - 1.0) > ROW_TOL:
            raise ValueError(f"belief must sum to 1 within {ROW_TOL}")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def most_likely_state(self) -> int:
        # ties broken toward the lowest state index
        return int(np.argmax(self.probs))


@dataclass(frozen=True)
class FinitePomdp:
    """Tabular POMDP: transition[a][x][x'], observation[x][z], state_cost[x][a]."""

    transition: np.ndarray
    observation: np.ndarray
    state_cost: np.ndarray
    r_max: float
    initial_belief: np.ndarray
    horizon_T: int
    start_k: int

    def __post_init__(self) -> None:
        t = np.asarray(self.transition, dtype=float)
        o = np.asarray(self.observation, dtype=float)
        c = np.asarray(self.state_cost, dtype=float)
        b0 = np.asarray(self.initial_belief, dtype=float)
        if t.ndim != 3 or t.shape[1] != t.shape[2]:
            raise ValueError(f"transition must have shape (A, X, X), got {t.shape}")
        n_actions, n_states = t.shape[0], t.shape[1]
        if o.ndim != 2 or o.shape[0] != n_states:
            raise ValueError(f"observation must have shape (X, Z), got {o.shape}")
        if c.shape != (n_states, n_actions):
            raise ValueError(f"state_cost must have shape (X, A), got {c.shape}")
        _check_rows(t, "transition")
        _check_rows(o, "observation")
        if not (np.isfinite(self.r_max) and self.r_max > 0.0):
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if not np.all(np.isfinite(c)) or np.any(np.abs(c) > self.r_max):
            raise ValueError("state costs must satisfy |c| <= r_max")
        if b0.shape != (n_states,):
            raise ValueError("initial_belief length must equal the state count")
        Belief(b0)  # reuse belief validation
        # start_k == horizon_T is the degenerate single-decision episode;
        # ops that require k < T check it themselves
        if not (0 <= self.start_k <= self.horizon_T):
            raise ValueError(
                f"need 0 <= start_k <= horizon_T, got k={self.start_k}, T={self.horizon_T}"
            )
        for name, arr in (("transition", t), ("observation", o),
                          ("state_cost", c), ("initial_belief", b0)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "r_max", float(self.r_max))

    @property
    def n_states(self) -> int:
        return self.transition.shape[1]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[0]

    @property
    def n_obs(self) -> int:
        return self.observation.shape[1]


@dataclass(frozen=True)
class SimplifiedPair:
    """Original model plus the simplified transition/observation tensors."""

    original: FinitePomdp
    simplified_transition: np.ndarray
    simplified_observation: np.ndarray

    def __post_init__(self) -> None:
        st = np.asarray(self.simplified_transition, dtype=float)
        so = np.asarray(self.simplified_observation, dtype=float)
        if st.shape != self.original.transition.shape:
            raise ValueError("simplified transition shape mismatch")
        if so.shape != self.original.observation.shape:
            raise ValueError("simplified observation shape mismatch")
        _check_rows(st, "simplified transition")
        _check_rows(so, "simplified observation")
        st.flags.writeable = False
        so.flags.writeable = False
        object.__setattr__(self, "simplified_transition", st)
        object.__setattr__(self, "simplified_observation", so)

    @classmethod
    def identical(cls, model: FinitePomdp) -> "SimplifiedPair":
        return cls(model, model.transition.copy(), model.observation.copy())

    def tensors(self, model: str):
        if model == "original":
            return self.original.transition, self.original.observation
        if model == "simplified":
            return self.simplified_transition, self.simplified_observation
        raise ValueError(f"model must be 'original' or 'simplified', got {model!r}")


@dataclass(frozen=True)
class Policy:
    """Action table indexed by (time step, most-likely state).

    Row ``t - start_k`` covers time ``t``; the argmax tie-break toward the
    lowest state index keeps the lookup deterministic.
    """

    actions: np.ndarray
    start_k: int

    def __post_init__(self) -> None:
        a = np.asarray(self.actions, dtype=int)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("policy table must be 2-D (steps x states)")
        if np.any(a < 0):
            raise ValueError("action indices must be >= 0")
        a.flags.writeable = False
        object.__setattr__(self, "actions", a)

    def action(self, t: int, belief: Belief) -> int:
        row = t - self.start_k
        if not (0 <= row < self.actions.shape[0]):
            raise ValueError(f"policy has no row for time step {t}")
        return int(self.actions[row, belief.most_likely_state()])


def validate_policy(pair: SimplifiedPair, policy: Policy) -> None:
    """Totality check: one row per step in [start_k, horizon_T], one entry
    per state, all actions in range."""
    m = pair.original
    steps = m.horizon_T - m.start_k + 1
    if policy.start_k != m.start_k:
        raise ValueError("policy start_k does not match the model")
    if policy.actions.shape != (steps, m.n_states):
        raise ValueError(
            f"policy table must be {steps} x {m.n_states}, got {policy.actions.shape}"
        )
    if np.any(policy.actions >= m.n_actions):
        raise ValueError("policy references an action out of range")


@dataclass(frozen=True)
class BeliefTransitionAtom:
    successor: Belief
    probability: float
    via_observation: int


# ---------------------------------------------------------------- kernels


def belief_update(pair: SimplifiedPair, b: Belief, a: int, z: int,
                  model: str = "original") -> Belief:
    """Posterior over states after acting and observing: b' ∝ O[:, z] * (T' b)."""
    t, o = pair.tensors(model)
    predicted = t[a].T @ b.probs
    unnorm = o[:, z] * predicted
    norm = float(unnorm.sum())
    if norm <= PROB_FLOOR:
        raise ImpossibleObservationError(
            f"observation {z} has probability {norm} under action {a}"
        )
    return Belief(unnorm / norm)


def belief_mdp_step(pair: SimplifiedPair, b: Belief, a: int,
                    model: str = "original") -> list[BeliefTransitionAtom]:
    """Successor-belief law: one atom per observation with positive mass."""
    t, o = pair.tensors(model)
    predicted = t[a].T @ b.probs
    atoms = []
    for z in range(o.shape[1]):
        unnorm = o[:, z] * predicted
        p = float(unnorm.sum())
        if p <= PROB_FLOOR:
            continue
        atoms.append(BeliefTransitionAtom(Belief(unnorm / p), p, z))
    return atoms


def belief_cost(pair: SimplifiedPair, b: Belief, a: int) -> float:
    cost = pair.original.state_cost
    return float(np.dot(b.probs, cost[:, a]))


def tv_distance(pair: SimplifiedPair, b: Belief, a: int) -> float:
    """Total variation between original and simplified successor-belief laws.

    Different observations can induce the same successor belief, so atoms
    are first merged within each law, then identified across laws when
    their beliefs match within ``ATOM_MATCH_TOL`` componentwise.
    """
    rows = []
    for which, col in (("original", 0), ("simplified", 1)):
        for atom in belief_mdp_step(pair, b, a, which):
            rows.append((atom.successor.probs, col, atom.probability))
    # sort lexicographically, then cluster adjacent rows with matching beliefs
    rows.sort(key=lambda r: tuple(r[0]))
    totals = []  # per cluster: [p_original, p_simplified]
    rep = None
    for probs, col, p in rows:
        if rep is not None and np.max(np.abs(probs - rep)) <= ATOM_MATCH_TOL:
            totals[-1][col] += p
        else:
            rep = probs
            cluster = [0.0, 0.0]
            cluster[col] = p
            totals.append(cluster)
    return float(sum(abs(po - ps) for po, ps in totals))


# ---------------------------------------------------------------- enumeration


def _first_action(pair: SimplifiedPair, policy: Policy, b_k: Belief,
                  first_action) -> int:
    if first_action is None:
        return policy.action(pair.original.start_k, b_k)
    return int(first_action)


def enumerate_return_distribution(pair: SimplifiedPair, policy: Policy,
                                  b_k: Belief | None = None,
                                  model: str = "original",
                                  first_action=None,
                                  leaf_budget: int = DEFAULT_LEAF_BUDGET,
                                  ) -> DiscreteDistribution:
    """Exact law of the return R_{k:T} = sum_t c(b_t, a_t) under the policy.

    Depth-first expansion of the belief-MDP tree from start_k to horizon_T;
    leaves with equal return merge inside DiscreteDistribution.
    """
    m = pair.original
    if b_k is None:
        b_k = Belief(m.initial_belief)
    a0 = _first_action(pair, policy, b_k, first_action)
    values: list[float] = []
    masses: list[float] = []
    # node: (t, belief, action, accumulated probability, accumulated return)
    stack = [(m.start_k, b_k, a0, 1.0, 0.0)]
    leaves = 0
    while stack:
        t, b, a, prob, acc = stack.pop()
        acc += belief_cost(pair, b, a)
        if t == m.horizon_T:
            leaves += 1
            if leaves > leaf_budget:
                raise BudgetExceededError(
                    f"return enumeration exceeds {leaf_budget} leaves"
                )
            values.append(acc)
            masses.append(prob)
            continue
        for atom in belief_mdp_step(pair, b, a, model):
            p = prob * atom.probability
            if p < PROB_FLOOR:
                continue
            nb = atom.successor
            stack.append((t + 1, nb, policy.action(t + 1, nb), p, acc))
    return DiscreteDistribution(np.array(values), np.array(masses))


@dataclass(frozen=True)
class TrajectoryExpectations:
    """Exact per-step expected model gaps along simplified trajectories.

    ``per_step_m[i - (k+1)]`` is E over simplified trajectories of the
    successor-law TV distance at step i; ``epsilon`` is their sum.  The
    cumulative-gap function g is a right-continuous step function of the
    threshold l; its exact jump locations/weights are kept so g can be
    evaluated anywhere and turned into a CDF-gap envelope.
    """

    per_step_m: np.ndarray
    epsilon: float
    thresholds: np.ndarray
    threshold_weights: np.ndarray
    g_values: np.ndarray
    grid_l: np.ndarray

    def g_at(self, l) -> np.ndarray:
        ls = np.atleast_1d(np.asarray(l, dtype=float))
        if self.thresholds.size == 0:
            return np.zeros(ls.shape)
        cum = np.cumsum(self.threshold_weights)
        idx = np.searchsorted(self.thresholds, ls, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def envelope(self) -> PointwiseEnvelope:
        """The exact g as a CDF-gap envelope (monotone by construction)."""
        if self.thresholds.size == 0:
            return PointwiseEnvelope.zero()
        return PointwiseEnvelope(self.thresholds, np.cumsum(self.threshold_weights))


def enumerate_trajectory_expectations(pair: SimplifiedPair, policy: Policy,
                                      b_k: Belief | None = None,
                                      grid_l=None,
                                      first_action=None,
                                      leaf_budget: int = DEFAULT_LEAF_BUDGET,
                                      ) -> TrajectoryExpectations:
    """Exact m_i, epsilon and g(l) by enumerating simplified-model prefixes.

    Steps i run k+1 .. T-1; the indicator threshold for a prefix with
    return R at step i is R + c(b_k, a_k) - (T - i) * r_max, i.e. the
    smallest l making R <= f(l, i) true.
    """
    m = pair.original
    if b_k is None:
        b_k = Belief(m.initial_belief)
    a0 = _first_action(pair, policy, b_k, first_action)
    c0 = belief_cost(pair, b_k, a0)
    first_step = m.start_k + 1
    steps = m.horizon_T - 1 - m.start_k  # number of interior steps
    per_step = np.zeros(max(steps, 0))
    raw: list[tuple[float, float]] = []  # (threshold, weight)

    expanded = 0
    if steps > 0:
        stack = [
            (first_step, atom.successor, atom.probability, 0.0)
            for atom in belief_mdp_step(pair, b_k, a0, "simplified")
        ]
        while stack:
            t, b, prob, prefix = stack.pop()
            expanded += 1
            if expanded > leaf_budget:
                raise BudgetExceededError(
                    f"trajectory enumeration exceeds {leaf_budget} nodes"
                )
            a = policy.action(t, b)
            prefix = prefix + belief_cost(pair, b, a)
            w = prob * tv_distance(pair, b, a)
            per_step[t - first_step] += w
            if w > 0.0:
                raw.append((prefix + c0 - (m.horizon_T - t) * m.r_max, w))
            if t < m.horizon_T - 1:
                for atom in belief_mdp_step(pair, b, a, "simplified"):
                    p = prob * atom.probability
                    if p < PROB_FLOOR:
                        continue
                    stack.append((t + 1, atom.successor, p, prefix))

    raw.sort(key=lambda e: e[0])
    thresholds: list[float] = []
    weights: list[float] = []
    for thr, w in raw:
        if thresholds and thr - thresholds[-1] <= MERGE_TOL:
            weights[-1] += w
        else:
            thresholds.append(thr)
            weights.append(w)
    thr_arr = np.array(thresholds, dtype=float)
    w_arr = np.array(weights, dtype=float)
    epsilon = float(per_step.sum())

    grid = np.empty(0) if grid_l is None else np.asarray(grid_l, dtype=float)
    if grid.size and thr_arr.size:
        cum = np.cumsum(w_arr)
        idx = np.searchsorted(thr_arr, grid, side="right")
        g_values = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    else:
        g_values = np.zeros(grid.shape)
    return TrajectoryExpectations(
        per_step_m=per_step,
        epsilon=epsilon,
        thresholds=thr_arr,
        threshold_weights=w_arr,
        g_values=g_values,
        grid_l=grid,
    )


# ---------------------------------------------------------------- problem files


def to_problem_dict(pair: SimplifiedPair, policy: Policy) -> dict:
    m = pair.original
    return {
        "states": m.n_states,
        "actions": m.n_actions,
        "observations": m.n_obs,
        "transition": m.transition.tolist(),
        "simplified_transition": pair.simplified_transition.tolist(),
        "observation": m.observation.tolist(),
        "simplified_observation": pair.simplified_observation.tolist(),
        "cost": m.state_cost.tolist(),
        "r_max": m.r_max,
        "b0": m.initial_belief.tolist(),
        "horizon_T": m.horizon_T,
        "start_k": m.start_k,
        "policy": policy.actions.tolist(),
    }


def from_problem_dict(doc: dict) -> tuple[SimplifiedPair, Policy]:
    try:
        model = FinitePomdp(
            transition=np.array(doc["transition"], dtype=float),
            observation=np.array(doc["observation"], dtype=float),
            state_cost=np.array(doc["cost"], dtype=float),
            r_max=float(doc["r_max"]),
            initial_belief=np.array(doc["b0"], dtype=float),
            horizon_T=int(doc["horizon_T"]),
            start_k=int(doc["start_k"]),
        )
        pair = SimplifiedPair(
            original=model,
            simplified_transition=np.array(doc["simplified_transition"], dtype=float),
            simplified_observation=np.array(doc["simplified_observation"], dtype=float),
        )
        policy = Policy(np.array(doc["policy"], dtype=int), start_k=model.start_k)
    except KeyError as exc:
        raise ValueError(f"problem file is missing field {exc}") from exc
    for name, declared, actual in (
        ("states", int(doc["states"]), model.n_states),
        ("actions", int(doc["actions"]), model.n_actions),
        ("observations", int(doc["observations"]), model.n_obs),
    ):
        if declared != actual:
            raise ValueError(f"declared {name}={declared} but tensors imply {actual}")
    validate_policy(pair, policy)
    return pair, policy


def save_problem(path, pair: SimplifiedPair, policy: Policy) -> None:
    doc = to_problem_dict(pair, policy)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_problem(path) -> tuple[SimplifiedPair, Policy]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"problem file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("problem file must contain a JSON object")
    return from_problem_dict(doc)
