import math

import numpy as np
import pytest

from riskgap import scenarios
from riskgap.envelopes import PointwiseEnvelope
from riskgap.estimation import (
    BinGrid,
    CertifiedBound,
    DegenerateWeightsError,
    InapplicableCaseError,
    ParticleBelief,
    ProposalQ0,
    RolloutConfig,
    UnsupportedBeliefError,
    binned_h,
    build_default_proposal,
    certify_tight_lower,
    certify_uniform,
    estimate_epsilon,
    estimate_g,
    estimate_q,
    genpf,
    lower_cdf_distribution,
    n_delta_for_epsilon,
    n_delta_for_g,
    n_delta_for_h,
    n_delta_for_tight_lower,
    n_delta_for_uniform_bounds,
    rollout_returns,
    sample_return,
)
from riskgap.pomdp import (
    Belief,
    SimplifiedPair,
    belief_cost,
    enumerate_return_distribution,
    enumerate_trajectory_expectations,
)
from riskgap.risk import cvar_estimate_sorted, cvar_exact, deviation_radii
from riskgap.value_bounds import ValueQuery, q_exact

from test_pomdp import make_model, random_pair, random_policy


def sensor_setup():
    spec = scenarios.builtin("two_state_sensor")
    return spec.pair, spec.policy, spec.default_query


def full_depth(pair):
    m = pair.original
    return m.horizon_T - m.start_k + 1


# ------------------------------------------------------------------- types


def test_rollout_config_validation():
    with pytest.raises(ValueError):
        RolloutConfig(0, 10, 1)
    with pytest.raises(ValueError):
        RolloutConfig(10, 0, 1)
    with pytest.raises(ValueError):
        RolloutConfig(10, 10, -1)


def test_particle_belief_validation():
    with pytest.raises(ValueError):
        ParticleBelief(np.array([], dtype=int), np.array([]))
    with pytest.raises(ValueError):
        ParticleBelief(np.array([0, 1]), np.array([0.5, -0.1]))
    with pytest.raises(ValueError):
        ParticleBelief(np.array([0, 1]), np.array([0.0, 0.0]))


def test_particle_belief_from_point_mass():
    pb = ParticleBelief.from_belief(Belief(np.array([0.0, 1.0, 0.0])), 64,
                                    np.random.default_rng(0))
    assert np.all(pb.states == 1)
    b = pb.as_belief(3)
    assert np.allclose(b.probs, [0.0, 1.0, 0.0])


def test_bin_grid_validation_and_uniform():
    with pytest.raises(ValueError):
        BinGrid(np.array([0.0]))
    with pytest.raises(ValueError):
        BinGrid(np.array([0.0, 0.0, 1.0]))
    pair, _, _ = sensor_setup()
    grid = BinGrid.uniform(pair, 4)
    assert grid.n_bins == 4
    assert grid.covers_return_range(pair)
    assert not BinGrid(np.array([-1.0, 1.0])).covers_return_range(pair)


def test_proposal_rejects_zero_mass_support():
    b = Belief(np.array([1.0, 0.0]))
    with pytest.raises(UnsupportedBeliefError):
        ProposalQ0((b, b), np.zeros(2), np.array([1.0, 0.0]),
                   np.array([[0.5], [0.5]]), first_step=1, c0=0.0)


# ------------------------------------------------------------------- genpf


def deterministic_pair():
    # cycle 0 -> 1 -> 0 with perfect observations; costs depend on state
    trans = [[[0.0, 1.0], [1.0, 0.0]]]
    obs = [[1.0, 0.0], [0.0, 1.0]]
    cost = [[0.25], [0.75]]
    model = make_model(trans, obs, cost, [1.0, 0.0], horizon_T=3)
    return SimplifiedPair.identical(model)


def test_genpf_deterministic_point_mass():
    pair = deterministic_pair()
    pb = ParticleBelief(np.zeros(8, dtype=int), np.ones(8))
    nxt, rho = genpf(pair, pb, 0, "original", np.random.default_rng(0))
    assert np.all(nxt.states == 1)
    assert rho == 0.25
    assert np.allclose(nxt.weights, 1.0)


def test_genpf_equal_costs_ignore_weights():
    trans = [[[0.3, 0.7], [0.6, 0.4]]]
    obs = [[0.8, 0.2], [0.4, 0.6]]
    model = make_model(trans, obs, [[0.5], [0.5]], [0.5, 0.5], horizon_T=2)
    pair = SimplifiedPair.identical(model)
    pb = ParticleBelief(np.array([0, 1, 1]), np.array([0.2, 1.5, 0.05]))
    _, rho = genpf(pair, pb, 0, "original", np.random.default_rng(5))
    assert rho == pytest.approx(0.5, abs=1e-12)


def test_genpf_mean_rho_matches_belief_cost():
    rng = np.random.default_rng(11)
    pair = random_pair(rng, n_states=2, n_obs=2, mix=0.0)
    b = Belief(np.array([0.3, 0.7]))
    exact = belief_cost(pair, b, 0)
    draw = np.random.default_rng(12)
    rhos = []
    for _ in range(10_000):
        pb = ParticleBelief.from_belief(b, 500, draw)
        _, rho = genpf(pair, pb, 0, "original", draw)
        rhos.append(rho)
    rhos = np.asarray(rhos)
    se = rhos.std(ddof=1) / math.sqrt(rhos.size)
    assert abs(rhos.mean() - exact) <= 3 * se


def test_genpf_degenerate_weights_raises():
    # single particle: reference chain and the particle transition disagree
    # half the time, and the two states emit disjoint observations
    trans = [[[0.5, 0.5], [0.5, 0.5]]]
    obs = [[1.0, 0.0], [0.0, 1.0]]
    model = make_model(trans, obs, [[0.0], [0.0]], [1.0, 0.0], horizon_T=2)
    pair = SimplifiedPair.identical(model)
    pb = ParticleBelief(np.array([0]), np.ones(1))
    with pytest.raises(DegenerateWeightsError):
        for seed in range(32):
            genpf(pair, pb, 0, "original", np.random.default_rng(seed))


# ------------------------------------------------------------ sample_return


def test_sample_return_depth_zero():
    pair = deterministic_pair()
    pb = ParticleBelief(np.zeros(4, dtype=int), np.ones(4))
    policy = scenarios.builtin("two_state_sensor").policy  # unused at depth 0
    assert sample_return(pair, policy, pb, 0, 0, 0, "original",
                         np.random.default_rng(0)) == 0.0


def test_sample_return_deterministic_chain():
    pair = deterministic_pair()
    from riskgap.pomdp import Policy
    policy = Policy(np.zeros((4, 2), dtype=int), start_k=0)
    pb = ParticleBelief(np.zeros(4, dtype=int), np.ones(4))
    # states visit 0, 1, 0 -> costs 0.25, 0.75, 0.25
    val = sample_return(pair, policy, pb, 0, 0, 3, "original",
                        np.random.default_rng(1))
    assert val == pytest.approx(1.25, abs=1e-12)


def test_sample_return_moment_matching():
    rng = np.random.default_rng(21)
    pair = random_pair(rng, n_states=2, n_obs=2, horizon_T=2, mix=0.0)
    # constant action per step: keeps the rollout law aligned with the exact
    # belief-MDP law (a belief-dependent action can flip under particle noise
    # near argmax ties, which is a property of the estimator, not a bug)
    from riskgap.pomdp import Policy
    rows = rng.integers(0, pair.original.n_actions, size=(3, 1))
    policy = Policy(np.repeat(rows, 2, axis=1), start_k=0)
    dist = enumerate_return_distribution(pair, policy)
    pb_rng = np.random.default_rng(22)
    vals = np.array([
        sample_return(pair, policy,
                      ParticleBelief.from_belief(Belief(pair.original.initial_belief),
                                                 400, pb_rng),
                      policy.action(0, Belief(pair.original.initial_belief)),
                      0, full_depth(pair), "original", pb_rng)
        for _ in range(10_000)
    ])
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    # finite-particle bias is O(1/Nx); allow it on top of the MC band
    assert abs(vals.mean() - dist.mean()) <= 4 * se + 0.01


# --------------------------------------------------------------- estimate_q


def test_rollout_returns_deterministic_and_worker_independent():
    pair, policy, query = sensor_setup()
    pb = ParticleBelief.from_belief(query.belief, 100, np.random.default_rng(0))
    cfg = RolloutConfig(64, 100, 123)
    a0 = policy.action(0, query.belief)
    r1 = rollout_returns(pair, policy, pb, a0, 0, full_depth(pair), cfg)
    r2 = rollout_returns(pair, policy, pb, a0, 0, full_depth(pair), cfg)
    r3 = rollout_returns(pair, policy, pb, a0, 0, full_depth(pair), cfg, workers=4)
    assert np.array_equal(r1, r2)
    assert np.array_equal(r1, r3)


def test_estimate_q_alpha_near_one_is_sample_mean():
    pair, policy, query = sensor_setup()
    pb = ParticleBelief.from_belief(query.belief, 50, np.random.default_rng(3))
    cfg = RolloutConfig(200, 50, 9)
    a0 = policy.action(0, query.belief)
    pool = rollout_returns(pair, policy, pb, a0, 0, full_depth(pair), cfg)
    q = estimate_q(pair, policy, pb, a0, 0, full_depth(pair), 1.0 - 1e-12, cfg)
    assert q == pytest.approx(pool.mean(), abs=1e-9)


def test_estimate_q_brown_concentration():
    pair, policy, query = sensor_setup()
    dist = enumerate_return_distribution(pair, policy, model="simplified")
    exact = cvar_exact(dist, 0.25)
    radii = deviation_radii(500, 0.25, 0.1, dist.sup_support - dist.inf_support)
    pb = ParticleBelief.from_belief(query.belief, 200, np.random.default_rng(0))
    a0 = policy.action(0, query.belief)
    hi = lo = 0
    for trial in range(40):
        cfg = RolloutConfig(500, 200, 5_000 + trial)
        q = estimate_q(pair, policy, pb, a0, 0, full_depth(pair), 0.25, cfg)
        if exact - q > radii.upper:
            hi += 1
        if q - exact > radii.lower:
            lo += 1
    # each side violates w.p. <= 0.1 per trial; 12/40 is far outside that
    assert hi <= 12 and lo <= 12


# ----------------------------------------------------------------- proposal


def test_default_proposal_structure():
    pair, policy, _ = sensor_setup()
    q0 = build_default_proposal(pair, policy)
    assert q0.first_step == 1
    assert q0.n_steps == 3
    assert np.allclose(q0.target_probs.sum(axis=0), 1.0, atol=1e-9)
    assert q0.proposal_probs.sum() == pytest.approx(1.0, abs=1e-12)
    expected = 0.5 * q0.target_probs.mean(axis=1) + 0.5 / len(q0.beliefs)
    assert np.allclose(q0.proposal_probs, expected)
    ratio = q0.target_probs / q0.proposal_probs[:, None]
    assert q0.importance_bound == pytest.approx(ratio.max())
    assert q0.importance_bound >= 1.0


def test_default_proposal_needs_interior_step():
    trans = [[[1.0, 0.0], [0.0, 1.0]]]
    obs = [[1.0, 0.0], [0.0, 1.0]]
    model = make_model(trans, obs, [[0.1], [0.2]], [1.0, 0.0],
                       horizon_T=2, start_k=1)
    pair = SimplifiedPair.identical(model)
    from riskgap.pomdp import Policy
    policy = Policy(np.zeros((2, 2), dtype=int), start_k=1)
    with pytest.raises(ValueError, match="interior"):
        build_default_proposal(pair, policy)


# ----------------------------------------------------------- epsilon and g


def test_estimate_epsilon_zero_for_identical_models():
    rng = np.random.default_rng(31)
    pair = random_pair(rng, mix=0.0)
    policy = random_policy(rng, pair)
    q0 = build_default_proposal(pair, policy)
    eps = estimate_epsilon(q0, pair, policy, 500, np.random.default_rng(1))
    assert eps == 0.0


def test_estimate_epsilon_unit_weights_is_plain_average():
    pair, policy, _ = sensor_setup()
    full = build_default_proposal(pair, policy)
    # single-step proposal whose proposal equals the step-1 marginal
    keep = full.target_probs[:, 0] > 0
    beliefs = tuple(b for b, k in zip(full.beliefs, keep) if k)
    target = full.target_probs[keep, :1]
    q0 = ProposalQ0(beliefs, full.prefix_returns[keep], target[:, 0], target,
                    first_step=1, c0=full.c0)
    from riskgap.pomdp import tv_distance
    tv = np.array([tv_distance(pair, b, policy.action(1, b)) for b in beliefs])
    counts = np.random.default_rng(7).multinomial(400, target[:, 0])
    eps = estimate_epsilon(q0, pair, policy, 400, np.random.default_rng(7))
    assert eps == pytest.approx(counts @ tv / 400.0, abs=1e-12)


def test_estimate_epsilon_unbiased():
    # one interior step, so the estimate is a single m_i
    rng = np.random.default_rng(41)
    pair = random_pair(rng, n_states=2, n_obs=2, horizon_T=2, mix=0.4)
    policy = random_policy(rng, pair)
    exact = enumerate_trajectory_expectations(pair, policy).epsilon
    q0 = build_default_proposal(pair, policy)
    draw = np.random.default_rng(42)
    vals = np.array([estimate_epsilon(q0, pair, policy, 8, draw)
                     for _ in range(10_000)])
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - exact) <= 4 * se


def test_estimate_epsilon_concentration():
    pair, policy, _ = sensor_setup()
    m = pair.original
    exact = enumerate_trajectory_expectations(pair, policy).epsilon
    q0 = build_default_proposal(pair, policy)
    v, delta = 0.25, 0.1
    nd = n_delta_for_epsilon(v, delta, q0.importance_bound, m.horizon_T, m.start_k)
    bad = 0
    for trial in range(500):
        eps = estimate_epsilon(q0, pair, policy, nd,
                               np.random.default_rng(9_000 + trial))
        if abs(eps - exact) > 2 * v:
            bad += 1
    assert bad <= 75  # binomial(500, 0.1) stays below this w.h.p.


def test_estimate_g_saturates_to_epsilon_and_zero():
    pair, policy, _ = sensor_setup()
    q0 = build_default_proposal(pair, policy)
    span = pair.original.r_max * (pair.original.horizon_T - pair.original.start_k + 1)
    g = estimate_g(q0, pair, policy, 300, [-2 * span, 2 * span],
                   np.random.default_rng(2))
    eps = estimate_epsilon(q0, pair, policy, 300, np.random.default_rng(2))
    assert g[0] == 0.0
    assert g[1] == pytest.approx(eps, abs=1e-12)


def test_estimate_g_concentration_fixed_level():
    pair, policy, _ = sensor_setup()
    m = pair.original
    q0 = build_default_proposal(pair, policy)
    level = 0.0
    exact = enumerate_trajectory_expectations(pair, policy, grid_l=[level]).g_values[0]
    v, delta = 0.2, 0.1
    nd = n_delta_for_g(v, delta, q0.importance_bound, m.horizon_T, m.start_k)
    bad = 0
    for trial in range(300):
        g = estimate_g(q0, pair, policy, nd, [level],
                       np.random.default_rng(11_000 + trial))
        if abs(g[0] - exact) > v:
            bad += 1
    assert bad <= 50


# ------------------------------------------------------- sample-size formulas


def test_n_delta_frozen_value():
    assert n_delta_for_epsilon(0.5, 0.05, 1.0, T=2, k=0) == 141


def test_n_delta_scaling_and_monotonicity():
    base = n_delta_for_epsilon(0.1, 0.05, 2.0, T=4, k=0)
    assert abs(n_delta_for_epsilon(0.2, 0.05, 2.0, T=4, k=0) - base / 4) <= 1
    for fn in (n_delta_for_epsilon, n_delta_for_g):
        assert fn(0.1, 0.05, 2.0, 4, 0) > fn(0.2, 0.05, 2.0, 4, 0)
        assert fn(0.1, 0.05, 3.0, 4, 0) > fn(0.1, 0.05, 2.0, 4, 0)
        assert fn(0.1, 0.01, 2.0, 4, 0) > fn(0.1, 0.05, 2.0, 4, 0)
        assert fn(0.1, 0.05, 2.0, 5, 0) > fn(0.1, 0.05, 2.0, 4, 0)
    assert n_delta_for_h(0.1, 0.05, 2.0, 8, 4, 0) > n_delta_for_h(0.1, 0.05, 2.0, 4, 4, 0)
    assert n_delta_for_h(0.1, 0.01, 2.0, 8, 4, 0) > n_delta_for_h(0.1, 0.05, 2.0, 8, 4, 0)
    assert n_delta_for_tight_lower(0.1, 0.05, 2.0, 8, 4, 0) > \
        n_delta_for_h(0.1, 0.05, 2.0, 8, 4, 0)
    assert n_delta_for_uniform_bounds(0.05, 0.05, 2.0, 4, 0) > \
        n_delta_for_uniform_bounds(0.1, 0.05, 2.0, 4, 0)


def test_n_delta_validation():
    with pytest.raises(ValueError):
        n_delta_for_epsilon(0.0, 0.05, 1.0, 2, 0)
    with pytest.raises(ValueError):
        n_delta_for_epsilon(0.1, 1.5, 1.0, 2, 0)
    with pytest.raises(ValueError):
        n_delta_for_epsilon(0.1, 0.05, 0.5, 2, 0)
    with pytest.raises(ValueError):
        n_delta_for_epsilon(0.1, 0.05, 1.0, 1, 0)  # no interior steps
    with pytest.raises(ValueError):
        n_delta_for_h(0.1, 0.05, 1.0, 0, 4, 0)


# ---------------------------------------------------------------- binned_h


def test_binned_h_single_bin():
    grid = BinGrid(np.array([-1.0, 1.0]))
    h_plus, h_minus = binned_h([0.1, 0.4], grid)
    assert h_plus.at(0.0) == pytest.approx(0.4)
    assert h_plus.at(5.0) == pytest.approx(0.4)
    assert h_minus.at(0.0) == pytest.approx(0.1)


def test_binned_h_sandwiches_g_on_edges():
    pair, policy, _ = sensor_setup()
    q0 = build_default_proposal(pair, policy)
    grid = BinGrid.uniform(pair, 7)
    g = estimate_g(q0, pair, policy, 400, grid.edges, np.random.default_rng(8))
    h_plus, h_minus = binned_h(g, grid)
    assert np.all(h_minus.at(grid.edges) <= g + 1e-12)
    assert np.all(h_plus.at(grid.edges) >= g - 1e-12)


def test_binned_h_running_max_monotone():
    grid = BinGrid(np.array([0.0, 1.0, 2.0, 3.0]))
    h_plus, _ = binned_h([0.0, 0.5, 0.3, 0.6], grid)  # noisy dip at the middle
    vals = h_plus.at(np.array([0.5, 1.5, 2.5]))
    assert np.all(np.diff(vals) >= 0.0)
    assert h_plus.at(1.5) == pytest.approx(0.5)  # dip raised by the running max


def test_binned_h_envelope_traps_g_uniformly():
    pair, policy, _ = sensor_setup()
    m = pair.original
    q0 = build_default_proposal(pair, policy)
    grid = BinGrid.uniform(pair, 6)
    v, delta = 0.25, 0.1
    nd = n_delta_for_h(v, delta, q0.importance_bound, grid.n_bins,
                       m.horizon_T, m.start_k)
    probe = np.linspace(grid.edges[0], grid.edges[-1], 301)
    exact = enumerate_trajectory_expectations(pair, policy, grid_l=probe).g_values
    bad = 0
    for trial in range(200):
        g = estimate_g(q0, pair, policy, nd, grid.edges,
                       np.random.default_rng(13_000 + trial))
        h_plus, _ = binned_h(g, grid)
        if np.max(exact - h_plus.at(probe)) > v:
            bad += 1
    assert bad <= 40


# ----------------------------------------------------------- certified bounds


def test_certify_uniform_requires_enough_draws():
    pair, policy, query = sensor_setup()
    q0 = build_default_proposal(pair, policy)
    cfg = RolloutConfig(50, 50, 0)
    with pytest.raises(ValueError, match="below the certified-rate"):
        certify_uniform(pair, policy, query, cfg, q0, 10, 0.1, 0.1)


def test_certify_uniform_inapplicable_when_shift_escapes():
    pair, policy, query = sensor_setup()
    m = pair.original
    q0 = build_default_proposal(pair, policy)
    v, delta = 0.2, 0.1  # 4v = 0.8 > epsilon_hat ~ 0.58
    nd = n_delta_for_uniform_bounds(v, delta, q0.importance_bound,
                                    m.horizon_T, m.start_k)
    cfg = RolloutConfig(200, 100, 3)
    with pytest.raises(InapplicableCaseError):
        certify_uniform(pair, policy, query, cfg, q0, nd, v, delta)


def test_certify_uniform_case_selection():
    pair, policy, query = sensor_setup()
    m = pair.original
    q0 = build_default_proposal(pair, policy)
    v, delta = 0.1, 0.1
    nd = n_delta_for_uniform_bounds(v, delta, q0.importance_bound,
                                    m.horizon_T, m.start_k)
    cfg = RolloutConfig(400, 150, 17)
    # alpha=0.25: eps_hat ~ 0.58 -> L1 fires, U omitted with a tag
    low = certify_uniform(pair, policy, query, cfg, q0, nd, v, delta)
    assert [b.kind for b in low] == ["L1"]
    assert low[0].radii["u_omitted"] == 1.0
    assert low[0].radii["lambda_1"] < 0.0  # recorded verbatim
    # alpha=0.9: eps_hat + alpha >= 1 -> L2, and U applies
    high = certify_uniform(pair, policy,
                           ValueQuery(query.belief, 0.9, query.action),
                           cfg, q0, nd, v, delta)
    assert [b.kind for b in high] == ["L2", "U"]
    assert {"eta_1", "eta_2"} <= set(high[0].radii)
    assert high[1].radii["lambda"] > 0.0


def test_certify_uniform_deterministic_and_stream_independent():
    pair, policy, query = sensor_setup()
    m = pair.original
    q0 = build_default_proposal(pair, policy)
    v, delta = 0.1, 0.1
    nd = n_delta_for_uniform_bounds(v, delta, q0.importance_bound,
                                    m.horizon_T, m.start_k)
    cfg = RolloutConfig(150, 80, 23)
    a = certify_uniform(pair, policy, query, cfg, q0, nd, v, delta)
    b = certify_uniform(pair, policy, query, cfg, q0, nd, v, delta, workers=3)
    assert [(x.kind, x.value) for x in a] == [(x.kind, x.value) for x in b]
    # epsilon draws use their own stream: changing C leaves eps_hat untouched
    c = certify_uniform(pair, policy, query,
                        RolloutConfig(151, 80, 23), q0, nd, v, delta)
    assert c[0].radii["epsilon_hat"] == a[0].radii["epsilon_hat"]


def test_certify_uniform_collapses_for_identical_models():
    rng = np.random.default_rng(51)
    pair = random_pair(rng, n_states=2, n_obs=2, horizon_T=3, mix=0.0)
    from riskgap.pomdp import Policy
    rows = rng.integers(0, pair.original.n_actions, size=(4, 1))
    policy = Policy(np.repeat(rows, 2, axis=1), start_k=0)
    query = ValueQuery(Belief(pair.original.initial_belief), 0.3)
    exact = q_exact(pair, policy, query)
    q0 = build_default_proposal(pair, policy)
    v, delta = 0.01, 0.1
    nd = n_delta_for_uniform_bounds(v, delta, q0.importance_bound,
                                    pair.original.horizon_T, pair.original.start_k)
    cfg = RolloutConfig(4000, 200, 29)
    bounds = certify_uniform(pair, policy, query, cfg, q0, nd, v, delta)
    kinds = {b.kind: b for b in bounds}
    assert set(kinds) == {"L1", "U"}
    assert kinds["L1"].radii["epsilon_hat"] == 0.0
    span = pair.original.r_max * (pair.original.horizon_T - pair.original.start_k + 1)
    # with eps_hat = 0 the first radius is negative verbatim, so compare
    # against magnitudes: both ends hug q_exact within their radii
    l1 = kinds["L1"]
    assert abs(l1.value - exact) <= abs(l1.radii["lambda_1"]) + l1.radii["lambda_2"]
    assert exact - kinds["U"].value <= kinds["U"].radii["lambda"] + 1e-9
    assert abs(l1.value - exact) <= 0.25 * span
    assert abs(kinds["U"].value - exact) <= 0.25 * span


def test_lower_cdf_distribution_reduces_to_empirical():
    pair, policy, query = sensor_setup()
    pb = ParticleBelief.from_belief(query.belief, 100, np.random.default_rng(1))
    cfg = RolloutConfig(300, 100, 31)
    a0 = policy.action(0, query.belief)
    returns = rollout_returns(pair, policy, pb, a0, 0, full_depth(pair), cfg)
    grid = BinGrid.uniform(pair, 4)
    dist = lower_cdf_distribution(returns, PointwiseEnvelope.zero(), 1e-12,
                                  grid.edges)
    for alpha in (0.2, 0.5, 0.8):
        assert cvar_exact(dist, alpha) == pytest.approx(
            cvar_estimate_sorted(returns, alpha), abs=1e-6)


def test_tight_lower_draws_concentrate_on_step_cdf():
    # inverse-transform draws from the dominated law match its exact CVaR
    pair, policy, query = sensor_setup()
    pb = ParticleBelief.from_belief(query.belief, 100, np.random.default_rng(2))
    cfg = RolloutConfig(200, 100, 37)
    a0 = policy.action(0, query.belief)
    returns = rollout_returns(pair, policy, pb, a0, 0, full_depth(pair), cfg)
    grid = BinGrid.uniform(pair, 5)
    q0 = build_default_proposal(pair, policy)
    g = estimate_g(q0, pair, policy, 2_000, grid.edges, np.random.default_rng(3))
    h_plus, _ = binned_h(g, grid)
    dist = lower_cdf_distribution(returns, h_plus, 0.05, grid.edges)
    u = np.random.default_rng(4).random(200_000)
    cum = np.cumsum(dist.probs)
    draws = dist.values[np.minimum(np.searchsorted(cum, u, side="left"),
                                   dist.values.size - 1)]
    radii = deviation_radii(u.size, 0.25, 1e-3,
                            dist.sup_support - dist.inf_support)
    exact = cvar_exact(dist, 0.25)
    est = cvar_estimate_sorted(draws, 0.25)
    assert exact - est <= radii.upper
    assert est - exact <= radii.lower


def test_certify_tight_lower_validation():
    pair, policy, query = sensor_setup()
    q0 = build_default_proposal(pair, policy)
    cfg = RolloutConfig(50, 50, 0)
    grid = BinGrid.uniform(pair, 4)
    with pytest.raises(ValueError, match="eta"):
        certify_tight_lower(pair, policy, query, cfg, q0, 10_000, 0.0, 0.1, grid)
    with pytest.raises(ValueError, match="span"):
        certify_tight_lower(pair, policy, query, cfg, q0, 10_000, 0.2, 0.1,
                            BinGrid(np.array([-1.0, 1.0])))
    with pytest.raises(ValueError, match="below the certified-rate"):
        certify_tight_lower(pair, policy, query, cfg, q0, 10, 0.2, 0.1, grid)


def test_certify_tight_lower_deterministic_and_bounded():
    pair, policy, query = sensor_setup()
    m = pair.original
    q0 = build_default_proposal(pair, policy)
    grid = BinGrid.uniform(pair, 6)
    eta, delta = 0.25, 0.1
    nd = n_delta_for_tight_lower(eta, delta, q0.importance_bound, grid.n_bins,
                                 m.horizon_T, m.start_k)
    cfg = RolloutConfig(400, 150, 43)
    one = certify_tight_lower(pair, policy, query, cfg, q0, nd, eta, delta, grid)
    two = certify_tight_lower(pair, policy, query, cfg, q0, nd, eta, delta, grid,
                              workers=2)
    assert one.value == two.value
    assert one.kind == "TightLower"
    assert one.v == one.radii["v"] > 0.0
    assert one.eta == eta
    # certified value stays below the true value plus its radius
    truth = q_exact(pair, policy, query)
    assert one.value - truth <= one.v


def test_certify_tight_lower_violation_rate():
    pair, policy, query = sensor_setup()
    m = pair.original
    truth = q_exact(pair, policy, query)
    q0 = build_default_proposal(pair, policy)
    grid = BinGrid.uniform(pair, 5)
    eta, delta = 0.3, 0.1
    nd = n_delta_for_tight_lower(eta, delta, q0.importance_bound, grid.n_bins,
                                 m.horizon_T, m.start_k)
    bad = 0
    for trial in range(100):
        cfg = RolloutConfig(250, 120, 60_000 + trial)
        bound = certify_tight_lower(pair, policy, query, cfg, q0, nd, eta,
                                    delta, grid)
        if bound.value - truth > bound.v:
            bad += 1
    assert bad <= 25


def test_certified_bound_kind_checked():
    with pytest.raises(ValueError, match="kind"):
        CertifiedBound(0.0, "L3", 0.1, 0.1, 0.0, 10, 10, {})
