"""Batch driver: exact enumeration reports, certified bounds, and
concentration-rate validation, emitted as JSON or CSV.

Every report shares one envelope::

    {"schema_version": ..., "manifest": {...}, "records": [...]}

Records are flat dicts of scalars, so a CSV export carries the same rows
one-to-one.  All randomness is derived from the manifest seed through named
(slot, trial, query) streams, which makes a report a deterministic function
of the manifest for any worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .estimation import (
    BinGrid,
    DegenerateWeightsError,
    InapplicableCaseError,
    RolloutConfig,
    _simplified_return_pool,
    binned_h,
    build_default_proposal,
    certify_tight_lower,
    certify_uniform,
    estimate_epsilon,
    estimate_g,
    n_delta_for_epsilon,
    n_delta_for_g,
    n_delta_for_h,
    n_delta_for_tight_lower,
    n_delta_for_uniform_bounds,
)
from .pomdp import (
    Belief,
    BudgetExceededError,
    enumerate_return_distribution,
    enumerate_trajectory_expectations,
    load_problem,
)
from .risk import cvar_estimate_sorted, cvar_exact, deviation_radii
from .scenarios import builtin, builtin_names
from .value_bounds import ValueQuery, bound_report, q_exact

SCHEMA_VERSION = 1
SANDWICH_TOL = 1e-9

# Embedded schema document; validate_report enforces it before anything is
# written, so an emitted report is schema-valid by construction.
SCHEMA = {
    "schema_version": SCHEMA_VERSION,
    "envelope": {
        "schema_version": "int, must equal the library's SCHEMA_VERSION",
        "manifest": "echo of the resolved run parameters (RunManifest.to_dict)",
        "records": "list of flat records; every field value is a scalar",
    },
    "record_kinds": {
        "return_atom": "one atom of an exact return law (model, value, prob)",
        "q_exact": "exact tail value of a return law (alpha, model, value)",
        "epsilon": "exact summed per-step expected model gap (value)",
        "g_value": "exact cumulative-gap curve at one level (level, value)",
        "bound": "enumeration-backed bound (alpha, name, value, case_tag)",
        "sandwich": "per-alpha ordering verdict around the exact value",
        "proposal": "importance-proposal summary (importance_bound, ...)",
        "certified_bound": "Monte-Carlo bound with its radius_* terms",
        "guarantee": "violation-rate check for one probabilistic guarantee",
    },
}

_SCALAR_TYPES = (str, int, float, bool, type(None))

# Stream slots: one per independent randomness consumer, combined with the
# trial and query indices so reports never depend on evaluation order.
_SLOT_POOL, _SLOT_EPS, _SLOT_G, _SLOT_H, _SLOT_UNIF, _SLOT_TIGHT = range(6)


@dataclass(frozen=True)
class RunManifest:
    """Resolved run parameters, echoed verbatim into every report."""

    command: str
    scenario: str | None
    problem: str | None
    alphas: tuple
    delta: float
    v: float
    eta: float
    rollouts_c: int
    particles_nx: int
    n_delta: int | None
    n_delta_derived: bool
    n_delta_formula: str
    bins: int
    seed: int
    trials: int
    out: str | None
    workers: int
    fmt: str

    def to_dict(self) -> dict:
        # workers/format/trials are execution plumbing, not run identity:
        # leaving them out keeps reports byte-identical across worker counts
        return {
            "command": self.command,
            "scenario": self.scenario,
            "problem": self.problem,
            "alpha": [float(a) for a in self.alphas],
            "delta": float(self.delta),
            "v": float(self.v),
            "eta": float(self.eta),
            "rollouts": int(self.rollouts_c),
            "particles": int(self.particles_nx),
            "ndelta": None if self.n_delta is None else int(self.n_delta),
            "ndelta_derived": bool(self.n_delta_derived),
            "ndelta_formula": self.n_delta_formula,
            "bins": int(self.bins),
            "seed": int(self.seed),
            "out": self.out,
        }


def validate_report(report: dict) -> None:
    """Check the shared envelope and the flat-scalar record contract."""
    if set(report) != {"schema_version", "manifest", "records"}:
        raise ValueError(
            "report envelope must have exactly schema_version, manifest, records")
    if report["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {report['schema_version']!r}")
    if not isinstance(report["manifest"], dict):
        raise ValueError("manifest must be a mapping")
    if not isinstance(report["records"], list):
        raise ValueError("records must be a list")
    for rec in report["records"]:
        if not isinstance(rec, dict):
            raise ValueError("each record must be a mapping")
        if rec.get("kind") not in SCHEMA["record_kinds"]:
            raise ValueError(f"unknown record kind {rec.get('kind')!r}")
        for key, val in rec.items():
            if not isinstance(val, _SCALAR_TYPES):
                raise ValueError(
                    f"record field {key!r} must be a scalar, got {type(val).__name__}")


def render_report(report: dict, fmt: str) -> str:
    validate_report(report)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        records = report["records"]
        fields = sorted({key for rec in records for key in rec})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, restval="",
                                lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: _csv_cell(v) for k, v in rec.items()})
        return buf.getvalue()
    raise ValueError(f"unknown output format {fmt!r}")


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # repr round-trips the exact double, matching the JSON emission
        return repr(value)
    return str(value)


def binomial_pass_threshold(n: int, p: float, level: float = 0.99) -> int:
    """Largest k with P(Binomial(n, p) >= k) >= 1 - level.

    A violation count at or below this threshold is consistent with a true
    violation rate of p at the one-sided ``level`` significance.
    """
    if n <= 0:
        return 0
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level}")
    log_n_fact = math.lgamma(n + 1)
    tail = 0.0
    for k in range(n, -1, -1):
        log_pmf = (log_n_fact - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                   + k * math.log(p) + (n - k) * math.log1p(-p))
        tail += math.exp(log_pmf)
        if tail >= 1.0 - level:
            return k
    return 0


# ------------------------------------------------------------------ plumbing


def _resolve_problem(manifest: RunManifest):
    if manifest.problem is not None:
        return load_problem(manifest.problem)
    return_spec = builtin(manifest.scenario)
    return return_spec.pair, return_spec.policy


def _initial_query(pair, alpha) -> ValueQuery:
    return ValueQuery(Belief(pair.original.initial_belief), alpha)


def _derived_seed(base: int, slot: int, trial: int = 0, query: int = 0) -> int:
    ss = np.random.SeedSequence((int(base), int(slot), int(trial), int(query)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _bound_record(alpha: float, bound) -> dict:
    rec = {
        "kind": "certified_bound",
        "alpha": float(alpha),
        "bound_kind": bound.kind,
        "value": float(bound.value),
        "delta": float(bound.delta),
        "v": float(bound.v),
        "eta": float(bound.eta),
        "n_delta_used": int(bound.n_delta_used),
        "c_used": int(bound.c_used),
    }
    for name in sorted(bound.radii):
        rec[f"radius_{name}"] = float(bound.radii[name])
    return rec


def _map_ordered(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ------------------------------------------------------------------ commands


def cmd_enumerate(manifest: RunManifest) -> dict:
    """Exact oracle run: return laws, gaps, bounds, and sandwich verdicts."""
    pair, policy = _resolve_problem(manifest)
    grid = BinGrid.uniform(pair, manifest.bins)
    records = []

    for model in ("original", "simplified"):
        dist = enumerate_return_distribution(pair, policy, model=model)
        for value, prob in zip(dist.values, dist.probs):
            records.append({"kind": "return_atom", "model": model,
                            "value": float(value), "prob": float(prob)})

    traj = enumerate_trajectory_expectations(pair, policy)
    records.append({"kind": "epsilon", "value": float(traj.epsilon)})
    for level, g_val in zip(grid.edges, traj.g_at(grid.edges)):
        records.append({"kind": "g_value", "level": float(level),
                        "value": float(g_val)})

    for alpha in manifest.alphas:
        rep = bound_report(pair, policy, _initial_query(pair, alpha))
        records.append({"kind": "q_exact", "alpha": float(alpha),
                        "model": "original", "value": float(rep.q_true)})
        records.append({"kind": "q_exact", "alpha": float(alpha),
                        "model": "simplified", "value": float(rep.q_simplified)})
        for name, value, tag in (
                ("lower_uniform", rep.lower_uniform, rep.case_tags["lower"]),
                ("upper_uniform", rep.upper_uniform, rep.case_tags["upper"]),
                ("lower_tight", rep.lower_tight, "")):
            records.append({"kind": "bound", "alpha": float(alpha), "name": name,
                            "value": float(value), "case_tag": tag})
        ok = (rep.lower_uniform <= rep.q_true + SANDWICH_TOL
              and rep.q_true <= rep.upper_uniform + SANDWICH_TOL
              and rep.lower_tight <= rep.q_true + SANDWICH_TOL)
        records.append({"kind": "sandwich", "alpha": float(alpha),
                        "sandwich_ok": bool(ok),
                        "q_true": float(rep.q_true),
                        "lower_uniform": float(rep.lower_uniform),
                        "upper_uniform": float(rep.upper_uniform),
                        "lower_tight": float(rep.lower_tight)})

    return {"schema_version": SCHEMA_VERSION, "manifest": manifest.to_dict(),
            "records": records}


def cmd_certify(manifest: RunManifest) -> dict:
    """Monte-Carlo certified bounds, plus the exact values when enumerable."""
    pair, policy = _resolve_problem(manifest)
    m = pair.original
    grid = BinGrid.uniform(pair, manifest.bins)
    q0 = build_default_proposal(pair, policy)
    bound_b = q0.importance_bound

    if manifest.n_delta is None:
        n_unif = n_delta_for_uniform_bounds(
            manifest.v, manifest.delta, bound_b, m.horizon_T, m.start_k)
        n_tight = n_delta_for_tight_lower(
            manifest.eta, manifest.delta, bound_b, grid.n_bins,
            m.horizon_T, m.start_k)
        manifest = replace(
            manifest, n_delta=max(n_unif, n_tight), n_delta_derived=True,
            n_delta_formula=("max(n_delta_for_uniform_bounds,"
                             " n_delta_for_tight_lower)"))
    n_delta = manifest.n_delta

    records = [{"kind": "proposal", "importance_bound": float(bound_b),
                "n_atoms": int(q0.proposal_probs.size),
                "n_steps": int(q0.n_steps)}]

    for idx, alpha in enumerate(manifest.alphas):
        query = _initial_query(pair, alpha)
        cfg_unif = RolloutConfig(manifest.rollouts_c, manifest.particles_nx,
                                 _derived_seed(manifest.seed, _SLOT_UNIF, 0, idx))
        bounds = certify_uniform(pair, policy, query, cfg_unif, q0, n_delta,
                                 manifest.v, manifest.delta,
                                 workers=manifest.workers)
        cfg_tight = RolloutConfig(manifest.rollouts_c, manifest.particles_nx,
                                  _derived_seed(manifest.seed, _SLOT_TIGHT, 0, idx))
        bounds.append(certify_tight_lower(pair, policy, query, cfg_tight, q0,
                                          n_delta, manifest.eta, manifest.delta,
                                          grid, workers=manifest.workers))
        records.extend(_bound_record(alpha, b) for b in bounds)
        try:
            for model in ("original", "simplified"):
                records.append({"kind": "q_exact", "alpha": float(alpha),
                                "model": model,
                                "value": float(q_exact(pair, policy, query,
                                                       model=model))})
        except BudgetExceededError:
            pass  # bounds stand on their own when exact enumeration is infeasible

    return {"schema_version": SCHEMA_VERSION, "manifest": manifest.to_dict(),
            "records": records}


def cmd_concentration(manifest: RunManifest, trials: int | None = None) -> dict:
    """Repeat each estimator/certifier and report violation rates against delta.

    Every guarantee gets one record per query level it depends on, with the
    empirical violation frequency and a pass/fail at the one-sided binomial
    99% level.  Trials where a bound is not emitted (inapplicable case, or an
    upper bound omitted) are excluded from that record's evaluated count.
    """
    trials = manifest.trials if trials is None else int(trials)
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    manifest = replace(manifest, trials=trials)
    pair, policy = _resolve_problem(manifest)
    if trials == 0:
        return {"schema_version": SCHEMA_VERSION, "manifest": manifest.to_dict(),
                "records": []}
    m = pair.original
    alphas = [float(a) for a in manifest.alphas]
    delta, v, eta = manifest.delta, manifest.v, manifest.eta
    grid = BinGrid.uniform(pair, manifest.bins)
    q0 = build_default_proposal(pair, policy)
    bound_b = q0.importance_bound

    # exact ground truth (the precondition: enumeration must be feasible)
    dist_s = enumerate_return_distribution(pair, policy, model="simplified")
    dist_p = enumerate_return_distribution(pair, policy, model="original")
    traj = enumerate_trajectory_expectations(pair, policy)
    exact_s = {a: cvar_exact(dist_s, a) for a in alphas}
    exact_p = {a: cvar_exact(dist_p, a) for a in alphas}
    # worst-case width of a rollout return: per-step mean costs stay inside
    # the global state-cost range
    costs = m.state_cost
    value_range = float((costs.max() - costs.min()) * (m.horizon_T - m.start_k + 1))
    # one fixed probe level for the pointwise gap estimate: the grid edge
    # nearest the median simplified return, where the curve is active
    level = float(grid.edges[np.argmin(
        np.abs(grid.edges - np.median(dist_s.values)))])
    g_exact_level = float(traj.g_at(level)[0])
    probe = np.linspace(grid.edges[0], grid.edges[-1], 241)
    g_exact_probe = traj.g_at(probe)

    if manifest.n_delta is not None:
        nd_eps = nd_g = nd_h = nd_unif = nd_tight = manifest.n_delta
    else:
        nd_eps = n_delta_for_epsilon(v, delta, bound_b, m.horizon_T, m.start_k)
        nd_g = n_delta_for_g(v, delta, bound_b, m.horizon_T, m.start_k)
        nd_h = n_delta_for_h(v, delta, bound_b, grid.n_bins,
                             m.horizon_T, m.start_k)
        nd_unif = n_delta_for_uniform_bounds(v, delta, bound_b,
                                             m.horizon_T, m.start_k)
        nd_tight = n_delta_for_tight_lower(eta, delta, bound_b, grid.n_bins,
                                           m.horizon_T, m.start_k)

    def one_trial(t: int) -> dict:
        events = {}
        cfg = RolloutConfig(manifest.rollouts_c, manifest.particles_nx,
                            _derived_seed(manifest.seed, _SLOT_POOL, t))
        pool = _simplified_return_pool(pair, policy,
                                       _initial_query(pair, alphas[0]), cfg, 1)
        for alpha in alphas:
            radii = deviation_radii(pool.size, alpha, delta, value_range)
            q_hat = cvar_estimate_sorted(pool, alpha)
            events[("cvar_estimate_upper", alpha)] = \
                exact_s[alpha] - q_hat > radii.upper
            events[("cvar_estimate_lower", alpha)] = \
                q_hat - exact_s[alpha] > radii.lower

        rng = np.random.default_rng(_derived_seed(manifest.seed, _SLOT_EPS, t))
        eps_hat = estimate_epsilon(q0, pair, policy, nd_eps, rng)
        events[("epsilon_within_2v", None)] = abs(eps_hat - traj.epsilon) > 2.0 * v

        rng = np.random.default_rng(_derived_seed(manifest.seed, _SLOT_G, t))
        g_hat = estimate_g(q0, pair, policy, nd_g, [level], rng)
        events[("g_pointwise", None)] = abs(float(g_hat[0]) - g_exact_level) > v

        rng = np.random.default_rng(_derived_seed(manifest.seed, _SLOT_H, t))
        h_plus, _ = binned_h(estimate_g(q0, pair, policy, nd_h, grid.edges, rng),
                             grid)
        events[("h_envelope_uniform", None)] = \
            bool(np.any(g_exact_probe - h_plus.at(probe) > v))

        for idx, alpha in enumerate(alphas):
            query = _initial_query(pair, alpha)
            cfg_u = RolloutConfig(manifest.rollouts_c, manifest.particles_nx,
                                  _derived_seed(manifest.seed, _SLOT_UNIF, t, idx))
            try:
                bounds = certify_uniform(pair, policy, query, cfg_u, q0,
                                         nd_unif, v, delta, workers=1)
            except InapplicableCaseError:
                events[("uniform_lower", alpha)] = None
                events[("uniform_upper", alpha)] = None
            else:
                lower = next(b for b in bounds if b.kind in ("L1", "L2"))
                slack = (lower.radii["lambda_1"] + lower.radii["lambda_2"]
                         if lower.kind == "L1"
                         else lower.radii["eta_1"] + lower.radii["eta_2"])
                events[("uniform_lower", alpha)] = \
                    lower.value - exact_p[alpha] > slack
                uppers = [b for b in bounds if b.kind == "U"]
                events[("uniform_upper", alpha)] = (
                    exact_p[alpha] - uppers[0].value > uppers[0].radii["lambda"]
                    if uppers else None)
            cfg_t = RolloutConfig(manifest.rollouts_c, manifest.particles_nx,
                                  _derived_seed(manifest.seed, _SLOT_TIGHT, t, idx))
            tight = certify_tight_lower(pair, policy, query, cfg_t, q0,
                                        nd_tight, eta, delta, grid, workers=1)
            events[("tight_lower", alpha)] = tight.value - exact_p[alpha] > tight.v
        return events

    results = _map_ordered(one_trial, range(trials), manifest.workers)

    guarantee_keys = []
    for name in ("cvar_estimate_upper", "cvar_estimate_lower"):
        guarantee_keys += [(name, a, None) for a in alphas]
    guarantee_keys += [("epsilon_within_2v", None, nd_eps),
                       ("g_pointwise", None, nd_g),
                       ("h_envelope_uniform", None, nd_h)]
    for name, nd in (("uniform_lower", nd_unif), ("uniform_upper", nd_unif),
                     ("tight_lower", nd_tight)):
        guarantee_keys += [(name, a, nd) for a in alphas]

    records = []
    for name, alpha, nd in guarantee_keys:
        outcomes = [res[(name, alpha)] for res in results]
        evaluated = sum(o is not None for o in outcomes)
        violations = sum(bool(o) for o in outcomes if o is not None)
        threshold = binomial_pass_threshold(evaluated, delta)
        records.append({
            "kind": "guarantee",
            "name": name,
            "alpha": alpha,
            "delta": float(delta),
            "n_delta": None if nd is None else int(nd),
            "trials": int(trials),
            "evaluated": int(evaluated),
            "violations": int(violations),
            "frequency": (violations / evaluated) if evaluated else 0.0,
            "threshold": int(threshold),
            "passed": bool(violations <= threshold),
        })

    return {"schema_version": SCHEMA_VERSION, "manifest": manifest.to_dict(),
            "records": records}


# ----------------------------------------------------------------- interface


def _parse_alphas(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("--alpha needs at least one level")
    alphas = tuple(float(p) for p in parts)
    for a in alphas:
        if not (0.0 < a <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {a}")
    return alphas


def _parse_ndelta(text: str) -> int | None:
    if text == "auto":
        return None
    n = int(text)
    if n < 1:
        raise ValueError(f"--ndelta must be >= 1 or 'auto', got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskgap",
        description="Tail-risk value reports for a POMDP policy evaluated "
                    "under a simplified model: exact enumeration, certified "
                    "bounds, and concentration-rate validation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
            ("enumerate", "exact return laws, gaps, bounds, sandwich verdicts"),
            ("certify", "Monte-Carlo certified bounds with deviation radii"),
            ("concentration", "violation-rate validation of each guarantee")):
        cmd = sub.add_parser(name, help=doc)
        source = cmd.add_mutually_exclusive_group(required=True)
        source.add_argument("--problem", metavar="PATH",
                            help="JSON problem file")
        source.add_argument("--scenario", metavar="NAME",
                            help=f"built-in scenario: {', '.join(builtin_names())}")
        cmd.add_argument("--alpha", default="0.25", metavar="LIST",
                         help="comma-separated tail levels in (0, 1]")
        cmd.add_argument("--delta", type=float, default=0.1, metavar="F",
                         help="per-guarantee failure probability")
        cmd.add_argument("--v", type=float, default=0.1, metavar="F",
                         help="gap-accuracy parameter")
        cmd.add_argument("--eta", type=float, default=0.25, metavar="F",
                         help="envelope slack for the tight lower bound")
        cmd.add_argument("--rollouts", type=int, default=500, metavar="C")
        cmd.add_argument("--particles", type=int, default=200, metavar="NX")
        cmd.add_argument("--ndelta", default="auto", metavar="N|auto",
                         help="importance-sampling draws; 'auto' derives the "
                              "count from the certified-rate formulas")
        cmd.add_argument("--bins", type=int, default=8, metavar="I")
        cmd.add_argument("--seed", type=int, default=0, metavar="S")
        cmd.add_argument("--trials", type=int, default=100, metavar="N")
        cmd.add_argument("--out", metavar="PATH",
                         help="write the report here instead of stdout")
        cmd.add_argument("--workers", type=int, default=None, metavar="N",
                         help="worker threads (default: $RISKGAP_WORKERS or 1)")
        cmd.add_argument("--format", dest="fmt", choices=("json", "csv"),
                         default="json")
    return parser


def _manifest_from_args(args: argparse.Namespace) -> RunManifest:
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("RISKGAP_WORKERS", "1"))
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return RunManifest(
        command=args.command,
        scenario=args.scenario,
        problem=args.problem,
        alphas=_parse_alphas(args.alpha),
        delta=float(args.delta),
        v=float(args.v),
        eta=float(args.eta),
        rollouts_c=int(args.rollouts),
        particles_nx=int(args.particles),
        n_delta=_parse_ndelta(args.ndelta),
        n_delta_derived=False,
        n_delta_formula="",
        bins=int(args.bins),
        seed=int(args.seed),
        trials=int(args.trials),
        out=args.out,
        workers=int(workers),
        fmt=args.fmt,
    )


_COMMANDS = {
    "enumerate": cmd_enumerate,
    "certify": cmd_certify,
    "concentration": cmd_concentration,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse already printed its diagnostic
        return 0 if exc.code in (0, None) else 2
    try:
        manifest = _manifest_from_args(args)
        report = _COMMANDS[manifest.command](manifest)
        text = render_report(report, manifest.fmt)
    except InapplicableCaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DegenerateWeightsError as exc:
        # the problem/particle configuration cannot be simulated as given
        print(f"error: {exc} (increase --particles or smooth the observation "
              "model)", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if manifest.out is not None:
        Path(manifest.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
