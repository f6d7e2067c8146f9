"""Exact and empirical CVaR primitives for bounded scalar outcomes.

Outcomes are treated as costs, so all tail functionals look at the
*upper* tail: CVaR at level ``alpha`` is the expected value of the worst
(largest) ``alpha`` fraction of outcomes.  ``alpha -> 1`` recovers the
mean, ``alpha -> 0`` approaches the essential supremum.

Two empirical estimators are provided.  ``cvar_estimate_inf`` evaluates
the variational form ``inf_w { w + mean((X - w)^+) / alpha }`` over the
sample points, where the infimum is attained.  ``cvar_estimate_sorted``
accumulates order-statistic increments and is algebraically identical;
the pair is kept so each can serve as an oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Atoms closer than this are considered the same outcome; probability
# vectors may deviate from 1 by at most this much before rejection.
MERGE_TOL = 1e-12
PROB_TOL = 1e-12


class DistributionError(ValueError):
    """Atoms and probabilities do not form a valid distribution."""


def _finite_1d(x, name: str = "sample") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


@dataclass(frozen=True)
class ConfidenceLevel:
    """Tail mass level in the open interval (0, 1)."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 1.0):
            raise ValueError(f"alpha must lie strictly inside (0, 1), got {a}")
        object.__setattr__(self, "alpha", a)


def _alpha_of(level) -> float:
    """Accept a ConfidenceLevel or a bare float, returning a validated float."""
    if isinstance(level, ConfidenceLevel):
        return level.alpha
    return ConfidenceLevel(float(level)).alpha


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported distribution in canonical form.

    Construction sorts atoms by value, merges values within ``MERGE_TOL``
    of their predecessor (probabilities add, the smallest value of the
    run is kept), drops zero-probability atoms, and renormalises.  A
    probability vector whose sum deviates from 1 by more than
    ``PROB_TOL``, or containing a negative entry, is rejected.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = _finite_1d(self.values, "values")
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != values.shape:
            raise DistributionError(
                f"probs shape {probs.shape} does not match values shape {values.shape}"
            )
        if not np.all(np.isfinite(probs)) or np.any(probs < 0.0):
            raise DistributionError("probabilities must be finite and non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")

        order = np.argsort(values, kind="stable")
        values = values[order]
        probs = probs[order]

        # Merge runs of near-identical values (gap to predecessor <= MERGE_TOL).
        out_v, out_p = [], []
        for v, p in zip(values, probs):
            if out_v and v - out_v[-1] <= MERGE_TOL:
                out_p[-1] += p
            else:
                out_v.append(v)
                out_p.append(p)
        values = np.array(out_v, dtype=float)
        probs = np.array(out_p, dtype=float)

        keep = probs > 0.0
        if not np.any(keep):
            raise DistributionError("distribution has no positive-probability atom")
        values = values[keep]
        probs = probs[keep] / probs[keep].sum()

        values.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDistribution":
        return cls(np.array([value]), np.array([1.0]))

    @classmethod
    def from_sample(cls, sample) -> "DiscreteDistribution":
        """Empirical distribution: equal weight per observation."""
        arr = _finite_1d(sample)
        return cls(arr, np.full(arr.size, 1.0 / arr.size))

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def cdf(self) -> np.ndarray:
        """Cumulative probabilities aligned with ``values`` (right-continuous)."""
        c = np.cumsum(self.probs)
        c[-1] = 1.0
        return c

    def cdf_at(self, x) -> np.ndarray:
        """Evaluate P(X <= x) at arbitrary points."""
        pts = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.values, pts, side="right")
        return np.concatenate(([0.0], self.cdf()))[idx]

    @property
    def inf_support(self) -> float:
        return float(self.values[0])

    @property
    def sup_support(self) -> float:
        return float(self.values[-1])


def cvar_exact(dist: DiscreteDistribution, alpha) -> float:
    """CVaR of a discrete distribution: mean of the worst ``alpha`` tail mass.

    Equals ``inf_w { w + E[(X - w)^+] / alpha }``; for atomic laws the
    infimum is attained at an atom, which the test-suite exploits as an
    independent oracle.
    """
    a = _alpha_of(alpha)
    # Capped cumulative mass from the top; increments are the portion of
    # each atom's probability that falls inside the alpha tail.
    tail = np.minimum(np.cumsum(dist.probs[::-1]), a)
    taken = np.diff(np.concatenate(([0.0], tail)))
    return float(np.dot(taken, dist.values[::-1]) / a)


def var_exact(dist: DiscreteDistribution, alpha) -> float:
    """Value-at-risk: largest atom whose CDF value does not exceed 1 - alpha.

    When even the smallest atom overshoots (e.g. a point mass), that
    smallest atom is returned.
    """
    a = _alpha_of(alpha)
    cdf = dist.cdf()
    ok = np.nonzero(cdf <= 1.0 - a)[0]
    if ok.size == 0:
        return float(dist.values[0])
    return float(dist.values[ok[-1]])


def cvar_estimate_inf(sample, alpha) -> float:
    """Empirical CVaR via the variational form, minimised over sample points."""
    a = _alpha_of(alpha)
    x = np.sort(_finite_1d(sample))
    n = x.size
    # For w = x[j]: sum_i (x_i - w)^+ = suffix_sum[j] - (n - 1 - j) * w
    suffix = np.concatenate((np.cumsum(x[::-1])[::-1][1:], [0.0]))
    counts = n - 1 - np.arange(n)
    phi = x + (suffix - counts * x) / (n * a)
    return float(phi.min())


def cvar_estimate_sorted(sample, alpha) -> float:
    """Empirical CVaR from order statistics.

    With ascending order statistics ``z_1 <= ... <= z_n``::

        C = z_n - (1/alpha) * sum_i (z_{i+1} - z_i) * (i/n - (1 - alpha))^+

    The increment below ``z_1`` carries coefficient ``(0 - (1-alpha))^+ = 0``
    for every ``alpha < 1``, so the estimator is translation equivariant
    and agrees exactly with ``cvar_estimate_inf``.
    """
    a = _alpha_of(alpha)
    z = np.sort(_finite_1d(sample))
    n = z.size
    if n == 1:
        return float(z[0])
    coeff = np.maximum(np.arange(1, n) / n - (1.0 - a), 0.0)
    return float(z[-1] - np.dot(np.diff(z), coeff) / a)


@dataclass(frozen=True)
class DeviationRadii:
    """One-sided deviation radii for the sorted-form CVaR estimator.

    For i.i.d. samples supported on an interval of width ``value_range``:

    * ``P(CVaR - estimate > upper) <= delta``  with
      ``upper = value_range * sqrt(5 * ln(3/delta) / (alpha * n))``;
    * ``lower = (value_range / alpha) * sqrt(ln(1/delta) / (2n))`` is the
      companion radius for the opposite deviation.
    """

    upper: float
    lower: float


def deviation_radii(n: int, alpha, delta: float, value_range: float) -> DeviationRadii:
    a = _alpha_of(alpha)
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if not (np.isfinite(value_range) and value_range >= 0.0):
        raise ValueError(f"value_range must be finite and >= 0, got {value_range}")
    upper = value_range * np.sqrt(5.0 * np.log(3.0 / delta) / (a * n))
    lower = (value_range / a) * np.sqrt(np.log(1.0 / delta) / (2.0 * n))
    return DeviationRadii(upper=float(upper), lower=float(lower))
