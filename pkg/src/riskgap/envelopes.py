"""CVaR bounds for a distribution known only through a CDF neighbourhood.

Given a reference law ``Y`` and a bound on how far the unknown CDF of
``X`` may sit from that of ``Y`` — either a uniform gap ``eps`` with
``sup_y |F_X(y) - F_Y(y)| <= eps`` or a pointwise envelope ``g`` with
``|F_X(y) - F_Y(y)| <= g(y)`` — these routines return certified lower
and upper bounds on ``CVaR_alpha(X)`` computed from ``Y`` alone.

The pointwise route builds the dominating CDF ``min(1, F_Y + g)``
explicitly; its CVaR never exceeds that of any ``X`` whose CDF stays
inside the envelope, and it is never looser than the uniform bound with
``eps = sup g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .risk import DiscreteDistribution, _alpha_of, _finite_1d, cvar_exact


class InvalidEnvelopeError(ValueError):
    """Envelope data violates non-negativity or monotonicity."""


class UndefinedBoundError(ValueError):
    """The requested quantile bound does not exist for the given envelope."""


@dataclass(frozen=True)
class SupportBounds:
    """Known enclosure of the image of both distributions."""

    inf_img: float
    sup_img: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.inf_img) and np.isfinite(self.sup_img)):
            raise ValueError("support bounds must be finite")
        if self.inf_img > self.sup_img:
            raise ValueError(f"inf_img {self.inf_img} exceeds sup_img {self.sup_img}")


@dataclass(frozen=True)
class UniformEnvelope:
    """Uniform CDF gap: sup_y |F_X(y) - F_Y(y)| <= eps."""

    eps: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.eps) and self.eps >= 0.0):
            raise ValueError(f"eps must be finite and >= 0, got {self.eps}")


@dataclass(frozen=True)
class PointwiseEnvelope:
    """Right-continuous non-decreasing step function, zero left of the
    first breakpoint (so it vanishes at -inf).

    ``values[i]`` is the envelope on ``[breakpoints[i], breakpoints[i+1])``.
    An empty envelope is the zero function.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or vals.shape != bp.shape:
            raise InvalidEnvelopeError("breakpoints and values must be 1-D and aligned")
        if bp.size:
            if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(vals)):
                raise InvalidEnvelopeError("envelope data must be finite")
            if np.any(np.diff(bp) <= 0.0):
                raise InvalidEnvelopeError("breakpoints must be strictly increasing")
            if np.any(vals < 0.0):
                raise InvalidEnvelopeError("envelope values must be non-negative")
            if np.any(np.diff(vals) < 0.0):
                raise InvalidEnvelopeError("envelope values must be non-decreasing")
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls) -> "PointwiseEnvelope":
        return cls(np.empty(0), np.empty(0))

    def at(self, x) -> np.ndarray:
        """Evaluate the step function at each point of ``x``."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if self.breakpoints.size == 0:
            return np.zeros(xs.shape)
        idx = np.searchsorted(self.breakpoints, xs, side="right")
        out = np.where(idx > 0, self.values[np.maximum(idx - 1, 0)], 0.0)
        return out

    @property
    def sup_value(self) -> float:
        return float(self.values[-1]) if self.values.size else 0.0


def density_envelope_to_g(points, weights) -> PointwiseEnvelope:
    """Accumulate a non-negative discrete density bound into a CDF-gap
    envelope: ``g(z) = sum of weights at points <= z``."""
    pts = _finite_1d(points, "points")
    w = np.asarray(weights, dtype=float)
    if w.shape != pts.shape:
        raise InvalidEnvelopeError("points and weights must be aligned")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise InvalidEnvelopeError("density weights must be finite and non-negative")
    order = np.argsort(pts, kind="stable")
    pts, w = pts[order], w[order]
    # collapse duplicate points, summing their weights
    uniq, inverse = np.unique(pts, return_inverse=True)
    acc = np.zeros(uniq.size)
    np.add.at(acc, inverse, w)
    return PointwiseEnvelope(uniq, np.cumsum(acc))


# ---------------------------------------------------------------- uniform gap


def _eps_of(env) -> float:
    if isinstance(env, UniformEnvelope):
        return env.eps
    return UniformEnvelope(float(env)).eps


def _check_support(dist: DiscreteDistribution, support: SupportBounds) -> None:
    if dist.inf_support < support.inf_img - 1e-9 or dist.sup_support > support.sup_img + 1e-9:
        raise ValueError(
            "distribution support "
            f"[{dist.inf_support}, {dist.sup_support}] escapes declared bounds "
            f"[{support.inf_img}, {support.sup_img}]"
        )


def _scaled_tail_term(dist: DiscreteDistribution, eps: float, inf_img: float) -> float:
    # eps * CVaR_eps(Y) with the limiting conventions: 0 at eps == 0, the
    # mean at eps == 1, and the quantile-integral extension (levels below
    # probability 0 contribute inf_img) when eps > 1.
    if eps == 0.0:
        return 0.0
    if eps < 1.0:
        return eps * cvar_exact(dist, eps)
    return (eps - 1.0) * inf_img + dist.mean()


def upper_case_tag(alpha, env) -> str:
    return "shifted_tail" if _eps_of(env) < _alpha_of(alpha) else "support_cap"


def lower_case_tag(alpha, env) -> str:
    return "shifted_tail" if _eps_of(env) + _alpha_of(alpha) < 1.0 else "mean_anchor"


def uniform_upper(dist: DiscreteDistribution, alpha, env, support: SupportBounds) -> float:
    """Upper bound on CVaR_alpha(X) from CVaR levels of Y and a uniform gap.

    ``eps < alpha`` shifts the tail level down to ``alpha - eps`` and pays
    for the displaced mass at the supremum; otherwise only the support cap
    remains.
    """
    a = _alpha_of(alpha)
    eps = _eps_of(env)
    _check_support(dist, support)
    if eps < a:
        return ((a - eps) / a) * cvar_exact(dist, a - eps) + (eps / a) * support.sup_img
    return support.sup_img


def uniform_lower(dist: DiscreteDistribution, alpha, env, support: SupportBounds) -> float:
    """Lower bound on CVaR_alpha(X), the mirror of :func:`uniform_upper`."""
    a = _alpha_of(alpha)
    eps = _eps_of(env)
    _check_support(dist, support)
    if eps + a < 1.0:
        head = ((a + eps) / a) * cvar_exact(dist, a + eps)
        return head - _scaled_tail_term(dist, eps, support.inf_img) / a
    anchor = (a + eps - 1.0) * support.inf_img + dist.mean()
    return (anchor - _scaled_tail_term(dist, eps, support.inf_img)) / a


# ---------------------------------------------------------------- pointwise gap


def dominated_cdf(dist: DiscreteDistribution, env: PointwiseEnvelope) -> DiscreteDistribution:
    """Distribution of the dominating CDF ``min(1, F_Y + g)``.

    Its atoms live on the union of ``Y`` atoms and envelope breakpoints;
    monotonicity of ``g`` makes the clipped sum a valid CDF.
    """
    grid = np.union1d(dist.values, env.breakpoints)
    idx = np.searchsorted(dist.values, grid, side="right")
    cdf = dist.cdf()
    f_grid = np.where(idx > 0, cdf[np.maximum(idx - 1, 0)], 0.0)
    h = np.minimum(1.0, f_grid + env.at(grid))
    masses = np.diff(np.concatenate(([0.0], h)))
    return DiscreteDistribution(grid, masses)


def tight_lower(dist: DiscreteDistribution, env: PointwiseEnvelope, alpha) -> float:
    """Lower bound on CVaR_alpha(X) when |F_X - F_Y| <= g pointwise."""
    return cvar_exact(dominated_cdf(dist, env), _alpha_of(alpha))


def _quantile_tail_integral(grid: np.ndarray, h: np.ndarray, alpha: float) -> float:
    """(1/alpha) * integral over (1-alpha, 1] of tau -> inf{z : h(z) >= tau}.

    ``h`` is a step function on ``grid`` (value held to the right).  The
    generalised inverse depends only on the running maximum of ``h``.
    """
    run = np.maximum.accumulate(h)
    prev = np.concatenate(([0.0], run[:-1]))
    seg = np.minimum(run, 1.0) - np.maximum(prev, 1.0 - alpha)
    seg = np.maximum(seg, 0.0)
    return float(np.dot(grid, seg) / alpha)


def raw_quantile_lower(dist: DiscreteDistribution, env: PointwiseEnvelope, alpha) -> float:
    """Quantile-form lower bound using the raised CDF ``F_Y + g``.

    Always defined (``F_Y + g`` reaches 1); equals
    ``cvar_exact(dominated_cdf(Y, g), alpha)`` for a conforming envelope.
    """
    a = _alpha_of(alpha)
    grid = np.union1d(dist.values, env.breakpoints)
    idx = np.searchsorted(dist.values, grid, side="right")
    cdf = dist.cdf()
    f_grid = np.where(idx > 0, cdf[np.maximum(idx - 1, 0)], 0.0)
    return _quantile_tail_integral(grid, f_grid + env.at(grid), a)


def raw_quantile_upper(dist: DiscreteDistribution, env: PointwiseEnvelope, alpha) -> float:
    """Quantile-form upper bound using the lowered CDF ``F_Y - g``.

    Raises :class:`UndefinedBoundError` when ``F_Y - g`` never reaches 1,
    because levels ``tau`` near 1 then have an empty quantile set.
    """
    a = _alpha_of(alpha)
    grid = np.union1d(dist.values, env.breakpoints)
    idx = np.searchsorted(dist.values, grid, side="right")
    cdf = dist.cdf()
    f_grid = np.where(idx > 0, cdf[np.maximum(idx - 1, 0)], 0.0)
    h = f_grid - env.at(grid)
    top = float(np.max(h)) if h.size else 0.0
    if top < 1.0 - 1e-12:
        raise UndefinedBoundError(
            f"lowered CDF peaks at {top}; quantile levels above it are empty"
        )
    h = np.minimum(h, 1.0)
    h[h >= 1.0 - 1e-12] = 1.0
    return _quantile_tail_integral(grid, h, a)


# ---------------------------------------------------------------- helpers


def cdf_gap_envelope(dist_x: DiscreteDistribution, dist_y: DiscreteDistribution):
    """Pointwise |F_X - F_Y| on the merged grid, monotonised by running max.

    Returns ``(envelope, sup_gap)``; mainly a validation-harness helper for
    manufacturing conforming envelopes from two known laws.
    """
    grid = np.union1d(dist_x.values, dist_y.values)
    fx = np.where(
        np.searchsorted(dist_x.values, grid, side="right") > 0,
        dist_x.cdf()[np.maximum(np.searchsorted(dist_x.values, grid, side="right") - 1, 0)],
        0.0,
    )
    fy = np.where(
        np.searchsorted(dist_y.values, grid, side="right") > 0,
        dist_y.cdf()[np.maximum(np.searchsorted(dist_y.values, grid, side="right") - 1, 0)],
        0.0,
    )
    gap = np.abs(fx - fy)
    env = PointwiseEnvelope(grid, np.maximum.accumulate(gap))
    return env, float(gap.max())
