"""Scalar kernel for uncertain-label classification theory.

Everything in this module is a pure function of floats (or arrays, where
broadcasting is natural).  The building blocks:

- ``gaussian_tail``      upper tail Q(x) of the standard normal,
- ``posterior_mean``     MMSE estimate of a ±1 signal with prior mean eps
                         observed through a Gaussian channel,
- ``overlap_integrand``  the scalar function whose Gaussian average gives the
                         signal/estimate alignment of that channel,
- ``channel_overlap``    that alignment F_eps(q) as a function of the channel
                         SNR q, computed by Gauss-Hermite quadrature,
- ``channel_overlap_approx`` the simplified surrogate that keeps only the
                         eps**2 dependence, exact at eps in {0, ±1}.

Conventions.  A sample's label confidence couple (d1, d2), d1 + d2 = 1, is
summarised by eps = d2 - d1 in [-1, 1]: class 1 maps to y = -1, class 2 to
y = +1, so eps is the prior mean of y.  eps = 0 means unlabeled, |eps| = 1
certainty.  All overlap-type quantities depend on eps only through eps**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "QuadratureRule",
    "hermite_rule",
    "DEFAULT_RULE",
    "gaussian_tail",
    "posterior_mean",
    "overlap_integrand",
    "overlap_integrand_series",
    "overlap_integrand_approx",
    "gauss_expect",
    "channel_overlap",
    "channel_overlap_approx",
    "approx_error_grid",
]

_SQRT2 = math.sqrt(2.0)


def _check_eps(eps) -> np.ndarray:
    e = np.asarray(eps, dtype=float)
    if not np.all(np.isfinite(e)):
        raise ValueError("eps must be finite")
    if np.any(np.abs(e) > 1.0):
        raise ValueError("eps must lie in [-1, 1]")
    return e


def _check_snr(q) -> float:
    qf = float(q)
    if not math.isfinite(qf):
        raise ValueError("q must be finite")
    if qf < 0.0:
        raise ValueError("q must be nonnegative")
    return qf


@dataclass(frozen=True)
class QuadratureRule:
    """Probability rule (nodes, weights) for expectations over Z ~ N(0, 1).

    Weights are nonnegative and sum to one; nodes come in ±z pairs carrying
    equal weights, so odd moments vanish to rounding and E[Z^2] is 1 to high
    accuracy.  Arrays are stored read-only.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        z = np.array(self.nodes, dtype=float)
        w = np.array(self.weights, dtype=float)
        if z.ndim != 1 or w.ndim != 1 or z.shape != w.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        order = np.argsort(z)
        zs, ws = z[order], w[order]
        if np.max(np.abs(zs + zs[::-1])) > 1e-12 * max(1.0, float(np.max(np.abs(zs)))):
            raise ValueError("nodes must be symmetric about 0")
        if np.max(np.abs(ws - ws[::-1])) > 1e-12:
            raise ValueError("paired nodes must carry equal weights")
        if abs(float(w @ z)) > 1e-12:
            raise ValueError("rule must integrate z to 0 within 1e-12")
        if abs(float(w @ (z * z)) - 1.0) > 1e-8:
            raise ValueError("rule must integrate z**2 to 1 within 1e-8")
        z.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.nodes.size


def hermite_rule(n: int = 61) -> QuadratureRule:
    """Gauss-Hermite rule rescaled to the standard normal measure.

    The physicists' nodes x_j are mapped to z_j = sqrt(2) x_j and the weights
    normalised to a probability measure.  61 nodes resolve the bounded smooth
    integrands used here far below every tolerance in this package.
    """
    x, w = np.polynomial.hermite.hermgauss(int(n))
    weights = w / math.sqrt(math.pi)
    weights = weights / weights.sum()
    return QuadratureRule(nodes=_SQRT2 * x, weights=weights)


DEFAULT_RULE = hermite_rule(61)


def gaussian_tail(x):
    """Upper tail Q(x) = P(Z > x) of the standard normal.

    Strictly decreasing, with Q(x) + Q(-x) = 1.  Accepts a scalar or array;
    non-finite values are rejected.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("gaussian_tail requires finite input")
    out = 0.5 * special.erfc(arr / _SQRT2)
    return float(out) if arr.ndim == 0 else out


def posterior_mean(eps, t):
    """Posterior mean of a ±1 signal with prior mean eps at channel output t.

        f_eps(t) = (tanh t + eps) / (1 + eps tanh t)

    Monotone nondecreasing in t, valued in [-1, 1], with the odd symmetry
    f_eps(-t) = -f_{-eps}(t).  The degenerate priors eps = ±1 pin the
    estimate at ±1 for every t (returned exactly, bypassing the 0/0 ratio at
    saturated tanh).
    """
    e = _check_eps(eps)
    th = np.tanh(np.asarray(t, dtype=float))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (th + e) / (1.0 + e * th)
    out = np.where(e == 1.0, 1.0, out)
    out = np.where(e == -1.0, -1.0, out)
    return float(out) if out.ndim == 0 else out


def _psi_from_tanh(e2, th):
    """Overlap integrand as a function of eps**2 and tanh(t), broadcasting."""
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (th + e2 * (1.0 - th - th * th)) / (1.0 - e2 * th * th)
    return np.where(e2 == 1.0, 1.0, out)


def _psi_tilde_from_tanh(e2, th):
    """Simplified integrand tanh t + eps**2 (1 - tanh t), broadcasting."""
    return np.where(e2 == 1.0, 1.0, th + e2 * (1.0 - th))


def overlap_integrand(eps, t):
    """Integrand whose Gaussian average gives the channel overlap.

        psi_eps(t) = [tanh t + eps^2 (1 - tanh t - tanh^2 t)] / [1 - eps^2 tanh^2 t]

    Depends on eps only through eps**2; psi_eps(0) = eps**2, psi_0 = tanh and
    psi_{±1} ≡ 1 (the |eps| = 1, |tanh t| -> 1 limit is taken exactly).  For
    the confidence couple (d1, d2) = ((1-eps)/2, (1+eps)/2) it equals the
    signal-weighted average d2 f_eps(t) - d1 f_eps(-t) of the posterior mean.
    """
    e = _check_eps(eps)
    th = np.tanh(np.asarray(t, dtype=float))
    out = _psi_from_tanh(e * e, th)
    return float(out) if out.ndim == 0 else out


def overlap_integrand_series(eps, t, k_max: int):
    """Partial sum of the series form of the overlap integrand.

        tanh t + eps^2 (1 - tanh t)
            - (1 - eps^2)(1 - tanh t) * sum_{k=1}^{k_max} (eps tanh t)^{2k}

    Requires |eps| < 1 (use ``overlap_integrand`` for the degenerate priors);
    converges to the closed form as k_max grows since (eps tanh t)^2 < 1.
    """
    e = _check_eps(eps)
    if np.any(np.abs(e) == 1.0):
        raise ValueError("series form requires |eps| < 1")
    k = int(k_max)
    if k < 1:
        raise ValueError("k_max must be a positive integer")
    th = np.tanh(np.asarray(t, dtype=float))
    r = (e * th) ** 2
    partial = r * (1.0 - r**k) / (1.0 - r)
    out = th + e * e * (1.0 - th) - (1.0 - e * e) * (1.0 - th) * partial
    return float(out) if np.ndim(out) == 0 else out


def overlap_integrand_approx(eps, t):
    """Simplified integrand tanh t + eps^2 (1 - tanh t).

    Coincides with ``overlap_integrand`` at eps in {0, ±1} and drops the
    higher-order series terms elsewhere, isolating the role of eps**2.
    """
    e = _check_eps(eps)
    th = np.tanh(np.asarray(t, dtype=float))
    out = _psi_tilde_from_tanh(e * e, th)
    return float(out) if out.ndim == 0 else out


def gauss_expect(g, q, rule: QuadratureRule | None = None) -> float:
    """E[g(q + sqrt(q) Z)] for Z ~ N(0, 1), by weighted quadrature nodes.

    ``g`` must accept an ndarray and be bounded on the real line; q = 0
    short-circuits to g(0) exactly.
    """
    qf = _check_snr(q)
    if rule is None:
        rule = DEFAULT_RULE
    if qf == 0.0:
        return float(g(np.float64(0.0)))
    pts = qf + math.sqrt(qf) * rule.nodes
    return float(rule.weights @ np.asarray(g(pts), dtype=float))


def channel_overlap(eps, q, rule: QuadratureRule | None = None) -> float:
    """Alignment F_eps(q) = E[S * E[S|U]] of the Gaussian channel U = sqrt(q) S + Z.

    S is ±1 with prior mean eps.  Equals eps**2 at q = 0, is nondecreasing in
    q, saturates toward 1, and is identically 1 for the certain priors
    |eps| = 1 (returned exactly).
    """
    e = float(_check_eps(float(eps)))
    qf = _check_snr(q)
    if rule is None:
        rule = DEFAULT_RULE
    e2 = e * e
    if e2 == 1.0:
        return 1.0
    if qf == 0.0:
        return e2
    th = np.tanh(qf + math.sqrt(qf) * rule.nodes)
    return float(rule.weights @ _psi_from_tanh(e2, th))


def channel_overlap_approx(eps, q, rule: QuadratureRule | None = None) -> float:
    """Simplified channel overlap, the quadrature of ``overlap_integrand_approx``.

    Satisfies exactly eps**2 + (1 - eps**2) * channel_overlap(0, q); shares
    the q = 0 and |eps| = 1 values with ``channel_overlap``.
    """
    e = float(_check_eps(float(eps)))
    qf = _check_snr(q)
    if rule is None:
        rule = DEFAULT_RULE
    e2 = e * e
    if e2 == 1.0:
        return 1.0
    if qf == 0.0:
        return e2
    th = np.tanh(qf + math.sqrt(qf) * rule.nodes)
    return float(rule.weights @ _psi_tilde_from_tanh(e2, th))


def approx_error_grid(
    eps_values, q_values, rule: QuadratureRule | None = None
) -> np.ndarray:
    """Relative error |F_eps - F~_eps| / F_eps on an (eps, q) grid.

    Returns an array of shape (len(eps_values), len(q_values)).  Rows at
    eps in {0, 1} are exactly zero (the surrogate is exact there); all q must
    be positive so the denominator cannot vanish.
    """
    e = _check_eps(np.atleast_1d(np.asarray(eps_values, dtype=float)))
    q = np.atleast_1d(np.asarray(q_values, dtype=float))
    if not np.all(np.isfinite(q)) or np.any(q <= 0.0):
        raise ValueError("q grid values must be finite and positive")
    if rule is None:
        rule = DEFAULT_RULE
    th = np.tanh(q[:, None] + np.sqrt(q)[:, None] * rule.nodes[None, :])  # (Q, N)
    e2 = (e * e)[:, None, None]  # (E, 1, 1)
    big = _psi_from_tanh(e2, th[None, :, :]) @ rule.weights  # (E, Q)
    small = _psi_tilde_from_tanh(e2, th[None, :, :]) @ rule.weights  # (E, Q)
    return np.abs(big - small) / big
