"""Desk-scale Monte Carlo verification of the overlap theory.

Synthetic two-class Gaussian data with per-sample label confidences, the
scalar-channel alignment check, and three classifiers to confront the theory:

- ``classify_oracle``          knows the class centers (error Q(sqrt(lam))),
- ``classify_supervised``      plug-in direction from labeled samples only,
- ``classify_semisupervised``  iterative posterior-mean scheme whose score
                               calibration is driven by the overlap maps.

Randomness.  All draws use ``numpy.random.default_rng`` (PCG64) with explicit
seeding; replicate r of a study derives its stream from the seed sequence
``(seed, r)``, so replicates are independent and every run is reproducible
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .kernel import posterior_mean
from .overlaps import EpsilonMixture, ProblemParams, qu_from_qv, qv_from_qu
from .risk import InfeasibilityError

__all__ = [
    "SimulationError",
    "LabelInfo",
    "ChannelSample",
    "Dataset",
    "ClassifierOutput",
    "generate_dataset",
    "draw_channel_sample",
    "channel_overlap_mc",
    "channel_overlap_mc_stats",
    "classify_oracle",
    "classify_supervised",
    "classify_semisupervised",
    "reference_error",
    "labeled_needed_empirical",
]


class SimulationError(RuntimeError):
    """Degenerate simulation state (no usable labels, zero scores, size mismatch)."""


@dataclass(frozen=True)
class LabelInfo:
    """Per-sample confidence couple (d1, d2) and its signed summary eps = d2 - d1.

    d1 is the reported probability of class 1 (y = -1), d2 of class 2
    (y = +1); the couple sums to one, so eps determines it completely.
    """

    d1: float
    d2: float
    eps: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.d1 <= 1.0 and 0.0 <= self.d2 <= 1.0):
            raise ValueError("d1 and d2 must be probabilities")
        if abs(self.d1 + self.d2 - 1.0) > 1e-12:
            raise ValueError("d1 + d2 must equal 1 within 1e-12")
        if abs(self.eps - (self.d2 - self.d1)) > 1e-12:
            raise ValueError("eps must equal d2 - d1 within 1e-12")

    @classmethod
    def from_eps(cls, eps: float) -> "LabelInfo":
        eps = float(eps)
        if abs(eps) > 1.0:
            raise ValueError("eps must lie in [-1, 1]")
        return cls(d1=(1.0 - eps) / 2.0, d2=(1.0 + eps) / 2.0, eps=eps)


@dataclass(frozen=True)
class ChannelSample:
    """One draw of the scalar channel: signal s = ±1, output u, prior mean eps."""

    s: int
    u: float
    eps: float


@dataclass
class Dataset:
    """Synthetic mixture sample with the hidden truth retained for scoring.

    ``features`` is p x n with column i distributed as y_i * truth_mean plus
    standard normal noise; ``label_eps`` holds each sample's signed confidence
    (0 for unlabeled).  The full confidence couples are materialised on demand
    through ``labels``.
    """

    features: np.ndarray
    truth_labels: np.ndarray
    label_eps: np.ndarray
    truth_mean: np.ndarray

    @property
    def p(self) -> int:
        return int(self.features.shape[0])

    @property
    def n(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_labeled(self) -> int:
        return int(np.count_nonzero(self.label_eps))

    @property
    def n_unlabeled(self) -> int:
        return self.n - self.n_labeled

    @property
    def snr(self) -> float:
        """Squared center norm ||mu||^2 of the realised truth mean."""
        return float(self.truth_mean @ self.truth_mean)

    @property
    def labels(self) -> tuple[LabelInfo, ...]:
        return tuple(LabelInfo.from_eps(e) for e in self.label_eps)


@dataclass
class ClassifierOutput:
    """Soft scores in [-1, 1], hard ±1 decisions, and error rates.

    ``error_unlabeled`` is None when the dataset has no unlabeled samples;
    ties in the hard decision go to +1.  ``iterations`` is set by iterative
    classifiers only.
    """

    soft_scores: np.ndarray
    hard_labels: np.ndarray
    error_unlabeled: Optional[float]
    error_all: float
    iterations: Optional[int] = None


def _hard_decisions(scores: np.ndarray) -> np.ndarray:
    return np.where(scores >= 0.0, 1, -1).astype(np.int64)


def _output_from_soft(soft: np.ndarray, ds: Dataset, iterations=None) -> ClassifierOutput:
    hard = _hard_decisions(soft)
    wrong = hard != ds.truth_labels
    unlabeled = ds.label_eps == 0.0
    err_unl = float(np.mean(wrong[unlabeled])) if np.any(unlabeled) else None
    return ClassifierOutput(
        soft_scores=soft,
        hard_labels=hard,
        error_unlabeled=err_unl,
        error_all=float(np.mean(wrong)),
        iterations=iterations,
    )


def generate_dataset(p: int, n: int, lam: float, labeling, seed) -> Dataset:
    """Draw a balanced two-class Gaussian sample with block-wise labeling.

    ``labeling`` is a sequence of (fraction, kappa) blocks: consecutive index
    ranges of round(fraction * n) samples each receive a reported class that
    matches the truth with probability kappa in (0.5, 1], and the confidence
    couple assigns probability kappa to the report, i.e.
    eps = report * (2 kappa - 1).  Remaining samples stay unlabeled (eps = 0).

    The center is a uniformly random direction scaled to ||mu||^2 = lam, the
    ±1 truth is balanced (counts differ by at most one, the odd sample going
    to +1) and shuffled.  The draw order (center direction, truth permutation,
    noise matrix, then one reliability uniform per labeled sample block by
    block) is fixed, so runs that share a seed and differ only in a block's
    fraction share every other draw (common random numbers).
    """
    p = int(p)
    n = int(n)
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive integers")
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError("lam must be finite and nonnegative")
    blocks = [(float(f), float(k)) for f, k in labeling]
    for frac, kappa in blocks:
        if not 0.0 <= frac <= 1.0:
            raise ValueError("labeling fractions must lie in [0, 1]")
        if not 0.5 < kappa <= 1.0:
            raise ValueError("labeler reliability kappa must lie in (0.5, 1]")
    if sum(f for f, _ in blocks) > 1.0 + 1e-9:
        raise ValueError("labeling fractions must sum to at most 1")

    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(p)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        raise SimulationError("degenerate zero direction draw")
    mu = math.sqrt(lam) * direction / norm

    y = np.ones(n, dtype=np.int64)
    y[: n // 2] = -1
    y = y[rng.permutation(n)]

    features = mu[:, None] * y[None, :] + rng.standard_normal((p, n))

    eps = np.zeros(n, dtype=float)
    start = 0
    for frac, kappa in blocks:
        count = int(round(frac * n))
        if start + count > n:
            raise ValueError("labeling blocks exceed the sample count")
        sl = slice(start, start + count)
        correct = rng.random(count) < kappa
        report = np.where(correct, y[sl], -y[sl])
        eps[sl] = report * (2.0 * kappa - 1.0)
        start += count

    return Dataset(features=features, truth_labels=y, label_eps=eps, truth_mean=mu)


def draw_channel_sample(eps: float, q: float, rng: np.random.Generator) -> ChannelSample:
    """One draw of the scalar channel u = sqrt(q) s + z with prior mean eps."""
    eps = float(eps)
    q = float(q)
    s = 1 if rng.random() < (1.0 + eps) / 2.0 else -1
    u = math.sqrt(q) * s + rng.standard_normal()
    return ChannelSample(s=s, u=u, eps=eps)


def channel_overlap_mc_stats(
    eps: float, q: float, trials: int, seed
) -> tuple[float, float]:
    """Monte Carlo channel alignment and its standard error.

    Simulates s with prior mean eps, u = sqrt(q) s + z, denoises with the
    posterior mean at sqrt(q) u, and averages s times the estimate.  The mean
    converges to the quadrature channel overlap at (eps, q).
    """
    eps = float(eps)
    q = float(q)
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    rng = np.random.default_rng(seed)
    s = np.where(rng.random(trials) < (1.0 + eps) / 2.0, 1.0, -1.0)
    u = math.sqrt(q) * s + rng.standard_normal(trials)
    aligned = s * posterior_mean(eps, math.sqrt(q) * u)
    mean = float(np.mean(aligned))
    stderr = float(np.std(aligned) / math.sqrt(trials))
    return mean, stderr


def channel_overlap_mc(eps: float, q: float, trials: int, seed) -> float:
    """Monte Carlo estimate of the channel overlap (mean of ``..._stats``)."""
    return channel_overlap_mc_stats(eps, q, trials, seed)[0]


def classify_oracle(ds: Dataset) -> ClassifierOutput:
    """Classifier that knows the true center: decisions sign(x_i' mu).

    The projected scores are unit-variance Gaussians at ±||mu||^2, so the
    expected error is the Gaussian tail at sqrt(snr).
    """
    scores = ds.features.T @ ds.truth_mean
    return _output_from_soft(np.tanh(scores), ds)


def classify_supervised(ds: Dataset) -> ClassifierOutput:
    """Confidence-weighted plug-in using labeled samples only.

    Estimates the direction as (1/n) sum_i eps_i x_i (unlabeled samples
    contribute nothing) and classifies every sample by the sign of its
    projection.  Fails when no labeled samples exist.
    """
    if ds.n_labeled == 0:
        raise SimulationError("supervised classifier needs labeled samples")
    direction = ds.features @ ds.label_eps / ds.n
    if not np.any(direction):
        raise SimulationError("labeled contributions cancelled to a zero direction")
    scores = ds.features.T @ direction
    return _output_from_soft(np.tanh(scores), ds)


def classify_semisupervised(
    ds: Dataset, params: ProblemParams, t_max: int = 50, stop_tol: float = 1e-6
) -> ClassifierOutput:
    """Iterative posterior-mean classifier calibrated by the overlap maps.

    Starting from the prior means v = eps, each pass forms the plug-in
    direction m = X v / n, scores every sample with its own contribution
    removed (s_i = x_i' m - ||x_i||^2 v_i / n), rescales the scores to the
    Gaussian-channel law u ~ q_u y + sqrt(q_u) Z predicted by the overlap
    recursion run alongside on the realised confidence mixture, and denoises
    with the posterior mean.  Stops at ``t_max`` passes or when the mean
    absolute update falls below ``stop_tol``.

    The self-feedback removal uses the exact per-sample column norm rather
    than its expectation; the calibration trusts the known (lam, c) through
    the recursion instead of estimating the score SNR from data.
    """
    if not isinstance(params, ProblemParams):
        raise TypeError("params must be a ProblemParams")
    if int(t_max) < 1:
        raise ValueError("t_max must be at least 1")
    n, p = ds.n, ds.p
    if abs(params.c - n / p) > 1e-9 * max(1.0, params.c):
        raise SimulationError(
            f"params.c = {params.c} does not match the dataset ratio n/p = {n / p}"
        )
    if abs(ds.snr - params.lam) > 1e-6 * max(1.0, params.lam):
        raise SimulationError(
            f"params.lam = {params.lam} does not match the dataset snr = {ds.snr}"
        )
    lam, c = params.lam, params.c
    X = ds.features
    eps = ds.label_eps
    col_sq = np.einsum("ij,ij->j", X, X)
    mixture = EpsilonMixture.from_samples(eps)

    v = eps.copy()
    q_v = mixture.eps_bar_sq
    iterations = 0
    for iterations in range(1, int(t_max) + 1):
        q_u = qu_from_qv(lam, c, q_v)
        q_v = qv_from_qu(mixture, q_u)
        direction = X @ v / n
        raw = X.T @ direction - (col_sq / n) * v
        if q_u == 0.0:
            u = np.zeros(n)
        else:
            mean_sq = float(np.mean(raw * raw))
            if mean_sq == 0.0:
                raise SimulationError("degenerate scores: zero second moment")
            scale = math.sqrt(mean_sq / (q_u * (q_u + 1.0)))
            u = raw / scale
        v_new = posterior_mean(eps, u)
        delta = float(np.mean(np.abs(v_new - v)))
        v = v_new
        if delta < stop_tol:
            break
    return _output_from_soft(v, ds, iterations=iterations)


def _rep_stream(seed, rep: int):
    if isinstance(seed, (int, np.integer)):
        return [int(seed), rep]
    return list(seed) + [rep]


def _mean_errors(
    p: int,
    n: int,
    lam: float,
    n_labeled: int,
    kappa: float,
    seed,
    reps: int,
    t_max: int,
    reference_hard: Optional[list] = None,
):
    """Per-rep semi-supervised runs at a fixed labeled count.

    Returns (own-subset mean error, paired difference to the reference hard
    labels on the candidate's unlabeled subset or None, per-rep outputs).
    """
    own_errors = []
    diffs = []
    outs = []
    for r in range(int(reps)):
        ds = generate_dataset(
            p, n, lam, [(n_labeled / n, kappa)], seed=_rep_stream(seed, r)
        )
        out = classify_semisupervised(
            ds, ProblemParams(lam=lam, c=n / p, mixture=EpsilonMixture.from_samples(ds.label_eps)),
            t_max=t_max,
        )
        outs.append((ds, out))
        if out.error_unlabeled is None:
            raise SimulationError("candidate labeled count leaves no unlabeled samples")
        own_errors.append(out.error_unlabeled)
        if reference_hard is not None:
            sl = slice(n_labeled, n)
            truth = ds.truth_labels[sl]
            cand = float(np.mean(out.hard_labels[sl] != truth))
            ref = float(np.mean(reference_hard[r][sl] != truth))
            diffs.append(cand - ref)
    paired = float(np.mean(diffs)) if diffs else None
    return float(np.mean(own_errors)), paired, outs


def reference_error(
    p: int, n: int, lam: float, eta: float, seed, reps: int = 10, t_max: int = 40
) -> float:
    """Mean semi-supervised error of the certainty-labeled reference run.

    A fraction eta of the samples carries exact labels (kappa = 1); the error
    is measured on the unlabeled remainder and averaged over ``reps``
    replicate streams derived from (seed, r).  This is the target the
    empirical labeled-count search reproduces with less reliable labels.
    """
    n_ref = int(round(float(eta) * n))
    mean_err, _, _ = _mean_errors(p, n, lam, n_ref, 1.0, seed, reps, t_max)
    return mean_err


def labeled_needed_empirical(
    p: int,
    n: int,
    lam: float,
    eta: float,
    kappa: float,
    target_error: float,
    seed,
    reps: int = 10,
    t_max: int = 40,
) -> int:
    """Smallest labeled count whose mean error meets the target, by search.

    Doubling then integer bisection over the monotone-in-expectation error
    curve; every probe is averaged over ``reps`` replicate streams.  Noise is
    suppressed with common random numbers: each probe reuses the replicate's
    data draws, and its error estimate is anchored to the (eta, kappa = 1)
    reference run recomputed on the same streams, i.e. the candidate error is
    estimated as reference level plus the paired error difference on the
    candidate's unlabeled subset, so dataset-level fluctuations cancel.

    Infeasible reliabilities ((2 kappa - 1)^2 < eta) are rejected; the search
    fails if even the largest measurable labeled count (at least one in
    twenty samples stays unlabeled for evaluation) misses the target.
    """
    eta = float(eta)
    kappa = float(kappa)
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    if not 0.5 < kappa <= 1.0:
        raise ValueError("kappa must lie in (0.5, 1]")
    if (2.0 * kappa - 1.0) ** 2 < eta:
        raise InfeasibilityError(
            f"(2 kappa - 1)^2 = {(2 * kappa - 1) ** 2:.6g} < eta = {eta:.6g}: "
            "no labeled count can reach the reference confidence level"
        )
    target_error = float(target_error)

    n_ref = int(round(eta * n))
    ref_own, _, ref_outs = _mean_errors(p, n, lam, n_ref, 1.0, seed, reps, t_max)
    reference_hard = [out.hard_labels for _, out in ref_outs]
    offset = target_error - ref_own

    cache: dict[int, float] = {}

    def satisfied(n_l: int) -> bool:
        if n_l not in cache:
            _, paired, _ = _mean_errors(
                p, n, lam, n_l, kappa, seed, reps, t_max, reference_hard
            )
            cache[n_l] = paired
        return cache[n_l] <= offset

    hi = n - max(1, int(round(0.05 * n)))
    if n_ref > hi:
        raise SimulationError("reference labeled count leaves too few samples to evaluate")
    if satisfied(n_ref):
        lo, up = 0, n_ref
    else:
        lo = up = n_ref
        while not satisfied(up):
            if up >= hi:
                raise SimulationError(
                    f"target error {target_error:.4g} not reached by any measurable "
                    f"labeled count up to {hi}"
                )
            lo, up = up, min(max(2 * up, 1), hi)
    while up - lo > 1:
        mid = (lo + up) // 2
        if satisfied(mid):
            up = mid
        else:
            lo = mid
    return int(up)
