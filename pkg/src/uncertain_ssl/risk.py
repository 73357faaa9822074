"""Decision-level metrics derived from the overlap solution.

The feature overlap q_u fixes everything a decision maker cares about:

- ``bayes_risk``            Q(sqrt(q_u)), the asymptotic misclassification
                            floor of the task,
- ``oracle_risk``           Q(sqrt(lam)), the error with known class centers
                            (the c -> infinity limit of the Bayes risk),
- ``usefulness``            F(q_u), how much of a certainty-labeled sample's
                            information one unlabeled sample carries,
- error-reduction ratios comparing supervised, semi-supervised and oracle
  error levels, and
- ``labeled_needed``        the labeled-sample count that matches a target
                            information level when labels are only
                            kappa-reliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernel import QuadratureRule, channel_overlap, gaussian_tail
from .overlaps import EpsilonMixture, OverlapSolution, qu_from_qv

__all__ = [
    "InfeasibilityError",
    "RiskReport",
    "ReductionReport",
    "bayes_risk",
    "oracle_risk",
    "usefulness",
    "absolute_reduction",
    "oracle_relative_reduction",
    "labeled_needed",
    "effective_eta",
    "supervised_risk_theory",
    "risk_report",
    "reduction_report",
]


class InfeasibilityError(ValueError):
    """The requested labeling regime cannot reach the target information level."""


def _check_nonneg(x, name: str) -> float:
    xf = float(x)
    if not math.isfinite(xf) or xf < 0.0:
        raise ValueError(f"{name} must be finite and nonnegative")
    return xf


def bayes_risk(q_u) -> float:
    """Asymptotic misclassification floor Q(sqrt(q_u)).

    0.5 at q_u = 0 (uninformative scores), strictly decreasing in q_u.
    """
    return gaussian_tail(math.sqrt(_check_nonneg(q_u, "q_u")))


def oracle_risk(lam) -> float:
    """Error Q(sqrt(lam)) of the classifier that knows the class centers."""
    return gaussian_tail(math.sqrt(_check_nonneg(lam, "lam")))


def usefulness(q_u, rule: QuadratureRule | None = None) -> float:
    """Information value F(q_u) of an unlabeled sample, relative to a labeled one.

    0 when the task is hopeless (Bayes risk 0.5), approaching 1 as the task
    becomes easy; monotone decreasing as a function of the Bayes risk.
    """
    return channel_overlap(0.0, _check_nonneg(q_u, "q_u"), rule)


def absolute_reduction(e_sup: float, e_semi: float) -> float:
    """Error reduction (e_sup - e_semi) / e_sup from going semi-supervised.

    Requires e_sup > 0 (the ratio is undefined at zero supervised error);
    lands in [0, 1] whenever e_semi <= e_sup.  Noisy empirical inputs with
    e_semi > e_sup yield a negative value rather than an error.
    """
    es = float(e_sup)
    ss = float(e_semi)
    if not (math.isfinite(es) and math.isfinite(ss)):
        raise ValueError("error rates must be finite")
    if es <= 0.0:
        raise ValueError("e_sup must be positive")
    if ss < 0.0:
        raise ValueError("e_semi must be nonnegative")
    return (es - ss) / es


def oracle_relative_reduction(e_sup: float, e_semi: float, e_oracle: float) -> float:
    """Share (e_sup - e_semi) / (e_sup - e_oracle) of the gap to oracle closed.

    Reads as "how much of the way to oracle error has been done"; requires
    e_oracle < e_sup (the denominator degenerates otherwise).
    """
    es = float(e_sup)
    ss = float(e_semi)
    eo = float(e_oracle)
    if not (math.isfinite(es) and math.isfinite(ss) and math.isfinite(eo)):
        raise ValueError("error rates must be finite")
    if ss < 0.0 or eo < 0.0:
        raise ValueError("error rates must be nonnegative")
    if es <= eo:
        raise ValueError("e_sup must exceed e_oracle (degenerate denominator)")
    return (es - ss) / (es - eo)


def labeled_needed(eta: float, kappa: float, n: int) -> float:
    """Labeled count eta / (2 kappa - 1)^2 * n matching the eta-certainty level.

    A fraction eta of certainty labels and n_l labels of per-sample
    reliability kappa carry the same mean squared confidence exactly when
    n_l = eta n / (2 kappa - 1)^2.  Feasible only for (2 kappa - 1)^2 >= eta:
    below that, even labeling every sample falls short.  Returns a real;
    callers round up to a whole sample count.
    """
    eta = float(eta)
    kappa = float(kappa)
    if not (math.isfinite(eta) and 0.0 < eta <= 1.0):
        raise ValueError("eta must lie in (0, 1]")
    if not (math.isfinite(kappa) and 0.5 <= kappa <= 1.0):
        raise ValueError("kappa must lie in [0.5, 1]")
    if int(n) < 1:
        raise ValueError("n must be a positive integer")
    if kappa == 0.5:
        raise InfeasibilityError("kappa = 0.5 labels carry no information")
    conf_sq = (2.0 * kappa - 1.0) ** 2
    if conf_sq < eta:
        raise InfeasibilityError(
            f"(2 kappa - 1)^2 = {conf_sq:.6g} < eta = {eta:.6g}: even a fully "
            "labeled dataset cannot reach the target confidence level"
        )
    return eta / conf_sq * int(n)


def effective_eta(mixture: EpsilonMixture) -> float:
    """Mean squared confidence of a mixture: its certainty-labeled equivalent.

    For a fraction n_l/n of samples labeled with uniform reliability kappa
    this is (n_l/n) (2 kappa - 1)^2.
    """
    if not isinstance(mixture, EpsilonMixture):
        raise TypeError("mixture must be an EpsilonMixture")
    return mixture.eps_bar_sq


def supervised_risk_theory(lam: float, c: float, eta: float) -> float:
    """Asymptotic error of learning from the labeled subsample alone.

    Discarding unlabeled data leaves eta * n certainty-labeled samples, i.e.
    the pinned system q_v = 1 at sample ratio eta c, so the score SNR is
    qu_from_qv(lam, eta * c, 1) and the error its Gaussian tail.  This is the
    theory baseline the plug-in supervised classifier attains.
    """
    eta = float(eta)
    if not (math.isfinite(eta) and 0.0 < eta <= 1.0):
        raise InfeasibilityError("supervised baseline needs a positive labeled fraction")
    return bayes_risk(qu_from_qv(lam, float(c) * eta, 1.0))


@dataclass(frozen=True)
class RiskReport:
    """Bayes/oracle risks and unlabeled-data usefulness at a solved overlap."""

    bayes_risk: float
    oracle_risk: float
    usefulness: float
    q_u: float
    q_v: float


def risk_report(
    lam: float, solution: OverlapSolution, rule: QuadratureRule | None = None
) -> RiskReport:
    """Bundle the decision metrics of a solved overlap pair."""
    if not isinstance(solution, OverlapSolution):
        raise TypeError("solution must be an OverlapSolution")
    return RiskReport(
        bayes_risk=bayes_risk(solution.q_u),
        oracle_risk=oracle_risk(lam),
        usefulness=usefulness(solution.q_u, rule),
        q_u=solution.q_u,
        q_v=solution.q_v,
    )


@dataclass(frozen=True)
class ReductionReport:
    """Supervised/semi-supervised/oracle error levels and both reductions."""

    e_sup: float
    e_semi: float
    e_oracle: float
    absolute_reduction: float
    oracle_relative_reduction: float


def reduction_report(e_sup: float, e_semi: float, e_oracle: float) -> ReductionReport:
    """Compute both error-reduction ratios from three error levels."""
    return ReductionReport(
        e_sup=float(e_sup),
        e_semi=float(e_semi),
        e_oracle=float(e_oracle),
        absolute_reduction=absolute_reduction(e_sup, e_semi),
        oracle_relative_reduction=oracle_relative_reduction(e_sup, e_semi, e_oracle),
    )
