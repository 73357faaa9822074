"""Self-consistent overlap system for semi-supervised learning with uncertain labels.

In the proportional regime (n samples, p features, c = n/p, class separation
SNR ``lam``) the asymptotic performance of Bayes-optimal classification is
characterised by two coupled scalars: a feature-space overlap q_u (the SNR of
the optimal per-sample score) and a label-space overlap q_v (the alignment of
the posterior-mean labels with the truth).  They solve

    q_u = lam^2 c q_v / (1 + lam c q_v)
    q_v = sum_j w_j F_{eps_j}(q_u)

where the mixture (eps_j, w_j) is the empirical distribution of per-sample
label confidences and F is the scalar channel overlap.  ``solve_overlaps``
iterates the damped pair of maps from two initialisations (q_v = 1 and a
small floor above the mixture's mean squared confidence), polishes the result
with a secant refinement of the scalar defect, and reports the solution with
the larger q_u when the basins disagree.

The classical certainty-labeled system (a fraction eta of hard labels, the
rest unlabeled) is the special case mixture {(1, eta), (0, 1 - eta)}, for
which q_v = eta + (1 - eta) F(q_u).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .kernel import DEFAULT_RULE, QuadratureRule, channel_overlap

__all__ = [
    "EpsilonMixture",
    "ProblemParams",
    "OverlapSolution",
    "ConvergenceError",
    "qu_from_qv",
    "qv_from_qu",
    "solve_overlaps",
    "solve_certainty",
    "solve_approx",
    "sensitivity_ratio",
]


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed; ``last`` carries the best iterate found."""

    def __init__(self, message: str, last: "OverlapSolution"):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class EpsilonMixture:
    """Discrete distribution of signed label confidences eps in [-1, 1].

    ``atoms`` is a tuple of (eps, weight) pairs; weights are normalised to
    sum exactly to one.  The mean squared confidence ``eps_bar_sq`` is the
    fraction of certainty-labeled data the mixture is informationally worth.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.atoms) == 0:
            raise ValueError("mixture needs at least one atom")
        eps = np.array([a[0] for a in self.atoms], dtype=float)
        w = np.array([a[1] for a in self.atoms], dtype=float)
        if not np.all(np.isfinite(eps)) or np.any(np.abs(eps) > 1.0):
            raise ValueError("atom eps values must lie in [-1, 1]")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ValueError("atom weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError("atom weights must sum to 1 (within 1e-9)")
        w = w / total
        object.__setattr__(
            self, "atoms", tuple((float(e), float(wj)) for e, wj in zip(eps, w))
        )

    @property
    def eps_bar_sq(self) -> float:
        """Mean squared confidence sum_j w_j eps_j**2, in [0, 1]."""
        return float(sum(wj * e * e for e, wj in self.atoms))

    @classmethod
    def certainty(cls, eta: float) -> "EpsilonMixture":
        """Fraction ``eta`` of certainty labels, the rest unlabeled."""
        eta = float(eta)
        if not 0.0 <= eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        return cls(atoms=((1.0, eta), (0.0, 1.0 - eta)))

    @classmethod
    def single(cls, eps: float) -> "EpsilonMixture":
        """Every sample carries the same signed confidence."""
        return cls(atoms=((float(eps), 1.0),))

    @classmethod
    def from_samples(cls, eps_values) -> "EpsilonMixture":
        """Empirical mixture of a vector of per-sample confidences."""
        e = np.asarray(eps_values, dtype=float).ravel()
        if e.size == 0:
            raise ValueError("need at least one sample")
        vals, counts = np.unique(e, return_counts=True)
        return cls(atoms=tuple(zip(vals.tolist(), (counts / e.size).tolist())))


@dataclass(frozen=True)
class ProblemParams:
    """Everything the overlap system needs: SNR, sample ratio, confidence mixture.

    ``c`` is the samples-per-dimension ratio n/p; ``lam`` the class separation
    SNR ||mu||^2 of the centered ±mu mixture.
    """

    lam: float
    c: float
    mixture: EpsilonMixture

    def __post_init__(self) -> None:
        if not math.isfinite(self.lam) or self.lam < 0.0:
            raise ValueError("lam must be finite and nonnegative")
        if not math.isfinite(self.c) or self.c <= 0.0:
            raise ValueError("c must be finite and positive")
        if not isinstance(self.mixture, EpsilonMixture):
            raise TypeError("mixture must be an EpsilonMixture")


@dataclass(frozen=True)
class OverlapSolution:
    """Solution of the overlap system with convergence diagnostics.

    ``residual`` is the larger of the two equation defects at (q_u, q_v);
    ``init_gap`` reports |q_u| disagreement between the two initialisations
    (zero when they agree or only one converged).
    """

    q_u: float
    q_v: float
    residual: float
    iterations: int
    converged: bool
    init_gap: float = field(default=0.0)


def qu_from_qv(lam: float, c: float, q_v: float) -> float:
    """Feature-overlap map q_u = lam^2 c q_v / (1 + lam c q_v).

    Valued in [0, lam), strictly increasing in q_v when lam > 0.
    """
    lam = float(lam)
    c = float(c)
    q_v = float(q_v)
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError("lam must be finite and nonnegative")
    if not math.isfinite(c) or c <= 0.0:
        raise ValueError("c must be finite and positive")
    if not math.isfinite(q_v) or not -1e-12 <= q_v <= 1.0 + 1e-12:
        raise ValueError("q_v must lie in [0, 1]")
    q_v = min(max(q_v, 0.0), 1.0)
    return lam * lam * c * q_v / (1.0 + lam * c * q_v)


def qv_from_qu(
    mixture: EpsilonMixture, q_u: float, rule: QuadratureRule | None = None
) -> float:
    """Label-overlap map: mixture average of the channel overlap at SNR q_u."""
    if not isinstance(mixture, EpsilonMixture):
        raise TypeError("mixture must be an EpsilonMixture")
    if rule is None:
        rule = DEFAULT_RULE
    return float(
        sum(wj * channel_overlap(e, q_u, rule) for e, wj in mixture.atoms)
    )


def _secant_polish(defect, q0: float, max_steps: int = 60, f_tol: float = 1e-14):
    """Refine a root of ``defect`` near q0 by clamped secant steps.

    Keeps the best-|defect| point seen; the residual-tolerance fixed point
    parks O(sqrt(tol)) away from the root when the map slope approaches one,
    and this closes that gap.
    """
    x0 = min(max(q0, 0.0), 1.0)
    f0 = defect(x0)
    best_x, best_f = x0, f0
    x1 = min(x0 + max(1e-9, 1e-9 * abs(x0)), 1.0)
    if x1 == x0:
        x1 = x0 - 1e-9
    f1 = defect(x1)
    if abs(f1) < abs(best_f):
        best_x, best_f = x1, f1
    for _ in range(max_steps):
        if f1 == f0 or abs(best_f) < f_tol:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x2 = min(max(x2, 0.0), 1.0)
        if x2 == x1:
            break
        f2 = defect(x2)
        if abs(f2) < abs(best_f):
            best_x, best_f = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return best_x


def _solve_from(
    params: ProblemParams,
    q_v0: float,
    tol: float,
    max_iter: int,
    damping: float,
    rule: QuadratureRule,
) -> OverlapSolution:
    lam, c, mixture = params.lam, params.c, params.mixture

    def defect(q_v: float) -> float:
        return q_v - qv_from_qu(mixture, qu_from_qv(lam, c, q_v), rule)

    q_v = q_v0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        target = qv_from_qu(mixture, qu_from_qv(lam, c, q_v), rule)
        if abs(target - q_v) < tol:
            break
        q_v = q_v + damping * (target - q_v)
    q_v = _secant_polish(defect, q_v)
    if mixture.eps_bar_sq == 0.0 and q_v <= 1e-5:
        # All-unlabeled mixtures always admit the exact solution (0, 0); a
        # polished iterate this small means no larger root exists (at the
        # marginal slope the double root defeats any residual tolerance).
        q_v = 0.0
    q_u = qu_from_qv(lam, c, q_v)
    residual = max(
        abs(q_u - qu_from_qv(lam, c, q_v)),
        abs(q_v - qv_from_qu(mixture, q_u, rule)),
    )
    return OverlapSolution(
        q_u=q_u,
        q_v=q_v,
        residual=residual,
        iterations=iterations,
        converged=residual < tol,
    )


def solve_overlaps(
    params: ProblemParams,
    tol: float = 1e-10,
    max_iter: int = 10000,
    damping: float = 0.5,
    rule: QuadratureRule | None = None,
) -> OverlapSolution:
    """Solve the coupled overlap system by damped alternating iteration.

    Runs from both q_v = 1 and q_v = max(eps_bar_sq, 1e-6) (the floor lets the
    iterate escape the uninformative point when it is unstable), polishes each
    end point with a secant refinement of the scalar defect, and returns the
    converged solution with the larger q_u.  Raises ``ConvergenceError`` with
    the best iterate when no initialisation meets the residual tolerance; a
    disagreement between the basins beyond ``tol`` is kept in ``init_gap``
    and surfaced as a warning rather than hidden.
    """
    if not isinstance(params, ProblemParams):
        raise TypeError("params must be a ProblemParams")
    if not (math.isfinite(tol) and tol > 0.0):
        raise ValueError("tol must be positive")
    if int(max_iter) < 1:
        raise ValueError("max_iter must be at least 1")
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    if rule is None:
        rule = DEFAULT_RULE

    inits = (1.0, max(params.mixture.eps_bar_sq, 1e-6))
    runs = [
        _solve_from(params, q_v0, tol, int(max_iter), float(damping), rule)
        for q_v0 in inits
    ]
    converged = [r for r in runs if r.converged]
    if not converged:
        best = min(runs, key=lambda r: r.residual)
        raise ConvergenceError(
            f"overlap iteration did not converge within {max_iter} iterations "
            f"(best residual {best.residual:.3e})",
            best,
        )
    picked = max(converged, key=lambda r: r.q_u)
    gap = max(r.q_u for r in converged) - min(r.q_u for r in converged)
    if gap > tol:
        warnings.warn(
            f"overlap initialisations disagree: q_u gap {gap:.3e}; "
            "returning the larger solution",
            RuntimeWarning,
            stacklevel=2,
        )
    return replace(picked, init_gap=gap)


def solve_certainty(
    lam: float,
    c: float,
    eta: float,
    tol: float = 1e-10,
    max_iter: int = 10000,
    damping: float = 0.5,
    rule: QuadratureRule | None = None,
) -> OverlapSolution:
    """Certainty-labeled special case: mixture {(1, eta), (0, 1 - eta)}."""
    params = ProblemParams(lam=float(lam), c=float(c), mixture=EpsilonMixture.certainty(eta))
    return solve_overlaps(params, tol=tol, max_iter=max_iter, damping=damping, rule=rule)


def solve_approx(
    params: ProblemParams,
    tol: float = 1e-10,
    max_iter: int = 10000,
    damping: float = 0.5,
    rule: QuadratureRule | None = None,
) -> OverlapSolution:
    """Approximate solve with the label map collapsed onto eps_bar_sq.

    Replaces the mixture average by eps_bar_sq + (1 - eps_bar_sq) F(q_u),
    i.e. the certainty system at eta = eps_bar_sq; exact whenever every atom
    has eps**2 in {0, 1}.
    """
    if not isinstance(params, ProblemParams):
        raise TypeError("params must be a ProblemParams")
    return solve_certainty(
        params.lam,
        params.c,
        params.mixture.eps_bar_sq,
        tol=tol,
        max_iter=max_iter,
        damping=damping,
        rule=rule,
    )


def sensitivity_ratio(
    lam: float, c: float, q_v: float, delta: float
) -> tuple[float, float]:
    """Relative responses (|dq_u|/q_u, |dq_v|/q_v) to a q_v perturbation.

    The first component never exceeds the second: the q_v -> q_u map contracts
    relative changes by the factor 1/(1 + lam c q_v), which is also the limit
    of the ratio of the two components as delta -> 0.  The perturbed point
    q_v + delta probes the map itself and may exceed 1 by the perturbation
    (the map extends smoothly past the physical range).
    """
    lam = float(lam)
    c = float(c)
    q_v = float(q_v)
    delta = float(delta)
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError("lam must be finite and nonnegative")
    if not math.isfinite(c) or c <= 0.0:
        raise ValueError("c must be finite and positive")
    if not 0.0 < q_v <= 1.0:
        raise ValueError("q_v must lie in (0, 1]")
    if not math.isfinite(delta) or q_v + delta <= 0.0:
        raise ValueError("the perturbed point q_v + delta must stay positive")

    def q_u_map(value: float) -> float:
        return lam * lam * c * value / (1.0 + lam * c * value)

    q_u = q_u_map(q_v)
    d_qu = q_u_map(q_v + delta) - q_u
    rel_v = abs(delta) / q_v
    rel_u = abs(d_qu) / q_u if q_u > 0.0 else 0.0
    return rel_u, rel_v
