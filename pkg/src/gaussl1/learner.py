"""Agnostic learning of concepts by L1 polynomial regression.

The learner fits a low-degree polynomial to noisy +/-1 labels in Gaussian L1
norm (smoothed iteratively reweighted least squares with a subgradient
polish), then thresholds the fitted score to produce a +/-1 hypothesis.  For
concept classes approximated within ``epsilon`` by the planned degree, the
hypothesis' error exceeds the label noise rate by at most ``epsilon`` plus a
sampling term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .approx import ApproximationPlan, plan
from .concepts import Concept
from .errors import ValidationError
from .hermite import (
    HermiteExpansion,
    basis_matrix,
    expansion,
    expansion_eval_batch,
    multi_indices_upto,
)
from .mc import EstimateWithError, check_seed, derive_seed


@dataclass(frozen=True)
class LabeledData:
    """Samples ``x`` of shape ``(m, n)`` with labels ``y`` in {-1, +1}."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 2 or y.shape != (x.shape[0],):
            raise ValidationError(
                f"inconsistent sample shapes x={x.shape}, y={y.shape}"
            )
        if x.shape[0] < 1:
            raise ValidationError("need at least one sample")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValidationError("labels must be +1 or -1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def size(self) -> int:
        return self.x.shape[0]

    @property
    def dimension(self) -> int:
        return self.x.shape[1]


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not (math.isfinite(eta) and 0.0 <= eta < 1.0):
        raise ValidationError(f"noise rate eta must lie in [0, 1), got {eta}")
    return eta


def generate_agnostic_data(c: Concept, eta: float, m: int, seed: int) -> LabeledData:
    """Draw ``m`` Gaussian samples labeled by ``c`` with each label flipped
    independently with probability ``eta``."""
    eta = _check_eta(eta)
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(check_seed(seed))
    x = rng.standard_normal((int(m), c.dimension))
    labels = c.batch(x)
    flips = rng.random(int(m)) < eta
    return LabeledData(x, np.where(flips, -labels, labels))


@dataclass(frozen=True)
class FitConfig:
    """Solver knobs for :func:`fit_l1`.

    The weighted least-squares reweighting uses ``1 / max(|r|, delta)`` so
    each stage minimizes a Huber-smoothed L1 loss whose optimum is within
    ``delta / 2`` of the true L1 optimum; ``delta`` starts at ``delta_huber``
    and is refined twice by a factor of 100.
    """

    max_iters: int = 200
    tol: float = 1e-6
    delta_huber: float = 1e-4
    polish_iters: int = 30


@dataclass(frozen=True)
class FitResult:
    expansion: HermiteExpansion
    alphas: tuple
    coefficients: np.ndarray
    train_loss: float
    converged: bool
    iterations: int


def _l1_loss(A: np.ndarray, y: np.ndarray, coeffs: np.ndarray) -> float:
    return float(np.abs(y - A @ coeffs).mean())


def _median_toward_zero(y: np.ndarray) -> float:
    """Exact L1-optimal constant; ties inside the median interval resolve to
    the value closest to 0."""
    s = np.sort(y)
    m = s.size
    if m % 2 == 1:
        return float(s[m // 2])
    lo, hi = float(s[m // 2 - 1]), float(s[m // 2])
    return float(min(max(0.0, lo), hi))


def fit_l1(data: LabeledData, degree: int, config: FitConfig | None = None) -> FitResult:
    """Fit ``argmin_p mean |y_i - p(x_i)|`` over polynomials of total degree
    <= ``degree`` by smoothed IRLS with a final subgradient polish.

    Deterministic: no randomness enters the solve.  If the iteration cap is
    reached without the loss stabilizing, the best iterate is returned with
    ``converged=False`` (and a warning).
    """
    config = config or FitConfig()
    if degree < 0:
        raise ValidationError(f"degree must be >= 0, got {degree}")
    alphas = multi_indices_upto(data.dimension, degree)
    if degree == 0:
        c0 = _median_toward_zero(data.y)
        coeffs = np.asarray([c0])
        p = expansion(data.dimension, {alphas[0]: c0} if c0 != 0.0 else {})
        return FitResult(
            p, tuple(alphas), coeffs, float(np.abs(data.y - c0).mean()), True, 0
        )

    A = basis_matrix(data.x, alphas)
    y = data.y
    coeffs, *_ = np.linalg.lstsq(A, y, rcond=None)
    best_loss = _l1_loss(A, y, coeffs)
    best = coeffs.copy()
    converged = False
    iterations = 0
    # continuation in the smoothing scale: the Huber optimum tracks the L1
    # optimum to O(delta), so refining delta after the coarse solve settles
    # pulls the fit onto the LP vertex
    for delta in (config.delta_huber, config.delta_huber * 1e-2, config.delta_huber * 1e-4):
        coeffs = best.copy()
        losses = [best_loss]
        converged = False
        for it in range(1, config.max_iters + 1):
            iterations += 1
            r = y - A @ coeffs
            w = 1.0 / np.maximum(np.abs(r), delta)
            Aw = A * w[:, None]
            G = Aw.T @ A
            b = Aw.T @ y
            try:
                coeffs = np.linalg.solve(G, b)
            except np.linalg.LinAlgError:
                coeffs, *_ = np.linalg.lstsq(
                    A * np.sqrt(w)[:, None], y * np.sqrt(w), rcond=None
                )
            loss = _l1_loss(A, y, coeffs)
            losses.append(loss)
            if loss < best_loss:
                best_loss = loss
                best = coeffs.copy()
            if it >= 5 and losses[-6] - losses[-1] < config.tol:
                converged = True
                break
    if not converged:
        warnings.warn(
            f"L1 fit did not stabilize within {config.max_iters} iterations; "
            "returning the best iterate",
            RuntimeWarning,
            stacklevel=2,
        )

    # subgradient polish: small deterministic steps from the Huber scale down
    coeffs = best.copy()
    for j in range(config.polish_iters):
        r = y - A @ coeffs
        g = -(A.T @ np.where(r >= 0.0, 1.0, -1.0)) / data.size
        norm = float(np.linalg.norm(g))
        if norm == 0.0:
            break
        step = config.delta_huber * 0.5**j
        coeffs = coeffs - (step / norm) * g
        loss = _l1_loss(A, y, coeffs)
        if loss < best_loss:
            best_loss = loss
            best = coeffs.copy()

    terms = {alpha: float(v) for alpha, v in zip(alphas, best) if v != 0.0}
    return FitResult(
        expansion(data.dimension, terms),
        tuple(alphas),
        best,
        best_loss,
        converged,
        iterations,
    )


def l1_fit_oracle(A: np.ndarray, y: np.ndarray) -> float:
    """Exact optimal L1 loss by vertex enumeration (tiny instances only).

    Some optimal L1 fit interpolates ``B = rank(A)`` points, so scanning all
    size-B sample subsets with invertible submatrices finds the optimum.
    Intended as a test oracle: cost grows like C(m, B).
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m, B = A.shape
    if m > 60 or B > 6:
        raise ValidationError("oracle is restricted to m <= 60, B <= 6")
    if np.linalg.matrix_rank(A) < B:
        raise ValidationError("design matrix must have full column rank")
    import itertools

    best = float(np.abs(y).mean())  # the zero fit is always available
    for subset in itertools.combinations(range(m), B):
        sub = A[list(subset)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        c = np.linalg.solve(sub, y[list(subset)])
        best = min(best, float(np.abs(y - A @ c).mean()))
    return best


def choose_threshold(p: HermiteExpansion, data: LabeledData) -> float:
    """Threshold minimizing the empirical error of ``sign(p(x) - t)``.

    Candidates are all observed scores, midpoints of consecutive sorted
    scores, 0, and a value above the top score; together these realize
    every achievable labeling, so the empirical argmin is exact.  Ties
    prefer the smallest ``|t|``, then the smallest ``t``.  Predictions use
    ``sign(0) = +1``, i.e. predict +1 iff ``p(x) >= t``.
    """
    scores = expansion_eval_batch(p, data.x)
    order = np.argsort(scores, kind="stable")
    s = scores[order]
    pos = (data.y[order] > 0).astype(np.int64)
    prefix_pos = np.concatenate([[0], np.cumsum(pos)])
    total_pos = int(prefix_pos[-1])
    m = data.size

    mids = 0.5 * (s[1:] + s[:-1]) if m > 1 else np.empty(0)
    # s[-1] + 1 admits the all-negative classifier, which no score or
    # midpoint candidate can reach
    candidates = np.concatenate([s, mids, [0.0, s[-1] + 1.0]])
    k = np.searchsorted(s, candidates, side="left")
    # errors: +1 labels below the threshold plus -1 labels at or above it
    errs = prefix_pos[k] + (m - k) - (total_pos - prefix_pos[k])
    pick = np.lexsort((candidates, np.abs(candidates), errs))[0]
    return float(candidates[pick])


@dataclass(frozen=True)
class Hypothesis:
    """Thresholded polynomial classifier ``x -> sign(p(x) - threshold)``."""

    p: HermiteExpansion
    threshold: float
    degree: int

    def predict(self, points: np.ndarray) -> np.ndarray:
        scores = expansion_eval_batch(self.p, np.asarray(points, dtype=np.float64))
        return np.where(scores >= self.threshold, 1.0, -1.0)

    def to_dict(self) -> dict:
        return {
            "p": self.p.to_dict(),
            "threshold": self.threshold,
            "degree": self.degree,
        }


def evaluate(h: Hypothesis, c: Concept, eta: float, m_test: int, seed: int) -> EstimateWithError:
    """Misclassification rate of ``h`` on fresh noisy samples from ``c``."""
    data = generate_agnostic_data(c, eta, m_test, seed)
    wrong = int(np.count_nonzero(h.predict(data.x) != data.y))
    p = wrong / data.size
    return EstimateWithError(
        p, math.sqrt(p * (1.0 - p) / data.size), data.size, check_seed(seed)
    )


@dataclass(frozen=True)
class LearnResult:
    """Everything produced by one learning run.

    ``opt_upper_bound`` is the noise rate (the error of the best possible
    predictor is at least ``eta``); ``excess`` is measured test error minus
    that floor.
    """

    hypothesis: Hypothesis
    plan: ApproximationPlan
    degree: int
    capped: bool
    train_l1_loss: float
    fit_converged: bool
    test_error: EstimateWithError
    opt_upper_bound: float
    seed: int

    @property
    def excess(self) -> float:
        return self.test_error.mean - self.opt_upper_bound

    def to_dict(self) -> dict:
        return {
            "hypothesis": self.hypothesis.to_dict(),
            "plan": self.plan.to_dict(),
            "degree": self.degree,
            "capped": self.capped,
            "train_l1_loss": self.train_l1_loss,
            "fit_converged": self.fit_converged,
            "test_error": self.test_error.to_dict(),
            "opt_upper_bound": self.opt_upper_bound,
            "excess": self.excess,
            "seed": self.seed,
        }


DEGREE_CAP = 30


def learn(
    c: Concept,
    epsilon: float,
    gamma: float,
    eta: float,
    m_train: int,
    m_test: int,
    seed: int,
    degree_cap: int = DEGREE_CAP,
    config: FitConfig | None = None,
) -> LearnResult:
    """Full pipeline: plan a degree, fit in L1, threshold, and test.

    The planned degree is capped at ``degree_cap`` (with a warning) to keep
    the regression tractable; training and testing use child seeds derived
    from ``seed``.
    """
    eta = _check_eta(eta)
    aplan = plan(epsilon, gamma)
    degree = min(aplan.degree, int(degree_cap))
    capped = degree < aplan.degree
    if capped:
        warnings.warn(
            f"planned degree {aplan.degree} capped at {degree}",
            RuntimeWarning,
            stacklevel=2,
        )
    train = generate_agnostic_data(c, eta, m_train, derive_seed(seed, 0))
    fit = fit_l1(train, degree, config)
    threshold = choose_threshold(fit.expansion, train)
    hypothesis = Hypothesis(fit.expansion, threshold, degree)
    test_error = evaluate(hypothesis, c, eta, m_test, derive_seed(seed, 1))
    return LearnResult(
        hypothesis=hypothesis,
        plan=aplan,
        degree=degree,
        capped=capped,
        train_l1_loss=fit.train_loss,
        fit_converged=fit.converged,
        test_error=test_error,
        opt_upper_bound=eta,
        seed=check_seed(seed),
    )
