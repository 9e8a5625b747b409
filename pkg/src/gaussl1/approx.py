"""Low-degree L1 approximation of concepts by smoothing and truncation.

Given a target accuracy ``epsilon`` and a surface-area budget ``gamma`` the
plan picks a noise level and degree

    rho = max(0, 1 - epsilon^2 / (16 pi gamma^2)),
    d   = max(0, ceil(16 pi gamma^2 ln(2 / epsilon) / epsilon^2 - 1)),

and the approximating polynomial is the degree-``d`` truncation of the
smoothed concept, ``p = (T_rho f)_{<= d}``.  Its Gaussian L1 error obeys

    E|f - p| <= 2 GNS_{1 - rho}(f) + rho^{d + 1},

which with the surface-area bound on GNS yields error <= epsilon whenever
``GSA(f) <= gamma``.  The module provides the plan, several coefficient
estimators (exact closed forms for halfspaces, tensor quadrature, Monte
Carlo), the construction itself, L1/L2 error measurement, and a bound check
that ties everything together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapabilityError, ValidationError
from .concepts import Concept
from .hermite import (
    HermiteExpansion,
    MultiIndex,
    _gauss_hermite_1d,
    basis_matrix,
    expansion,
    expansion_eval_batch,
    hermite_upto,
    multi_indices_upto,
    NODE_BUDGET,
)
from .mc import EstimateWithError, chunk_rngs, derive_seed, mc_mean, check_seed
from .noise import apply_to_expansion, validate_noise_level
from .quadrature1d import integrate_adaptive
from .hermite import truncate

_SQRT_2PI = math.sqrt(2.0 * math.pi)
GAUSS_CUTOFF = 12.0


@dataclass(frozen=True)
class ApproximationPlan:
    """Accuracy target and the derived smoothing/truncation parameters."""

    epsilon: float
    gamma: float
    rho: float
    degree: int

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "rho": self.rho,
            "degree": self.degree,
        }


def plan(epsilon: float, gamma: float) -> ApproximationPlan:
    """Choose the noise level and degree for a surface-area budget ``gamma``."""
    epsilon = float(epsilon)
    gamma = float(gamma)
    if not (math.isfinite(epsilon) and epsilon > 0.0):
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise ValidationError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0.0:
        return ApproximationPlan(epsilon, gamma, 0.0, 0)
    scale = 16.0 * math.pi * gamma * gamma
    rho = max(0.0, 1.0 - epsilon * epsilon / scale)
    degree = max(0, math.ceil(scale * math.log(2.0 / epsilon) / (epsilon * epsilon) - 1.0))
    return ApproximationPlan(epsilon, gamma, rho, degree)


# ---------------------------------------------------------------------------
# coefficient estimation


def halfspace_expansion(w, c: float, degree: int) -> HermiteExpansion:
    """Exact Hermite coefficients of ``sign(c - <w, x>)`` up to ``degree``.

    The one-dimensional profile ``g(u) = sign(c - u)`` has
    ``<g, H_0> = erf(c / sqrt(2))`` and
    ``<g, H_k> = -2 H_{k-1}(c) phi(c) / sqrt(k)`` for ``k >= 1``; for a unit
    normal the multivariate coefficients follow from
    ``H_k(<w, x>) = sum_{|alpha| = k} sqrt(k! / alpha!) w^alpha H_alpha(x)``.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size < 1:
        raise ValidationError("w must be a non-empty vector")
    if abs(float(np.linalg.norm(w)) - 1.0) > 1e-12:
        raise ValidationError("w must be a unit vector")
    if degree < 0:
        raise ValidationError(f"degree must be >= 0, got {degree}")
    c = float(c)
    n = w.size
    density = math.exp(-0.5 * c * c) / _SQRT_2PI
    hc = hermite_upto(max(degree - 1, 0), c)
    g = np.empty(degree + 1)
    g[0] = math.erf(c / math.sqrt(2.0))
    for k in range(1, degree + 1):
        g[k] = -2.0 * float(hc[k - 1]) * density / math.sqrt(k)
    terms: dict[MultiIndex, float] = {}
    lg = [math.lgamma(a + 1) for a in range(degree + 1)]
    for alpha in multi_indices_upto(n, degree):
        k = sum(alpha)
        if g[k] == 0.0:
            continue
        wpow = 1.0
        for wi, ai in zip(w, alpha):
            wpow *= wi**ai
        if wpow == 0.0:
            continue
        ratio = math.exp(0.5 * (math.lgamma(k + 1) - sum(lg[a] for a in alpha)))
        terms[alpha] = g[k] * ratio * wpow
    return expansion(n, terms)


@dataclass(frozen=True)
class CoefficientEstimate:
    """Estimated coefficients ``<f, H_alpha>`` for all ``|alpha| <= degree``.

    ``stderr`` is the per-coefficient standard error sidecar for the
    Monte-Carlo method and ``None`` for deterministic methods.  The estimate
    is complete through ``degree``: absent terms are genuine (within-method)
    zeros, not unexplored coordinates.
    """

    expansion: HermiteExpansion
    degree: int
    method: str
    budget: int
    seed: int | None = None
    stderr: dict[MultiIndex, float] | None = None


def estimate_coefficients(
    c: Concept,
    degree: int,
    method: str = "quadrature",
    budget: int | None = None,
    seed: int | None = None,
) -> CoefficientEstimate:
    """Estimate all coefficients of ``c`` up to total degree ``degree``.

    ``method="quadrature"`` uses a tensorized Gauss-Hermite rule with
    ``budget`` points per axis (default 400; dimensions above 3 are
    rejected -- the tensor grid would be astronomically large).
    ``method="monte_carlo"`` averages ``f(X) H_alpha(X)`` over ``budget``
    common samples (default 10^6) and records per-coefficient stderr.
    """
    if degree < 0:
        raise ValidationError(f"degree must be >= 0, got {degree}")
    if method == "quadrature":
        m = 400 if budget is None else int(budget)
        if m < 1:
            raise ValidationError("quadrature budget must be >= 1")
        if c.dimension > 3:
            raise CapabilityError(
                "tensor quadrature is limited to dimension <= 3; use monte_carlo"
            )
        if m**c.dimension > NODE_BUDGET:
            raise ValidationError(
                f"{m}^{c.dimension} tensor nodes exceed the budget {NODE_BUDGET}"
            )
        return _coefficients_quadrature(c, degree, m)
    if method == "monte_carlo":
        n_samples = 10**6 if budget is None else int(budget)
        if seed is None:
            raise ValidationError("monte_carlo coefficient estimation needs a seed")
        return _coefficients_mc(c, degree, n_samples, seed)
    raise ValidationError(f"unknown method {method!r}")


def _coefficients_quadrature(c: Concept, degree: int, m: int) -> CoefficientEstimate:
    x1, w1 = _gauss_hermite_1d(m)
    n = c.dimension
    grids = np.meshgrid(*([x1] * n), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=1)
    values = np.asarray(c.batch(nodes), dtype=np.float64).reshape((m,) * n)
    # fold the weights into per-axis contraction matrices B[k, i] = w_i H_k(x_i)
    table = hermite_upto(degree, x1)  # (degree+1, m)
    B = table * w1[None, :]
    tensor = values
    for _ in range(n):
        tensor = np.tensordot(tensor, B, axes=([0], [1]))
    terms = {}
    for alpha in multi_indices_upto(n, degree):
        coeff = float(tensor[alpha])
        if coeff != 0.0:
            terms[alpha] = coeff
    return CoefficientEstimate(
        expansion(n, terms), int(degree), "quadrature", int(m)
    )


def _coefficients_mc(
    c: Concept, degree: int, samples: int, seed: int
) -> CoefficientEstimate:
    if samples < 2:
        raise ValidationError("samples must be >= 2")
    alphas = multi_indices_upto(c.dimension, degree)
    count = 0
    mean = np.zeros(len(alphas))
    m2 = np.zeros(len(alphas))
    for rng, m in chunk_rngs(seed, samples):
        x = rng.standard_normal((m, c.dimension))
        vals = np.asarray(c.batch(x), dtype=np.float64)[:, None] * basis_matrix(x, alphas)
        c_mean = vals.mean(axis=0)
        c_m2 = ((vals - c_mean) ** 2).sum(axis=0)
        delta = c_mean - mean
        total = count + m
        mean += delta * m / total
        m2 += c_m2 + delta * delta * count * m / total
        count = total
    stderr_vec = np.sqrt(np.maximum(m2, 0.0) / (count - 1) / count)
    terms = {}
    stderr = {}
    for j, alpha in enumerate(alphas):
        stderr[alpha] = float(stderr_vec[j])
        if mean[j] != 0.0:
            terms[alpha] = float(mean[j])
    return CoefficientEstimate(
        expansion(c.dimension, terms),
        int(degree),
        "monte_carlo",
        int(samples),
        check_seed(seed),
        stderr,
    )


# ---------------------------------------------------------------------------
# construction and error measurement


def build(
    fhat: HermiteExpansion,
    aplan: ApproximationPlan,
    complete_through: int | None = None,
) -> HermiteExpansion:
    """Form ``p = (T_rho fhat)_{<= degree}`` from estimated coefficients.

    ``fhat`` must be known complete through the plan degree; canonical
    expansions drop exact zeros, so callers whose estimate genuinely covered
    all terms declare it via ``complete_through``.
    """
    validate_noise_level(aplan.rho)
    known = fhat.degree_bound if complete_through is None else int(complete_through)
    if known < aplan.degree:
        raise ValidationError(
            f"coefficients known only through degree {known}, plan needs {aplan.degree}"
        )
    return truncate(apply_to_expansion(fhat, aplan.rho), aplan.degree)


def l1_error(c: Concept, p: HermiteExpansion, samples: int, seed: int) -> EstimateWithError:
    """Monte-Carlo estimate of ``E|f(X) - p(X)|``."""
    _check_same_dimension(c, p)

    def values(rng: np.random.Generator, m: int) -> np.ndarray:
        x = rng.standard_normal((m, c.dimension))
        return np.abs(c.batch(x) - expansion_eval_batch(p, x))

    return mc_mean(values, int(samples), seed)


def l2_error(c: Concept, p: HermiteExpansion, samples: int, seed: int) -> EstimateWithError:
    """Monte-Carlo estimate of ``E[(f - p)^2]^(1/2)`` (delta-method stderr)."""
    _check_same_dimension(c, p)

    def values(rng: np.random.Generator, m: int) -> np.ndarray:
        x = rng.standard_normal((m, c.dimension))
        return (c.batch(x) - expansion_eval_batch(p, x)) ** 2

    msq = mc_mean(values, int(samples), seed)
    root = math.sqrt(max(0.0, msq.mean))
    stderr = msq.stderr / (2.0 * root) if root > 0 else 0.0
    return EstimateWithError(root, stderr, msq.samples, msq.seed)


def _check_same_dimension(c: Concept, p: HermiteExpansion) -> None:
    if c.dimension != p.dimension:
        raise ValidationError(
            f"concept dimension {c.dimension} != polynomial dimension {p.dimension}"
        )


def _known_breakpoints(c: Concept) -> list[float] | None:
    if c.dimension != 1:
        return None
    if c.kind == "halfspace":
        return [c.params["c"] / c.params["w"][0]]
    if c.kind == "ball":
        return [-c.params["radius"], c.params["radius"]]
    if c.kind == "constant":
        return []
    if c.kind == "intersection":
        return [h["c"] / h["w"][0] for h in c.params["halfspaces"]]
    return None


def l1_error_quad_1d(
    c: Concept,
    p: HermiteExpansion,
    breakpoints: Sequence[float] | None = None,
    abs_tol: float = 1e-6,
) -> float:
    """Dense-quadrature Gaussian L1 error for one-dimensional concepts.

    The integral straddles the concept's discontinuities (known for
    halfspaces/balls/constants, otherwise supplied by the caller) and is cut
    at ``|x| = 12`` where the Gaussian weight is negligible.
    """
    _check_same_dimension(c, p)
    if c.dimension != 1:
        raise ValidationError("quadrature error path applies to dimension 1 only")
    if breakpoints is None:
        breakpoints = _known_breakpoints(c)
        if breakpoints is None:
            raise CapabilityError(
                f"no known discontinuities for kind {c.kind!r}; pass breakpoints"
            )

    def integrand(x: np.ndarray) -> np.ndarray:
        f = c.batch(x[:, None])
        q = expansion_eval_batch(p, x[:, None])
        return np.abs(f - q) * np.exp(-0.5 * x * x) / _SQRT_2PI

    pieces = max(8, int(math.ceil(2 * GAUSS_CUTOFF * math.sqrt(p.degree_bound + 1) / math.pi)))
    return integrate_adaptive(
        integrand,
        -GAUSS_CUTOFF,
        GAUSS_CUTOFF,
        abs_tol=abs_tol,
        breakpoints=list(breakpoints),
        initial_intervals=pieces,
    )


def l2_error_quad_1d(
    c: Concept,
    p: HermiteExpansion,
    breakpoints: Sequence[float] | None = None,
    abs_tol: float = 1e-8,
) -> float:
    """Dense-quadrature Gaussian L2 error, same conventions as the L1 path."""
    _check_same_dimension(c, p)
    if c.dimension != 1:
        raise ValidationError("quadrature error path applies to dimension 1 only")
    if breakpoints is None:
        breakpoints = _known_breakpoints(c) or []

    def integrand(x: np.ndarray) -> np.ndarray:
        f = c.batch(x[:, None])
        q = expansion_eval_batch(p, x[:, None])
        return (f - q) ** 2 * np.exp(-0.5 * x * x) / _SQRT_2PI

    pieces = max(8, int(math.ceil(2 * GAUSS_CUTOFF * math.sqrt(p.degree_bound + 1) / math.pi)))
    value = integrate_adaptive(
        integrand,
        -GAUSS_CUTOFF,
        GAUSS_CUTOFF,
        abs_tol=abs_tol,
        breakpoints=list(breakpoints),
        initial_intervals=pieces,
    )
    return math.sqrt(max(0.0, value))


# ---------------------------------------------------------------------------
# the bound check


_SUP_GRID = np.linspace(-4.0, 4.0, 41)


def _coefficient_slack(est: CoefficientEstimate) -> float:
    """Worst-case pointwise wobble of the built polynomial from coefficient
    noise: ``sum_alpha stderr(c_alpha) sup_grid |H_alpha|`` on ``[-4, 4]^n``."""
    if est.stderr is None:
        return 0.0
    table = np.abs(hermite_upto(est.degree, _SUP_GRID)).max(axis=1)
    total = 0.0
    for alpha, se in est.stderr.items():
        sup = 1.0
        for a in alpha:
            sup *= float(table[a])
        total += abs(se) * sup
    return total


@dataclass(frozen=True)
class ApproxReport:
    """Measured error of the construction against its proved budget.

    ``bound = gns_term + tail_term`` where ``gns_term`` is twice the noise
    sensitivity at ``delta = 1 - rho`` and ``tail_term = rho^(degree + 1)``;
    ``slack`` adds the coefficient-noise allowance for Monte-Carlo
    coefficients and is reported separately from the bound itself.
    """

    plan: ApproximationPlan
    coeff_method: str
    error_method: str
    measured_l1: EstimateWithError
    measured_l2: EstimateWithError
    gns_term: float
    gns_stderr: float
    tail_term: float
    slack: float
    seed: int

    @property
    def bound(self) -> float:
        return self.gns_term + self.tail_term

    @property
    def passed(self) -> bool:
        allowance = 4.0 * math.hypot(self.measured_l1.stderr, 2.0 * self.gns_stderr)
        return self.measured_l1.mean <= self.bound + allowance + self.slack

    def to_dict(self) -> dict:
        return {
            "plan": self.plan.to_dict(),
            "coeff_method": self.coeff_method,
            "error_method": self.error_method,
            "measured_l1": self.measured_l1.to_dict(),
            "measured_l2": self.measured_l2.to_dict(),
            "gns_term": self.gns_term,
            "gns_stderr": self.gns_stderr,
            "tail_term": self.tail_term,
            "bound": self.bound,
            "slack": self.slack,
            "seed": self.seed,
            "pass": self.passed,
        }


def bound_check(
    c: Concept,
    aplan: ApproximationPlan,
    coeff_budget: int | None = None,
    error_budget: int = 10**6,
    seed: int = 0,
    gns_value: float | None = None,
) -> ApproxReport:
    """Build ``p = (T_rho f)_{<=d}`` and test its L1 error against the bound.

    Coefficients come from the exact halfspace closed form when available,
    tensor quadrature up to dimension 3, and Monte Carlo beyond (adding the
    coefficient-noise slack).  The error is measured by dense quadrature in
    dimension 1 (stderr then reflects the quadrature tolerance) and by Monte
    Carlo otherwise.  GNS uses the concept's closed form when present, a
    supplied trusted value, or a Monte-Carlo estimate.
    """
    check_seed(seed)
    validate_noise_level(aplan.rho)
    delta = 1.0 - aplan.rho

    if c.kind == "halfspace":
        fhat = halfspace_expansion(c.params["w"], c.params["c"], aplan.degree)
        est = CoefficientEstimate(fhat, aplan.degree, "exact", 0)
    elif c.dimension <= 3:
        est = estimate_coefficients(c, aplan.degree, "quadrature", coeff_budget)
    else:
        est = estimate_coefficients(
            c, aplan.degree, "monte_carlo", coeff_budget, derive_seed(seed, 1)
        )
    p = build(est.expansion, aplan, complete_through=est.degree)

    if gns_value is not None:
        gns, gns_stderr = float(gns_value), 0.0
    elif c.gns_closed_form is not None:
        gns, gns_stderr = c.gns_closed_form(delta), 0.0
    else:
        from .concepts import gns_mc

        g = gns_mc(c, delta, error_budget, derive_seed(seed, 2))
        gns, gns_stderr = g.mean, g.stderr

    quad_tol = 1e-6
    if c.dimension == 1 and _known_breakpoints(c) is not None:
        value = l1_error_quad_1d(c, p, abs_tol=quad_tol)
        measured_l1 = EstimateWithError(value, quad_tol, 0, check_seed(seed), note="quadrature")
        measured_l2 = EstimateWithError(
            l2_error_quad_1d(c, p), 0.0, 0, check_seed(seed), note="quadrature"
        )
        error_method = "quadrature"
    else:
        measured_l1 = l1_error(c, p, error_budget, derive_seed(seed, 3))
        measured_l2 = l2_error(c, p, error_budget, derive_seed(seed, 4))
        error_method = "monte_carlo"

    return ApproxReport(
        plan=aplan,
        coeff_method=est.method,
        error_method=error_method,
        measured_l1=measured_l1,
        measured_l2=measured_l2,
        gns_term=2.0 * gns,
        gns_stderr=gns_stderr,
        tail_term=aplan.rho ** (aplan.degree + 1),
        slack=_coefficient_slack(est),
        seed=int(seed),
    )
