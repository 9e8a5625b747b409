"""Gaussian smoothing operator.

For noise level ``rho`` in [0, 1] the operator replaces ``f`` by

    (T_rho f)(x) = E_Y[ f(rho x + sqrt(1 - rho^2) Y) ],   Y ~ N(0, I_n),

which acts diagonally on the orthonormal Hermite basis:
``T_rho H_alpha = rho^{|alpha|} H_alpha``.  The module provides the exact
action on sparse expansions, a pointwise Monte-Carlo evaluation, and checks
of the eigenvalue relation and of the truncation tail bound

    || T_rho f - (T_rho f)_{<=d} ||_2^2  <=  rho^{2(d+1)} ||f||_2^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .hermite import HermiteExpansion, expansion, hermite_eval, l2_norm, truncate
from .mc import EstimateWithError, mc_mean
from . import mc


def validate_noise_level(rho: float) -> float:
    """Check ``rho`` lies in [0, 1]; out-of-range values are never clamped."""
    rho = float(rho)
    if not (math.isfinite(rho) and 0.0 <= rho <= 1.0):
        raise ValidationError(f"noise level rho must lie in [0, 1], got {rho}")
    return rho


def apply_to_expansion(p: HermiteExpansion, rho: float) -> HermiteExpansion:
    """Exact action on an expansion: scale each coefficient by rho^|alpha|.

    At ``rho = 0`` every non-constant term vanishes and is dropped from the
    canonical form; degrees are never increased.
    """
    rho = validate_noise_level(rho)
    return expansion(
        p.dimension, {a: c * rho ** sum(a) for a, c in p.terms.items()}
    )


def apply_pointwise_mc(
    f: Callable[[np.ndarray], np.ndarray],
    rho: float,
    x,
    samples: int,
    seed: int,
) -> EstimateWithError:
    """Monte-Carlo estimate of ``(T_rho f)(x)``.

    ``f`` must map an ``(N, n)`` array of points to ``(N,)`` values; ``x`` is
    a scalar or length-``n`` point.  At ``rho = 1`` the operator is the
    identity and the exact value ``f(x)`` is returned with stderr 0.
    """
    rho = validate_noise_level(rho)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    n = x.shape[0]
    if rho == 1.0:
        value = float(np.asarray(f(x[None, :])).reshape(-1)[0])
        return EstimateWithError(value, 0.0, 1, mc.check_seed(seed), note="exact at rho=1")
    spread = math.sqrt(1.0 - rho * rho)

    def sampler(rng: np.random.Generator, m: int) -> np.ndarray:
        y = rng.standard_normal((m, n))
        return np.asarray(f(rho * x[None, :] + spread * y), dtype=np.float64)

    return mc_mean(sampler, samples, seed)


@dataclass(frozen=True)
class EigenCheckRow:
    x: float
    estimate: float
    stderr: float
    target: float

    @property
    def deviation(self) -> float:
        return self.estimate - self.target

    @property
    def stderr_units(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.deviation == 0.0 else math.inf
        return abs(self.deviation) / self.stderr


@dataclass(frozen=True)
class EigenCheckReport:
    """Per-grid-point comparison of MC smoothing of ``H_k`` against
    ``rho^k H_k``; passes when every deviation is within 4 stderr."""

    degree: int
    rho: float
    samples: int
    seed: int
    rows: tuple[EigenCheckRow, ...]

    @property
    def max_abs_deviation(self) -> float:
        return max(abs(r.deviation) for r in self.rows)

    @property
    def max_stderr_units(self) -> float:
        return max(r.stderr_units for r in self.rows)

    @property
    def passed(self) -> bool:
        return all(abs(r.deviation) <= 4.0 * r.stderr for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "rho": self.rho,
            "samples": self.samples,
            "seed": self.seed,
            "max_abs_deviation": self.max_abs_deviation,
            "pass": self.passed,
            "rows": [
                {
                    "x": r.x,
                    "estimate": r.estimate,
                    "stderr": r.stderr,
                    "target": r.target,
                }
                for r in self.rows
            ],
        }


def eigen_check(
    k: int,
    rho: float,
    grid: Sequence[float],
    samples: int,
    seed: int,
) -> EigenCheckReport:
    """Verify ``T_rho H_k = rho^k H_k`` by Monte Carlo on a grid of points."""
    rho = validate_noise_level(rho)
    if k < 0:
        raise ValidationError(f"degree must be >= 0, got {k}")
    grid = [float(g) for g in grid]
    if not grid:
        raise ValidationError("grid must be non-empty")

    def f(points: np.ndarray) -> np.ndarray:
        return hermite_eval(k, points[:, 0])

    rows = []
    for i, x in enumerate(grid):
        est = apply_pointwise_mc(f, rho, x, samples, mc.derive_seed(seed, i))
        target = rho**k * hermite_eval(k, x)
        rows.append(EigenCheckRow(x, est.mean, est.stderr, target))
    return EigenCheckReport(int(k), rho, int(samples), mc.check_seed(seed), tuple(rows))


@dataclass(frozen=True)
class TailBoundReport:
    """Exact check of the smoothing tail bound on one expansion."""

    lhs: float
    rhs: float
    rho: float
    degree: int

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + 1e-12

    def to_dict(self) -> dict:
        # seed/samples are 0: this check is exact, not sampled
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.passed,
            "seed": 0,
            "samples": 0,
        }


def tail_bound_check(p: HermiteExpansion, rho: float, d: int) -> TailBoundReport:
    """Compare ``||T_rho p - (T_rho p)_{<=d}||^2`` with ``rho^{2(d+1)} ||p||^2``."""
    rho = validate_noise_level(rho)
    if d < 0:
        raise ValidationError(f"degree must be >= 0, got {d}")
    smoothed = apply_to_expansion(p, rho)
    tail = smoothed - truncate(smoothed, d)
    lhs = l2_norm(tail) ** 2
    rhs = rho ** (2 * d + 2) * l2_norm(p) ** 2
    return TailBoundReport(lhs, rhs, rho, int(d))
