"""Seeded Monte-Carlo accumulation with reproducible chunked streams.

Sampling is split into fixed-size chunks; the RNG for chunk ``i`` is seeded
from ``(master_seed, i)``, so a given ``(seed, samples)`` pair always
consumes identical random streams no matter how the chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import ValidationError

# Chunk size fixes the stream layout; changing it changes sampled values.
CHUNK_SIZE = 1 << 17

_MAX_SEED = 2**64


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not 0 <= seed < _MAX_SEED:
        raise ValidationError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def derive_seed(master: int, tag: int) -> int:
    """Deterministically derive an independent child seed from a master seed."""
    ss = np.random.SeedSequence((check_seed(master), int(tag)))
    return int(ss.generate_state(1, np.uint64)[0])


def chunk_rngs(seed: int, samples: int) -> Iterator[tuple[np.random.Generator, int]]:
    """Yield ``(rng, count)`` pairs covering ``samples`` draws in order."""
    check_seed(seed)
    done = 0
    index = 0
    while done < samples:
        count = min(CHUNK_SIZE, samples - done)
        rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
        yield rng, count
        done += count
        index += 1


@dataclass(frozen=True)
class EstimateWithError:
    """A Monte-Carlo (or quadrature) estimate with a standard error."""

    mean: float
    stderr: float
    samples: int
    seed: int
    note: str | None = None

    def to_dict(self) -> dict:
        d = {
            "mean": self.mean,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
        }
        if self.note is not None:
            d["note"] = self.note
        return d


def _check_samples(samples: int) -> int:
    if not isinstance(samples, (int, np.integer)) or samples < 2:
        raise ValidationError(f"samples must be an integer >= 2, got {samples!r}")
    return int(samples)


def mc_mean(
    sample_values: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    note: str | None = None,
) -> EstimateWithError:
    """Mean and standard error of ``sample_values(rng, m)`` over ``samples`` draws.

    Variances are pooled across chunks with a Welford-style merge.  If every
    sampled value is identical the estimate is that value with stderr exactly
    0 (covers degenerate cases such as constant integrands).
    """
    samples = _check_samples(samples)
    n = 0
    mean = 0.0
    m2 = 0.0
    vmin = math.inf
    vmax = -math.inf
    for rng, count in chunk_rngs(seed, samples):
        values = np.asarray(sample_values(rng, count), dtype=np.float64)
        if values.shape != (count,):
            raise ValidationError(
                f"sampler returned shape {values.shape}, expected ({count},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("sampler produced non-finite values")
        c_mean = float(values.mean())
        c_m2 = float(((values - c_mean) ** 2).sum())
        delta = c_mean - mean
        total = n + count
        mean += delta * count / total
        m2 += c_m2 + delta * delta * n * count / total
        n = total
        vmin = min(vmin, float(values.min()))
        vmax = max(vmax, float(values.max()))
    if vmin == vmax:
        return EstimateWithError(vmin, 0.0, n, int(seed), note)
    var = max(0.0, m2 / (n - 1))
    return EstimateWithError(mean, math.sqrt(var / n), n, int(seed), note)


def mc_fraction(
    hit_count: Callable[[np.random.Generator, int], int],
    samples: int,
    seed: int,
    note: str | None = None,
) -> EstimateWithError:
    """Binomial fraction estimate: ``hit_count(rng, m)`` hits out of ``samples``.

    Uses the exact integer hit count, so reruns are bit-identical, and the
    binomial standard error sqrt(p(1-p)/n).
    """
    samples = _check_samples(samples)
    hits = 0
    n = 0
    for rng, count in chunk_rngs(seed, samples):
        h = int(hit_count(rng, count))
        if not 0 <= h <= count:
            raise ValidationError(f"hit count {h} outside [0, {count}]")
        hits += h
        n += count
    p = hits / n
    stderr = math.sqrt(p * (1.0 - p) / n)
    return EstimateWithError(p, stderr, n, int(seed), note)
