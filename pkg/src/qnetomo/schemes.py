"""Analytic outcome distributions for the three measurement schemes.

Each scheme's statistics depend on the path only through the product of its
link parameters, so every distribution here takes that scalar product.
Sampling is deterministic given (distribution, n, seed) and portable across
platforms via a fixed, named PRNG.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .network import MeasurementTask, Scheme
from .oracle import BELL_LABELS, ZZ_LABELS

PROB_ATOL = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    """Labeled probability vector over a scheme's measurement outcomes.

    ``path_product`` is the product of the Werner parameters along the
    measured path.
    """

    scheme: Scheme
    labels: tuple
    probabilities: tuple
    path_product: float

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.probabilities):
            raise ValueError("labels and probabilities must align")
        if not 0.0 <= self.path_product <= 1.0:
            raise ValueError(f"path product {self.path_product} outside [0, 1]")
        if any(p < -PROB_ATOL for p in self.probabilities):
            raise ValueError("negative outcome probability")
        if abs(sum(self.probabilities) - 1.0) > PROB_ATOL:
            raise ValueError("probabilities must sum to 1")

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.probabilities))


@dataclass(frozen=True)
class OutcomeCounts:
    """Outcome counts from sampling, or real-valued expected counts.

    ``seed`` records the RNG seed that produced sampled counts and is None
    for analytically constructed expected counts.
    """

    labels: tuple
    counts: Mapping[str, float]
    total: float
    seed: int | None = None

    def __post_init__(self) -> None:
        if set(self.counts) != set(self.labels):
            raise ValueError("counts must cover exactly the outcome labels")
        if self.total <= 0:
            raise ValueError("total must be positive")
        if abs(sum(self.counts.values()) - self.total) > 1e-9:
            raise ValueError("counts must sum to the total")

    def frequency(self, label: str) -> float:
        return self.counts[label] / self.total


def _checked(path_product: float) -> float:
    if not 0.0 <= path_product <= 1.0:
        raise ValueError(f"path product {path_product} outside [0, 1]")
    return float(path_product)


def lzm_distribution(path_product: float) -> OutcomeDistribution:
    """Correlated Z-basis outcomes: equal bits carry (1+W)/4, unequal (1-W)/4."""
    w = _checked(path_product)
    agree = (1.0 + w) / 4.0
    differ = (1.0 - w) / 4.0
    return OutcomeDistribution(
        scheme=Scheme.LZM,
        labels=ZZ_LABELS,
        probabilities=(agree, differ, differ, agree),
        path_product=w,
    )


def jbm_distribution(path_product: float) -> OutcomeDistribution:
    """Joint Bell outcomes on two fused path copies: quadratic in the product."""
    w = _checked(path_product)
    top = (1.0 + 3.0 * w * w) / 4.0
    rest = (1.0 - w * w) / 4.0
    return OutcomeDistribution(
        scheme=Scheme.JBM,
        labels=BELL_LABELS,
        probabilities=(top, rest, rest, rest),
        path_product=w,
    )


def pem_distribution(path_product: float) -> OutcomeDistribution:
    """Pair-assisted Bell outcomes: linear in the product."""
    w = _checked(path_product)
    top = (1.0 + 3.0 * w) / 4.0
    rest = (1.0 - w) / 4.0
    return OutcomeDistribution(
        scheme=Scheme.PEM,
        labels=BELL_LABELS,
        probabilities=(top, rest, rest, rest),
        path_product=w,
    )


_BY_SCHEME = {
    Scheme.LZM: lzm_distribution,
    Scheme.JBM: jbm_distribution,
    Scheme.PEM: pem_distribution,
}


def scheme_distribution(scheme: Scheme, path_product: float) -> OutcomeDistribution:
    return _BY_SCHEME[scheme](path_product)


def task_distribution(task: MeasurementTask, params: Mapping[str, float]) -> OutcomeDistribution:
    """Outcome distribution of a task given per-link Werner parameters."""
    product = 1.0
    for lid in task.path.link_ids:
        product *= params[lid]
    return scheme_distribution(task.scheme, product)


def derive_seed(base: int, *indices: int) -> int:
    """Deterministic child seed for a sampling stream, stable across platforms."""
    ss = np.random.SeedSequence([int(base), *[int(i) for i in indices]])
    return int(ss.generate_state(1, np.uint64)[0])


def sample_outcomes(dist: OutcomeDistribution, n: int, seed: int) -> OutcomeCounts:
    """n categorical draws from the distribution with a fixed PCG64 stream."""
    if n < 1:
        raise ValueError("sample count must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pvals = np.clip(np.array(dist.probabilities, dtype=float), 0.0, 1.0)
    pvals /= pvals.sum()
    drawn = rng.multinomial(n, pvals)
    counts = {label: int(c) for label, c in zip(dist.labels, drawn)}
    return OutcomeCounts(labels=dist.labels, counts=counts, total=n, seed=seed)


def expected_counts(dist: OutcomeDistribution, n: float) -> OutcomeCounts:
    """Noise-free expected counts n * p_k, used for consistency checks."""
    if n <= 0:
        raise ValueError("total must be positive")
    counts = {label: n * p for label, p in zip(dist.labels, dist.probabilities)}
    return OutcomeCounts(labels=dist.labels, counts=counts, total=float(n), seed=None)
