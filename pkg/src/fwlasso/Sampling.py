import math
import logging

from dataclasses import dataclass
from typing import Union

import numpy as np

from .SamplingMode import SamplingMode
from .FWLassoErrors import ContractViolation

logger = logging.getLogger(__name__)

# Seed used whenever the caller does not ask for one; runs are reproducible by default.
DEFAULT_SEED = 20150101


def make_rng(seed: Union[int, None]) -> np.random.Generator:
    """
    Create the generator used everywhere in fwlasso: PCG64 seeded with ``seed``.

    Args:
        seed (int, optional): 64-bit seed; None draws fresh OS entropy.

    Returns:
        np.random.Generator: A new independent generator.
    """
    return np.random.Generator(np.random.PCG64(seed))


def child_seed(master_seed: int, index: int) -> int:
    """
    Derive the seed of child ``index`` (e.g. a grid point) from a master seed.

    Children are spawned through ``SeedSequence`` spawn keys, so they are reproducible and
    statistically independent of each other and of the master stream.

    Args:
        master_seed (int): The run seed.
        index (int): Child index, e.g. the position on the regularization grid.

    Returns:
        int: A 64-bit seed.
    """
    sequence = np.random.SeedSequence(master_seed, spawn_key=(index,))

    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def random_seed() -> int:
    """
    Draw a fresh 64-bit seed from OS entropy.
    """
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])


def draw_subset(p: int, kappa: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw a uniformly random kappa-subset of ``{0, ..., p-1}`` without replacement.

    Args:
        p (int): Size of the ground set.
        kappa (int): Subset size, ``1 <= kappa <= p``.
        rng (np.random.Generator): Generator owned by the caller; not consumed when ``kappa == p``.

    Returns:
        np.ndarray: Sorted distinct indices.

    Raises:
        ContractViolation: If kappa is out of range.
    """
    if not 1 <= kappa <= p:
        raise ContractViolation(f"Sample size must lie in [1, {p}], got {kappa}")

    if kappa == p:
        return np.arange(p)

    return np.sort(rng.choice(p, size=kappa, replace=False))


def _check_probability(value: float, name: str) -> None:
    if not 0.0 < value < 1.0:
        raise ContractViolation(f"{name} must lie in (0, 1), got {value}")


def size_for_top_fraction(confidence: float, top_fraction: float) -> int:
    """
    Smallest sample size whose best element lies in the top ``top_fraction`` of all p values
    with probability at least ``confidence``, independently of p.

    Solves ``(1 - q)^kappa <= 1 - rho``; e.g. rho=0.98, q=0.02 gives 194.

    Args:
        confidence (float): rho in (0, 1).
        top_fraction (float): q in (0, 1).

    Returns:
        int: kappa, at least 1.
    """
    _check_probability(confidence, "confidence")
    _check_probability(top_fraction, "top fraction")

    return max(1, math.ceil(math.log1p(-confidence) / math.log1p(-top_fraction)))


def exact_miss_probability(s: int, p: int, kappa: int) -> float:
    """
    Probability that a uniform kappa-subset of p indices misses all of s given indices.

    Evaluates ``prod_{j<kappa} (1 - s/(p-j))`` in log space.
    """
    if kappa > p - s:
        return 0.0

    j = np.arange(kappa, dtype=np.float64)

    return float(np.exp(np.sum(np.log1p(-s / (p - j)))))


def size_for_active_hit(confidence: float, s: int, p: int) -> int:
    """
    Sample size hitting at least one of s active features with probability at least ``confidence``.

    The estimate ``ln(1 - rho) / ln(1 - s/p)`` is rounded to the nearest integer and then raised
    until the exact hypergeometric miss probability is at most ``1 - rho``; the result never
    exceeds p. For rho=0.99, s=123, p=10000 this gives 372.

    Args:
        confidence (float): rho in (0, 1).
        s (int): Number of active features, ``1 <= s <= p``.
        p (int): Number of features.

    Returns:
        int: kappa in [1, p].
    """
    _check_probability(confidence, "confidence")
    if not 1 <= s <= p:
        raise ContractViolation(f"Active count must lie in [1, {p}], got {s}")

    if s == p:
        return 1

    estimate = math.log1p(-confidence) / math.log1p(-s / p)
    kappa = min(p, max(1, math.floor(estimate + 0.5)))
    while kappa < p and exact_miss_probability(s, p, kappa) > 1.0 - confidence:
        kappa += 1

    return kappa


@dataclass(frozen=True)
class SamplingPlan:
    """
    How the candidate coordinates of every Frank-Wolfe iteration are drawn and sized.

    Attributes:
        mode (SamplingMode): The sizing rule.
        size (int, optional): kappa for ``FIXED_SIZE``.
        fraction (float, optional): Share of p for ``FRACTION_OF_P``.
        confidence (float, optional): rho for the two confidence rules.
        top_fraction (float, optional): q for ``CONFIDENCE_TOP_FRACTION``.
        active_estimate (int, optional): s for ``CONFIDENCE_ACTIVE_SET``; when None, s follows the
            running number of nonzero coefficients and kappa is re-resolved every iteration.
        seed (int): Seed of the generator drawing the samples.
    """

    mode: SamplingMode = SamplingMode.FULL_DETERMINISTIC
    size: Union[int, None] = None
    fraction: Union[float, None] = None
    confidence: Union[float, None] = None
    top_fraction: Union[float, None] = None
    active_estimate: Union[int, None] = None
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.mode is SamplingMode.FIXED_SIZE and (self.size is None or self.size < 1):
            raise ContractViolation("fixed_size sampling needs a size >= 1")

        if self.mode is SamplingMode.FRACTION_OF_P and (self.fraction is None or not 0.0 < self.fraction <= 1.0):
            raise ContractViolation("fraction_of_p sampling needs a fraction in (0, 1]")

        if self.mode in (SamplingMode.CONFIDENCE_TOP_FRACTION, SamplingMode.CONFIDENCE_ACTIVE_SET):
            if self.confidence is None:
                raise ContractViolation(f"{self.mode} sampling needs a confidence")

            _check_probability(self.confidence, "confidence")

        if self.mode is SamplingMode.CONFIDENCE_TOP_FRACTION:
            if self.top_fraction is None:
                raise ContractViolation("confidence_top_fraction sampling needs a top fraction")

            _check_probability(self.top_fraction, "top fraction")

        if self.active_estimate is not None and self.active_estimate < 1:
            raise ContractViolation("active estimate must be at least 1")

    @classmethod
    def full(cls, seed: int = DEFAULT_SEED) -> 'SamplingPlan':
        return cls(SamplingMode.FULL_DETERMINISTIC, seed=seed)

    @classmethod
    def fixed(cls, size: int, seed: int = DEFAULT_SEED) -> 'SamplingPlan':
        return cls(SamplingMode.FIXED_SIZE, size=size, seed=seed)

    @classmethod
    def fraction_of_p(cls, fraction: float, seed: int = DEFAULT_SEED) -> 'SamplingPlan':
        return cls(SamplingMode.FRACTION_OF_P, fraction=fraction, seed=seed)

    @classmethod
    def confidence_top(cls, confidence: float, top_fraction: float, seed: int = DEFAULT_SEED) -> 'SamplingPlan':
        return cls(SamplingMode.CONFIDENCE_TOP_FRACTION, confidence=confidence, top_fraction=top_fraction, seed=seed)

    @classmethod
    def confidence_active(cls, confidence: float, active_estimate: Union[int, None] = None,
                          seed: int = DEFAULT_SEED) -> 'SamplingPlan':
        return cls(SamplingMode.CONFIDENCE_ACTIVE_SET, confidence=confidence, active_estimate=active_estimate, seed=seed)

    @property
    def is_adaptive(self) -> bool:
        """
        True when kappa depends on the current iterate and is re-resolved every iteration.
        """
        return self.mode is SamplingMode.CONFIDENCE_ACTIVE_SET and self.active_estimate is None

    def resolve(self, p: int, nnz: int = 0) -> int:
        """
        Resolve the sample size for a problem with p features.

        Args:
            p (int): Number of features.
            nnz (int, optional): Current number of nonzero coefficients (adaptive rule only). Defaults to 0.

        Returns:
            int: kappa in [1, p].

        Raises:
            ContractViolation: If a fixed size exceeds p.
        """
        if self.mode is SamplingMode.FULL_DETERMINISTIC:
            return p

        if self.mode is SamplingMode.FIXED_SIZE:
            if self.size > p:
                raise ContractViolation(f"Sample size {self.size} exceeds p={p}")

            return self.size

        if self.mode is SamplingMode.FRACTION_OF_P:
            # Rounding before ceil keeps exact products such as 0.07 * 100 at 7.
            return min(p, max(1, math.ceil(round(self.fraction * p, 9))))

        if self.mode is SamplingMode.CONFIDENCE_TOP_FRACTION:
            return min(p, size_for_top_fraction(self.confidence, self.top_fraction))

        s = self.active_estimate if self.active_estimate is not None else max(1, nnz)

        return size_for_active_hit(self.confidence, min(s, p), p)

    def to_dict(self, p: Union[int, None] = None) -> dict:
        """
        Describe the plan, including the resolved kappa when p is known.
        """
        description = {'mode': str(self.mode), 'seed': self.seed}
        for name in ('size', 'fraction', 'confidence', 'top_fraction', 'active_estimate'):
            value = getattr(self, name)
            if value is not None:
                description[name] = value

        if p is not None:
            description['kappa'] = 'adaptive' if self.is_adaptive else self.resolve(p)

        return description
