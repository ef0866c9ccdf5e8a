"""Monte Carlo calibration of the likelihood ratio on synthetic signal sequences.

Every rep draws from its own PCG64 generator seeded with
``SeedSequence(seed, spawn_key=(rep,))``, so results do not depend on how reps
are spread across workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from evidence_model import LN10, log_lik_coded, log_lik_random, log10_lr, summarize_signals
from schemas import CodedModel, DomainError, RandomModel, require_probability

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy PCG64"
SEED_SCHEME = "SeedSequence(seed, spawn_key=(rep,))"
DEFAULT_SEED = 20200101
DEFAULT_MARKOV_K = (10.0, 100.0)
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
MAX_BRUTE_FORCE_N = 12
LINEAR_LIMIT = 150.0

SeedLike = Union[int, np.random.Generator]
ExpectedGenerator = Callable[[np.random.Generator, int], np.ndarray]


class Hypothesis(str, Enum):
    CODED = "coded"
    RANDOM = "random"


@dataclass(frozen=True)
class QSpec:
    """Signal rate under the random hypothesis: a fixed q, or q ~ uniform on [0, q_max] per sequence."""

    fixed: Optional[float] = None
    q_max: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.fixed is None) == (self.q_max is None):
            raise DomainError("give exactly one of a fixed q or q_max")
        if self.fixed is not None and not (
            isinstance(self.fixed, (int, float)) and math.isfinite(self.fixed) and 0.0 <= self.fixed <= 1.0
        ):
            raise DomainError(f"fixed q must lie in [0, 1], got {self.fixed!r}")
        if self.q_max is not None:
            require_probability("q_max", self.q_max, allow_one=True)

    def draw(self, rng: np.random.Generator) -> float:
        if self.fixed is not None:
            return float(self.fixed)
        return float(rng.uniform(0.0, self.q_max))

    def describe(self) -> Dict[str, Optional[float]]:
        return {"fixed": self.fixed, "q_max": self.q_max}


@dataclass(frozen=True)
class SimConfig:
    hypothesis: Hypothesis
    n: int
    reps: int = 1
    seed: int = DEFAULT_SEED
    p: Optional[float] = None
    q_spec: Optional[QSpec] = None

    def __post_init__(self) -> None:
        for name, minimum in (("n", 0), ("reps", 1), ("seed", 0)):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
                raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
        if self.seed >= 2**64:
            raise DomainError(f"seed must fit in 64 bits, got {self.seed}")
        if self.hypothesis is Hypothesis.CODED:
            if self.p is None:
                raise DomainError("coded simulation needs p")
            require_probability("p", self.p)
        elif self.q_spec is None:
            raise DomainError("random simulation needs a fixed q or q_max")

    def to_dict(self) -> Dict[str, object]:
        return {
            "hypothesis": self.hypothesis.value,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "p": self.p,
            "q": self.q_spec.describe() if self.q_spec else None,
        }


@dataclass(frozen=True)
class MarkovCheck:
    k: float
    empirical_fraction: float
    bound: float
    slack: float
    passed: bool


@dataclass(frozen=True)
class NormalizationSums:
    sum_coded: float
    sum_random: float


@dataclass
class SimulationSummary:
    config: Dict[str, object]
    rng_algorithm: str
    seed_scheme: str
    reps: int
    log10_mean_lr: float
    mean_lr: Optional[float]
    mc_standard_error: Optional[float]
    quantiles: Dict[str, float]
    markov: List[MarkovCheck] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def rep_generator(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def fair_coin_expected(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.int8)


def simulate_coded(expected: Sequence[int], p: float, seed: SeedLike) -> np.ndarray:
    """Each observed signal equals the expected one with probability p."""
    require_probability("p", p)
    rng = _as_generator(seed)
    exp_arr = np.asarray(expected, dtype=np.int8)
    flips = rng.random(exp_arr.size) >= p
    return np.where(flips, 1 - exp_arr, exp_arr).astype(np.int8)


def simulate_random(n: int, q_spec: QSpec, seed: SeedLike) -> np.ndarray:
    """Draw q once for the sequence, then n independent Bernoulli(q) signals."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    rng = _as_generator(seed)
    q = q_spec.draw(rng)
    return (rng.random(n) < q).astype(np.int8)


def _one_rep(
    config: SimConfig,
    rep: int,
    expected_generator: ExpectedGenerator,
    coded: CodedModel,
    random: RandomModel,
) -> float:
    rng = rep_generator(config.seed, rep)
    expected = expected_generator(rng, config.n)
    if config.hypothesis is Hypothesis.CODED:
        observed = simulate_coded(expected, config.p, rng)
    else:
        observed = simulate_random(config.n, config.q_spec, rng)
    return log10_lr(summarize_signals(expected, observed), coded, random)


def lr_distribution(
    config: SimConfig,
    coded: CodedModel,
    random: RandomModel,
    expected_generator: Optional[ExpectedGenerator] = None,
    *,
    workers: int = 1,
) -> np.ndarray:
    """log10 LR of ``config.reps`` independent sequences, in rep order."""
    generator = expected_generator or fair_coin_expected

    def _chunk(reps: range) -> List[float]:
        return [_one_rep(config, rep, generator, coded, random) for rep in reps]

    if workers > 1 and config.reps > 1:
        bounds = np.linspace(0, config.reps, min(workers, config.reps) + 1).astype(int)
        chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=len(chunks)) as executor:
            values = [value for part in executor.map(_chunk, chunks) for value in part]
    else:
        values = _chunk(range(config.reps))
    logger.info("simulated %d reps under %s (n=%d)", config.reps, config.hypothesis.value, config.n)
    return np.asarray(values, dtype=float)


def markov_bound_check(sample: Sequence[float], k: float) -> MarkovCheck:
    """Compare the empirical P(LR >= k) against Markov's 1/k, with 3-sigma Monte Carlo slack."""
    if not isinstance(k, (int, float)) or not math.isfinite(k) or k <= 1.0:
        raise DomainError(f"k must be a finite number > 1, got {k!r}")
    values = np.asarray(sample, dtype=float)
    if values.size == 0:
        raise DomainError("sample is empty")
    fraction = float(np.count_nonzero(values >= math.log10(k))) / values.size
    bound = 1.0 / k
    slack = 3.0 * math.sqrt(1.0 / (k * values.size))
    return MarkovCheck(k=float(k), empirical_fraction=fraction, bound=bound, slack=slack, passed=fraction <= bound + slack)


def brute_force_normalization(expected: Sequence[int], coded: CodedModel, random: RandomModel) -> NormalizationSums:
    """Sum each model's likelihood over all 2**n observed vectors."""
    exp_arr = np.asarray(expected, dtype=np.int8)
    n = int(exp_arr.size)
    if n > MAX_BRUTE_FORCE_N:
        raise DomainError(f"brute-force enumeration supports n <= {MAX_BRUTE_FORCE_N}, got {n}")
    outcomes = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    coded_terms: List[float] = []
    random_terms: List[float] = []
    for observed in outcomes:
        summary = summarize_signals(exp_arr, observed)
        coded_terms.append(math.exp(log_lik_coded(summary, coded)))
        random_terms.append(math.exp(log_lik_random(summary, random)))
    return NormalizationSums(sum_coded=math.fsum(coded_terms), sum_random=math.fsum(random_terms))


def summarize_sample(
    config: SimConfig,
    sample: Sequence[float],
    markov_k: Sequence[float] = DEFAULT_MARKOV_K,
) -> SimulationSummary:
    values = np.asarray(sample, dtype=float)
    reps = int(values.size)
    log10_mean = float((logsumexp(values * LN10) - math.log(reps)) / LN10)

    mean_lr: Optional[float] = None
    standard_error: Optional[float] = None
    if float(np.max(np.abs(values))) <= LINEAR_LIMIT:
        linear = np.power(10.0, values)
        mean_lr = float(linear.mean())
        standard_error = float(linear.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    elif abs(log10_mean) <= 300:
        mean_lr = 10.0**log10_mean

    quantiles = {f"p{round(q * 100):02d}": float(v) for q, v in zip(QUANTILES, np.quantile(values, QUANTILES))}
    checks = [markov_bound_check(values, k) for k in markov_k] if config.hypothesis is Hypothesis.RANDOM else []
    return SimulationSummary(
        config=config.to_dict(),
        rng_algorithm=RNG_ALGORITHM,
        seed_scheme=SEED_SCHEME,
        reps=reps,
        log10_mean_lr=log10_mean,
        mean_lr=mean_lr,
        mc_standard_error=standard_error,
        quantiles=quantiles,
        markov=checks,
    )
