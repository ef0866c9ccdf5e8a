"""Hypothesis models, match summaries, likelihood ratios and prior/posterior odds."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from numerics import log_trunc_beta_integral
from schemas import (
    CodedModel,
    DomainError,
    EvidenceReport,
    MatchSummary,
    PosteriorBlock,
    PriorParams,
    RandomModel,
    SignalObservation,
    TimingBlock,
)

logger = logging.getLogger(__name__)

LN10 = math.log(10.0)
SWEEP_PARAMETERS = ("p", "q_max")
MANTISSA_DECIMALS = 7


@dataclass(frozen=True)
class SweepRow:
    value: float
    log10_lr: float


def summarize(observations: Iterable[SignalObservation]) -> MatchSummary:
    n = m = positives = excluded = 0
    for obs in observations:
        if not obs.applicable:
            excluded += 1
            continue
        n += 1
        if obs.expected == obs.observed:
            m += 1
        if obs.observed == 1:
            positives += 1
    return MatchSummary(n=n, m=m, positives=positives, excluded=excluded)


def summarize_signals(expected: Sequence[int], observed: Sequence[int]) -> MatchSummary:
    """Vectorized summarize for fully applicable binary vectors."""
    exp_arr = np.asarray(expected, dtype=np.int8)
    obs_arr = np.asarray(observed, dtype=np.int8)
    if exp_arr.shape != obs_arr.shape:
        raise DomainError(f"expected and observed lengths differ: {exp_arr.shape} vs {obs_arr.shape}")
    return MatchSummary(
        n=int(obs_arr.size),
        m=int(np.count_nonzero(exp_arr == obs_arr)),
        positives=int(np.count_nonzero(obs_arr)),
    )


def log_lik_coded(summary: MatchSummary, model: CodedModel) -> float:
    """ln P(signals | coded) = m ln p + (n − m) ln(1 − p)."""
    return summary.m * math.log(model.p) + (summary.n - summary.m) * math.log1p(-model.p)


def log_lik_random(summary: MatchSummary, model: RandomModel) -> float:
    """ln ∫_0^{q_max} q^k (1 − q)^(n − k) dq, divided by q_max when normalizing."""
    value = log_trunc_beta_integral(summary.positives, summary.n, float(model.q_max))
    if model.normalize:
        value -= math.log(model.q_max)
    return value


def log10_lr(summary: MatchSummary, coded: CodedModel, random: RandomModel) -> float:
    return (log_lik_coded(summary, coded) - log_lik_random(summary, random)) / LN10


def prior_odds(prior: PriorParams) -> float:
    """log10 of ψ·(1/M) / (1 − ψ)."""
    return math.log10(prior.psi / (1.0 - prior.psi)) - math.log10(prior.m_codes)


def posterior_odds(log10_lr_value: float, prior: PriorParams) -> float:
    return log10_lr_value + prior_odds(prior)


def odds_to_probability(log10_odds: float) -> float:
    if log10_odds >= 0:
        return 1.0 / (1.0 + 10.0 ** (-log10_odds))
    odds = 10.0 ** log10_odds
    return odds / (1.0 + odds)


def timing_log10_factor(bang_count: int, window_seconds: float, frame_seconds: float) -> float:
    """bang_count · log10(frame / window).

    A bang falls inside the pre-pitch window with probability ~1 when signaling,
    and with probability window/frame when bangs are unrelated to pitches.
    """
    if isinstance(bang_count, bool) or not isinstance(bang_count, int) or bang_count < 0:
        raise DomainError(f"bang_count must be a nonnegative integer, got {bang_count!r}")
    for name, value in (("window_seconds", window_seconds), ("frame_seconds", frame_seconds)):
        if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
            raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    if window_seconds > frame_seconds:
        raise DomainError(f"timing window {window_seconds}s exceeds frame {frame_seconds}s")
    return bang_count * math.log10(frame_seconds / window_seconds)


def sweep(
    summary: MatchSummary,
    parameter: str,
    start: float,
    stop: float,
    steps: int,
    coded: CodedModel,
    random: RandomModel,
) -> List[SweepRow]:
    """log10 LR over an evenly spaced grid of p or q_max, other parameters held fixed."""
    if parameter not in SWEEP_PARAMETERS:
        raise DomainError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise DomainError(f"steps must be an integer >= 2, got {steps!r}")
    grid = np.sort(np.linspace(float(start), float(stop), steps))
    rows: List[SweepRow] = []
    for value in grid.tolist():
        if parameter == "p":
            point = log10_lr(summary, replace(coded, p=value), random)
        else:
            point = log10_lr(summary, coded, replace(random, q_max=value))
        rows.append(SweepRow(value=value, log10_lr=point))
    logger.debug("sweep over %s: %d points", parameter, len(rows))
    return rows


def combine_log10_lr(values: Iterable[float]) -> float:
    """Combined figure for independently modelled groups: the sum of their log10 LRs."""
    return sum(values, 0.0)


def log10_to_scientific(log10_value: float) -> str:
    """Render 10**log10_value as d.dddddddE±NN without leaving log space."""
    if not math.isfinite(log10_value):
        return "0.0000000E+00" if log10_value < 0 else "inf"
    exponent = math.floor(log10_value)
    mantissa = round(10.0 ** (log10_value - exponent), MANTISSA_DECIMALS)
    if mantissa >= 10.0:
        mantissa /= 10.0
        exponent += 1
    sign = "+" if exponent >= 0 else "-"
    return f"{mantissa:.{MANTISSA_DECIMALS}f}E{sign}{abs(exponent):02d}"


def scientific_to_log10(text: str) -> float:
    mantissa, _, exponent = text.upper().partition("E")
    return math.log10(float(mantissa)) + int(exponent)


def evaluate(
    summary: MatchSummary,
    coded: CodedModel,
    random: RandomModel,
    prior: Optional[PriorParams] = None,
    timing: Optional[Tuple[int, float, float]] = None,
) -> EvidenceReport:
    """Full evidence report; timing is (bang_count, window_seconds, frame_seconds) or None."""
    log10_coded = log_lik_coded(summary, coded) / LN10
    log10_random = log_lik_random(summary, random) / LN10
    lr = log10_coded - log10_random

    posterior_block = None
    if prior is not None:
        post = posterior_odds(lr, prior)
        posterior_block = PosteriorBlock(
            psi=prior.psi,
            m_codes=prior.m_codes,
            log10_prior_odds=prior_odds(prior),
            log10_posterior_odds=post,
            posterior_probability=odds_to_probability(post),
        )

    timing_block = None
    if timing is not None:
        bang_count, window_seconds, frame_seconds = timing
        factor = timing_log10_factor(bang_count, window_seconds, frame_seconds)
        timing_block = TimingBlock(
            bang_count=bang_count,
            window_seconds=float(window_seconds),
            frame_seconds=float(frame_seconds),
            log10_factor=factor,
            log10_lr_with_timing=lr + factor,
        )

    return EvidenceReport(
        summary=summary,
        coded=coded,
        random=random,
        log10_lik_coded=log10_coded,
        log10_lik_random=log10_random,
        log10_lr=lr,
        lr_scientific=log10_to_scientific(lr),
        posterior=posterior_block,
        timing=timing_block,
    )
