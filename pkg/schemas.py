"""Shared domain types, request schema and error hierarchy."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

NOT_APPLICABLE: Optional[int] = None

MODES = ("bridge", "baseball", "rate", "simulate", "sweep")


class InputError(ValueError):
    """Invalid user input. Maps to exit code 1."""


class DomainError(InputError):
    """Argument outside the domain of an operation."""


class ParseError(InputError):
    """Malformed input file row."""

    def __init__(self, message: str, line: Optional[int] = None, token: Optional[str] = None) -> None:
        self.line = line
        self.token = token
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class NumericFailure(RuntimeError):
    """Numerical routine did not converge or produced a non-finite value. Maps to exit code 2."""


def _coerce_float(value: Any, default: Optional[float] = None) -> Optional[float]:
    if value is None:
        return default
    try:
        number = float(value)
    except (TypeError, ValueError):
        return default
    return number


def _coerce_int(value: Any, default: Optional[int] = None) -> Optional[int]:
    if value is None:
        return default
    try:
        return int(value)
    except (TypeError, ValueError):
        return default


def require_probability(name: str, value: float, *, allow_one: bool = False) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}")
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not (value > 0.0 and upper_ok):
        interval = "(0, 1]" if allow_one else "(0, 1)"
        raise DomainError(f"{name} must lie in {interval}, got {value!r}")


@dataclass(frozen=True)
class SignalObservation:
    """One event: the code's predicted signal (or NOT_APPLICABLE) and the observed signal."""

    expected: Optional[int]
    observed: int

    def __post_init__(self) -> None:
        if self.observed not in (0, 1):
            raise DomainError(f"observed signal must be 0 or 1, got {self.observed!r}")
        if self.expected is not NOT_APPLICABLE and self.expected not in (0, 1):
            raise DomainError(f"expected signal must be 0, 1 or NOT_APPLICABLE, got {self.expected!r}")

    @property
    def applicable(self) -> bool:
        return self.expected is not NOT_APPLICABLE


@dataclass(frozen=True)
class MatchSummary:
    n: int
    m: int
    positives: int
    excluded: int = 0

    def __post_init__(self) -> None:
        for name in ("n", "m", "positives", "excluded"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {value!r}")
        if self.m > self.n:
            raise DomainError(f"m={self.m} exceeds n={self.n}")
        if self.positives > self.n:
            raise DomainError(f"positives={self.positives} exceeds n={self.n}")

    @property
    def total(self) -> int:
        return self.n + self.excluded

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class CodedModel:
    """Per-event probability p of executing the code correctly."""

    p: float

    def __post_init__(self) -> None:
        require_probability("p", self.p)


@dataclass(frozen=True)
class RandomModel:
    """Uniform weighting of the signal rate q over [0, q_max].

    normalize=False integrates q^k (1-q)^(n-k) over [0, q_max] as written;
    normalize=True divides by q_max, i.e. a proper uniform prior on [0, q_max].
    """

    q_max: float = 1.0
    normalize: bool = False

    def __post_init__(self) -> None:
        require_probability("q_max", self.q_max, allow_one=True)


@dataclass(frozen=True)
class PriorParams:
    psi: float
    m_codes: int

    def __post_init__(self) -> None:
        require_probability("psi", self.psi)
        if isinstance(self.m_codes, bool) or not isinstance(self.m_codes, int) or self.m_codes < 1:
            raise DomainError(f"m_codes must be an integer >= 1, got {self.m_codes!r}")


@dataclass
class PosteriorBlock:
    psi: float
    m_codes: int
    log10_prior_odds: float
    log10_posterior_odds: float
    posterior_probability: float


@dataclass
class TimingBlock:
    bang_count: int
    window_seconds: float
    frame_seconds: float
    log10_factor: float
    log10_lr_with_timing: float


@dataclass
class EvidenceReport:
    summary: MatchSummary
    coded: CodedModel
    random: RandomModel
    log10_lik_coded: float
    log10_lik_random: float
    log10_lr: float
    lr_scientific: str
    posterior: Optional[PosteriorBlock] = None
    timing: Optional[TimingBlock] = None

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["model"] = {
            "p": self.coded.p,
            "q_max": self.random.q_max,
            "normalize": self.random.normalize,
        }
        payload.pop("coded")
        payload.pop("random")
        return payload


@dataclass
class AnalysisRequest:
    """Everything one CLI invocation asks for; echoed into the JSON report."""

    mode: str
    input_path: Optional[str] = None
    code: str = "c"
    p: Optional[float] = None
    q_max: Optional[float] = None
    normalize: bool = False
    psi: Optional[float] = None
    m_codes: Optional[int] = None
    summary_n: Optional[int] = None
    summary_m: Optional[int] = None
    summary_positives: Optional[int] = None
    timing_window: Optional[float] = None
    timing_frame: Optional[float] = None
    timing_bangs: Optional[int] = None
    grouping: str = "pooled"
    taxonomy_path: Optional[str] = None
    skip_unknown: bool = False
    skip_invalid: bool = False
    date_from: Optional[str] = None
    date_to: Optional[str] = None
    hypothesis: Optional[str] = None
    sim_p: Optional[float] = None
    sim_n: Optional[int] = None
    sim_q: Optional[float] = None
    sim_q_max: Optional[float] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    markov_k: List[float] = field(default_factory=list)
    sweep_parameter: Optional[str] = None
    sweep_start: Optional[float] = None
    sweep_stop: Optional[float] = None
    sweep_steps: Optional[int] = None
    workers: int = 1
    json_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if (self.psi is None) != (self.m_codes is None):
            raise InputError("--psi and --m-codes must be given together")
        if (self.timing_window is None) != (self.timing_frame is None):
            raise InputError("--timing-window and --timing-frame must be given together")
        if self.grouping not in ("pooled", "game", "series"):
            raise InputError(f"unknown grouping {self.grouping!r}")
        if self.hypothesis is not None and self.hypothesis not in ("coded", "random"):
            raise InputError(f"unknown hypothesis {self.hypothesis!r}; expected coded or random")
        if isinstance(self.workers, bool) or not isinstance(self.workers, int) or self.workers < 1:
            raise InputError(f"workers must be a positive integer, got {self.workers!r}")

    @property
    def has_summary(self) -> bool:
        return self.summary_n is not None

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload.pop("json_path")
        return payload

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]]) -> "AnalysisRequest":
        raw = dict(payload or {})
        float_keys = [
            "p", "q_max", "psi", "timing_window", "timing_frame",
            "sim_p", "sim_q", "sim_q_max", "sweep_start", "sweep_stop",
        ]
        int_keys = [
            "m_codes", "summary_n", "summary_m", "summary_positives", "timing_bangs",
            "sim_n", "reps", "seed", "sweep_steps",
        ]
        kwargs: Dict[str, Any] = {"mode": str(raw.get("mode", "")).strip()}
        for key in float_keys:
            kwargs[key] = _coerce_float(raw.get(key))
        for key in int_keys:
            kwargs[key] = _coerce_int(raw.get(key))
        for key in ["input_path", "taxonomy_path", "date_from", "date_to", "hypothesis", "sweep_parameter"]:
            value = raw.get(key)
            kwargs[key] = str(value) if value not in (None, "") else None
        kwargs["code"] = str(raw.get("code") or "c")
        kwargs["grouping"] = str(raw.get("grouping") or "pooled")
        for key in ["normalize", "skip_unknown", "skip_invalid"]:
            kwargs[key] = bool(raw.get(key, False))
        kwargs["markov_k"] = [
            number for number in (_coerce_float(k) for k in raw.get("markov_k", []) or []) if number is not None
        ]
        kwargs["workers"] = _coerce_int(raw.get("workers"), 1) or 1
        return cls(**kwargs)
