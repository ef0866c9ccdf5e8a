"""JSON report assembly and plain-text rendering."""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from baseball_codes import BangRateEstimate, GroupedEvidence
from calibration_sim import SimulationSummary
from evidence_model import SweepRow
from schemas import AnalysisRequest, EvidenceReport, InputError

logger = logging.getLogger(__name__)

TOOL_NAME = "signalproof"
TOOL_VERSION = "1.0.0"

LINEAR_LR_LIMIT = 300.0

# Published bridge totals and the order of magnitude printed next to them.
REFERENCE_BRIDGE = {"n": 85, "m": 83, "positives": 45, "p": 0.9, "q_max": 1.0}
REFERENCE_BRIDGE_LR = 4e19

VERBAL_BANDS = (
    (1.0, "weak"),
    (2.0, "moderate"),
    (3.0, "moderately strong"),
    (4.0, "strong"),
    (6.0, "very strong"),
    (math.inf, "extremely strong"),
)


def verbal_scale(log10_lr: float) -> str:
    """Verbal equivalent of a log10 LR. Documented bands, not a normative scale."""
    magnitude = abs(log10_lr)
    if magnitude < 1e-12:
        return "no support either way"
    side = "coded" if log10_lr > 0 else "random"
    for upper, label in VERBAL_BANDS:
        if magnitude < upper:
            return f"{label} support for the {side} hypothesis"
    return f"extremely strong support for the {side} hypothesis"


def linear_lr(log10_lr: float) -> Optional[float]:
    if not math.isfinite(log10_lr) or abs(log10_lr) > LINEAR_LR_LIMIT:
        return None
    return 10.0**log10_lr


def evidence_payload(report: EvidenceReport) -> Dict[str, Any]:
    payload = report.to_dict()
    payload["lr"] = linear_lr(report.log10_lr)
    payload["verbal"] = verbal_scale(report.log10_lr)
    return payload


def reference_comparison(report: EvidenceReport) -> Optional[Dict[str, Any]]:
    """Order-of-magnitude comparison against the published bridge figure, when the inputs match it."""
    s, ref = report.summary, REFERENCE_BRIDGE
    if (s.n, s.m, s.positives) != (ref["n"], ref["m"], ref["positives"]):
        return None
    if report.coded.p != ref["p"] or report.random.q_max != ref["q_max"] or report.random.normalize:
        return None
    reference_log10 = math.log10(REFERENCE_BRIDGE_LR)
    return {
        "reference_lr": REFERENCE_BRIDGE_LR,
        "reference_log10_lr": reference_log10,
        "order_of_magnitude_difference": round(report.log10_lr - reference_log10),
        "authoritative": "computed",
    }


def group_rows(grouped: GroupedEvidence) -> List[Dict[str, Any]]:
    return [item.to_row() for item in grouped.groups]


def build_report(
    request: AnalysisRequest,
    body: Dict[str, Any],
    warnings: Iterable[str] = (),
) -> Dict[str, Any]:
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "mode": request.mode,
        "request": request.to_dict(),
        **body,
        "warnings": list(warnings),
    }


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, allow_nan=False, default=_json_default)


def _json_default(value: Any) -> Any:
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def write_json(report: Dict[str, Any], path: str) -> None:
    target = Path(path)
    try:
        target.write_text(dumps(report) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write report to {path}: {exc}") from exc
    logger.info("report written to %s", target)


def load_report(path: str) -> Dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or not isinstance(payload.get("request"), dict):
        raise InputError(f"{path} has no request block to replay")
    return payload


def _fmt(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{digits}f}"


def _table(rows: Sequence[Dict[str, Any]], float_digits: int = 6) -> str:
    frame = pd.DataFrame(list(rows))
    return frame.to_string(index=False, float_format=lambda v: f"{v:.{float_digits}f}")


def render_evidence(report: EvidenceReport, title: str) -> str:
    s = report.summary
    lines = [
        title,
        f"  applicable n={s.n}  matches m={s.m}  positives={s.positives}  excluded={s.excluded}",
        f"  model: p={report.coded.p}  q_max={report.random.q_max}  normalized={report.random.normalize}",
        f"  log10 P(signals | coded)  = {_fmt(report.log10_lik_coded)}",
        f"  log10 P(signals | random) = {_fmt(report.log10_lik_random)}",
        f"  log10 LR = {_fmt(report.log10_lr)}   LR = {report.lr_scientific}",
        f"  {verbal_scale(report.log10_lr)}",
    ]
    if report.posterior is not None:
        post = report.posterior
        lines += [
            f"  prior odds (psi={post.psi}, M={post.m_codes}): log10 = {_fmt(post.log10_prior_odds)}",
            f"  posterior odds: log10 = {_fmt(post.log10_posterior_odds)}"
            f"   P(coded | evidence) = {post.posterior_probability:.6g}",
        ]
    if report.timing is not None:
        timing = report.timing
        lines += [
            f"  timing: {timing.bang_count} bangs, window {timing.window_seconds:g}s of {timing.frame_seconds:g}s"
            f" -> log10 factor {_fmt(timing.log10_factor)}",
            f"  log10 LR with timing = {_fmt(timing.log10_lr_with_timing)}",
        ]
    return "\n".join(lines)


def render_groups(grouped: GroupedEvidence) -> str:
    header = f"per-{grouped.grouping} evidence ({len(grouped.groups)} groups)"
    if not grouped.groups:
        return f"{header}\n  (no groups)"
    body = _table(group_rows(grouped))
    return "\n".join([header, body, f"combined log10 LR = {_fmt(grouped.combined_log10_lr)}", f"note: {grouped.note}"])


def render_rate(estimate: BangRateEstimate, date_from: str, date_to: str) -> str:
    return "\n".join(
        [
            f"bang rate {date_from}..{date_to}",
            f"  games={estimate.games}  pitches={estimate.pitches}",
            f"  per-pitch rate   = {estimate.per_pitch_rate:.6g}",
            f"  peak game rate   = {estimate.per_game_max_rate:.6g}",
        ]
    )


def render_sweep(rows: Sequence[SweepRow], parameter: str) -> str:
    return _table([{parameter: row.value, "log10_lr": row.log10_lr} for row in rows])


def render_simulation(summary: SimulationSummary) -> str:
    config = summary.config
    lines = [
        f"simulation: {config['hypothesis']} n={config['n']} reps={summary.reps} seed={config['seed']}",
        f"  rng {summary.rng_algorithm}, per-rep seed {summary.seed_scheme}",
        f"  mean LR = {_fmt(summary.mean_lr)}  (log10 {_fmt(summary.log10_mean_lr)})"
        f"  MC standard error = {_fmt(summary.mc_standard_error)}",
        "  log10 LR quantiles: " + "  ".join(f"{k}={v:.4f}" for k, v in summary.quantiles.items()),
    ]
    if summary.markov:
        lines.append(
            _table(
                [
                    {
                        "k": check.k,
                        "P(LR>=k)": check.empirical_fraction,
                        "1/k": check.bound,
                        "slack": check.slack,
                        "pass": check.passed,
                    }
                    for check in summary.markov
                ]
            )
        )
    return "\n".join(lines)
