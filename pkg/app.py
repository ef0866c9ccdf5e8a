"""signalproof: likelihood-ratio evidence for hidden signaling codes in bridge leads and pitch logs."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

from baseball_codes import estimate_bang_rate, per_game_evidence, pooled_summary
from bridge_codes import evaluate_code, get_code
from calibration_sim import (
    DEFAULT_MARKOV_K,
    DEFAULT_SEED,
    Hypothesis,
    QSpec,
    SimConfig,
    lr_distribution,
    summarize_sample,
)
from data_loader import load_taxonomy, parse_date, parse_lead_csv, parse_pitch_csv
from evidence_model import evaluate, summarize, sweep
from report_format import (
    build_report,
    dumps,
    evidence_payload,
    group_rows,
    load_report,
    reference_comparison,
    render_evidence,
    render_groups,
    render_rate,
    render_simulation,
    render_sweep,
    write_json,
)
from schemas import (
    AnalysisRequest,
    CodedModel,
    InputError,
    MatchSummary,
    NumericFailure,
    PriorParams,
    RandomModel,
)

load_dotenv(dotenv_path=os.path.join(os.path.dirname(__file__), ".env"))

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERIC_FAILURE = 2

BRIDGE_DEFAULTS = {"p": 0.9, "q_max": 1.0}
BASEBALL_DEFAULTS = {"p": 0.8, "q_max": 0.1}
SIMULATE_DEFAULTS = {"p": 0.9, "q_max": 1.0}
SWEEP_DEFAULTS = {"p": 0.9, "q_max": 1.0}
DEFAULT_REPS = 10_000

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


@dataclass
class RunResult:
    report: Dict[str, Any]
    text: str


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}") from None


def _env_str(name: str) -> Optional[str]:
    value = os.getenv(name, "").strip()
    return value or None


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 stays reserved for numeric failure."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise InputError(message)


def _add_model_flags(parser: argparse.ArgumentParser, defaults: Dict[str, float]) -> None:
    parser.add_argument("--p", type=float, default=None, help=f"coded-model p (default {defaults['p']})")
    parser.add_argument("--qmax", type=float, default=None, help=f"random-model q_max (default {defaults['q_max']})")
    parser.add_argument("--normalize-prior", action="store_true", help="divide the random likelihood by q_max")


def _add_prior_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--psi", type=float, default=None, help="prior probability that the team uses some code")
    parser.add_argument("--m-codes", type=int, default=None, help="number of equally likely candidate codes")


def _add_json_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", dest="json_path", default=None, metavar="PATH", help="write the JSON report here")


def build_parser() -> _Parser:
    parser = _Parser(prog="signalproof", description=__doc__)
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True)

    bridge = commands.add_parser("bridge", help="bridge lead orientation code")
    bridge.add_argument("--input", dest="input_path", default=None, metavar="CSV")
    bridge.add_argument("--summary-n", type=int, default=None)
    bridge.add_argument("--summary-m", type=int, default=None)
    bridge.add_argument("--summary-h", dest="summary_positives", type=int, default=None)
    bridge.add_argument("--code", default="c", help="c, deuce_of_clubs or board_parity")
    _add_model_flags(bridge, BRIDGE_DEFAULTS)
    _add_prior_flags(bridge)
    _add_json_flag(bridge)

    baseball = commands.add_parser("baseball", help="pitch-type bang code")
    baseball.add_argument("--input", dest="input_path", default=None, metavar="CSV")
    baseball.add_argument("--summary-n", type=int, default=None)
    baseball.add_argument("--summary-m", type=int, default=None)
    baseball.add_argument("--summary-b", dest="summary_positives", type=int, default=None)
    baseball.add_argument("--taxonomy", dest="taxonomy_path", default=None, metavar="CSV")
    baseball.add_argument("--skip-unknown", action="store_true", help="skip unknown pitch types with a warning")
    baseball.add_argument("--skip-invalid", action="store_true", help="skip malformed rows with a warning")
    grouping = baseball.add_mutually_exclusive_group()
    grouping.add_argument("--per-game", dest="grouping", action="store_const", const="game")
    grouping.add_argument("--per-series", dest="grouping", action="store_const", const="series")
    baseball.add_argument("--workers", type=int, default=None)
    baseball.add_argument("--timing-window", type=float, default=None, metavar="S")
    baseball.add_argument("--timing-frame", type=float, default=None, metavar="S")
    baseball.add_argument("--timing-bangs", type=int, default=None, metavar="N")
    _add_model_flags(baseball, BASEBALL_DEFAULTS)
    _add_prior_flags(baseball)
    _add_json_flag(baseball)

    rate = commands.add_parser("rate", help="quiet-period bang rate")
    rate.add_argument("--input", dest="input_path", required=True, metavar="CSV")
    rate.add_argument("--from", dest="date_from", required=True, metavar="DATE")
    rate.add_argument("--to", dest="date_to", required=True, metavar="DATE")
    rate.add_argument("--skip-invalid", action="store_true")
    _add_json_flag(rate)

    simulate = commands.add_parser("simulate", help="Monte Carlo LR calibration")
    simulate.add_argument("--hypothesis", required=True, choices=[h.value for h in Hypothesis])
    simulate.add_argument("--n", dest="sim_n", type=int, required=True)
    simulate.add_argument("--p", type=float, default=None, help="generator p under the coded hypothesis")
    rate_spec = simulate.add_mutually_exclusive_group()
    rate_spec.add_argument("--q", dest="sim_q", type=float, default=None, help="fixed signal rate")
    rate_spec.add_argument("--q-max", dest="sim_q_max", type=float, default=None, help="q ~ uniform(0, q_max)")
    simulate.add_argument("--model-p", dest="model_p", type=float, default=None)
    simulate.add_argument("--model-qmax", dest="model_qmax", type=float, default=None)
    simulate.add_argument("--normalize-prior", action="store_true")
    simulate.add_argument("--reps", type=int, default=None)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--markov-k", type=float, nargs="+", default=None)
    simulate.add_argument("--workers", type=int, default=None)
    _add_json_flag(simulate)

    sweep_cmd = commands.add_parser("sweep", help="log10 LR over a grid of p or q_max")
    sweep_cmd.add_argument("--summary-n", type=int, required=True)
    sweep_cmd.add_argument("--summary-m", type=int, required=True)
    sweep_cmd.add_argument("--summary-positives", type=int, required=True)
    sweep_cmd.add_argument("--parameter", dest="sweep_parameter", required=True, choices=["p", "q_max"])
    sweep_cmd.add_argument("--start", dest="sweep_start", type=float, required=True)
    sweep_cmd.add_argument("--stop", dest="sweep_stop", type=float, required=True)
    sweep_cmd.add_argument("--steps", dest="sweep_steps", type=int, required=True)
    _add_model_flags(sweep_cmd, SWEEP_DEFAULTS)
    _add_json_flag(sweep_cmd)

    replay = commands.add_parser("replay", help="re-run the request echoed in a JSON report")
    replay.add_argument("report_path", metavar="REPORT.json")
    _add_json_flag(replay)
    return parser


def request_from_args(args: argparse.Namespace) -> AnalysisRequest:
    """Fold flags, environment and built-in defaults into one request (flags win, then environment)."""
    if args.command == "replay":
        request = AnalysisRequest.from_dict(load_report(args.report_path)["request"])
        request.json_path = args.json_path
        return request

    fields: Dict[str, Any] = {"mode": args.command, "json_path": args.json_path}
    for name in (
        "input_path", "summary_n", "summary_m", "summary_positives", "psi", "m_codes",
        "timing_window", "timing_frame", "timing_bangs", "taxonomy_path", "date_from", "date_to",
        "sim_n", "sim_q", "sim_q_max", "reps", "seed", "sweep_parameter", "sweep_start",
        "sweep_stop", "sweep_steps", "workers", "skip_unknown", "skip_invalid",
    ):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    if hasattr(args, "normalize_prior"):
        fields["normalize"] = args.normalize_prior

    if args.command == "bridge":
        fields["code"] = args.code
    if args.command in ("bridge", "baseball", "sweep"):
        fields["p"], fields["q_max"] = args.p, args.qmax
    if args.command == "baseball":
        fields["grouping"] = args.grouping or "pooled"
        fields["taxonomy_path"] = args.taxonomy_path or _env_str("SIGNALPROOF_TAXONOMY_FILE")
    if args.command == "simulate":
        fields["hypothesis"] = args.hypothesis
        fields["p"], fields["q_max"] = args.model_p, args.model_qmax
        fields["sim_p"] = args.p
        fields["reps"] = args.reps if args.reps is not None else DEFAULT_REPS
        fields["seed"] = args.seed if args.seed is not None else _env_int("SIGNALPROOF_SEED", DEFAULT_SEED)
        fields["markov_k"] = list(args.markov_k) if args.markov_k else list(DEFAULT_MARKOV_K)
    if fields.get("workers") is None:
        fields["workers"] = _env_int("SIGNALPROOF_WORKERS", 1)
    fields.setdefault("skip_unknown", False)
    fields.setdefault("skip_invalid", False)
    return AnalysisRequest(**{key: value for key, value in fields.items() if value is not None or key == "json_path"})


def _models(request: AnalysisRequest, defaults: Dict[str, float]) -> Tuple[CodedModel, RandomModel]:
    p = request.p if request.p is not None else defaults["p"]
    q_max = request.q_max if request.q_max is not None else defaults["q_max"]
    return CodedModel(p=p), RandomModel(q_max=q_max, normalize=request.normalize)


def _prior(request: AnalysisRequest) -> Optional[PriorParams]:
    if request.psi is None:
        return None
    return PriorParams(psi=request.psi, m_codes=request.m_codes)


def _direct_summary(request: AnalysisRequest) -> MatchSummary:
    if request.input_path is not None:
        raise InputError("give either --input or the --summary-* counts, not both")
    if request.summary_m is None or request.summary_positives is None:
        raise InputError("direct-summary mode needs n, m and the positive count")
    return MatchSummary(n=request.summary_n, m=request.summary_m, positives=request.summary_positives)


def _require_input(request: AnalysisRequest) -> str:
    if request.input_path is None:
        raise InputError(f"{request.mode} needs --input or the --summary-* counts")
    return request.input_path


def _run_bridge(request: AnalysisRequest) -> RunResult:
    coded, random = _models(request, BRIDGE_DEFAULTS)
    code = get_code(request.code)
    if request.has_summary:
        summary = _direct_summary(request)
        source = "summary"
    else:
        records = parse_lead_csv(_require_input(request))
        summary = summarize(evaluate_code(code, records))
        source = request.input_path
    report = evaluate(summary, coded, random, prior=_prior(request))
    body = {"code": code.id, **evidence_payload(report), "reference": reference_comparison(report)}
    text = render_evidence(report, f"bridge code {code.id} ({source})")
    reference = body["reference"]
    if reference is not None:
        text += (
            f"\n  published figure ~{reference['reference_lr']:.0e}; computed value differs by"
            f" {reference['order_of_magnitude_difference']} order(s) of magnitude"
        )
    return RunResult(report=build_report(request, body), text=text)


def _run_baseball(request: AnalysisRequest) -> RunResult:
    coded, random = _models(request, BASEBALL_DEFAULTS)
    warnings: List[str] = []
    grouped = None
    if request.has_summary:
        summary = _direct_summary(request)
    else:
        taxonomy = load_taxonomy(request.taxonomy_path)
        parsed = parse_pitch_csv(_require_input(request), skip_invalid=request.skip_invalid)
        warnings.extend(parsed.warnings)
        if request.grouping == "pooled":
            summary = pooled_summary(parsed.records, taxonomy, skip_unknown=request.skip_unknown, warnings=warnings)
        else:
            grouped = per_game_evidence(
                parsed.records,
                taxonomy,
                coded,
                random,
                grouping=request.grouping,
                skip_unknown=request.skip_unknown,
                workers=request.workers,
            )
            warnings.extend(grouped.warnings)
            summary = MatchSummary(
                n=sum(g.summary.n for g in grouped.groups),
                m=sum(g.summary.m for g in grouped.groups),
                positives=sum(g.summary.positives for g in grouped.groups),
            )

    timing = None
    if request.timing_window is not None:
        bangs = request.timing_bangs if request.timing_bangs is not None else summary.positives
        timing = (bangs, request.timing_window, request.timing_frame)
    report = evaluate(summary, coded, random, prior=_prior(request), timing=timing)

    body: Dict[str, Any] = evidence_payload(report)
    text = render_evidence(report, "baseball code B (pooled)")
    if grouped is not None:
        body["groups"] = group_rows(grouped)
        body["grouping"] = grouped.grouping
        body["combined_log10_lr"] = grouped.combined_log10_lr
        body["independence_note"] = grouped.note
        text += "\n" + render_groups(grouped)
    return RunResult(report=build_report(request, body, warnings), text=text)


def _run_rate(request: AnalysisRequest) -> RunResult:
    if request.date_from is None or request.date_to is None:
        raise InputError("rate needs --from and --to")
    date_from = parse_date(request.date_from, "--from")
    date_to = parse_date(request.date_to, "--to")
    parsed = parse_pitch_csv(_require_input(request), skip_invalid=request.skip_invalid)
    estimate = estimate_bang_rate(parsed.records, date_from, date_to)
    body = {"from": date_from.isoformat(), "to": date_to.isoformat(), "rate": estimate.to_dict()}
    text = render_rate(estimate, date_from.isoformat(), date_to.isoformat())
    return RunResult(report=build_report(request, body, parsed.warnings), text=text)


def _run_simulate(request: AnalysisRequest) -> RunResult:
    if request.hypothesis is None or request.sim_n is None:
        raise InputError("simulate needs --hypothesis and --n")
    hypothesis = Hypothesis(request.hypothesis)
    q_spec = None
    if hypothesis is Hypothesis.RANDOM:
        if request.sim_q is not None:
            q_spec = QSpec(fixed=request.sim_q)
        else:
            q_spec = QSpec(q_max=request.sim_q_max if request.sim_q_max is not None else SIMULATE_DEFAULTS["q_max"])
    generator_p = request.sim_p
    if hypothesis is Hypothesis.CODED and generator_p is None:
        generator_p = SIMULATE_DEFAULTS["p"]
    config = SimConfig(
        hypothesis=hypothesis,
        n=request.sim_n,
        reps=request.reps if request.reps is not None else DEFAULT_REPS,
        seed=request.seed if request.seed is not None else DEFAULT_SEED,
        p=generator_p if hypothesis is Hypothesis.CODED else None,
        q_spec=q_spec,
    )
    model_defaults = {
        "p": generator_p if generator_p is not None else SIMULATE_DEFAULTS["p"],
        "q_max": q_spec.q_max if q_spec is not None and q_spec.q_max is not None else SIMULATE_DEFAULTS["q_max"],
    }
    coded, random = _models(request, model_defaults)
    sample = lr_distribution(config, coded, random, workers=request.workers)
    summary = summarize_sample(config, sample, request.markov_k or DEFAULT_MARKOV_K)
    body = {"model": {"p": coded.p, "q_max": random.q_max, "normalize": random.normalize}, "simulation": summary.to_dict()}
    return RunResult(report=build_report(request, body), text=render_simulation(summary))


def _run_sweep(request: AnalysisRequest) -> RunResult:
    coded, random = _models(request, SWEEP_DEFAULTS)
    summary = MatchSummary(n=request.summary_n, m=request.summary_m, positives=request.summary_positives)
    rows = sweep(
        summary,
        request.sweep_parameter,
        request.sweep_start,
        request.sweep_stop,
        request.sweep_steps,
        coded,
        random,
    )
    body = {
        "summary": summary.to_dict(),
        "model": {"p": coded.p, "q_max": random.q_max, "normalize": random.normalize},
        "parameter": request.sweep_parameter,
        "rows": [{"value": row.value, "log10_lr": row.log10_lr} for row in rows],
    }
    return RunResult(report=build_report(request, body), text=render_sweep(rows, request.sweep_parameter))


_PIPELINES = {
    "bridge": _run_bridge,
    "baseball": _run_baseball,
    "rate": _run_rate,
    "simulate": _run_simulate,
    "sweep": _run_sweep,
}


def run(request: AnalysisRequest) -> RunResult:
    logger.info("running %s", request.mode)
    return _PIPELINES[request.mode](request)


def _configure_logging(level_name: Optional[str]) -> None:
    name = (level_name or _env_str("SIGNALPROOF_LOG_LEVEL") or "WARNING").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise InputError(f"unknown log level {level_name!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.log_level)
        request = request_from_args(args)
        result = run(request)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_FAILURE

    print(result.text)
    if request.json_path:
        try:
            write_json(result.report, request.json_path)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
    else:
        logger.debug("report:\n%s", dumps(result.report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
