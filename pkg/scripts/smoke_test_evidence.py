"""Minimal smoke test for the evidence pipeline on published summary counts."""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import run  # noqa: E402
from report_format import dumps  # noqa: E402
from schemas import AnalysisRequest  # noqa: E402


def main() -> None:
    requests = [
        AnalysisRequest(mode="bridge", summary_n=85, summary_m=83, summary_positives=45, p=0.9, q_max=1.0),
        AnalysisRequest(
            mode="baseball",
            summary_n=267,
            summary_m=201,
            summary_positives=85,
            p=0.8,
            q_max=0.1,
            timing_window=6.0,
            timing_frame=30.0,
            timing_bangs=1,
        ),
        AnalysisRequest(mode="bridge", summary_n=85, summary_m=83, summary_positives=45, psi=0.5, m_codes=10),
    ]
    for request in requests:
        result = run(request)
        print(result.text)
        print(dumps(result.report))
        print()

    headline = {
        "bridge_log10_lr": run(requests[0]).report["log10_lr"],
        "baseball_log10_lr": run(requests[1]).report["log10_lr"],
    }
    print(json.dumps(headline, indent=2))


if __name__ == "__main__":
    main()
