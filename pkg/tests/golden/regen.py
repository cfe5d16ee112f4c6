"""Rewrite the pinned reports: python3 tests/golden/regen.py"""

import json
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from helpers import normalize_report  # noqa: E402
from psucentre.cli import RunConfig, run  # noqa: E402

for q in (2, 3, 4, 5):
    report, code = run(RunConfig(mode="report", qs=[q], threads=1))
    assert code == 0, report["failed_checks"]
    (HERE / f"report_q{q}.json").write_text(json.dumps(normalize_report(report), indent=2) + "\n")
