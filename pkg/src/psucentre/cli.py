"""Command-line front end: ``psucentre <mode> [options]`` writes a JSON report.

Exit codes: 0 when every check passes, 2 when the group-order budget is
exceeded (the report then carries the closed-form sections only), 3 when a
check fails (named on stderr and in ``failed_checks``).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import pipeline, zkncf
from .classalg import THREADS_ENV, default_threads
from .commalg import loewy_profile
from .gfq import FieldError, is_prime, make_field_ctx
from .unitary import BIG_BUDGET, DEFAULT_BUDGET, BudgetExceeded, normalizer_order, psu_order

SCHEMA = 1
MODES = ("field-info", "analyze-n", "analyze-g", "closed-form", "crosscheck", "tensor", "report")
EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_CHECK = 0, 1, 2, 3

@dataclass
class RunConfig:
    mode: str
    p: int | None = None
    r: int | None = None
    q: int | None = None
    qs: list[int] = field(default_factory=list)
    budget: int = DEFAULT_BUDGET
    dump_constants: str | None = None
    csv: str | None = None
    seed: int = 0
    threads: int | None = None
    progress: bool = False

    def validate(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.r is not None and self.r < 1:
            raise ValueError("r must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, default=_jsonable) + "\n"


def _merge(report: dict, part: dict):
    checks = part.pop("checks", {})
    report.update(part)
    report["checks"].update({k: bool(v) for k, v in checks.items()})


def _field(cfg: RunConfig, q: int | None = None):
    if q is not None:
        p, r = zkncf.prime_power(q)
        return make_field_ctx(p, r)
    if cfg.p is None or cfg.r is None:
        raise ValueError(f"{cfg.mode} needs --p and --r")
    return make_field_ctx(cfg.p, cfg.r)


def _need_budget(F, cfg: RunConfig):
    order = psu_order(F.q)
    if order > cfg.budget:
        raise BudgetExceeded(f"|PSU(3,{F.q})| = {order} exceeds the budget {cfg.budget}"
                             + ("" if cfg.budget >= BIG_BUDGET else "; pass --allow-big"))


def _run_single(cfg: RunConfig, F, report: dict) -> None:
    """Fill ``report`` for one field; partial contents survive exceptions."""
    report["metadata"] = pipeline.metadata(F)
    report["metadata"]["seed"] = cfg.seed
    mode = cfg.mode
    if mode == "field-info":
        report["field"] = pipeline.field_info(F)
        return
    if mode == "closed-form":
        _merge(report, pipeline.closed_form(F.q, cfg.p, csv_path=cfg.csv, F=F))
        return
    if mode == "crosscheck":
        _merge(report, pipeline.crosscheck(F, threads=cfg.threads))
        return
    if mode == "analyze-n":
        if normalizer_order(F.q) > cfg.budget:
            raise BudgetExceeded(f"|N| = {normalizer_order(F.q)} exceeds the budget {cfg.budget}")
        part, _ = pipeline.analyze_n(F, threads=cfg.threads, dump=cfg.dump_constants, progress=cfg.progress)
        _merge(report, part)
        return

    # analyze-g, tensor and report all need the full group
    if mode in ("tensor", "report"):
        _merge(report, pipeline.closed_form(F.q, F=F))
    try:
        _need_budget(F, cfg)
    except BudgetExceeded:
        if mode == "analyze-g" and "closed_form" not in report:
            _merge(report, pipeline.closed_form(F.q, F=F))
        raise
    if mode == "report":
        report["field"] = pipeline.field_info(F)
    partn, objn = pipeline.analyze_n(F, threads=cfg.threads, progress=cfg.progress,
                                     dump=cfg.dump_constants if mode != "analyze-g" else None)
    if mode == "report":
        _merge(report, partn)
        _merge(report, pipeline.crosscheck(F, threads=cfg.threads))
    partg, objg = pipeline.analyze_g(F, threads=cfg.threads, budget=cfg.budget, progress=cfg.progress,
                                     seed=cfg.seed, dump=cfg.dump_constants if mode == "analyze-g" else None)
    if mode in ("analyze-g", "report"):
        _merge(report, partg)
    if mode in ("tensor", "report"):
        B = objg["principal"]
        _merge(report, pipeline.tensor_section(F, loewy_profile(B), objn["profile"], B, objn["A"]))


def run(cfg: RunConfig) -> tuple[dict, int]:
    """Execute ``cfg``; returns (report, exit code)."""
    cfg.validate()
    report = {"schema": SCHEMA, "mode": cfg.mode, "timestamp": _timestamp()}
    code = EXIT_OK
    if cfg.mode == "report":
        report["runs"] = []
        failed = []
        for q in cfg.qs:
            sub = {"checks": {}}
            report["runs"].append(sub)
            c = _guarded(lambda: _run_single(cfg, _field(cfg, q), sub), sub)
            failed += [f"q={q}:{n}" for n in sub.get("failed_checks", [])]
            code = max(code, c)
        report["failed_checks"] = failed
        return report, code
    report["checks"] = {}
    if cfg.mode == "closed-form":
        F = _field(cfg, cfg.q) if cfg.q * cfg.q <= 1 << 16 else None
        if F is None:
            pp, r = zkncf.prime_power(cfg.q)
            report["metadata"] = {"q": cfg.q, "p": cfg.p or pp, "r": r, "gamma": zkncf.gamma_of(cfg.q),
                                  "field_polynomial": None, "seed": cfg.seed,
                                  "versions": pipeline.metadata_versions()}
            code = _guarded(lambda: _merge(report, pipeline.closed_form(cfg.q, cfg.p, csv_path=cfg.csv)),
                            report)
            return report, code
        if cfg.p is None:
            cfg.p = F.p
        return report, _guarded(lambda: _run_single(cfg, F, report), report)
    return report, _guarded(lambda: _run_single(cfg, _field(cfg), report), report)


def _guarded(fn, report: dict) -> int:
    try:
        fn()
    except BudgetExceeded as e:
        report["budget_exceeded"] = str(e)
        keep = {"schema", "mode", "timestamp", "metadata", "closed_form", "checks", "budget_exceeded"}
        for k in list(report):
            if k not in keep:
                del report[k]
        report["checks"] = {k: v for k, v in report.get("checks", {}).items() if k.startswith("closed_form_")}
        report["failed_checks"] = [k for k, v in report["checks"].items() if not v]
        return EXIT_CHECK if report["failed_checks"] else EXIT_BUDGET
    except AssertionError as e:
        report["failed_checks"] = [f"{type(e).__name__}: {e}"]
        return EXIT_CHECK
    report["failed_checks"] = [k for k, v in report.get("checks", {}).items() if not v]
    return EXIT_CHECK if report["failed_checks"] else EXIT_OK


def _qlist(text: str) -> list[int]:
    qs = [int(t) for t in text.replace(" ", "").split(",") if t]
    for q in qs:
        zkncf.prime_power(q)
    return qs


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="FILE", help="write the JSON report here instead of stdout")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${THREADS_ENV} or the CPU count)")
    common.add_argument("--budget", type=int, default=None, help="largest group order to enumerate")
    common.add_argument("--allow-big", action="store_true",
                        help=f"raise the budget to {BIG_BUDGET} and show progress")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--progress", action="store_true", help="progress line on stderr")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="psucentre", description="Centres of blocks of PSU(3,q) and its Sylow normalizer")
    sub = ap.add_subparsers(dest="mode", required=True)

    def pr(name, help_, dump=False):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--p", type=int, required=True)
        s.add_argument("--r", type=int, required=True)
        if dump:
            s.add_argument("--dump-constants", metavar="FILE", help="CSV of nonzero structure constants")
        return s

    pr("field-info", "field parameters and special elements")
    pr("analyze-n", "Sylow normalizer N and the Loewy profile of Z(F_p N)", dump=True)
    pr("analyze-g", "PSU(3,q), blocks of Z(F_p G) and the principal block", dump=True)
    pr("crosscheck", "closed-form Z(kN) table against brute force")
    pr("tensor", "Loewy data of Z(B) and Z(b) tensored with k[X]/X^p", dump=False)
    s = sub.add_parser("closed-form", parents=[common], help="closed-form multiplication table of Z(kN)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--csv", metavar="FILE", help="write the integer table as CSV")
    s = sub.add_parser("report", parents=[common], help="every section for each q in a list")
    s.add_argument("--q", type=_qlist, required=True, metavar="Q1,Q2,...")
    return ap


def config_from_args(ns) -> RunConfig:
    budget = ns.budget if ns.budget is not None else (BIG_BUDGET if ns.allow_big else DEFAULT_BUDGET)
    threads = ns.threads if ns.threads is not None else default_threads()
    cfg = RunConfig(mode=ns.mode, p=getattr(ns, "p", None), r=getattr(ns, "r", None), budget=budget,
                    dump_constants=getattr(ns, "dump_constants", None), csv=getattr(ns, "csv", None),
                    seed=ns.seed, threads=threads, progress=ns.progress or ns.allow_big)
    if ns.mode == "closed-form":
        cfg.q = ns.q
    elif ns.mode == "report":
        cfg.qs = ns.q
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        report, code = run(cfg)
    except (ValueError, FieldError) as e:
        print(f"psucentre: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report)
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_BUDGET:
        print(f"psucentre: budget exceeded: {report.get('budget_exceeded') or 'see report'}", file=sys.stderr)
    elif code == EXIT_CHECK:
        fails = report.get("failed_checks", [])
        print("psucentre: check failed: " + ", ".join(fails), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
