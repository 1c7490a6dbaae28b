"""Command-line entry point: ``nonkp <scenario> --config <path>``.

Exit status is 0 when every asserted check passes, 1 when a check fails or
the run blows up (a ``failure.json`` is written), and 2 for configuration
errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .config import SCENARIOS, ConfigError, parse_config
from .integrate import BlowUpError
from .io import build_id, write_json
from .scenarios import execute

DEFAULT_OUT = "nonkp_out"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonkp", description="Non-KP simulation and verification scenarios")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config", help="INI file with [grid], [run], [initial], ... sections")
    p.add_argument("--out", help=f"output root (default $NONKP_OUT_DIR or ./{DEFAULT_OUT})")
    p.add_argument("--seed", type=int, default=0, help="seed for random data (unsigned 64-bit)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override a config value; may be repeated")
    return p


def _failure(scenario: str, reason: str, t, detail: str) -> dict:
    return {"scenario": scenario, "reason": reason, "t": t, "detail": detail}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scn = parse_config(args.scenario, args.config, args.overrides, seed=args.seed, threads=args.threads)
    except ConfigError as exc:
        print(json.dumps(_failure(args.scenario, "config", None, str(exc))), file=sys.stderr)
        return 2

    root = Path(args.out or os.environ.get("NONKP_OUT_DIR") or DEFAULT_OUT)
    out = root / args.scenario
    out.mkdir(parents=True, exist_ok=True)
    for stale in ("failure.json", "summary.json"):
        (out / stale).unlink(missing_ok=True)

    try:
        outcome = execute(scn, out)
    except BlowUpError as exc:
        fail = _failure(args.scenario, "blow-up", exc.t, exc.detail)
        write_json(out / "failure.json", fail)
        print(json.dumps(fail), file=sys.stderr)
        return 1

    summary = {
        "scenario": args.scenario,
        "passed": outcome.passed,
        "checks": [asdict(c) for c in outcome.checks],
        "metrics": outcome.metrics,
        "files": outcome.files,
        "config": scn.sources,
        "seed": scn.seed,
        "build": build_id(),
    }
    write_json(out / "summary.json", summary)
    for c in outcome.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value:.6g} ({c.limit})")
    print(f"wrote {len(outcome.files) + 1} files to {out}")
    if outcome.passed:
        return 0
    failed = [c.name for c in outcome.checks if not c.passed]
    fail = _failure(args.scenario, "tolerance", None, "failed checks: " + ", ".join(failed))
    write_json(out / "failure.json", fail)
    print(json.dumps(fail), file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
