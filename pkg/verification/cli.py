"""
Command-line front end: `verify <check>`, `coeffs` and `suite`.

run(argv) dispatches to the management commands and turns their
CommandError return codes into the process exit code: 0 when every check
passes, 2 when a check fails, 1 on a config or input error.
"""

import json
import logging
import os
import re
import sys
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from rest_framework import serializers

from .exceptions import ConfigError
from .reports import body_hash
from .serializers import RunConfigSerializer, flatten_errors
from .utils import config_hash, load_json, write_atomic

logger = logging.getLogger("metalift.cli")

COMMANDS = ("verify", "coeffs", "suite")
EXIT_PASS, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2

DEFAULT_CONFIG = Path(__file__).resolve().parent / "configs" / "default.json"

# values such as -2..2 or -1,-0.5 that argparse would take for flags
NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d)[\d.,eE+-]*$")


def load_run_config(path) -> dict:
    """Read and validate a RunConfig; errors carry the file and field path."""
    try:
        data = load_json(path)
    except (OSError, ValueError) as e:
        raise CommandError(f"cannot read config: {e}", returncode=EXIT_CONFIG)
    config = RunConfigSerializer(data=data)
    if not config.is_valid():
        raise CommandError(f"{path}: " + "; ".join(flatten_errors(config.errors)), returncode=EXIT_CONFIG)
    validated = dict(config.validated_data)
    validated["hash"] = config_hash(data)
    return validated


def report_filename(report: dict, raw: dict) -> str:
    label = re.sub(r"[^A-Za-z0-9.=-]+", "_", report["case"] or "all").strip("_")
    return f"{report['check']}-{label}-{config_hash(raw)[:8]}.json"


def dispatch(runs, seed: int, cfg_hash: str, output_dir, stdout):
    """
    Run (check, raw params) pairs, write one report per run and return the
    list of report dicts. Config errors inside a run raise CommandError(1).
    """
    from .tasks import run_suite

    output_dir = Path(output_dir)
    outcomes = run_suite(runs, seed, cfg_hash)
    reports = []
    for (name, raw), outcome in zip(runs, outcomes):
        if not outcome["success"]:
            if outcome.get("config"):
                raise CommandError(f"{name}: {outcome['error']}", returncode=EXIT_CONFIG)
            logger.error(f"{name} crashed: {outcome['error']}")
            raise CommandError(f"{name} crashed: {outcome['error']}", returncode=EXIT_FAILED)
        for report in outcome["results"]:
            path = write_atomic(output_dir / report_filename(report, raw), canonical_report(report))
            stdout.write(
                f"{'PASS' if report['pass'] else 'FAIL'} {report['check']} {report['case']} "
                f"maxDefect={report['maxDefect']} tol={report['tolerance']} -> {path}"
            )
            reports.append(report)
    return reports


def canonical_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def aggregate(reports, seed: int, cfg_hash: str) -> dict:
    data = {
        "schemaVersion": settings.METALIFT["SCHEMA_VERSION"],
        "seed": seed,
        "configHash": cfg_hash,
        "workers": reports[0]["workers"] if reports else 1,
        "pass": all(r["pass"] for r in reports),
        "checks": len(reports),
        "failed": [f"{r['check']} {r['case']}" for r in reports if not r["pass"]],
        "reports": [
            {k: r[k] for k in ("check", "case", "maxDefect", "tolerance", "pass", "bodyHash")} for r in reports
        ],
        "runtimeSeconds": round(sum(r["runtimeSeconds"] for r in reports), 3),
    }
    data["bodyHash"] = body_hash(data)
    return data


def exit_for(reports) -> None:
    failed = [r for r in reports if not r["pass"]]
    if failed:
        raise CommandError(f"{len(failed)} of {len(reports)} checks failed", returncode=EXIT_FAILED)


def join_negative_values(argv):
    """["--k", "-2..2"] -> ["--k=-2..2"]."""
    out, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token.startswith("--") and "=" not in token and i + 1 < len(argv) and NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMMANDS:
        logger.error(f"usage: {{{'|'.join(COMMANDS)}}} [options]; got {argv[:1]}")
        return EXIT_CONFIG
    name, rest = argv[0], join_negative_values(argv[1:])
    logger.info(f"dispatching {name} {' '.join(rest)}")
    try:
        call_command(name, *rest)
    except CommandError as e:
        code = getattr(e, "returncode", EXIT_CONFIG) or EXIT_CONFIG
        logger.log(logging.WARNING if code == EXIT_FAILED else logging.ERROR, f"{name}: {e} (exit {code})")
        return code
    except (ConfigError, serializers.ValidationError) as e:
        logger.error(f"{name}: {e} (exit {EXIT_CONFIG})")
        return EXIT_CONFIG
    logger.info(f"{name}: all checks passed (exit {EXIT_PASS})")
    return EXIT_PASS


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "metalift.settings")
    import django

    django.setup()
    sys.exit(run())


if __name__ == "__main__":
    main()
