import json
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from verification.cli import DEFAULT_CONFIG, aggregate, dispatch, exit_for, load_run_config
from verification.utils import write_atomic


class Command(BaseCommand):
    help = "Run every check a RunConfig lists; writes per-check reports and suite.json."

    def add_arguments(self, parser):
        parser.add_argument("config", nargs="?", default=str(DEFAULT_CONFIG))
        parser.add_argument("--seed", type=int)
        parser.add_argument("--output-dir", dest="output_dir")

    def handle(self, *args, **options):
        config = load_run_config(options["config"])
        seed = options["seed"] if options["seed"] is not None else config.get("seed", settings.METALIFT_SEED)
        output_dir = Path(options["output_dir"] or config.get("outputDir") or settings.METALIFT_OUTPUT_DIR)

        reports = dispatch(config["runs"], seed, config["hash"], output_dir, self.stdout)
        summary = aggregate(reports, seed, config["hash"])
        path = write_atomic(output_dir / "suite.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
        self.stdout.write(f"{'PASS' if summary['pass'] else 'FAIL'} suite: {summary['checks']} checks -> {path}")
        exit_for(reports)
