from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from verification.cli import EXIT_CONFIG, dispatch, exit_for, load_run_config
from verification.registry import CHECKS
from verification.utils import config_hash, load_json, parse_expansion, parse_floats, parse_range

# flag dest -> (params key, parser)
FLAGS = {
    "case": ("case", str),
    "rep": ("rep", str),
    "generator": ("generator", str),
    "k": ("k", lambda v: list(parse_range(v))),
    "m": ("m", lambda v: list(parse_range(v))),
    "l": ("l", lambda v: list(parse_range(v))),
    "L": ("L", int),
    "k_range": ("kRange", lambda v: list(parse_range(v))),
    "tol": ("tol", float),
    "elements": ("elements", int),
    "points": ("points", int),
    "samples": ("samples", int),
    "property": ("property", str),
    "M": ("M", int),
    "spot_checks": ("spotChecks", int),
    "spot_tol": ("spotTol", float),
    "f": ("f", parse_expansion),
    "g": ("g", parse_expansion),
    "function": ("function", load_json),
    "override": ("override", load_json),
}


class Command(BaseCommand):
    help = "Run one verification check (per alpha when --alpha is a list) and write JSON reports."

    def add_arguments(self, parser):
        parser.add_argument("check", choices=sorted(CHECKS))
        parser.add_argument("--case", help="L, Q, LQ, I, II, III or IV")
        parser.add_argument("--alpha", help="one value or a comma list, e.g. -1,-0.5,-0.1, or grid for the configured grid of --case")
        parser.add_argument("--rep", help="l, q or J")
        parser.add_argument("--generator", help="DR or DT")
        parser.add_argument("--k", help="scale range a..b (write --k=-2..2 for negative starts)")
        parser.add_argument("--m", help="translation range a..b")
        parser.add_argument("--l", help="symmetric fiber box a..b of the truncation S_N")
        parser.add_argument("--L", type=int, help="fiber basis box |k|, |l| <= L")
        parser.add_argument("--k-range", dest="k_range", help="explicit k range of a discrete sum")
        parser.add_argument("--tol", type=float)
        parser.add_argument("--elements", type=int)
        parser.add_argument("--points", type=int)
        parser.add_argument("--samples", type=int)
        parser.add_argument("--property", help="charts: roundtrip, jacobian or invariance")
        parser.add_argument("--M", type=int, help="band-limited sum cut-off |m| <= M")
        parser.add_argument("--spot-checks", dest="spot_checks", type=int)
        parser.add_argument("--spot-tol", dest="spot_tol", type=float)
        parser.add_argument("--allow-partial", dest="allow_partial", action="store_true")
        parser.add_argument("--f", help="fiber expansion, e.g. 0,0:0.6;1,0:0.8")
        parser.add_argument("--g", help="fiber expansion, e.g. 0,0")
        parser.add_argument("--function", help="function JSON file")
        parser.add_argument("--override", help="bijection override JSON file")
        parser.add_argument("--params", help="JSON file with further check parameters")
        parser.add_argument("--config", help="RunConfig JSON supplying seed, outputDir and tolerances")
        parser.add_argument("--seed", type=int)
        parser.add_argument("--output-dir", dest="output_dir")

    def handle(self, *args, **options):
        check = options["check"]
        config = load_run_config(options["config"]) if options["config"] else {}

        try:
            raw = dict(load_json(options["params"])) if options["params"] else {}
            for dest, (key, convert) in FLAGS.items():
                if options.get(dest) is not None:
                    raw[key] = convert(options[dest])
            alphas = self.alpha_grid(options)
        except (OSError, ValueError) as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)
        if options["allow_partial"]:
            raw["allowPartial"] = True
        if "tol" not in raw and check in config.get("tolerances", {}):
            raw["tol"] = config["tolerances"][check]

        runs = [(check, raw if alpha is None else {**raw, "alpha": alpha}) for alpha in alphas]
        seed = options["seed"] if options["seed"] is not None else config.get("seed", settings.METALIFT_SEED)
        output_dir = options["output_dir"] or config.get("outputDir") or settings.METALIFT_OUTPUT_DIR
        cfg_hash = config.get("hash") or config_hash({"runs": runs, "seed": seed})

        reports = dispatch(runs, seed, cfg_hash, output_dir, self.stdout)
        exit_for(reports)

    def alpha_grid(self, options):
        value = options["alpha"]
        if not value:
            return [None]
        if value == "grid":
            grid = settings.METALIFT["ALPHA_GRID"].get(options["case"] or "")
            if not grid:
                raise ValueError(f"no alpha grid configured for case {options['case']!r}")
            return list(grid)
        return parse_floats(value)
