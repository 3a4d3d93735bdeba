import csv
import io
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from functions.atoms import AtomSum
from functions.exceptions import MetaliftError
from functions.inner import inner_product
from verification.cli import EXIT_CONFIG
from verification.serializers import CoeffsParamsSerializer, flatten_errors
from verification.systems import coefficient_table, l_side_function, scale_energy
from verification.utils import load_json, parse_range, write_atomic

logger = logging.getLogger("metalift.cli")


def is_empty(f) -> bool:
    return not len(f) if isinstance(f, AtomSum) else not f.terms


def outside_warnings(f, lift, box, tol):
    """Scales next to the box that still carry energy, or elements outside it."""
    if isinstance(f, AtomSum):
        if lift is None:
            return []
        return [
            f"scale k={k} outside the box carries energy {energy:.3e}"
            for k in (box.k[0] - 1, box.k[1] + 1)
            if (energy := scale_energy(f, lift, k, tol)) > tol
        ]
    return [f"element (k={k}, m={m}) lies outside the box" for k, m in f.outside(box)]


def coefficient_csv(rows, header, comments) -> str:
    buffer = io.StringIO()
    for key, value in comments.items():
        buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    total = 0.0
    for *index, coef in rows:
        coef = complex(coef)
        total += abs(coef) ** 2
        writer.writerow([*index, repr(coef.real), repr(coef.imag)])
    writer.writerow(["parseval"] + [""] * (len(header) - 3) + [repr(total), ""])
    return buffer.getvalue()


class Command(BaseCommand):
    help = "Write the frame coefficients <f, mu_lambda psi> of a function as CSV with a Parseval row."

    def add_arguments(self, parser):
        parser.add_argument("--function", required=True, help="function JSON file (atoms or elements)")
        parser.add_argument("--system", default="l", help="l (mu^l on psi^D), q (mu^q on U psi^D) or S (separable Shannon)")
        parser.add_argument("--generator", help="DR or DT")
        parser.add_argument("--override", help="bijection override JSON file")
        parser.add_argument("--k", default="-2..2")
        parser.add_argument("--m", default="-4..4")
        parser.add_argument("--l", default="0..0", help="fiber frequencies of the separable system")
        parser.add_argument("--out", help="CSV path (default <output dir>/coeffs.csv)")

    def handle(self, *args, **options):
        try:
            raw = {
                "system": options["system"],
                "function": load_json(options["function"]),
                "k": list(parse_range(options["k"])),
                "m": list(parse_range(options["m"])),
                "l": list(parse_range(options["l"])),
            }
            if options["generator"]:
                raw["generator"] = options["generator"]
            if options["override"]:
                raw["override"] = load_json(options["override"])
        except (OSError, ValueError) as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)

        params = CoeffsParamsSerializer(data=raw)
        if not params.is_valid():
            raise CommandError("; ".join(flatten_errors(params.errors)), returncode=EXIT_CONFIG)
        data = params.validated_data
        system, lift, box, tol = data["system"], data["lift"], data["box"], data["tol"]

        try:
            f = l_side_function(data["function"], "q" if system == "q" else "l")
            for message in outside_warnings(f, lift, box, tol):
                logger.warning(message)
                self.stderr.write(f"warning: {message}")
            if is_empty(f):
                rows, norm2 = [], 0.0
            else:
                rows = coefficient_table(f, "S" if system == "S" else "lift", lift, box, data["l"])
                norm2 = f.norm2() if not isinstance(f, AtomSum) else float(inner_product(f, f, tol=tol).real)
        except MetaliftError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)

        header = ["k", "m", "l", "coef_re", "coef_im"] if system == "S" else ["k", "m", "coef_re", "coef_im"]
        comments = {
            "schemaVersion": settings.METALIFT["SCHEMA_VERSION"],
            "system": system if lift is None else f"{system} {lift.bijection.name}",
            "box": f"k={box.k[0]}..{box.k[1]} m={box.m[0]}..{box.m[1]}",
            "norm2": repr(norm2),
        }
        out = Path(options["out"]) if options["out"] else Path(settings.METALIFT_OUTPUT_DIR) / "coeffs.csv"
        path = write_atomic(out, coefficient_csv(rows, header, comments))
        self.stdout.write(f"{len(rows)} coefficients -> {path}")
