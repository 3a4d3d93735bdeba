import logging
import time

from celery import group, shared_task
from django.conf import settings
from rest_framework import serializers

from functions.exceptions import MetaliftError

from .exceptions import ConfigError
from .models import VerificationRun
from .registry import CHECKS
from .reports import VerificationReport
from .serializers import flatten_errors
from .utils import workers

logger = logging.getLogger("verification")


def execute_check(name: str, raw_params: dict, seed: int, config_hash: str = "") -> dict:
    """
    Validate the parameters and run one check. Config problems raise
    ConfigError; any other domain error becomes a failed report.
    """
    serializer_class, check = CHECKS[name]
    params = serializer_class(data=raw_params)
    if not params.is_valid():
        raise ConfigError("; ".join(flatten_errors(params.errors)))
    validated = params.to_params()

    logger.info(f"{name}: starting with {sorted(raw_params)}")
    start = time.perf_counter()
    try:
        report = check(validated, seed)
    except ConfigError:
        raise
    except MetaliftError as e:
        logger.error(f"{name}: {type(e).__name__}: {e}")
        case = validated.get("case")
        report = VerificationReport.failed(name, case.label if case is not None else "", dict(raw_params), validated["tol"], e)
    report.runtimeSeconds = round(time.perf_counter() - start, 3)
    report.configHash = config_hash
    report.workers = workers()

    level = logging.INFO if report.passed else logging.WARNING
    logger.log(
        level,
        f"{name} {report.case}: maxDefect={report.maxDefect:.3e} tol={report.tolerance:.1e} "
        f"{'PASS' if report.passed else 'FAIL'} in {report.runtimeSeconds}s",
    )
    return report.as_dict()


@shared_task(bind=True)
def run_check(self, name, raw_params, seed, config_hash=""):
    """
    Celery task running one verification check.
    Returns {"success": True, "results": [report]} or
    {"success": False, "error": ..., "config": bool}.
    """
    task_id = self.request.id
    logger.info(f"[{task_id}] Task started for check={name}")

    record = None
    if settings.METALIFT_RECORD_RUNS:
        record = VerificationRun.objects.create(
            check_name=name, params=raw_params, config_hash=config_hash, task_id=task_id or "", status="STARTED"
        )

    try:
        report = execute_check(name, raw_params, seed, config_hash)
    except (ConfigError, serializers.ValidationError) as e:
        logger.error(f"[{task_id}] Invalid parameters for {name}: {e}")
        if record:
            record.status = "FAILURE"
            record.notes = str(e)
            record.save()
        return {"success": False, "error": str(e), "config": True}
    except Exception as e:
        logger.exception(f"[{task_id}] {name} crashed: {e}")
        if record:
            record.status = "FAILURE"
            record.notes = str(e)
            record.save()
        return {"success": False, "error": f"{type(e).__name__}: {e}", "config": False}

    if record:
        record.record(report)

    logger.info(f"[{task_id}] Completed {name}")
    return {"success": True, "results": [report]}


def run_suite(runs, seed: int, config_hash: str):
    """Dispatch one task per (check, params); results come back in submission order."""
    job = group(run_check.s(name, raw, seed, config_hash) for name, raw in runs)
    return job.apply_async().get(disable_sync_subtasks=False)
