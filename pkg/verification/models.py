from django.db import models


class BaseModel(models.Model):
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True


class VerificationRun(BaseModel):
    """One check execution, recorded when METALIFT_RECORD_RUNS is on."""
    check_name = models.CharField(max_length=50, db_index=True)
    case = models.CharField(max_length=50, blank=True)
    params = models.JSONField(default=dict)

    max_defect = models.FloatField(null=True, blank=True)
    tolerance = models.FloatField(null=True, blank=True)
    passed = models.BooleanField(null=True)
    samples = models.IntegerField(default=0)
    runtime_seconds = models.FloatField(null=True, blank=True)
    notes = models.TextField(blank=True)
    config_hash = models.CharField(max_length=64, blank=True)
    body_hash = models.CharField(max_length=64, blank=True)
    workers = models.PositiveIntegerField(default=1)

    task_id = models.CharField(max_length=255, db_index=True, blank=True)
    status = models.CharField(
        max_length=20,
        choices=[
            ("PENDING", "Pending"),
            ("STARTED", "Started"),
            ("SUCCESS", "Success"),
            ("FAILURE", "Failure"),
        ],
        default="PENDING",
    )

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return f"{self.check_name} {self.case} ({self.status})"

    def record(self, report: dict):
        self.case = report["case"]
        self.max_defect = None if isinstance(report["maxDefect"], str) else report["maxDefect"]
        self.tolerance = report["tolerance"]
        self.passed = report["pass"]
        self.samples = report["samples"]
        self.runtime_seconds = report["runtimeSeconds"]
        self.notes = report["notes"]
        self.body_hash = report["bodyHash"]
        self.workers = report["workers"]
        self.status = "SUCCESS"
        self.save()
