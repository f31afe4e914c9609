from django.db import models


class VerificationRun(models.Model):
    """One invocation of a loop_algebra management command"""

    COMMAND_CHOICES = [
        ("verify_theorem", "Verify theorem"),
        ("dims", "Dimensions"),
        ("pair", "Pairing"),
        ("roots", "Roots"),
        ("a_table", "a-coefficient table"),
    ]

    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    cartan_label = models.CharField(max_length=50)
    config = models.JSONField(default=dict)
    report = models.JSONField(default=dict, blank=True)
    passed = models.BooleanField(null=True, blank=True)
    exit_code = models.PositiveSmallIntegerField(default=0)
    elapsed_seconds = models.FloatField(default=0.0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["command", "cartan_label"], name="loop_algebr_command_5b1f0e_idx"),
        ]

    def __str__(self):
        verdict = {True: "pass", False: "FAIL", None: "n/a"}[self.passed]
        return f"{self.command} on {self.cartan_label} ({verdict}, exit {self.exit_code})"
