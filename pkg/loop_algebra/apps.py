from django.apps import AppConfig


class LoopAlgebraConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "loop_algebra"
    verbose_name = "Quantum loop algebra shuffle engine"
