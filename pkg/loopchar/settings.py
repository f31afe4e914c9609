"""
Django settings for the loopchar project.

Every engine tunable is read through python-decouple, so values can come from the
environment or from a .env file next to manage.py.
"""

from pathlib import Path

import dj_database_url
from decouple import Csv, config

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config("SECRET_KEY", default="loopchar-dev-only-secret-key")
DEBUG = config("DEBUG", default=True, cast=bool)
ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="localhost,127.0.0.1", cast=Csv())

# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "loop_algebra",
]

MIDDLEWARE = []

ROOT_URLCONF = None

# Database

DATABASES = {
    "default": dj_database_url.config(
        default=config("DATABASE_URL", default=f"sqlite:///{BASE_DIR / 'loopchar.sqlite3'}"),
        conn_max_age=0,
    )
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "UNAUTHENTICATED_USER": None,
}

# Engine configuration

LOOPCHAR_SEED = config("LOOPCHAR_SEED", default=0, cast=int)
LOOPCHAR_PRIMES = config(
    "LOOPCHAR_PRIMES",
    default="2147483647,4294967291,2305843009213693951",
    cast=Csv(int),
)
LOOPCHAR_MODULAR_POINTS = config("LOOPCHAR_MODULAR_POINTS", default=3, cast=int)
LOOPCHAR_ORDER_GUARD = config("LOOPCHAR_ORDER_GUARD", default=64, cast=int)
LOOPCHAR_ROOT_CLOSURE_CAP = config("LOOPCHAR_ROOT_CLOSURE_CAP", default=500, cast=int)
LOOPCHAR_CAP_SLACK = config("LOOPCHAR_CAP_SLACK", default=0, cast=int)
LOOPCHAR_CERTIFY_CAPS = config("LOOPCHAR_CERTIFY_CAPS", default=True, cast=bool)
LOOPCHAR_EARLY_STOP = config("LOOPCHAR_EARLY_STOP", default=True, cast=bool)
LOOPCHAR_CONFIRM_CELLS = config("LOOPCHAR_CONFIRM_CELLS", default=5, cast=int)
LOOPCHAR_THREADS = config("LOOPCHAR_THREADS", default=1, cast=int)
LOOPCHAR_RECORD_RUNS = config("LOOPCHAR_RECORD_RUNS", default=False, cast=bool)
LOOPCHAR_DEBUG_SLOTS = config("LOOPCHAR_DEBUG_SLOTS", default=DEBUG, cast=bool)

# Logging

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
            "level": config("LOOPCHAR_CONSOLE_LEVEL", default="WARNING"),
        },
        "file": {
            "class": "logging.FileHandler",
            "filename": config("LOOPCHAR_LOG_FILE", default=str(BASE_DIR / "loopchar.log")),
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "INFO",
    },
    "loggers": {
        "django": {
            "handlers": ["file", "console"],
            "level": "INFO",
            "propagate": False,
        },
        "loop_algebra": {
            "handlers": ["file", "console"],
            "level": config("LOOPCHAR_LOG_LEVEL", default="INFO"),
            "propagate": False,
        },
    },
}

# Celery (one task per character cell)

CELERY_BROKER_URL = config("CELERY_BROKER_URL", default="redis://127.0.0.1:6379/0")
CELERY_RESULT_BACKEND = config("CELERY_RESULT_BACKEND", default="redis://127.0.0.1:6379/0")
CELERY_TASK_ALWAYS_EAGER = config("CELERY_TASK_ALWAYS_EAGER", default=True, cast=bool)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = TIME_ZONE
CELERY_WORKER_CONCURRENCY = LOOPCHAR_THREADS

# Monitoring

SENTRY_DSN = config("SENTRY_DSN", default="")
if SENTRY_DSN:
    import sentry_sdk
    from sentry_sdk.integrations.django import DjangoIntegration

    sentry_sdk.init(
        dsn=SENTRY_DSN,
        integrations=[DjangoIntegration()],
        traces_sample_rate=0.0,
        send_default_pii=False,
    )
