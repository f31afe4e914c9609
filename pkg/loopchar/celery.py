import os

from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "loopchar.settings")

app = Celery("loopchar")
app.config_from_object("django.conf:settings", namespace="CELERY")
app.autodiscover_tasks()
