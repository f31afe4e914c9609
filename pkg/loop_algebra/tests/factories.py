import factory

from loop_algebra.models import VerificationRun


class VerificationRunFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = VerificationRun

    command = "verify_theorem"
    cartan_label = factory.Iterator(["A1", "A2", "B2"])
    config = factory.LazyAttribute(lambda run: {"type": run.cartan_label, "r": "1", "max_d": 2})
    report = factory.Dict({"kind": "theorem", "cells": []})
    passed = True
    exit_code = factory.LazyAttribute(lambda run: 0 if run.passed is not False else 1)
    elapsed_seconds = factory.Faker("pyfloat", min_value=0, max_value=5)
