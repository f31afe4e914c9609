from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="VerificationRun",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "command",
                    models.CharField(
                        choices=[
                            ("verify_theorem", "Verify theorem"),
                            ("dims", "Dimensions"),
                            ("pair", "Pairing"),
                            ("roots", "Roots"),
                            ("a_table", "a-coefficient table"),
                        ],
                        max_length=20,
                    ),
                ),
                ("cartan_label", models.CharField(max_length=50)),
                ("config", models.JSONField(default=dict)),
                ("report", models.JSONField(blank=True, default=dict)),
                ("passed", models.BooleanField(blank=True, null=True)),
                ("exit_code", models.PositiveSmallIntegerField(default=0)),
                ("elapsed_seconds", models.FloatField(default=0.0)),
                ("created_at", models.DateTimeField(auto_now_add=True)),
            ],
            options={
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["command", "cartan_label"],
                        name="loop_algebr_command_5b1f0e_idx",
                    )
                ],
            },
        ),
    ]
