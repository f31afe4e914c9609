from rest_framework import serializers
from sympy import isprime

from .cartan import SlopeVector
from .exceptions import LoopAlgebraError
from .linalg import RANK_MODES, ModularPolicy
from .models import VerificationRun
from .parsers import load_cartan, parse_polynomial, parse_slope, parse_vector, parse_word
from .scalars import MIN_PRIME
from .shuffle import MINUS, PLUS, from_polynomial, word_to_element

DIMS_SPACES = ("slope-geq0", "b-subalgebra", "b", "band", "key", "word-span", "lr")
A_TABLE_MODES = ("finite", "recursion", "exploratory")
ECHO_EXCLUDED = ("out", "format", "record")


def _parsed(field, parser, *args):
    try:
        return parser(*args)
    except LoopAlgebraError as exc:
        raise serializers.ValidationError({field: str(exc)}) from exc


def _window(field, text, rank):
    vector = _parsed(field, parse_vector, text)
    if len(vector) == 1 and rank > 1:
        vector = vector * rank
    if len(vector) != rank:
        raise serializers.ValidationError({field: f"needs {rank} entries, got {len(vector)}"})
    if any(k < 0 for k in vector):
        raise serializers.ValidationError({field: "entries must be nonnegative"})
    return vector


class RunConfigSerializer(serializers.Serializer):
    """Flags shared by every loop_algebra command"""

    type = serializers.CharField(required=False, allow_null=True, allow_blank=True)
    cartan_file = serializers.CharField(required=False, allow_null=True)
    mode = serializers.ChoiceField(choices=RANK_MODES, default="exact")
    seed = serializers.IntegerField(required=False, allow_null=True)
    primes = serializers.CharField(required=False, allow_null=True)
    points = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    format = serializers.ChoiceField(choices=("json", "csv"), default="json")
    out = serializers.CharField(required=False, allow_null=True)
    record = serializers.BooleanField(default=False)
    with_timing = serializers.BooleanField(default=False)

    def validate_primes(self, value):
        if value is None:
            return None
        try:
            primes = [int(p) for p in value.split(",") if p.strip()]
        except ValueError:
            raise serializers.ValidationError("primes must be a comma-separated list of integers")
        for prime in primes:
            if prime <= MIN_PRIME or not isprime(prime):
                raise serializers.ValidationError(f"{prime} is not a prime above 2^30")
        return primes or None

    def validate(self, attrs):
        try:
            attrs["cartan"] = load_cartan(attrs.get("type") or None, attrs.get("cartan_file"))
        except LoopAlgebraError as exc:
            raise serializers.ValidationError({"type": str(exc)}) from exc
        attrs["policy"] = ModularPolicy.from_settings(
            seed=attrs.get("seed"), primes=attrs.get("primes"), num_points=attrs.get("points")
        )
        return attrs

    def echo(self):
        """The config as given, for embedding in reports"""
        return {
            key: value
            for key, value in sorted(self.initial_data.items())
            if value not in (None, False, "") and key not in ECHO_EXCLUDED
        }


class VerifyTheoremConfigSerializer(RunConfigSerializer):
    r = serializers.CharField()
    max_n = serializers.CharField()
    max_d = serializers.IntegerField(min_value=0)
    unrefined = serializers.BooleanField(default=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        rank = attrs["cartan"].rank
        attrs["r"] = _parsed("r", parse_vector, attrs["r"], rank)
        attrs["max_n"] = _window("max_n", attrs["max_n"], rank)
        return attrs


class DimsConfigSerializer(RunConfigSerializer):
    space = serializers.ChoiceField(choices=DIMS_SPACES)
    max_n = serializers.CharField()
    max_d = serializers.IntegerField(required=False, allow_null=True)
    d_min = serializers.IntegerField(default=0)
    r = serializers.CharField(required=False, allow_null=True)
    p = serializers.CharField(required=False, allow_null=True)
    p1 = serializers.CharField(required=False, allow_null=True)
    p2 = serializers.CharField(required=False, allow_null=True)
    show_basis = serializers.BooleanField(default=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        rank = attrs["cartan"].rank
        space = "b-subalgebra" if attrs["space"] == "b" else attrs["space"]
        attrs["space"] = space
        attrs["max_n"] = _window("max_n", attrs["max_n"], rank)
        params = {}
        if space != "b-subalgebra" and attrs.get("max_d") is None:
            raise serializers.ValidationError({"max_d": f"--max-d is required for {space}"})
        if space == "lr":
            if not attrs.get("r"):
                raise serializers.ValidationError({"r": "--r is required for lr"})
            params["r"] = list(_parsed("r", parse_vector, attrs["r"], rank))
        if space == "b-subalgebra":
            if not attrs.get("p"):
                raise serializers.ValidationError({"p": "--p is required for b-subalgebra"})
            params["p"] = self._finite_slope("p", attrs["p"], rank)
        if space in ("band", "key"):
            for name in ("p1", "p2"):
                if not attrs.get(name):
                    raise serializers.ValidationError({name: f"--{name} is required for {space}"})
                params[name] = _parsed(name, parse_slope, attrs[name], rank)
            if params["p1"].is_infinite and params["p2"].is_infinite:
                raise serializers.ValidationError(
                    {"p1": "at most one end of the band may be infinite"}
                )
            if params["p1"].infinity > 0 or params["p2"].infinity < 0:
                raise serializers.ValidationError({"p1": "p1 must lie below p2"})
        if space == "band" and attrs["d_min"] > attrs["max_d"]:
            raise serializers.ValidationError({"d_min": "must not exceed --max-d"})
        if attrs["show_basis"] and space != "slope-geq0":
            raise serializers.ValidationError({"show_basis": "only available for slope-geq0"})
        attrs["params"] = params
        return attrs

    def _finite_slope(self, field, text, rank) -> SlopeVector:
        slope = _parsed(field, parse_slope, text, rank)
        if slope.is_infinite:
            raise serializers.ValidationError({field: "must be a finite slope"})
        return slope


class PairConfigSerializer(RunConfigSerializer):
    word = serializers.CharField()
    minus = serializers.CharField()
    hdeg = serializers.CharField(required=False, allow_null=True)
    antipode = serializers.BooleanField(default=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        cartan = attrs["cartan"]
        word = _parsed("word", parse_word, attrs["word"], cartan.rank)
        if word.sign != PLUS:
            raise serializers.ValidationError({"word": "the plus side takes an e-word"})
        attrs["word"] = word
        if "f[" in attrs["minus"]:
            minus_word = _parsed("minus", parse_word, attrs["minus"], cartan.rank)
            if minus_word.sign != MINUS:
                raise serializers.ValidationError({"minus": "the minus side takes an f-word"})
            attrs["element"] = word_to_element(cartan, minus_word)
        else:
            hdeg = attrs.get("hdeg")
            if hdeg:
                hdeg = _parsed("hdeg", parse_vector, hdeg, cartan.rank)
            numerator = _parsed("minus", parse_polynomial, attrs["minus"], hdeg, cartan.rank)
            attrs["element"] = from_polynomial(cartan, MINUS, numerator)
        return attrs


class ATableConfigSerializer(RunConfigSerializer):
    bound = serializers.CharField()
    a_mode = serializers.ChoiceField(choices=A_TABLE_MODES, default="finite")
    dims_file = serializers.CharField(required=False, allow_null=True)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs["bound"] = _window("bound", attrs["bound"], attrs["cartan"].rank)
        if attrs["a_mode"] == "recursion" and not attrs.get("dims_file"):
            raise serializers.ValidationError(
                {"dims_file": "recursion mode needs a B_0 dimension table"}
            )
        return attrs


class CellRowSerializer(serializers.Serializer):
    """One report cell flattened for CSV"""

    n = serializers.SerializerMethodField()
    d = serializers.IntegerField(allow_null=True)
    computed = serializers.IntegerField()
    formula = serializers.IntegerField()
    passed = serializers.BooleanField(source="pass")
    mode = serializers.CharField()
    confirmed_exact = serializers.BooleanField(default=None, allow_null=True)
    seconds = serializers.FloatField(default=None, allow_null=True)

    def get_n(self, obj):
        return ",".join(str(k) for k in obj["n"])


class VerificationRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = VerificationRun
        fields = [
            "id",
            "command",
            "cartan_label",
            "config",
            "report",
            "passed",
            "exit_code",
            "elapsed_seconds",
            "created_at",
        ]
        read_only_fields = ["id", "created_at"]

    def validate_exit_code(self, value):
        if value not in (0, 1, 2, 3):
            raise serializers.ValidationError("exit code must be 0, 1, 2 or 3")
        return value
