# src/apps/experiments/serializers.py

from collections.abc import Mapping

from rest_framework import serializers

from apps.biphoton.heralding import HeraldWindow
from apps.detection.povm import DetectorConfig
from apps.fitting.serializers import PeakAreasSerializer
from apps.montecarlo.serializers import CountResultSerializer
from apps.optics.patterns import PatternModel, SlitGeometry
from apps.qubits.exceptions import UnphysicalParameter

from .experiment import Experiment

SEED_MAX = 2 ** 64 - 1


def _positive(value, name):
    if not value > 0:
        raise serializers.ValidationError(f"{name} must be positive.")
    return value


def _non_negative(value, name):
    if not value >= 0:
        raise serializers.ValidationError(f"{name} must not be negative.")
    return value


class StrictSerializer(serializers.Serializer):
    """
    Base for every config section.
    Keys that are not declared fields are errors, not silently dropped.
    """

    def to_internal_value(self, data):
        unknown = {}
        if isinstance(data, Mapping):
            unknown = {key: ["Unknown field."] for key in sorted(set(data) - set(self.fields))}
        try:
            value = super().to_internal_value(data)
        except serializers.ValidationError as exc:
            if not unknown:
                raise
            raise serializers.ValidationError({**exc.detail, **unknown})
        if unknown:
            raise serializers.ValidationError(unknown)
        return value


# --- Config Sections ---
class GeometrySerializer(StrictSerializer):
    slit_width = serializers.FloatField()
    slit_separation = serializers.FloatField()
    wavelength = serializers.FloatField()
    focal_length = serializers.FloatField(allow_null=True)
    crossing_point = serializers.FloatField(allow_null=True)
    magnification = serializers.FloatField()

    def validate_slit_width(self, value):
        return _positive(value, "slit_width")

    def validate_slit_separation(self, value):
        return _positive(value, "slit_separation")

    def validate_wavelength(self, value):
        return _positive(value, "wavelength")

    def validate_magnification(self, value):
        return _positive(value, "magnification")

    def validate(self, attrs):
        if (attrs["focal_length"] is None) == (attrs["crossing_point"] is None):
            raise serializers.ValidationError("Give exactly one of focal_length and crossing_point.")
        try:
            self.create(attrs)
        except UnphysicalParameter as exc:
            raise serializers.ValidationError(str(exc.detail))
        return attrs

    def create(self, validated_data):
        if validated_data["focal_length"] is None:
            return SlitGeometry.from_crossing(
                validated_data["slit_width"],
                validated_data["slit_separation"],
                validated_data["wavelength"],
                validated_data["crossing_point"],
            )
        return SlitGeometry(
            validated_data["slit_width"],
            validated_data["slit_separation"],
            validated_data["wavelength"],
            validated_data["focal_length"],
        )


class DetectorSerializer(StrictSerializer):
    center = serializers.FloatField()
    width = serializers.FloatField(help_text="Metres; Infinity covers the whole plane.")
    efficiency = serializers.FloatField(min_value=0.0, max_value=1.0)

    def validate_width(self, value):
        return _non_negative(value, "width")

    def create(self, validated_data):
        return DetectorConfig(**validated_data)


class HeraldSerializer(StrictSerializer):
    center = serializers.FloatField()
    width = serializers.FloatField()

    def validate_width(self, value):
        return _non_negative(value, "width")

    def create(self, validated_data):
        return HeraldWindow(**validated_data)


class MonteCarloSerializer(StrictSerializer):
    herald_rate = serializers.FloatField(help_text="Heralds per second.")
    duration = serializers.FloatField(help_text="Seconds per oracle run.")
    seed = serializers.IntegerField(min_value=0, max_value=SEED_MAX, allow_null=True)
    trials = serializers.IntegerField(min_value=1)
    block_size = serializers.IntegerField(min_value=1)
    workers = serializers.IntegerField(min_value=1)

    def validate_herald_rate(self, value):
        return _positive(value, "herald_rate")

    def validate_duration(self, value):
        return _positive(value, "duration")


class ScanSerializer(StrictSerializer):
    w_min = serializers.FloatField()
    w_max = serializers.FloatField()
    step = serializers.FloatField()

    def validate_w_min(self, value):
        return _positive(value, "w_min")

    def validate_step(self, value):
        return _positive(value, "step")

    def validate(self, attrs):
        if not attrs["w_min"] < attrs["w_max"]:
            raise serializers.ValidationError({"w_max": ["Must exceed w_min."]})
        return attrs


class PatternGridSerializer(StrictSerializer):
    x_min = serializers.FloatField()
    x_max = serializers.FloatField()
    step = serializers.FloatField()

    def validate_step(self, value):
        return _positive(value, "step")

    def validate(self, attrs):
        if not attrs["x_min"] < attrs["x_max"]:
            raise serializers.ValidationError({"x_max": ["Must exceed x_min."]})
        return attrs


class CalibrationSerializer(StrictSerializer):
    detector_width = serializers.FloatField()
    target_success = serializers.FloatField(min_value=0.0, max_value=1.0)
    counts_constant = serializers.IntegerField(min_value=0)
    counts_balanced = serializers.IntegerField(min_value=0)
    area_neg = serializers.FloatField()
    area_pos = serializers.FloatField()

    def validate_detector_width(self, value):
        return _positive(value, "detector_width")

    def validate_area_neg(self, value):
        return _positive(value, "area_neg")

    def validate_area_pos(self, value):
        return _non_negative(value, "area_pos")


class ExperimentConfigSerializer(StrictSerializer):
    """
    The full, resolved experiment config.
    save() returns an Experiment carrying the validated data and the domain
    objects built from it.
    """
    geometry = GeometrySerializer()
    visibility = serializers.FloatField(min_value=0.0, max_value=1.0)
    detector = DetectorSerializer()
    herald = HeraldSerializer()
    monte_carlo = MonteCarloSerializer()
    scan = ScanSerializer()
    pattern = PatternGridSerializer()
    calibration = CalibrationSerializer()

    def create(self, validated_data):
        geometry = self.fields["geometry"].create(validated_data["geometry"])
        return Experiment(
            config=validated_data,
            geometry=geometry,
            model=PatternModel(geometry, validated_data["visibility"]),
            detector=self.fields["detector"].create(validated_data["detector"]),
            herald=self.fields["herald"].create(validated_data["herald"]),
        )


# --- Reports ---
class CoincidenceTableSerializer(serializers.Serializer):
    seed = serializers.IntegerField(read_only=True)
    visibility = serializers.FloatField(read_only=True)
    herald_rate = serializers.FloatField(read_only=True)
    duration = serializers.FloatField(read_only=True)
    calibrated = serializers.BooleanField(read_only=True)
    rows = CountResultSerializer(many=True, read_only=True)


class CalibrationReportSerializer(serializers.Serializer):
    """Every constant the simulator derives from the quoted measurements."""
    focal_length = serializers.FloatField(read_only=True)
    crossing_point = serializers.FloatField(read_only=True)
    visibility = serializers.FloatField(read_only=True)
    target_success = serializers.FloatField(read_only=True)
    table_visibility = serializers.FloatField(read_only=True)
    herald_rate = serializers.FloatField(read_only=True)
    attenuation = PeakAreasSerializer(read_only=True)
