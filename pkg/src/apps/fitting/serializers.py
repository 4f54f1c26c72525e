# src/apps/fitting/serializers.py

from rest_framework import serializers


class FitResultSerializer(serializers.Serializer):
    amplitude = serializers.FloatField(read_only=True)
    visibility = serializers.FloatField(read_only=True)
    delta_phi = serializers.FloatField(read_only=True)
    center_offset = serializers.FloatField(read_only=True)
    residual_rms = serializers.FloatField(read_only=True)


class PeakAreasSerializer(serializers.Serializer):
    """Image-plane areas and the modulator attenuation they imply."""
    area_neg = serializers.FloatField()
    area_pos = serializers.FloatField(min_value=0.0)
    amplitude_ratio = serializers.FloatField(read_only=True)
    population_0 = serializers.FloatField(read_only=True)
    population_1 = serializers.FloatField(read_only=True)

    def validate_area_neg(self, value):
        if value <= 0:
            raise serializers.ValidationError("The |0> peak area must be positive.")
        return value
