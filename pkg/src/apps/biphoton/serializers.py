# src/apps/biphoton/serializers.py

from rest_framework import serializers


class ComplexField(serializers.Field):
    """Complex numbers go out as [real, imag] pairs."""

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


class QubitStateSerializer(serializers.Serializer):
    alpha = ComplexField(read_only=True)
    beta = ComplexField(read_only=True)


class MixedStateSerializer(serializers.Serializer):
    rho00 = serializers.FloatField(source="rho00.real", read_only=True)
    rho01 = ComplexField(read_only=True)
    rho11 = serializers.FloatField(source="rho11.real", read_only=True)
    purity = serializers.FloatField(read_only=True)


class HeraldReportSerializer(serializers.Serializer):
    window_center = serializers.FloatField(source="window.center", read_only=True)
    window_width = serializers.FloatField(source="window.width", read_only=True)
    herald_phase = serializers.FloatField(read_only=True)
    conditional_state = QubitStateSerializer(read_only=True)
    heralded_state = MixedStateSerializer(read_only=True)
    commutes = serializers.DictField(child=serializers.BooleanField(), read_only=True)
