# src/apps/detection/serializers.py

from rest_framework import serializers


class ProbabilityTableSerializer(serializers.Serializer):
    """
    Read-only view of a ProbabilityTable.
    p_c and p_b are the constant and balanced averages.
    """
    p00 = serializers.FloatField(read_only=True)
    p01 = serializers.FloatField(read_only=True)
    p10 = serializers.FloatField(read_only=True)
    p11 = serializers.FloatField(read_only=True)
    p_c = serializers.FloatField(read_only=True)
    p_b = serializers.FloatField(read_only=True)
